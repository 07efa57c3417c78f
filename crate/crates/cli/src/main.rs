use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fracwave_core::algebra::{parse_rational, Assignment, Symbol};
use fracwave_core::ansatz::{ALPHA, LAMBDA, MU};
use fracwave_core::closed_form::{
    profile_csv, sample_profile, BranchKind, Grid, Mode, SolutionBranch, WaveCoefficients,
};
use fracwave_core::fractional::{jumarie_deriv, ode_residual, power_rule_value, QuadratureConfig};
use fracwave_core::reduction::{
    homogeneous_balance, integrate_once, reduce_to_ode, BalanceDerivation, EquationSpec, ReducedODE,
};
use fracwave_core::solve::solve_numeric;
use fracwave_core::system::{
    collect_system_with, derivation_report, verify_candidate, AlgebraicSystem, CandidateSolution, SystemOptions,
};
use fracwave_core::Error;

/// (G'/G)-expansion travelling waves for space-time fractional evolution equations.
#[derive(Parser)]
#[command(name = "fracwave", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reduce the equation to an ODE and determine the ansatz order m.
    Balance {
        /// Equation JSON file.
        #[arg(long)]
        equation: PathBuf,
    },
    /// Derive the algebraic system for the ansatz coefficients.
    System {
        /// Equation JSON file.
        #[arg(long)]
        equation: PathBuf,
        /// Ansatz order; defaults to the balanced order.
        #[arg(short = 'm')]
        m: Option<u32>,
        /// Wave numbers moved into the unknowns: K, L or K,L.
        #[arg(long, value_delimiter = ',')]
        unknowns: Vec<String>,
    },
    /// Check a candidate coefficient set exactly against the system.
    Verify {
        /// Equation JSON file.
        #[arg(long)]
        equation: PathBuf,
        /// Candidate JSON file.
        #[arg(long)]
        candidate: PathBuf,
        /// Label recorded in the report: derived or paper-literal.
        #[arg(long, default_value = "derived")]
        mode: Mode,
        /// Ansatz order; defaults to the balanced order.
        #[arg(short = 'm')]
        m: Option<u32>,
        /// Also write the report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve the instantiated system numerically (damped Newton, seeded restarts).
    Solve {
        /// Equation JSON file.
        #[arg(long)]
        equation: PathBuf,
        /// Parameter values, e.g. omega=6,eta=1,nu=0,lambda=1,mu=0,K=1,L=1.
        #[arg(long, allow_hyphen_values = true)]
        params: String,
        /// Seed for the restart points.
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Ansatz order; defaults to the balanced order.
        #[arg(short = 'm')]
        m: Option<u32>,
        /// Wave numbers moved into the unknowns: K, L or K,L.
        #[arg(long, value_delimiter = ',')]
        unknowns: Vec<String>,
    },
    /// Sample the wave profile u(xi) of a candidate to CSV.
    Eval {
        #[command(flatten)]
        profile: ProfileArgs,
        /// CSV output file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Maximum residual of the reduced ODE along a candidate's profile.
    Residual {
        /// Equation JSON file.
        #[arg(long)]
        equation: PathBuf,
        #[command(flatten)]
        profile: ProfileArgs,
        /// Exit with code 4 when the maximum residual exceeds this value.
        #[arg(long)]
        tol: Option<f64>,
        /// Also write the report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Modified Riemann-Liouville derivative of s^r by quadrature against the power rule.
    Fracderiv {
        /// Derivative order in (0, 1).
        #[arg(long)]
        alpha: f64,
        /// Exponent r of s^r.
        #[arg(long)]
        r: f64,
        /// Evaluation point s > 0.
        #[arg(long)]
        s: f64,
        /// Number of quadrature panels.
        #[arg(long, default_value_t = 2048)]
        panels: usize,
    },
}

#[derive(Args)]
struct ProfileArgs {
    /// Candidate JSON file.
    #[arg(long)]
    candidate: PathBuf,
    /// Solution branch: hyperbolic, trig or rational.
    #[arg(long)]
    branch: BranchKind,
    /// Riccati coefficient lambda.
    #[arg(long, allow_hyphen_values = true)]
    lambda: f64,
    /// Riccati coefficient mu.
    #[arg(long, allow_hyphen_values = true)]
    mu: f64,
    /// Integration constant A of G.
    #[arg(long = "A", allow_hyphen_values = true)]
    a: f64,
    /// Integration constant B of G.
    #[arg(long = "B", allow_hyphen_values = true)]
    b: f64,
    /// Sample grid min,max,n.
    #[arg(long, allow_hyphen_values = true)]
    grid: Grid,
    /// Branch formulas: derived or paper-literal.
    #[arg(long, default_value = "derived")]
    mode: Mode,
    /// Values of the candidate's free symbols, e.g. K=1,L=1,omega=6,eta=1.
    #[arg(long, allow_hyphen_values = true, default_value = "")]
    params: String,
}

enum Failure {
    Input(String),
    Method(String),
    NotVerified,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NoBalance(_) | Error::NoConvergence { .. } => Failure::Method(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Outcome {
    fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_equation(path: &Path) -> Result<EquationSpec, Failure> {
    EquationSpec::from_json(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_candidate(path: &Path) -> Result<CandidateSolution, Failure> {
    CandidateSolution::from_json(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn parse_params(text: &str) -> Result<Assignment, Failure> {
    let mut out = BTreeMap::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (name, value) = item
            .split_once('=')
            .ok_or_else(|| Failure::Input(format!("parameter `{item}` is not of the form name=value")))?;
        let value = match value.trim().parse::<f64>() {
            Ok(v) => v,
            Err(_) => parse_rational(value.trim())
                .map_err(|_| Failure::Input(format!("parameter `{name}` has no numeric value")))?
                .to_f64(),
        };
        out.insert(Symbol::new(name.trim()), value);
    }
    Ok(out)
}

struct Pipeline {
    reduced: ReducedODE,
    integrated: Option<ReducedODE>,
    balance: Result<BalanceDerivation, Error>,
}

impl Pipeline {
    fn new(eq: &EquationSpec) -> Self {
        let reduced = reduce_to_ode(eq);
        let integrated = integrate_once(&reduced).ok();
        let balance = homogeneous_balance(integrated.as_ref().unwrap_or(&reduced));
        Pipeline {
            reduced,
            integrated,
            balance,
        }
    }

    fn ode(&self) -> &ReducedODE {
        self.integrated.as_ref().unwrap_or(&self.reduced)
    }

    fn system(&self, m: Option<u32>, unknowns: &[String]) -> Result<AlgebraicSystem, Failure> {
        let m = match m {
            Some(0) => return Err(Failure::Input("ansatz order must be positive".into())),
            Some(m) => m,
            None => self.balance.clone()?.m,
        };
        let mut opts = SystemOptions::new(m);
        for u in unknowns {
            match u.as_str() {
                "K" => opts.k_unknown = true,
                "L" => opts.l_unknown = true,
                other => {
                    return Err(Failure::Input(format!(
                        "`{other}` cannot be made an unknown; use K or L"
                    )))
                }
            }
        }
        Ok(collect_system_with(self.ode(), &opts))
    }

    fn report(&self, eq: &EquationSpec, sys: &AlgebraicSystem, supplied_m: bool) -> String {
        let balance = if supplied_m { None } else { self.balance.as_ref().ok() };
        derivation_report(eq, &self.reduced, self.integrated.as_ref(), balance, sys)
    }
}

fn balance(equation: &Path) -> Outcome {
    let eq = load_equation(equation)?;
    let p = Pipeline::new(&eq);
    let mut s = String::new();
    let _ = writeln!(s, "equation: {eq}");
    let _ = writeln!(s, "reduced ode: {}", p.reduced);
    if let Some(i) = &p.integrated {
        let _ = writeln!(s, "integrated once: {i}");
    }
    let b = p.balance?;
    let _ = writeln!(s, "balance: {}", b.equation);
    let _ = writeln!(s, "m = {}", b.m);
    print!("{s}");
    Ok(())
}

fn system(equation: &Path, m: Option<u32>, unknowns: &[String]) -> Outcome {
    let eq = load_equation(equation)?;
    let p = Pipeline::new(&eq);
    let sys = p.system(m, unknowns)?;
    print!("{}", p.report(&eq, &sys, m.is_some()));
    Ok(())
}

fn verify(equation: &Path, candidate: &Path, mode: Mode, m: Option<u32>, out: Option<&Path>) -> Outcome {
    let eq = load_equation(equation)?;
    let cand = load_candidate(candidate)?;
    let p = Pipeline::new(&eq);
    let sys = p.system(m, &[])?;
    let report = verify_candidate(&sys, &cand)?;
    let text = format!("mode: {mode}\nm = {}\n{report}", sys.m);
    if let Some(out) = out {
        write(out, &text)?;
    }
    print!("{text}");
    if report.verified() {
        Ok(())
    } else {
        Err(Failure::NotVerified)
    }
}

fn solve(equation: &Path, params: &str, seed: u64, m: Option<u32>, unknowns: &[String]) -> Outcome {
    let eq = load_equation(equation)?;
    let params = parse_params(params)?;
    let p = Pipeline::new(&eq);
    let sys = p.system(m, unknowns)?;
    let sols = solve_numeric(&sys, &params, seed)?;
    let mut s = String::new();
    let names: Vec<String> = sys.unknowns.iter().map(|u| u.to_string()).collect();
    let _ = writeln!(s, "m = {}", sys.m);
    let _ = writeln!(s, "unknowns: {}", names.join(", "));
    let given: Vec<String> = params.iter().map(|(k, v)| format!("{k} = {v}")).collect();
    let _ = writeln!(s, "parameters: {}", given.join(", "));
    let _ = writeln!(s, "seed: {seed}");
    let _ = writeln!(s, "solutions: {}", sols.len());
    for (i, sol) in sols.iter().enumerate() {
        let _ = writeln!(s, "solution {} (max residual {:.5e})", i + 1, sol.residual_norm);
        for u in &sys.unknowns {
            let _ = writeln!(s, "  {u} = {:.16e}", sol.values[u]);
        }
    }
    print!("{s}");
    Ok(())
}

fn profile_setup(args: &ProfileArgs) -> Result<(Assignment, SolutionBranch), Failure> {
    let cand = load_candidate(&args.candidate)?;
    let mut params = parse_params(&args.params)?;
    for (name, v) in [(LAMBDA, args.lambda), (MU, args.mu)] {
        if let Some(prev) = params.insert(Symbol::new(name), v) {
            if prev != v {
                return Err(Failure::Input(format!(
                    "--params sets {name} = {prev} but --{name} is {v}"
                )));
            }
        }
    }
    let values = cand.instantiate(&params)?;
    let branch = SolutionBranch::new(args.branch, args.lambda, args.mu, args.a, args.b, args.mode)?;
    Ok((values, branch))
}

fn eval(args: &ProfileArgs, out: &Path) -> Outcome {
    let (values, branch) = profile_setup(args)?;
    let wave = WaveCoefficients::from_assignment(&values, ALPHA);
    let samples = sample_profile(&wave, &branch, &args.grid);
    write(out, &profile_csv(&samples))?;
    let poles = samples.iter().filter(|s| s.pole()).count();
    println!("{} rows, {} pole rows -> {}", samples.len(), poles, out.display());
    Ok(())
}

fn residual(equation: &Path, args: &ProfileArgs, tol: Option<f64>, out: Option<&Path>) -> Outcome {
    let eq = load_equation(equation)?;
    let (values, branch) = profile_setup(args)?;
    let p = Pipeline::new(&eq);
    let report = ode_residual(&values, ALPHA, &branch, p.ode(), &args.grid)?;
    let text = report.to_string();
    if let Some(out) = out {
        write(out, &text)?;
    }
    print!("{text}");
    match tol {
        Some(t) if report.max_abs_residual > t => Err(Failure::NotVerified),
        _ => Ok(()),
    }
}

fn fracderiv(alpha: f64, r: f64, s: f64, panels: usize) -> Outcome {
    if r.is_nan() || r <= 0.0 {
        return Err(Failure::Input(format!("exponent r = {r} must be positive")));
    }
    let cfg = QuadratureConfig::with_panels(panels);
    let numeric = jumarie_deriv(&|x: f64| x.powf(r), alpha, s, &cfg)?;
    let exact = power_rule_value(r, alpha, s);
    println!("alpha = {alpha}, r = {r}, s = {s}, panels = {panels}");
    println!("quadrature: {numeric:.16e}");
    println!("power rule: {exact:.16e}");
    println!("relative error: {:.5e}", ((numeric - exact) / exact).abs());
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Balance { equation } => balance(&equation),
        Command::System { equation, m, unknowns } => system(&equation, m, &unknowns),
        Command::Verify {
            equation,
            candidate,
            mode,
            m,
            out,
        } => verify(&equation, &candidate, mode, m, out.as_deref()),
        Command::Solve {
            equation,
            params,
            seed,
            m,
            unknowns,
        } => solve(&equation, &params, seed, m, &unknowns),
        Command::Eval { profile, out } => eval(&profile, &out),
        Command::Residual {
            equation,
            profile,
            tol,
            out,
        } => residual(&equation, &profile, tol, out.as_deref()),
        Command::Fracderiv { alpha, r, s, panels } => fracderiv(alpha, r, s, panels),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Method(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::NotVerified) => ExitCode::from(4),
    }
}
