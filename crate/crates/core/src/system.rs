//! Collection of the algebraic conditions on the ansatz coefficients and
//! exact verification of candidate coefficient sets.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::algebra::{parse_poly, MultiPoly, RationalFunction, Symbol};
use crate::ansatz::{ansatz_symbols, build_ansatz, PhiSeries, ALPHA, LAMBDA, MU};
use crate::error::{Error, Result};
use crate::reduction::{BalanceDerivation, EquationSpec, ReducedODE, K, L};

/// Which symbols are solved for, and the name of the ansatz coefficients.
#[derive(Debug, Clone)]
pub struct SystemOptions {
    pub m: u32,
    pub prefix: String,
    pub k_unknown: bool,
    pub l_unknown: bool,
}

impl SystemOptions {
    pub fn new(m: u32) -> Self {
        SystemOptions {
            m,
            prefix: ALPHA.to_string(),
            k_unknown: false,
            l_unknown: false,
        }
    }
}

/// Coefficient of `phi^phi_power` (power before clearing negative powers).
#[derive(Debug, Clone)]
pub struct SystemEquation {
    pub phi_power: i32,
    pub poly: MultiPoly,
}

#[derive(Debug, Clone)]
pub struct AlgebraicSystem {
    /// Decreasing `phi_power`.
    pub equations: Vec<SystemEquation>,
    pub unknowns: Vec<Symbol>,
    pub parameters: Vec<Symbol>,
    pub m: u32,
    pub prefix: String,
    /// The substituted expression was multiplied by `phi^clearing_shift`.
    pub clearing_shift: i32,
}

/// Substitutes `u` into the ODE, expanded as a series in `phi`.
pub fn substitute_series(ode: &ReducedODE, u: &PhiSeries) -> PhiSeries {
    let mut powers: Vec<PhiSeries> = vec![PhiSeries::constant(RationalFunction::one())];
    let mut derivs: Vec<PhiSeries> = vec![u.clone()];
    let mut total = PhiSeries::zero();
    for t in &ode.terms {
        while powers.len() <= t.u_power as usize {
            let next = powers.last().expect("non-empty").mul(u);
            powers.push(next);
        }
        while derivs.len() <= t.order as usize {
            let next = derivs.last().expect("non-empty").phi_diff();
            derivs.push(next);
        }
        let mut s = powers[t.u_power as usize].clone();
        if t.order > 0 {
            s = s.mul(&derivs[t.order as usize]);
        }
        total = total.add(&s.scale(&t.coeff));
    }
    total
}

pub fn collect_system(ode: &ReducedODE, m: u32) -> AlgebraicSystem {
    collect_system_with(ode, &SystemOptions::new(m))
}

/// Substitutes the order-`m` ansatz and equates every `phi`-power
/// coefficient to zero.
pub fn collect_system_with(ode: &ReducedODE, opts: &SystemOptions) -> AlgebraicSystem {
    let series = substitute_series(ode, &build_ansatz(opts.m, &opts.prefix));

    let nominal = (2 * opts.m + ode.max_order()) as i32;
    let needed = -series.min_exponent().unwrap_or(0);
    let clearing_shift = nominal.max(needed);

    let equations = series
        .iter()
        .rev()
        .map(|(e, c)| SystemEquation {
            phi_power: e,
            poly: c.num().clone(),
        })
        .collect::<Vec<_>>();

    let mut unknowns = Vec::new();
    if ode.integration_constant_present {
        unknowns.push(Symbol::new(crate::reduction::C));
    }
    unknowns.extend(ansatz_symbols(opts.m, &opts.prefix));
    if opts.k_unknown {
        unknowns.push(Symbol::new(K));
    }
    if opts.l_unknown {
        unknowns.push(Symbol::new(L));
    }
    let mut params: BTreeSet<Symbol> = ode.symbols();
    params.extend([LAMBDA, MU, K, L].map(Symbol::new));
    for eq in &equations {
        params.extend(eq.poly.symbols());
    }
    for u in &unknowns {
        params.remove(u);
    }

    AlgebraicSystem {
        equations,
        unknowns,
        parameters: params.into_iter().collect(),
        m: opts.m,
        prefix: opts.prefix.clone(),
        clearing_shift,
    }
}

impl AlgebraicSystem {
    /// Substitutes values for some parameters, dropping equations that
    /// become identically zero.
    pub fn specialize(&self, bindings: &BTreeMap<Symbol, RationalFunction>) -> Result<AlgebraicSystem> {
        let mut equations = Vec::new();
        for eq in &self.equations {
            let r = eq.poly.subst(bindings)?;
            if !r.is_zero() {
                equations.push(SystemEquation {
                    phi_power: eq.phi_power,
                    poly: r.num().clone(),
                });
            }
        }
        Ok(AlgebraicSystem {
            equations,
            parameters: self
                .parameters
                .iter()
                .filter(|p| !bindings.contains_key(*p))
                .cloned()
                .collect(),
            ..self.clone()
        })
    }

    /// `sum_k E_k(point) * phi^k`: the substituted ODE rebuilt from the
    /// collected coefficients.
    pub fn eval_at_phi(&self, point: &crate::algebra::Assignment, phi: f64) -> Result<f64> {
        self.equations
            .iter()
            .map(|eq| Ok(eq.poly.eval_f64(point)? * phi.powi(eq.phi_power)))
            .sum()
    }

    /// Equations as printed in reports, one per line.
    pub fn equations_text(&self) -> String {
        let mut s = String::new();
        for eq in &self.equations {
            writeln!(s, "phi^{}: {} = 0", eq.phi_power, eq.poly).expect("string write");
        }
        s
    }
}

#[derive(Serialize, Deserialize)]
struct RawRatFunc {
    num: String,
    #[serde(default = "unit")]
    den: String,
}

fn unit() -> String {
    "1".into()
}

#[derive(Serialize, Deserialize)]
struct RawCandidate {
    provenance: String,
    bindings: BTreeMap<String, RawRatFunc>,
}

/// Exact assignment of values to (at least) the unknowns of a system.
/// Parameters may be bound as well, which restricts them.
#[derive(Debug, Clone)]
pub struct CandidateSolution {
    pub bindings: BTreeMap<Symbol, RationalFunction>,
    pub provenance: String,
}

impl CandidateSolution {
    pub fn new(provenance: &str, bindings: BTreeMap<Symbol, RationalFunction>) -> Result<Self> {
        if bindings.values().any(|b| b.den().is_zero()) {
            return Err(Error::ZeroDenominator);
        }
        Ok(CandidateSolution {
            bindings,
            provenance: provenance.to_string(),
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawCandidate = serde_json::from_str(text)?;
        let mut bindings = BTreeMap::new();
        for (name, rf) in raw.bindings {
            let num = parse_poly(&rf.num)?;
            let den = parse_poly(&rf.den)?;
            bindings.insert(Symbol::new(&name), RationalFunction::new(num, den)?);
        }
        CandidateSolution::new(&raw.provenance, bindings)
    }

    pub fn to_json(&self) -> String {
        let raw = RawCandidate {
            provenance: self.provenance.clone(),
            bindings: self
                .bindings
                .iter()
                .map(|(s, b)| {
                    (
                        s.name().to_string(),
                        RawRatFunc {
                            num: b.num().to_string(),
                            den: b.den().to_string(),
                        },
                    )
                })
                .collect(),
        };
        serde_json::to_string_pretty(&raw).expect("serializable")
    }

    pub fn check_binds(&self, sys: &AlgebraicSystem) -> Result<()> {
        let missing: Vec<_> = sys
            .unknowns
            .iter()
            .filter(|u| !self.bindings.contains_key(*u))
            .map(|u| u.to_string())
            .collect();
        if missing.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidCandidate(format!(
                "no binding for {}",
                missing.join(", ")
            )))
        }
    }

    /// Numeric values of all bindings plus the given parameters.
    pub fn instantiate(&self, params: &crate::algebra::Assignment) -> Result<crate::algebra::Assignment> {
        let mut out = params.clone();
        for (s, b) in &self.bindings {
            let v = b.eval_f64(params)?;
            if let Some(given) = params.get(s) {
                if (given - v).abs() > 1e-12 * (1.0 + v.abs()) {
                    return Err(Error::InvalidCandidate(format!(
                        "candidate fixes {s} = {v} but {given} was supplied"
                    )));
                }
            }
            out.insert(s.clone(), v);
        }
        Ok(out)
    }
}

#[derive(Debug, Clone)]
pub struct EquationResidual {
    pub phi_power: i32,
    pub residual: RationalFunction,
}

impl EquationResidual {
    pub fn is_zero(&self) -> bool {
        self.residual.is_zero()
    }
}

#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub provenance: String,
    pub rows: Vec<EquationResidual>,
}

impl VerificationReport {
    pub fn verified(&self) -> bool {
        self.rows.iter().all(EquationResidual::is_zero)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "candidate: {}", self.provenance)?;
        for r in &self.rows {
            let verdict = if r.is_zero() { "zero" } else { "NONZERO" };
            writeln!(f, "phi^{} | {} | {}", r.phi_power, r.residual, verdict)?;
        }
        writeln!(
            f,
            "verdict: {}",
            if self.verified() { "verified" } else { "not verified" }
        )
    }
}

/// Substitutes the candidate into every equation.
pub fn verify_candidate(sys: &AlgebraicSystem, cand: &CandidateSolution) -> Result<VerificationReport> {
    cand.check_binds(sys)?;
    let rows = sys
        .equations
        .iter()
        .map(|eq| {
            Ok(EquationResidual {
                phi_power: eq.phi_power,
                residual: eq.poly.subst(&cand.bindings)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(VerificationReport {
        provenance: cand.provenance.clone(),
        rows,
    })
}

/// Plain-text record of the whole derivation.
pub fn derivation_report(
    eq: &EquationSpec,
    reduced: &ReducedODE,
    integrated: Option<&ReducedODE>,
    balance: Option<&BalanceDerivation>,
    sys: &AlgebraicSystem,
) -> String {
    let mut s = String::new();
    let w = &mut s;
    let _ = writeln!(w, "equation: {eq}");
    let _ = writeln!(w, "transform: xi = K*x^beta/Gamma(beta+1) + L*t^alpha/Gamma(alpha+1)");
    let _ = writeln!(w, "reduced ode: {reduced}");
    match integrated {
        Some(i) => {
            let _ = writeln!(w, "integrated once: {i}");
        }
        None => {
            let _ = writeln!(w, "integrated once: no");
        }
    }
    match balance {
        Some(b) => {
            let _ = writeln!(w, "balance: {}", b.equation);
            let _ = writeln!(
                w,
                "degree rule: deg(u^p*(u^(q))^s) = m*p + s*(q+m); the variant m*q + s*(q+m) is not used"
            );
        }
        None => {
            let _ = writeln!(w, "balance: m = {} (supplied)", sys.m);
        }
    }
    let _ = writeln!(w, "ansatz: {}", build_ansatz(sys.m, &sys.prefix));
    let names = |v: &[Symbol]| v.iter().map(Symbol::to_string).collect::<Vec<_>>().join(", ");
    let _ = writeln!(w, "unknowns: {}", names(&sys.unknowns));
    let _ = writeln!(w, "parameters: {}", names(&sys.parameters));
    let _ = writeln!(
        w,
        "negative powers cleared by phi^{}; equations labelled by the power before clearing",
        sys.clearing_shift
    );
    let _ = writeln!(w, "equations: {}", sys.equations.len());
    s.push_str(&sys.equations_text());
    s
}
