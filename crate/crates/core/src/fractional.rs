//! Numerical checks: the modified Riemann-Liouville (Jumarie) derivative by
//! product integration, its power rule, the consistency of the fractional
//! complex transform, chain/product-rule probes and ODE/PDE residuals of
//! assembled wave profiles.

use std::fmt;

use crate::algebra::{Assignment, Symbol};
use crate::closed_form::{eval_u, pole_mask, xi_of, Grid, Mode, SolutionBranch, UJet, WaveCoefficients};
use crate::error::{Error, Result};
use crate::reduction::{DerivKind, EquationSpec, ReducedODE, K, L};
use crate::special::gamma;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub n_panels: usize,
    /// Outer finite-difference step relative to `s`.
    pub fd_step_rel: f64,
    /// Number of step sizes in the Richardson table (1 = plain central difference).
    pub refinement_levels: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            n_panels: 2048,
            fd_step_rel: 1e-4,
            refinement_levels: 2,
        }
    }
}

impl QuadratureConfig {
    pub fn with_panels(n_panels: usize) -> Self {
        QuadratureConfig {
            n_panels,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_panels < 16 {
            return Err(Error::Domain(format!("n_panels = {} < 16", self.n_panels)));
        }
        if !(self.fd_step_rel > 0.0 && self.fd_step_rel <= 1e-2) {
            return Err(Error::Domain(format!(
                "fd_step_rel = {} outside (0, 1e-2]",
                self.fd_step_rel
            )));
        }
        if self.refinement_levels == 0 {
            return Err(Error::Domain("refinement_levels must be positive".into()));
        }
        Ok(())
    }
}

/// Neumaier-compensated sum.
fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// `int_0^eps x (1-x)^(-alpha) dx`, accurate also for tiny `eps`.
fn first_moment_near_one(alpha: f64, eps: f64) -> f64 {
    if eps < 0.125 {
        // (1-x)^(-alpha) = sum_i (alpha)_i / i! x^i
        let mut coeff = 1.0;
        let mut pow = eps * eps;
        let mut acc = 0.0;
        for i in 0..60 {
            let term = coeff * pow / (i as f64 + 2.0);
            acc += term;
            if term.abs() < 1e-18 * acc.abs() {
                break;
            }
            coeff *= (alpha + i as f64) / (i as f64 + 1.0);
            pow *= eps;
        }
        acc
    } else {
        let l = (-eps).ln_1p();
        -((1.0 - alpha) * l).exp_m1() / (1.0 - alpha) + ((2.0 - alpha) * l).exp_m1() / (2.0 - alpha)
    }
}

/// Nodal weights of `int_0^1 (1 - y)^(-alpha) g(y) dy` with `g` replaced by
/// its piecewise-linear interpolant on `n` uniform panels; kernel moments are
/// exact on every panel. Scaling `y = x / sigma` gives the integral on
/// `[0, sigma]` as `sigma^(1-alpha) sum_j w_j g(sigma y_j)`.
fn product_weights(alpha: f64, n: usize) -> Vec<f64> {
    let h = 1.0 / n as f64;
    let mut w = vec![0.0; n + 1];
    for j in 0..n {
        // t = 1 - y runs over [lo, hi] on panel j.
        let hi = 1.0 - h * j as f64;
        let lo = if j + 1 == n { 0.0 } else { 1.0 - h * (j + 1) as f64 };
        let width = hi - lo;
        let eps = width / hi;
        // m0 = int t^-alpha dt, m1 = int t^-alpha (hi - t) dt over [lo, hi]
        let m0 = hi.powf(1.0 - alpha) * -((1.0 - alpha) * (-eps).ln_1p()).exp_m1() / (1.0 - alpha);
        let m1 = hi.powf(2.0 - alpha) * first_moment_near_one(alpha, eps);
        let w_right = m1 / width;
        w[j] += m0 - w_right;
        w[j + 1] += w_right;
    }
    w
}

fn check_order(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("order {alpha} outside (0, 1)")));
    }
    Ok(())
}

/// Modified Riemann-Liouville derivative of order `alpha` at `s`:
/// `1/Gamma(1-alpha) d/ds int_0^s (s-x)^(-alpha) (f(x) - f(0)) dx`.
///
/// The outer derivative is a central difference with Richardson
/// extrapolation; `f` is sampled on `[0, s(1 + fd_step_rel)]`.
pub fn jumarie_deriv(f: &dyn Fn(f64) -> f64, alpha: f64, s: f64, cfg: &QuadratureConfig) -> Result<f64> {
    check_order(alpha)?;
    if s.is_nan() || s <= 0.0 {
        return Err(Error::Domain(format!("evaluation point s = {s} must be positive")));
    }
    cfg.validate()?;
    let f0 = f(0.0);
    let n = cfg.n_panels;
    let weights = product_weights(alpha, n);
    let nodes: Vec<f64> = (0..=n).map(|j| j as f64 / n as f64).collect();
    // J(s+h) - J(s-h) node by node on the shared unit weights
    let difference = |h: f64| -> f64 {
        let (sp, sm) = (s + h, s - h);
        let cm = sm.powf(1.0 - alpha);
        // (s+h)^(1-alpha) - (s-h)^(1-alpha) without cancellation
        let dc = cm * ((1.0 - alpha) * (2.0 * h / sm).ln_1p()).exp_m1();
        compensated_sum(weights.iter().zip(&nodes).map(|(w, y)| {
            let (gp, gm) = (f(sp * y) - f0, f(sm * y) - f0);
            w * (cm * (gp - gm) + dc * gp)
        }))
    };

    let mut table: Vec<f64> = Vec::with_capacity(cfg.refinement_levels);
    let mut h = cfg.fd_step_rel * s;
    for _ in 0..cfg.refinement_levels {
        table.push(difference(h) / (2.0 * h));
        h /= 2.0;
    }
    // Richardson: error expansion in even powers of h.
    for level in 1..table.len() {
        let factor = 4f64.powi(level as i32);
        for k in (level..table.len()).rev() {
            table[k] = (factor * table[k] - table[k - 1]) / (factor - 1.0);
        }
    }
    Ok(table[table.len() - 1] / gamma(1.0 - alpha))
}

/// `Gamma(1+r)/Gamma(1+r-alpha) * s^(r-alpha)`.
pub fn power_rule_value(r: f64, alpha: f64, s: f64) -> f64 {
    gamma(1.0 + r) / gamma(1.0 + r - alpha) * s.powf(r - alpha)
}

/// Relative error of the quadrature derivative of `s^r` against the power rule.
pub fn power_rule_check(r: f64, alpha: f64, s: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let numeric = jumarie_deriv(&|x: f64| x.powf(r), alpha, s, cfg)?;
    let exact = power_rule_value(r, alpha, s);
    Ok(((numeric - exact) / exact).abs())
}

fn discrepancy(numeric: f64, expected: f64) -> f64 {
    if expected == 0.0 {
        numeric.abs()
    } else {
        ((numeric - expected) / expected).abs()
    }
}

/// Point at which [`transform_check`] differentiates (both `t` and `x`).
pub const TRANSFORM_CHECK_POINT: f64 = 1.0;

/// Errors of `D_t^alpha xi = L` and `D_x^beta xi = K` at `t = x = 1`;
/// relative, or absolute when the expected coefficient is zero.
pub fn transform_check(k: f64, l: f64, alpha: f64, beta: f64, cfg: &QuadratureConfig) -> Result<(f64, f64)> {
    check_order(alpha)?;
    check_order(beta)?;
    let p = TRANSFORM_CHECK_POINT;
    let in_t = |t: f64| xi_of(p, t, k, l, alpha, beta).expect("t >= 0");
    let in_x = |x: f64| xi_of(x, p, k, l, alpha, beta).expect("x >= 0");
    let dt = jumarie_deriv(&in_t, alpha, p, cfg)?;
    let dx = jumarie_deriv(&in_x, beta, p, cfg)?;
    Ok((discrepancy(dt, l), discrepancy(dx, k)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbePoint {
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub discrepancy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport {
    pub points: Vec<ProbePoint>,
}

impl ProbeReport {
    pub fn max_discrepancy(&self) -> f64 {
        self.points.iter().fold(0.0, |a, p| a.max(p.discrepancy))
    }
}

/// Compares `D_t^alpha [u(xi(x, t))]` with `u'(xi) * L` at fixed `x`.
/// With `alpha = 1` the left side is a classical central difference.
/// Nothing is asserted; the report carries the measured discrepancies.
#[allow(clippy::too_many_arguments)]
pub fn chain_rule_probe(
    u: &dyn Fn(f64) -> f64,
    du: &dyn Fn(f64) -> f64,
    k: f64,
    l: f64,
    alpha: f64,
    beta: f64,
    x: f64,
    times: &[f64],
    cfg: &QuadratureConfig,
) -> Result<ProbeReport> {
    let composed = |t: f64| -> f64 { u(xi_of(x, t.max(0.0), k, l, alpha, beta).expect("x >= 0")) };
    let points = times
        .iter()
        .map(|&t| {
            let lhs = if alpha == 1.0 {
                let h = cfg.fd_step_rel * t.max(1.0);
                (composed(t + h) - composed(t - h)) / (2.0 * h)
            } else {
                jumarie_deriv(&composed, alpha, t, cfg)?
            };
            let rhs = du(xi_of(x, t, k, l, alpha, beta)?) * l;
            Ok(ProbePoint {
                t,
                lhs,
                rhs,
                discrepancy: discrepancy(lhs, rhs),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ProbeReport { points })
}

/// Compares `D^alpha (s^r1 s^r2)` with `s^r1 D^alpha s^r2 + s^r2 D^alpha s^r1`.
pub fn product_rule_probe(r1: f64, r2: f64, alpha: f64, s: f64, cfg: &QuadratureConfig) -> Result<ProbePoint> {
    let lhs = jumarie_deriv(&|x: f64| x.powf(r1 + r2), alpha, s, cfg)?;
    let rhs = s.powf(r1) * power_rule_value(r2, alpha, s) + s.powf(r2) * power_rule_value(r1, alpha, s);
    Ok(ProbePoint {
        t: s,
        lhs,
        rhs,
        discrepancy: discrepancy(lhs, rhs),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub max_abs_residual: f64,
    /// Points that entered the maximum.
    pub points: Vec<f64>,
    pub excluded_poles: usize,
    pub mode: Mode,
    pub grid: String,
}

impl fmt::Display for ResidualReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "mode: {}", self.mode)?;
        writeln!(f, "grid: {}", self.grid)?;
        writeln!(f, "excluded poles: {}", self.excluded_poles)?;
        writeln!(f, "max residual: {:.5e}", self.max_abs_residual)
    }
}

fn power(u: f64, p: u32) -> f64 {
    u.powi(p as i32)
}

/// Residual of the (integer-order) reduced ODE along `xi`. Every symbol in
/// the ODE coefficients, including `C`, must be assigned in `values`.
pub fn ode_residual(
    values: &Assignment,
    prefix: &str,
    branch: &SolutionBranch,
    ode: &ReducedODE,
    grid: &Grid,
) -> Result<ResidualReport> {
    let coeffs: Vec<f64> = ode
        .terms
        .iter()
        .map(|t| t.coeff.eval_f64(values))
        .collect::<Result<_>>()?;
    let wave = WaveCoefficients::from_assignment(values, prefix);
    let xs = grid.points();
    let mask = pole_mask(&wave, branch, &xs);
    let mut points = Vec::new();
    let mut excluded = 0;
    let mut max = 0.0f64;
    for (&xi, pole) in xs.iter().zip(mask) {
        let jet = match (pole, eval_u(&wave, branch, xi)) {
            (false, Ok(j)) => j,
            _ => {
                excluded += 1;
                continue;
            }
        };
        let r: f64 = ode
            .terms
            .iter()
            .zip(&coeffs)
            .map(|(t, c)| {
                let d = if t.order == 0 { 1.0 } else { jet.derivative(t.order) };
                c * power(jet.u, t.u_power) * d
            })
            .sum();
        max = max.max(r.abs());
        points.push(xi);
    }
    Ok(ResidualReport {
        max_abs_residual: max,
        points,
        excluded_poles: excluded,
        mode: branch.mode,
        grid: format!("xi in [{}, {}], {} points", grid.min, grid.max, grid.n),
    })
}

fn pde_term_value(jet: &UJet, deriv: DerivKind, mult: u32, k: f64, l: f64) -> f64 {
    match (deriv, mult) {
        (_, 0) => 1.0,
        (DerivKind::Time, _) => l * jet.du,
        (DerivKind::Space, q) => k.powi(q as i32) * jet.derivative(q),
    }
}

/// Residual of the PDE itself at integer order (`alpha = beta = 1`), using
/// `d/dt = L d/dxi`, `d/dx = K d/dxi` on `xi = K x + L t`.
pub fn classical_pde_residual(
    values: &Assignment,
    prefix: &str,
    branch: &SolutionBranch,
    eq: &EquationSpec,
    x_grid: &Grid,
    t_grid: &Grid,
) -> Result<ResidualReport> {
    if !(eq.alpha.is_one() && eq.beta.is_one()) {
        return Err(Error::Domain("classical residual needs alpha = beta = 1".into()));
    }
    let get = |name: &str| {
        values
            .get(&Symbol::new(name))
            .copied()
            .ok_or_else(|| Error::MissingAssignment(name.into()))
    };
    let (k, l) = (get(K)?, get(L)?);
    let coeffs: Vec<f64> = eq
        .terms
        .iter()
        .map(|t| t.coeff.eval_f64(values))
        .collect::<Result<_>>()?;
    let wave = WaveCoefficients::from_assignment(values, prefix);
    let mut points = Vec::new();
    let mut excluded = 0;
    let mut max = 0.0f64;
    for t in t_grid.points() {
        // xi is monotone along a row of fixed t.
        let xis: Vec<f64> = x_grid.points().iter().map(|&x| k * x + l * t).collect();
        let mut order: Vec<usize> = (0..xis.len()).collect();
        order.sort_by(|&a, &b| xis[a].total_cmp(&xis[b]));
        let sorted: Vec<f64> = order.iter().map(|&i| xis[i]).collect();
        let mask = pole_mask(&wave, branch, &sorted);
        for (&xi, pole) in sorted.iter().zip(mask) {
            let jet = match (pole, eval_u(&wave, branch, xi)) {
                (false, Ok(j)) => j,
                _ => {
                    excluded += 1;
                    continue;
                }
            };
            let r: f64 = eq
                .terms
                .iter()
                .zip(&coeffs)
                .map(|(term, c)| c * power(jet.u, term.u_power) * pde_term_value(&jet, term.deriv, term.mult, k, l))
                .sum();
            max = max.max(r.abs());
            points.push(xi);
        }
    }
    Ok(ResidualReport {
        max_abs_residual: max,
        points,
        excluded_poles: excluded,
        mode: branch.mode,
        grid: format!(
            "x in [{}, {}] x {} points, t in [{}, {}] x {} points",
            x_grid.min, x_grid.max, x_grid.n, t_grid.min, t_grid.max, t_grid.n
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_function_has_zero_derivative() {
        let cfg = QuadratureConfig::default();
        for alpha in [0.2, 0.5, 0.9] {
            assert_eq!(jumarie_deriv(&|_| 3.5, alpha, 1.3, &cfg).unwrap(), 0.0);
        }
    }

    #[test]
    fn linear_and_quadratic_values() {
        let cfg = QuadratureConfig::default();
        let v = jumarie_deriv(&|x| x, 0.5, 1.0, &cfg).unwrap();
        assert!((v - std::f64::consts::FRAC_2_SQRT_PI).abs() < 1e-8);
        let v = jumarie_deriv(&|x| x * x, 0.5, 1.0, &cfg).unwrap();
        assert!((v - 8.0 / (3.0 * std::f64::consts::PI.sqrt())).abs() < 1e-6);
        assert!((v - 1.504_505_6).abs() < 1e-6);
    }

    #[test]
    fn domain_errors() {
        let cfg = QuadratureConfig::default();
        assert!(jumarie_deriv(&|x| x, 1.0, 1.0, &cfg).is_err());
        assert!(jumarie_deriv(&|x| x, 0.0, 1.0, &cfg).is_err());
        assert!(jumarie_deriv(&|x| x, 0.5, 0.0, &cfg).is_err());
        assert!(jumarie_deriv(&|x| x, 0.5, 1.0, &QuadratureConfig::with_panels(8)).is_err());
        let bad = QuadratureConfig {
            fd_step_rel: 0.1,
            ..Default::default()
        };
        assert!(jumarie_deriv(&|x| x, 0.5, 1.0, &bad).is_err());
    }

    #[test]
    fn small_moment_series_matches_closed_form() {
        for alpha in [0.25, 0.5, 0.75] {
            let eps: f64 = 0.125;
            let l = (-eps).ln_1p();
            let closed = -((1.0 - alpha) * l).exp_m1() / (1.0 - alpha) + ((2.0 - alpha) * l).exp_m1() / (2.0 - alpha);
            let series = first_moment_near_one(alpha, eps * (1.0 - 1e-15));
            assert!(((closed - series) / closed).abs() < 1e-12);
        }
    }

    #[test]
    fn power_rule_examples() {
        let cfg = QuadratureConfig::default();
        assert!(power_rule_check(1.0, 0.5, 1.0, &cfg).unwrap() <= 1e-4);
        assert!(power_rule_check(2.0, 0.25, 2.0, &cfg).unwrap() <= 1e-4);
        // r = alpha: the derivative is the constant Gamma(1 + alpha).
        assert!(power_rule_check(0.5, 0.5, 1.7, &cfg).unwrap() <= 1e-4);
    }

    #[test]
    fn transform_examples() {
        let cfg = QuadratureConfig::default();
        let (et, _) = transform_check(1.0, 2.0, 0.5, 0.5, &cfg).unwrap();
        assert!(et <= 1e-4);
        let (_, ex) = transform_check(0.0, 1.0, 0.5, 0.5, &cfg).unwrap();
        assert!(ex <= 1e-12, "absolute error against K = 0: {ex}");
        let (et, ex) = transform_check(1.0, 1.0, 0.4, 0.4, &cfg).unwrap();
        assert!((et - ex).abs() < 1e-15);
    }

    #[test]
    fn chain_rule_linear_profile() {
        let cfg = QuadratureConfig::default();
        let rep = chain_rule_probe(
            &|xi| 3.0 * xi - 1.0,
            &|_| 3.0,
            1.0,
            2.0,
            0.5,
            0.5,
            0.7,
            &[0.5, 1.0, 2.0],
            &cfg,
        )
        .unwrap();
        assert!(rep.max_discrepancy() <= 1e-4, "{rep:?}");
    }

    #[test]
    fn chain_rule_integer_order() {
        let cfg = QuadratureConfig::default();
        let rep = chain_rule_probe(
            &|xi: f64| xi.tanh(),
            &|xi: f64| 1.0 - xi.tanh().powi(2),
            1.5,
            -0.8,
            1.0,
            1.0,
            0.3,
            &[0.5, 1.0, 2.0, 3.0],
            &cfg,
        )
        .unwrap();
        assert!(rep.max_discrepancy() <= 1e-6, "{rep:?}");
    }
}
