//! Closed-form solutions of `G'' + lambda*G' + mu*G = 0` expressed through
//! `phi = G'/G`, and the travelling-wave profiles built on them.
//!
//! Two evaluation modes exist. `Derived` is the exact solution of the
//! auxiliary equation. `PaperLiteral` reproduces the published profile
//! formulas as printed: no `-lambda/2` offset, a `sqrt(|D|)` prefactor and
//! the ratio `(A cosh + B sinh)/(A sinh + B cosh)` (hyperbolic),
//! `(-A sin + B cos)/(A cos + B sin)` (trigonometric) or `B xi/(A + B xi)`
//! (rational).

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::algebra::Assignment;
use crate::error::{Error, Result};
use crate::special::gamma;

/// Denominators smaller than this are treated as poles.
pub const POLE_TOL: f64 = 1e-9;
/// `|lambda^2 - 4 mu|` below this selects the rational branch.
pub const DISCRIMINANT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchKind {
    Hyperbolic,
    Trigonometric,
    Rational,
}

impl FromStr for BranchKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hyperbolic" => Ok(BranchKind::Hyperbolic),
            "trig" | "trigonometric" => Ok(BranchKind::Trigonometric),
            "rational" => Ok(BranchKind::Rational),
            _ => Err(Error::InvalidBranch(format!("unknown branch `{s}`"))),
        }
    }
}

impl fmt::Display for BranchKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BranchKind::Hyperbolic => "hyperbolic",
            BranchKind::Trigonometric => "trigonometric",
            BranchKind::Rational => "rational",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Derived,
    PaperLiteral,
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "derived" => Ok(Mode::Derived),
            "paper-literal" => Ok(Mode::PaperLiteral),
            _ => Err(Error::InvalidBranch(format!("unknown mode `{s}`"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Derived => "derived",
            Mode::PaperLiteral => "paper-literal",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolutionBranch {
    pub kind: BranchKind,
    pub lambda: f64,
    pub mu: f64,
    pub a: f64,
    pub b: f64,
    pub mode: Mode,
}

fn kind_for(delta: f64) -> BranchKind {
    if delta.abs() <= DISCRIMINANT_TOL {
        BranchKind::Rational
    } else if delta > 0.0 {
        BranchKind::Hyperbolic
    } else {
        BranchKind::Trigonometric
    }
}

impl SolutionBranch {
    pub fn new(kind: BranchKind, lambda: f64, mu: f64, a: f64, b: f64, mode: Mode) -> Result<Self> {
        let delta = lambda * lambda - 4.0 * mu;
        if kind_for(delta) != kind {
            return Err(Error::InvalidBranch(format!(
                "lambda^2 - 4 mu = {delta} does not select the {kind} branch"
            )));
        }
        if a == 0.0 && b == 0.0 {
            return Err(Error::InvalidBranch("A and B are both zero".into()));
        }
        Ok(SolutionBranch {
            kind,
            lambda,
            mu,
            a,
            b,
            mode,
        })
    }

    /// Picks the branch from the sign of the discriminant.
    pub fn classify(lambda: f64, mu: f64, a: f64, b: f64, mode: Mode) -> Result<Self> {
        Self::new(kind_for(lambda * lambda - 4.0 * mu), lambda, mu, a, b, mode)
    }

    pub fn discriminant(&self) -> f64 {
        self.lambda * self.lambda - 4.0 * self.mu
    }

    fn half_root(&self) -> f64 {
        self.discriminant().abs().sqrt() / 2.0
    }

    /// The expression whose zeros are the poles of `phi`.
    pub fn denominator(&self, xi: f64) -> f64 {
        let (a, b) = (self.a, self.b);
        let s = self.half_root();
        match (self.kind, self.mode) {
            (BranchKind::Hyperbolic, Mode::Derived) => a * (s * xi).cosh() + b * (s * xi).sinh(),
            (BranchKind::Hyperbolic, Mode::PaperLiteral) => a * (s * xi).sinh() + b * (s * xi).cosh(),
            (BranchKind::Trigonometric, _) => a * (s * xi).cos() + b * (s * xi).sin(),
            (BranchKind::Rational, _) => a + b * xi,
        }
    }
}

/// `phi` and its first three `xi`-derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiJet {
    pub phi: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

pub fn phi_value(b: &SolutionBranch, xi: f64) -> Result<PhiJet> {
    let den = b.denominator(xi);
    if den.abs() < POLE_TOL {
        return Err(Error::Pole { xi });
    }
    let s = b.half_root();
    let (ba, bb) = (b.a, b.b);
    match b.mode {
        Mode::Derived => {
            let (phi, d1) = match b.kind {
                BranchKind::Hyperbolic => {
                    let r = (ba * (s * xi).sinh() + bb * (s * xi).cosh()) / den;
                    (-b.lambda / 2.0 + s * r, s * s * (1.0 - r * r))
                }
                BranchKind::Trigonometric => {
                    let r = (-ba * (s * xi).sin() + bb * (s * xi).cos()) / den;
                    (-b.lambda / 2.0 + s * r, -s * s * (1.0 + r * r))
                }
                BranchKind::Rational => {
                    let r = bb / den;
                    (-b.lambda / 2.0 + r, -r * r)
                }
            };
            // Riccati identity differentiated once and twice.
            let d2 = -(2.0 * phi + b.lambda) * d1;
            let d3 = -(2.0 * d1 * d1 + (2.0 * phi + b.lambda) * d2);
            Ok(PhiJet { phi, d1, d2, d3 })
        }
        Mode::PaperLiteral => {
            let (r, r1, r2, r3, scale) = match b.kind {
                BranchKind::Hyperbolic | BranchKind::Trigonometric => {
                    let hyperbolic = b.kind == BranchKind::Hyperbolic;
                    let r = if hyperbolic {
                        (ba * (s * xi).cosh() + bb * (s * xi).sinh()) / den
                    } else {
                        (-ba * (s * xi).sin() + bb * (s * xi).cos()) / den
                    };
                    let r1 = if hyperbolic {
                        s * (1.0 - r * r)
                    } else {
                        -s * (1.0 + r * r)
                    };
                    let r2 = -2.0 * s * r * r1;
                    let r3 = -2.0 * s * (r1 * r1 + r * r2);
                    (r, r1, r2, r3, 2.0 * s)
                }
                BranchKind::Rational => {
                    let r = bb * xi / den;
                    let r1 = ba * bb / den.powi(2);
                    let r2 = -2.0 * ba * bb * bb / den.powi(3);
                    let r3 = 6.0 * ba * bb.powi(3) / den.powi(4);
                    (r, r1, r2, r3, 1.0)
                }
            };
            Ok(PhiJet {
                phi: scale * r,
                d1: scale * r1,
                d2: scale * r2,
                d3: scale * r3,
            })
        }
    }
}

/// `u = sum_i alpha_i * phi^i` with numeric coefficients.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct WaveCoefficients {
    pub alphas: BTreeMap<i32, f64>,
}

impl WaveCoefficients {
    pub fn new(alphas: impl IntoIterator<Item = (i32, f64)>) -> Self {
        WaveCoefficients {
            alphas: alphas.into_iter().collect(),
        }
    }

    /// Picks the `<prefix>_<i>` entries out of an assignment.
    pub fn from_assignment(values: &Assignment, prefix: &str) -> Self {
        WaveCoefficients {
            alphas: values
                .iter()
                .filter_map(|(s, v)| s.index_for(prefix).map(|i| (i, *v)))
                .collect(),
        }
    }

    pub fn has_negative_powers(&self) -> bool {
        self.alphas.iter().any(|(i, a)| *i < 0 && *a != 0.0)
    }

    /// `u` and its derivatives from a `phi` jet (chain rule).
    pub fn jet(&self, p: &PhiJet) -> UJet {
        let mut out = UJet::default();
        for (&i, &a) in &self.alphas {
            if a == 0.0 {
                continue;
            }
            let fi = i as f64;
            let f0 = p.phi.powi(i);
            let f1 = fi * p.phi.powi(i - 1);
            let f2 = fi * (fi - 1.0) * p.phi.powi(i - 2);
            let f3 = fi * (fi - 1.0) * (fi - 2.0) * p.phi.powi(i - 3);
            out.u += a * f0;
            out.du += a * f1 * p.d1;
            out.d2u += a * (f2 * p.d1 * p.d1 + f1 * p.d2);
            out.d3u += a * (f3 * p.d1.powi(3) + 3.0 * f2 * p.d1 * p.d2 + f1 * p.d3);
        }
        out
    }
}

/// `u` and its first three `xi`-derivatives.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct UJet {
    pub u: f64,
    pub du: f64,
    pub d2u: f64,
    pub d3u: f64,
}

impl UJet {
    pub fn derivative(&self, q: u32) -> f64 {
        match q {
            0 => self.u,
            1 => self.du,
            2 => self.d2u,
            3 => self.d3u,
            _ => panic!("derivatives above third order are not tracked"),
        }
    }
}

pub fn eval_u(c: &WaveCoefficients, b: &SolutionBranch, xi: f64) -> Result<UJet> {
    let p = phi_value(b, xi)?;
    if c.has_negative_powers() && p.phi.abs() < POLE_TOL {
        return Err(Error::PhiZero { xi });
    }
    Ok(c.jet(&p))
}

/// Uniform grid `min..=max` with `n` points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl Grid {
    pub fn new(min: f64, max: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain("a grid needs at least 2 points".into()));
        }
        if !(min.is_finite() && max.is_finite()) || min >= max {
            return Err(Error::Domain(format!("bad grid range {min}..{max}")));
        }
        Ok(Grid { min, max, n })
    }

    pub fn points(&self) -> Vec<f64> {
        let h = (self.max - self.min) / (self.n - 1) as f64;
        (0..self.n)
            .map(|i| {
                if i + 1 == self.n {
                    self.max
                } else {
                    self.min + h * i as f64
                }
            })
            .collect()
    }
}

impl FromStr for Grid {
    type Err = Error;
    /// `min,max,n`
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let bad = || Error::Domain(format!("grid must be `min,max,n`, got `{s}`"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let min: f64 = parts[0].parse().map_err(|_| bad())?;
        let max: f64 = parts[1].parse().map_err(|_| bad())?;
        let n: usize = parts[2].parse().map_err(|_| bad())?;
        Grid::new(min, max, n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveSample {
    pub xi: f64,
    /// `None` at poles.
    pub u: Option<f64>,
}

impl WaveSample {
    pub fn pole(&self) -> bool {
        self.u.is_none()
    }
}

/// Marks samples where `vals` vanish or change sign between neighbours
/// (the endpoint nearer the crossing is marked). `None` entries are
/// ignored.
fn mark_crossings(vals: &[Option<f64>], marked: &mut [bool]) {
    for (i, v) in vals.iter().enumerate() {
        if matches!(v, Some(v) if v.abs() < POLE_TOL) {
            marked[i] = true;
        }
    }
    for i in 0..vals.len().saturating_sub(1) {
        if let (Some(p), Some(q)) = (vals[i], vals[i + 1]) {
            if p * q < 0.0 && !marked[i] && !marked[i + 1] {
                let k = if p.abs() <= q.abs() { i } else { i + 1 };
                marked[k] = true;
            }
        }
    }
}

/// Which of the (ordered) points `xs` count as poles: the branch
/// denominator (or `phi`, if negative powers are present) vanishes there or
/// changes sign across a neighbouring interval.
pub fn pole_mask(c: &WaveCoefficients, b: &SolutionBranch, xs: &[f64]) -> Vec<bool> {
    let mut marked = vec![false; xs.len()];
    let dens: Vec<Option<f64>> = xs.iter().map(|&x| Some(b.denominator(x))).collect();
    mark_crossings(&dens, &mut marked);
    if !c.has_negative_powers() {
        return marked;
    }
    let phis: Vec<Option<f64>> = xs
        .iter()
        .zip(&marked)
        .map(|(&x, &m)| if m { None } else { phi_value(b, x).ok().map(|j| j.phi) })
        .collect();
    let mut phi_marked = marked.clone();
    mark_crossings(&phis, &mut phi_marked);
    // A sign flip of phi straddling a denominator sign flip is a jump
    // through infinity, not a zero.
    for i in 0..xs.len() {
        if phi_marked[i] && !marked[i] {
            let straddles = [i.wrapping_sub(1), i + 1]
                .iter()
                .any(|&j| j < xs.len() && matches!((dens[i], dens[j]), (Some(p), Some(q)) if p * q < 0.0));
            if !straddles || phis[i].is_some_and(|v| v.abs() < POLE_TOL) {
                marked[i] = true;
            }
        }
    }
    marked
}

/// Samples `u` on the grid; poles per [`pole_mask`] carry no value.
pub fn sample_profile(c: &WaveCoefficients, b: &SolutionBranch, grid: &Grid) -> Vec<WaveSample> {
    let xs = grid.points();
    let mask = pole_mask(c, b, &xs);
    xs.iter()
        .zip(mask)
        .map(|(&xi, pole)| {
            let u = if pole {
                None
            } else {
                eval_u(c, b, xi).ok().map(|j| j.u).filter(|v| v.is_finite())
            };
            WaveSample { xi, u }
        })
        .collect()
}

/// `K x^beta / Gamma(beta+1) + L t^alpha / Gamma(alpha+1)`.
pub fn xi_of(x: f64, t: f64, k: f64, l: f64, alpha: f64, beta: f64) -> Result<f64> {
    if x < 0.0 || t < 0.0 {
        return Err(Error::Domain(format!(
            "fractional powers need x, t >= 0 (got x = {x}, t = {t})"
        )));
    }
    Ok(k * x.powf(beta) / gamma(beta + 1.0) + l * t.powf(alpha) / gamma(alpha + 1.0))
}

/// Plain decimal with `sig` significant digits (no exponent).
pub fn format_decimal(x: f64, sig: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", sig - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if exp < 0 {
        out.push_str("0.");
        out.push_str(&"0".repeat((-exp - 1) as usize));
        out.push_str(&digits);
    } else if (exp as usize) + 1 >= digits.len() {
        out.push_str(&digits);
        out.push_str(&"0".repeat(exp as usize + 1 - digits.len()));
    } else {
        let (int, frac) = digits.split_at(exp as usize + 1);
        out.push_str(int);
        out.push('.');
        out.push_str(frac);
    }
    out
}

/// `xi,u,pole` CSV with LF line endings; pole rows leave `u` empty.
pub fn profile_csv(samples: &[WaveSample]) -> String {
    let mut s = String::from("xi,u,pole\n");
    for p in samples {
        match p.u {
            Some(u) => writeln!(s, "{},{},false", format_decimal(p.xi, 17), format_decimal(u, 17)),
            None => writeln!(s, "{},,true", format_decimal(p.xi, 17)),
        }
        .expect("string write");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn branch(kind: BranchKind, lambda: f64, mu: f64, a: f64, b: f64) -> SolutionBranch {
        SolutionBranch::new(kind, lambda, mu, a, b, Mode::Derived).unwrap()
    }

    #[test]
    fn rational_branch_value() {
        let b = branch(BranchKind::Rational, 0.0, 0.0, 1.0, 1.0);
        let p = phi_value(&b, 0.0).unwrap();
        assert_eq!(p.phi, 1.0);
        assert_eq!(p.d1, -1.0);
    }

    #[test]
    fn hyperbolic_branch_at_origin() {
        // B = 0 gives the tanh form, A = 0 the coth form with a pole at 0.
        let b = branch(BranchKind::Hyperbolic, 3.0, 1.0, 1.0, 0.0);
        assert_eq!(phi_value(&b, 0.0).unwrap().phi, -1.5);
        let b = branch(BranchKind::Hyperbolic, 3.0, 1.0, 0.0, 1.0);
        assert_eq!(phi_value(&b, 0.0), Err(Error::Pole { xi: 0.0 }));
        let s = 5f64.sqrt() / 2.0;
        let v = phi_value(&b, 0.7).unwrap().phi;
        assert!((v - (-1.5 + s / (s * 0.7).tanh())).abs() < 1e-14);
    }

    #[test]
    fn riccati_identity_holds() {
        for (kind, lambda, mu) in [
            (BranchKind::Hyperbolic, 1.0, -2.0),
            (BranchKind::Trigonometric, 1.0, 2.0),
            (BranchKind::Rational, 2.0, 1.0),
        ] {
            let b = branch(kind, lambda, mu, 1.3, 0.4);
            for i in 0..50 {
                let xi = -2.0 + 0.083 * i as f64;
                if let Ok(p) = phi_value(&b, xi) {
                    let r = p.d1 + p.phi * p.phi + lambda * p.phi + mu;
                    assert!(r.abs() < 1e-10, "{kind} xi={xi} r={r}");
                }
            }
        }
    }

    #[test]
    fn branch_kind_must_match_discriminant() {
        assert!(SolutionBranch::new(BranchKind::Trigonometric, 3.0, 1.0, 1.0, 0.0, Mode::Derived).is_err());
        assert!(SolutionBranch::new(BranchKind::Hyperbolic, 3.0, 1.0, 0.0, 0.0, Mode::Derived).is_err());
        assert_eq!(
            SolutionBranch::classify(2.0, 1.0, 1.0, 0.0, Mode::Derived)
                .unwrap()
                .kind,
            BranchKind::Rational
        );
    }

    #[test]
    fn eval_u_examples() {
        let c = WaveCoefficients::new([(1, 0.25), (0, 2.0)]);
        let b = branch(BranchKind::Rational, 0.0, 0.0, 1.0, 1.0);
        assert_eq!(eval_u(&c, &b, 0.0).unwrap().u, 0.25 + 2.0);

        // Printed u_4 at xi = 0 equals alpha_0 because tanh(0) = 0.
        let (eta, k, l, omega, lambda) = (1.0, 1.0, 1.0, 6.0, 3.0);
        let a0 = (lambda * eta * k * k - l) / (k * omega);
        let c = WaveCoefficients::new([(1, 2.0 * eta * k / omega), (0, a0)]);
        let lit = SolutionBranch::new(BranchKind::Hyperbolic, lambda, 1.0, 0.0, 1.0, Mode::PaperLiteral).unwrap();
        assert_eq!(eval_u(&c, &lit, 0.0).unwrap().u, a0);
        // Printed u_3 at xi = 0: B xi/(A + B xi) vanishes.
        let lit = SolutionBranch::new(BranchKind::Rational, 2.0, 1.0, 1.0, 1.0, Mode::PaperLiteral).unwrap();
        assert_eq!(eval_u(&c, &lit, 0.0).unwrap().u, a0);
    }

    #[test]
    fn paper_literal_matches_printed_u4_and_u5() {
        let (a1, a0) = (0.4, -0.3);
        let c = WaveCoefficients::new([(1, a1), (0, a0)]);
        let h = SolutionBranch::new(BranchKind::Hyperbolic, 3.0, 1.0, 0.0, 2.0, Mode::PaperLiteral).unwrap();
        let t = SolutionBranch::new(BranchKind::Trigonometric, 1.0, 2.0, 1.5, 0.0, Mode::PaperLiteral).unwrap();
        for xi in [-1.2, -0.3, 0.5, 0.9] {
            let d = 5f64.sqrt();
            let u4 = a1 * d * (xi * d / 2.0).tanh() + a0;
            assert!((eval_u(&c, &h, xi).unwrap().u - u4).abs() < 1e-14);
            let d = 7f64.sqrt();
            let u5 = -a1 * d * (xi * d / 2.0).tan() + a0;
            assert!((eval_u(&c, &t, xi).unwrap().u - u5).abs() < 1e-13);
        }
    }

    #[test]
    fn paper_literal_negative_power_matches_u9() {
        let (eta, k, l, omega, lambda, mu) = (1.0, 1.0, 2.0, 6.0, 3.0, 1.0);
        let a1 = 2.0 * eta * k / omega;
        let am1 = -2.0 * eta * mu * k / omega;
        let a0 = -l / (k * omega);
        let c = WaveCoefficients::new([(-1, am1), (0, a0), (1, a1)]);
        let h = SolutionBranch::new(BranchKind::Hyperbolic, lambda, mu, 0.0, 1.0, Mode::PaperLiteral).unwrap();
        let d: f64 = lambda * lambda - 4.0 * mu;
        for xi in [-2.0, 0.4, 1.7] {
            let th = (xi * d.sqrt() / 2.0).tanh();
            let u9 = a1 * d.sqrt() * th + a0 - 2.0 * eta * mu * k / omega / d.sqrt() / th;
            assert!((eval_u(&c, &h, xi).unwrap().u - u9).abs() < 1e-13);
        }
        assert_eq!(eval_u(&c, &h, 0.0), Err(Error::PhiZero { xi: 0.0 }));
    }

    #[test]
    fn profile_examples() {
        let c = WaveCoefficients::new([(0, 0.75)]);
        let b = branch(BranchKind::Hyperbolic, 3.0, 1.0, 1.0, 0.0);
        let g = Grid::new(-3.0, 3.0, 7).unwrap();
        assert!(sample_profile(&c, &b, &g).iter().all(|s| s.u == Some(0.75)));
        let g = Grid::new(-1.0, 2.5, 2).unwrap();
        let xs: Vec<f64> = sample_profile(&c, &b, &g).iter().map(|s| s.xi).collect();
        assert_eq!(xs, [-1.0, 2.5]);
        assert!(Grid::new(0.0, 1.0, 1).is_err());
    }

    #[test]
    fn trig_profile_flags_each_pole_crossing() {
        // A cos(s xi) + B sin(s xi) with s = 1 vanishes at xi = pi/2 + k pi.
        let b = branch(BranchKind::Trigonometric, 0.0, 1.0, 1.0, 0.0);
        let c = WaveCoefficients::new([(1, 1.0)]);
        let g = Grid::new(-10.0, 10.0, 1001).unwrap();
        let samples = sample_profile(&c, &b, &g);
        let poles: Vec<f64> = samples.iter().filter(|s| s.pole()).map(|s| s.xi).collect();
        let expected: Vec<f64> = (-3..=2)
            .map(|k| std::f64::consts::FRAC_PI_2 + k as f64 * std::f64::consts::PI)
            .collect();
        assert_eq!(poles.len(), expected.len());
        for (p, e) in poles.iter().zip(&expected) {
            assert!((p - e).abs() <= 0.01 + 1e-12, "{p} vs {e}");
        }
    }

    #[test]
    fn grid_point_on_a_pole() {
        let b = branch(BranchKind::Rational, 0.0, 0.0, 1.0, -1.0);
        let c = WaveCoefficients::new([(1, 1.0)]);
        let samples = sample_profile(&c, &b, &Grid::new(0.0, 2.0, 5).unwrap());
        let poles: Vec<bool> = samples.iter().map(WaveSample::pole).collect();
        assert_eq!(poles, [false, false, true, false, false]);
    }

    #[test]
    fn negative_powers_flag_phi_zeros() {
        // phi = 1/(1 + xi) - 1/2 vanishes at xi = 1.
        let b = branch(BranchKind::Rational, 1.0, 0.25, 1.0, 1.0);
        let c = WaveCoefficients::new([(-1, 1.0)]);
        let samples = sample_profile(&c, &b, &Grid::new(0.0, 3.0, 31).unwrap());
        let poles: Vec<f64> = samples.iter().filter(|s| s.pole()).map(|s| s.xi).collect();
        assert_eq!(poles.len(), 1);
        assert!((poles[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn xi_examples() {
        assert!((xi_of(3.0, 1.25, 1.0, -1.0, 1.0, 1.0).unwrap() - 1.75).abs() < 1e-15);
        assert_eq!(xi_of(0.0, 0.0, 2.0, 3.0, 0.5, 0.5).unwrap(), 0.0);
        let v = xi_of(1.0, 1.0, 1.0, 1.0, 0.5, 0.5).unwrap();
        assert!((v - 4.0 / std::f64::consts::PI.sqrt()).abs() < 1e-12);
        assert!((v - 2.256_758_334_191_025).abs() < 1e-12);
        assert!(xi_of(-1.0, 0.0, 1.0, 1.0, 0.5, 0.5).is_err());
    }

    #[test]
    fn decimal_formatting() {
        assert_eq!(format_decimal(1.0 / 3.0, 17), "0.33333333333333331");
        assert_eq!(format_decimal(-5.0, 17), "-5.0000000000000000");
        assert_eq!(format_decimal(0.0, 17), "0");
        assert_eq!(format_decimal(1.5e-3, 3), "0.00150");
        assert_eq!(format_decimal(123456.0, 3), "123000");
        assert_eq!(format_decimal(12.5, 4), "12.50");
    }

    #[test]
    fn csv_layout() {
        let s = profile_csv(&[WaveSample { xi: 0.0, u: Some(1.0) }, WaveSample { xi: 0.5, u: None }]);
        assert_eq!(s, "xi,u,pole\n0,1.0000000000000000,false\n0.50000000000000000,,true\n");
    }
}
