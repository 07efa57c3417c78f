//! Laurent series in `phi = G'/G` where `G'' + lambda*G' + mu*G = 0`.
//!
//! Differentiation uses the induced Riccati rule
//! `phi' = -(mu + lambda*phi + phi^2)`.

use std::collections::BTreeMap;
use std::fmt;

use crate::algebra::{Assignment, MultiPoly, Rational, RationalFunction, Symbol};
use crate::error::Result;

pub const LAMBDA: &str = "lambda";
pub const MU: &str = "mu";
/// Default name prefix for ansatz coefficients (`alpha_-2`, ..., `alpha_2`).
pub const ALPHA: &str = "alpha";

/// `sum_i c_i * phi^i` with no zero coefficient stored.
#[derive(Clone, Default)]
pub struct PhiSeries {
    coeffs: BTreeMap<i32, RationalFunction>,
}

impl PhiSeries {
    pub fn zero() -> Self {
        PhiSeries::default()
    }

    pub fn constant(c: RationalFunction) -> Self {
        PhiSeries::monomial(0, c)
    }

    /// `c * phi^exp`.
    pub fn monomial(exp: i32, c: RationalFunction) -> Self {
        let mut s = PhiSeries::zero();
        s.accumulate(exp, c);
        s
    }

    /// `phi^exp` with unit coefficient.
    pub fn phi_pow(exp: i32) -> Self {
        PhiSeries::monomial(exp, RationalFunction::one())
    }

    pub fn from_coeffs(coeffs: impl IntoIterator<Item = (i32, RationalFunction)>) -> Self {
        let mut s = PhiSeries::zero();
        for (e, c) in coeffs {
            s.accumulate(e, c);
        }
        s
    }

    fn accumulate(&mut self, exp: i32, c: RationalFunction) {
        if c.is_zero() {
            return;
        }
        let sum = match self.coeffs.remove(&exp) {
            Some(old) => old.add(&c),
            None => c,
        };
        if !sum.is_zero() {
            self.coeffs.insert(exp, sum);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn min_exponent(&self) -> Option<i32> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_exponent(&self) -> Option<i32> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn coeff(&self, exp: i32) -> Option<&RationalFunction> {
        self.coeffs.get(&exp)
    }

    /// Coefficients in increasing exponent order.
    pub fn iter(&self) -> impl DoubleEndedIterator<Item = (i32, &RationalFunction)> {
        self.coeffs.iter().map(|(e, c)| (*e, c))
    }

    pub fn add(&self, other: &PhiSeries) -> PhiSeries {
        let mut out = self.clone();
        for (e, c) in &other.coeffs {
            out.accumulate(*e, c.clone());
        }
        out
    }

    pub fn neg(&self) -> PhiSeries {
        PhiSeries {
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, c.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &PhiSeries) -> PhiSeries {
        self.add(&other.neg())
    }

    /// Cauchy product.
    pub fn mul(&self, other: &PhiSeries) -> PhiSeries {
        let mut out = PhiSeries::zero();
        for (ea, ca) in &self.coeffs {
            for (eb, cb) in &other.coeffs {
                out.accumulate(ea + eb, ca.mul(cb));
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> PhiSeries {
        (0..n).fold(PhiSeries::constant(RationalFunction::one()), |acc, _| acc.mul(self))
    }

    pub fn scale(&self, c: &RationalFunction) -> PhiSeries {
        PhiSeries::from_coeffs(self.coeffs.iter().map(|(e, a)| (*e, a.mul(c))))
    }

    /// Multiplies by `phi^k`.
    pub fn shift(&self, k: i32) -> PhiSeries {
        PhiSeries {
            coeffs: self.coeffs.iter().map(|(e, c)| (e + k, c.clone())).collect(),
        }
    }

    /// d/dxi term by term:
    /// `d(phi^i) = -i*mu*phi^(i-1) - i*lambda*phi^i - i*phi^(i+1)`.
    pub fn phi_diff(&self) -> PhiSeries {
        let lambda = RationalFunction::var(Symbol::new(LAMBDA));
        let mu = RationalFunction::var(Symbol::new(MU));
        let mut out = PhiSeries::zero();
        for (&i, c) in &self.coeffs {
            if i == 0 {
                continue;
            }
            let ci = c.scale(&Rational::integer(-(i as i64)));
            out.accumulate(i - 1, ci.mul(&mu));
            out.accumulate(i, ci.mul(&lambda));
            out.accumulate(i + 1, ci);
        }
        out
    }

    /// `q`-th derivative.
    pub fn phi_diff_n(&self, q: u32) -> PhiSeries {
        (0..q).fold(self.clone(), |acc, _| acc.phi_diff())
    }

    /// Semantic equality of all coefficients.
    pub fn equivalent(&self, other: &PhiSeries) -> bool {
        self.sub(other).is_zero()
    }

    /// Numeric value at a given `phi` with the coefficients' symbols bound.
    pub fn eval_f64(&self, phi: f64, point: &Assignment) -> Result<f64> {
        let mut acc = 0.0;
        for (e, c) in &self.coeffs {
            acc += c.eval_f64(point)? * phi.powi(*e);
        }
        Ok(acc)
    }
}

impl fmt::Display for PhiSeries {
    /// `[(exp, coeff), ...]` in increasing exponent order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (k, (e, c)) in self.coeffs.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "({e}, {c})")?;
        }
        f.write_str("]")
    }
}

impl fmt::Debug for PhiSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Two-sided ansatz `sum_{i=-m}^{m} <prefix>_i * phi^i`.
///
/// Different prefixes keep the coefficient symbols of independent
/// derivations apart.
pub fn build_ansatz(m: u32, prefix: &str) -> PhiSeries {
    assert!(m >= 1, "ansatz order must be positive");
    let m = m as i32;
    PhiSeries::from_coeffs((-m..=m).map(|i| (i, RationalFunction::var(Symbol::indexed(prefix, i)))))
}

pub fn ansatz_symbols(m: u32, prefix: &str) -> Vec<Symbol> {
    let m = m as i32;
    (-m..=m).map(|i| Symbol::indexed(prefix, i)).collect()
}

/// Convenience: a series whose coefficients are plain polynomials.
pub fn series_from_polys(coeffs: impl IntoIterator<Item = (i32, MultiPoly)>) -> PhiSeries {
    PhiSeries::from_coeffs(coeffs.into_iter().map(|(e, p)| (e, p.into())))
}
