use std::collections::BTreeMap;
use std::fmt;

use super::{Assignment, Monomial, MultiPoly, Rational, RationalPoint, Symbol};
use crate::error::{Error, Result};

/// Quotient of two polynomials, kept unsimplified apart from cancelling
/// monomial factors against a single-term denominator.
///
/// Zero-testing looks only at the numerator; no polynomial gcd is taken.
#[derive(Clone)]
pub struct RationalFunction {
    num: MultiPoly,
    den: MultiPoly,
}

impl RationalFunction {
    pub fn new(num: MultiPoly, den: MultiPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Self::normalized(num, den))
    }

    /// Skips the zero-denominator check. Only useful for exercising
    /// error paths downstream.
    pub fn from_parts_unchecked(num: MultiPoly, den: MultiPoly) -> Self {
        RationalFunction { num, den }
    }

    pub fn from_poly(p: MultiPoly) -> Self {
        RationalFunction {
            num: p,
            den: MultiPoly::one(),
        }
    }

    pub fn zero() -> Self {
        Self::from_poly(MultiPoly::zero())
    }

    pub fn one() -> Self {
        Self::from_poly(MultiPoly::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_poly(MultiPoly::constant(c))
    }

    pub fn var(s: Symbol) -> Self {
        Self::from_poly(MultiPoly::var(s))
    }

    fn normalized(num: MultiPoly, den: MultiPoly) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        if let Some((c, m)) = den.as_single_term() {
            let g = num.monomial_content().gcd(m);
            let num = num.div_monomial(&g).expect("gcd divides every term").scale(&c.recip());
            let den = MultiPoly::term(Rational::one(), m.div(&g).expect("gcd divides"));
            return RationalFunction { num, den };
        }
        RationalFunction { num, den }
    }

    pub fn num(&self) -> &MultiPoly {
        &self.num
    }

    pub fn den(&self) -> &MultiPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den == MultiPoly::one()
    }

    fn den_monomial(&self) -> Option<&Monomial> {
        self.den.as_single_term().filter(|(c, _)| c.is_one()).map(|(_, m)| m)
    }

    pub fn add(&self, other: &RationalFunction) -> RationalFunction {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            return Self::normalized(self.num.add(&other.num), self.den.clone());
        }
        if let (Some(a), Some(b)) = (self.den_monomial(), other.den_monomial()) {
            let l = a.lcm(b);
            let num = self
                .num
                .mul_monomial(&l.div(a).expect("lcm"))
                .add(&other.num.mul_monomial(&l.div(b).expect("lcm")));
            return Self::normalized(num, MultiPoly::term(Rational::one(), l));
        }
        Self::normalized(
            self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    pub fn neg(&self) -> RationalFunction {
        RationalFunction {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &RationalFunction) -> RationalFunction {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RationalFunction) -> RationalFunction {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        Self::normalized(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn scale(&self, c: &Rational) -> RationalFunction {
        Self::normalized(self.num.scale(c), self.den.clone())
    }

    pub fn div(&self, other: &RationalFunction) -> Result<RationalFunction> {
        if other.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Self::normalized(self.num.mul(&other.den), self.den.mul(&other.num)))
    }

    pub fn pow(&self, n: u32) -> RationalFunction {
        Self::normalized(self.num.pow(n), self.den.pow(n))
    }

    /// Semantic equality: `a/b == c/d` iff `a*d - c*b` expands to zero.
    pub fn equivalent(&self, other: &RationalFunction) -> bool {
        self.num.mul(&other.den).sub(&other.num.mul(&self.den)).is_zero()
    }

    pub fn subst(&self, bindings: &BTreeMap<Symbol, RationalFunction>) -> Result<RationalFunction> {
        let n = self.num.subst(bindings)?;
        let d = self.den.subst(bindings)?;
        n.div(&d)
    }

    pub fn eval(&self, point: &RationalPoint) -> Result<Rational> {
        let d = self.den.eval(point)?;
        if d.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(&self.num.eval(point)? / &d)
    }

    pub fn eval_f64(&self, point: &Assignment) -> Result<f64> {
        let d = self.den.eval_f64(point)?;
        if d == 0.0 {
            return Err(Error::ZeroDenominator);
        }
        Ok(self.num.eval_f64(point)? / d)
    }
}

impl PartialEq for RationalFunction {
    fn eq(&self, other: &Self) -> bool {
        self.equivalent(other)
    }
}

impl From<MultiPoly> for RationalFunction {
    fn from(p: MultiPoly) -> Self {
        RationalFunction::from_poly(p)
    }
}

impl From<Rational> for RationalFunction {
    fn from(c: Rational) -> Self {
        RationalFunction::constant(c)
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_polynomial() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
