//! Fractional PDE description, reduction to an ODE in the travelling-wave
//! variable `xi = K*x^beta/Gamma(beta+1) + L*t^alpha/Gamma(alpha+1)`,
//! single integration and homogeneous balance.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::{parse_poly, parse_rational, MultiPoly, Rational, RationalFunction, Symbol};
use crate::ansatz::{ALPHA, LAMBDA, MU};
use crate::error::{Error, Result};

pub const K: &str = "K";
pub const L: &str = "L";
pub const C: &str = "C";

/// Largest ansatz order tried by [`homogeneous_balance`].
const MAX_BALANCE_ORDER: u32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DerivKind {
    Time,
    Space,
}

/// `coeff * u^u_power * D^(mult*order) u`; with `mult = 0` the term is just
/// `coeff * u^u_power`.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coeff: MultiPoly,
    pub u_power: u32,
    pub deriv: DerivKind,
    pub mult: u32,
}

/// A PDE `sum(terms) = 0` of the fractional KdV-Burgers family.
#[derive(Debug, Clone, PartialEq)]
pub struct EquationSpec {
    pub alpha: Rational,
    pub beta: Rational,
    pub terms: Vec<Term>,
}

#[derive(Serialize, Deserialize)]
struct RawTerm {
    coeff: String,
    u_power: u32,
    deriv: DerivKind,
    #[serde(default = "one")]
    mult: u32,
}

fn one() -> u32 {
    1
}

#[derive(Serialize, Deserialize)]
struct RawEquation {
    alpha: String,
    beta: String,
    terms: Vec<RawTerm>,
}

fn is_reserved(s: &Symbol) -> bool {
    [K, L, C, LAMBDA, MU].contains(&s.name()) || s.index_for(ALPHA).is_some()
}

fn order_in_unit_interval(r: &Rational) -> bool {
    !r.is_negative() && !r.is_zero() && r <= &Rational::one()
}

impl EquationSpec {
    pub fn new(alpha: Rational, beta: Rational, terms: Vec<Term>) -> Result<Self> {
        let eq = EquationSpec { alpha, beta, terms };
        eq.validate()?;
        Ok(eq)
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidEquation(m));
        if !order_in_unit_interval(&self.alpha) || !order_in_unit_interval(&self.beta) {
            return bad(format!(
                "fractional orders must lie in (0, 1], got alpha = {}, beta = {}",
                self.alpha, self.beta
            ));
        }
        if !self.terms.iter().any(|t| t.deriv == DerivKind::Time) {
            return bad("no time-derivative term".into());
        }
        if !self.terms.iter().any(|t| t.deriv == DerivKind::Space && t.mult >= 1) {
            return bad("no space-derivative term".into());
        }
        for (i, t) in self.terms.iter().enumerate() {
            if t.u_power + t.mult == 0 {
                return bad(format!("term {i} is a pure constant"));
            }
            if t.deriv == DerivKind::Time && t.mult != 1 {
                return bad(format!("time term {i} must have multiplicity 1"));
            }
            if t.coeff.is_zero() {
                return bad(format!("term {i} has a zero coefficient"));
            }
            if let Some(s) = t.coeff.symbols().into_iter().find(is_reserved) {
                return bad(format!("term {i} uses reserved symbol `{s}`"));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawEquation = serde_json::from_str(text)?;
        let terms = raw
            .terms
            .into_iter()
            .map(|t| {
                Ok(Term {
                    coeff: parse_poly(&t.coeff)?,
                    u_power: t.u_power,
                    deriv: t.deriv,
                    mult: t.mult,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        EquationSpec::new(parse_rational(&raw.alpha)?, parse_rational(&raw.beta)?, terms)
    }

    pub fn to_json(&self) -> String {
        let raw = RawEquation {
            alpha: self.alpha.to_string(),
            beta: self.beta.to_string(),
            terms: self
                .terms
                .iter()
                .map(|t| RawTerm {
                    coeff: t.coeff.to_string(),
                    u_power: t.u_power,
                    deriv: t.deriv,
                    mult: t.mult,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&raw).expect("serializable")
    }
}

impl fmt::Display for EquationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({})", t.coeff)?;
            match t.u_power {
                0 => {}
                1 => f.write_str("*u")?,
                p => write!(f, "*u^{p}")?,
            }
            match (t.deriv, t.mult) {
                (_, 0) => {}
                (DerivKind::Time, _) => f.write_str("*D_t^alpha u")?,
                (DerivKind::Space, 1) => f.write_str("*D_x^beta u")?,
                (DerivKind::Space, q) => write!(f, "*D_x^({q}beta) u")?,
            }
        }
        write!(f, " = 0  (alpha = {}, beta = {})", self.alpha, self.beta)
    }
}

/// `coeff * u^u_power * u^(order)`; `order = 0` means `coeff * u^u_power`.
#[derive(Debug, Clone)]
pub struct OdeTerm {
    pub coeff: RationalFunction,
    pub u_power: u32,
    pub order: u32,
}

impl OdeTerm {
    /// Number of `u` factors, counting the derivative factor.
    pub fn u_factors(&self) -> u32 {
        self.u_power + u32::from(self.order > 0)
    }

    /// Degree in `phi` for an ansatz of order `m`.
    pub fn degree(&self, m: u32) -> u32 {
        m * self.u_factors() + self.order
    }

    fn is_nonlinear(&self) -> bool {
        self.u_factors() >= 2
    }

    fn is_linear_derivative(&self) -> bool {
        self.u_power == 0 && self.order >= 1
    }

    pub fn factor_text(&self) -> String {
        let mut s = String::new();
        match self.u_power {
            0 if self.order == 0 => s.push('1'),
            0 => {}
            1 => s.push('u'),
            p => s.push_str(&format!("u^{p}")),
        }
        if self.order > 0 {
            if self.u_power > 0 {
                s.push('*');
            }
            s.push_str(&derivative_text(self.order));
        }
        s
    }

    fn degree_text(&self) -> String {
        let a = self.u_factors();
        let mut s = match a {
            0 => String::new(),
            1 => "m".to_string(),
            a => format!("{a}m"),
        };
        if self.order > 0 {
            s.push_str(&format!(" + {}", self.order));
        }
        s
    }
}

fn derivative_text(q: u32) -> String {
    if q <= 3 {
        format!("u{}", "'".repeat(q as usize))
    } else {
        format!("u^({q})")
    }
}

/// Integer-order ODE `sum(terms) = 0` in `xi`.
#[derive(Debug, Clone)]
pub struct ReducedODE {
    pub terms: Vec<OdeTerm>,
    pub integration_constant_present: bool,
}

impl ReducedODE {
    pub fn max_order(&self) -> u32 {
        self.terms.iter().map(|t| t.order).max().unwrap_or(0)
    }

    pub fn symbols(&self) -> std::collections::BTreeSet<Symbol> {
        self.terms
            .iter()
            .flat_map(|t| t.coeff.num().symbols().into_iter().chain(t.coeff.den().symbols()))
            .collect()
    }
}

impl fmt::Display for ReducedODE {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0 = 0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            if t.u_power == 0 && t.order == 0 {
                write!(f, "({})", t.coeff)?;
            } else {
                write!(f, "({})*{}", t.coeff, t.factor_text())?;
            }
        }
        f.write_str(" = 0")
    }
}

/// Applies the travelling-wave transform: time terms pick up `L`, space
/// terms of multiplicity `q` pick up `K^q`.
pub fn reduce_to_ode(eq: &EquationSpec) -> ReducedODE {
    let k = MultiPoly::var(Symbol::new(K));
    let l = MultiPoly::var(Symbol::new(L));
    let terms = eq
        .terms
        .iter()
        .map(|t| {
            let (factor, order) = match t.deriv {
                DerivKind::Time => (l.clone(), 1),
                DerivKind::Space => (k.pow(t.mult), t.mult),
            };
            OdeTerm {
                coeff: t.coeff.mul(&factor).into(),
                u_power: t.u_power,
                order,
            }
        })
        .collect();
    ReducedODE {
        terms,
        integration_constant_present: false,
    }
}

/// Integrates once in `xi` and appends the constant `C`.
pub fn integrate_once(ode: &ReducedODE) -> Result<ReducedODE> {
    let mut terms = vec![OdeTerm {
        coeff: RationalFunction::var(Symbol::new(C)),
        u_power: 0,
        order: 0,
    }];
    for t in &ode.terms {
        let next = match (t.u_power, t.order) {
            (p, 1) => OdeTerm {
                coeff: t.coeff.scale(&Rational::new(1, p as i64 + 1)),
                u_power: p + 1,
                order: 0,
            },
            (0, q) if q >= 2 => OdeTerm {
                coeff: t.coeff.clone(),
                u_power: 0,
                order: q - 1,
            },
            _ => return Err(Error::NotExactDerivative(format!("({})*{}", t.coeff, t.factor_text()))),
        };
        terms.push(next);
    }
    Ok(ReducedODE {
        terms,
        integration_constant_present: true,
    })
}

/// Result of the homogeneous balance with the two terms that fix `m`.
#[derive(Debug, Clone)]
pub struct BalanceDerivation {
    pub m: u32,
    pub nonlinear: (u32, u32),
    pub linear: (u32, u32),
    /// e.g. `deg(u^2) = 2m, deg(u'') = m + 2: 2m = m + 2 => m = 2`
    pub equation: String,
}

/// Smallest positive `m` for which the highest `phi`-degree is reached by
/// both a nonlinear term and a linear derivative term, with
/// `deg(u^p * u^(q)) = m*p + (m + q)`.
pub fn homogeneous_balance(ode: &ReducedODE) -> Result<BalanceDerivation> {
    if !ode.terms.iter().any(OdeTerm::is_nonlinear) {
        return Err(Error::NoBalance("no nonlinear term".into()));
    }
    if !ode.terms.iter().any(OdeTerm::is_linear_derivative) {
        return Err(Error::NoBalance("no linear derivative term".into()));
    }
    for m in 1..=MAX_BALANCE_ORDER {
        let top = ode.terms.iter().map(|t| t.degree(m)).max().unwrap_or(0);
        let at_top = |pred: fn(&OdeTerm) -> bool| ode.terms.iter().find(|t| pred(t) && t.degree(m) == top);
        if let (Some(n), Some(l)) = (at_top(OdeTerm::is_nonlinear), at_top(OdeTerm::is_linear_derivative)) {
            let equation = format!(
                "deg({}) = {}, deg({}) = {}: {} = {} => m = {}",
                n.factor_text(),
                n.degree_text(),
                l.factor_text(),
                l.degree_text(),
                n.degree_text(),
                l.degree_text(),
                m
            );
            return Ok(BalanceDerivation {
                m,
                nonlinear: (n.u_power, n.order),
                linear: (l.u_power, l.order),
                equation,
            });
        }
    }
    Err(Error::NoBalance(format!(
        "no m in 1..={MAX_BALANCE_ORDER} equates the top degrees"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::RationalFunction;
    use crate::ansatz::{build_ansatz, PhiSeries};

    pub(crate) fn kdv_burgers() -> EquationSpec {
        EquationSpec::from_json(include_str!("../data/kdv_burgers.json")).unwrap()
    }

    fn kdv() -> EquationSpec {
        EquationSpec::from_json(include_str!("../data/kdv.json")).unwrap()
    }

    fn ode(terms: &[(&str, u32, u32)]) -> ReducedODE {
        ReducedODE {
            terms: terms
                .iter()
                .map(|(c, p, q)| OdeTerm {
                    coeff: parse_poly(c).unwrap().into(),
                    u_power: *p,
                    order: *q,
                })
                .collect(),
            integration_constant_present: false,
        }
    }

    fn shape(o: &ReducedODE) -> Vec<(String, u32, u32)> {
        o.terms
            .iter()
            .map(|t| (t.coeff.to_string(), t.u_power, t.order))
            .collect()
    }

    fn sh(v: &[(&str, u32, u32)]) -> Vec<(String, u32, u32)> {
        v.iter().map(|(c, p, q)| (c.to_string(), *p, *q)).collect()
    }

    #[test]
    fn reduces_kdv_burgers() {
        let o = reduce_to_ode(&kdv_burgers());
        assert_eq!(
            shape(&o),
            sh(&[
                ("1*L", 0, 1),
                ("1*K*omega", 1, 1),
                ("1*K^2*eta", 0, 2),
                ("1*K^3*nu", 0, 3)
            ])
        );
        assert!(!o.integration_constant_present);
        let o = reduce_to_ode(&kdv());
        assert_eq!(shape(&o), sh(&[("1*L", 0, 1), ("1*K*omega", 1, 1), ("1*K^3*nu", 0, 3)]));
    }

    #[test]
    fn reduces_two_term_heat_equation() {
        let eq = EquationSpec::from_json(
            r#"{"alpha":"1","beta":"1","terms":[
                {"coeff":"1","u_power":0,"deriv":"time"},
                {"coeff":"eta","u_power":0,"deriv":"space","mult":2}]}"#,
        )
        .unwrap();
        assert_eq!(shape(&reduce_to_ode(&eq)), sh(&[("1*L", 0, 1), ("1*K^2*eta", 0, 2)]));
    }

    #[test]
    fn integrates_kdv_burgers_once() {
        let o = integrate_once(&reduce_to_ode(&kdv_burgers())).unwrap();
        assert_eq!(
            shape(&o),
            sh(&[
                ("1*C", 0, 0),
                ("1*L", 1, 0),
                ("1/2*K*omega", 2, 0),
                ("1*K^2*eta", 0, 1),
                ("1*K^3*nu", 0, 2)
            ])
        );
        assert!(o.integration_constant_present);
        assert_eq!(
            o.to_string(),
            "(1*C) + (1*L)*u + (1/2*K*omega)*u^2 + (1*K^2*eta)*u' + (1*K^3*nu)*u'' = 0"
        );
    }

    #[test]
    fn integrate_single_derivative() {
        let o = integrate_once(&ode(&[("1", 0, 1)])).unwrap();
        assert_eq!(shape(&o), sh(&[("1*C", 0, 0), ("1", 1, 0)]));
    }

    #[test]
    fn integrate_rejects_non_exact_terms() {
        assert!(matches!(
            integrate_once(&ode(&[("1", 1, 2)])),
            Err(Error::NotExactDerivative(_))
        ));
        assert!(matches!(
            integrate_once(&ode(&[("1", 2, 0)])),
            Err(Error::NotExactDerivative(_))
        ));
    }

    #[test]
    fn term_counts_are_preserved() {
        let eq = kdv_burgers();
        let r = reduce_to_ode(&eq);
        assert_eq!(r.terms.len(), eq.terms.len());
        assert_eq!(integrate_once(&r).unwrap().terms.len(), eq.terms.len() + 1);
    }

    #[test]
    fn balance_examples() {
        let integrated = integrate_once(&reduce_to_ode(&kdv_burgers())).unwrap();
        let b = homogeneous_balance(&integrated).unwrap();
        assert_eq!(b.m, 2);
        assert_eq!(b.equation, "deg(u^2) = 2m, deg(u'') = m + 2: 2m = m + 2 => m = 2");

        let b = homogeneous_balance(&reduce_to_ode(&kdv())).unwrap();
        assert_eq!(b.m, 2);
        assert_eq!(
            b.equation,
            "deg(u*u') = 2m + 1, deg(u''') = m + 3: 2m + 1 = m + 3 => m = 2"
        );

        assert_eq!(homogeneous_balance(&ode(&[("1", 2, 0), ("1", 0, 1)])).unwrap().m, 1);
    }

    #[test]
    fn balance_failures() {
        assert!(matches!(
            homogeneous_balance(&ode(&[("1", 0, 1), ("1", 0, 2)])),
            Err(Error::NoBalance(_))
        ));
        // u^2 * u' grows like 3m + 1, never matching u'' at m + 2 for m >= 1.
        assert!(matches!(
            homogeneous_balance(&ode(&[("1", 2, 1), ("1", 0, 2)])),
            Err(Error::NoBalance(_))
        ));
    }

    #[test]
    fn degree_bookkeeping_matches_expansion() {
        for m in 1..=3u32 {
            let u = build_ansatz(m, ALPHA);
            for p in 0..=3u32 {
                for q in 0..=3u32 {
                    if p + q == 0 {
                        continue;
                    }
                    let mut s: PhiSeries = u.pow(p);
                    if q > 0 {
                        s = s.mul(&u.phi_diff_n(q));
                    }
                    let t = OdeTerm {
                        coeff: RationalFunction::one(),
                        u_power: p,
                        order: q,
                    };
                    assert_eq!(s.max_exponent(), Some(t.degree(m) as i32), "m={m} p={p} q={q}");
                }
            }
        }
    }

    #[test]
    fn validation() {
        let base = r#"{"alpha":"1/2","beta":"1/2","terms":[
            {"coeff":"1","u_power":0,"deriv":"time"},
            {"coeff":"COEFF","u_power":1,"deriv":"space","mult":1}]}"#;
        assert!(EquationSpec::from_json(&base.replace("COEFF", "omega")).is_ok());
        for reserved in ["K", "lambda", "alpha_1", "C"] {
            assert!(matches!(
                EquationSpec::from_json(&base.replace("COEFF", reserved)),
                Err(Error::InvalidEquation(_))
            ));
        }
        assert!(EquationSpec::from_json(&base.replace("\"1/2\"", "\"3/2\"")).is_err());
        assert!(EquationSpec::from_json(&base.replace("\"1/2\"", "\"0\"")).is_err());
        let no_space = r#"{"alpha":"1","beta":"1","terms":[{"coeff":"1","u_power":0,"deriv":"time"}]}"#;
        assert!(EquationSpec::from_json(no_space).is_err());
        match EquationSpec::from_json("{\"alpha\": \n  oops}") {
            Err(Error::Json { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn json_round_trip() {
        let eq = kdv_burgers();
        assert_eq!(EquationSpec::from_json(&eq.to_json()).unwrap(), eq);
    }
}
