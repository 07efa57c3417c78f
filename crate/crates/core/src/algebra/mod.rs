//! Exact arithmetic: rationals, sparse multivariate polynomials and
//! unsimplified rational functions.

mod parse;
mod poly;
mod ratfunc;
mod rational;
mod symbol;

pub use parse::{parse_poly, parse_rational};
pub use poly::{Monomial, MultiPoly};
pub use ratfunc::RationalFunction;
pub use rational::Rational;
pub use symbol::Symbol;

use std::collections::BTreeMap;

/// Exact point for evaluation.
pub type RationalPoint = BTreeMap<Symbol, Rational>;
/// Floating-point assignment of symbols.
pub type Assignment = BTreeMap<Symbol, f64>;
