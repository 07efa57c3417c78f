//! Numeric solution of an instantiated algebraic system by damped Newton
//! iteration (least-squares steps) with random restarts.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{Assignment, Monomial, MultiPoly, Symbol};
use crate::error::{Error, Result};
use crate::system::AlgebraicSystem;

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub restarts: usize,
    pub tolerance: f64,
    pub dedup_distance: f64,
    pub max_iterations: usize,
    pub max_halvings: u32,
    /// Starting points are drawn uniformly from `[-init_range, init_range]`.
    pub init_range: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            restarts: 64,
            tolerance: 1e-12,
            dedup_distance: 1e-6,
            max_iterations: 200,
            max_halvings: 20,
            init_range: 2.0,
        }
    }
}

/// Polynomial in the unknowns with float coefficients.
#[derive(Debug, Clone)]
struct CompiledPoly {
    terms: Vec<(f64, Vec<(usize, i32)>)>,
}

impl CompiledPoly {
    fn compile(p: &MultiPoly, params: &Assignment, index: &BTreeMap<Symbol, usize>) -> Result<Self> {
        let mut terms = Vec::new();
        for (c, m) in p.partial_eval_f64(params) {
            if c == 0.0 {
                continue;
            }
            let vars = monomial_indices(&m, index)?;
            terms.push((c, vars));
        }
        Ok(CompiledPoly { terms })
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, vars)| vars.iter().fold(*c, |acc, (i, e)| acc * x[*i].powi(*e)))
            .sum()
    }
}

fn monomial_indices(m: &Monomial, index: &BTreeMap<Symbol, usize>) -> Result<Vec<(usize, i32)>> {
    m.factors()
        .map(|(s, e)| {
            index
                .get(s)
                .map(|i| (*i, e as i32))
                .ok_or_else(|| Error::MissingAssignment(s.to_string()))
        })
        .collect()
}

/// A system with every parameter replaced by a number.
#[derive(Debug, Clone)]
pub struct InstantiatedSystem {
    pub unknowns: Vec<Symbol>,
    equations: Vec<CompiledPoly>,
    jacobian: Vec<Vec<CompiledPoly>>,
}

impl InstantiatedSystem {
    pub fn new(sys: &AlgebraicSystem, params: &Assignment) -> Result<Self> {
        let index: BTreeMap<Symbol, usize> = sys.unknowns.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        let mut equations = Vec::new();
        let mut jacobian = Vec::new();
        for eq in &sys.equations {
            let compiled = CompiledPoly::compile(&eq.poly, params, &index)?;
            if compiled.is_zero() {
                continue;
            }
            let row = sys
                .unknowns
                .iter()
                .map(|u| CompiledPoly::compile(&eq.poly.diff(u), params, &index))
                .collect::<Result<Vec<_>>>()?;
            equations.push(compiled);
            jacobian.push(row);
        }
        Ok(InstantiatedSystem {
            unknowns: sys.unknowns.clone(),
            equations,
            jacobian,
        })
    }

    pub fn len(&self) -> usize {
        self.equations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.equations.is_empty()
    }

    pub fn residuals(&self, x: &[f64]) -> Vec<f64> {
        self.equations.iter().map(|e| e.eval(x)).collect()
    }

    pub fn max_residual(&self, x: &[f64]) -> f64 {
        self.residuals(x).iter().fold(0.0, |a, r| a.max(r.abs()))
    }

    fn jacobian_at(&self, x: &[f64]) -> DMatrix<f64> {
        DMatrix::from_fn(self.equations.len(), self.unknowns.len(), |i, j| {
            self.jacobian[i][j].eval(x)
        })
    }
}

/// Numeric solution; `residual_norm` is always recomputed from `values`.
#[derive(Debug, Clone)]
pub struct NumericCandidate {
    pub values: BTreeMap<Symbol, f64>,
    pub residual_norm: f64,
}

impl NumericCandidate {
    pub fn new(sys: &InstantiatedSystem, x: &[f64]) -> Self {
        NumericCandidate {
            values: sys.unknowns.iter().cloned().zip(x.iter().copied()).collect(),
            residual_norm: sys.max_residual(x),
        }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.get(&Symbol::new(name)).copied()
    }
}

fn l2(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn max_norm(r: &[f64]) -> f64 {
    r.iter().fold(0.0, |a, v| a.max(v.abs()))
}

/// One damped Newton run from `x0`; returns the iterate if it converged.
fn newton(sys: &InstantiatedSystem, mut x: Vec<f64>, opts: &SolveOptions) -> Option<Vec<f64>> {
    let mut r = sys.residuals(&x);
    let mut polish = 0;
    for _ in 0..opts.max_iterations {
        let converged = max_norm(&r) < opts.tolerance;
        if converged {
            polish += 1;
            if polish > 20 || l2(&r) == 0.0 {
                break;
            }
        }
        let j = sys.jacobian_at(&x);
        let rhs = -DVector::from_column_slice(&r);
        let svd = j.svd(true, true);
        let smax = svd.singular_values.max();
        let step = svd.solve(&rhs, 1e-13 * smax.max(1.0)).ok()?;

        let current = l2(&r);
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, d)| a + t * d).collect();
            let tr = sys.residuals(&trial);
            if tr.iter().all(|v| v.is_finite()) && l2(&tr) < current {
                accepted = Some((trial, tr));
                break;
            }
            t *= 0.5;
        }
        match accepted {
            Some((nx, nr)) => {
                x = nx;
                r = nr;
            }
            None => break,
        }
    }
    (max_norm(&r) < opts.tolerance).then_some(x)
}

pub fn solve_numeric(sys: &AlgebraicSystem, params: &Assignment, seed: u64) -> Result<Vec<NumericCandidate>> {
    solve_numeric_with(sys, params, seed, &SolveOptions::default())
}

/// Restarts are drawn from a ChaCha stream seeded with `seed`; converged
/// points are sorted and then deduplicated by max-norm distance.
pub fn solve_numeric_with(
    sys: &AlgebraicSystem,
    params: &Assignment,
    seed: u64,
    opts: &SolveOptions,
) -> Result<Vec<NumericCandidate>> {
    if sys.unknowns.len() > sys.equations.len() {
        return Err(Error::Domain(format!(
            "{} unknowns but only {} equations",
            sys.unknowns.len(),
            sys.equations.len()
        )));
    }
    let inst = InstantiatedSystem::new(sys, params)?;
    let n = inst.unknowns.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut found: Vec<Vec<f64>> = Vec::new();
    for _ in 0..opts.restarts {
        let x0: Vec<f64> = (0..n)
            .map(|_| rng.gen_range(-opts.init_range..=opts.init_range))
            .collect();
        if let Some(x) = newton(&inst, x0, opts) {
            found.push(x);
        }
    }
    if found.is_empty() {
        return Err(Error::NoConvergence {
            restarts: opts.restarts,
        });
    }
    found.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(p, q)| p.total_cmp(q))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut kept: Vec<Vec<f64>> = Vec::new();
    for x in found {
        let distinct = kept
            .iter()
            .all(|k| k.iter().zip(&x).fold(0.0f64, |a, (p, q)| a.max((p - q).abs())) > opts.dedup_distance);
        if distinct {
            kept.push(x);
        }
    }
    Ok(kept.iter().map(|x| NumericCandidate::new(&inst, x)).collect())
}
