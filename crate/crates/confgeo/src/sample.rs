//! Seeded point sweeps and numeric equality of expressions.
//!
//! Equality of symbolic objects is decided by evaluating both sides on a
//! deterministic stream of interior points and comparing residuals,
//! replacing a symbolic simplifier. Sweeps fan out over points with rayon
//! when the `parallel` feature is enabled; the sequential fallback visits
//! the identical points in the identical order of indices.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::domain::DomainBox;
use crate::expr::{EvalError, Expr};

/// Result of comparing two quantities over sampled points.
#[derive(Debug, Clone)]
pub struct NumericCheck {
    pub passed: bool,
    /// Largest relative residual |a - b| / (1 + max(|a|, |b|)) seen.
    pub max_residual: f64,
    pub worst_point: Vec<f64>,
    pub points: usize,
    pub tol: f64,
}

/// Residual of a single comparison.
pub fn residual(a: f64, b: f64) -> f64 {
    (a - b).abs() / (1.0 + a.abs().max(b.abs()))
}

fn reduce_worst(
    results: impl IntoIterator<Item = (f64, Vec<f64>)>,
) -> (f64, Vec<f64>) {
    let mut worst = (f64::NEG_INFINITY, Vec::new());
    for (r, p) in results {
        if r > worst.0 {
            worst = (r, p);
        }
    }
    worst
}

/// Evaluate `f(point) -> residual` over `n` seeded points of `bx`,
/// returning the worst residual and where it occurred. Point index i is
/// always drawn from the same generator regardless of execution order.
pub fn sweep_max_residual<F>(
    bx: &DomainBox,
    n: usize,
    seed: u64,
    f: F,
) -> Result<(f64, Vec<f64>), EvalError>
where
    F: Fn(&[f64]) -> Result<f64, EvalError> + Sync,
{
    #[cfg(feature = "parallel")]
    {
        let results: Result<Vec<_>, EvalError> = (0..n as u64)
            .into_par_iter()
            .map(|i| {
                let p = bx.sample_point(seed, i);
                let r = f(&p)?;
                Ok((r, p))
            })
            .collect();
        Ok(reduce_worst(results?))
    }
    #[cfg(not(feature = "parallel"))]
    {
        sweep_max_residual_seq(bx, n, seed, f)
    }
}

/// Sequential point sweep; always available so benchmarks can compare the
/// two paths directly.
pub fn sweep_max_residual_seq<F>(
    bx: &DomainBox,
    n: usize,
    seed: u64,
    f: F,
) -> Result<(f64, Vec<f64>), EvalError>
where
    F: Fn(&[f64]) -> Result<f64, EvalError>,
{
    let mut results = Vec::with_capacity(n);
    for i in 0..n as u64 {
        let p = bx.sample_point(seed, i);
        let r = f(&p)?;
        results.push((r, p));
    }
    Ok(reduce_worst(results))
}

/// True iff `e1` and `e2` agree within `tol` (relative, shifted by 1) on
/// `n` seeded interior points of `bx`. A domain violation at any sampled
/// point aborts the check with that point's error.
pub fn numeric_equal(
    e1: &Expr,
    e2: &Expr,
    bx: &DomainBox,
    n: usize,
    tol: f64,
    seed: u64,
    alpha: f64,
) -> Result<NumericCheck, EvalError> {
    assert!(n >= 1, "numeric_equal needs at least one sample point");
    let (max_residual, worst_point) = sweep_max_residual(bx, n, seed, |p| {
        let a = e1.eval(p, alpha)?;
        let b = e2.eval(p, alpha)?;
        Ok(residual(a, b))
    })?;
    Ok(NumericCheck { passed: max_residual <= tol, max_residual, worst_point, points: n, tol })
}

/// Worst residual of a list of componentwise comparisons over a point
/// sweep; used by the identity suites.
pub fn components_max_residual(
    pairs: &[(Expr, Expr)],
    bx: &DomainBox,
    n: usize,
    seed: u64,
    alpha: f64,
) -> Result<(f64, Vec<f64>), EvalError> {
    sweep_max_residual(bx, n, seed, |p| {
        let mut worst = 0.0f64;
        for (a, b) in pairs {
            let va = a.eval(p, alpha)?;
            let vb = b.eval(p, alpha)?;
            worst = worst.max(residual(va, vb));
        }
        Ok(worst)
    })
}
