//! Homogenization of weighted means and the limit function `h_E` of a
//! quasideviation.
//!
//! Both limits are `t -> 0+` limits, sampled on the ladder `t_k = 4^-k`
//! (`k = 1..=20`) and extrapolated with one Richardson step
//! `R_k = (4 v_{k+1} - v_k) / 3`. The estimate is accepted once three
//! successive extrapolants agree within the tolerance, taken relative once
//! the values exceed one.

use std::sync::Arc;

use thiserror::Error;

use crate::means::{log_grid, GeneratorFunction, KernelTag, MeanError, MeanSpec, QuasideviationKernel, RealFn};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HomogenizeError {
    #[error("ladder did not settle (spread {:e}); last estimate {}", .0.spread, .0.value)]
    NoConvergence(Box<HomogenizationEstimate>),
    #[error("kernel is not normalizable: d2 E({y}, {y}) = {value}")]
    NotNormalizable { y: f64, value: f64 },
    #[error("normalized kernel has diagonal derivative {value} at y = {y}, expected -1")]
    NormalizationCheck { y: f64, value: f64 },
    #[error(transparent)]
    Mean(#[from] MeanError),
    #[error("domain error: {0}")]
    DomainError(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct HomogenizationEstimate {
    pub value: f64,
    /// `(t, M(t x, lambda) / t)` for every rung evaluated.
    pub t_ladder: Vec<(f64, f64)>,
    pub converged: bool,
    /// `max - min` over the last three extrapolants.
    pub spread: f64,
}

pub const LADDER_BASE: f64 = 4.0;
pub const LADDER_RUNGS: usize = 20;

/// Runs the ladder on `g(t)` until three successive extrapolants agree
/// within `tol`.
fn ladder<E>(
    mut g: impl FnMut(f64) -> Result<f64, E>,
    tol: f64,
) -> Result<HomogenizationEstimate, E> {
    let mut rungs: Vec<(f64, f64)> = Vec::with_capacity(LADDER_RUNGS);
    let mut extrapolants: Vec<f64> = Vec::with_capacity(LADDER_RUNGS);
    let mut spread = f64::INFINITY;
    for k in 1..=LADDER_RUNGS {
        let t = LADDER_BASE.powi(-(k as i32));
        rungs.push((t, g(t)?));
        if rungs.len() >= 2 {
            let (a, b) = (rungs[rungs.len() - 2].1, rungs[rungs.len() - 1].1);
            extrapolants.push((LADDER_BASE * b - a) / (LADDER_BASE - 1.0));
        }
        if extrapolants.len() >= 3 {
            let tail = &extrapolants[extrapolants.len() - 3..];
            let hi = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lo = tail.iter().cloned().fold(f64::INFINITY, f64::min);
            spread = hi - lo;
            if spread <= tol * tail[2].abs().max(1.0) {
                return Ok(HomogenizationEstimate {
                    value: tail[2],
                    t_ladder: rungs,
                    converged: true,
                    spread,
                });
            }
        }
    }
    let value = extrapolants.last().copied().unwrap_or(f64::NAN);
    Ok(HomogenizationEstimate { value, t_ladder: rungs, converged: false, spread })
}

fn finish(est: HomogenizationEstimate) -> Result<HomogenizationEstimate, HomogenizeError> {
    if est.converged {
        Ok(est)
    } else {
        Err(HomogenizeError::NoConvergence(Box::new(est)))
    }
}

/// Estimates `lim_{t->0+} M(t x, lambda) / t`.
///
/// A ladder that does not settle is returned inside
/// [`HomogenizeError::NoConvergence`] so the rungs can be inspected; the
/// lower and upper homogenizations may differ for such means.
pub fn homogenize(
    spec: &MeanSpec,
    x: &[f64],
    lam: &[f64],
    tol: f64,
) -> Result<HomogenizationEstimate, HomogenizeError> {
    if !(tol > 0.0) {
        return Err(HomogenizeError::DomainError(format!("tolerance must be positive, got {tol}")));
    }
    let est = ladder(
        |t| {
            let scaled: Vec<f64> = x.iter().map(|v| v * t).collect();
            spec.eval(&scaled, lam).map(|m| m / t)
        },
        tol,
    )?;
    finish(est)
}

/// Tolerance for the `-1` diagonal-derivative spot check after normalization.
pub const NORMALIZATION_CHECK_TOL: f64 = 1e-6;

/// `E*(x, y) = E(x, y) / (-d2 E(y, y))`.
///
/// `d2 E(y, y)` must be negative on a 64-point log grid over `[1e-3, 1e3]`.
/// The result carries no analytic diagonal derivative, so normalizing it
/// again goes through finite differences.
pub fn normalize_kernel(e: &QuasideviationKernel) -> Result<QuasideviationKernel, HomogenizeError> {
    let grid = log_grid(64, 1e-3, 1e3);
    for &y in &grid {
        let d = e.d2_diag(y);
        if !(d < 0.0 && d.is_finite()) {
            return Err(HomogenizeError::NotNormalizable { y, value: d });
        }
    }
    let inner = e.clone();
    let eval = Arc::new(move |x: f64, y: f64| inner.eval(x, y) / -inner.d2_diag(y));
    let normalized =
        QuasideviationKernel::from_parts(eval, None, KernelTag::Normalized(Box::new(e.tag.clone())));
    for &y in grid.iter().step_by(7) {
        let d = normalized.d2_diag_numeric(y);
        if (d + 1.0).abs() > NORMALIZATION_CHECK_TOL {
            return Err(HomogenizeError::NormalizationCheck { y, value: d });
        }
    }
    Ok(normalized)
}

/// `h_E(x) = lim_{t->0+} E*(x t, t) / t` for a normalized kernel.
pub fn h_of_kernel(e_star: &QuasideviationKernel, x: f64, tol: f64) -> Result<f64, HomogenizeError> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(HomogenizeError::DomainError(format!("x must be positive, got {x}")));
    }
    let est = ladder(|t| Ok::<f64, HomogenizeError>(e_star.eval(x * t, t) / t), tol)?;
    finish(est).map(|e| e.value)
}

/// `h_E` of a normalized kernel as a generator function.
///
/// `h_E` is concave and has the sign property whenever `E*` is concave, and
/// both are declared. Integrability of `x -> h_E(1/x)` is left undeclared for
/// the caller to set. Points where the ladder fails evaluate to NaN.
pub fn h_generator(e_star: &QuasideviationKernel, tol: f64) -> GeneratorFunction {
    let kernel = e_star.clone();
    let f: RealFn = Arc::new(move |x: f64| h_of_kernel(&kernel, x, tol).unwrap_or(f64::NAN));
    GeneratorFunction::custom(format!("h[{:?}]", e_star.tag), move |x| f(x))
        .concave(true)
        .sign_property(true)
}
