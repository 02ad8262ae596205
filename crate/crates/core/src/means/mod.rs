//! Weighted means of finite samples: power, quasiarithmetic, Gini and
//! quasideviation means.
//!
//! Every evaluator first canonicalizes its input: zero weights are dropped,
//! the `(x, lambda)` pairs are sorted, and the weights are normalized to sum
//! to one. Permuting the input therefore gives bitwise identical results, and
//! results are clamped into `[min x, max x]`.

mod generator;
mod kernel;

use thiserror::Error;

use crate::numerics::roots::{brent_from, RootError, DEFAULT_MAX_ITER};
use crate::numerics::CompensatedSum;

pub use generator::{log_grid, GeneratorFunction, GeneratorTag, RealFn, ValidationReport};
pub use kernel::{KernelFn, KernelTag, QuasideviationKernel};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeanError {
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("cannot invert generator: {0}")]
    InversionError(String),
    #[error("kernel does not bracket the mean: {0}")]
    BracketError(String),
}

/// Parameters below this magnitude are treated as zero.
pub const ZERO_PARAM: f64 = 1e-12;

/// Default tolerance on the root of a quasideviation mean, relative to the
/// smallest sample value.
pub const DEVIATION_REL_TOL: f64 = 1e-15;

/// A validated sample, sorted by `x`, with weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub x: Vec<f64>,
    pub w: Vec<f64>,
}

impl Sample {
    pub fn new(x: &[f64], lam: &[f64]) -> Result<Self, MeanError> {
        if x.is_empty() {
            return Err(MeanError::DomainError("empty input".into()));
        }
        if x.len() != lam.len() {
            return Err(MeanError::DomainError(format!(
                "{} values but {} weights",
                x.len(),
                lam.len()
            )));
        }
        if let Some(v) = x.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(MeanError::DomainError(format!("values must be positive and finite, got {v}")));
        }
        if let Some(v) = lam.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(MeanError::DomainError(format!(
                "weights must be nonnegative and finite, got {v}"
            )));
        }
        let mut pairs: Vec<(f64, f64)> =
            x.iter().zip(lam).filter(|(_, l)| **l > 0.0).map(|(a, b)| (*a, *b)).collect();
        if pairs.is_empty() {
            return Err(MeanError::DomainError("weights sum to zero".into()));
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        let total: f64 = pairs.iter().map(|p| p.1).collect::<CompensatedSum>().value();
        Ok(Self {
            x: pairs.iter().map(|p| p.0).collect(),
            w: pairs.iter().map(|p| p.1 / total).collect(),
        })
    }

    pub fn min(&self) -> f64 {
        self.x[0]
    }

    pub fn max(&self) -> f64 {
        self.x[self.x.len() - 1]
    }

    fn clamp(&self, v: f64) -> f64 {
        v.clamp(self.min(), self.max())
    }

    fn is_constant(&self) -> bool {
        self.min() == self.max()
    }
}

fn weighted_sum(terms: impl Iterator<Item = f64>) -> f64 {
    terms.collect::<CompensatedSum>().value()
}

/// Power mean of a canonical sample.
///
/// For finite `p != 0`, with `m` the extreme on the side of `p`, it evaluates
/// `ln P = ln m + ln(S) / p` where `S = sum w_i (x_i / m)^p` lies in `(0, 1]`,
/// so nothing overflows for any `p`. When `S` is close to one (small `|p|`)
/// the logarithm is taken as `ln_1p(sum w_i expm1(...))` instead.
fn power_of_sample(s: &Sample, p: f64) -> f64 {
    if p.is_nan() {
        return f64::NAN;
    }
    if p == f64::INFINITY {
        return s.max();
    }
    if p == f64::NEG_INFINITY {
        return s.min();
    }
    if s.is_constant() {
        return s.min();
    }
    if p.abs() < ZERO_PARAM {
        let m = s.max();
        let mean_log = weighted_sum(s.x.iter().zip(&s.w).map(|(x, w)| w * (x / m).ln()));
        return s.clamp(m * mean_log.exp());
    }
    let m = if p > 0.0 { s.max() } else { s.min() };
    let ln_s = ln_weighted_exp(s, |x| p * (x / m).ln());
    s.clamp(m * (ln_s / p).exp())
}

/// `ln sum w_i exp(e_i)` for exponents `e_i <= 0` with at least one near zero.
fn ln_weighted_exp(s: &Sample, exponent: impl Fn(f64) -> f64) -> f64 {
    let e: Vec<f64> = s.x.iter().map(|&x| exponent(x)).collect();
    let shifted = weighted_sum(e.iter().zip(&s.w).map(|(e, w)| w * e.exp_m1()));
    if shifted > -0.5 {
        shifted.ln_1p()
    } else {
        weighted_sum(e.iter().zip(&s.w).map(|(e, w)| w * e.exp())).ln()
    }
}

/// Weighted power mean `P_p(x, lambda)`; `p = 0` is the geometric mean and
/// `p = -inf, +inf` give `min x`, `max x`.
pub fn power_mean(x: &[f64], lam: &[f64], p: f64) -> Result<f64, MeanError> {
    if p.is_nan() {
        return Err(MeanError::DomainError("power mean parameter is NaN".into()));
    }
    Ok(power_of_sample(&Sample::new(x, lam)?, p))
}

/// Weighted quasiarithmetic mean `g^-1(sum lambda_i g(x_i) / sum lambda_i)`.
///
/// Uses the generator's inverse when it has one and otherwise solves
/// `g(y) = target` on `[min x, max x]`.
pub fn quasiarithmetic_mean(x: &[f64], lam: &[f64], g: &GeneratorFunction) -> Result<f64, MeanError> {
    let s = Sample::new(x, lam)?;
    if s.is_constant() {
        return Ok(s.min());
    }
    match g.tag {
        GeneratorTag::Power(p) => return Ok(power_of_sample(&s, p)),
        GeneratorTag::Log => return Ok(power_of_sample(&s, 0.0)),
        GeneratorTag::Identity => return Ok(power_of_sample(&s, 1.0)),
        GeneratorTag::Exp => {
            // min + ln sum w exp(x - min), or the same around max when the
            // spread would overflow exp
            let (lo, hi) = (s.min(), s.max());
            let v = if hi - lo < 700.0 {
                let a = weighted_sum(s.x.iter().zip(&s.w).map(|(x, w)| w * (x - lo).exp_m1()));
                lo + a.ln_1p()
            } else {
                hi + ln_weighted_exp(&s, |x| x - hi)
            };
            return Ok(s.clamp(v));
        }
        _ => {}
    }
    let values: Vec<f64> = s.x.iter().map(|&v| g.eval(v)).collect();
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(MeanError::DomainError(format!("generator is not finite on the sample ({v})")));
    }
    let target = weighted_sum(values.iter().zip(&s.w).map(|(v, w)| v * w));
    invert_on_sample(&s, g, target, values[0], values[values.len() - 1])
}

fn invert_on_sample(
    s: &Sample,
    g: &GeneratorFunction,
    target: f64,
    g_lo: f64,
    g_hi: f64,
) -> Result<f64, MeanError> {
    if let Some(y) = g.inverse(target) {
        if y.is_finite() {
            return Ok(s.clamp(y));
        }
    }
    let (lo, hi) = (s.min(), s.max());
    let xtol = DEVIATION_REL_TOL * lo;
    brent_from(|y| g.eval(y) - target, (lo, g_lo - target), (hi, g_hi - target), xtol, DEFAULT_MAX_ITER)
        .map(|r| s.clamp(r.x))
        .map_err(|e| MeanError::InversionError(e.to_string()))
}

/// Gini mean `G_{p,q}`; symmetric in `(p, q)` and equal to `P_p` when `q = 0`.
///
/// With `hi = max(p,q)` and `lo = min(p,q)` it is the power mean of order
/// `hi - lo` under the weights `lambda_i x_i^lo`, which are formed in log space.
pub fn gini_mean(x: &[f64], lam: &[f64], p: f64, q: f64) -> Result<f64, MeanError> {
    if !(p.is_finite() && q.is_finite()) {
        return Err(MeanError::DomainError(format!("Gini parameters must be finite, got ({p}, {q})")));
    }
    Ok(gini_of_sample(&Sample::new(x, lam)?, p, q))
}

fn gini_of_sample(s: &Sample, p: f64, q: f64) -> f64 {
    let (hi, lo) = (p.max(q), p.min(q));
    if s.is_constant() {
        return s.min();
    }
    if hi - lo < ZERO_PARAM {
        // exp(sum w x^p ln x / sum w x^p)
        let r = 0.5 * (hi + lo);
        let t = tilted(s, r);
        let mean_log = weighted_sum(t.x.iter().zip(&t.w).map(|(x, w)| w * x.ln()));
        return s.clamp(mean_log.exp());
    }
    if lo == 0.0 {
        return power_of_sample(s, hi);
    }
    if hi == 0.0 {
        return power_of_sample(s, lo);
    }
    s.clamp(power_of_sample(&tilted(s, lo), hi - lo))
}

/// The sample reweighted by `x^r`.
fn tilted(s: &Sample, r: f64) -> Sample {
    let logs: Vec<f64> = s.x.iter().zip(&s.w).map(|(x, w)| w.ln() + r * x.ln()).collect();
    let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let raw: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
    let total = weighted_sum(raw.iter().copied());
    Sample { x: s.x.clone(), w: raw.iter().map(|v| v / total).collect() }
}

/// The quasideviation mean: the unique root `y` of `sum lambda_i E(x_i, y) = 0`.
///
/// The root is bracketed by `[min x, max x]` and located by Brent's method
/// to within `min(tol, 1e-15 * min x)`.
pub fn quasideviation_mean(
    x: &[f64],
    lam: &[f64],
    e: &QuasideviationKernel,
    tol: f64,
) -> Result<f64, MeanError> {
    if !(tol > 0.0) {
        return Err(MeanError::DomainError(format!("tolerance must be positive, got {tol}")));
    }
    deviation_of_sample(&Sample::new(x, lam)?, e, tol)
}

fn deviation_of_sample(s: &Sample, e: &QuasideviationKernel, tol: f64) -> Result<f64, MeanError> {
    if s.is_constant() {
        return Ok(s.min());
    }
    let phi = |y: f64| weighted_sum(s.x.iter().zip(&s.w).map(|(x, w)| w * e.eval(*x, y)));
    let (lo, hi) = (s.min(), s.max());
    let (f_lo, f_hi) = (phi(lo), phi(hi));
    if !(f_lo > 0.0 && f_hi < 0.0) {
        return Err(MeanError::BracketError(format!(
            "expected sum lambda_i E(x_i, y) > 0 at y = {lo} and < 0 at y = {hi}, got {f_lo} and {f_hi}"
        )));
    }
    let xtol = tol.min(DEVIATION_REL_TOL * lo);
    match brent_from(phi, (lo, f_lo), (hi, f_hi), xtol, DEFAULT_MAX_ITER) {
        Ok(root) => Ok(s.clamp(root.x)),
        Err(RootError::MaxIterations { lo, hi }) => Ok(s.clamp(0.5 * (lo + hi))),
        Err(err) => Err(MeanError::BracketError(err.to_string())),
    }
}

/// The homogeneous deviation mean `E_f`: the quasideviation mean of
/// `E(x, y) = f(x / y)`.
pub fn homogeneous_devmean(x: &[f64], lam: &[f64], f: &GeneratorFunction, tol: f64) -> Result<f64, MeanError> {
    quasideviation_mean(x, lam, &QuasideviationKernel::homogeneous(f), tol)
}

/// A weighted mean chosen from the supported families.
#[derive(Debug, Clone)]
pub enum MeanSpec {
    Power(f64),
    QuasiArithmetic(GeneratorFunction),
    Gini(f64, f64),
    Deviation(QuasideviationKernel),
    HomogeneousDeviation(GeneratorFunction),
}

impl MeanSpec {
    pub fn eval(&self, x: &[f64], lam: &[f64]) -> Result<f64, MeanError> {
        self.eval_sample(&Sample::new(x, lam)?)
    }

    pub fn eval_sample(&self, s: &Sample) -> Result<f64, MeanError> {
        match self {
            MeanSpec::Power(p) => {
                if p.is_nan() {
                    return Err(MeanError::DomainError("power mean parameter is NaN".into()));
                }
                Ok(power_of_sample(s, *p))
            }
            MeanSpec::Gini(p, q) => {
                if !(p.is_finite() && q.is_finite()) {
                    return Err(MeanError::DomainError(format!(
                        "Gini parameters must be finite, got ({p}, {q})"
                    )));
                }
                Ok(gini_of_sample(s, *p, *q))
            }
            MeanSpec::QuasiArithmetic(g) => quasiarithmetic_mean(&s.x, &s.w, g),
            MeanSpec::Deviation(e) => deviation_of_sample(s, e, f64::INFINITY),
            MeanSpec::HomogeneousDeviation(f) => {
                deviation_of_sample(s, &QuasideviationKernel::homogeneous(f), f64::INFINITY)
            }
        }
    }

    /// `M(t x, lambda) = t M(x, lambda)` for this family.
    pub fn is_homogeneous(&self) -> bool {
        match self {
            MeanSpec::Power(_) | MeanSpec::Gini(..) | MeanSpec::HomogeneousDeviation(_) => true,
            MeanSpec::QuasiArithmetic(g) => {
                matches!(g.tag, GeneratorTag::Power(_) | GeneratorTag::Log | GeneratorTag::Identity)
            }
            MeanSpec::Deviation(e) => matches!(e.tag, KernelTag::Difference | KernelTag::Homogeneous(_)),
        }
    }

    /// Whether the family is known to be symmetric and monotone.
    pub fn is_symmetric_monotone(&self) -> bool {
        match self {
            MeanSpec::Power(_) | MeanSpec::QuasiArithmetic(_) => true,
            MeanSpec::Gini(p, q) => p * q <= 0.0,
            MeanSpec::HomogeneousDeviation(f) => f.declared_concave && f.declared_sign_property,
            MeanSpec::Deviation(e) => matches!(e.tag, KernelTag::Difference),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * a.abs().max(b.abs())
    }

    #[test]
    fn power_examples() {
        assert!(close(power_mean(&[1.0, 4.0], &[1.0, 1.0], 0.0).unwrap(), 2.0, 1e-15));
        assert!(close(power_mean(&[1.0, 4.0], &[1.0, 1.0], 0.5).unwrap(), 2.25, 1e-15));
        assert!(close(power_mean(&[1.0, 2.0], &[2.0, 1.0], 1.0).unwrap(), 4.0 / 3.0, 1e-15));
        assert_eq!(power_mean(&[1.0, 2.0], &[2.0, 1.0], f64::INFINITY).unwrap(), 2.0);
        assert_eq!(power_mean(&[1.0, 2.0], &[2.0, 1.0], f64::NEG_INFINITY).unwrap(), 1.0);
    }

    #[test]
    fn power_extreme_orders_do_not_overflow() {
        let x = [1e-300, 1.0, 1e300];
        let lam = [1.0, 1.0, 1.0];
        let big = power_mean(&x, &lam, 1e4).unwrap();
        // (1/3)^(1/p) * 1e300
        assert!(close(big, 1e300 * (1.0f64 / 3.0).powf(1e-4), 1e-12));
        let small = power_mean(&x, &lam, -1e4).unwrap();
        assert!(close(small, 1e-300 * (1.0f64 / 3.0).powf(-1e-4), 1e-12));
        assert!(power_mean(&x, &lam, 2.0).unwrap().is_finite());
    }

    #[test]
    fn domain_errors() {
        assert!(power_mean(&[], &[], 1.0).is_err());
        assert!(power_mean(&[1.0, -1.0], &[1.0, 1.0], 1.0).is_err());
        assert!(power_mean(&[1.0], &[1.0, 2.0], 1.0).is_err());
        assert!(power_mean(&[1.0, 2.0], &[0.0, 0.0], 1.0).is_err());
        assert!(power_mean(&[1.0, 2.0], &[1.0, f64::NAN], 1.0).is_err());
        assert!(gini_mean(&[1.0], &[1.0], f64::INFINITY, 0.0).is_err());
    }

    #[test]
    fn quasiarithmetic_examples() {
        let x = [1.0, 4.0];
        let lam = [1.0, 1.0];
        assert!(close(quasiarithmetic_mean(&x, &lam, &GeneratorFunction::log()).unwrap(), 2.0, 1e-15));
        let am = quasiarithmetic_mean(&[1.0, 2.0, 7.0], &[1.0, 3.0, 0.5], &GeneratorFunction::identity()).unwrap();
        assert!(close(am, (1.0 + 6.0 + 3.5) / 4.5, 1e-15));
        let half = quasiarithmetic_mean(&x, &lam, &GeneratorFunction::power(0.5)).unwrap();
        assert!(close(half, power_mean(&x, &lam, 0.5).unwrap(), 1e-14));
    }

    #[test]
    fn quasiarithmetic_without_inverse_uses_root_finder() {
        let g = GeneratorFunction::custom("cube", |u: f64| u * u * u);
        let v = quasiarithmetic_mean(&[1.0, 2.0], &[1.0, 1.0], &g).unwrap();
        assert!(close(v, 4.5f64.cbrt(), 1e-14));
    }

    #[test]
    fn gini_examples() {
        assert!(close(gini_mean(&[1.0, 2.0], &[2.0, 1.0], 1.0, 0.0).unwrap(), 4.0 / 3.0, 1e-15));
        assert!(close(gini_mean(&[1.0, 4.0], &[1.0, 1.0], 0.0, 0.0).unwrap(), 2.0, 1e-15));
        assert!(close(gini_mean(&[1.0, 4.0], &[1.0, 1.0], 0.5, -0.5).unwrap(), 2.0, 1e-15));
        // p = q = 1: exp(sum x ln x / sum x)
        let direct = ((1.0 * 0.0 + 4.0 * 4f64.ln()) / 5.0).exp();
        assert!(close(gini_mean(&[1.0, 4.0], &[1.0, 1.0], 1.0, 1.0).unwrap(), direct, 1e-15));
    }

    #[test]
    fn deviation_examples() {
        let diff = QuasideviationKernel::difference();
        assert!(close(quasideviation_mean(&[1.0, 3.0], &[1.0, 1.0], &diff, 1e-14).unwrap(), 2.0, 1e-15));
        let log = QuasideviationKernel::new("log-ratio", |x: f64, y: f64| (x / y).ln());
        assert!(close(quasideviation_mean(&[1.0, 4.0], &[1.0, 1.0], &log, 1e-14).unwrap(), 2.0, 1e-15));
        assert!(close(quasideviation_mean(&[1.0, 2.0], &[2.0, 1.0], &diff, 1e-14).unwrap(), 4.0 / 3.0, 1e-15));
        assert_eq!(quasideviation_mean(&[5.0, 5.0], &[1.0, 2.0], &diff, 1e-14).unwrap(), 5.0);
    }

    #[test]
    fn deviation_rejects_bad_kernel() {
        let bad = QuasideviationKernel::new("backwards", |x, y| y - x);
        let err = quasideviation_mean(&[1.0, 3.0], &[1.0, 1.0], &bad, 1e-12).unwrap_err();
        assert!(matches!(err, MeanError::BracketError(_)));
    }

    #[test]
    fn homogeneous_deviation_examples() {
        let x = [1.0, 4.0];
        let lam = [1.0, 1.0];
        let v = homogeneous_devmean(&x, &lam, &GeneratorFunction::power_deviation(0.5), 1e-14).unwrap();
        assert!(close(v, 2.25, 1e-14));
        let v = homogeneous_devmean(&x, &lam, &GeneratorFunction::log(), 1e-14).unwrap();
        assert!(close(v, 2.0, 1e-14));
        let v = homogeneous_devmean(&x, &lam, &GeneratorFunction::gini(-0.5, 0.5), 1e-14).unwrap();
        assert!(close(v, 2.0, 1e-14));
    }

    #[test]
    fn spec_flags() {
        assert!(MeanSpec::Power(0.5).is_homogeneous());
        assert!(!MeanSpec::QuasiArithmetic(GeneratorFunction::exp()).is_homogeneous());
        assert!(MeanSpec::Gini(0.5, -0.5).is_symmetric_monotone());
        assert!(!MeanSpec::Gini(0.5, 0.25).is_symmetric_monotone());
    }

    fn sample() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        (1usize..=8).prop_flat_map(|n| {
            (
                prop::collection::vec(-2.0f64..2.0, n).prop_map(|v| v.into_iter().map(|e| 10f64.powf(e)).collect()),
                prop::collection::vec(0.01f64..10.0, n),
            )
        })
    }

    fn all_means() -> Vec<MeanSpec> {
        vec![
            MeanSpec::Power(-3.0),
            MeanSpec::Power(0.0),
            MeanSpec::Power(0.5),
            MeanSpec::Power(2.5),
            MeanSpec::Gini(0.5, -0.5),
            MeanSpec::Gini(1.5, 0.75),
            MeanSpec::Gini(0.3, 0.3),
            MeanSpec::QuasiArithmetic(GeneratorFunction::exp()),
            MeanSpec::QuasiArithmetic(GeneratorFunction::power(-1.5)),
            MeanSpec::HomogeneousDeviation(GeneratorFunction::power_deviation(0.5)),
            MeanSpec::HomogeneousDeviation(GeneratorFunction::gini(-1.0, 0.5)),
            MeanSpec::Deviation(QuasideviationKernel::difference()),
        ]
    }

    proptest! {
        #[test]
        fn internality((x, lam) in sample()) {
            let lo = x.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = x.iter().cloned().fold(0.0, f64::max);
            for m in all_means() {
                let v = m.eval(&x, &lam).unwrap();
                prop_assert!(lo <= v && v <= hi, "{m:?}: {v} outside [{lo}, {hi}]");
            }
        }

        #[test]
        fn weight_scaling_invariance((x, lam) in sample(), t in prop::sample::select(vec![1e-6, 0.37, 3.0, 1e8])) {
            let scaled: Vec<f64> = lam.iter().map(|l| l * t).collect();
            for m in all_means() {
                let a = m.eval(&x, &lam).unwrap();
                let b = m.eval(&x, &scaled).unwrap();
                prop_assert!(close(a, b, 1e-14), "{m:?}: {a} vs {b}");
            }
        }

        #[test]
        fn permutation_invariance((x, lam) in sample(), seed in any::<u64>()) {
            let n = x.len();
            let mut idx: Vec<usize> = (0..n).collect();
            let mut state = seed;
            for i in (1..n).rev() {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                idx.swap(i, (state >> 33) as usize % (i + 1));
            }
            let px: Vec<f64> = idx.iter().map(|&i| x[i]).collect();
            let pl: Vec<f64> = idx.iter().map(|&i| lam[i]).collect();
            for m in all_means() {
                prop_assert_eq!(m.eval(&x, &lam).unwrap(), m.eval(&px, &pl).unwrap());
            }
        }

        #[test]
        fn homogeneity((x, lam) in sample(), t in prop::sample::select(vec![1e-3, 1.0, 1e3])) {
            let tx: Vec<f64> = x.iter().map(|v| v * t).collect();
            for m in all_means().into_iter().filter(MeanSpec::is_homogeneous) {
                let a = t * m.eval(&x, &lam).unwrap();
                let b = m.eval(&tx, &lam).unwrap();
                prop_assert!(close(a, b, 1e-12), "{m:?}: {a} vs {b}");
            }
        }

        #[test]
        fn gini_with_zero_is_power((x, lam) in sample(), p in -5.0f64..5.0) {
            prop_assert_eq!(gini_mean(&x, &lam, p, 0.0).unwrap(), power_mean(&x, &lam, p).unwrap());
            prop_assert_eq!(gini_mean(&x, &lam, 0.0, p).unwrap(), power_mean(&x, &lam, p).unwrap());
        }

        #[test]
        fn power_generator_matches_power_mean((x, lam) in sample(), p in prop_oneof![-4.0f64..-0.25, 0.25f64..4.0]) {
            let pm = power_mean(&x, &lam, p).unwrap();
            let qa = quasiarithmetic_mean(&x, &lam, &GeneratorFunction::power(p)).unwrap();
            prop_assert!(close(qa, pm, 1e-12), "{qa} vs {pm}");
            // the same generator without its tag goes through the generic path
            let plain = GeneratorFunction::custom("u^p", move |u: f64| u.powf(p))
                .with_inverse(move |y: f64| y.powf(1.0 / p));
            let generic = quasiarithmetic_mean(&x, &lam, &plain).unwrap();
            prop_assert!(close(generic, pm, 1e-12), "{generic} vs {pm}");
        }

        #[test]
        fn gini_factorization((x, lam) in sample(), p in -3.0f64..3.0, gap in 0.25f64..3.0) {
            let q = if p + gap <= 3.0 { p + gap } else { p - gap };
            let g = gini_mean(&x, &lam, p, q).unwrap();
            let pp = power_mean(&x, &lam, p).unwrap();
            let pq = power_mean(&x, &lam, q).unwrap();
            let prod = (p / (p - q) * pp.ln() + q / (q - p) * pq.ln()).exp();
            prop_assert!(close(g, prod, 1e-12), "G={g} product={prod}");
        }
    }
}
