//! Finite-`N` experiments: Hardy ratios of concrete sequences, the
//! witness-sequence lower estimates, weighted Riemann sums and randomized
//! checks of the weighted Hardy inequality.

use std::fmt::Write as _;
use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::means::{GeneratorTag, MeanError, MeanSpec};
use crate::numerics::{CompensatedSum, LogWeightedSum};
use crate::weights::{TailRule, WeightKind, WeightSequence};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EmpiricalError {
    #[error("domain error: {0}")]
    DomainError(String),
    #[error(transparent)]
    Mean(#[from] MeanError),
    #[error("Hardy inequality violated in trial {trial}: ratio {ratio} > bound {bound}")]
    ViolationFound { trial: usize, sequence: Vec<f64>, ratio: f64, bound: f64 },
}

/// Random sequences are log-uniform on this range.
pub const RANDOM_RANGE: (f64, f64) = (1e-3, 1e3);
/// Relative slack allowed above the constant in [`verify_inequality`].
pub const VIOLATION_SLACK: f64 = 1e-9;

/// `(n, value)` points with `n` strictly increasing.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalTrace {
    pub points: Vec<(usize, f64)>,
    pub label: String,
    pub meta: String,
}

/// `v` with 17 significant digits, in positional notation unless the
/// exponent falls outside `[-5, 16]`.
pub fn format_sig17(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() { "nan".into() } else if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.16e}");
    let exp: i32 = sci.rsplit_once('e').and_then(|(_, e)| e.parse().ok()).unwrap_or(0);
    if (-5..=16).contains(&exp) {
        format!("{:.*}", (16 - exp) as usize, v)
    } else {
        sci
    }
}

impl EmpiricalTrace {
    /// Smallest value over the second half of the index range, `n >= N/2`
    /// with `N` the last index.
    pub fn tail_inf(&self) -> f64 {
        let Some(&(last, _)) = self.points.last() else {
            return f64::NAN;
        };
        self.points
            .iter()
            .filter(|(n, _)| 2 * n >= last)
            .map(|&(_, v)| v)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn last_value(&self) -> Option<f64> {
        self.points.last().map(|p| p.1)
    }

    /// CSV with header `n,value` and `\n` line endings.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,value\n");
        for (n, v) in &self.points {
            let _ = writeln!(s, "{n},{}", format_sig17(*v));
        }
        s
    }

    pub fn write_csv(&self, mut out: impl Write) -> io::Result<()> {
        out.write_all(self.to_csv().as_bytes())
    }
}

/// How the test sequence `x` of [`hardy_ratio`] is generated.
#[derive(Debug, Clone, PartialEq)]
pub enum SequenceRule {
    Constant(f64),
    /// `n^-a`.
    PowerLaw(f64),
    /// Log-uniform on [`RANDOM_RANGE`], from a seeded ChaCha8 stream.
    LogUniform { seed: u64 },
    /// `y / Lambda_n`.
    Witness { y: f64 },
    Explicit(Vec<f64>),
}

impl SequenceRule {
    /// `ln x_1, ..., ln x_n`.
    pub fn ln_values(&self, w: &WeightSequence, n: usize) -> Result<Vec<f64>, EmpiricalError> {
        let positive = |v: f64, what: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(EmpiricalError::DomainError(format!("{what} must be positive and finite, got {v}")))
            }
        };
        match self {
            SequenceRule::Constant(c) => {
                positive(*c, "constant")?;
                Ok(vec![c.ln(); n])
            }
            SequenceRule::PowerLaw(a) => {
                if !a.is_finite() {
                    return Err(EmpiricalError::DomainError(format!("exponent must be finite, got {a}")));
                }
                Ok((1..=n).map(|k| -a * (k as f64).ln()).collect())
            }
            SequenceRule::LogUniform { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                Ok((0..n).map(|_| log_uniform(&mut rng)).collect())
            }
            SequenceRule::Witness { y } => {
                positive(*y, "y")?;
                Ok((1..=n).map(|k| y.ln() - w.ln_prefix_sum(k)).collect())
            }
            SequenceRule::Explicit(values) => {
                if values.len() < n {
                    return Err(EmpiricalError::DomainError(format!(
                        "explicit sequence has {} values, {n} needed",
                        values.len()
                    )));
                }
                values[..n].iter().map(|&v| positive(v, "x").map(|_| v.ln())).collect()
            }
        }
    }
}

fn log_uniform(rng: &mut ChaCha8Rng) -> f64 {
    rng.gen_range(RANDOM_RANGE.0.ln()..RANDOM_RANGE.1.ln())
}

/// Prefix means `M((x_1..x_n), (lambda_1..lambda_n))` for growing `n`,
/// all in the log domain.
///
/// Power, Gini and the homogeneous quasiarithmetic generators keep running
/// sums; everything else re-evaluates the whole prefix.
enum PrefixMean<'a> {
    Power { p: f64, num: LogWeightedSum, den: LogWeightedSum },
    Geometric(LogWeightedSum),
    Extreme { max: bool, value: f64 },
    Gini { p: f64, q: f64, a: LogWeightedSum, b: LogWeightedSum },
    GiniDiagonal { p: f64, acc: LogWeightedSum },
    Recompute { spec: &'a MeanSpec, ln_x: Vec<f64>, ln_lam: Vec<f64> },
}

const ZERO_PARAM: f64 = 1e-12;

impl<'a> PrefixMean<'a> {
    fn new(spec: &'a MeanSpec) -> Self {
        let power = |p: f64| {
            if p.abs() < ZERO_PARAM {
                PrefixMean::Geometric(LogWeightedSum::new())
            } else if p.is_infinite() {
                PrefixMean::Extreme { max: p > 0.0, value: f64::NAN }
            } else {
                PrefixMean::Power { p, num: LogWeightedSum::new(), den: LogWeightedSum::new() }
            }
        };
        match spec {
            MeanSpec::Power(p) if !p.is_nan() => power(*p),
            MeanSpec::QuasiArithmetic(g) => match g.tag {
                GeneratorTag::Power(p) => power(p),
                GeneratorTag::Log => power(0.0),
                GeneratorTag::Identity => power(1.0),
                _ => PrefixMean::Recompute { spec, ln_x: Vec::new(), ln_lam: Vec::new() },
            },
            MeanSpec::Gini(p, q) if p.is_finite() && q.is_finite() => {
                if (p - q).abs() < ZERO_PARAM {
                    PrefixMean::GiniDiagonal { p: 0.5 * (p + q), acc: LogWeightedSum::new() }
                } else if q.abs() < ZERO_PARAM {
                    power(*p)
                } else if p.abs() < ZERO_PARAM {
                    power(*q)
                } else {
                    PrefixMean::Gini { p: *p, q: *q, a: LogWeightedSum::new(), b: LogWeightedSum::new() }
                }
            }
            _ => PrefixMean::Recompute { spec, ln_x: Vec::new(), ln_lam: Vec::new() },
        }
    }

    fn push(&mut self, ln_lam: f64, ln_x: f64) {
        match self {
            PrefixMean::Power { p, num, den } => {
                num.push_weight(ln_lam + *p * ln_x);
                den.push_weight(ln_lam);
            }
            PrefixMean::Geometric(acc) => acc.push(ln_lam, ln_x),
            PrefixMean::Extreme { max, value } => {
                if ln_lam > f64::NEG_INFINITY {
                    *value = if value.is_nan() {
                        ln_x
                    } else if *max {
                        value.max(ln_x)
                    } else {
                        value.min(ln_x)
                    };
                }
            }
            PrefixMean::Gini { p, q, a, b } => {
                a.push_weight(ln_lam + *p * ln_x);
                b.push_weight(ln_lam + *q * ln_x);
            }
            PrefixMean::GiniDiagonal { p, acc } => acc.push(ln_lam + *p * ln_x, ln_x),
            PrefixMean::Recompute { ln_x: xs, ln_lam: lams, .. } => {
                xs.push(ln_x);
                lams.push(ln_lam);
            }
        }
    }

    /// `ln M` of the current prefix.
    fn ln_value(&self) -> Result<f64, EmpiricalError> {
        Ok(match self {
            PrefixMean::Power { p, num, den } => (num.ln_total() - den.ln_total()) / p,
            PrefixMean::Geometric(acc) => acc.weighted_mean(),
            PrefixMean::Extreme { value, .. } => *value,
            PrefixMean::Gini { p, q, a, b } => (a.ln_total() - b.ln_total()) / (p - q),
            PrefixMean::GiniDiagonal { acc, .. } => acc.weighted_mean(),
            PrefixMean::Recompute { spec, ln_x, ln_lam } => {
                let shift = ln_lam.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let lam: Vec<f64> = ln_lam.iter().map(|l| (l - shift).exp()).collect();
                let x: Vec<f64> = ln_x.iter().map(|l| l.exp()).collect();
                spec.eval(&x, &lam)?.ln()
            }
        })
    }

    fn cheap(&self) -> bool {
        !matches!(self, PrefixMean::Recompute { .. })
    }
}

/// `(sum_{n<=N} lambda_n M(x_1..x_n)) / (sum_{n<=N} lambda_n x_n)`, a lower
/// bound on the weighted Hardy constant for every positive `x`.
pub fn hardy_ratio(spec: &MeanSpec, w: &WeightSequence, x: &SequenceRule, n: usize) -> Result<f64, EmpiricalError> {
    if n == 0 {
        return Err(EmpiricalError::DomainError("N must be at least 1".into()));
    }
    let ln_x = x.ln_values(w, n)?;
    ratio_of_ln(spec, w, &ln_x)
}

fn ratio_of_ln(spec: &MeanSpec, w: &WeightSequence, ln_x: &[f64]) -> Result<f64, EmpiricalError> {
    let mut prefix = PrefixMean::new(spec);
    let mut num = LogWeightedSum::new();
    let mut den = LogWeightedSum::new();
    for (i, &lx) in ln_x.iter().enumerate() {
        let ln_lam = w.ln_lambda(i + 1);
        prefix.push(ln_lam, lx);
        if ln_lam == f64::NEG_INFINITY {
            continue;
        }
        num.push_weight(ln_lam + prefix.ln_value()?);
        den.push_weight(ln_lam + lx);
    }
    Ok((num.ln_total() - den.ln_total()).exp())
}

/// About 20 log-spaced indices per decade up to `n`, plus 10 evenly spaced
/// indices in `[n/2, n]`.
pub fn trace_grid(n: usize) -> Vec<usize> {
    let mut grid = Vec::new();
    if n == 0 {
        return grid;
    }
    let decades = (n as f64).log10();
    let steps = (20.0 * decades).ceil() as usize;
    for j in 0..=steps {
        let k = 10f64.powf(j as f64 / 20.0).round() as usize;
        if (1..=n).contains(&k) {
            grid.push(k);
        }
    }
    let half = (n / 2).max(1);
    for j in 0..10 {
        grid.push(half + (n - half) * j / 9);
    }
    grid.push(n);
    grid.sort_unstable();
    grid.dedup();
    grid
}

/// The witness trace `n -> (Lambda_n / y) M((y/Lambda_1, .., y/Lambda_n), lambda)`
/// on [`trace_grid`]. Its tail infimum is a lower estimate of the weighted
/// Hardy constant.
pub fn est_lower_bound(spec: &MeanSpec, w: &WeightSequence, y: f64, n: usize) -> Result<EmpiricalTrace, EmpiricalError> {
    if !(y > 0.0 && y.is_finite()) {
        return Err(EmpiricalError::DomainError(format!("y must be positive, got {y}")));
    }
    if n == 0 {
        return Err(EmpiricalError::DomainError("N must be at least 1".into()));
    }
    if let WeightKind::Explicit { tail: TailRule::Zero, .. } = w.kind() {
        return Err(EmpiricalError::DomainError("weights with a zero tail have a bounded prefix sum".into()));
    }
    let grid = trace_grid(n);
    let mut prefix = PrefixMean::new(spec);
    let mut points = Vec::with_capacity(grid.len());
    let mut next = grid.iter().peekable();
    let mut stored: Vec<(f64, f64)> = Vec::new();
    for k in 1..=n {
        let ln_cap = w.ln_prefix_sum(k);
        let ln_x = y.ln() - ln_cap;
        if prefix.cheap() {
            prefix.push(w.ln_lambda(k), ln_x);
        } else {
            stored.push((w.ln_lambda(k), ln_x));
        }
        if next.peek() == Some(&&k) {
            next.next();
            if !prefix.cheap() {
                for (l, x) in stored.drain(..) {
                    prefix.push(l, x);
                }
            }
            let value = (ln_cap - y.ln() + prefix.ln_value()?).exp();
            points.push((k, value));
        }
    }
    Ok(EmpiricalTrace { points, label: "est_lower_bound".into(), meta: format!("weights={w}, y={y}") })
}

/// `sum_{k<=n} (lambda_k / Lambda_n) phi(Lambda_k / Lambda_n)`.
pub fn gen_a_partial(phi: impl Fn(f64) -> f64, w: &WeightSequence, n: usize) -> f64 {
    let mut acc = CompensatedSum::new();
    for (a, b) in w.normalized_table(n) {
        if a > 0.0 {
            acc.add(a * phi(b));
        }
    }
    acc.value()
}

/// The probe `x -> x^-p`.
pub fn power_probe(p: f64) -> impl Fn(f64) -> f64 {
    move |x: f64| (-p * x.ln()).exp()
}

/// Limit of [`gen_a_partial`] for [`power_probe`]`(p)`: `1/(1-p)` when
/// `eta = 0`, else `eta / (1 - (1-eta)^(1-p))`.
pub fn gen_a_limit(p: f64, eta: f64) -> Result<f64, EmpiricalError> {
    if !(p < 1.0) {
        return Err(EmpiricalError::DomainError(format!("p must be < 1, got {p}")));
    }
    if !(0.0..1.0).contains(&eta) {
        return Err(EmpiricalError::DomainError(format!("eta must lie in [0, 1), got {eta}")));
    }
    if eta == 0.0 {
        return Ok(1.0 / (1.0 - p));
    }
    // 1 - (1-eta)^(1-p) = -expm1((1-p) ln(1-eta))
    Ok(eta / -((1.0 - p) * (-eta).ln_1p()).exp_m1())
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub constant: f64,
    pub trials: usize,
    pub seed: u64,
    /// Sequence lengths are uniform on `1..=max_len`.
    pub max_len: usize,
    /// The constant for unit weights; when set, symmetric monotone means
    /// must also stay below it.
    pub ones_constant: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub trials: usize,
    pub seed: u64,
    pub max_len: usize,
    pub constant: f64,
    pub ones_constant: Option<f64>,
    pub max_ratio: f64,
    pub worst_trial: usize,
    pub violations: usize,
}

/// The sequence of one trial.
pub fn trial_sequence(seed: u64, trial: usize, max_len: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    let len = rng.gen_range(1..=max_len);
    (0..len).map(|_| log_uniform(&mut rng).exp()).collect()
}

/// Checks `hardy_ratio <= constant (1 + 1e-9)` on seeded random sequences.
///
/// Trial `t` draws from the ChaCha8 stream `t` of `seed`, so the report does
/// not depend on scheduling. The first violating trial is returned with its
/// sequence.
pub fn verify_inequality(spec: &MeanSpec, w: &WeightSequence, cfg: &VerifyConfig) -> Result<VerifyReport, EmpiricalError> {
    if cfg.max_len == 0 {
        return Err(EmpiricalError::DomainError("N must be at least 1".into()));
    }
    if !(cfg.constant > 0.0) {
        return Err(EmpiricalError::DomainError(format!("constant must be positive, got {}", cfg.constant)));
    }
    let ones_bound = cfg.ones_constant.filter(|_| spec.is_symmetric_monotone());
    let bound = match ones_bound {
        Some(c1) => cfg.constant.min(c1),
        None => cfg.constant,
    } * (1.0 + VIOLATION_SLACK);
    let ratios: Vec<Result<f64, EmpiricalError>> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let x = trial_sequence(cfg.seed, t, cfg.max_len);
            let ln_x: Vec<f64> = x.iter().map(|v| v.ln()).collect();
            ratio_of_ln(spec, w, &ln_x)
        })
        .collect();
    let mut report = VerifyReport {
        trials: cfg.trials,
        seed: cfg.seed,
        max_len: cfg.max_len,
        constant: cfg.constant,
        ones_constant: cfg.ones_constant,
        max_ratio: f64::NEG_INFINITY,
        worst_trial: 0,
        violations: 0,
    };
    let mut first = None;
    for (t, r) in ratios.into_iter().enumerate() {
        let r = r?;
        if !(r <= bound) {
            report.violations += 1;
            first.get_or_insert((t, r));
        }
        if r > report.max_ratio {
            report.max_ratio = r;
            report.worst_trial = t;
        }
    }
    if let Some((trial, ratio)) = first {
        return Err(EmpiricalError::ViolationFound {
            trial,
            sequence: trial_sequence(cfg.seed, trial, cfg.max_len),
            ratio,
            bound,
        });
    }
    Ok(report)
}
