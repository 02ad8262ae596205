//! Weight sequences `lambda_1, lambda_2, ...` with `lambda_1 > 0` and
//! `lambda_n >= 0`, their prefix sums `Lambda_n`, and a profiler for the
//! limit of `lambda_n / Lambda_n`.
//!
//! Prefix sums are cached on first use behind a mutex, so a
//! [`WeightSequence`] can be shared between threads. The cache keeps both the
//! linear compensated sum and `ln Lambda_n`; the log column stays finite after
//! the linear one overflows (geometric weights pass `f64::MAX` near `n = 1024`
//! for base 2), and every ratio accessor falls back to it.

use std::fmt;
use std::path::Path;
use std::sync::Mutex;

use thiserror::Error;

use crate::numerics::CompensatedSum;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WeightsError {
    #[error("invalid weight parameter: {0}")]
    InvalidParameter(String),
    #[error("profile horizon must be at least 100, got {0}")]
    HorizonTooShort(usize),
    #[error("inconclusive profile: {0}")]
    InconclusiveProfile(String),
    #[error("cannot parse weight spec `{spec}`: {reason}")]
    Parse { spec: String, reason: String },
    #[error("cannot read weights file {path}: {reason}")]
    Io { path: String, reason: String },
}

/// How an explicit list continues past its last entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailRule {
    /// Repeat the final value forever.
    RepeatLast,
    /// All further weights are zero (finite support, convergent `Lambda_n`).
    Zero,
    /// Continue geometrically: `last * r^j` for the `j`-th extra term.
    Geometric(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum WeightKind {
    Ones,
    /// `lambda_n = a^(n-1)` with `a > 1`.
    Geometric(f64),
    /// `lambda_n = n^alpha` with `alpha >= 0`.
    PowerLaw(f64),
    Explicit { values: Vec<f64>, tail: TailRule },
}

#[derive(Debug, Default)]
struct PrefixCache {
    acc: CompensatedSum,
    linear: Vec<f64>,
    log: Vec<f64>,
}

pub struct WeightSequence {
    kind: WeightKind,
    cache: Mutex<PrefixCache>,
}

impl Clone for WeightSequence {
    fn clone(&self) -> Self {
        Self::from_kind(self.kind.clone())
    }
}

impl fmt::Debug for WeightSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightSequence").field("kind", &self.kind).finish()
    }
}

impl PartialEq for WeightSequence {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl WeightSequence {
    fn from_kind(kind: WeightKind) -> Self {
        Self { kind, cache: Mutex::new(PrefixCache::default()) }
    }

    pub fn ones() -> Self {
        Self::from_kind(WeightKind::Ones)
    }

    pub fn geometric(base: f64) -> Result<Self, WeightsError> {
        if !(base.is_finite() && base > 1.0) {
            return Err(WeightsError::InvalidParameter(format!(
                "geometric base must be a finite number > 1, got {base}"
            )));
        }
        Ok(Self::from_kind(WeightKind::Geometric(base)))
    }

    pub fn power_law(alpha: f64) -> Result<Self, WeightsError> {
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(WeightsError::InvalidParameter(format!(
                "power-law exponent must be finite and >= 0, got {alpha}"
            )));
        }
        Ok(Self::from_kind(WeightKind::PowerLaw(alpha)))
    }

    pub fn explicit(values: Vec<f64>, tail: TailRule) -> Result<Self, WeightsError> {
        match values.first() {
            None => {
                return Err(WeightsError::InvalidParameter("explicit weight list is empty".into()))
            }
            Some(&first) if !(first > 0.0 && first.is_finite()) => {
                return Err(WeightsError::InvalidParameter(format!(
                    "first weight must be positive, got {first}"
                )))
            }
            _ => {}
        }
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v >= 0.0)) {
            return Err(WeightsError::InvalidParameter(format!(
                "weight #{} must be finite and nonnegative, got {v}",
                i + 1
            )));
        }
        if let TailRule::Geometric(r) = tail {
            if !(r.is_finite() && r > 0.0) {
                return Err(WeightsError::InvalidParameter(format!(
                    "geometric tail ratio must be positive, got {r}"
                )));
            }
        }
        Ok(Self::from_kind(WeightKind::Explicit { values, tail }))
    }

    /// Reads one weight per line; blank lines and `#` comments are skipped.
    /// The list is continued by repeating its final value.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, WeightsError> {
        let path = path.as_ref();
        let io_err = |reason: String| WeightsError::Io { path: path.display().to_string(), reason };
        let text = std::fs::read_to_string(path).map_err(|e| io_err(e.to_string()))?;
        let mut values = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let v: f64 = line
                .parse()
                .map_err(|_| io_err(format!("line {}: `{line}` is not a number", lineno + 1)))?;
            values.push(v);
        }
        Self::explicit(values, TailRule::RepeatLast)
    }

    /// Parses `ones`, `geometric:a=<real>`, `powerlaw:alpha=<real>` or
    /// `explicit:file=<path>`.
    pub fn parse(spec: &str) -> Result<Self, WeightsError> {
        let bad = |reason: &str| WeightsError::Parse { spec: spec.to_string(), reason: reason.to_string() };
        let spec_t = spec.trim();
        let (head, rest) = match spec_t.split_once(':') {
            Some((h, r)) => (h, Some(r)),
            None => (spec_t, None),
        };
        let param = |key: &str| -> Result<&str, WeightsError> {
            let rest = rest.ok_or_else(|| bad(&format!("missing `{key}=` parameter")))?;
            rest.strip_prefix(key)
                .and_then(|r| r.strip_prefix('='))
                .ok_or_else(|| bad(&format!("expected `{key}=<value>`")))
        };
        let number = |s: &str| -> Result<f64, WeightsError> {
            s.trim().parse::<f64>().map_err(|_| bad(&format!("`{s}` is not a number")))
        };
        match head {
            "ones" if rest.is_none() => Ok(Self::ones()),
            "ones" => Err(bad("`ones` takes no parameters")),
            "geometric" => Self::geometric(number(param("a")?)?),
            "powerlaw" => Self::power_law(number(param("alpha")?)?),
            "explicit" => Self::from_file(param("file")?),
            _ => Err(bad("unknown weight kind (expected ones, geometric, powerlaw or explicit)")),
        }
    }

    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    /// `lambda_n` for `n >= 1`.
    pub fn lambda(&self, n: usize) -> f64 {
        assert!(n >= 1, "weights are indexed from 1");
        match &self.kind {
            WeightKind::Ones => 1.0,
            WeightKind::Geometric(a) => a.powf((n - 1) as f64),
            WeightKind::PowerLaw(alpha) => (n as f64).powf(*alpha),
            WeightKind::Explicit { values, tail } => {
                if n <= values.len() {
                    return values[n - 1];
                }
                let last = *values.last().expect("explicit weights are nonempty");
                match tail {
                    TailRule::RepeatLast => last,
                    TailRule::Zero => 0.0,
                    TailRule::Geometric(r) => last * r.powf((n - values.len()) as f64),
                }
            }
        }
    }

    /// `ln lambda_n`; negative infinity for zero weights.
    pub fn ln_lambda(&self, n: usize) -> f64 {
        assert!(n >= 1, "weights are indexed from 1");
        match &self.kind {
            WeightKind::Ones => 0.0,
            WeightKind::Geometric(a) => (n - 1) as f64 * a.ln(),
            WeightKind::PowerLaw(alpha) => alpha * (n as f64).ln(),
            WeightKind::Explicit { values, tail } => {
                if n <= values.len() {
                    return values[n - 1].ln();
                }
                let last = values.last().expect("explicit weights are nonempty").ln();
                match tail {
                    TailRule::RepeatLast => last,
                    TailRule::Zero => f64::NEG_INFINITY,
                    TailRule::Geometric(r) => last + (n - values.len()) as f64 * r.ln(),
                }
            }
        }
    }

    fn ensure(&self, n: usize) -> std::sync::MutexGuard<'_, PrefixCache> {
        let mut cache = self.cache.lock().unwrap_or_else(|p| p.into_inner());
        let have = cache.linear.len();
        if have < n {
            cache.linear.reserve(n - have);
            cache.log.reserve(n - have);
            for k in have + 1..=n {
                let lam = self.lambda(k);
                cache.acc.add(lam);
                let lin = cache.acc.value();
                let ln = if lin.is_finite() {
                    lin.ln()
                } else {
                    let prev = cache.log[k - 2];
                    prev + (self.ln_lambda(k) - prev).exp().ln_1p()
                };
                cache.linear.push(lin);
                cache.log.push(ln);
            }
        }
        cache
    }

    /// `Lambda_n = lambda_1 + ... + lambda_n`, summed with compensation.
    /// Infinite once the sum leaves the `f64` range; see [`Self::ln_prefix_sum`].
    pub fn prefix_sum(&self, n: usize) -> f64 {
        assert!(n >= 1, "weights are indexed from 1");
        self.ensure(n).linear[n - 1]
    }

    /// `ln Lambda_n`, finite for every `n`.
    pub fn ln_prefix_sum(&self, n: usize) -> f64 {
        assert!(n >= 1, "weights are indexed from 1");
        self.ensure(n).log[n - 1]
    }

    /// `lambda_n / Lambda_n`.
    pub fn ratio(&self, n: usize) -> f64 {
        self.lambda_over_prefix(n, n)
    }

    /// `lambda_k / Lambda_n`.
    pub fn lambda_over_prefix(&self, k: usize, n: usize) -> f64 {
        let cache = self.ensure(n.max(k));
        let den = cache.linear[n - 1];
        let lam = self.lambda(k);
        if den.is_finite() && lam.is_finite() {
            lam / den
        } else {
            (self.ln_lambda(k) - cache.log[n - 1]).exp()
        }
    }

    /// `Lambda_k / Lambda_n`.
    pub fn prefix_ratio(&self, k: usize, n: usize) -> f64 {
        let cache = self.ensure(n.max(k));
        let (num, den) = (cache.linear[k - 1], cache.linear[n - 1]);
        if num.is_finite() && den.is_finite() {
            num / den
        } else {
            (cache.log[k - 1] - cache.log[n - 1]).exp()
        }
    }

    /// Rows `(lambda_k / Lambda_n, Lambda_k / Lambda_n)` for `k = 1..=n`.
    pub fn normalized_table(&self, n: usize) -> Vec<(f64, f64)> {
        assert!(n >= 1, "weights are indexed from 1");
        let cache = self.ensure(n);
        let den = cache.linear[n - 1];
        let ln_den = cache.log[n - 1];
        (1..=n)
            .map(|k| {
                let lam = self.lambda(k);
                let num = cache.linear[k - 1];
                if den.is_finite() && lam.is_finite() {
                    (lam / den, num / den)
                } else {
                    (
                        (self.ln_lambda(k) - ln_den).exp(),
                        (cache.log[k - 1] - ln_den).exp(),
                    )
                }
            })
            .collect()
    }

    /// Columns `(ln lambda_k, ln Lambda_k)` for `k = 1..=n`.
    pub fn log_table(&self, n: usize) -> (Vec<f64>, Vec<f64>) {
        let cache = self.ensure(n);
        let ln_lam = (1..=n).map(|k| self.ln_lambda(k)).collect();
        (ln_lam, cache.log[..n].to_vec())
    }

    /// Limit of `lambda_n / Lambda_n` when it is known analytically.
    pub fn analytic_eta(&self) -> Option<f64> {
        match &self.kind {
            WeightKind::Ones | WeightKind::PowerLaw(_) => Some(0.0),
            WeightKind::Geometric(a) => Some((a - 1.0) / a),
            WeightKind::Explicit { tail, .. } => match tail {
                TailRule::RepeatLast | TailRule::Zero => Some(0.0),
                TailRule::Geometric(r) if *r > 1.0 => Some((r - 1.0) / r),
                TailRule::Geometric(_) => Some(0.0),
            },
        }
    }

    /// Profiles the first `horizon` terms.
    ///
    /// The limit `eta` is the average of `lambda_n / Lambda_n` over the last
    /// quarter of the horizon when that window is flat (spread below
    /// [`ETA_WINDOW_TOL`]). A window that is not flat but moves monotonically
    /// is treated as a trend `eta + c/n` and extrapolated from its endpoints.
    /// Anything else is inconclusive.
    pub fn profile(&self, horizon: usize) -> Result<WeightProfile, WeightsError> {
        if horizon < 100 {
            return Err(WeightsError::HorizonTooShort(horizon));
        }
        let ratios: Vec<f64> = (1..=horizon).map(|n| self.ratio(n)).collect();

        let ratio_nonincreasing = ratios.windows(2).all(|w| w[1] <= w[0] + RATIO_TIE_TOL);

        let start = horizon - horizon / 4;
        let window = &ratios[start..];
        let (lo, hi) = window
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &r| (lo.min(r), hi.max(r)));
        let raw_eta = if hi - lo < ETA_WINDOW_TOL {
            window.iter().sum::<f64>() / window.len() as f64
        } else {
            let falling = window.windows(2).all(|w| w[1] <= w[0] + RATIO_TIE_TOL);
            let rising = window.windows(2).all(|w| w[1] >= w[0] - RATIO_TIE_TOL);
            if !(falling || rising) {
                return Err(WeightsError::InconclusiveProfile(format!(
                    "lambda_n/Lambda_n oscillates by {:.3e} over n in ({start}, {horizon}]",
                    hi - lo
                )));
            }
            let (n1, n2) = ((start + 1) as f64, horizon as f64);
            let (r1, r2) = (window[0], window[window.len() - 1]);
            (n2 * r2 - n1 * r1) / (n2 - n1)
        };
        let eta = if raw_eta >= 1.0 - ETA_WINDOW_TOL {
            EtaEstimate::NotConvergent
        } else if raw_eta < ETA_WINDOW_TOL {
            EtaEstimate::Limit(0.0)
        } else {
            EtaEstimate::Limit(raw_eta)
        };

        // Growth of Lambda over the second half, cross-checked against the
        // partial sum of lambda_n / Lambda_n over the same range.
        let mid = horizon / 2;
        let growth = self.ln_prefix_sum(horizon) - self.ln_prefix_sum(mid);
        let series_tail: f64 = ratios[mid..].iter().sum();
        let by_growth = growth > DIVERGENCE_TOL;
        let by_series = series_tail > DIVERGENCE_TOL;
        if by_growth != by_series {
            return Err(WeightsError::InconclusiveProfile(format!(
                "growth of Lambda ({growth:.3e}) and the tail of sum lambda_n/Lambda_n \
                 ({series_tail:.3e}) disagree on divergence"
            )));
        }

        Ok(WeightProfile { eta, ratio_nonincreasing, lambda_divergent: by_growth, horizon })
    }
}

/// Spread allowed over the profiling window for `eta` to count as settled.
pub const ETA_WINDOW_TOL: f64 = 1e-6;
/// Ties allowed when checking that `lambda_n / Lambda_n` is nonincreasing.
pub const RATIO_TIE_TOL: f64 = 1e-14;
/// Minimum `ln(Lambda_H / Lambda_{H/2})` for `Lambda_n` to count as divergent.
pub const DIVERGENCE_TOL: f64 = 1e-6;

impl fmt::Display for WeightSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            WeightKind::Ones => write!(f, "ones"),
            WeightKind::Geometric(a) => write!(f, "geometric:a={a}"),
            WeightKind::PowerLaw(alpha) => write!(f, "powerlaw:alpha={alpha}"),
            WeightKind::Explicit { values, .. } => write!(f, "explicit:{}-values", values.len()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EtaEstimate {
    Limit(f64),
    NotConvergent,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightProfile {
    pub eta: EtaEstimate,
    pub ratio_nonincreasing: bool,
    pub lambda_divergent: bool,
    pub horizon: usize,
}

impl WeightProfile {
    pub fn eta(&self) -> Option<f64> {
        match self.eta {
            EtaEstimate::Limit(e) => Some(e),
            EtaEstimate::NotConvergent => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_examples() {
        assert_eq!(WeightSequence::ones().lambda(7), 1.0);
        assert_eq!(WeightSequence::geometric(2.0).unwrap().lambda(3), 4.0);
        assert_eq!(WeightSequence::power_law(1.0).unwrap().lambda(5), 5.0);
    }

    #[test]
    fn prefix_examples() {
        assert_eq!(WeightSequence::ones().prefix_sum(10), 10.0);
        assert_eq!(WeightSequence::geometric(2.0).unwrap().prefix_sum(3), 7.0);
        assert_eq!(WeightSequence::power_law(1.0).unwrap().prefix_sum(4), 10.0);
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(WeightSequence::geometric(1.0).is_err());
        assert!(WeightSequence::geometric(f64::NAN).is_err());
        assert!(WeightSequence::power_law(-0.5).is_err());
        assert!(WeightSequence::explicit(vec![], TailRule::RepeatLast).is_err());
        assert!(WeightSequence::explicit(vec![0.0, 1.0], TailRule::RepeatLast).is_err());
        assert!(WeightSequence::explicit(vec![1.0, -1.0], TailRule::RepeatLast).is_err());
        assert!(WeightSequence::explicit(vec![1.0], TailRule::Geometric(0.0)).is_err());
    }

    #[test]
    fn geometric_ratio_closed_form() {
        // lambda_n/Lambda_n = a^(n-1)(a-1)/(a^n-1), checked against direct summation
        for a in [1.25, 2.0, 3.0] {
            let w = WeightSequence::geometric(a).unwrap();
            for n in 1..60usize {
                let direct: f64 = (1..=n).map(|k| a.powi(k as i32 - 1)).sum();
                let closed = a.powi(n as i32 - 1) * (a - 1.0) / (a.powi(n as i32) - 1.0);
                assert!((w.ratio(n) - closed).abs() < 1e-14);
                assert!((w.prefix_sum(n) - direct).abs() <= 1e-14 * direct);
            }
        }
    }

    #[test]
    fn log_prefix_survives_overflow() {
        let w = WeightSequence::geometric(2.0).unwrap();
        let n = 5_000;
        assert!(w.prefix_sum(n).is_infinite());
        // ln(2^n - 1) = n ln 2 to double precision
        let want = n as f64 * std::f64::consts::LN_2;
        assert!((w.ln_prefix_sum(n) - want).abs() < 1e-9 * want);
        assert!((w.ratio(n) - 0.5).abs() < 1e-12);
        assert!((w.prefix_ratio(n - 1, n) - 0.5).abs() < 1e-12);
        let table = w.normalized_table(n);
        assert!((table[n - 2].0 - 0.25).abs() < 1e-12);
    }

    #[test]
    fn explicit_tails() {
        let rep = WeightSequence::explicit(vec![1.0, 3.0], TailRule::RepeatLast).unwrap();
        assert_eq!(rep.lambda(10), 3.0);
        assert_eq!(rep.prefix_sum(4), 10.0);
        let zero = WeightSequence::explicit(vec![1.0, 3.0], TailRule::Zero).unwrap();
        assert_eq!(zero.lambda(3), 0.0);
        assert_eq!(zero.ln_lambda(3), f64::NEG_INFINITY);
        assert_eq!(zero.prefix_sum(100), 4.0);
        let geo = WeightSequence::explicit(vec![1.0, 4.0], TailRule::Geometric(0.5)).unwrap();
        assert_eq!(geo.lambda(4), 1.0);
    }

    #[test]
    fn profile_ones() {
        let p = WeightSequence::ones().profile(10_000).unwrap();
        assert_eq!(p.eta(), Some(0.0));
        assert!(p.ratio_nonincreasing);
        assert!(p.lambda_divergent);
    }

    #[test]
    fn profile_geometric() {
        // oracle: (a-1)/a
        let p = WeightSequence::geometric(2.0).unwrap().profile(200).unwrap();
        assert!((p.eta().unwrap() - 0.5).abs() < 1e-12);
        assert!(p.ratio_nonincreasing);
        assert!(p.lambda_divergent);
        let p = WeightSequence::geometric(1.25).unwrap().profile(500).unwrap();
        assert!((p.eta().unwrap() - 0.2).abs() < 1e-12);
    }

    #[test]
    fn profile_powerlaw_trend_extrapolates_to_zero() {
        let p = WeightSequence::power_law(1.5).unwrap().profile(4_000).unwrap();
        assert_eq!(p.eta(), Some(0.0));
        assert!(p.lambda_divergent);
    }

    #[test]
    fn profile_convergent_weights() {
        // lambda_n = 2^-(n-1): Lambda_n and sum lambda_n/Lambda_n both converge
        let w = WeightSequence::explicit(vec![1.0], TailRule::Geometric(0.5)).unwrap();
        let p = w.profile(400).unwrap();
        assert!(!p.lambda_divergent);
        assert_eq!(p.eta(), Some(0.0));
        let w = WeightSequence::explicit(vec![1.0, 2.0], TailRule::Zero).unwrap();
        assert!(!w.profile(100).unwrap().lambda_divergent);
    }

    #[test]
    fn profile_oscillating_is_inconclusive() {
        let mut values = Vec::new();
        for k in 0..1_000 {
            values.push(if k % 2 == 0 { 1.0 } else { 1e6 });
        }
        let w = WeightSequence::explicit(values, TailRule::RepeatLast).unwrap();
        // past the list the weights are constant, so look inside it
        let err = w.profile(800).unwrap_err();
        assert!(matches!(err, WeightsError::InconclusiveProfile(_)));
        assert!(WeightSequence::ones().profile(99).is_err());
    }

    #[test]
    fn parse_specs() {
        assert_eq!(WeightSequence::parse("ones").unwrap(), WeightSequence::ones());
        assert_eq!(
            WeightSequence::parse("geometric:a=2").unwrap(),
            WeightSequence::geometric(2.0).unwrap()
        );
        assert_eq!(
            WeightSequence::parse("powerlaw:alpha=0.5").unwrap(),
            WeightSequence::power_law(0.5).unwrap()
        );
        for bad in ["", "ones:a=1", "geometric", "geometric:b=2", "geometric:a=x", "zeros"] {
            assert!(WeightSequence::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn parse_explicit_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("w.txt");
        std::fs::write(&path, "# weights\n1\n2.5\n\n0.5\n").unwrap();
        let w = WeightSequence::parse(&format!("explicit:file={}", path.display())).unwrap();
        assert_eq!(w.prefix_sum(5), 1.0 + 2.5 + 0.5 + 0.5 + 0.5);
        std::fs::write(&path, "1\nabc\n").unwrap();
        assert!(WeightSequence::from_file(&path).is_err());
    }
}
