use std::fmt;
use std::sync::Arc;

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Which named family a generator belongs to.
#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorTag {
    /// `(u^p - 1) / p`, with `ln u` at `p = 0`.
    PowerDeviation(f64),
    Log,
    /// `(u^p - u^q) / (p - q)`, with `u^p ln u` at `p = q`.
    Gini(f64, f64),
    /// `u^p`, with `ln u` at `p = 0`. A quasiarithmetic generator.
    Power(f64),
    Exp,
    Identity,
    Custom(String),
}

impl fmt::Display for GeneratorTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorTag::PowerDeviation(p) => write!(f, "pow:{p}"),
            GeneratorTag::Log => write!(f, "log"),
            GeneratorTag::Gini(p, q) => write!(f, "gini:{p},{q}"),
            GeneratorTag::Power(p) => write!(f, "pow:{p}"),
            GeneratorTag::Exp => write!(f, "exp"),
            GeneratorTag::Identity => write!(f, "identity"),
            GeneratorTag::Custom(name) => write!(f, "{name}"),
        }
    }
}

/// A real function on `(0, inf)` with optional derivatives and inverse and a
/// few declared properties.
///
/// The declarations are trusted by the solvers; [`GeneratorFunction::validate`]
/// spot-checks them on a grid.
#[derive(Clone)]
pub struct GeneratorFunction {
    eval: RealFn,
    d1: Option<RealFn>,
    d2: Option<RealFn>,
    inverse: Option<RealFn>,
    pub declared_concave: bool,
    /// `sign f(x) = sign(x - 1)`.
    pub declared_sign_property: bool,
    /// `x -> f(1/x)` is integrable on `(0, 1]`.
    pub declared_recip_integrable: bool,
    pub tag: GeneratorTag,
}

impl fmt::Debug for GeneratorFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeneratorFunction")
            .field("tag", &self.tag)
            .field("concave", &self.declared_concave)
            .field("sign_property", &self.declared_sign_property)
            .field("recip_integrable", &self.declared_recip_integrable)
            .field("has_d1", &self.d1.is_some())
            .field("has_d2", &self.d2.is_some())
            .field("has_inverse", &self.inverse.is_some())
            .finish()
    }
}

const ZERO_PARAM: f64 = 1e-12;

impl GeneratorFunction {
    /// A user function with no declared properties.
    pub fn custom(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            eval: Arc::new(f),
            d1: None,
            d2: None,
            inverse: None,
            declared_concave: false,
            declared_sign_property: false,
            declared_recip_integrable: false,
            tag: GeneratorTag::Custom(name.into()),
        }
    }

    pub fn with_d1(mut self, d1: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.d1 = Some(Arc::new(d1));
        self
    }

    pub fn with_d2(mut self, d2: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.d2 = Some(Arc::new(d2));
        self
    }

    pub fn with_inverse(mut self, inv: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.inverse = Some(Arc::new(inv));
        self
    }

    pub fn concave(mut self, yes: bool) -> Self {
        self.declared_concave = yes;
        self
    }

    pub fn sign_property(mut self, yes: bool) -> Self {
        self.declared_sign_property = yes;
        self
    }

    pub fn recip_integrable(mut self, yes: bool) -> Self {
        self.declared_recip_integrable = yes;
        self
    }

    /// `(u^p - 1) / p`, or `ln u` when `p = 0`. Concave for `p <= 1`,
    /// `f(1/x)` integrable for `p < 1`.
    pub fn power_deviation(p: f64) -> Self {
        if p.abs() < ZERO_PARAM {
            let mut g = Self::log();
            g.tag = GeneratorTag::PowerDeviation(0.0);
            return g;
        }
        Self {
            eval: Arc::new(move |u: f64| (p * u.ln()).exp_m1() / p),
            d1: Some(Arc::new(move |u: f64| u.powf(p - 1.0))),
            d2: Some(Arc::new(move |u: f64| (p - 1.0) * u.powf(p - 2.0))),
            inverse: Some(Arc::new(move |y: f64| ((p * y).ln_1p() / p).exp())),
            declared_concave: p <= 1.0,
            declared_sign_property: true,
            declared_recip_integrable: p < 1.0,
            tag: GeneratorTag::PowerDeviation(p),
        }
    }

    pub fn log() -> Self {
        Self {
            eval: Arc::new(f64::ln),
            d1: Some(Arc::new(|u: f64| 1.0 / u)),
            d2: Some(Arc::new(|u: f64| -1.0 / (u * u))),
            inverse: Some(Arc::new(f64::exp)),
            declared_concave: true,
            declared_sign_property: true,
            declared_recip_integrable: true,
            tag: GeneratorTag::Log,
        }
    }

    /// `(u^p - u^q) / (p - q)`, or `u^p ln u` when `p = q`. Concave with
    /// the sign property when `min(p,q) <= 0 <= max(p,q) <= 1`.
    pub fn gini(p: f64, q: f64) -> Self {
        let (hi, lo) = (p.max(q), p.min(q));
        let concave = lo <= 0.0 && 0.0 <= hi && hi <= 1.0;
        if hi - lo < ZERO_PARAM {
            let r = 0.5 * (hi + lo);
            return Self {
                eval: Arc::new(move |u: f64| u.powf(r) * u.ln()),
                d1: Some(Arc::new(move |u: f64| u.powf(r - 1.0) * (1.0 + r * u.ln()))),
                d2: Some(Arc::new(move |u: f64| {
                    u.powf(r - 2.0) * ((r - 1.0) * (1.0 + r * u.ln()) + r)
                })),
                inverse: None,
                declared_concave: r == 0.0,
                declared_sign_property: true,
                declared_recip_integrable: r < 1.0,
                tag: GeneratorTag::Gini(p, q),
            };
        }
        let d = hi - lo;
        Self {
            eval: Arc::new(move |u: f64| {
                let l = u.ln();
                if (d * l).abs() < 1.0 {
                    // u^lo (u^d - 1) / d, free of cancellation near u = 1
                    (lo * l).exp() * (d * l).exp_m1() / d
                } else {
                    ((hi * l).exp() - (lo * l).exp()) / d
                }
            }),
            d1: Some(Arc::new(move |u: f64| (hi * u.powf(hi - 1.0) - lo * u.powf(lo - 1.0)) / d)),
            d2: Some(Arc::new(move |u: f64| {
                (hi * (hi - 1.0) * u.powf(hi - 2.0) - lo * (lo - 1.0) * u.powf(lo - 2.0)) / d
            })),
            inverse: None,
            declared_concave: concave,
            declared_sign_property: true,
            declared_recip_integrable: hi < 1.0,
            tag: GeneratorTag::Gini(p, q),
        }
    }

    /// `u^p`, or `ln u` when `p = 0`. Generates the power mean as a
    /// quasiarithmetic mean.
    pub fn power(p: f64) -> Self {
        if p.abs() < ZERO_PARAM {
            let mut g = Self::log();
            g.tag = GeneratorTag::Power(0.0);
            g.declared_sign_property = false;
            g.declared_recip_integrable = false;
            g.declared_concave = false;
            return g;
        }
        Self {
            eval: Arc::new(move |u: f64| u.powf(p)),
            d1: Some(Arc::new(move |u: f64| p * u.powf(p - 1.0))),
            d2: Some(Arc::new(move |u: f64| p * (p - 1.0) * u.powf(p - 2.0))),
            inverse: Some(Arc::new(move |y: f64| y.powf(1.0 / p))),
            declared_concave: false,
            declared_sign_property: false,
            declared_recip_integrable: false,
            tag: GeneratorTag::Power(p),
        }
    }

    pub fn exp() -> Self {
        Self {
            eval: Arc::new(f64::exp),
            d1: Some(Arc::new(f64::exp)),
            d2: Some(Arc::new(f64::exp)),
            inverse: Some(Arc::new(f64::ln)),
            declared_concave: false,
            declared_sign_property: false,
            declared_recip_integrable: false,
            tag: GeneratorTag::Exp,
        }
    }

    pub fn identity() -> Self {
        Self {
            eval: Arc::new(|u| u),
            d1: Some(Arc::new(|_| 1.0)),
            d2: Some(Arc::new(|_| 0.0)),
            inverse: Some(Arc::new(|y| y)),
            declared_concave: false,
            declared_sign_property: false,
            declared_recip_integrable: false,
            tag: GeneratorTag::Identity,
        }
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    pub fn d1(&self, x: f64) -> Option<f64> {
        self.d1.as_ref().map(|d| d(x))
    }

    pub fn d2(&self, x: f64) -> Option<f64> {
        self.d2.as_ref().map(|d| d(x))
    }

    pub fn inverse(&self, y: f64) -> Option<f64> {
        self.inverse.as_ref().map(|g| g(y))
    }

    pub fn has_inverse(&self) -> bool {
        self.inverse.is_some()
    }

    pub(crate) fn eval_fn(&self) -> RealFn {
        Arc::clone(&self.eval)
    }

    /// Spot-checks the declared properties on a 64-point log-uniform grid
    /// over `[1e-3, 1e3]`.
    pub fn validate(&self) -> ValidationReport {
        let grid = log_grid(64, 1e-3, 1e3);
        let mut problems = Vec::new();
        if self.declared_sign_property {
            let at_one = self.eval(1.0);
            if at_one.abs() > 1e-12 {
                problems.push(format!("f(1) = {at_one}, expected 0"));
            }
            for &x in &grid {
                let v = self.eval(x);
                let want = (x - 1.0).signum();
                if !(v.is_finite() && (v.signum() == want || v == 0.0 && x == 1.0)) {
                    problems.push(format!("sign of f({x}) = {v} disagrees with sign(x - 1)"));
                }
            }
        }
        if self.declared_concave {
            for stride in [1usize, 4, 16] {
                for i in 0..grid.len().saturating_sub(stride) {
                    let (a, b) = (grid[i], grid[i + stride]);
                    let (fa, fb) = (self.eval(a), self.eval(b));
                    let mid = self.eval(0.5 * (a + b));
                    let slack = 1e-9 * (fa.abs() + fb.abs()).max(1.0);
                    if mid + slack < 0.5 * (fa + fb) {
                        problems.push(format!("midpoint concavity fails on [{a}, {b}]"));
                    }
                }
            }
        }
        ValidationReport { problems }
    }
}

/// Outcome of a sampled property check; empty means no counterexample was found.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub problems: Vec<String>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.problems.is_empty()
    }
}

/// `n` points spaced evenly in `ln` between `lo` and `hi`, inclusive.
pub fn log_grid(n: usize, lo: f64, hi: f64) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_generators_validate() {
        for g in [
            GeneratorFunction::log(),
            GeneratorFunction::power_deviation(0.5),
            GeneratorFunction::power_deviation(-2.0),
            GeneratorFunction::gini(0.5, -0.5),
            GeneratorFunction::gini(0.0, 0.0),
            GeneratorFunction::gini(-1.0, 0.9),
        ] {
            let report = g.validate();
            assert!(report.is_ok(), "{:?}: {:?}", g.tag, report.problems);
        }
    }

    #[test]
    fn validate_catches_false_declarations() {
        let liar = GeneratorFunction::custom("square", |u| u * u).concave(true).sign_property(true);
        let report = liar.validate();
        assert!(!report.is_ok());
        assert!(report.problems.iter().any(|p| p.contains("f(1)")));
        assert!(report.problems.iter().any(|p| p.contains("concavity")));
    }

    #[test]
    fn power_deviation_near_one_is_accurate() {
        let g = GeneratorFunction::power_deviation(0.5);
        let u = 1.0 + 1e-10;
        // u - 1 is exact; (u^p - 1)/p = d - (1 - p) d^2 / 2 + O(d^3)
        let d = u - 1.0;
        assert!((g.eval(u) - (d - 0.25 * d * d)).abs() < 1e-25);
        assert!((g.inverse(g.eval(3.0)).unwrap() - 3.0).abs() < 1e-15);
    }

    #[test]
    fn gini_generator_matches_formula() {
        let g = GeneratorFunction::gini(0.5, -0.5);
        for u in [0.1f64, 0.7, 1.0, 2.0, 9.0] {
            let want: f64 = (u.sqrt() - 1.0 / u.sqrt()) / 1.0;
            assert!((g.eval(u) - want).abs() < 1e-14 * want.abs().max(1.0));
            let d1: f64 = (0.5 / u.sqrt() + 0.5 * u.powf(-1.5)) / 1.0;
            assert!((g.d1(u).unwrap() - d1).abs() < 1e-14 * d1);
        }
        // symmetric in (p, q)
        assert_eq!(GeneratorFunction::gini(-0.5, 0.5).eval(3.0), g.eval(3.0));
    }

    #[test]
    fn log_grid_endpoints() {
        let g = log_grid(64, 1e-3, 1e3);
        assert_eq!(g.len(), 64);
        assert!((g[0] - 1e-3).abs() < 1e-18);
        assert!((g[63] - 1e3).abs() < 1e-10);
    }
}
