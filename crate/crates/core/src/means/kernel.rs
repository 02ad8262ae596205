use std::fmt;
use std::sync::Arc;

use super::generator::{log_grid, GeneratorFunction, GeneratorTag, RealFn, ValidationReport};

pub type KernelFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, PartialEq)]
pub enum KernelTag {
    /// `x - y`.
    Difference,
    /// `f(x / y)`.
    Homogeneous(GeneratorTag),
    /// `g(x) - g(y)`, oriented so the sign property holds.
    QuasiArithmetic(GeneratorTag),
    /// `E(x, y) / (-d2 E(y, y))` of the wrapped kernel.
    Normalized(Box<KernelTag>),
    Custom(String),
}

/// A quasideviation `E(x, y)` on `(0, inf)^2`: `sign E(x, y) = sign(x - y)`,
/// continuous in `y`, with `t -> E(y, t) / E(x, t)` strictly increasing
/// between `x` and `y`.
#[derive(Clone)]
pub struct QuasideviationKernel {
    eval: KernelFn,
    d2_diag: Option<RealFn>,
    pub tag: KernelTag,
}

impl fmt::Debug for QuasideviationKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QuasideviationKernel")
            .field("tag", &self.tag)
            .field("has_d2_diag", &self.d2_diag.is_some())
            .finish()
    }
}

impl QuasideviationKernel {
    pub fn new(name: impl Into<String>, e: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self { eval: Arc::new(e), d2_diag: None, tag: KernelTag::Custom(name.into()) }
    }

    pub(crate) fn from_parts(eval: KernelFn, d2_diag: Option<RealFn>, tag: KernelTag) -> Self {
        Self { eval, d2_diag, tag }
    }

    /// Supplies `y -> d2 E(y, y)` analytically.
    pub fn with_d2_diag(mut self, d: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.d2_diag = Some(Arc::new(d));
        self
    }

    pub fn difference() -> Self {
        Self {
            eval: Arc::new(|x, y| x - y),
            d2_diag: Some(Arc::new(|_| -1.0)),
            tag: KernelTag::Difference,
        }
    }

    /// `E(x, y) = f(x / y)`; `d2 E(y, y) = -f'(1) / y` when `f'` is known.
    pub fn homogeneous(f: &GeneratorFunction) -> Self {
        let eval = f.eval_fn();
        let d2_diag: Option<RealFn> = f.d1(1.0).map(|slope| -> RealFn {
            Arc::new(move |y: f64| -slope / y)
        });
        Self {
            eval: Arc::new(move |x, y| eval(x / y)),
            d2_diag,
            tag: KernelTag::Homogeneous(f.tag.clone()),
        }
    }

    /// `E(x, y) = g(x) - g(y)` for increasing `g`, `g(y) - g(x)` for
    /// decreasing `g`. Its quasideviation mean is the quasiarithmetic mean of `g`.
    pub fn quasi_arithmetic(g: &GeneratorFunction) -> Self {
        let increasing = g.eval(2.0) > g.eval(1.0);
        let s = if increasing { 1.0 } else { -1.0 };
        let eval = g.eval_fn();
        let d2_diag: Option<RealFn> = if g.d1(1.0).is_some() {
            let g2 = g.clone();
            Some(Arc::new(move |y: f64| -s * g2.d1(y).unwrap_or(f64::NAN)))
        } else {
            None
        };
        Self {
            eval: Arc::new(move |x, y| s * (eval(x) - eval(y))),
            d2_diag,
            tag: KernelTag::QuasiArithmetic(g.tag.clone()),
        }
    }

    #[inline]
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        (self.eval)(x, y)
    }

    pub fn has_analytic_d2_diag(&self) -> bool {
        self.d2_diag.is_some()
    }

    /// `d2 E(y, y)`, analytically if available, else by a central difference
    /// with step `1e-6 * y`.
    pub fn d2_diag(&self, y: f64) -> f64 {
        match &self.d2_diag {
            Some(d) => d(y),
            None => self.d2_diag_numeric(y),
        }
    }

    /// The finite-difference estimate, regardless of any analytic derivative.
    pub fn d2_diag_numeric(&self, y: f64) -> f64 {
        let h = 1e-6 * y;
        (self.eval(y, y + h) - self.eval(y, y - h)) / (2.0 * h)
    }

    /// Samples the sign property on pairs from a 64-point log grid over
    /// `[1e-3, 1e3]`, and looks for jumps in `y -> E(x, y)` on a finer
    /// grid around a few anchors.
    pub fn validate(&self) -> ValidationReport {
        let grid = log_grid(64, 1e-3, 1e3);
        let mut problems = Vec::new();
        for (i, &x) in grid.iter().enumerate() {
            for &y in grid.iter().skip(i % 3).step_by(3) {
                let v = self.eval(x, y);
                let want = if x == y { 0.0 } else { (x - y).signum() };
                let ok = if want == 0.0 { v == 0.0 } else { v.signum() == want && v != 0.0 };
                if !ok {
                    problems.push(format!("sign of E({x}, {y}) = {v} disagrees with sign(x - y)"));
                }
            }
        }
        for &x in &[1e-2, 1.0, 1e2] {
            let fine = log_grid(2001, x / 10.0, x * 10.0);
            let vals: Vec<f64> = fine.iter().map(|&y| self.eval(x, y)).collect();
            let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let diffs: Vec<f64> = vals.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
            // a step shows up as one difference dwarfing both neighbours
            let jump = diffs.windows(3).any(|d| {
                !d[1].is_finite() || d[1] > 50.0 * (d[0] + d[2]) + 1e-12 * scale
            });
            if jump {
                problems.push(format!("possible jump in y -> E({x}, y)"));
            }
        }
        ValidationReport { problems }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn homogeneous_diagonal_derivative() {
        let k = QuasideviationKernel::homogeneous(&GeneratorFunction::log());
        for y in [0.5, 1.0, 4.0] {
            assert!((k.d2_diag(y) + 1.0 / y).abs() < 1e-15);
            assert!((k.d2_diag_numeric(y) + 1.0 / y).abs() < 1e-8);
        }
    }

    #[test]
    fn quasi_arithmetic_orientation() {
        // x^-1 is decreasing, the kernel must still have the sign property
        let k = QuasideviationKernel::quasi_arithmetic(&GeneratorFunction::power(-1.0));
        assert!(k.eval(2.0, 1.0) > 0.0);
        assert!(k.eval(1.0, 2.0) < 0.0);
        assert!(k.validate().is_ok());
        assert!(k.d2_diag(2.0) < 0.0);
    }

    #[test]
    fn validate_flags_bad_kernel() {
        let k = QuasideviationKernel::new("backwards", |x, y| y - x);
        assert!(!k.validate().is_ok());
        let jump = QuasideviationKernel::new("jump", |x, y| if y > 3.0 { 100.0 * (x - y) } else { x - y });
        assert!(!jump.validate().is_ok());
        assert!(QuasideviationKernel::difference().validate().is_ok());
    }
}
