//! Bracketed scalar root finding.
//!
//! [`brent`] keeps a sign-change interval at every step and only accepts an
//! inverse-quadratic or secant step when it lands inside the interval and
//! shrinks it fast enough; otherwise it bisects. Convergence is therefore
//! never worse than bisection.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RootError {
    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    #[error("function returned a non-finite value at x = {x}")]
    NonFinite { x: f64 },
    #[error("no sign change found while expanding the bracket up to {limit}")]
    ExpansionExhausted { limit: f64 },
    #[error("iteration cap reached with bracket [{lo}, {hi}]")]
    MaxIterations { lo: f64, hi: f64 },
}

/// A converged root together with the last sign-change interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    /// Function value at `x`.
    pub residual: f64,
    /// Interval `[lo, hi]` known to contain a sign change; `x` is one of
    /// its endpoints or the exact zero.
    pub bracket: (f64, f64),
    pub iterations: usize,
}

impl Root {
    /// Interval centred on `x` that contains the true root.
    pub fn enclosure(&self, xtol: f64) -> (f64, f64) {
        let (lo, hi) = self.bracket;
        let half = (hi - lo).abs().max(xtol).max(f64::EPSILON * self.x.abs());
        (self.x - half, self.x + half)
    }
}

pub const DEFAULT_MAX_ITER: usize = 200;

fn checked<F: FnMut(f64) -> f64>(f: &mut F, x: f64) -> Result<f64, RootError> {
    let v = f(x);
    if v.is_nan() {
        Err(RootError::NonFinite { x })
    } else {
        Ok(v)
    }
}

/// Brent's method on `[lo, hi]` with absolute tolerance `xtol` on the root.
pub fn brent<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    xtol: f64,
    max_iter: usize,
) -> Result<Root, RootError> {
    let f_lo = checked(&mut f, lo)?;
    let f_hi = checked(&mut f, hi)?;
    brent_from(f, (lo, f_lo), (hi, f_hi), xtol, max_iter)
}

/// Same as [`brent`] when the endpoint values are already known.
pub fn brent_from<F: FnMut(f64) -> f64>(
    mut f: F,
    (lo, f_lo): (f64, f64),
    (hi, f_hi): (f64, f64),
    xtol: f64,
    max_iter: usize,
) -> Result<Root, RootError> {
    if f_lo == 0.0 {
        return Ok(Root { x: lo, residual: 0.0, bracket: (lo, lo), iterations: 0 });
    }
    if f_hi == 0.0 {
        return Ok(Root { x: hi, residual: 0.0, bracket: (hi, hi), iterations: 0 });
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(RootError::NoSignChange { lo, hi, f_lo, f_hi });
    }

    let (mut a, mut fa) = (lo, f_lo);
    let (mut b, mut fb) = (hi, f_hi);
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;

    for iter in 1..=max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }

        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(Root {
                x: b,
                residual: fb,
                bracket: (b.min(c), b.max(c)),
                iterations: iter,
            });
        }

        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                // secant
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                // inverse quadratic interpolation
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }

        a = b;
        fa = fb;
        if d.abs() > tol1 {
            b += d;
        } else {
            b += tol1.copysign(xm);
        }
        fb = checked(&mut f, b)?;
    }
    Err(RootError::MaxIterations { lo: b.min(c), hi: b.max(c) })
}

/// Doubles the upper end of `[lo, hi]` until `f` changes sign, giving up
/// once `hi` would exceed `limit`. Returns the bracketing endpoints with their
/// function values.
pub fn expand_upward<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    limit: f64,
) -> Result<((f64, f64), (f64, f64)), RootError> {
    let f_lo = checked(&mut f, lo)?;
    if f_lo == 0.0 {
        return Ok(((lo, f_lo), (lo, f_lo)));
    }
    let mut a = lo;
    let mut fa = f_lo;
    let mut b = hi;
    loop {
        let fb = checked(&mut f, b)?;
        if fb == 0.0 || fb.signum() != f_lo.signum() {
            return Ok(((a, fa), (b, fb)));
        }
        a = b;
        fa = fb;
        b *= 2.0;
        if b > limit {
            return Err(RootError::ExpansionExhausted { limit });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_sqrt_two() {
        let r = brent(|x| x * x - 2.0, 0.0, 2.0, 1e-15, DEFAULT_MAX_ITER).unwrap();
        assert!((r.x - 2f64.sqrt()).abs() < 1e-15);
        let (lo, hi) = r.bracket;
        assert!(lo <= r.x && r.x <= hi);
    }

    #[test]
    fn converges_on_steep_and_flat_functions() {
        // From the classic zero-finder test set.
        let cases: [(fn(f64) -> f64, f64, f64, f64); 4] = [
            (|x| x.sin() - 0.5 * x, std::f64::consts::FRAC_PI_2, std::f64::consts::PI, 1.895_494_267_033_981),
            (|x| 2.0 * x - (-x).exp(), -1.0, 1.0, 0.351_733_711_249_195_8),
            (|x| x * (-x).exp(), -1.0, 0.5, 0.0),
            (|x| (x - 1.0).powi(3), 0.0, 3.0, 1.0),
        ];
        for (f, a, b, want) in cases {
            let r = brent(f, a, b, 1e-14, DEFAULT_MAX_ITER).unwrap();
            assert!((r.x - want).abs() < 1e-6, "got {} want {}", r.x, want);
        }
    }

    #[test]
    fn reports_missing_sign_change() {
        let err = brent(|x| x * x + 1.0, -1.0, 1.0, 1e-12, 50).unwrap_err();
        assert!(matches!(err, RootError::NoSignChange { .. }));
    }

    #[test]
    fn exact_zero_at_endpoint() {
        let r = brent(|x| x - 1.0, 1.0, 3.0, 1e-12, 50).unwrap();
        assert_eq!(r.x, 1.0);
        assert_eq!(r.iterations, 0);
    }

    #[test]
    fn expansion_finds_far_root() {
        let ((a, fa), (b, fb)) = expand_upward(|x| 1000.0 - x, 1.0, 2.0, 1e9).unwrap();
        assert!(fa > 0.0 && fb < 0.0);
        assert_eq!((a, b), (512.0, 1024.0));
        let err = expand_upward(|x| x, 1.0, 2.0, 1e3).unwrap_err();
        assert!(matches!(err, RootError::ExpansionExhausted { .. }));
    }

    #[test]
    fn enclosure_is_centred() {
        let r = brent(|x| x - 0.3, 0.0, 1.0, 1e-10, 100).unwrap();
        let (lo, hi) = r.enclosure(1e-10);
        assert!(lo < r.x && r.x < hi);
        assert!(lo <= 0.3 && 0.3 <= hi);
    }
}
