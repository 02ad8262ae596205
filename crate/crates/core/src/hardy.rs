//! Sharp weighted Hardy constants.
//!
//! Closed forms cover power means ([`classical_constant`], [`power_constant`])
//! and Gini means ([`gini_constant`]). For a homogeneous deviation mean `E_f`
//! with concave `f`, the constant is the root `c` of the characteristic
//! equation, solved by [`solve_characteristic`]:
//!
//! * `eta = 0`: `int_0^1 f(1/(c x)) dx = 0`, handled as
//!   `int_0^c f(1/u) du = 0`;
//! * `eta > 0`: `F(1/c, 1 - eta) = 0` with
//!   `F(x, q) = sum_{k>=0} q^k f(q^-k x)` ([`series_value`]).
//!
//! An infinite constant is reported as `f64::INFINITY`, never as an overflow.

use serde::Serialize;
use thiserror::Error;

use crate::means::{log_grid, GeneratorFunction};
use crate::numerics::quad::TanhSinh;
use crate::numerics::roots::{brent_from, expand_upward, RootError, DEFAULT_MAX_ITER};
use crate::numerics::CompensatedSum;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HardyError {
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("series tail bound {bound:e} still above tolerance after {terms} terms")]
    TailBoundFailure { terms: usize, bound: f64 },
    #[error("f(1/x) is not declared integrable on (0, 1]")]
    NotIntegrable,
    #[error("no sign change of the characteristic function below c = {limit:e}")]
    NoBracket { limit: f64 },
    #[error("root finding failed: {0}")]
    RootFailure(String),
    #[error("derivative not available at x = {x}")]
    DerivativeUnavailable { x: f64 },
    #[error("first derivative vanishes at x = {x}")]
    ZeroDerivative { x: f64 },
    #[error("limit of chi_f at 0+ not detected; probes {probes:?}")]
    LimitNotDetected { probes: Vec<(f64, f64)> },
    #[error("limit of chi_f at 0+ is {p} >= 1; the constant is infinite")]
    PGeqOne { p: f64 },
    #[error("chi_f({x}) = {chi} exceeds its limit {p} at 0+")]
    ChiAboveLimit { x: f64, chi: f64, p: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstantMethod {
    ClosedForm,
    RootSolvedIntegral,
    RootSolvedSeries,
}

impl ConstantMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            ConstantMethod::ClosedForm => "closed_form",
            ConstantMethod::RootSolvedIntegral => "root_solved_integral",
            ConstantMethod::RootSolvedSeries => "root_solved_series",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HardyConstantResult {
    /// The constant, or `f64::INFINITY` when the mean is not Hardy.
    pub value: f64,
    pub method: ConstantMethod,
    /// Characteristic function at `value`; zero for closed forms.
    pub residual: f64,
    /// An interval containing the exact root; degenerate for closed forms.
    pub bracket: (f64, f64),
    pub eta: f64,
}

impl HardyConstantResult {
    pub fn closed(value: f64, eta: f64) -> Self {
        Self { value, method: ConstantMethod::ClosedForm, residual: 0.0, bracket: (value, value), eta }
    }

    pub fn infinite(method: ConstantMethod, eta: f64) -> Self {
        Self {
            value: f64::INFINITY,
            method,
            residual: 0.0,
            bracket: (f64::INFINITY, f64::INFINITY),
            eta,
        }
    }

    pub fn is_infinite(&self) -> bool {
        self.value == f64::INFINITY
    }
}

fn check_eta(eta: f64) -> Result<(), HardyError> {
    if (0.0..1.0).contains(&eta) {
        Ok(())
    } else {
        Err(HardyError::DomainError(format!("eta must lie in [0, 1), got {eta}")))
    }
}

/// The unweighted constant: `1` at `-inf`, `(1-p)^(-1/p)` on `(-inf, 1)`,
/// `e` at `0`, infinite on `[1, inf]`.
pub fn classical_constant(p: f64) -> f64 {
    if p.is_nan() {
        f64::NAN
    } else if p == f64::NEG_INFINITY {
        1.0
    } else if p >= 1.0 {
        f64::INFINITY
    } else if p == 0.0 {
        std::f64::consts::E
    } else {
        (-(-p).ln_1p() / p).exp()
    }
}

/// `C(r, eta)` for `r < 1`, `eta` in `[0, 1)`:
///
/// * `eta > 0, r != 0`: `(eta / (1 - (1-eta)^(1-r)))^(1/r)`
/// * `eta > 0, r = 0`: `(1-eta)^(1 - 1/eta)`
/// * `eta = 0, r != 0`: `(1-r)^(-1/r)`
/// * `eta = 0, r = 0`: `e`
///
/// `r = -inf` gives the limit `1`.
pub fn power_constant(r: f64, eta: f64) -> Result<f64, HardyError> {
    check_eta(eta)?;
    if r.is_nan() || r >= 1.0 {
        return Err(HardyError::DomainError(format!("r must be < 1, got {r}")));
    }
    if r == f64::NEG_INFINITY {
        return Ok(1.0);
    }
    if eta == 0.0 {
        return Ok(classical_constant(r));
    }
    let l = (-eta).ln_1p(); // ln(1 - eta)
    if r == 0.0 {
        return Ok(((1.0 - 1.0 / eta) * l).exp());
    }
    // (1 - (1-eta)^(1-r)) / eta = 1 - (1-eta) expm1(-r l) / eta, which keeps
    // the r -> 0 limit free of cancellation
    let ratio = -(1.0 - eta) * (-r * l).exp_m1() / eta;
    Ok((-ratio.ln_1p() / r).exp())
}

/// The Gini-mean constant for `min(p,q) <= 0 <= max(p,q) < 1`:
///
/// * `eta > 0, p != q`: `((1 - (1-eta)^(1-q)) / (1 - (1-eta)^(1-p)))^(1/(p-q))`
/// * `eta = 0, p != q`: `((1-q) / (1-p))^(1/(p-q))`
/// * `p = q = 0`: `C(0, eta)`
///
/// Symmetric in `(p, q)`, and equal to `C(p, eta)` when `q = 0`.
pub fn gini_constant(p: f64, q: f64, eta: f64) -> Result<f64, HardyError> {
    check_eta(eta)?;
    let (hi, lo) = (p.max(q), p.min(q));
    if !(lo <= 0.0 && 0.0 <= hi && hi < 1.0) || lo.is_nan() || hi.is_nan() {
        return Err(HardyError::DomainError(format!(
            "Gini parameters need min(p,q) <= 0 <= max(p,q) < 1, got ({p}, {q})"
        )));
    }
    if lo == 0.0 {
        return power_constant(hi, eta);
    }
    if hi == 0.0 {
        return power_constant(lo, eta);
    }
    if lo == f64::NEG_INFINITY {
        return Err(HardyError::DomainError("Gini parameters must be finite".into()));
    }
    let d = hi - lo;
    let ln_c = if eta == 0.0 {
        // ln((1-lo)/(1-hi)) / (hi - lo)
        (d / (1.0 - hi)).ln_1p() / d
    } else {
        // num/den with num = -expm1((1-lo) l), den = -expm1((1-hi) l)
        let l = (-eta).ln_1p();
        let a = (1.0 - hi) * l;
        (a.exp() * (d * l).exp_m1() / a.exp_m1()).ln_1p() / d
    };
    Ok(ln_c.exp())
}

/// A truncated evaluation of `F(x, q)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesEval {
    /// `sum_{k < terms_used} q^k f(q^-k x)`.
    pub partial: f64,
    /// Upper bound on the omitted (nonnegative) tail.
    pub tail_bound: f64,
    pub terms_used: usize,
}

impl SeriesEval {
    /// Interval guaranteed to contain `F(x, q)`, up to quadrature error.
    pub fn enclosure(&self) -> (f64, f64) {
        (self.partial - self.tail_bound, self.partial + self.tail_bound)
    }
}

/// Cap on the number of series terms.
pub const MAX_SERIES_TERMS: usize = 1_000_000;

fn tail_quadrature(tol: f64) -> TanhSinh {
    TanhSinh { abs_tol: (tol * 1e-3).max(1e-300), rel_tol: 1e-10, max_level: 12, min_level: 3 }
}

/// `int_0^a f(x / t) dt` split at `t = x`, where the integrand changes sign.
fn integral_f_over(f: &GeneratorFunction, x: f64, a: f64, quad: &TanhSinh) -> f64 {
    let g = |t: f64| f.eval(x / t);
    if a <= x {
        quad.integrate(g, 0.0, a).value
    } else {
        quad.integrate(g, 0.0, x).value + quad.integrate(g, x, a).value
    }
}

/// `F(x, q) = sum_{k>=0} q^k f(q^-k x)` for `x` in `(0, 1]`, `q` in `(0, 1)`.
///
/// Terms are summed until the integral bound
/// `(1/(1-q)) int_0^{q^K} f(x/t) dt` on the remaining tail drops below `tol`.
/// The bound is first tried once the terms turn positive and the cut-off
/// then grows by half each time.
pub fn series_value(f: &GeneratorFunction, x: f64, q: f64, tol: f64) -> Result<SeriesEval, HardyError> {
    if !(x > 0.0 && x <= 1.0) {
        return Err(HardyError::DomainError(format!("x must lie in (0, 1], got {x}")));
    }
    if !(q > 0.0 && q < 1.0) {
        return Err(HardyError::DomainError(format!("q must lie in (0, 1), got {q}")));
    }
    if !(tol > 0.0) {
        return Err(HardyError::DomainError(format!("tolerance must be positive, got {tol}")));
    }
    let ln_q = q.ln();
    let ln_x = x.ln();
    let quad = tail_quadrature(tol);
    let term = |k: usize| -> f64 {
        let kf = k as f64;
        (kf * ln_q).exp() * f.eval((ln_x - kf * ln_q).exp())
    };
    // first index with q^-k x > 1
    let first_positive = ((ln_x / ln_q).floor() as usize).saturating_add(1);
    let mut sum = CompensatedSum::new();
    let mut k = 0usize;
    let mut cut = first_positive.max(1);
    loop {
        while k < cut {
            let t = term(k);
            if !t.is_finite() {
                return Err(HardyError::TailBoundFailure { terms: k, bound: f64::INFINITY });
            }
            sum.add(t);
            k += 1;
        }
        let bound = integral_f_over(f, x, (cut as f64 * ln_q).exp(), &quad) / (1.0 - q);
        if !bound.is_finite() {
            return Err(HardyError::TailBoundFailure { terms: k, bound });
        }
        let bound = bound.max(0.0);
        if bound <= tol {
            return Ok(SeriesEval { partial: sum.value(), tail_bound: bound, terms_used: k });
        }
        if cut >= MAX_SERIES_TERMS {
            return Err(HardyError::TailBoundFailure { terms: k, bound });
        }
        cut = (cut + (cut / 2).max(8)).min(MAX_SERIES_TERMS);
    }
}

/// The two-sided integral bounds on `F(x, q)`:
/// `(q/(1-q)) int_0^{1/q} f(x/t) dt <= F(x, q) <= (1/(1-q)) int_0^1 f(x/t) dt`.
pub fn series_bounds(f: &GeneratorFunction, x: f64, q: f64) -> (f64, f64) {
    let quad = TanhSinh::with_tolerances(1e-13, 1e-12);
    let lower = q / (1.0 - q) * integral_f_over(f, x, 1.0 / q, &quad);
    let upper = integral_f_over(f, x, 1.0, &quad) / (1.0 - q);
    (lower, upper)
}

/// Upper end of the bracket search for the characteristic root.
pub const BRACKET_LIMIT: f64 = 1e9;
/// Absolute tolerance on the constant used by the solver by default.
pub const ROOT_XTOL: f64 = 1e-12;

/// Solves the characteristic equation of `E_f` for weights with limit ratio
/// `eta`.
///
/// The bracket starts at `(1, 2)` and doubles upward until the sign changes,
/// giving up beyond `c = 1e9`. The root is refined by Brent's method to
/// absolute tolerance `tol`.
pub fn solve_characteristic(
    f: &GeneratorFunction,
    eta: f64,
    tol: f64,
) -> Result<HardyConstantResult, HardyError> {
    check_eta(eta)?;
    if !f.declared_recip_integrable {
        return Err(HardyError::NotIntegrable);
    }
    if !(tol > 0.0) {
        return Err(HardyError::DomainError(format!("tolerance must be positive, got {tol}")));
    }
    if eta == 0.0 {
        solve_integral_form(f, tol)
    } else {
        solve_series_form(f, eta, tol)
    }
}

fn map_root_err(err: RootError) -> HardyError {
    match err {
        RootError::ExpansionExhausted { limit } => HardyError::NoBracket { limit },
        other => HardyError::RootFailure(other.to_string()),
    }
}

fn solve_integral_form(f: &GeneratorFunction, tol: f64) -> Result<HardyConstantResult, HardyError> {
    let quad = TanhSinh::with_tolerances(1e-14, 1e-14);
    let g = |u: f64| f.eval(1.0 / u);
    // int_0^1 f(1/u) du, computed once
    let head = quad.integrate(g, 0.0, 1.0).value;
    if !head.is_finite() {
        return Err(HardyError::NotIntegrable);
    }
    let big_g = |c: f64| head + quad.integrate(g, 1.0, c).value;
    let (lo, hi) = expand_upward(big_g, 1.0, 2.0, BRACKET_LIMIT).map_err(map_root_err)?;
    let root = brent_from(big_g, lo, hi, tol, DEFAULT_MAX_ITER).map_err(map_root_err)?;
    Ok(HardyConstantResult {
        value: root.x,
        method: ConstantMethod::RootSolvedIntegral,
        // int_0^1 f(1/(c x)) dx = G(c) / c
        residual: root.residual / root.x,
        bracket: root.enclosure(tol),
        eta: 0.0,
    })
}

fn solve_series_form(f: &GeneratorFunction, eta: f64, tol: f64) -> Result<HardyConstantResult, HardyError> {
    let q = 1.0 - eta;
    let series_tol = 1e-15;
    let mut failure = None;
    let mut char_fn = |c: f64| match series_value(f, 1.0 / c, q, series_tol) {
        Ok(s) => s.partial + 0.5 * s.tail_bound,
        Err(e) => {
            failure.get_or_insert(e);
            f64::NAN
        }
    };
    let bracket = expand_upward(&mut char_fn, 1.0, 2.0, BRACKET_LIMIT);
    let found = bracket.and_then(|(lo, hi)| brent_from(&mut char_fn, lo, hi, tol, DEFAULT_MAX_ITER));
    if let Some(e) = failure {
        return Err(e);
    }
    let root = found.map_err(map_root_err)?;
    Ok(HardyConstantResult {
        value: root.x,
        method: ConstantMethod::RootSolvedSeries,
        residual: root.residual,
        bracket: root.enclosure(tol),
        eta,
    })
}

/// `chi_f(x) = x f''(x) / f'(x) + 1`, from analytic derivatives when
/// available.
///
/// Otherwise `f'` is a central difference with step `1e-5 x`. A second
/// difference at that step would carry rounding noise of order
/// `eps / 1e-10`, so `f''` is taken from second differences at `1e-3 x` and
/// `5e-4 x` combined by one Richardson step.
pub fn chi(f: &GeneratorFunction, x: f64) -> Result<f64, HardyError> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(HardyError::DomainError(format!("chi needs x > 0, got {x}")));
    }
    let h = 1e-5 * x;
    let d1 = match f.d1(x) {
        Some(v) => v,
        None => (f.eval(x + h) - f.eval(x - h)) / (2.0 * h),
    };
    let d2 = match f.d2(x) {
        Some(v) => v,
        None => match (f.d1(x + h), f.d1(x - h)) {
            (Some(a), Some(b)) => (a - b) / (2.0 * h),
            _ => {
                let fx = f.eval(x);
                let second = |h: f64| (f.eval(x + h) - 2.0 * fx + f.eval(x - h)) / (h * h);
                let (coarse, fine) = (second(1e-3 * x), second(5e-4 * x));
                (4.0 * fine - coarse) / 3.0
            }
        },
    };
    if !(d1.is_finite() && d2.is_finite()) {
        return Err(HardyError::DerivativeUnavailable { x });
    }
    if d1 == 0.0 {
        return Err(HardyError::ZeroDerivative { x });
    }
    Ok(x * d2 / d1 + 1.0)
}

/// How the limit of `chi_f` at `0+` is detected.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitProbe {
    /// Probe points `10^-j` for `j = 1..=decades`.
    pub decades: u32,
    /// Successive probes must agree within this.
    pub agree_tol: f64,
    /// Number of successive probes that must agree.
    pub run: usize,
    /// If set, also check `chi_f <= p + agree_tol` on a log grid over this range.
    pub global_check: Option<(f64, f64)>,
}

impl Default for LimitProbe {
    fn default() -> Self {
        Self { decades: 12, agree_tol: 1e-6, run: 3, global_check: None }
    }
}

/// Detects `p = lim_{x->0+} chi_f(x)` and returns `C(p, eta)`.
pub fn detect_chi_limit(f: &GeneratorFunction, probe: &LimitProbe) -> Result<f64, HardyError> {
    let mut probes = Vec::with_capacity(probe.decades as usize);
    for j in 1..=probe.decades {
        let x = 10f64.powi(-(j as i32));
        let c = chi(f, x)?;
        probes.push((x, c));
        let n = probes.len();
        if n >= probe.run.max(1) {
            let window = &probes[n - probe.run.max(1)..];
            if window.windows(2).all(|w| (w[1].1 - w[0].1).abs() <= probe.agree_tol) {
                return Ok(c);
            }
        }
    }
    Err(HardyError::LimitNotDetected { probes })
}

/// The Hardy constant of the quasiarithmetic mean generated by `f`:
/// `C(p, eta)` with `p` the limit of `chi_f` at `0+`.
pub fn qa_constant(
    f: &GeneratorFunction,
    eta: f64,
    probe: &LimitProbe,
) -> Result<HardyConstantResult, HardyError> {
    check_eta(eta)?;
    let p = detect_chi_limit(f, probe)?;
    if p >= 1.0 {
        return Err(HardyError::PGeqOne { p });
    }
    if let Some((lo, hi)) = probe.global_check {
        for x in log_grid(64, lo, hi) {
            let c = chi(f, x)?;
            if c > p + probe.agree_tol {
                return Err(HardyError::ChiAboveLimit { x, chi: c, p });
            }
        }
    }
    Ok(HardyConstantResult::closed(power_constant(p, eta)?, eta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{E, LN_2};

    #[test]
    fn classical_examples() {
        assert_eq!(classical_constant(0.0), E);
        assert!((classical_constant(0.5) - 4.0).abs() < 1e-15);
        assert_eq!(classical_constant(1.0), f64::INFINITY);
        assert_eq!(classical_constant(f64::INFINITY), f64::INFINITY);
        assert_eq!(classical_constant(f64::NEG_INFINITY), 1.0);
        assert!((classical_constant(-1.0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn power_constant_examples() {
        assert!((power_constant(0.5, 0.0).unwrap() - 4.0).abs() < 1e-15);
        assert!((power_constant(0.0, 0.5).unwrap() - 2.0).abs() < 1e-15);
        let want = (0.5 / (1.0 - 0.5f64.sqrt())).powi(2);
        assert!((power_constant(0.5, 0.5).unwrap() - want).abs() < 1e-13);
        assert!((want - 2.914213562).abs() < 1e-9);
        assert!(power_constant(1.0, 0.0).is_err());
        assert!(power_constant(0.5, 1.0).is_err());
        assert!(power_constant(0.5, -0.1).is_err());
    }

    #[test]
    fn power_constant_continuity() {
        for eta in [0.0, 0.1, 0.5, 0.9] {
            let at_zero = power_constant(0.0, eta).unwrap();
            for r in [1e-6, -1e-6] {
                assert!((power_constant(r, eta).unwrap() - at_zero).abs() < 1e-5);
            }
        }
        for r in [-2.0, -0.5, 0.0, 0.5, 0.9] {
            let a = power_constant(r, 1e-6).unwrap();
            let b = power_constant(r, 0.0).unwrap();
            assert!((a - b).abs() <= 1e-4, "r={r}: {a} vs {b}");
        }
    }

    #[test]
    fn gini_constant_examples() {
        assert_eq!(gini_constant(0.0, 0.0, 0.0).unwrap(), E);
        assert!((gini_constant(0.5, -0.5, 0.0).unwrap() - 3.0).abs() < 1e-14);
        assert!((gini_constant(0.0, -1.0, 0.0).unwrap() - 2.0).abs() < 1e-15);
        // (1 - 0.5^1.5) / (1 - 0.5^0.5)
        let want = (1.0 - 0.5f64.powf(1.5)) / (1.0 - 0.5f64.sqrt());
        assert!((gini_constant(0.5, -0.5, 0.5).unwrap() - want).abs() < 1e-14);
        assert!(gini_constant(0.5, 0.25, 0.0).is_err());
        assert!(gini_constant(1.0, -1.0, 0.0).is_err());
    }

    #[test]
    fn series_examples() {
        let ln = GeneratorFunction::log();
        let s = series_value(&ln, 1.0, 0.5, 1e-14).unwrap();
        assert!((s.partial - 2.0 * LN_2).abs() < 1e-13, "{s:?}");
        let s = series_value(&ln, 0.5, 0.5, 1e-14).unwrap();
        assert!(s.partial.abs() < 1e-13, "{s:?}");
        let bad = GeneratorFunction::custom("u - 1", |u| u - 1.0);
        let err = series_value(&bad, 1.0, 0.5, 1e-10).unwrap_err();
        assert!(matches!(err, HardyError::TailBoundFailure { .. }), "{err:?}");
    }

    #[test]
    fn series_matches_closed_form_for_gini() {
        // sum q^k ((q^-k x)^p - (q^-k x)^r)/(p - r) has a closed form
        let (p, r) = (0.5f64, -0.5f64);
        let f = GeneratorFunction::gini(p, r);
        for (x, q) in [(0.3f64, 0.5f64), (0.9, 0.2), (0.05, 0.8)] {
            let want = (x.powf(p) / (1.0 - q.powf(1.0 - p)) - x.powf(r) / (1.0 - q.powf(1.0 - r))) / (p - r);
            let s = series_value(&f, x, q, 1e-13).unwrap();
            assert!((s.partial - want).abs() < 1e-11, "x={x} q={q}: {} vs {want}", s.partial);
        }
    }

    #[test]
    fn characteristic_examples() {
        let ln = GeneratorFunction::log();
        let r = solve_characteristic(&ln, 0.0, ROOT_XTOL).unwrap();
        assert!((r.value - E).abs() < 1e-10, "{r:?}");
        assert!(r.bracket.0 < r.value && r.value < r.bracket.1);
        let r = solve_characteristic(&GeneratorFunction::power_deviation(0.5), 0.0, ROOT_XTOL).unwrap();
        assert!((r.value - 4.0).abs() < 1e-10, "{r:?}");
        let r = solve_characteristic(&GeneratorFunction::gini(0.5, -0.5), 0.5, ROOT_XTOL).unwrap();
        let want = gini_constant(0.5, -0.5, 0.5).unwrap();
        assert!((r.value - want).abs() < 1e-10, "{r:?} vs {want}");
        assert_eq!(r.method, ConstantMethod::RootSolvedSeries);
        let r = solve_characteristic(&ln, 0.5, ROOT_XTOL).unwrap();
        assert!((r.value - 2.0).abs() < 1e-10, "{r:?}");
    }

    #[test]
    fn characteristic_errors() {
        let not_declared = GeneratorFunction::power_deviation(1.0);
        assert_eq!(solve_characteristic(&not_declared, 0.0, 1e-12), Err(HardyError::NotIntegrable));
        // declared integrable but never changes sign past c = 1
        let liar = GeneratorFunction::custom("positive", |u: f64| u.ln().max(0.0) + 1e-3)
            .recip_integrable(true);
        let err = solve_characteristic(&liar, 0.0, 1e-12).unwrap_err();
        assert!(matches!(err, HardyError::NoBracket { .. }), "{err:?}");
    }

    #[test]
    fn chi_examples() {
        let sq = GeneratorFunction::custom("x^2", |x| x * x);
        assert!((chi(&sq, 3.0).unwrap() - 2.0).abs() < 1e-6);
        assert!(chi(&GeneratorFunction::log(), 0.7).unwrap().abs() < 1e-15);
        let root = GeneratorFunction::custom("sqrt", f64::sqrt);
        assert!((chi(&root, 7.0).unwrap() - 0.5).abs() < 1e-6);
        let flat = GeneratorFunction::custom("flat", |_| 1.0);
        assert_eq!(chi(&flat, 1.0), Err(HardyError::ZeroDerivative { x: 1.0 }));
        let nan = GeneratorFunction::custom("nan", |_| f64::NAN);
        assert!(matches!(chi(&nan, 1.0), Err(HardyError::DerivativeUnavailable { .. })));
    }

    #[test]
    fn qa_constant_examples() {
        let probe = LimitProbe::default();
        let cube_root = GeneratorFunction::custom("cbrt", f64::cbrt);
        let r = qa_constant(&cube_root, 0.0, &probe).unwrap();
        assert!((r.value - 3.375).abs() < 1e-6, "{r:?}");
        let r = qa_constant(&GeneratorFunction::log(), 0.5, &probe).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12);
        assert!(matches!(
            qa_constant(&GeneratorFunction::exp(), 0.0, &probe),
            Err(HardyError::PGeqOne { .. })
        ));
        // chi = 2x/(1+2x) + 1 -> 1 at 0+
        let poly = GeneratorFunction::custom("x+x^2", |x| x + x * x);
        assert!(matches!(qa_constant(&poly, 0.0, &probe), Err(HardyError::PGeqOne { .. })));
        // ln x + x: chi = x/(1+x) tends to 0 at 0+ but is positive everywhere
        let mixed = GeneratorFunction::custom("ln+x", |x: f64| x.ln() + x);
        let strict = LimitProbe { global_check: Some((1e-6, 1e6)), ..LimitProbe::default() };
        assert!(qa_constant(&mixed, 0.0, &LimitProbe::default()).is_ok());
        assert!(matches!(qa_constant(&mixed, 0.0, &strict), Err(HardyError::ChiAboveLimit { .. })));
    }

    #[test]
    fn limit_not_detected_for_oscillating_chi() {
        // chi = 1/2 + 0.3 sin(ln x) style behaviour never settles
        let wobble = GeneratorFunction::custom("wobble", |x: f64| x.sqrt() * (2.0 + (x.ln()).sin()));
        assert!(matches!(
            detect_chi_limit(&wobble, &LimitProbe::default()),
            Err(HardyError::LimitNotDetected { .. })
        ));
    }

    proptest! {
        #[test]
        fn power_constant_increasing_in_r(a in -5.0f64..0.99, b in -5.0f64..0.99, eta in 0.0f64..0.95) {
            prop_assume!((a - b).abs() > 1e-6);
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assert!(power_constant(lo, eta).unwrap() < power_constant(hi, eta).unwrap());
        }

        #[test]
        fn gini_constant_symmetric_and_reduces(p in -3.0f64..0.0, q in 0.0f64..0.99, eta in 0.0f64..0.95) {
            prop_assert_eq!(gini_constant(p, q, eta).unwrap(), gini_constant(q, p, eta).unwrap());
            prop_assert_eq!(gini_constant(q, 0.0, eta).unwrap(), power_constant(q, eta).unwrap());
            prop_assert_eq!(gini_constant(0.0, p, eta).unwrap(), power_constant(p, eta).unwrap());
        }

        #[test]
        fn gini_constant_factorizes(p in -3.0f64..-0.05, q in 0.05f64..0.95, eta in 0.0f64..0.95) {
            let g = gini_constant(p, q, eta).unwrap();
            let cp = power_constant(p, eta).unwrap();
            let cq = power_constant(q, eta).unwrap();
            let prod = (p / (p - q) * cp.ln() + q / (q - p) * cq.ln()).exp();
            prop_assert!((g - prod).abs() < 1e-12 * g, "{g} vs {prod}");
        }
    }
}
