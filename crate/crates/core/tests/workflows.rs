use std::io::Write;

use hardy_core::empirical::{est_lower_bound, hardy_ratio, verify_inequality, SequenceRule, VerifyConfig};
use hardy_core::family::{MeanFamily, MethodChoice};
use hardy_core::hardy::{series_bounds, series_value};
use hardy_core::numerics::TanhSinh;
use hardy_core::{GeneratorFunction, WeightSequence};

#[test]
fn family_constant_bounds_its_own_fuzzing() {
    let geo = WeightSequence::geometric(2.0).unwrap();
    let eta = geo.profile(400).unwrap().eta().unwrap();
    for text in ["power:p=0.5", "gini:p=0.5,q=-0.5", "devmean:f=log", "qa:g=pow:-1"] {
        let fam: MeanFamily = text.parse().unwrap();
        let c = fam.constant(eta, MethodChoice::Auto).unwrap();
        let cfg = VerifyConfig { constant: c.value, trials: 40, seed: 5, max_len: 25, ones_constant: None };
        let report = verify_inequality(&fam.mean_spec(), &geo, &cfg).unwrap();
        assert!(report.max_ratio <= c.value, "{text}");
    }
}

#[test]
fn witness_trace_approaches_family_constant_from_below() {
    let geo = WeightSequence::geometric(3.0).unwrap();
    let fam: MeanFamily = "power:p=-1".parse().unwrap();
    let c = fam.constant(2.0 / 3.0, MethodChoice::Closed).unwrap().value;
    let trace = est_lower_bound(&fam.mean_spec(), &geo, 1.0, 200).unwrap();
    let tail = trace.tail_inf();
    assert!(tail <= c * (1.0 + 1e-12));
    assert!((tail - c).abs() < 1e-6 * c, "{tail} vs {c}");
}

#[test]
fn explicit_weights_from_file_drive_the_ratio() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "# three weights, then the last repeats").unwrap();
    writeln!(file, "1\n2\n4").unwrap();
    let w = WeightSequence::parse(&format!("explicit:file={}", file.path().display())).unwrap();
    assert_eq!(w.lambda(10), 4.0);
    let r = hardy_ratio(&"power:p=1".parse::<MeanFamily>().unwrap().mean_spec(), &w, &SequenceRule::Constant(2.0), 6)
        .unwrap();
    assert!((r - 1.0).abs() < 1e-15);
}

/// With phi(t) = f(1/(c t)) the series is `F(1/c, q) = sum q^k phi(q^k)`.
/// The integral bounds hold with limits `1/q` and `1`; moving them to `1`
/// and `q` does not give valid bounds.
#[test]
fn series_integral_bounds_need_the_right_limits() {
    let f = GeneratorFunction::log();
    let (c, q) = (2.0f64, 0.5f64);
    let s = series_value(&f, 1.0 / c, q, 1e-14).unwrap();
    assert!(s.partial.abs() < 1e-12);
    let (lo, hi) = series_bounds(&f, 1.0 / c, q);
    assert!(lo <= s.partial && s.partial <= hi);

    let quad = TanhSinh::with_tolerances(1e-13, 1e-12);
    let phi = |t: f64| f.eval(1.0 / (c * t));
    let shifted_lower = q / (1.0 - q) * quad.integrate(phi, 0.0, 1.0).value;
    // (q/(1-q)) int_0^1 ln(1/(2t)) dt = 1 - ln 2 > 0 = F
    assert!((shifted_lower - (1.0 - 2f64.ln())).abs() < 1e-10);
    assert!(shifted_lower > s.partial);
}
