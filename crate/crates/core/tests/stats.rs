use slfvs_core::stats::*;
use slfvs_core::SimError;

#[test]
fn summary_merge_matches_single_pass() {
    let xs: Vec<f64> = (0..100).map(|i| ((i * 37) % 101) as f64 * 0.1).collect();
    let all: Summary = xs.iter().copied().collect();
    let mut left: Summary = xs[..40].iter().copied().collect();
    let right: Summary = xs[40..].iter().copied().collect();
    left.merge(&right);
    assert_eq!(left.count, all.count);
    assert!((left.mean() - all.mean()).abs() < 1e-12);
    assert!((left.variance() - all.variance()).abs() < 1e-10);
}

#[test]
fn ks_edge_cases() {
    let a: Vec<f64> = (0..50).map(|i| i as f64).collect();
    let r = ks_two_sample(&a, &a).unwrap();
    assert_eq!(r.statistic, 0.0);
    assert_eq!(r.p_value, 1.0);
    let b: Vec<f64> = (0..50).map(|i| 100.0 + i as f64).collect();
    assert_eq!(ks_two_sample(&a, &b).unwrap().statistic, 1.0);
    assert!(matches!(
        ks_two_sample(&a[..5], &b),
        Err(SimError::SampleSize { .. })
    ));
}

#[test]
fn kolmogorov_tail_reference_points() {
    // Q(1.3581) = 0.05, Q(1.6276) = 0.01
    assert!((kolmogorov_q(1.3581) - 0.05).abs() < 1e-3);
    assert!((kolmogorov_q(1.6276) - 0.01).abs() < 1e-3);
}

#[test]
fn inverse_gaussian_basics() {
    let ig = InverseGaussian::first_passage(1.0, 4.0 / 3.0, 8.0 / 3.0).unwrap();
    assert!((ig.mean - 0.75).abs() < 1e-15);
    assert_eq!(ig.cdf(0.0), 0.0);
    assert!(ig.cdf(50.0) > 1.0 - 1e-6);
    let tiny = InverseGaussian::first_passage(1e-6, 1.0, 1.0).unwrap();
    assert!(tiny.cdf(1e-3) > 0.999);
    assert!(InverseGaussian::first_passage(1.0, 0.0, 1.0).is_err());
}

#[test]
fn inverse_gaussian_cdf_is_monotone_without_overflow() {
    let ig = InverseGaussian::new(0.01, 1e4).unwrap();
    let mut last = 0.0;
    for k in 1..400 {
        let c = ig.cdf(k as f64 * 1e-4);
        assert!(c.is_finite() && c >= last - 1e-12);
        last = c;
    }
}

#[test]
fn fit_recovers_exact_line() {
    let x = [1.0, 2.0, 3.0, 4.0];
    let y: Vec<f64> = x.iter().map(|x| 2.0 - 0.5 * x).collect();
    let f = weighted_linear_fit(&x, &y, &[1.0; 4]).unwrap();
    assert!((f.slope + 0.5).abs() < 1e-12);
    assert!((f.intercept - 2.0).abs() < 1e-12);
}
