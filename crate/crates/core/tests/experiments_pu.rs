use slfvs_core::experiments::ExperimentName;
use slfvs_core::experiments::*;

#[test]
fn sweep_ends_at_one() {
    let s = default_upsilon_sweep(20);
    assert_eq!(s.len(), 20);
    assert_eq!(s[0], 0.05);
    assert_eq!(s[19], 1.0);
}

#[test]
fn small_curve_is_deterministic_across_workers() {
    let mut spec = ExperimentSpec::defaults(ExperimentName::PuCurve);
    spec.params.n = 100;
    spec.replicates = 20;
    spec.upsilons = vec![0.5, 1.0];
    spec.workers = Some(1);
    let a = run_pu_curve(&spec).unwrap();
    spec.workers = Some(3);
    let b = run_pu_curve(&spec).unwrap();
    assert_eq!(a.to_csv(), b.to_csv());
    assert_eq!(a.rows.len(), 2);
    assert!(a.outcome.is_ok());
}
