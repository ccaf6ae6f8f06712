use slfvs_core::experiments::ExperimentName;
use slfvs_core::experiments::*;
use slfvs_core::model::RadiusMeasure;
use slfvs_core::ModelParams;

#[test]
fn samelaw_collects_the_requested_counts() {
    let p = ModelParams::new(100, 1.0, 1.0, RadiusMeasure::delta(1.0).unwrap(), 3).unwrap();
    let j = samelaw_jumps(&p, 50, 1.0, Some(1)).unwrap();
    assert_eq!(j.forward_neutral.len(), 50);
    assert_eq!(j.backward_selective.len(), 50);
    let j0 = samelaw_jumps(&p.with_alpha(0.0).unwrap(), 50, 1.0, Some(1)).unwrap();
    assert!(j0.forward_selective.is_empty());
}

#[test]
fn a_few_trials_are_clean_and_faults_fire() {
    let mut spec = ExperimentSpec::defaults(ExperimentName::NetDiagnostics);
    spec.replicates = 20;
    spec.workers = Some(1);
    let t = run_diagnostics(&spec).unwrap();
    assert!(t.outcome.is_ok(), "{:?}", t.summary);
    assert_eq!(t.summary["faults_injected"], t.summary["faults_detected"]);
    assert!(t.summary["faults_injected"].as_u64().unwrap() >= 20);
}

#[test]
fn diagnostics_refuse_partial_impact() {
    let mut spec = ExperimentSpec::defaults(ExperimentName::NetDiagnostics);
    spec.params.upsilon = 0.5;
    assert!(run_diagnostics(&spec).is_err());
}
