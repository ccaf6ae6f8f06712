use slfvs_core::experiments::ExperimentName;
use slfvs_core::experiments::*;

#[test]
fn battery_has_twenty_distinct_cases() {
    let b = duality_battery().unwrap();
    assert_eq!(b.len(), 20);
    let mut labels: Vec<_> = b.iter().map(|c| c.label.clone()).collect();
    labels.sort();
    labels.dedup();
    assert_eq!(labels.len(), 20);
}

#[test]
fn simulate_emits_genealogy() {
    let mut spec = ExperimentSpec::defaults(ExperimentName::Simulate);
    spec.points = vec![0.0, 0.5];
    spec.horizon = 0.2;
    let t = run_simulate(&spec).unwrap();
    assert!(!t.rows.is_empty());
    assert_eq!(t.attachments.len(), 2);
    let g: serde_json::Value = serde_json::from_str(&t.attachments[0].contents).unwrap();
    assert!(g["nodes"].as_array().unwrap().len() >= 2);
    assert!(t.attachments[1]
        .contents
        .starts_with("t,x,rho,kind,z1,z2\n"));
}

#[test]
fn nearby_needs_a_sweep() {
    let mut spec = ExperimentSpec::defaults(ExperimentName::NearbyScaling);
    spec.ns = vec![100];
    assert!(run_nearby_scaling(&spec).is_err());
}
