use slfvs_core::experiments::*;
use slfvs_core::SimError;

#[test]
fn names_round_trip() {
    for n in ExperimentName::ALL {
        assert_eq!(n.as_str().parse::<ExperimentName>().unwrap(), n);
        let json = serde_json::to_string(&n).unwrap();
        assert_eq!(json, format!("\"{}\"", n.as_str()));
    }
    assert!(matches!(
        "nope".parse::<ExperimentName>(),
        Err(SimError::UnknownExperiment(_))
    ));
}

#[test]
fn defaults_validate() {
    for n in ExperimentName::ALL {
        ExperimentSpec::defaults(n).validate().unwrap();
    }
}

#[test]
fn validation_rejects_bad_sweeps() {
    let mut s = ExperimentSpec::defaults(ExperimentName::PuCurve);
    s.upsilons.push(0.0);
    assert!(s.validate().is_err());
    let mut s = ExperimentSpec::defaults(ExperimentName::Duality);
    s.replicates = 0;
    assert!(s.validate().is_err());
}
