use slfvs_core::dual::*;
use slfvs_core::events::EventKind;
use slfvs_core::events::ReproductionEvent;
use slfvs_core::model::RadiusMeasure;
use slfvs_core::rng::{stream, StreamTag};
use slfvs_core::ModelParams;
use slfvs_core::SimError;

fn event(kind: EventKind) -> ReproductionEvent {
    ReproductionEvent {
        id: 0,
        time: 1.0,
        center: 0.0,
        radius: 0.2,
        kind,
    }
}

#[test]
fn forward_rules() {
    let e = event(EventKind::Selective {
        west: -0.1,
        east: 0.15,
    });
    assert_eq!(forward_step(Side::Right, &e), 0.15);
    assert_eq!(forward_step(Side::Left, &e), -0.1);
}

#[test]
fn backward_rules() {
    let n = event(EventKind::Neutral { parent: 0.15 });
    assert_eq!(backward_step(Side::Left, 0.1, &n), -0.2);
    assert_eq!(backward_step(Side::Right, 0.17, &n), 0.2);
    let s = event(EventKind::Selective {
        west: -0.05,
        east: 0.05,
    });
    assert_eq!(backward_step(Side::Left, 0.1, &s), 0.2);
    assert_eq!(backward_step(Side::Right, 0.1, &s), 0.2);
    assert_eq!(backward_step(Side::Right, -0.1, &s), -0.2);
    assert_eq!(backward_step(Side::Left, 0.0, &s), 0.2);
    assert_eq!(backward_step(Side::Right, 0.0, &s), -0.2);
}

#[test]
fn traces_need_full_impact() {
    let p = ModelParams::new(100, 1.0, 0.5, RadiusMeasure::delta(1.0).unwrap(), 1).unwrap();
    let rng = stream(1, StreamTag::Forward, 0);
    assert!(matches!(
        trace_forward_extremal(Side::Right, 0.0, 0.0, 1.0, &p, rng.clone()),
        Err(SimError::Unsupported(_))
    ));
    assert!(trace_backward_extremal(Side::Right, 0.0, 1.0, 1.0, &p, rng).is_err());
}

#[test]
fn neutral_traces_coincide() {
    let p = ModelParams::new(100, 0.0, 1.0, RadiusMeasure::delta(1.0).unwrap(), 1).unwrap();
    let l = trace_forward_extremal(
        Side::Left,
        0.0,
        0.0,
        1.0,
        &p,
        stream(1, StreamTag::Forward, 3),
    )
    .unwrap();
    let r = trace_forward_extremal(
        Side::Right,
        0.0,
        0.0,
        1.0,
        &p,
        stream(1, StreamTag::Forward, 3),
    )
    .unwrap();
    assert_eq!(l.path, r.path);
}

#[test]
fn backward_pair_meets_under_neutral_dynamics_too() {
    let p = ModelParams::new(100, 0.0, 1.0, RadiusMeasure::delta(1.0).unwrap(), 1).unwrap();
    let t = backward_pair_meeting(0.05, 50.0, &p, stream(1, StreamTag::Backward, 0)).unwrap();
    assert!(t.is_some());
}

#[test]
fn backward_trace_layout() {
    let p = ModelParams::new(100, 1.0, 1.0, RadiusMeasure::delta(1.0).unwrap(), 1).unwrap();
    let b = trace_backward_extremal(
        Side::Left,
        0.3,
        2.0,
        1.0,
        &p,
        stream(1, StreamTag::Backward, 0),
    )
    .unwrap();
    assert!(b.path.is_left_continuous());
    assert_eq!(b.path.sigma(), 1.0);
    assert_eq!(b.path.end(), 2.0);
    assert_eq!(b.path.value(2.0), Some(0.3));
    assert_eq!(b.path.value(1.0), Some(b.end_position()));
    for st in &b.steps {
        assert!(st.delta().abs() <= 2.0 * st.radius);
    }
}
