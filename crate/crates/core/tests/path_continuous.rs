use slfvs_core::events::EventKind;
use slfvs_core::events::ReproductionEvent;
use slfvs_core::path::*;
use slfvs_core::SimError;

fn ev(t: f64, x: f64, r: f64) -> ReproductionEvent {
    ReproductionEvent {
        id: 0,
        time: t,
        center: x,
        radius: r,
        kind: EventKind::Neutral { parent: x },
    }
}

#[test]
fn jump_free_path_is_unchanged() {
    let f = CadlagPath::constant(0.0, 1.5).unwrap();
    let p = interpolate(&f, &MarginMap::default()).unwrap();
    assert_eq!(p.value(0.0), Some(1.5));
    assert_eq!(p.value(10.0), Some(1.5));
}

#[test]
fn single_jump_ramps_inside_margin() {
    let f = CadlagPath::new(0.0, 0.0, vec![(1.0, 2.0)]).unwrap();
    let m = MarginMap::new(vec![(1.0, 0.25)]).unwrap();
    let p = interpolate(&f, &m).unwrap();
    assert_eq!(p.value(0.75), Some(0.0));
    assert_eq!(p.value(0.875), Some(1.0));
    assert_eq!(p.value(1.0), Some(2.0));
    assert_eq!(p.value(3.0), Some(2.0));
}

#[test]
fn overlap_is_rejected() {
    let f = CadlagPath::new(0.0, 0.0, vec![(1.0, 2.0), (1.1, 3.0)]).unwrap();
    let m = MarginMap::new(vec![(1.0, 0.05), (1.1, 0.2)]).unwrap();
    assert!(matches!(
        interpolate(&f, &m),
        Err(SimError::Precondition(_))
    ));
}

#[test]
fn margins_halve_gaps_between_overlapping_events() {
    let events = [ev(1.0, 0.0, 0.5), ev(1.2, 0.9, 0.5), ev(1.05, 5.0, 0.5)];
    let m = compute_margins(&events, 1.0).unwrap();
    assert!((m.get(1.0).unwrap() - 0.1).abs() < 1e-12);
    assert!((m.get(1.2).unwrap() - 0.1).abs() < 1e-12);
    assert_eq!(m.get(1.05), Some(1.0));
}

#[test]
fn continuous_metric_basics() {
    let a = Polyline::new(vec![(0.0, 0.0), (1.0, 1.0)]).unwrap();
    assert_eq!(sup_metric_continuous(&a, &a), 0.0);
    let b = Polyline::new(vec![(0.0, 0.5), (1.0, 1.5)]).unwrap();
    let d = sup_metric_continuous(&a, &b);
    assert!(d > 0.0 && d <= 0.5);
}
