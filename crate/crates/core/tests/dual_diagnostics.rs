use slfvs_core::dual::*;
use slfvs_core::path::CadlagPath;
use slfvs_core::SimError;

fn step(sigma: f64, v0: f64, jumps: &[(f64, f64)]) -> CadlagPath {
    CadlagPath::new(sigma, v0, jumps.to_vec()).unwrap()
}

#[test]
fn simple_crossing() {
    let a = step(0.0, -1.0, &[(0.5, 1.0)]);
    let b = CadlagPath::constant(0.0, 0.0).unwrap();
    let c = detect_crossing(&a, &b);
    assert_eq!(
        c,
        vec![Crossing {
            time: 0.5,
            direction: CrossDirection::LeftToRight
        }]
    );
    assert_eq!(
        detect_crossing(&b, &a)[0].direction,
        CrossDirection::RightToLeft
    );
    assert!(detect_crossing(&a, &a).is_empty());
}

#[test]
fn touching_is_not_crossing() {
    let a = step(0.0, -1.0, &[(0.5, 0.0), (0.7, -1.0)]);
    let b = CadlagPath::constant(0.0, 0.0).unwrap();
    assert!(detect_crossing(&a, &b).is_empty());
    let through = step(0.0, -1.0, &[(0.5, 0.0), (0.7, 1.0)]);
    let c = detect_crossing(&through, &b);
    assert_eq!(c.len(), 1);
    assert_eq!(c[0].time, 0.7);
}

#[test]
fn crossing_needs_time_on_the_new_side() {
    let a = step(0.0, -1.0, &[(1.0, 1.0)]).with_end(1.0).unwrap();
    let b = CadlagPath::constant(0.0, 0.0).unwrap();
    assert!(detect_crossing(&a, &b).is_empty());
}

#[test]
fn hopping_two_paths() {
    let a = step(0.0, -1.0, &[(0.5, 1.0)]);
    let b = CadlagPath::constant(0.0, 0.0).unwrap();
    let all = hop_cross(&[a.clone(), b.clone()], 16).unwrap();
    assert_eq!(all.len(), 4);
    assert!(all.contains(&step(0.0, -1.0, &[(0.5, 0.0)])));
    assert!(all.contains(&step(0.0, 0.0, &[(0.5, 1.0)])));
    assert!(matches!(
        hop_cross(&[a, b], 3),
        Err(SimError::Budget { .. })
    ));
}

#[test]
fn no_crossings_no_new_paths() {
    let a = CadlagPath::constant(0.0, 0.0).unwrap();
    let b = step(0.0, 1.0, &[(0.3, 2.0)]);
    assert_eq!(hop_cross(&[a.clone(), b.clone()], 16).unwrap(), vec![a, b]);
}

fn backward(sigma: f64, v0: f64, jumps: &[(f64, f64)], top: f64) -> CadlagPath {
    step(sigma, v0, jumps)
        .with_end(top)
        .unwrap()
        .into_left_continuous()
}

#[test]
fn wedge_geometry() {
    // Meet at 0 before time 1, then open up to [-1, 1] on (1, 3].
    let r = backward(0.0, 0.0, &[(1.0, -1.0)], 3.0);
    let l = backward(0.0, 0.0, &[(1.0, 1.0)], 3.0);
    let w = Wedge::from_pair(&r, &l).unwrap();
    assert_eq!(w.top, 3.0);
    assert_eq!(w.bottom, 1.0);
    assert!(w.met);
    assert!(w.contains(0.0, 2.0));
    assert!(!w.contains(0.0, 1.0));
    assert!(!w.contains(1.5, 2.0));
    assert!(Wedge::from_pair(&l, &r).is_none());
}

#[test]
fn teleport_into_wedge_is_detected() {
    let r = backward(0.0, 0.0, &[(1.0, -1.0)], 3.0);
    let l = backward(0.0, 0.0, &[(1.0, 1.0)], 3.0);
    let w = Wedge::from_pair(&r, &l).unwrap();
    let outside = step(0.0, 5.0, &[(2.0, 0.0)]);
    assert_eq!(enters_wedge(&outside, &w), Some(2.0));
    // Coming up through the meeting point is an entry too.
    let through_tip = CadlagPath::constant(0.0, 0.0).unwrap();
    assert_eq!(enters_wedge(&through_tip, &w), Some(1.0));
    let along_edge = step(0.0, 0.0, &[(1.0, 1.0)]);
    assert_eq!(enters_wedge(&along_edge, &w), None);
    // Starting inside is not an entry.
    let inside = CadlagPath::constant(1.5, 0.5).unwrap();
    assert_eq!(enters_wedge(&inside, &w), None);
    assert_eq!(wedge_violations(&[outside, along_edge], &[r], &[l]), 1);
    assert_eq!(
        wedge_violations(&[CadlagPath::constant(0.0, 9.0).unwrap()], &[], &[]),
        0
    );
}
