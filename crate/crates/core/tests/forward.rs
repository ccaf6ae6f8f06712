use slfvs_core::events::EventKind;
use slfvs_core::events::ReproductionEvent;
use slfvs_core::forward::*;
use slfvs_core::model::RadiusMeasure;
use slfvs_core::rng::stream;
use slfvs_core::rng::StreamTag;
use slfvs_core::ModelParams;

fn ev(kind: EventKind) -> ReproductionEvent {
    ReproductionEvent {
        id: 0,
        time: 1.0,
        center: 0.0,
        radius: 0.5,
        kind,
    }
}

#[test]
fn profile_evaluation_and_merge() {
    let p = AlleleProfile::new(vec![0.0, 1.0], vec![1.0, 1.0, 0.0]).unwrap();
    assert_eq!(p.breakpoints(), &[1.0]);
    assert_eq!(p.value(0.999), 1.0);
    assert_eq!(p.value(1.0), 0.0);
    assert!((p.integral(-1.0, 2.0) - 2.0).abs() < 1e-12);
    assert!(AlleleProfile::new(vec![], vec![1.5]).is_err());
}

#[test]
fn constant_fields_are_fixed_points() {
    let mut rng = stream(1, StreamTag::Forward, 0);
    for c in [0.0, 1.0] {
        let mut w = AlleleProfile::constant(c).unwrap();
        apply_forward_event(
            &mut w,
            &ev(EventKind::Neutral { parent: 0.1 }),
            1.0,
            (-5.0, 5.0),
            &mut rng,
        )
        .unwrap();
        apply_forward_event(
            &mut w,
            &ev(EventKind::Selective {
                west: -0.2,
                east: 0.3,
            }),
            0.7,
            (-5.0, 5.0),
            &mut rng,
        )
        .unwrap();
        assert_eq!(w, AlleleProfile::constant(c).unwrap());
    }
}

#[test]
fn full_impact_overwrites_the_interval() {
    let mut rng = stream(1, StreamTag::Forward, 0);
    let mut w = AlleleProfile::step_down(0.2).unwrap();
    // Parent at -0.3 sits in the all-a region.
    apply_forward_event(
        &mut w,
        &ev(EventKind::Neutral { parent: -0.3 }),
        1.0,
        (-5.0, 5.0),
        &mut rng,
    )
    .unwrap();
    assert_eq!(w.breakpoints(), &[0.5]);
    assert_eq!(w.value(0.49), 1.0);
}

#[test]
fn partial_impact_blends() {
    let mut rng = stream(1, StreamTag::Forward, 0);
    let mut w = AlleleProfile::constant(0.0).unwrap();
    w.blend(-0.5, 0.5, 0.25, 1.0);
    assert_eq!(w.value(0.0), 0.25);
    assert_eq!(w.value(0.5), 0.0);
    let e = ev(EventKind::Neutral { parent: 0.0 });
    assert!(apply_forward_event(&mut w, &e, 1.0, (0.0, 1.0), &mut rng).is_err());
}

#[test]
fn csv_layout() {
    let w = AlleleProfile::step_down(0.0).unwrap();
    assert_eq!(w.to_csv(), "breakpoint,value\n-inf,1\n0,0\n");
}

#[test]
fn trivial_duality_cases() {
    let p = ModelParams::new(25, 1.0, 1.0, RadiusMeasure::delta(1.0).unwrap(), 4).unwrap();
    for c in [0.0, 1.0] {
        let w0 = AlleleProfile::constant(c).unwrap();
        let r = duality_check(&w0, &[0.0], 0.05, &p, 20, Some(1)).unwrap();
        assert_eq!(r.forward_mean, c);
        assert_eq!(r.dual_mean, c);
        assert_eq!(r.z, 0.0);
    }
}
