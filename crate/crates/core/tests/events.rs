use slfvs_core::events::*;
use slfvs_core::model::RadiusMeasure;
use slfvs_core::rng::{stream, StreamTag};
use slfvs_core::ModelParams;
use slfvs_core::SimError;

fn params(n: u64, alpha: f64) -> ModelParams {
    ModelParams::new(n, alpha, 1.0, RadiusMeasure::delta(1.0).unwrap(), 11).unwrap()
}

#[test]
fn empty_time_window_gives_empty_stream() {
    let p = params(10, 1.0);
    let s = sample_events_box(
        &p,
        (0.0, 1.0),
        (2.0, 2.0),
        1000,
        &mut stream(1, StreamTag::Events, 0),
    )
    .unwrap();
    assert!(s.is_empty());
}

#[test]
fn box_budget_is_enforced() {
    let p = params(1000, 1.0);
    let err = sample_events_box(
        &p,
        (0.0, 100.0),
        (0.0, 100.0),
        10_000,
        &mut stream(1, StreamTag::Events, 0),
    );
    assert!(matches!(err, Err(SimError::Budget { .. })));
}

#[test]
fn box_events_are_ordered_and_meet_window() {
    let p = params(16, 2.0);
    let s = sample_events_box(
        &p,
        (-1.0, 2.0),
        (0.0, 3.0),
        1_000_000,
        &mut stream(2, StreamTag::Events, 0),
    )
    .unwrap();
    assert!(!s.is_empty());
    for w in s.events.windows(2) {
        assert!(w[0].time < w[1].time);
    }
    for e in &s.events {
        assert!(e.east_end() >= -1.0 && e.west_end() <= 2.0);
        assert_eq!(e.radius, 0.25);
        match e.kind {
            EventKind::Neutral { parent } => {
                assert!(parent > e.west_end() && parent < e.east_end())
            }
            EventKind::Selective { west, east } => {
                assert!(west < east);
                assert!(west > e.west_end() && east < e.east_end());
            }
        }
    }
}

#[test]
fn union_lengths() {
    assert_eq!(covering_length(&[0.0], 1.0), 2.0);
    assert_eq!(covering_length(&[0.0, 100.0], 1.0), 4.0);
    assert_eq!(covering_length(&[0.0, 0.5], 1.0), 2.5);
    let mut v = Vec::new();
    assert_eq!(covering_union(&[0.0, 0.5, 3.0], 1.0, &mut v), 4.5);
    assert_eq!(v, vec![(-1.0, 1.5), (2.0, 4.0)]);
}

#[test]
fn hitting_rates() {
    let p = params(1, 0.0);
    assert_eq!(hitting_rate(&p, &[0.0]), 2.0);
    assert_eq!(hitting_rate(&p, &[0.0, 100.0]), 4.0);
    assert_eq!(hitting_rate(&p, &[0.0, 0.5]), 2.5);
}

#[test]
fn hitting_event_covers_a_position() {
    let p = params(100, 1.0);
    let mut rng = stream(3, StreamTag::Events, 0);
    let mut t = 0.0;
    for _ in 0..1000 {
        let e = next_event_hitting(&p, &[0.3, -0.2, 0.9], t, &mut rng).unwrap();
        assert!(e.time > t);
        assert!(e.covers(0.3) || e.covers(-0.2) || e.covers(0.9));
        t = e.time;
    }
    assert!(next_event_hitting(&p, &[], 0.0, &mut rng).is_err());
}

#[test]
fn replay_respects_window_and_direction() {
    let p = params(4, 1.0);
    let s = sample_events_box(
        &p,
        (-2.0, 2.0),
        (0.0, 5.0),
        1_000_000,
        &mut stream(4, StreamTag::Events, 0),
    )
    .unwrap();
    let mut fwd = s.replay(false);
    let mut last = f64::NEG_INFINITY;
    while let Some(e) = fwd.next_covering(&[0.0]).unwrap() {
        assert!(e.time > last && e.covers(0.0));
        last = e.time;
    }
    let mut back = s.replay(true);
    let mut last = f64::INFINITY;
    while let Some(e) = back.next_covering(&[0.0]).unwrap() {
        assert!(e.time < last);
        last = e.time;
    }
    assert!(matches!(
        s.replay(false).next_covering(&[5.0]),
        Err(SimError::Window(_))
    ));
}

#[test]
fn csv_dump_header_and_rows() {
    let p = params(4, 2.0);
    let s = sample_events_box(
        &p,
        (0.0, 1.0),
        (0.0, 1.0),
        100_000,
        &mut stream(5, StreamTag::Events, 0),
    )
    .unwrap();
    let csv = s.to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,x,rho,kind,z1,z2"));
    for (line, e) in lines.zip(&s.events) {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 6);
        assert_eq!(cols[3] == "selective", e.kind.is_selective());
        assert_eq!(cols[5].is_empty(), !e.kind.is_selective());
    }
}
