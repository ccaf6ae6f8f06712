use slfvs_core::path::*;

#[test]
fn zero_path_compactifies_to_zero() {
    let g = CompactifiedPath::from_path(&CadlagPath::constant(f64::NEG_INFINITY, 0.0).unwrap());
    assert_eq!(g.sigma(), -1.0);
    for t in [-1.0, -0.5, 0.0, 0.9, 1.0, 1.5, 2.0] {
        assert_eq!(g.eval(t), Some(0.0));
    }
}

#[test]
fn boundary_path_is_the_envelope() {
    let g = CompactifiedPath::from_path(&CadlagPath::boundary(true));
    for t in [-0.99, -0.3, 0.0, 0.4, 0.999] {
        assert_eq!(g.eval(t), Some(envelope(t)));
    }
    assert_eq!(g.eval(0.0), Some(1.0));
    assert_eq!(g.eval(1.0), Some(0.0));
    assert!(g.jump_times().is_empty());
}

#[test]
fn start_time_zero_is_preserved() {
    let f = CadlagPath::new(0.0, 2.0, vec![(1.0, -3.0)]).unwrap();
    let g = CompactifiedPath::from_path(&f);
    assert_eq!(g.sigma(), 0.0);
    assert_eq!(g.eval(0.0), Some(2.0f64.tanh()));
    assert_eq!(g.eval(1.0), Some(0.0));
    assert_eq!(g.jump_times(), vec![1.0f64.tanh()]);
}

#[test]
fn late_jumps_collapse_into_terminal_zero() {
    let f = CadlagPath::new(0.0, 1.0, vec![(5.0, 2.0), (40.0, 3.0)]).unwrap();
    let g = CompactifiedPath::from_path(&f);
    assert_eq!(g.knots().len(), 3);
}

#[test]
fn step_validation() {
    assert!(CompactifiedPath::step(0.0, 0.5, &[(0.5, 0.2), (1.0, -0.1)]).is_ok());
    assert!(CompactifiedPath::step(0.0, 0.5, &[(1.5, 0.2)]).is_err());
    assert!(CompactifiedPath::step(0.0, 1.5, &[]).is_err());
    assert!(CompactifiedPath::step(-2.0, 0.5, &[]).is_err());
}
