use slfvs_core::replicates::*;

#[test]
fn order_is_independent_of_workers() {
    let a = map_replicates(100, Some(1), |r| Ok(r * r)).unwrap();
    let b = map_replicates(100, Some(4), |r| Ok(r * r)).unwrap();
    let c = map_replicates(100, None, |r| Ok(r * r)).unwrap();
    assert_eq!(a, b);
    assert_eq!(a, c);
}

#[test]
fn first_error_wins() {
    let r = map_replicates(10, Some(1), |r| {
        if r == 3 {
            Err(slfvs_core::SimError::Precondition("x".into()))
        } else {
            Ok(r)
        }
    });
    assert!(r.is_err());
}
