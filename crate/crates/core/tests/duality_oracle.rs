//! Moment duality at zero selection, where a single lineage is a symmetric
//! compound Poisson walk and `E[w_T(0)] = P(X_T < 0)` is known.

use slfvs_core::forward::{duality_check, AlleleProfile};
use slfvs_core::{ModelParams, RadiusMeasure};

#[test]
fn neutral_half_line_is_one_half() {
    let p = ModelParams::new(100, 0.0, 1.0, RadiusMeasure::delta(1.0).unwrap(), 12).unwrap();
    let t = 0.25;
    // X_T = 0 only without events; the rest of the mass splits evenly.
    let no_event = (-p.per_point_event_rate() * t).exp();
    let want = 0.5 * (1.0 - no_event);
    let w0 = AlleleProfile::step_down(0.0).unwrap();
    let r = duality_check(&w0, &[0.0], t, &p, 2000, None).unwrap();
    let zf = (r.forward_mean - want) / r.forward_se;
    let zd = (r.dual_mean - want) / r.dual_se;
    assert!(
        zf.abs() < 4.0,
        "forward {} ± {} vs {want}",
        r.forward_mean,
        r.forward_se
    );
    assert!(
        zd.abs() < 4.0,
        "dual {} ± {} vs {want}",
        r.dual_mean,
        r.dual_se
    );
}

#[test]
fn constant_profile_is_preserved() {
    let p = ModelParams::new(100, 0.0, 0.7, RadiusMeasure::delta(1.0).unwrap(), 4).unwrap();
    let w0 = AlleleProfile::constant(0.3).unwrap();
    let r = duality_check(&w0, &[0.0], 0.25, &p, 1000, None).unwrap();
    // One neutral lineage never branches, so the dual is exact; the forward
    // field is random because parents draw their type.
    assert!((r.dual_mean - 0.3).abs() < 1e-12);
    assert!(
        (r.forward_mean - 0.3).abs() < 4.0 * r.forward_se,
        "{} ± {}",
        r.forward_mean,
        r.forward_se
    );
}

#[test]
fn selection_lowers_the_tracked_type() {
    // Offspring take the tracked type only if both potential parents carry
    // it, so selection pushes the mean at 0 below the neutral value.
    let p = ModelParams::new(100, 2.0, 1.0, RadiusMeasure::delta(1.0).unwrap(), 12).unwrap();
    let w0 = AlleleProfile::step_down(0.0).unwrap();
    let r = duality_check(&w0, &[0.0], 0.25, &p, 1500, None).unwrap();
    assert!(r.z.abs() < 4.0, "z = {}", r.z);
    assert!(
        r.dual_mean < 0.5 - 3.0 * r.dual_se,
        "dual {} ± {}",
        r.dual_mean,
        r.dual_se
    );
}
