//! The limiting pair and the meeting-time law against closed forms.

mod common;

use slfvs_core::experiments::meeting_sample;
use slfvs_core::limit::{first_passage_oracle, lr_pair_terminal, meeting_time, simulate_lr_pair, LRConfig};
use slfvs_core::rng::{stream, StreamTag};
use slfvs_core::{ModelParams, RadiusMeasure};

const ZETA: f64 = 2.0 / 3.0;
const XI2: f64 = 4.0 / 3.0;

#[test]
fn inverse_gaussian_cdf_matches_reflection_formula() {
    for &(gap, drift, var) in &[(1.0, 4.0 / 3.0, 8.0 / 3.0), (0.3, 0.1, 2.0), (2.0, 5.0, 0.5)] {
        let ig = first_passage_oracle(gap, drift, var).unwrap();
        let f = common::passage_cdf(gap, drift, var);
        for k in 1..200 {
            let t = 0.02 * k as f64;
            assert!((ig.cdf(t) - f(t)).abs() < 1e-9, "gap {gap}, t {t}: {} vs {}", ig.cdf(t), f(t));
        }
    }
}

#[test]
fn far_apart_pair_moves_as_two_brownian_motions() {
    let cfg = LRConfig::new(ZETA, XI2, 1e-3).unwrap();
    let t = 0.5;
    let (mut ls, mut rs) = (Vec::new(), Vec::new());
    for k in 0..3000 {
        let (l, r) = lr_pair_terminal(-5.0, 5.0, t, &cfg, &mut stream(3, StreamTag::Limit, k)).unwrap();
        ls.push(l);
        rs.push(r);
    }
    let (_, pl) = common::ks1(&ls, common::normal_cdf(-5.0 - ZETA * t, XI2 * t));
    let (_, pr) = common::ks1(&rs, common::normal_cdf(5.0 + ZETA * t, XI2 * t));
    assert!(pl > 1e-3 && pr > 1e-3, "p = {pl}, {pr}");
}

#[test]
fn crossed_pair_meets_at_first_passage_time() {
    // From L above R the two move independently, so L - R is a Brownian
    // motion with drift -2ζ and variance rate 2ξ² until it hits zero.
    let cfg = LRConfig::new(ZETA, XI2, 1e-3).unwrap();
    let tmax = 4.0;
    let mut met = Vec::new();
    for k in 0..1500 {
        let (l, r) = simulate_lr_pair(1.0, 0.0, tmax, &cfg, &mut stream(4, StreamTag::Limit, k)).unwrap();
        if let Some(t) = meeting_time(&l, &r) {
            met.push(t);
        }
    }
    let f = common::passage_cdf(1.0, 2.0 * ZETA, 2.0 * XI2);
    let fmax = f(tmax);
    let (d, p) = common::ks1(&met, |t| f(t) / fmax);
    assert!(p > 1e-3, "KS D = {d}, p = {p}, met {}", met.len());
}

#[test]
fn ordered_pair_stays_ordered() {
    let cfg = LRConfig::new(ZETA, XI2, 1e-3).unwrap();
    for k in 0..50 {
        let (l, r) = simulate_lr_pair(0.0, 0.2, 2.0, &cfg, &mut stream(5, StreamTag::Limit, k)).unwrap();
        for (a, b) in l.values.iter().zip(&r.values) {
            assert!(a <= b, "replicate {k}: {a} > {b}");
        }
    }
}

#[test]
fn prelimit_meeting_times_follow_first_passage_law() {
    let p = ModelParams::new(400, 1.0, 1.0, RadiusMeasure::delta(1.0).unwrap(), 8).unwrap();
    let s = meeting_sample(&p, 1.0, 20.0, 2000, None).unwrap();
    let met: Vec<f64> = s.times.iter().flatten().copied().collect();
    let f = common::passage_cdf(1.0, 2.0 * ZETA, 2.0 * XI2);
    let fmax = f(20.0);
    let (d, pv) = common::ks1(&met, |t| f(t) / fmax);
    assert!(pv > 1e-3, "KS D = {d}, p = {pv}");
    // The (4/9) m3 constant would make the gap far less diffusive.
    let wrong = common::passage_cdf(1.0, 2.0 * ZETA, 2.0 * XI2 / 3.0);
    let (_, pw) = common::ks1(&met, |t| wrong(t) / wrong(20.0));
    assert!(pw < 1e-6, "alternative constant not rejected, p = {pw}");
}
