//! A single extremal lineage is a compound Poisson process. These tests
//! rebuild it from the event mechanism alone and compare.

mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use slfvs_core::dual::Side;
use slfvs_core::pair::extremal_displacement;
use slfvs_core::rng::{stream, StreamTag};
use slfvs_core::{ModelParams, RadiusMeasure};

/// Right-most displacement at `horizon` at impact 1: events cover the point
/// at rate `Σ 2 n w r`; the atom is picked with weight `w r`; the centre is
/// uniform within one radius; a selective event takes the larger of two
/// uniform parents, a neutral one takes one.
fn oracle_right_most(atoms: &[(f64, f64)], n: u64, alpha: f64, horizon: f64, rng: &mut ChaCha8Rng) -> f64 {
    let n_f = n as f64;
    let rates: Vec<f64> = atoms.iter().map(|&(r, w)| 2.0 * n_f * w * r).collect();
    let total: f64 = rates.iter().sum();
    let clock = Exp::new(total).unwrap();
    let s = alpha / n_f.sqrt();
    let (mut t, mut x) = (0.0, 0.0);
    loop {
        t += clock.sample(rng);
        if t > horizon {
            return x;
        }
        let mut pick = rng.gen::<f64>() * total;
        let mut k = 0;
        while pick > rates[k] && k + 1 < rates.len() {
            pick -= rates[k];
            k += 1;
        }
        let rho = atoms[k].0 / n_f.sqrt();
        let c = x + rho * (2.0 * rng.gen::<f64>() - 1.0);
        let selective = rng.gen::<f64>() < s;
        let mut parent = || c + rho * (2.0 * rng.gen::<f64>() - 1.0);
        x = if selective { parent().max(parent()) } else { parent() };
    }
}

fn two_atoms() -> (Vec<(f64, f64)>, RadiusMeasure) {
    let atoms = vec![(0.5, 0.4), (1.0, 0.6)];
    (atoms, "atoms:(0.4,0.5),(0.6,1)".parse().unwrap())
}

#[test]
fn limit_constants_match_jump_moments() {
    // Selective jump mean r/3 and neutral jump variance 2r²/3, in units of
    // the rescaled radius, times the covering rate 2 n w r.
    let (atoms, mu) = two_atoms();
    let p = ModelParams::new(400, 1.5, 1.0, mu, 0).unwrap();
    let zeta: f64 = atoms.iter().map(|&(r, w)| 2.0 * w * r * 1.5 * r / 3.0).sum();
    let xi2: f64 = atoms.iter().map(|&(r, w)| 2.0 * w * r * 2.0 * r * r / 3.0).sum();
    let lc = p.limit_constants();
    assert!((lc.zeta - zeta).abs() < 1e-12, "{} vs {zeta}", lc.zeta);
    assert!((lc.xi2_derived - xi2).abs() < 1e-12, "{} vs {xi2}", lc.xi2_derived);
    assert!((lc.xi2_paper - xi2 / 3.0).abs() < 1e-12);
}

#[test]
fn right_most_displacement_law_matches_reconstruction() {
    let (atoms, mu) = two_atoms();
    let p = ModelParams::new(100, 2.0, 1.0, mu, 17).unwrap();
    let reps = 4000;
    let lib: Vec<f64> = (0..reps)
        .map(|k| extremal_displacement(Side::Right, 0.5, &p, stream(17, StreamTag::Forward, k)))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(991);
    let ora: Vec<f64> = (0..reps).map(|_| oracle_right_most(&atoms, 100, 2.0, 0.5, &mut rng)).collect();
    let (d, pv) = common::ks2(&lib, &ora);
    assert!(pv > 1e-3, "KS D = {d}, p = {pv}");
}

#[test]
fn left_most_is_the_mirror_image() {
    let p = ModelParams::new(100, 1.0, 1.0, RadiusMeasure::delta(1.0).unwrap(), 5).unwrap();
    let reps = 3000;
    let right: Vec<f64> = (0..reps)
        .map(|k| extremal_displacement(Side::Right, 0.5, &p, stream(5, StreamTag::Forward, k)))
        .collect();
    let left: Vec<f64> = (0..reps)
        .map(|k| -extremal_displacement(Side::Left, 0.5, &p, stream(5, StreamTag::Backward, k)))
        .collect();
    let (d, pv) = common::ks2(&right, &left);
    assert!(pv > 1e-3, "KS D = {d}, p = {pv}");
}

#[test]
fn drift_and_variance_rates() {
    let p = ModelParams::new(400, 1.0, 1.0, RadiusMeasure::delta(1.0).unwrap(), 23).unwrap();
    let reps = 6000;
    let drift: Vec<f64> = (0..reps)
        .map(|k| extremal_displacement(Side::Right, 1.0, &p, stream(23, StreamTag::Forward, k)))
        .collect();
    let (m, se) = common::mean_se(&drift);
    assert!((m - 2.0 / 3.0).abs() < 4.0 * se, "drift {m} ± {se}");

    let q = p.with_alpha(0.0).unwrap();
    let spread: Vec<f64> = (0..reps)
        .map(|k| extremal_displacement(Side::Right, 1.0, &q, stream(23, StreamTag::Auxiliary(1), k)))
        .collect();
    let v = common::variance(&spread);
    // Gaussian-ish variance se is v √(2/(N-1)); the compound Poisson tails are light.
    let se_v = v * (2.0 / (reps as f64 - 1.0)).sqrt();
    assert!((v - 4.0 / 3.0).abs() < 4.0 * se_v, "variance {v} ± {se_v}");
    assert!((v - 4.0 / 9.0).abs() > 20.0 * se_v);
}
