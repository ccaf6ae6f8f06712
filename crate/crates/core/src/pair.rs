//! The coupled left-most/right-most pair `(L, R)` on one event stream, its
//! regime clocks, and the drift and diffusion estimators.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dual::{forward_step, Side};
use crate::error::{Result, SimError};
use crate::events::{EventSampler, SamplingMode};
use crate::model::ModelParams;
use crate::replicates::map_replicates;
use crate::rng::{stream, SimRng, StreamTag};
use crate::stats::{variance_with_se, Summary};

/// `Z - U` with `Z, U` independent uniform on `[0, 2r]`: displacement of a
/// lineage at a neutral event, before rescaling by `1/√n`.
pub fn sample_neutral_jump(r: f64, rng: &mut SimRng) -> f64 {
    let z: f64 = rng.gen::<f64>() * 2.0 * r;
    let u: f64 = rng.gen::<f64>() * 2.0 * r;
    z - u
}

/// `(min(U1, U2) - Y, max(U1, U2) - Y)` with `U1, U2, Y` independent uniform
/// on `[0, 2r]`; ties are redrawn.
pub fn sample_selective_jumps(r: f64, rng: &mut SimRng) -> (f64, f64) {
    let y: f64 = rng.gen::<f64>() * 2.0 * r;
    loop {
        let a: f64 = rng.gen::<f64>() * 2.0 * r;
        let b: f64 = rng.gen::<f64>() * 2.0 * r;
        if a != b {
            return (a.min(b) - y, a.max(b) - y);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Coalesced,
    Nearby,
    Separated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JumpSource {
    Neutral,
    SelectiveLeft,
    SelectiveRight,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WalkIncrement {
    pub time: f64,
    pub delta: f64,
    pub source: JumpSource,
    pub component: Side,
    pub event: u64,
    /// Regime just before the event.
    pub regime: Regime,
}

/// Pair state. The coalesced flag is explicit: `L = R` without a shared
/// history is a nearby pair at distance zero, which cannot occur.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairState {
    pub time: f64,
    pub l: f64,
    pub r: f64,
    pub coalesced: bool,
    pub regime: Regime,
    /// Time spent coalesced, nearby and separated.
    pub c: f64,
    pub nearby: f64,
    pub s: f64,
}

impl PairState {
    fn classify(l: f64, r: f64, coalesced: bool, threshold: f64) -> Regime {
        if coalesced {
            Regime::Coalesced
        } else if r - l <= threshold {
            Regime::Nearby
        } else {
            Regime::Separated
        }
    }

    fn advance(&mut self, dt: f64) {
        match self.regime {
            Regime::Coalesced => self.c += dt,
            Regime::Nearby => self.nearby += dt,
            Regime::Separated => self.s += dt,
        }
        self.time += dt;
    }

    pub fn clock_total(&self) -> f64 {
        self.c + self.nearby + self.s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRun {
    pub initial: PairState,
    pub state: PairState,
    pub first_separation: Option<f64>,
    pub trajectory: Vec<PairState>,
    pub increments: Vec<WalkIncrement>,
}

/// Left-most path from `yl` and right-most path from `yr` on one shared
/// event stream up to `horizon`. `record` keeps the per-event trajectory
/// and increment log. Requires `υ = 1`.
pub fn run_pair_with(
    yl: f64,
    yr: f64,
    horizon: f64,
    params: &ModelParams,
    rng: SimRng,
    record: bool,
) -> Result<PairRun> {
    if params.upsilon < 1.0 {
        return Err(SimError::Unsupported(format!(
            "the pair decomposition needs upsilon = 1 (got {})",
            params.upsilon
        )));
    }
    if !(yl <= yr) || !yl.is_finite() || !yr.is_finite() {
        return Err(SimError::Precondition(format!("need finite yl <= yr, got {yl}, {yr}")));
    }
    if !(horizon >= 0.0) {
        return Err(SimError::Precondition(format!("horizon must be nonnegative, got {horizon}")));
    }
    let threshold = 2.0 * params.max_rescaled_radius();
    let coalesced = yl == yr;
    let mut st = PairState {
        time: 0.0,
        l: yl,
        r: yr,
        coalesced,
        regime: PairState::classify(yl, yr, coalesced, threshold),
        c: 0.0,
        nearby: 0.0,
        s: 0.0,
    };
    let initial = st;
    let mut run = PairRun {
        initial,
        state: st,
        first_separation: None,
        trajectory: Vec::new(),
        increments: Vec::new(),
    };
    let mut sampler = EventSampler::new(params, SamplingMode::Hitting, rng);
    let mut pos = [0.0; 2];
    loop {
        let positions: &[f64] = if st.coalesced {
            pos[0] = st.l;
            &pos[..1]
        } else {
            pos = [st.l, st.r];
            &pos[..]
        };
        let e = sampler.next_event(positions);
        if e.time > horizon {
            break;
        }
        st.advance(e.time - st.time);
        let before = st.regime;
        let hit_l = e.covers(st.l);
        let hit_r = e.covers(st.r);
        let (nl, nr) = (
            if hit_l { forward_step(Side::Left, &e) } else { st.l },
            if hit_r { forward_step(Side::Right, &e) } else { st.r },
        );
        if record {
            let selective = e.kind.is_selective();
            for (hit, side, from, to) in [(hit_l, Side::Left, st.l, nl), (hit_r, Side::Right, st.r, nr)] {
                if hit {
                    run.increments.push(WalkIncrement {
                        time: e.time,
                        delta: to - from,
                        source: match (selective, side) {
                            (false, _) => JumpSource::Neutral,
                            (true, Side::Left) => JumpSource::SelectiveLeft,
                            (true, Side::Right) => JumpSource::SelectiveRight,
                        },
                        component: side,
                        event: e.id,
                        regime: before,
                    });
                }
            }
        }
        st.coalesced = if hit_l && hit_r { nl == nr } else { st.coalesced && nl == nr };
        st.l = nl;
        st.r = nr;
        if st.l > st.r {
            return Err(SimError::Precondition(format!(
                "left path passed the right path at time {}",
                e.time
            )));
        }
        st.regime = PairState::classify(st.l, st.r, st.coalesced, threshold);
        if before == Regime::Coalesced && st.regime != Regime::Coalesced && run.first_separation.is_none() {
            run.first_separation = Some(e.time);
        }
        if record {
            run.trajectory.push(st);
        }
    }
    st.advance(horizon - st.time);
    run.state = st;
    Ok(run)
}

/// [`run_pair_with`] on the `Pair` stream of `replicate`, with logs.
pub fn run_pair(yl: f64, yr: f64, horizon: f64, params: &ModelParams, replicate: u64) -> Result<PairRun> {
    run_pair_with(yl, yr, horizon, params, stream(params.seed, StreamTag::Pair, replicate), true)
}

/// Displacement of a single extremal path over `[0, horizon]`, without
/// building the path.
pub fn extremal_displacement(side: Side, horizon: f64, params: &ModelParams, rng: SimRng) -> f64 {
    let mut sampler = EventSampler::new(params, SamplingMode::Hitting, rng);
    let mut x = 0.0;
    loop {
        let e = sampler.next_event(&[x]);
        if e.time > horizon {
            return x;
        }
        x = forward_step(side, &e);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftDiffusionEstimate {
    pub zeta_hat: f64,
    pub zeta_se: f64,
    pub xi2_hat: f64,
    pub xi2_se: f64,
    pub n: u64,
    pub replicates: u64,
    pub seed: u64,
    pub horizon: f64,
    pub zeta: f64,
    pub xi2_paper: f64,
    pub xi2_derived: f64,
}

impl DriftDiffusionEstimate {
    /// `{zeta_hat, se, xi2_hat, se, n, replicates, seed}` plus the
    /// closed-form constants for comparison.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "zeta_hat": self.zeta_hat,
            "zeta_se": self.zeta_se,
            "xi2_hat": self.xi2_hat,
            "xi2_se": self.xi2_se,
            "n": self.n,
            "replicates": self.replicates,
            "seed": self.seed,
            "horizon": self.horizon,
            "zeta": self.zeta,
            "xi2_paper": self.xi2_paper,
            "xi2_derived": self.xi2_derived,
        })
    }
}

/// `ζ̂` from the mean displacement of a right-most path, `ξ̂²` from the
/// displacement variance of a neutral lineage (`α = 0`), both per unit time.
/// The right-most path is run at `υ = 1` whatever `params.upsilon` says.
pub fn estimate_drift_diffusion(
    params: &ModelParams,
    horizon: f64,
    replicates: u64,
    workers: Option<usize>,
) -> Result<DriftDiffusionEstimate> {
    if replicates < 2 {
        return Err(SimError::SampleSize {
            needed: 2,
            got: replicates as usize,
        });
    }
    if !(horizon > 0.0) {
        return Err(SimError::Precondition(format!("horizon must be positive, got {horizon}")));
    }
    let selective = params.with_upsilon(1.0)?;
    let neutral = selective.with_alpha(0.0)?;
    let drift = map_replicates(replicates, workers, |k| {
        Ok(extremal_displacement(
            Side::Right,
            horizon,
            &selective,
            stream(params.seed, StreamTag::Forward, k),
        ))
    })?;
    let spread = map_replicates(replicates, workers, |k| {
        Ok(extremal_displacement(
            Side::Right,
            horizon,
            &neutral,
            stream(params.seed, StreamTag::Auxiliary(1), k),
        ))
    })?;
    let d: Summary = drift.iter().copied().collect();
    let (v, v_se) = variance_with_se(&spread);
    let lc = params.limit_constants();
    Ok(DriftDiffusionEstimate {
        zeta_hat: d.mean() / horizon,
        zeta_se: d.se() / horizon,
        xi2_hat: v / horizon,
        xi2_se: v_se / horizon,
        n: params.n,
        replicates,
        seed: params.seed,
        horizon,
        zeta: lc.zeta,
        xi2_paper: lc.xi2_paper,
        xi2_derived: lc.xi2_derived,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OccupationEstimate {
    pub n: u64,
    pub mean: f64,
    pub se: f64,
    pub replicates: u64,
}

/// Mean nearby time `N_T` of pairs started coalesced at the origin.
pub fn nearby_occupation(
    params: &ModelParams,
    horizon: f64,
    replicates: u64,
    workers: Option<usize>,
) -> Result<OccupationEstimate> {
    let clocks = map_replicates(replicates, workers, |k| {
        let run = run_pair_with(0.0, 0.0, horizon, params, stream(params.seed, StreamTag::Pair, k), false)?;
        Ok(run.state.nearby)
    })?;
    let s: Summary = clocks.iter().copied().collect();
    Ok(OccupationEstimate {
        n: params.n,
        mean: s.mean(),
        se: s.se(),
        replicates,
    })
}
