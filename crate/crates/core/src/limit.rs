//! Reference samplers for the scaling limit: the left-right pair, finite
//! left/right coalescing systems and first-meeting laws.

use rand::{Rng, RngCore};
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dual::Side;
use crate::error::{Result, SimError};
use crate::model::ModelParams;
use crate::rng::SimRng;

pub use crate::stats::{ks_one_sample, ks_two_sample, InverseGaussian, KsResult};

/// Values on the uniform grid `start + k·dt`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPath {
    pub start: f64,
    pub dt: f64,
    pub values: Vec<f64>,
}

impl GridPath {
    pub fn new(start: f64, dt: f64, values: Vec<f64>) -> Result<Self> {
        if !(dt > 0.0) || !start.is_finite() {
            return Err(SimError::InvalidParams(format!("bad grid start {start} or step {dt}")));
        }
        if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
            return Err(SimError::InvalidParams("grid values must be finite and nonempty".into()));
        }
        Ok(Self { start, dt, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn end(&self) -> f64 {
        self.start + (self.values.len() - 1) as f64 * self.dt
    }

    pub fn last(&self) -> f64 {
        *self.values.last().expect("nonempty")
    }

    pub fn time(&self, k: usize) -> f64 {
        self.start + k as f64 * self.dt
    }

    /// Linear interpolation; `None` outside `[start, end]`.
    pub fn value_at(&self, t: f64) -> Option<f64> {
        let x = (t - self.start) / self.dt;
        if !(x >= -1e-9) || x > (self.values.len() - 1) as f64 + 1e-9 {
            return None;
        }
        let x = x.clamp(0.0, (self.values.len() - 1) as f64);
        let k = (x.floor() as usize).min(self.values.len() - 1);
        if k + 1 == self.values.len() {
            return Some(self.values[k]);
        }
        let f = x - k as f64;
        Some(self.values[k] * (1.0 - f) + self.values[k + 1] * f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LRConfig {
    pub zeta: f64,
    pub xi2: f64,
    pub dt: f64,
}

pub const DEFAULT_LR_DT: f64 = 1e-4;

impl LRConfig {
    /// `dt` may not exceed `10⁻³ · ξ²/ζ²`, the time over which drift and
    /// noise separate a coalesced pair by comparable amounts.
    pub fn new(zeta: f64, xi2: f64, dt: f64) -> Result<Self> {
        if !(zeta >= 0.0) || !zeta.is_finite() {
            return Err(SimError::InvalidParams(format!("zeta must be finite and >= 0, got {zeta}")));
        }
        if !(xi2 > 0.0) || !xi2.is_finite() {
            return Err(SimError::InvalidParams(format!("xi2 must be positive, got {xi2}")));
        }
        if !(dt > 0.0) {
            return Err(SimError::InvalidParams(format!("dt must be positive, got {dt}")));
        }
        if zeta > 0.0 {
            let cap = 1e-3 * xi2 / (zeta * zeta);
            if dt > cap {
                return Err(SimError::InvalidParams(format!(
                    "dt = {dt} exceeds 1e-3 x xi2/zeta^2 = {cap}"
                )));
            }
        }
        Ok(Self { zeta, xi2, dt })
    }

    /// Constants of `params` with the given diffusion constant and the
    /// default step, shrunk to the cap if needed.
    pub fn from_params(params: &ModelParams, xi2: f64) -> Result<Self> {
        let zeta = params.limit_constants().zeta;
        let mut dt = DEFAULT_LR_DT;
        if zeta > 0.0 {
            dt = dt.min(1e-3 * xi2 / (zeta * zeta));
        }
        Self::new(zeta, xi2, dt)
    }

    fn xi(&self) -> f64 {
        self.xi2.sqrt()
    }
}

fn normal(rng: &mut SimRng) -> f64 {
    rng.sample(StandardNormal)
}

/// Minimum of a Brownian bridge from `a` to `b` over a step `dt` with
/// variance rate `var`.
fn bridge_minimum(a: f64, b: f64, var: f64, dt: f64, rng: &mut SimRng) -> f64 {
    let u: f64 = 1.0 - rng.gen::<f64>();
    0.5 * (a + b - ((b - a).powi(2) - 2.0 * var * dt * u.ln()).sqrt())
}

/// Knots `(t, L, R)` of the sticky pair started at `L0 = R0 + g0`, `g0 ≥ 0`,
/// by its time change: in separated time `S` the gap is
/// `Ŵ(S) = g0 + 2ζS + ξ(Bʳ − Bˡ)(S)` reflected at zero by `ℓ(S) = max(0, −min Ŵ)`,
/// the coalesced clock is `C = ℓ/2ζ`, and real time is `S + C`.
fn sticky_knots(l0: f64, g0: f64, t0: f64, horizon: f64, cfg: &LRConfig, rng: &mut SimRng) -> Vec<(f64, f64, f64)> {
    let xi = cfg.xi();
    let two_zeta = 2.0 * cfg.zeta;
    let ds = cfg.dt;
    let sq = ds.sqrt();
    let mut knots = vec![(t0, l0, l0 + g0)];
    let (mut s, mut bl, mut w, mut reg, mut bc, mut t) = (0.0, 0.0, g0, 0.0_f64, 0.0, t0);
    while t < horizon {
        let dbl = sq * normal(rng);
        let dbr = sq * normal(rng);
        let w1 = w + two_zeta * ds + xi * (dbr - dbl);
        let m = bridge_minimum(w, w1, 2.0 * cfg.xi2, ds, rng);
        let reg1 = reg.max(-m);
        let dc = (reg1 - reg) / two_zeta;
        if dc > 0.0 {
            bc += xi * dc.sqrt() * normal(rng);
        }
        s += ds;
        bl += xi * dbl;
        t += ds + dc;
        w = w1;
        reg = reg1;
        let l = l0 + bl + bc - cfg.zeta * (t - t0);
        knots.push((t, l, l + w + reg));
    }
    let _ = s;
    knots
}

/// Independent paths with drifts `∓ζ` from `L0 > R0` until they meet, then
/// both set to the midpoint. Returns the knots and the meeting time, if
/// any, on the `dt` grid.
fn crossed_knots(l0: f64, r0: f64, horizon: f64, cfg: &LRConfig, rng: &mut SimRng) -> (Vec<(f64, f64, f64)>, Option<f64>) {
    let xi = cfg.xi();
    let sq = cfg.dt.sqrt();
    let (mut l, mut r, mut t) = (l0, r0, 0.0);
    let mut knots = vec![(0.0, l, r)];
    let mut k = 0u64;
    while t < horizon {
        let l1 = l - cfg.zeta * cfg.dt + xi * sq * normal(rng);
        let r1 = r + cfg.zeta * cfg.dt + xi * sq * normal(rng);
        // Knot times on the exact grid `k·dt` used by the resampler.
        k += 1;
        t = k as f64 * cfg.dt;
        let (d0, d1) = (l - r, l1 - r1);
        let met = d1 <= 0.0 || {
            let p = (-2.0 * d0 * d1 / (2.0 * cfg.xi2 * cfg.dt)).exp();
            rng.gen::<f64>() < p
        };
        if met {
            let mid = 0.5 * (l1 + r1);
            knots.push((t, mid, mid));
            return (knots, Some(t));
        }
        l = l1;
        r = r1;
        knots.push((t, l, r));
    }
    (knots, None)
}

/// Knots of the pair `(L, R)` from `(l0, r0)` over `[0, horizon]`.
fn lr_knots(l0: f64, r0: f64, horizon: f64, cfg: &LRConfig, rng: &mut SimRng) -> Vec<(f64, f64, f64)> {
    let (mut knots, start) = if l0 > r0 {
        let (k, met) = crossed_knots(l0, r0, horizon, cfg, rng);
        match met {
            Some(t) => (k, t),
            None => return k,
        }
    } else {
        (Vec::new(), 0.0)
    };
    let (l, g) = match knots.last() {
        Some(&(_, l, r)) => (l, r - l),
        None => (l0, r0 - l0),
    };
    if cfg.zeta == 0.0 {
        // No splitting drift: coalescing Brownian motions.
        let xi = cfg.xi();
        let sq = cfg.dt.sqrt();
        let (mut l, mut r, mut t) = (l, l + g, start);
        if knots.is_empty() {
            knots.push((t, l, r));
        }
        let mut k = (start / cfg.dt).round() as u64;
        while t < horizon {
            k += 1;
            t = k as f64 * cfg.dt;
            if l == r {
                l += xi * sq * normal(rng);
                r = l;
            } else {
                let l1 = l + xi * sq * normal(rng);
                let r1 = r + xi * sq * normal(rng);
                let (d0, d1) = (r - l, r1 - l1);
                let met = d1 <= 0.0 || rng.gen::<f64>() < (-d0 * d1 / (cfg.xi2 * cfg.dt)).exp();
                if met {
                    l = 0.5 * (l1 + r1);
                    r = l;
                } else {
                    l = l1;
                    r = r1;
                }
            }
            knots.push((t, l, r));
        }
        return knots;
    }
    let tail = sticky_knots(l, g, start, horizon, cfg, rng);
    if knots.is_empty() {
        tail
    } else {
        knots.extend(tail.into_iter().skip(1));
        knots
    }
}

fn resample(knots: &[(f64, f64, f64)], horizon: f64, dt: f64) -> (Vec<f64>, Vec<f64>) {
    let steps = (horizon / dt).round() as usize;
    let mut ls = Vec::with_capacity(steps + 1);
    let mut rs = Vec::with_capacity(steps + 1);
    let mut j = 0;
    for k in 0..=steps {
        let t = (k as f64 * dt).min(horizon);
        while j + 1 < knots.len() && knots[j + 1].0 < t {
            j += 1;
        }
        if j + 1 == knots.len() || knots[j].0 >= t {
            ls.push(knots[j].1);
            rs.push(knots[j].2);
            continue;
        }
        let (t0, l0, r0) = knots[j];
        let (t1, l1, r1) = knots[j + 1];
        let f = (t - t0) / (t1 - t0);
        let l = l0 + f * (l1 - l0);
        let r = r0 + f * (r1 - r0);
        ls.push(l);
        // Rounding may cross an ordered pair; a crossed pair is left alone.
        rs.push(if r0 >= l0 && r1 >= l1 { r.max(l) } else { r });
    }
    (ls, rs)
}

/// The left-right pair from `(l0, r0)` on the grid `k·dt`, `k·dt ≤ horizon`.
///
/// For `l0 ≤ r0` the gap is an exact reflected Brownian motion in separated
/// time, the regulator coming from the bridge minimum over each step; the
/// real-time grid is filled by linear interpolation between steps. For
/// `l0 > r0` the paths move independently until they meet.
pub fn simulate_lr_pair(
    l0: f64,
    r0: f64,
    horizon: f64,
    cfg: &LRConfig,
    rng: &mut SimRng,
) -> Result<(GridPath, GridPath)> {
    if !l0.is_finite() || !r0.is_finite() || !(horizon >= 0.0) || !horizon.is_finite() {
        return Err(SimError::Precondition(format!(
            "need finite starts and horizon, got {l0}, {r0}, {horizon}"
        )));
    }
    let knots = lr_knots(l0, r0, horizon, cfg, rng);
    let (ls, rs) = resample(&knots, horizon, cfg.dt);
    Ok((GridPath::new(0.0, cfg.dt, ls)?, GridPath::new(0.0, cfg.dt, rs)?))
}

/// `(L_T, R_T)` from `(l0, r0)` without building the grid.
pub fn lr_pair_terminal(l0: f64, r0: f64, horizon: f64, cfg: &LRConfig, rng: &mut SimRng) -> Result<(f64, f64)> {
    if !l0.is_finite() || !r0.is_finite() || !(horizon >= 0.0) || !horizon.is_finite() {
        return Err(SimError::Precondition(format!(
            "need finite starts and horizon, got {l0}, {r0}, {horizon}"
        )));
    }
    let knots = lr_knots(l0, r0, horizon, cfg, rng);
    let j = knots.partition_point(|k| k.0 < horizon);
    if j == 0 {
        return Ok((knots[0].1, knots[0].2));
    }
    if j == knots.len() {
        let k = knots[j - 1];
        return Ok((k.1, k.2));
    }
    let (t0, a0, b0) = knots[j - 1];
    let (t1, a1, b1) = knots[j];
    let f = (horizon - t0) / (t1 - t0);
    let l = a0 + f * (a1 - a0);
    Ok((l, (b0 + f * (b1 - b0)).max(l)))
}

/// Fraction of grid times at which `L = R`.
pub fn sticky_fraction(l: &GridPath, r: &GridPath) -> f64 {
    let hits = l
        .values
        .iter()
        .zip(&r.values)
        .filter(|(a, b)| (*b - *a).abs() <= 1e-12 * (1.0 + a.abs()))
        .count();
    hits as f64 / l.len() as f64
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Left/right coalescing system on the lattice `hℤ × dt·ℤ`, `h = ξ√dt`.
///
/// Every lattice point carries one arrow, shared by all paths that visit
/// it: with probability `ε = ζh/ξ²` a branching point (left paths step
/// down, right paths up), otherwise an unbiased step. Same-side paths that
/// meet coalesce; a left and a right path stick until a branching point
/// separates them. Each path has drift `±ζ` and variance rate `ξ²`.
pub fn simulate_coalescing_system(
    points: &[(f64, f64)],
    sides: &[Side],
    horizon: f64,
    cfg: &LRConfig,
    rng: &mut SimRng,
) -> Result<Vec<GridPath>> {
    if points.len() != sides.len() {
        return Err(SimError::Precondition(format!(
            "{} points but {} orientations",
            points.len(),
            sides.len()
        )));
    }
    let h = (cfg.xi2 * cfg.dt).sqrt();
    let eps = cfg.zeta * h / cfg.xi2;
    if eps > 1.0 {
        return Err(SimError::InvalidParams(format!(
            "branching probability {eps} exceeds 1; reduce dt"
        )));
    }
    let key = rng.next_u64();
    let arrow = |site: i64, step: i64| -> f64 {
        let x = splitmix(key ^ splitmix((site as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (step as u64)));
        (x >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    };
    let last = (horizon / cfg.dt).round() as i64;
    let mut out = Vec::with_capacity(points.len());
    for (&(y, s), &side) in points.iter().zip(sides) {
        if !y.is_finite() || !s.is_finite() || s > horizon {
            return Err(SimError::Precondition(format!("start ({y}, {s}) outside the horizon")));
        }
        let j0 = (s / cfg.dt).round() as i64;
        let mut k = 2 * ((y / h + j0 as f64) / 2.0).round() as i64 - j0;
        let mut values = vec![k as f64 * h];
        for j in j0..last {
            let u = arrow(k, j);
            let up = if u < eps {
                side == Side::Right
            } else {
                u >= eps + 0.5 * (1.0 - eps)
            };
            k += if up { 1 } else { -1 };
            values.push(k as f64 * h);
        }
        out.push(GridPath::new(j0 as f64 * cfg.dt, cfg.dt, values)?);
    }
    Ok(out)
}

/// First time two paths on the same grid coincide, if they do.
pub fn meeting_time(a: &GridPath, b: &GridPath) -> Option<f64> {
    let lo = a.start.max(b.start);
    let ka = ((lo - a.start) / a.dt).round() as usize;
    let kb = ((lo - b.start) / b.dt).round() as usize;
    a.values[ka..]
        .iter()
        .zip(&b.values[kb..])
        .position(|(x, y)| (x - y).abs() <= 1e-9 * a.dt.sqrt())
        .map(|k| lo + k as f64 * a.dt)
}

/// Law of the first time a Brownian gap started at `gap0`, drifting toward
/// zero at rate `drift` with variance rate `var`, hits zero.
pub fn first_passage_oracle(gap0: f64, drift: f64, var: f64) -> Result<InverseGaussian> {
    InverseGaussian::first_passage(gap0, drift, var)
}

/// `P(τ ≤ t)` for a driftless Brownian gap: `erfc(gap0 / √(2 var t))`.
pub fn driftless_passage_cdf(gap0: f64, var: f64, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    libm::erfc(gap0 / (2.0 * var * t).sqrt())
}
