//! The forward-in-time allele-frequency field `w_t(x)` on piecewise-constant
//! states, and the moment-duality cross-check against the dual.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dual::{run_dual, DualOptions};
use crate::error::{Result, SimError};
use crate::events::{sample_events_box, EventKind, ReproductionEvent};
use crate::model::ModelParams;
use crate::replicates::map_replicates;
use crate::rng::{stream, SimRng, StreamTag};
use crate::stats::{z_score, Summary};

/// Right-continuous step function: `values[0]` left of the first
/// breakpoint, `values[i]` on `[breakpoints[i-1], breakpoints[i])`, the last
/// value right of the last breakpoint. Adjacent equal cells are merged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlleleProfile {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl AlleleProfile {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.len() != breakpoints.len() + 1 {
            return Err(SimError::InvalidParams(format!(
                "{} breakpoints need {} values, got {}",
                breakpoints.len(),
                breakpoints.len() + 1,
                values.len()
            )));
        }
        if breakpoints.iter().any(|b| !b.is_finite()) || breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(SimError::InvalidParams("breakpoints must be finite and increasing".into()));
        }
        if values.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(SimError::InvalidParams("frequencies must lie in [0, 1]".into()));
        }
        let mut p = Self { breakpoints, values };
        p.merge();
        Ok(p)
    }

    pub fn constant(c: f64) -> Result<Self> {
        Self::new(Vec::new(), vec![c])
    }

    /// `1{x < at}`.
    pub fn step_down(at: f64) -> Result<Self> {
        Self::new(vec![at], vec![1.0, 0.0])
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn cells(&self) -> usize {
        self.values.len()
    }

    pub fn value(&self, x: f64) -> f64 {
        self.values[self.breakpoints.partition_point(|&b| b <= x)]
    }

    /// Integral over `[a, b]`.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        if !(b > a) {
            return 0.0;
        }
        let mut total = 0.0;
        let mut lo = a;
        let mut k = self.breakpoints.partition_point(|&p| p <= a);
        while lo < b {
            let hi = self.breakpoints.get(k).copied().unwrap_or(f64::INFINITY).min(b);
            total += (hi - lo) * self.values[k];
            lo = hi;
            k += 1;
        }
        total
    }

    fn merge(&mut self) {
        let mut bp = Vec::with_capacity(self.breakpoints.len());
        let mut vals = Vec::with_capacity(self.values.len());
        vals.push(self.values[0]);
        for (i, &b) in self.breakpoints.iter().enumerate() {
            let v = self.values[i + 1];
            if v != *vals.last().expect("nonempty") {
                bp.push(b);
                vals.push(v);
            }
        }
        self.breakpoints = bp;
        self.values = vals;
    }

    /// Index of the cell starting at `x`, splitting a cell if needed.
    fn split_at(&mut self, x: f64) -> usize {
        let k = self.breakpoints.partition_point(|&b| b < x);
        if self.breakpoints.get(k) == Some(&x) {
            return k + 1;
        }
        let v = self.values[k];
        self.breakpoints.insert(k, x);
        self.values.insert(k + 1, v);
        k + 1
    }

    /// `w ← (1 - υ) w + υ c` on `[lo, hi)`.
    pub fn blend(&mut self, lo: f64, hi: f64, upsilon: f64, c: f64) {
        let first = self.breakpoints.partition_point(|&b| b <= lo);
        let last = self.breakpoints.partition_point(|&b| b < hi);
        if first == last && self.values[first] == c {
            return;
        }
        let i = self.split_at(lo);
        let j = self.split_at(hi);
        for v in &mut self.values[i..j] {
            *v = if upsilon >= 1.0 { c } else { (1.0 - upsilon) * *v + upsilon * c };
        }
        self.merge();
    }

    /// `breakpoint,value` rows: each breakpoint with the value to its
    /// right, preceded by a `-inf` row for the leftmost cell.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("breakpoint,value\n");
        s.push_str(&format!("-inf,{}\n", self.values[0]));
        for (b, v) in self.breakpoints.iter().zip(&self.values[1..]) {
            s.push_str(&format!("{b},{v}\n"));
        }
        s
    }
}

/// Apply one event. Types of the parents are drawn from the current field;
/// the offspring interval becomes type `a` (frequency 1) with weight `υ` if
/// the parent is `a` (neutral) or both potential parents are (selective).
pub fn apply_forward_event(
    w: &mut AlleleProfile,
    event: &ReproductionEvent,
    upsilon: f64,
    window: (f64, f64),
    rng: &mut SimRng,
) -> Result<()> {
    let (lo, hi) = (event.west_end(), event.east_end());
    if lo < window.0 || hi > window.1 {
        return Err(SimError::Window(format!(
            "event [{lo}, {hi}] leaves the window [{}, {}]",
            window.0, window.1
        )));
    }
    let is_a = |z: f64, rng: &mut SimRng| rng.gen::<f64>() < w.value(z);
    let c = match event.kind {
        EventKind::Neutral { parent } => is_a(parent, rng),
        EventKind::Selective { west, east } => {
            let k1 = is_a(west, rng);
            let k2 = is_a(east, rng);
            k1 && k2
        }
    };
    w.blend(lo, hi, upsilon, if c { 1.0 } else { 0.0 });
    Ok(())
}

/// Default cap on profile cells during a forward run.
pub const DEFAULT_CELL_BUDGET: usize = 100_000;

/// The field at time `horizon` from `w0`, driven by every event inside
/// `window`; outside it the field is frozen.
pub fn run_forward(
    w0: &AlleleProfile,
    horizon: f64,
    params: &ModelParams,
    window: (f64, f64),
    rng: &mut SimRng,
) -> Result<AlleleProfile> {
    let rmax = params.max_rescaled_radius();
    if !(window.1 - window.0 > 2.0 * rmax) {
        return Err(SimError::Precondition(format!(
            "window [{}, {}] is narrower than one event",
            window.0, window.1
        )));
    }
    let events = sample_events_box(params, window, (0.0, horizon), usize::MAX, rng)?;
    let mut w = w0.clone();
    for e in &events.events {
        if e.west_end() < window.0 || e.east_end() > window.1 {
            continue;
        }
        apply_forward_event(&mut w, e, params.upsilon, window, rng)?;
        if w.cells() > DEFAULT_CELL_BUDGET {
            return Err(SimError::Budget {
                what: "profile cell",
                limit: DEFAULT_CELL_BUDGET,
                time: e.time,
            });
        }
    }
    Ok(w)
}

/// Half-width `max|x| + 4 (6 √(ξ² T) + R/√n)` of a window wide enough for
/// truncation to be invisible next to Monte Carlo error; `ξ²` is the value
/// implied by the jump law.
pub fn duality_window(xs: &[f64], horizon: f64, params: &ModelParams) -> f64 {
    let xmax = xs.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let spread = 6.0 * (params.limit_constants().xi2_derived * horizon).sqrt() + params.max_rescaled_radius();
    xmax + 4.0 * spread
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    pub points: Vec<f64>,
    pub horizon: f64,
    pub replicates: u64,
    pub window: (f64, f64),
    pub forward_mean: f64,
    pub forward_se: f64,
    pub dual_mean: f64,
    pub dual_se: f64,
    pub z: f64,
}

/// Forward estimate of `E[∏ w_T(x_j)]` against the dual estimate
/// `E[∏ w0(ξ_T^i)]` over all lineages alive at `T`, on independent streams.
pub fn duality_check(
    w0: &AlleleProfile,
    xs: &[f64],
    horizon: f64,
    params: &ModelParams,
    replicates: u64,
    workers: Option<usize>,
) -> Result<DualityReport> {
    if xs.is_empty() {
        return Err(SimError::Precondition("need at least one sample point".into()));
    }
    let half = duality_window(xs, horizon, params);
    let window = (-half, half);
    let fwd = map_replicates(replicates, workers, |k| {
        let mut rng = stream(params.seed, StreamTag::Forward, k);
        let w = run_forward(w0, horizon, params, window, &mut rng)?;
        Ok(xs.iter().map(|&x| w.value(x)).product::<f64>())
    })?;
    let opts = DualOptions {
        record: false,
        ..DualOptions::default()
    };
    let dual = map_replicates(replicates, workers, |k| {
        let run = run_dual(xs, horizon, params, k, &opts)?;
        Ok(run.state.positions().iter().map(|&y| w0.value(y)).product::<f64>())
    })?;
    let f: Summary = fwd.into_iter().collect();
    let d: Summary = dual.into_iter().collect();
    let z = if f.se() == 0.0 && d.se() == 0.0 {
        if f.mean() == d.mean() {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        z_score(f.mean(), f.se(), d.mean(), d.se())
    };
    Ok(DualityReport {
        points: xs.to_vec(),
        horizon,
        replicates,
        window,
        forward_mean: f.mean(),
        forward_se: f.se(),
        dual_mean: d.mean(),
        dual_se: d.se(),
        z,
    })
}
