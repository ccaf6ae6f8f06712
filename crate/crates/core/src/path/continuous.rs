use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::events::ReproductionEvent;

use super::compact::{envelope, kappa_inv};
use super::CadlagPath;

/// Continuous piecewise-linear path, constant after its last knot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polyline {
    knots: Vec<(f64, f64)>,
}

impl Polyline {
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.is_empty() {
            return Err(SimError::InvalidParams("polyline needs a knot".into()));
        }
        for w in knots.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(SimError::InvalidParams(format!(
                    "polyline times must increase: {} then {}",
                    w[0].0, w[1].0
                )));
            }
        }
        if knots.iter().any(|k| !k.0.is_finite() || !k.1.is_finite()) {
            return Err(SimError::InvalidParams("polyline knots must be finite".into()));
        }
        Ok(Self { knots })
    }

    pub fn sigma(&self) -> f64 {
        self.knots[0].0
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn value(&self, t: f64) -> Option<f64> {
        if t < self.sigma() || t.is_nan() {
            return None;
        }
        let k = self.knots.partition_point(|p| p.0 <= t);
        if k == self.knots.len() {
            return Some(self.knots[k - 1].1);
        }
        let (t0, v0) = self.knots[k - 1];
        let (t1, v1) = self.knots[k];
        Some(v0 + (v1 - v0) * (t - t0) / (t1 - t0))
    }

    /// `f̄(t)` in `G` time, extended as a constant before the start.
    fn compact_value(&self, t: f64) -> f64 {
        let s = kappa_inv(self.sigma());
        let t = t.max(s);
        if t >= 1.0 {
            return 0.0;
        }
        let x = super::kappa(t);
        let v = self.value(x.max(self.sigma())).expect("inside domain");
        v.tanh() * envelope(t)
    }
}

/// Interpolation margin `Υ` per event, keyed by event time.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MarginMap {
    entries: Vec<(f64, f64)>,
}

impl MarginMap {
    pub fn new(mut entries: Vec<(f64, f64)>) -> Result<Self> {
        entries.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(SimError::InvalidParams(format!(
                    "two margins for event time {}",
                    w[0].0
                )));
            }
        }
        if entries.iter().any(|e| !(e.1 > 0.0)) {
            return Err(SimError::InvalidParams("margins must be positive".into()));
        }
        Ok(Self { entries })
    }

    pub fn get(&self, t: f64) -> Option<f64> {
        self.entries
            .binary_search_by(|e| e.0.total_cmp(&t))
            .ok()
            .map(|i| self.entries[i].1)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// `Υ(p) = min(cap, ½ · min |t_p - t_q|)` over events `q` whose intervals
/// meet that of `p`, so the boxes `[x-ρ, x+ρ] × [t-Υ, t+Υ]` are disjoint.
pub fn compute_margins(events: &[ReproductionEvent], cap: f64) -> Result<MarginMap> {
    if !(cap > 0.0) {
        return Err(SimError::InvalidParams(format!("margin cap must be positive, got {cap}")));
    }
    let mut order: Vec<usize> = (0..events.len()).collect();
    order.sort_by(|&i, &j| events[i].time.total_cmp(&events[j].time));
    let mut margin = vec![cap; events.len()];
    for (k, &i) in order.iter().enumerate() {
        let e = &events[i];
        for &j in &order[k + 1..] {
            let f = &events[j];
            let gap = f.time - e.time;
            if gap >= 2.0 * cap {
                break;
            }
            let overlap = (e.center - f.center).abs() <= e.radius + f.radius;
            if overlap {
                if gap <= 0.0 {
                    return Err(SimError::Precondition(format!(
                        "overlapping events share time {}",
                        e.time
                    )));
                }
                margin[i] = margin[i].min(0.5 * gap);
                margin[j] = margin[j].min(0.5 * gap);
            }
        }
    }
    MarginMap::new(events.iter().zip(margin).map(|(e, m)| (e.time, m)).collect())
}

/// Replace every jump by a linear ramp inside its margin: on `[τ-Υ, τ]` for
/// a right-continuous path, on `[τ, τ+Υ]` for a left-continuous one.
///
/// A ramp is clipped at the path start but may not reach back over the
/// previous ramp; that would mean overlapping margin boxes.
pub fn interpolate(f: &CadlagPath, margins: &MarginMap) -> Result<Polyline> {
    if !f.sigma().is_finite() || !f.v0().is_finite() {
        return Err(SimError::InvalidParams(
            "interpolation needs a finite start and value".into(),
        ));
    }
    let mut knots: Vec<(f64, f64)> = vec![(f.sigma(), f.v0())];
    let mut prev = f.v0();
    for &(tau, v) in f.jumps() {
        let m = margins.get(tau).ok_or_else(|| {
            SimError::Precondition(format!("no margin recorded for jump at {tau}"))
        })?;
        let (t0, t1) = if f.is_left_continuous() {
            (tau, tau + m)
        } else {
            ((tau - m).max(f.sigma()), tau)
        };
        let last = knots.last().expect("nonempty").0;
        if t0 < last {
            return Err(SimError::Precondition(format!(
                "margin at {tau} overlaps the previous ramp ending at {last}"
            )));
        }
        if t0 > last {
            knots.push((t0, prev));
        }
        if f.is_left_continuous() && f.end().is_finite() && t1 > f.end() {
            return Err(SimError::Precondition(format!(
                "margin at {tau} runs past the path end {}",
                f.end()
            )));
        }
        knots.push((t1, v));
        prev = v;
    }
    Polyline::new(knots)
}

/// `|σ̄1 - σ̄2| ∨ sup_t |f̄1(t ∨ σ̄1) - f̄2(t ∨ σ̄2)|` with the supremum taken
/// over the union of both knot grids in `G` time.
pub fn sup_metric_continuous(f1: &Polyline, f2: &Polyline) -> f64 {
    let (s1, s2) = (kappa_inv(f1.sigma()), kappa_inv(f2.sigma()));
    let mut grid: Vec<f64> = f1
        .knots()
        .iter()
        .chain(f2.knots())
        .map(|k| kappa_inv(k.0))
        .collect();
    grid.push(0.0);
    grid.push(1.0);
    let mut sup = (s1 - s2).abs();
    for t in grid {
        sup = sup.max((f1.compact_value(t) - f2.compact_value(t)).abs());
    }
    sup
}
