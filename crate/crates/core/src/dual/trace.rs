use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::events::{EventKind, EventSampler, EventSource, ReproductionEvent, SamplingMode};
use crate::model::ModelParams;
use crate::path::CadlagPath;
use crate::rng::SimRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

/// One jump of a trace, in the trace's own direction of travel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    /// Real (forward) time of the event.
    pub time: f64,
    pub from: f64,
    pub to: f64,
    pub radius: f64,
    pub selective: bool,
    pub event: u64,
}

impl TraceStep {
    pub fn delta(&self) -> f64 {
        self.to - self.from
    }
}

/// A left-most or right-most path. Backward traces are stored in forward
/// time as left-continuous paths on `[bottom, start]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremalTrace {
    pub side: Side,
    pub direction: Direction,
    pub steps: Vec<TraceStep>,
    pub path: CadlagPath,
}

impl ExtremalTrace {
    /// Jump sizes as seen by the rotated path: forward traces as they are,
    /// backward traces negated.
    pub fn rotated_increments(&self, selective: bool) -> Vec<f64> {
        let sign = match self.direction {
            Direction::Forward => 1.0,
            Direction::Backward => -1.0,
        };
        self.steps
            .iter()
            .filter(|s| s.selective == selective)
            .map(|s| sign * s.delta())
            .collect()
    }

    pub fn end_position(&self) -> f64 {
        self.steps.last().map_or_else(|| self.path.v0(), |s| s.to)
    }
}

/// Forward extremal rule: the parent, or the west-most (left) or east-most
/// (right) potential parent.
pub fn forward_step(side: Side, event: &ReproductionEvent) -> f64 {
    match (event.kind, side) {
        (EventKind::Neutral { parent }, _) => parent,
        (EventKind::Selective { west, .. }, Side::Left) => west,
        (EventKind::Selective { east, .. }, Side::Right) => east,
    }
}

/// Backward arrow rule for a path at `y` hit by `event`. Where both arrows
/// are allowed the left-most path takes the east end and the right-most the
/// west end.
pub fn backward_step(side: Side, y: f64, event: &ReproductionEvent) -> f64 {
    let (w, e) = (event.west_end(), event.east_end());
    match event.kind {
        EventKind::Neutral { parent } => {
            if y <= parent {
                w
            } else {
                e
            }
        }
        EventKind::Selective { west, east } => {
            if y < west {
                w
            } else if y > east {
                e
            } else {
                match side {
                    Side::Left => e,
                    Side::Right => w,
                }
            }
        }
    }
}

fn require_full_impact(params: &ModelParams, what: &str) -> Result<()> {
    if params.upsilon < 1.0 {
        return Err(SimError::Unsupported(format!(
            "{what} is only defined for upsilon = 1 (got {}); use extremal_ancestor",
            params.upsilon
        )));
    }
    Ok(())
}

/// Forward extremal path from `(y, s)` to the horizon on a given source.
/// The source clock must already be at `s`.
pub fn trace_forward_with(
    side: Side,
    y: f64,
    s: f64,
    horizon: f64,
    source: &mut dyn EventSource,
) -> Result<ExtremalTrace> {
    let mut pos = y;
    let mut steps = Vec::new();
    while let Some(e) = source.next_covering(&[pos])? {
        if e.time > horizon {
            break;
        }
        if e.time <= s {
            continue;
        }
        let to = forward_step(side, &e);
        steps.push(TraceStep {
            time: e.time,
            from: pos,
            to,
            radius: e.radius,
            selective: e.kind.is_selective(),
            event: e.id,
        });
        pos = to;
    }
    let path = CadlagPath::new(s, y, steps.iter().map(|st| (st.time, st.to)).collect())?
        .with_end(horizon)?;
    Ok(ExtremalTrace {
        side,
        direction: Direction::Forward,
        steps,
        path,
    })
}

/// Forward left-most or right-most path from `(y, s)` on a fresh
/// lineage-conditioned event stream. Requires `υ = 1`.
pub fn trace_forward_extremal(
    side: Side,
    y: f64,
    s: f64,
    horizon: f64,
    params: &ModelParams,
    rng: SimRng,
) -> Result<ExtremalTrace> {
    require_full_impact(params, "the forward extremal path")?;
    let mut sampler = EventSampler::new(params, SamplingMode::Hitting, rng);
    sampler.set_time(s);
    trace_forward_with(side, y, s, horizon, &mut sampler)
}

/// Backward extremal path from `(y, s)` down to `bottom` on a source that
/// delivers events in decreasing real time (a reversed replay).
pub fn trace_backward_with(
    side: Side,
    y: f64,
    s: f64,
    bottom: f64,
    source: &mut dyn EventSource,
) -> Result<ExtremalTrace> {
    let mut pos = y;
    let mut steps = Vec::new();
    while let Some(e) = source.next_covering(&[pos])? {
        if e.time < bottom {
            break;
        }
        if e.time > s {
            continue;
        }
        let to = backward_step(side, pos, &e);
        steps.push(TraceStep {
            time: e.time,
            from: pos,
            to,
            radius: e.radius,
            selective: e.kind.is_selective(),
            event: e.id,
        });
        pos = to;
    }
    backward_trace(side, y, s, bottom, steps)
}

fn backward_trace(side: Side, y: f64, s: f64, bottom: f64, steps: Vec<TraceStep>) -> Result<ExtremalTrace> {
    let final_pos = steps.last().map_or(y, |st| st.to);
    let jumps: Vec<(f64, f64)> = steps.iter().rev().map(|st| (st.time, st.from)).collect();
    let path = CadlagPath::new(bottom, final_pos, jumps)?
        .with_end(s)?
        .into_left_continuous();
    Ok(ExtremalTrace {
        side,
        direction: Direction::Backward,
        steps,
        path,
    })
}

/// Backward left-most or right-most path from `(y, s)` over a duration, on a
/// fresh event stream run in reversed time. Requires `υ = 1`.
pub fn trace_backward_extremal(
    side: Side,
    y: f64,
    s: f64,
    duration: f64,
    params: &ModelParams,
    rng: SimRng,
) -> Result<ExtremalTrace> {
    require_full_impact(params, "the backward extremal path")?;
    if !(duration > 0.0) {
        return Err(SimError::Precondition(format!("duration must be positive, got {duration}")));
    }
    let mut sampler = EventSampler::new(params, SamplingMode::Hitting, rng);
    let mut pos = y;
    let mut steps = Vec::new();
    loop {
        let e = sampler.next_event(&[pos]);
        if e.time > duration {
            break;
        }
        let to = backward_step(side, pos, &e);
        steps.push(TraceStep {
            time: s - e.time,
            from: pos,
            to,
            radius: e.radius,
            selective: e.kind.is_selective(),
            event: e.id,
        });
        pos = to;
    }
    backward_trace(side, y, s, s - duration, steps)
}

/// Backward left-most path from `0` and backward right-most path from `gap`
/// on one fresh event stream. Returns the first backward time at which
/// `r̂ ≤ l̂`, or `None` if that has not happened by `tmax`.
pub fn backward_pair_meeting(gap: f64, tmax: f64, params: &ModelParams, rng: SimRng) -> Result<Option<f64>> {
    require_full_impact(params, "the backward pair")?;
    if !(gap > 0.0) {
        return Err(SimError::Precondition(format!("gap must be positive, got {gap}")));
    }
    let mut sampler = EventSampler::new(params, SamplingMode::Hitting, rng);
    let (mut l, mut r) = (0.0, gap);
    loop {
        let e = sampler.next_event(&[l, r]);
        if e.time > tmax {
            return Ok(None);
        }
        if e.covers(l) {
            l = backward_step(Side::Left, l, &e);
        }
        if e.covers(r) {
            r = backward_step(Side::Right, r, &e);
        }
        if r <= l {
            return Ok(Some(e.time));
        }
    }
}
