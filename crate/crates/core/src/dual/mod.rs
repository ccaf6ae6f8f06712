//! The dual process of branching and coalescing lineages.
//!
//! Lineages sit at exact real positions. Each event marks every covered
//! lineage independently with probability `υ`; marked lineages are replaced
//! by one lineage at the parent (neutral) or by two at the potential parents
//! (selective). Coalescence therefore happens only through shared marking.

mod diagnostics;
mod trace;

pub use diagnostics::{
    detect_crossing, enters_wedge, hop_cross, wedge_violations, CrossDirection, Crossing, Wedge,
    DEFAULT_HOP_BUDGET,
};
pub use trace::{
    backward_pair_meeting, backward_step, forward_step, trace_backward_extremal, trace_backward_with,
    trace_forward_extremal, trace_forward_with, Direction, ExtremalTrace, Side, TraceStep,
};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::events::{EventKind, EventSampler, EventSource, ReproductionEvent, SamplingMode};
use crate::model::ModelParams;
use crate::rng::{stream, SimRng, StreamTag};

pub type LineageId = u64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lineage {
    pub id: LineageId,
    pub position: f64,
}

/// Current lineage set `Ξ_t`, kept sorted by position.
#[derive(Debug, Clone, PartialEq)]
pub struct DualState {
    time: f64,
    lineages: Vec<Lineage>,
    positions: Vec<f64>,
    next_id: LineageId,
}

impl DualState {
    pub fn new(starts: &[f64]) -> Result<Self> {
        if starts.is_empty() {
            return Err(SimError::Precondition("dual needs at least one start point".into()));
        }
        if starts.iter().any(|x| !x.is_finite()) {
            return Err(SimError::InvalidParams("start points must be finite".into()));
        }
        let mut lineages: Vec<Lineage> = starts
            .iter()
            .enumerate()
            .map(|(i, &x)| Lineage {
                id: i as LineageId,
                position: x,
            })
            .collect();
        lineages.sort_by(|a, b| a.position.total_cmp(&b.position).then(a.id.cmp(&b.id)));
        let positions = lineages.iter().map(|l| l.position).collect();
        Ok(Self {
            time: 0.0,
            lineages,
            positions,
            next_id: starts.len() as LineageId,
        })
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn len(&self) -> usize {
        self.lineages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lineages.is_empty()
    }

    pub fn lineages(&self) -> &[Lineage] {
        &self.lineages
    }

    /// Sorted positions.
    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn min_position(&self) -> f64 {
        self.positions[0]
    }

    pub fn max_position(&self) -> f64 {
        self.positions[self.positions.len() - 1]
    }

    fn insert(&mut self, position: f64) -> Lineage {
        let l = Lineage {
            id: self.next_id,
            position,
        };
        self.next_id += 1;
        let k = self.positions.partition_point(|&p| p <= position);
        self.lineages.insert(k, l);
        self.positions.insert(k, position);
        l
    }
}

/// What an event did to the dual.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EventOutcome {
    pub covered: usize,
    pub marked: Vec<LineageId>,
    pub born: Vec<Lineage>,
}

/// Apply one event. With `υ = 1` no marking randomness is consumed.
pub fn apply_event(
    state: &mut DualState,
    event: &ReproductionEvent,
    upsilon: f64,
    rng: &mut SimRng,
) -> Result<EventOutcome> {
    if !(event.time > state.time) {
        return Err(SimError::Precondition(format!(
            "event at {} does not follow the dual clock {}",
            event.time, state.time
        )));
    }
    state.time = event.time;
    let lo = state.positions.partition_point(|&p| p < event.west_end());
    let hi = state.positions.partition_point(|&p| p <= event.east_end());
    let mut out = EventOutcome {
        covered: hi - lo,
        ..Default::default()
    };
    if hi == lo {
        return Ok(out);
    }
    let keep: Vec<bool> = (lo..hi)
        .map(|_| !(upsilon >= 1.0 || rng.gen::<f64>() < upsilon))
        .collect();
    if keep.iter().all(|&k| k) {
        return Ok(out);
    }
    let mut k = 0;
    let mut idx = lo;
    for _ in lo..hi {
        if keep[k] {
            idx += 1;
        } else {
            out.marked.push(state.lineages[idx].id);
            state.lineages.remove(idx);
            state.positions.remove(idx);
        }
        k += 1;
    }
    match event.kind {
        EventKind::Neutral { parent } => out.born.push(state.insert(parent)),
        EventKind::Selective { west, east } => {
            out.born.push(state.insert(west));
            out.born.push(state.insert(east));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgeRole {
    NeutralParent,
    SelectiveWest,
    SelectiveEast,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: LineageId,
    pub position: f64,
    pub birth_time: f64,
}

/// Edge from a pre-event lineage to a lineage created by the event.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub child: LineageId,
    pub parent: LineageId,
    pub event: u64,
    pub role: EdgeRole,
}

/// Recorded ancestry over dual time `[0, horizon]`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GenealogyGraph {
    pub horizon: f64,
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
    pub events: Vec<ReproductionEvent>,
    pub survivors: Vec<LineageId>,
}

impl GenealogyGraph {
    fn record(&mut self, event: &ReproductionEvent, out: &EventOutcome) {
        if out.marked.is_empty() {
            return;
        }
        self.events.push(*event);
        for b in &out.born {
            self.nodes.push(Node {
                id: b.id,
                position: b.position,
                birth_time: event.time,
            });
        }
        for &m in &out.marked {
            match event.kind {
                EventKind::Neutral { .. } => self.edges.push(Edge {
                    child: m,
                    parent: out.born[0].id,
                    event: event.id,
                    role: EdgeRole::NeutralParent,
                }),
                EventKind::Selective { .. } => {
                    self.edges.push(Edge {
                        child: m,
                        parent: out.born[0].id,
                        event: event.id,
                        role: EdgeRole::SelectiveWest,
                    });
                    self.edges.push(Edge {
                        child: m,
                        parent: out.born[1].id,
                        event: event.id,
                        role: EdgeRole::SelectiveEast,
                    });
                }
            }
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("genealogy serialises")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualOptions {
    pub mode: SamplingMode,
    /// Maximum number of lineage-event incidences (covered lineages summed
    /// over events).
    pub budget: usize,
    pub max_lineages: usize,
    pub record: bool,
}

impl Default for DualOptions {
    fn default() -> Self {
        Self {
            mode: SamplingMode::adaptive(),
            budget: 1_000_000,
            max_lineages: 100_000,
            record: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualRun {
    pub state: DualState,
    pub genealogy: Option<GenealogyGraph>,
    pub events: usize,
    pub incidences: usize,
}

/// Run the dual from `starts` over dual time `[0, horizon]` on an arbitrary
/// event source.
pub fn run_dual_from(
    source: &mut dyn EventSource,
    starts: &[f64],
    horizon: f64,
    upsilon: f64,
    opts: &DualOptions,
    mark_rng: &mut SimRng,
) -> Result<DualRun> {
    if !(horizon > 0.0) {
        return Err(SimError::Precondition(format!("horizon must be positive, got {horizon}")));
    }
    let mut state = DualState::new(starts)?;
    let mut graph = opts.record.then(|| {
        let mut g = GenealogyGraph {
            horizon,
            ..Default::default()
        };
        g.nodes = state
            .lineages()
            .iter()
            .map(|l| Node {
                id: l.id,
                position: l.position,
                birth_time: 0.0,
            })
            .collect();
        g.nodes.sort_by_key(|n| n.id);
        g
    });
    let (mut events, mut incidences) = (0usize, 0usize);
    while let Some(e) = source.next_covering(state.positions())? {
        if e.time > horizon {
            break;
        }
        let out = apply_event(&mut state, &e, upsilon, mark_rng)?;
        events += 1;
        incidences += out.covered;
        if incidences > opts.budget {
            return Err(SimError::Budget {
                what: "lineage-event incidences",
                limit: opts.budget,
                time: e.time,
            });
        }
        if state.len() > opts.max_lineages {
            return Err(SimError::Budget {
                what: "live lineages",
                limit: opts.max_lineages,
                time: e.time,
            });
        }
        if let Some(g) = graph.as_mut() {
            g.record(&e, &out);
        }
    }
    state.time = horizon;
    if let Some(g) = graph.as_mut() {
        g.survivors = state.lineages().iter().map(|l| l.id).collect();
    }
    Ok(DualRun {
        state,
        genealogy: graph,
        events,
        incidences,
    })
}

/// Run the dual for one replicate with its own event and marking streams.
pub fn run_dual(
    starts: &[f64],
    horizon: f64,
    params: &ModelParams,
    replicate: u64,
    opts: &DualOptions,
) -> Result<DualRun> {
    params.validate()?;
    let mut sampler = EventSampler::new(
        params,
        opts.mode,
        stream(params.seed, StreamTag::Events, replicate),
    );
    let mut mark_rng = stream(params.seed, StreamTag::Marking, replicate);
    run_dual_from(&mut sampler, starts, horizon, params.upsilon, opts, &mut mark_rng)
}

/// Position of the right-most (or left-most) lineage of `Ξ_T` for a dual
/// started from a single point.
pub fn extremal_ancestor(
    start: f64,
    horizon: f64,
    params: &ModelParams,
    replicate: u64,
    side: Side,
    opts: &DualOptions,
) -> Result<f64> {
    let opts = DualOptions {
        record: false,
        ..*opts
    };
    let run = run_dual(&[start], horizon, params, replicate, &opts)?;
    Ok(match side {
        Side::Right => run.state.max_position(),
        Side::Left => run.state.min_position(),
    })
}
