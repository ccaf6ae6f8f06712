//! The driving Poisson point process of reproduction events.
//!
//! At stage `n` events arrive with intensity `√n dx ⊗ n dt ⊗ μⁿ(dr)` where
//! `μⁿ` carries the atoms of `μ` at radii `r_i/√n`. Two exact sampling
//! strategies are provided:
//!
//! * whole-box sampling ([`sample_events_box`]), which draws every event whose
//!   interval meets a space-time window;
//! * lineage-conditioned sampling ([`next_event_hitting`]), which draws the
//!   next event covering at least one of a finite set of positions directly.
//!
//! [`EventSampler`] wraps both behind the [`EventSource`] trait and can switch
//! between them on the fly. Switching is exact: a discarded look-ahead only
//! ever depends on the past, so the future of the Poisson process can be
//! resampled.

use std::collections::VecDeque;
use std::fmt::Write as _;

use rand::Rng;
use rand_distr::{Distribution, Exp, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::model::ModelParams;
use crate::rng::SimRng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum EventKind {
    Neutral { parent: f64 },
    /// Two potential parents, `west < east`.
    Selective { west: f64, east: f64 },
}

impl EventKind {
    pub fn is_selective(&self) -> bool {
        matches!(self, EventKind::Selective { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReproductionEvent {
    pub id: u64,
    pub time: f64,
    pub center: f64,
    /// Rescaled radius.
    pub radius: f64,
    pub kind: EventKind,
}

impl ReproductionEvent {
    /// Closed-interval coverage `|y - x| <= rho`.
    #[inline]
    pub fn covers(&self, y: f64) -> bool {
        (y - self.center).abs() <= self.radius
    }

    pub fn west_end(&self) -> f64 {
        self.center - self.radius
    }

    pub fn east_end(&self) -> f64 {
        self.center + self.radius
    }

    /// True if at least one of the sorted `positions` lies in the interval.
    pub fn covers_any(&self, positions: &[f64]) -> bool {
        covers_any_sorted(self.center, self.radius, positions)
    }
}

#[inline]
fn covers_any_sorted(center: f64, radius: f64, positions: &[f64]) -> bool {
    let lo = center - radius;
    let i = positions.partition_point(|&p| p < lo);
    i < positions.len() && positions[i] <= center + radius
}

/// Events in a generation window, ordered by strictly increasing time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventStream {
    pub events: Vec<ReproductionEvent>,
    pub space: (f64, f64),
    pub time: (f64, f64),
    pub label: String,
}

impl EventStream {
    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// CSV with header `t,x,rho,kind,z1,z2`; `z2` is empty for neutral events.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,x,rho,kind,z1,z2\n");
        for e in &self.events {
            match e.kind {
                EventKind::Neutral { parent } => {
                    let _ = writeln!(out, "{},{},{},neutral,{},", e.time, e.center, e.radius, parent);
                }
                EventKind::Selective { west, east } => {
                    let _ = writeln!(
                        out,
                        "{},{},{},selective,{},{}",
                        e.time, e.center, e.radius, west, east
                    );
                }
            }
        }
        out
    }

    /// Replay the stored events forwards (increasing time) or backwards.
    pub fn replay(&self, reverse: bool) -> ReplaySource<'_> {
        ReplaySource::new(self, reverse)
    }
}

/// Uniform draw on the open interval `(center - rho, center + rho)`.
fn uniform_open(center: f64, rho: f64, rng: &mut SimRng) -> f64 {
    loop {
        let u: f64 = rng.gen();
        if u > 0.0 {
            let z = center - rho + 2.0 * rho * u;
            if z > center - rho && z < center + rho {
                return z;
            }
        }
    }
}

/// Parent locations for an event of the given kind. Selective draws are
/// resampled on exact collision and returned ordered.
pub fn sample_parents(center: f64, rho: f64, selective: bool, rng: &mut SimRng) -> EventKind {
    if !selective {
        return EventKind::Neutral {
            parent: uniform_open(center, rho, rng),
        };
    }
    loop {
        let a = uniform_open(center, rho, rng);
        let b = uniform_open(center, rho, rng);
        if a != b {
            let (west, east) = if a < b { (a, b) } else { (b, a) };
            return EventKind::Selective { west, east };
        }
    }
}

fn draw_event(
    params: &ModelParams,
    id: u64,
    time: f64,
    center: f64,
    radius: f64,
    rng: &mut SimRng,
) -> ReproductionEvent {
    let selective = rng.gen::<f64>() < params.selection_probability();
    ReproductionEvent {
        id,
        time,
        center,
        radius,
        kind: sample_parents(center, radius, selective, rng),
    }
}

/// Every event whose interval meets `space × time`.
///
/// Centres for atom `i` are drawn on `[a - ρ_i, b + ρ_i]`; `a == b` samples
/// the events covering a single point. Fails with a budget error when the
/// expected event count exceeds `budget`.
pub fn sample_events_box(
    params: &ModelParams,
    space: (f64, f64),
    time: (f64, f64),
    budget: usize,
    rng: &mut SimRng,
) -> Result<EventStream> {
    let (a, b) = space;
    let (t0, t1) = time;
    if !(a <= b) || !(t0 <= t1) || !a.is_finite() || !b.is_finite() {
        return Err(SimError::Precondition(format!(
            "box window must satisfy a <= b and t0 <= t1, got [{a},{b}] x [{t0},{t1}]"
        )));
    }
    let label = format!("box[{a},{b}]x[{t0},{t1}]");
    if t0 == t1 {
        return Ok(EventStream {
            events: Vec::new(),
            space,
            time,
            label,
        });
    }
    let radii = params.rescaled_radii();
    let expected: f64 = params
        .mu
        .atoms()
        .iter()
        .zip(&radii)
        .map(|(atom, rho)| params.centre_intensity(atom.weight) * (b - a + 2.0 * rho) * (t1 - t0))
        .sum();
    if !(expected <= budget as f64) {
        return Err(SimError::Budget {
            what: "expected event count",
            limit: budget,
            time: t0,
        });
    }
    let mut raw: Vec<(f64, f64, f64)> = Vec::new();
    for (atom, &rho) in params.mu.atoms().iter().zip(&radii) {
        let mean = params.centre_intensity(atom.weight) * (b - a + 2.0 * rho) * (t1 - t0);
        let count = Poisson::new(mean).map(|d| d.sample(rng) as usize).unwrap_or(0);
        for _ in 0..count {
            let t = t0 + (t1 - t0) * rng.gen::<f64>();
            let x = a - rho + (b - a + 2.0 * rho) * rng.gen::<f64>();
            raw.push((t, x, rho));
        }
    }
    raw.sort_by(|p, q| p.0.total_cmp(&q.0));
    raw.dedup_by(|p, q| p.0 == q.0);
    let events = raw
        .into_iter()
        .enumerate()
        .map(|(i, (t, x, rho))| draw_event(params, i as u64, t, x, rho, rng))
        .collect();
    Ok(EventStream {
        events,
        space,
        time,
        label,
    })
}

/// Merge `[p - rho, p + rho]` over sorted positions into `out`; returns the
/// total length.
pub fn covering_union(positions: &[f64], rho: f64, out: &mut Vec<(f64, f64)>) -> f64 {
    out.clear();
    let mut total = 0.0;
    for &p in positions {
        let (lo, hi) = (p - rho, p + rho);
        match out.last_mut() {
            Some(last) if lo <= last.1 => {
                total += hi - last.1;
                last.1 = hi;
            }
            _ => {
                out.push((lo, hi));
                total += hi - lo;
            }
        }
    }
    total
}

/// Length of the union of the covering-centre intervals, without storing them.
pub fn covering_length(positions: &[f64], rho: f64) -> f64 {
    let mut total = 0.0;
    let mut end = f64::NEG_INFINITY;
    for &p in positions {
        let (lo, hi) = (p - rho, p + rho);
        if lo <= end {
            total += hi - end;
        } else {
            total += hi - lo;
        }
        end = hi;
    }
    total
}

/// `K × covered / window` for sorted, nonempty `positions`: the quantity the
/// adaptive sampler compares with its crossover.
pub fn box_preference_ratio(params: &ModelParams, positions: &[f64]) -> f64 {
    let k = positions.len() as f64;
    let rmax = params.max_rescaled_radius();
    let covered = covering_length(positions, rmax);
    let span = positions[positions.len() - 1] - positions[0];
    let window = span + 2.0 * (24.0 * rmax).max(0.25 * span);
    k * covered / window
}

/// Total arrival rate `n √n Σ w_i Leb(U_i)` of events covering at least one
/// of the sorted positions.
pub fn hitting_rate(params: &ModelParams, positions: &[f64]) -> f64 {
    params
        .mu
        .atoms()
        .iter()
        .zip(params.rescaled_radii())
        .map(|(a, rho)| params.centre_intensity(a.weight) * covering_length(positions, rho))
        .sum()
}

/// The first event after `t0` covering at least one of `positions`.
pub fn next_event_hitting(
    params: &ModelParams,
    positions: &[f64],
    t0: f64,
    rng: &mut SimRng,
) -> Result<ReproductionEvent> {
    if positions.is_empty() {
        return Err(SimError::Precondition("positions must be nonempty".into()));
    }
    let mut sorted = positions.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut sampler = EventSampler::new(params, SamplingMode::Hitting, rng.clone());
    sampler.set_time(t0);
    let event = sampler.draw_hitting(&sorted);
    *rng = sampler.into_rng();
    Ok(event)
}

/// Anything that yields, in its own time order, the next event covering at
/// least one of a sorted set of positions.
pub trait EventSource {
    fn next_covering(&mut self, positions: &[f64]) -> Result<Option<ReproductionEvent>>;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SamplingMode {
    Hitting,
    Box,
    /// Hitting while `K × covered / window` is below the crossover, box above.
    Adaptive { crossover: f64 },
}

/// Default crossover for [`SamplingMode::Adaptive`], set by the
/// `sampler_crossover` micro-benchmark in `experiments`.
pub const DEFAULT_CROSSOVER: f64 = 4.0;

impl SamplingMode {
    pub fn adaptive() -> Self {
        SamplingMode::Adaptive {
            crossover: DEFAULT_CROSSOVER,
        }
    }
}

/// Expected number of events in one box slab.
const SLAB_TARGET_EVENTS: f64 = 2048.0;

#[derive(Debug, Clone)]
struct Slab {
    lo: f64,
    hi: f64,
    end: f64,
    /// (time, centre, atom index)
    pending: VecDeque<(f64, f64, usize)>,
}

/// Exact sampler of the event process, lineage-conditioned or box based.
#[derive(Debug, Clone)]
pub struct EventSampler<'p> {
    params: &'p ModelParams,
    radii: Vec<f64>,
    intensities: Vec<f64>,
    mode: SamplingMode,
    rng: SimRng,
    time: f64,
    next_id: u64,
    scratch: Vec<(f64, f64)>,
    slab: Option<Slab>,
    box_draws: u64,
    hitting_draws: u64,
}

impl<'p> EventSampler<'p> {
    pub fn new(params: &'p ModelParams, mode: SamplingMode, rng: SimRng) -> Self {
        let radii = params.rescaled_radii();
        let intensities = params
            .mu
            .atoms()
            .iter()
            .map(|a| params.centre_intensity(a.weight))
            .collect();
        Self {
            params,
            radii,
            intensities,
            mode,
            rng,
            time: 0.0,
            next_id: 0,
            scratch: Vec::new(),
            slab: None,
            box_draws: 0,
            hitting_draws: 0,
        }
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// Restart the clock; any look-ahead is discarded.
    pub fn set_time(&mut self, t: f64) {
        self.time = t;
        self.slab = None;
    }

    pub fn into_rng(self) -> SimRng {
        self.rng
    }

    pub fn rng_mut(&mut self) -> &mut SimRng {
        &mut self.rng
    }

    /// (events returned by box sampling, events returned by hitting sampling)
    pub fn draw_counts(&self) -> (u64, u64) {
        (self.box_draws, self.hitting_draws)
    }

    fn make_event(&mut self, time: f64, center: f64, radius: f64) -> ReproductionEvent {
        let id = self.next_id;
        self.next_id += 1;
        draw_event(self.params, id, time, center, radius, &mut self.rng)
    }

    /// Lineage-conditioned draw; `positions` sorted and nonempty.
    fn draw_hitting(&mut self, positions: &[f64]) -> ReproductionEvent {
        let natoms = self.radii.len();
        let (atom, rate) = if natoms == 1 {
            let len = covering_length(positions, self.radii[0]);
            (0, self.intensities[0] * len)
        } else {
            let mut rates = [0.0f64; 16];
            let mut heap_rates;
            let rates: &mut [f64] = if natoms <= 16 {
                &mut rates[..natoms]
            } else {
                heap_rates = vec![0.0; natoms];
                &mut heap_rates
            };
            let mut total = 0.0;
            for (i, r) in rates.iter_mut().enumerate() {
                *r = self.intensities[i] * covering_length(positions, self.radii[i]);
                total += *r;
            }
            let mut u = self.rng.gen::<f64>() * total;
            let mut chosen = natoms - 1;
            for (i, &r) in rates.iter().enumerate() {
                if u < r {
                    chosen = i;
                    break;
                }
                u -= r;
            }
            (chosen, total)
        };
        let dt = Exp::new(rate).expect("positive rate").sample(&mut self.rng);
        self.time += dt;
        let rho = self.radii[atom];
        let center = if positions.len() == 1 {
            positions[0] - rho + 2.0 * rho * self.rng.gen::<f64>()
        } else {
            let mut scratch = std::mem::take(&mut self.scratch);
            let len = covering_union(positions, rho, &mut scratch);
            let mut u = self.rng.gen::<f64>() * len;
            let mut c = scratch[scratch.len() - 1].1;
            for &(lo, hi) in &scratch {
                let w = hi - lo;
                if u < w {
                    c = lo + u;
                    break;
                }
                u -= w;
            }
            self.scratch = scratch;
            c
        };
        self.hitting_draws += 1;
        let t = self.time;
        self.make_event(t, center, rho)
    }

    fn new_slab(&mut self, positions: &[f64]) {
        let min = positions[0];
        let max = positions[positions.len() - 1];
        let rmax = self.params.max_rescaled_radius();
        let margin = (24.0 * rmax).max(0.25 * (max - min));
        let (lo, hi) = (min - margin, max + margin);
        let rate: f64 = self
            .radii
            .iter()
            .zip(&self.intensities)
            .map(|(rho, lam)| lam * (hi - lo + 2.0 * rho))
            .sum();
        let span = SLAB_TARGET_EVENTS / rate;
        let start = self.time;
        let mut pending: Vec<(f64, f64, usize)> = Vec::new();
        for (i, (&rho, &lam)) in self.radii.iter().zip(&self.intensities).enumerate() {
            let width = hi - lo + 2.0 * rho;
            let mean = lam * width * span;
            let count = Poisson::new(mean)
                .map(|d| d.sample(&mut self.rng) as usize)
                .unwrap_or(0);
            for _ in 0..count {
                let t = start + span * self.rng.gen::<f64>();
                let x = lo - rho + width * self.rng.gen::<f64>();
                pending.push((t, x, i));
            }
        }
        pending.sort_by(|p, q| p.0.total_cmp(&q.0));
        self.slab = Some(Slab {
            lo,
            hi,
            end: start + span,
            pending: pending.into(),
        });
    }

    fn slab_valid(&self, positions: &[f64]) -> bool {
        match &self.slab {
            Some(s) => positions[0] >= s.lo && positions[positions.len() - 1] <= s.hi,
            None => false,
        }
    }

    fn draw_box(&mut self, positions: &[f64]) -> ReproductionEvent {
        loop {
            if !self.slab_valid(positions) {
                self.new_slab(positions);
            }
            let slab = self.slab.as_mut().expect("slab present");
            while let Some((t, x, atom)) = slab.pending.pop_front() {
                let rho = self.radii[atom];
                if covers_any_sorted(x, rho, positions) {
                    self.time = t;
                    self.box_draws += 1;
                    return self.make_event(t, x, rho);
                }
            }
            self.time = slab.end;
            self.slab = None;
        }
    }

    fn prefer_box(&self, positions: &[f64], crossover: f64) -> bool {
        box_preference_ratio(self.params, positions) > crossover
    }

    /// Next event covering one of the sorted, nonempty `positions`.
    pub fn next_event(&mut self, positions: &[f64]) -> ReproductionEvent {
        debug_assert!(!positions.is_empty());
        match self.mode {
            SamplingMode::Hitting => self.draw_hitting(positions),
            SamplingMode::Box => self.draw_box(positions),
            SamplingMode::Adaptive { crossover } => {
                if self.slab_valid(positions) || self.prefer_box(positions, crossover) {
                    self.draw_box(positions)
                } else {
                    self.slab = None;
                    self.draw_hitting(positions)
                }
            }
        }
    }
}

impl EventSource for EventSampler<'_> {
    fn next_covering(&mut self, positions: &[f64]) -> Result<Option<ReproductionEvent>> {
        if positions.is_empty() {
            return Err(SimError::Precondition("positions must be nonempty".into()));
        }
        Ok(Some(self.next_event(positions)))
    }
}

/// Replays a stored stream, forwards or backwards in time, yielding only the
/// events that cover a current position. Positions must stay inside the
/// stream's spatial window.
#[derive(Debug, Clone)]
pub struct ReplaySource<'s> {
    stream: &'s EventStream,
    reverse: bool,
    cursor: usize,
}

impl<'s> ReplaySource<'s> {
    pub fn new(stream: &'s EventStream, reverse: bool) -> Self {
        Self {
            stream,
            reverse,
            cursor: 0,
        }
    }

    /// Skip to the first event after `t` in replay order.
    pub fn seek(&mut self, t: f64) {
        let ev = &self.stream.events;
        self.cursor = if self.reverse {
            ev.len() - ev.partition_point(|e| e.time < t)
        } else {
            ev.partition_point(|e| e.time <= t)
        };
    }
}

impl EventSource for ReplaySource<'_> {
    fn next_covering(&mut self, positions: &[f64]) -> Result<Option<ReproductionEvent>> {
        let (a, b) = self.stream.space;
        if let (Some(&lo), Some(&hi)) = (positions.first(), positions.last()) {
            if lo < a || hi > b {
                return Err(SimError::Window(format!(
                    "positions [{lo}, {hi}] left the stored window [{a}, {b}]"
                )));
            }
        }
        let ev = &self.stream.events;
        while self.cursor < ev.len() {
            let idx = if self.reverse {
                ev.len() - 1 - self.cursor
            } else {
                self.cursor
            };
            self.cursor += 1;
            if ev[idx].covers_any(positions) {
                return Ok(Some(ev[idx]));
            }
        }
        Ok(None)
    }
}
