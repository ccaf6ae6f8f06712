use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::events::{box_preference_ratio, EventSampler, SamplingMode, DEFAULT_CROSSOVER};
use crate::rng::{stream, StreamTag};

use super::table::{fmt_f64, ResultTable};
use super::{ExperimentSpec, Stopwatch};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossoverPoint {
    pub lineages: usize,
    pub spacing: f64,
    pub ratio: f64,
    pub hitting_ns: f64,
    pub box_ns: f64,
}

/// Nanoseconds per event of the two samplers on fixed clouds of lineages,
/// against the ratio the adaptive sampler switches on. Timings are wall
/// clock and vary between runs.
pub fn sampler_crossover(spec: &ExperimentSpec) -> Result<ResultTable> {
    let p = &spec.params;
    let rmax = p.max_rescaled_radius();
    let events = spec.replicates.max(100);
    let mut points = Vec::new();
    for spacing in [0.5 * rmax, 2.0 * rmax, 8.0 * rmax] {
        for k in [1usize, 2, 4, 8, 16, 32, 64, 128, 256] {
            let positions: Vec<f64> = (0..k).map(|i| (i as f64 - 0.5 * (k - 1) as f64) * spacing).collect();
            let time = |mode: SamplingMode| {
                let mut s = EventSampler::new(p, mode, stream(p.seed, StreamTag::Auxiliary(5), k as u64));
                let watch = Stopwatch::start();
                let mut acc = 0.0;
                for _ in 0..events {
                    acc += s.next_event(&positions).center;
                }
                std::hint::black_box(acc);
                watch.seconds() * 1e9 / events as f64
            };
            points.push(CrossoverPoint {
                lineages: k,
                spacing,
                ratio: box_preference_ratio(p, &positions),
                hitting_ns: time(SamplingMode::Hitting),
                box_ns: time(SamplingMode::Box),
            });
        }
    }
    let mut table = ResultTable::new(
        spec.name,
        &["lineages", "spacing", "ratio", "hitting_ns", "box_ns"],
        spec.provenance(),
    );
    for c in &points {
        table.push_row(vec![
            c.lineages.to_string(),
            fmt_f64(c.spacing),
            fmt_f64(c.ratio),
            fmt_f64(c.hitting_ns),
            fmt_f64(c.box_ns),
        ])?;
    }
    // Smallest ratio above which box sampling always wins.
    let mut sorted = points.clone();
    sorted.sort_by(|a, b| a.ratio.total_cmp(&b.ratio));
    let suggested = (0..sorted.len())
        .find(|&i| sorted[i..].iter().all(|c| c.box_ns < c.hitting_ns))
        .map(|i| sorted[i].ratio);
    table.summary = serde_json::json!({
        "events_per_timing": events,
        "current_crossover": DEFAULT_CROSSOVER,
        "suggested_crossover": suggested,
    });
    Ok(table)
}
