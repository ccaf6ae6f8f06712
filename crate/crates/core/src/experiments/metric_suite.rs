use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dual::{trace_backward_with, trace_forward_with, Side};
use crate::error::Result;
use crate::events::{EventSampler, EventSource, ReproductionEvent, SamplingMode};
use crate::model::ModelParams;
use crate::path::{
    compute_margins, d_m, d_prime, d_prime_exhaustive, d_prime_m, interpolate, CadlagPath,
    CompactifiedPath, MarginMap,
};
use crate::replicates::map_replicates;
use crate::rng::{stream, SimRng, StreamTag};

use super::table::{fmt_f64, Outcome, ResultTable};
use super::ExperimentSpec;

const TRIANGLE_TOL: f64 = 1e-9;
const MAX_JUMPS: usize = 4;

/// Random step path in `G` with at most `max_jumps` jumps.
pub fn random_step_path(rng: &mut SimRng, max_jumps: usize) -> CompactifiedPath {
    let sigma = -1.0 + 1.8 * rng.gen::<f64>();
    let k = rng.gen_range(0..=max_jumps);
    let mut times: Vec<f64> = (0..k).map(|_| sigma + (1.0 - sigma) * rng.gen::<f64>()).collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    times.retain(|&t| t > sigma && t < 1.0);
    let mut val = || 2.0 * rng.gen::<f64>() - 1.0;
    let v0 = val();
    let jumps: Vec<(f64, f64)> = times.into_iter().map(|t| (t, val())).collect();
    CompactifiedPath::step(sigma, v0, &jumps).expect("valid by construction")
}

/// A copy of `g` with jump times moved by up to `eps` and values by up to
/// `eps`, kept ordered and in range.
fn perturb(g: &CompactifiedPath, eps: f64, rng: &mut SimRng) -> CompactifiedPath {
    let sigma = g.sigma();
    let v0 = g.eval(sigma).expect("start");
    let clamp = |v: f64| v.clamp(-1.0, 1.0);
    let mut prev = sigma;
    let mut jumps = Vec::new();
    for t in g.jump_times().into_iter().filter(|&t| t < 1.0) {
        let v = g.eval(t).expect("inside");
        let nt = t + eps * (2.0 * rng.gen::<f64>() - 1.0);
        if nt > prev && nt < 1.0 {
            jumps.push((nt, clamp(v + eps * (2.0 * rng.gen::<f64>() - 1.0))));
            prev = nt;
        }
    }
    CompactifiedPath::step(sigma, clamp(v0 + eps * (2.0 * rng.gen::<f64>() - 1.0)), &jumps)
        .expect("valid by construction")
}

fn random_triple(rng: &mut SimRng) -> [CompactifiedPath; 3] {
    let f = random_step_path(rng, MAX_JUMPS);
    // Half the triples are near each other, where the infimum is delicate.
    if rng.gen::<bool>() {
        let g = perturb(&f, 0.05, rng);
        let h = perturb(&g, 0.05, rng);
        [f, g, h]
    } else {
        [f, random_step_path(rng, MAX_JUMPS), random_step_path(rng, MAX_JUMPS)]
    }
}

fn random_cadlag(rng: &mut SimRng) -> CadlagPath {
    let sigma = -3.0 + 4.0 * rng.gen::<f64>();
    let k = rng.gen_range(0..=MAX_JUMPS);
    let mut t = sigma;
    let jumps = (0..k)
        .map(|_| {
            t += 0.05 + rng.gen::<f64>();
            (t, 4.0 * rng.gen::<f64>() - 2.0)
        })
        .collect();
    CadlagPath::new(sigma, 4.0 * rng.gen::<f64>() - 2.0, jumps).expect("ordered")
}

/// `f` and a `g` with the same start and `sup |f - g| ≤ r`.
fn close_pair(rng: &mut SimRng, r: f64) -> (CadlagPath, CadlagPath) {
    let f = random_cadlag(rng);
    let mut times: Vec<f64> = f.jumps().iter().map(|j| j.0).collect();
    for _ in 0..rng.gen_range(0..3) {
        times.push(f.sigma() + 5.0 * rng.gen::<f64>() + 1e-6);
    }
    times.sort_by(f64::total_cmp);
    times.dedup();
    let mut wiggle = || r * (2.0 * rng.gen::<f64>() - 1.0);
    let g0 = f.v0() + wiggle();
    let gj = times
        .iter()
        .map(|&t| (t, f.value(t).expect("after start") + wiggle()))
        .collect();
    (f.clone(), CadlagPath::new(f.sigma(), g0, gj).expect("ordered"))
}

/// `sup |f - f̃|` for the interpolation `f̃` of `f`, exact for step paths.
/// Margins are clipped so that left-continuous ramps stay before the end.
pub fn interpolation_gap(f: &CadlagPath, margins: &MarginMap) -> Result<f64> {
    let mut own = Vec::with_capacity(f.jump_count());
    for &(t, _) in f.jumps() {
        let mut m = margins.get(t).unwrap_or(f64::INFINITY);
        if f.is_left_continuous() && f.end().is_finite() {
            m = m.min(0.5 * (f.end() - t));
        }
        own.push((t, m));
    }
    let poly = interpolate(f, &MarginMap::new(own)?)?;
    let mut times: Vec<f64> = poly.knots().iter().map(|k| k.0).chain(f.jumps().iter().map(|j| j.0)).collect();
    if f.end().is_finite() {
        times.push(f.end());
    }
    let mut sup: f64 = 0.0;
    for t in times {
        let Some(p) = poly.value(t) else { continue };
        for v in [f.value_left(t), f.value(t), f.value_right(t)].into_iter().flatten() {
            sup = sup.max((p - v).abs());
        }
    }
    Ok(sup)
}

/// Passes events through and keeps a copy; with `flip = Some(s)` the times
/// are mapped to `s - t` so a forward sampler drives a backward trace.
struct Recording<'a, 'p> {
    inner: &'a mut EventSampler<'p>,
    flip: Option<f64>,
    seen: Vec<ReproductionEvent>,
}

impl EventSource for Recording<'_, '_> {
    fn next_covering(&mut self, positions: &[f64]) -> Result<Option<ReproductionEvent>> {
        let mut e = self.inner.next_event(positions);
        if let Some(s) = self.flip {
            e.time = s - e.time;
        }
        self.seen.push(e);
        Ok(Some(e))
    }
}

/// Largest `sup |f - f̃|` over a forward and a backward traced path, with
/// margins from the events that moved the path.
fn traced_gap(params: &ModelParams, horizon: f64, k: u64) -> Result<f64> {
    let side = if k % 2 == 0 { Side::Left } else { Side::Right };
    let mut gap: f64 = 0.0;
    for backward in [false, true] {
        let tag = if backward { StreamTag::Backward } else { StreamTag::Forward };
        let mut sampler = EventSampler::new(params, SamplingMode::Hitting, stream(params.seed, tag, k));
        let mut rec = Recording {
            inner: &mut sampler,
            flip: backward.then_some(horizon),
            seen: Vec::new(),
        };
        let trace = if backward {
            trace_backward_with(side, 0.0, horizon, 0.0, &mut rec)?
        } else {
            trace_forward_with(side, 0.0, 0.0, horizon, &mut rec)?
        };
        let margins = compute_margins(&rec.seen, horizon)?;
        gap = gap.max(interpolation_gap(&trace.path, &margins)?);
    }
    Ok(gap)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
struct Check {
    trials: u64,
    failures: u64,
    max_error: f64,
}

impl Check {
    fn record(&mut self, error: f64, fail: bool) {
        self.trials += 1;
        self.failures += u64::from(fail);
        if error.is_finite() {
            self.max_error = self.max_error.max(error);
        } else {
            self.max_error = f64::INFINITY;
        }
    }

    fn merge(&mut self, o: &Check) {
        self.trials += o.trials;
        self.failures += o.failures;
        self.max_error = self.max_error.max(o.max_error);
    }
}

const CHECKS: [&str; 9] = [
    "identity",
    "nonnegativity",
    "symmetry",
    "symmetry_d_m",
    "triangle",
    "dp_vs_exhaustive",
    "common_start_sup",
    "envelope",
    "interpolation",
];

fn one_triple(spec: &ExperimentSpec, k: u64) -> Result<[Check; 9]> {
    let mut c = [Check::default(); 9];
    let mut rng = stream(spec.params.seed, StreamTag::Auxiliary(4), k);
    let [f, g, h] = random_triple(&mut rng);
    let (fg, gh, fh) = (d_prime(&f, &g)?, d_prime(&g, &h)?, d_prime(&f, &h)?);
    let ff = d_prime(&f, &f)?;
    c[0].record(ff, ff != 0.0);
    let neg = fg.min(gh).min(fh);
    c[1].record((-neg).max(0.0), neg < 0.0);
    let gf = d_prime(&g, &f)?;
    c[2].record((fg - gf).abs(), fg != gf);
    let (a, b) = (random_cadlag(&mut rng), random_cadlag(&mut rng));
    let (ab, ba) = (d_m(&a, &b)?.value, d_m(&b, &a)?.value);
    c[3].record((ab - ba).abs(), ab != ba);
    let excess = fh - (fg + gh);
    c[4].record(excess.max(0.0), excess > TRIANGLE_TOL);
    let ex = d_prime_exhaustive(&f, &g)?;
    c[5].record((ex - fg).abs(), (ex - fg).abs() > 1e-12);
    let r = 0.5 * rng.gen::<f64>();
    let (p, q) = close_pair(&mut rng, r);
    let d = d_prime_m(&p, &q)?;
    c[6].record((d - r).max(0.0), d > r);
    for ca in [CompactifiedPath::from_path(&a), CompactifiedPath::from_path(&b)] {
        for _ in 0..4 {
            let t = ca.sigma() + (2.0 - ca.sigma()) * rng.gen::<f64>();
            c[7].record(0.0, !ca.envelope_bound_holds(t));
        }
    }
    if k % 10 == 0 {
        let bound = 2.0 * spec.params.max_rescaled_radius();
        let gap = traced_gap(&spec.params.with_upsilon(1.0)?, spec.horizon, k / 10)?;
        c[8].record(gap / bound, !(gap < bound));
    }
    Ok(c)
}

/// Metric axioms of `d′` on random step-path triples, the DP against an
/// exhaustive search, the sup bound for paths with a common start, the
/// compactification envelope, and the interpolation bound `2R/√n` on traced
/// paths (one traced pair per ten triples; `max_error` is the ratio to the
/// bound).
pub fn metric_selftest(spec: &ExperimentSpec) -> Result<ResultTable> {
    let per = map_replicates(spec.replicates, spec.workers, |k| one_triple(spec, k))?;
    let mut tot = [Check::default(); 9];
    for c in &per {
        for (t, x) in tot.iter_mut().zip(c) {
            t.merge(x);
        }
    }
    let mut table = ResultTable::new(spec.name, &["check", "trials", "failures", "max_error"], spec.provenance());
    let mut failed = Vec::new();
    for (name, c) in CHECKS.iter().zip(&tot) {
        table.push_row(vec![
            name.to_string(),
            c.trials.to_string(),
            c.failures.to_string(),
            fmt_f64(c.max_error),
        ])?;
        if c.failures > 0 {
            failed.push(*name);
        }
    }
    if !failed.is_empty() {
        table.outcome = Outcome::StructuralFailure {
            detail: format!("failed checks: {}", failed.join(", ")),
        };
    }
    table.summary = serde_json::json!({
        "triangle_tolerance": TRIANGLE_TOL,
        "max_jumps": MAX_JUMPS,
        "interpolation_bound": 2.0 * spec.params.max_rescaled_radius(),
        "checks": CHECKS.iter().zip(&tot).map(|(n, c)| (n.to_string(), serde_json::to_value(c).expect("plain"))).collect::<serde_json::Map<_, _>>(),
        "all_pass": failed.is_empty(),
    });
    Ok(table)
}
