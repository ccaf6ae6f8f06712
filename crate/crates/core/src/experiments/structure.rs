use std::fmt::Write as _;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dual::{
    backward_pair_meeting, detect_crossing, enters_wedge, hop_cross, trace_backward_extremal,
    trace_backward_with, trace_forward_extremal, trace_forward_with, CrossDirection, ExtremalTrace,
    Side, Wedge, DEFAULT_HOP_BUDGET,
};
use crate::error::{Result, SimError};
use crate::events::{sample_events_box, EventStream};
use crate::limit::{first_passage_oracle, ks_one_sample, ks_two_sample, InverseGaussian, KsResult};
use crate::model::ModelParams;
use crate::path::{compute_margins, CadlagPath, MarginMap};
use crate::replicates::map_replicates;
use crate::rng::{stream, SimRng, StreamTag};
use crate::stats::Summary;

use super::metric_suite::interpolation_gap;
use super::table::{fmt_f64, Attachment, Outcome, ResultTable};
use super::ExperimentSpec;

const TRACE_BATCH: u64 = 64;
const MAX_TRACES: u64 = 1 << 20;

/// Jumps of forward left-most paths and negated jumps of backward left-most
/// paths, by event class, scaled by `√n`. Each list is cut at `target`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SamelawJumps {
    pub forward_neutral: Vec<f64>,
    pub backward_neutral: Vec<f64>,
    pub forward_selective: Vec<f64>,
    pub backward_selective: Vec<f64>,
    pub traces: u64,
}

/// Collect at least `target` jumps per class and direction from left-most
/// traces of length `horizon`. Selective classes are skipped when `α = 0`.
pub fn samelaw_jumps(
    params: &ModelParams,
    target: usize,
    horizon: f64,
    workers: Option<usize>,
) -> Result<SamelawJumps> {
    let p = params.with_upsilon(1.0)?;
    let want_selective = p.alpha > 0.0;
    let scale = p.sqrt_n();
    let mut out = SamelawJumps::default();
    let full = |v: &Vec<f64>| v.len() >= target;
    let mut start = 0;
    while !(full(&out.forward_neutral)
        && full(&out.backward_neutral)
        && (!want_selective || (full(&out.forward_selective) && full(&out.backward_selective))))
    {
        if start >= MAX_TRACES {
            return Err(SimError::Budget {
                what: "jump-law traces",
                limit: MAX_TRACES as usize,
                time: f64::NAN,
            });
        }
        let batch = map_replicates(TRACE_BATCH, workers, |j| {
            let k = start + j;
            let f = trace_forward_extremal(Side::Left, 0.0, 0.0, horizon, &p, stream(p.seed, StreamTag::Forward, k))?;
            let b = trace_backward_extremal(Side::Left, 0.0, horizon, horizon, &p, stream(p.seed, StreamTag::Backward, k))?;
            Ok((f, b))
        })?;
        for (f, b) in batch {
            out.forward_neutral.extend(f.rotated_increments(false).iter().map(|x| x * scale));
            out.backward_neutral.extend(b.rotated_increments(false).iter().map(|x| x * scale));
            out.forward_selective.extend(f.rotated_increments(true).iter().map(|x| x * scale));
            out.backward_selective.extend(b.rotated_increments(true).iter().map(|x| x * scale));
        }
        start += TRACE_BATCH;
    }
    for v in [
        &mut out.forward_neutral,
        &mut out.backward_neutral,
        &mut out.forward_selective,
        &mut out.backward_selective,
    ] {
        v.truncate(target);
    }
    out.traces = start;
    Ok(out)
}

/// Two-sample KS per event class between forward left-most jumps and
/// rotated backward left-most jumps.
pub fn run_samelaw(spec: &ExperimentSpec) -> Result<ResultTable> {
    let jumps = samelaw_jumps(&spec.params, spec.replicates as usize, spec.horizon, spec.workers)?;
    let mut table = ResultTable::new(
        spec.name,
        &[
            "class", "forward_jumps", "backward_jumps", "ks_statistic", "p_value", "forward_mean",
            "backward_mean", "forward_var", "backward_var",
        ],
        spec.provenance(),
    );
    let mut summary = serde_json::Map::new();
    let mut raw = String::from("class,direction,increment\n");
    for (class, f, b) in [
        ("neutral", &jumps.forward_neutral, &jumps.backward_neutral),
        ("selective", &jumps.forward_selective, &jumps.backward_selective),
    ] {
        for (dir, v) in [("forward", f), ("backward", b)] {
            for x in v {
                let _ = writeln!(raw, "{class},{dir},{x}");
            }
        }
        let ks = ks_two_sample(f, b).ok();
        let (sf, sb): (Summary, Summary) = (f.iter().copied().collect(), b.iter().copied().collect());
        table.push_row(vec![
            class.into(),
            f.len().to_string(),
            b.len().to_string(),
            ks.map(|k| fmt_f64(k.statistic)).unwrap_or_default(),
            ks.map(|k| fmt_f64(k.p_value)).unwrap_or_default(),
            fmt_f64(sf.mean()),
            fmt_f64(sb.mean()),
            fmt_f64(sf.variance()),
            fmt_f64(sb.variance()),
        ])?;
        summary.insert(class.into(), serde_json::json!({ "ks": ks, "pass": ks.map(|k| k.p_value > 0.01) }));
    }
    summary.insert("traces".into(), jumps.traces.into());
    summary.insert("scale".into(), "jumps are multiplied by sqrt(n)".into());
    table.summary = summary.into();
    table.attachments.push(Attachment {
        file_name: "samelaw-jumps.csv".into(),
        contents: raw,
    });
    Ok(table)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeetingSample {
    pub gap: f64,
    pub tmax: f64,
    /// `None` for replicates still apart at `tmax`.
    pub times: Vec<Option<f64>>,
    pub oracle: InverseGaussian,
    /// KS against the oracle conditioned on meeting by `tmax`.
    pub ks: Option<KsResult>,
    pub censored: usize,
}

/// First meeting times of a backward left-most path from 0 and a backward
/// right-most path from `gap`, against the first-passage law of a gap with
/// drift `-2ζ` and variance rate `2ξ²` (the derived constant).
pub fn meeting_sample(
    params: &ModelParams,
    gap: f64,
    tmax: f64,
    replicates: u64,
    workers: Option<usize>,
) -> Result<MeetingSample> {
    let p = params.with_upsilon(1.0)?;
    let lc = p.limit_constants();
    let oracle = first_passage_oracle(gap, 2.0 * lc.zeta, 2.0 * lc.xi2_derived)?;
    let times = map_replicates(replicates, workers, |k| {
        backward_pair_meeting(gap, tmax, &p, stream(p.seed, StreamTag::Auxiliary(2), k))
    })?;
    let met: Vec<f64> = times.iter().flatten().copied().collect();
    let censored = times.len() - met.len();
    let fmax = oracle.cdf(tmax);
    let ks = ks_one_sample(&met, |t| (oracle.cdf(t) / fmax).min(1.0)).ok();
    Ok(MeetingSample {
        gap,
        tmax,
        times,
        oracle,
        ks,
        censored,
    })
}

pub fn run_meeting_time(spec: &ExperimentSpec) -> Result<ResultTable> {
    let gap = match spec.points.as_slice() {
        [a, b, ..] => b - a,
        _ => 1.0,
    };
    let s = meeting_sample(&spec.params, gap, spec.horizon, spec.replicates, spec.workers)?;
    let mut table = ResultTable::new(spec.name, &["replicate", "meeting_time"], spec.provenance());
    for (k, t) in s.times.iter().enumerate() {
        table.push_row(vec![k.to_string(), t.map(fmt_f64).unwrap_or_default()])?;
    }
    let sm: Summary = s.times.iter().flatten().copied().collect();
    table.summary = serde_json::json!({
        "gap": s.gap,
        "tmax": s.tmax,
        "oracle_mean": s.oracle.mean,
        "oracle_shape": s.oracle.shape,
        "sample_mean": sm.mean(),
        "sample_se": sm.se(),
        "censored": s.censored,
        "ks": s.ks,
        "pass": s.ks.map(|k| k.p_value > 0.01),
    });
    Ok(table)
}

/// Structural counts of one coupled configuration.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialCounts {
    pub window_exit: bool,
    pub hop_budget: bool,
    pub closure: usize,
    pub same_side: usize,
    pub forward_backward: usize,
    pub closure_violations: usize,
    pub wedges: usize,
    pub wedge_entries: usize,
    pub interpolation: usize,
    pub fault_crossing: Option<bool>,
    pub fault_wedge: Option<bool>,
}

impl TrialCounts {
    fn structural(&self) -> usize {
        self.same_side + self.forward_backward + self.closure_violations + self.wedge_entries + self.interpolation
    }
}

fn window_half_width(params: &ModelParams, horizon: f64) -> f64 {
    let lc = params.limit_constants();
    0.5 + 10.0 * (lc.xi2_derived * horizon).sqrt() + 2.0 * lc.zeta * horizon + 4.0 * params.max_rescaled_radius()
}

fn path_extent(p: &CadlagPath) -> (f64, f64) {
    p.jumps()
        .iter()
        .map(|j| j.1)
        .fold((p.v0(), p.v0()), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

fn pairwise_crossings(a: &[&CadlagPath]) -> usize {
    let mut c = 0;
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            c += detect_crossing(a[i], a[j]).len();
        }
    }
    c
}

/// A path that starts below `a` and ends above it.
fn inject_crossing(a: &CadlagPath, rng: &mut SimRng) -> Result<CadlagPath> {
    let (lo, hi) = path_extent(a);
    let t = a.sigma() + (a.end() - a.sigma()) * (0.1 + 0.8 * rng.gen::<f64>());
    CadlagPath::new(a.sigma(), lo - 1.0, vec![(t, hi + 1.0)])?.with_end(a.end())
}

/// A path that sits to the right of the wedge and jumps into it.
fn inject_wedge_entry(w: &Wedge, end: f64, rng: &mut SimRng) -> Result<Option<CadlagPath>> {
    for _ in 0..16 {
        let u = w.bottom + (w.top - w.bottom) * (0.05 + 0.9 * rng.gen::<f64>());
        let (Some(r), Some(l)) = (w.r_hat.value(u), w.l_hat.value(u)) else {
            continue;
        };
        if !(r < l) {
            continue;
        }
        let x = 0.5 * (r + l);
        let outside = path_extent(&w.r_hat).1.max(path_extent(&w.l_hat).1) + 1.0;
        let sigma = u - (u - w.bottom) * 0.5;
        return Ok(Some(CadlagPath::new(sigma, outside, vec![(u, x)])?.with_end(end)?));
    }
    Ok(None)
}

fn margins_for(stream: &EventStream, params: &ModelParams) -> Result<MarginMap> {
    compute_margins(&stream.events, 1.0 / params.n as f64)
}

fn run_trial(params: &ModelParams, horizon: f64, k: u64, inject: bool) -> Result<TrialCounts> {
    let mut counts = TrialCounts::default();
    let mut aux = stream(params.seed, StreamTag::Auxiliary(3), k);
    let w = window_half_width(params, horizon);
    let events = sample_events_box(
        params,
        (-w, w),
        (0.0, horizon),
        usize::MAX,
        &mut stream(params.seed, StreamTag::Events, k),
    )?;
    let mut starts = Vec::new();
    for dir in 0..2 {
        for side in [Side::Left, Side::Left, Side::Right, Side::Right] {
            let y = aux.gen::<f64>() - 0.5;
            let s = 0.5 * horizon * (aux.gen::<f64>() + dir as f64);
            starts.push((dir, side, y, s));
        }
    }
    let mut fwd: Vec<ExtremalTrace> = Vec::new();
    let mut bwd: Vec<ExtremalTrace> = Vec::new();
    for &(dir, side, y, s) in &starts {
        let traced = if dir == 0 {
            let mut src = events.replay(false);
            src.seek(s);
            trace_forward_with(side, y, s, horizon, &mut src)
        } else {
            let mut src = events.replay(true);
            src.seek(s);
            trace_backward_with(side, y, s, 0.0, &mut src)
        };
        match traced {
            Ok(t) if dir == 0 => fwd.push(t),
            Ok(t) => bwd.push(t),
            Err(SimError::Window(_)) => {
                counts.window_exit = true;
                return Ok(counts);
            }
            Err(e) => return Err(e),
        }
    }
    let pick = |v: &[ExtremalTrace], side: Side| -> Vec<CadlagPath> {
        v.iter().filter(|t| t.side == side).map(|t| t.path.clone()).collect()
    };
    let (fl, fr, bl, br) = (pick(&fwd, Side::Left), pick(&fwd, Side::Right), pick(&bwd, Side::Left), pick(&bwd, Side::Right));

    counts.same_side = [&fl, &fr, &bl, &br]
        .iter()
        .map(|v| pairwise_crossings(&v.iter().collect::<Vec<_>>()))
        .sum();
    for (f, b) in [(&fl, &bl), (&fr, &br)] {
        for x in f.iter() {
            for y in b.iter() {
                counts.forward_backward += detect_crossing(x, y).len();
            }
        }
    }

    let margins = margins_for(&events, params)?;
    let bound = 2.0 * params.max_rescaled_radius();
    for t in fwd.iter().chain(&bwd) {
        if !(interpolation_gap(&t.path, &margins)? < bound) {
            counts.interpolation += 1;
        }
    }

    let family: Vec<CadlagPath> = fl.iter().chain(&fr).cloned().collect();
    let closure = match hop_cross(&family, DEFAULT_HOP_BUDGET) {
        Ok(c) => c,
        Err(e) if e.is_budget() => {
            counts.hop_budget = true;
            family.clone()
        }
        Err(e) => return Err(e),
    };
    counts.closure = closure.len();
    for pi in &closure {
        for l in &fl {
            counts.closure_violations += detect_crossing(pi, l)
                .iter()
                .filter(|c| c.direction == CrossDirection::RightToLeft)
                .count();
        }
        for r in &fr {
            counts.closure_violations += detect_crossing(pi, r)
                .iter()
                .filter(|c| c.direction == CrossDirection::LeftToRight)
                .count();
        }
    }

    let mut wedges = Vec::new();
    for r in &br {
        for l in &bl {
            if let Some(w) = Wedge::from_pair(r, l) {
                wedges.push(w);
            }
        }
    }
    counts.wedges = wedges.len();
    for w in &wedges {
        counts.wedge_entries += closure.iter().filter(|p| enters_wedge(p, w).is_some()).count();
    }

    if inject {
        let fake = inject_crossing(&fl[0], &mut aux)?;
        counts.fault_crossing = Some(
            detect_crossing(&fake, &fl[0])
                .iter()
                .any(|c| c.direction == CrossDirection::LeftToRight),
        );
        if let Some(w) = wedges.first() {
            if let Some(fake) = inject_wedge_entry(w, horizon, &mut aux)? {
                counts.fault_wedge = Some(enters_wedge(&fake, w).is_some());
            }
        }
    }
    Ok(counts)
}

/// Coupled forward and backward left-most and right-most families on one
/// stored event stream per trial: crossing rules, wedge entries from the
/// hopping closure, the interpolation bound, and the meeting-time law.
/// Every trial also plants one crossing and one wedge entry to confirm the
/// detectors fire.
pub fn run_diagnostics(spec: &ExperimentSpec) -> Result<ResultTable> {
    if spec.params.upsilon < 1.0 {
        return Err(SimError::Precondition(format!(
            "net diagnostics need upsilon = 1, got {}",
            spec.params.upsilon
        )));
    }
    let p = &spec.params;
    let trials = map_replicates(spec.replicates, spec.workers, |k| run_trial(p, spec.horizon, k, true))?;
    let mut table = ResultTable::new(
        spec.name,
        &[
            "trial", "window_exit", "hop_budget", "closure", "same_side", "forward_backward",
            "closure_violations", "wedges", "wedge_entries", "interpolation", "fault_crossing_fired",
            "fault_wedge_fired",
        ],
        spec.provenance(),
    );
    let flag = |b: Option<bool>| b.map(|b| u8::from(b).to_string()).unwrap_or_default();
    let mut tot = TrialCounts::default();
    let (mut exits, mut hop_budget, mut injected, mut fired) = (0usize, 0usize, 0usize, 0usize);
    for (k, c) in trials.iter().enumerate() {
        table.push_row(vec![
            k.to_string(),
            u8::from(c.window_exit).to_string(),
            u8::from(c.hop_budget).to_string(),
            c.closure.to_string(),
            c.same_side.to_string(),
            c.forward_backward.to_string(),
            c.closure_violations.to_string(),
            c.wedges.to_string(),
            c.wedge_entries.to_string(),
            c.interpolation.to_string(),
            flag(c.fault_crossing),
            flag(c.fault_wedge),
        ])?;
        exits += usize::from(c.window_exit);
        hop_budget += usize::from(c.hop_budget);
        tot.same_side += c.same_side;
        tot.forward_backward += c.forward_backward;
        tot.closure_violations += c.closure_violations;
        tot.wedges += c.wedges;
        tot.wedge_entries += c.wedge_entries;
        tot.interpolation += c.interpolation;
        for f in [c.fault_crossing, c.fault_wedge].into_iter().flatten() {
            injected += 1;
            fired += usize::from(f);
        }
    }
    // No finite-mean oracle without drift.
    let meeting = if p.alpha > 0.0 {
        Some(meeting_sample(p, 1.0, 20.0, spec.replicates, spec.workers)?)
    } else {
        None
    };
    let structural = tot.structural();
    let missed = injected - fired;
    if structural > 0 || missed > 0 {
        table.outcome = Outcome::StructuralFailure {
            detail: format!("{structural} structural violations, {missed} planted faults not detected"),
        };
    } else if hop_budget > 0 {
        table.outcome = Outcome::BudgetExceeded {
            detail: format!("hopping closure over budget in {hop_budget} trials"),
        };
    }
    table.summary = serde_json::json!({
        "trials": trials.len(),
        "window_exits": exits,
        "hop_budget_exceeded": hop_budget,
        "crossings_same_side": tot.same_side,
        "crossings_forward_backward": tot.forward_backward,
        "closure_violations": tot.closure_violations,
        "wedges": tot.wedges,
        "wedge_entries": tot.wedge_entries,
        "interpolation_violations": tot.interpolation,
        "faults_injected": injected,
        "faults_detected": fired,
        "meeting": meeting.map(|m| serde_json::json!({
            "gap": m.gap,
            "tmax": m.tmax,
            "censored": m.censored,
            "oracle_mean": m.oracle.mean,
            "ks": m.ks,
        })),
    });
    Ok(table)
}
