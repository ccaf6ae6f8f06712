//! Skorohod-type distances on `G` computed over jump-matching time changes.
//!
//! A candidate time change `λ` is piecewise linear with knots
//! `σ_g ↦ σ_h`, a monotone matching of some jumps of `g` to some jumps of
//! `h`, `1 ↦ 1` and `2 ↦ 2`. The best matching is found by a bottleneck
//! dynamic programme over pairs of matched jumps. Every segment is evaluated
//! in a common parameter `s ∈ [0, 1]` so that swapping the arguments gives
//! bit-identical costs.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};

use super::compact::CompactifiedPath;
use super::CadlagPath;

/// Maximum number of jumps per path accepted by the distance routines.
pub const DEFAULT_JUMP_BUDGET: usize = 64;

const SAMPLES: usize = 33;
const GOLDEN_ITERS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub value: f64,
    /// Number of matched jump pairs in the optimal time change.
    pub matched: usize,
    /// The value is an infimum over a restricted family, so it bounds the
    /// true distance from above.
    pub upper_bound: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Cost {
    /// `sup |λ(t) - t|`
    Displacement,
    /// `sup |log slope λ|`
    LogSlope,
}

/// Segment `[a0, a1] → [b0, b1]` of the time change.
#[derive(Debug, Clone, Copy)]
struct Segment {
    a0: f64,
    a1: f64,
    b0: f64,
    b1: f64,
}

impl Segment {
    #[inline]
    fn t(&self, s: f64) -> f64 {
        self.a0 + s * (self.a1 - self.a0)
    }

    #[inline]
    fn u(&self, s: f64) -> f64 {
        self.b0 + s * (self.b1 - self.b0)
    }
}

fn push_splits(knots: &[f64], lo: f64, hi: f64, extra: &[f64], out: &mut Vec<f64>) {
    let span = hi - lo;
    for &k in knots.iter().chain(extra) {
        if k > lo && k < hi {
            out.push((k - lo) / span);
        }
    }
}

/// `sup_{s ∈ [0, 1)} |g(t(s)) - h(u(s))|`, using the continuous extension of
/// each smooth sub-piece.
fn value_sup(g: &CompactifiedPath, h: &CompactifiedPath, seg: Segment, buf: &mut Vec<f64>) -> f64 {
    buf.clear();
    buf.push(0.0);
    buf.push(1.0);
    if seg.a1 > seg.a0 {
        push_splits(g.knots(), seg.a0, seg.a1, &[0.0], buf);
    }
    if seg.b1 > seg.b0 {
        push_splits(h.knots(), seg.b0, seg.b1, &[0.0], buf);
    }
    buf.sort_by(f64::total_cmp);
    buf.dedup();
    let mut best: f64 = 0.0;
    for w in buf.windows(2) {
        let (s0, s1) = (w[0], w[1]);
        if s1 <= s0 {
            continue;
        }
        let mid = 0.5 * (s0 + s1);
        let pg = g.piece_at(seg.t(mid));
        let ph = h.piece_at(seg.u(mid));
        let diff = |s: f64| (pg.eval(seg.t(s)) - ph.eval(seg.u(s))).abs();
        if pg.is_flat() && ph.is_flat() {
            best = best.max(diff(mid));
            continue;
        }
        best = best.max(diff(s0)).max(diff(s1));
        let mut arg = s0;
        let mut top = diff(s0);
        for k in 1..SAMPLES {
            let s = s0 + (s1 - s0) * k as f64 / SAMPLES as f64;
            let v = diff(s);
            if v > top {
                top = v;
                arg = s;
            }
        }
        best = best.max(top);
        let step = (s1 - s0) / SAMPLES as f64;
        let (mut lo, mut hi) = ((arg - step).max(s0), (arg + step).min(s1));
        let phi = 0.5 * (5f64.sqrt() - 1.0);
        let mut x1 = hi - phi * (hi - lo);
        let mut x2 = lo + phi * (hi - lo);
        let (mut f1, mut f2) = (diff(x1), diff(x2));
        for _ in 0..GOLDEN_ITERS {
            if f1 >= f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - phi * (hi - lo);
                f1 = diff(x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + phi * (hi - lo);
                f2 = diff(x2);
            }
        }
        best = best.max(f1).max(f2);
    }
    best
}

fn time_cost(kind: Cost, seg: Segment) -> f64 {
    match kind {
        Cost::Displacement => (seg.a1 - seg.b1).abs(),
        Cost::LogSlope => {
            let (da, db) = (seg.a1 - seg.a0, seg.b1 - seg.b0);
            if da == 0.0 && db == 0.0 {
                0.0
            } else if da == 0.0 || db == 0.0 {
                f64::INFINITY
            } else {
                // Difference of logs keeps the cost bit-symmetric.
                (db.ln() - da.ln()).abs()
            }
        }
    }
}

fn check_budget(g: &CompactifiedPath, budget: usize) -> Result<()> {
    let n = g.knots().len();
    if n > budget + 2 {
        return Err(SimError::Budget {
            what: "path jumps",
            limit: budget,
            time: f64::NAN,
        });
    }
    Ok(())
}

/// Bottleneck DP over jump matchings; returns (cost, matched pairs).
fn matching_dp(g: &CompactifiedPath, h: &CompactifiedPath, kind: Cost) -> Result<(f64, usize)> {
    check_budget(g, DEFAULT_JUMP_BUDGET)?;
    check_budget(h, DEFAULT_JUMP_BUDGET)?;
    let (sg, sh) = (g.sigma(), h.sigma());
    let start = match kind {
        Cost::Displacement => (sg - sh).abs(),
        Cost::LogSlope => 0.0,
    };
    let mut buf = Vec::with_capacity(64);

    // Pin 1 ↦ 1 only when both domains reach below 1.
    if sg >= 1.0 || sh >= 1.0 {
        let seg = Segment {
            a0: sg,
            a1: 2.0,
            b0: sh,
            b1: 2.0,
        };
        let c = start.max(time_cost(kind, seg)).max(value_sup(g, h, seg, &mut buf));
        return Ok((c, 0));
    }

    let mut a: Vec<f64> = vec![sg];
    a.extend(g.jump_times().into_iter().filter(|&t| t < 1.0));
    a.push(1.0);
    let mut b: Vec<f64> = vec![sh];
    b.extend(h.jump_times().into_iter().filter(|&t| t < 1.0));
    b.push(1.0);
    let (p, q) = (a.len(), b.len());
    let last = (p - 1, q - 1);

    let tail = {
        let seg = Segment {
            a0: 1.0,
            a1: 2.0,
            b0: 1.0,
            b1: 2.0,
        };
        value_sup(g, h, seg, &mut buf)
    };

    let mut best = vec![f64::INFINITY; p * q];
    let mut count = vec![0usize; p * q];
    best[0] = start;
    // Upper bound from the direct segment σ ↦ σ, 1 ↦ 1.
    let direct = {
        let seg = Segment {
            a0: sg,
            a1: 1.0,
            b0: sh,
            b1: 1.0,
        };
        start.max(time_cost(kind, seg)).max(value_sup(g, h, seg, &mut buf))
    };
    best[last.0 * q + last.1] = direct;
    let mut bound = direct;

    for i in 0..p - 1 {
        for j in 0..q - 1 {
            let here = best[i * q + j];
            if !here.is_finite() || here >= bound {
                continue;
            }
            for i2 in i + 1..p {
                for j2 in j + 1..q {
                    let is_last = (i2, j2) == last;
                    if (i2 == p - 1) != (j2 == q - 1) {
                        continue;
                    }
                    let seg = Segment {
                        a0: a[i],
                        a1: a[i2],
                        b0: b[j],
                        b1: b[j2],
                    };
                    let lower = here.max(time_cost(kind, seg));
                    let target = i2 * q + j2;
                    if lower >= best[target] || lower >= bound {
                        continue;
                    }
                    let c = lower.max(value_sup(g, h, seg, &mut buf));
                    if c < best[target] {
                        best[target] = c;
                        count[target] = count[i * q + j] + usize::from(!is_last);
                        if is_last {
                            bound = bound.min(c);
                        }
                    }
                }
            }
        }
    }
    let idx = last.0 * q + last.1;
    Ok((best[idx].max(tail), count[idx]))
}

/// `d′` by enumerating every monotone matching of jumps, without pruning.
/// Exponential in the jump count; meant as a cross-check of [`d_prime`] on
/// small paths.
pub fn d_prime_exhaustive(g: &CompactifiedPath, h: &CompactifiedPath) -> Result<f64> {
    const LIMIT: usize = 8;
    let (sg, sh) = (g.sigma(), h.sigma());
    let start = (sg - sh).abs();
    let mut buf = Vec::new();
    if sg >= 1.0 || sh >= 1.0 {
        let seg = Segment {
            a0: sg,
            a1: 2.0,
            b0: sh,
            b1: 2.0,
        };
        return Ok(start
            .max(time_cost(Cost::Displacement, seg))
            .max(value_sup(g, h, seg, &mut buf)));
    }
    let inner = |p: &CompactifiedPath| -> Vec<f64> { p.jump_times().into_iter().filter(|&t| t < 1.0).collect() };
    let (ja, jb) = (inner(g), inner(h));
    if ja.len() > LIMIT || jb.len() > LIMIT {
        return Err(SimError::Budget {
            what: "exhaustive matching jumps",
            limit: LIMIT,
            time: f64::NAN,
        });
    }
    let tail = value_sup(
        g,
        h,
        Segment {
            a0: 1.0,
            a1: 2.0,
            b0: 1.0,
            b1: 2.0,
        },
        &mut buf,
    );
    let mut best = f64::INFINITY;
    let mut chain: Vec<(usize, usize)> = Vec::new();
    exhaustive_rec(g, h, &ja, &jb, &mut chain, &mut best, &mut buf);
    Ok(best.max(start).max(tail))
}

fn exhaustive_rec(
    g: &CompactifiedPath,
    h: &CompactifiedPath,
    ja: &[f64],
    jb: &[f64],
    chain: &mut Vec<(usize, usize)>,
    best: &mut f64,
    buf: &mut Vec<f64>,
) {
    // Close the chain at 1 ↦ 1 and score it.
    let mut a = vec![g.sigma()];
    let mut b = vec![h.sigma()];
    for &(i, j) in chain.iter() {
        a.push(ja[i]);
        b.push(jb[j]);
    }
    a.push(1.0);
    b.push(1.0);
    let mut cost: f64 = 0.0;
    for k in 0..a.len() - 1 {
        let seg = Segment {
            a0: a[k],
            a1: a[k + 1],
            b0: b[k],
            b1: b[k + 1],
        };
        cost = cost
            .max(time_cost(Cost::Displacement, seg))
            .max(value_sup(g, h, seg, buf));
    }
    *best = best.min(cost);

    let (i0, j0) = chain.last().map_or((0, 0), |&(i, j)| (i + 1, j + 1));
    for i in i0..ja.len() {
        for j in j0..jb.len() {
            chain.push((i, j));
            exhaustive_rec(g, h, ja, jb, chain, best, buf);
            chain.pop();
        }
    }
}

/// `d′(g, h) = |σ_g - σ_h| ∨ inf_λ (sup|λ(t) - t| ∨ sup|g - h∘λ|)`.
pub fn d_prime(g: &CompactifiedPath, h: &CompactifiedPath) -> Result<f64> {
    Ok(matching_dp(g, h, Cost::Displacement)?.0)
}

/// Skorohod `ρ(g, h)` with the log-slope cost, over the same family.
pub fn rho(g: &CompactifiedPath, h: &CompactifiedPath) -> Result<MetricReport> {
    let (value, matched) = matching_dp(g, h, Cost::LogSlope)?;
    Ok(MetricReport {
        value,
        matched,
        upper_bound: true,
    })
}

/// `d′` between the compactifications of two paths in `M`.
pub fn d_prime_m(f1: &CadlagPath, f2: &CadlagPath) -> Result<f64> {
    d_prime(
        &CompactifiedPath::from_path(f1),
        &CompactifiedPath::from_path(f2),
    )
}

/// `d_M(f1, f2) = ρ(f̄1, f̄2) ∨ |tanh σ1 - tanh σ2|`.
pub fn d_m(f1: &CadlagPath, f2: &CadlagPath) -> Result<MetricReport> {
    let (g, h) = (
        CompactifiedPath::from_path(f1),
        CompactifiedPath::from_path(f2),
    );
    let mut r = rho(&g, &h)?;
    r.value = r.value.max((g.sigma() - h.sigma()).abs());
    Ok(r)
}
