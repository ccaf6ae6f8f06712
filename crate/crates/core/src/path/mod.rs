//! Càdlàg paths with variable start times and the metric spaces built on
//! them.
//!
//! A [`CadlagPath`] is a step function on `[σ, end]` given by its start time,
//! initial value and a finite list of jumps. Forward paths are
//! right-continuous. Backward paths, stored in forward time, are
//! left-continuous; [`CadlagPath::rotated`] turns one into the other.

mod compact;
mod continuous;
mod metric;

pub use compact::{envelope, kappa, kappa_inv, CompactifiedPath, Piece as GPiece};
pub use continuous::{
    compute_margins, interpolate, sup_metric_continuous, MarginMap, Polyline,
};
pub use metric::{
    d_m, d_prime, d_prime_exhaustive, d_prime_m, rho, MetricReport, DEFAULT_JUMP_BUDGET,
};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Result, SimError};

/// Extended real serialised as a JSON number, or `"inf"` / `"-inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Ext(f64);

impl Serialize for Ext {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0 == f64::INFINITY {
            s.serialize_str("inf")
        } else if self.0 == f64::NEG_INFINITY {
            s.serialize_str("-inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Ext {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(Ext(x)),
            Raw::Str(s) => match s.as_str() {
                "inf" | "+inf" => Ok(Ext(f64::INFINITY)),
                "-inf" => Ok(Ext(f64::NEG_INFINITY)),
                other => Err(serde::de::Error::custom(format!("bad extended real {other:?}"))),
            },
        }
    }
}

fn is_pos_inf(x: &Ext) -> bool {
    x.0 == f64::INFINITY
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Serialize, Deserialize)]
struct Repr {
    sigma: Ext,
    v0: Ext,
    jumps: Vec<(Ext, Ext)>,
    #[serde(default = "pos_inf", skip_serializing_if = "is_pos_inf")]
    end: Ext,
    #[serde(default, skip_serializing_if = "is_false")]
    left_continuous: bool,
}

fn pos_inf() -> Ext {
    Ext(f64::INFINITY)
}

/// Step path on `[sigma, end]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Repr", into = "Repr")]
pub struct CadlagPath {
    sigma: f64,
    v0: f64,
    jumps: Vec<(f64, f64)>,
    end: f64,
    left_continuous: bool,
}

impl TryFrom<Repr> for CadlagPath {
    type Error = SimError;

    fn try_from(r: Repr) -> Result<Self> {
        let jumps = r.jumps.into_iter().map(|(t, v)| (t.0, v.0)).collect();
        let mut p = CadlagPath::new(r.sigma.0, r.v0.0, jumps)?.with_end(r.end.0)?;
        p.left_continuous = r.left_continuous;
        Ok(p)
    }
}

impl From<CadlagPath> for Repr {
    fn from(p: CadlagPath) -> Self {
        Repr {
            sigma: Ext(p.sigma),
            v0: Ext(p.v0),
            jumps: p.jumps.iter().map(|&(t, v)| (Ext(t), Ext(v))).collect(),
            end: Ext(p.end),
            left_continuous: p.left_continuous,
        }
    }
}

/// A maximal time set on which every path of a family is constant: either an
/// instant (`start == end`) or an open interval.
#[derive(Debug, Clone, PartialEq)]
pub struct Slice {
    pub start: f64,
    pub end: f64,
    pub values: Vec<f64>,
}

impl Slice {
    pub fn is_instant(&self) -> bool {
        self.start == self.end
    }
}

impl CadlagPath {
    /// Validates ordering and drops jumps that do not change the value.
    pub fn new(sigma: f64, v0: f64, jumps: Vec<(f64, f64)>) -> Result<Self> {
        if sigma.is_nan() || v0.is_nan() || sigma == f64::INFINITY {
            return Err(SimError::InvalidParams(format!(
                "bad path start sigma={sigma}, v0={v0}"
            )));
        }
        let mut canon: Vec<(f64, f64)> = Vec::with_capacity(jumps.len());
        let mut last_t = sigma;
        let mut last_v = v0;
        for (t, v) in jumps {
            if !t.is_finite() || v.is_nan() || t <= last_t {
                return Err(SimError::InvalidParams(format!(
                    "jump times must be finite and strictly increasing after sigma; got ({t}, {v}) after {last_t}"
                )));
            }
            last_t = t;
            if v != last_v {
                canon.push((t, v));
                last_v = v;
            }
        }
        Ok(Self {
            sigma,
            v0,
            jumps: canon,
            end: f64::INFINITY,
            left_continuous: false,
        })
    }

    pub fn constant(sigma: f64, v: f64) -> Result<Self> {
        Self::new(sigma, v, Vec::new())
    }

    /// Boundary path at `+∞` (`positive`) or `-∞`, started at time `-∞`.
    pub fn boundary(positive: bool) -> Self {
        let v = if positive { f64::INFINITY } else { f64::NEG_INFINITY };
        Self::new(f64::NEG_INFINITY, v, Vec::new()).expect("valid boundary")
    }

    pub fn with_end(mut self, end: f64) -> Result<Self> {
        let last = self.jumps.last().map_or(self.sigma, |j| j.0);
        if end.is_nan() || end < self.sigma || end < last {
            return Err(SimError::InvalidParams(format!(
                "path end {end} precedes its start or last jump"
            )));
        }
        self.end = end;
        Ok(self)
    }

    pub fn into_left_continuous(mut self) -> Self {
        self.left_continuous = true;
        self
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn v0(&self) -> f64 {
        self.v0
    }

    pub fn end(&self) -> f64 {
        self.end
    }

    pub fn jumps(&self) -> &[(f64, f64)] {
        &self.jumps
    }

    pub fn is_left_continuous(&self) -> bool {
        self.left_continuous
    }

    pub fn jump_count(&self) -> usize {
        self.jumps.len()
    }

    pub fn final_value(&self) -> f64 {
        self.jumps.last().map_or(self.v0, |j| j.1)
    }

    /// Value at `t`, or `None` outside `[sigma, end]`.
    pub fn value(&self, t: f64) -> Option<f64> {
        if t < self.sigma || t > self.end || t.is_nan() {
            return None;
        }
        let k = if self.left_continuous {
            self.jumps.partition_point(|j| j.0 < t)
        } else {
            self.jumps.partition_point(|j| j.0 <= t)
        };
        Some(if k == 0 { self.v0 } else { self.jumps[k - 1].1 })
    }

    /// Left limit at `t` (the value itself at `t == sigma`).
    pub fn value_left(&self, t: f64) -> Option<f64> {
        if t < self.sigma || t > self.end || t.is_nan() {
            return None;
        }
        let k = self.jumps.partition_point(|j| j.0 < t);
        Some(if k == 0 { self.v0 } else { self.jumps[k - 1].1 })
    }

    /// Value immediately after `t`.
    pub fn value_right(&self, t: f64) -> Option<f64> {
        if t < self.sigma || t >= self.end || t.is_nan() {
            return None;
        }
        let k = self.jumps.partition_point(|j| j.0 <= t);
        Some(if k == 0 { self.v0 } else { self.jumps[k - 1].1 })
    }

    /// Signed jump sizes in time order.
    pub fn increments(&self) -> Vec<f64> {
        let mut prev = self.v0;
        self.jumps
            .iter()
            .map(|&(_, v)| {
                let d = v - prev;
                prev = v;
                d
            })
            .collect()
    }

    pub fn max_abs_jump(&self) -> f64 {
        self.increments().into_iter().fold(0.0, |m, d| m.max(d.abs()))
    }

    /// Rotation by 180 degrees about the origin, `t ↦ -f(-t)`; continuity
    /// flips side.
    pub fn rotated(&self) -> Self {
        let mut jumps = Vec::with_capacity(self.jumps.len());
        for k in (0..self.jumps.len()).rev() {
            let before = if k == 0 { self.v0 } else { self.jumps[k - 1].1 };
            jumps.push((-self.jumps[k].0, -before));
        }
        Self {
            sigma: -self.end,
            v0: -self.final_value(),
            jumps,
            end: -self.sigma,
            left_continuous: !self.left_continuous,
        }
    }

    /// Follow `self` before `t` and `other` from `t` on.
    pub fn hop(&self, other: &CadlagPath, t: f64) -> Result<Self> {
        let target = other.value(t).ok_or_else(|| {
            SimError::Precondition(format!("hop target undefined at time {t}"))
        })?;
        if t < self.sigma {
            return Err(SimError::Precondition(format!(
                "hop time {t} precedes the path start {}",
                self.sigma
            )));
        }
        let mut jumps: Vec<(f64, f64)> = self.jumps.iter().copied().filter(|j| j.0 < t).collect();
        let (sigma, v0) = if t == self.sigma {
            (t, target)
        } else {
            jumps.push((t, target));
            (self.sigma, self.v0)
        };
        jumps.extend(other.jumps.iter().copied().filter(|j| j.0 > t));
        let mut p = CadlagPath::new(sigma, v0, jumps)?.with_end(other.end)?;
        p.left_continuous = self.left_continuous;
        Ok(p)
    }
}

/// Common refinement of a family of step paths on `[lo, hi]`: alternating
/// instants and open intervals on which every path is constant. Paths must
/// all be defined on `[lo, hi]`.
pub fn refine(paths: &[&CadlagPath], lo: f64, hi: f64) -> Result<Vec<Slice>> {
    for p in paths {
        if p.sigma > lo || p.end < hi {
            return Err(SimError::Precondition(format!(
                "path on [{}, {}] does not cover [{lo}, {hi}]",
                p.sigma, p.end
            )));
        }
    }
    let mut knots: Vec<f64> = vec![lo];
    for p in paths {
        knots.extend(p.jumps.iter().map(|j| j.0).filter(|&t| t > lo && t < hi));
    }
    if hi > lo {
        knots.push(hi);
    }
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    let mut out = Vec::with_capacity(2 * knots.len());
    for (i, &k) in knots.iter().enumerate() {
        if k.is_finite() {
            out.push(Slice {
                start: k,
                end: k,
                values: paths.iter().map(|p| p.value(k).expect("covered")).collect(),
            });
        }
        if let Some(&next) = knots.get(i + 1) {
            out.push(Slice {
                start: k,
                end: next,
                values: paths
                    .iter()
                    .map(|p| p.value_right(k).expect("covered"))
                    .collect(),
            });
        }
    }
    Ok(out)
}

/// Directed Hausdorff distance `sup_{p ∈ P} inf_{q ∈ Q} d(p, q)`.
pub fn directed_hausdorff<P>(
    from: &[P],
    to: &[P],
    metric: impl Fn(&P, &P) -> Result<f64>,
) -> Result<f64> {
    if to.is_empty() && !from.is_empty() {
        return Err(SimError::Precondition(
            "directed distance into the empty set".into(),
        ));
    }
    let mut worst: f64 = 0.0;
    for p in from {
        let mut best = f64::INFINITY;
        for q in to {
            best = best.min(metric(p, q)?);
        }
        worst = worst.max(best);
    }
    Ok(worst)
}

/// Hausdorff distance between finite path sets under `metric`. The empty set
/// is an isolated point: distance 0 to itself, an error against anything
/// else.
pub fn hausdorff<P>(p: &[P], q: &[P], metric: impl Fn(&P, &P) -> Result<f64>) -> Result<f64> {
    if p.is_empty() && q.is_empty() {
        return Ok(0.0);
    }
    if p.is_empty() || q.is_empty() {
        return Err(SimError::Precondition(
            "Hausdorff distance between an empty and a nonempty set".into(),
        ));
    }
    Ok(directed_hausdorff(p, q, &metric)?.max(directed_hausdorff(q, p, &metric)?))
}
