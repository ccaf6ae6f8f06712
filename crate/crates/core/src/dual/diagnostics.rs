use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::path::{refine, CadlagPath, Slice};

pub const DEFAULT_HOP_BUDGET: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CrossDirection {
    LeftToRight,
    RightToLeft,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub time: f64,
    pub direction: CrossDirection,
}

fn sign(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

/// All times at which `a` crosses `b`, on their common domain.
///
/// A crossing needs a point strictly before it on one side and a point
/// strictly after it on the other, with the crossing time the first moment
/// of the new sign. Touching (`a = b`) never ends a run by itself.
pub fn detect_crossing(a: &CadlagPath, b: &CadlagPath) -> Vec<Crossing> {
    let lo = a.sigma().max(b.sigma());
    let hi = a.end().min(b.end());
    if !(hi >= lo) || !lo.is_finite() {
        return Vec::new();
    }
    let slices = refine(&[a, b], lo, hi).expect("common domain");
    let signed: Vec<(&Slice, i8)> = slices
        .iter()
        .map(|s| (s, sign(s.values[0] - s.values[1])))
        .filter(|&(_, g)| g != 0)
        .collect();

    // later_has[i] = (some slice after i is positive, some is negative)
    let mut later_has = vec![(false, false); signed.len()];
    let mut acc = (false, false);
    for i in (0..signed.len()).rev() {
        later_has[i] = acc;
        match signed[i].1 {
            1 => acc.0 = true,
            _ => acc.1 = true,
        }
    }

    let mut out = Vec::new();
    let mut cur: i8 = 0;
    let mut run_open = false;
    let mut run_first_instant = f64::INFINITY;
    for (i, &(slice, g)) in signed.iter().enumerate() {
        if g != cur {
            if cur != 0 {
                let t = slice.start;
                let before = run_open || run_first_instant < t;
                let after = !slice.is_instant()
                    || if g > 0 {
                        later_has[i].0
                    } else {
                        later_has[i].1
                    };
                if before && after {
                    out.push(Crossing {
                        time: t,
                        direction: if g > 0 {
                            CrossDirection::LeftToRight
                        } else {
                            CrossDirection::RightToLeft
                        },
                    });
                }
            }
            cur = g;
            run_open = false;
            run_first_instant = f64::INFINITY;
        }
        if slice.is_instant() {
            run_first_instant = run_first_instant.min(slice.start);
        } else {
            run_open = true;
        }
    }
    out
}

fn path_key(p: &CadlagPath) -> Vec<u64> {
    let mut k = vec![
        p.sigma().to_bits(),
        p.v0().to_bits(),
        p.end().to_bits(),
        p.is_left_continuous() as u64,
    ];
    for &(t, v) in p.jumps() {
        k.push(t.to_bits());
        k.push(v.to_bits());
    }
    k
}

/// Closure of a finite family under hopping at crossing times. The input
/// paths come first in the output, in their given order; duplicates are
/// dropped.
pub fn hop_cross(paths: &[CadlagPath], budget: usize) -> Result<Vec<CadlagPath>> {
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    let mut out: Vec<CadlagPath> = Vec::new();
    for p in paths {
        if seen.insert(path_key(p)) {
            out.push(p.clone());
        }
    }
    if out.len() > budget {
        return Err(SimError::Budget {
            what: "hopping",
            limit: budget,
            time: f64::NAN,
        });
    }
    // Pairs (i, j) with max(i, j) < done have been examined.
    let mut done = 0;
    while done < out.len() {
        let j = done;
        for i in 0..=j {
            let times: Vec<f64> = detect_crossing(&out[i], &out[j])
                .into_iter()
                .map(|c| c.time)
                .collect();
            for t in times {
                for (f, g) in [(i, j), (j, i)] {
                    let h = out[f].hop(&out[g], t)?;
                    if seen.insert(path_key(&h)) {
                        out.push(h);
                        if out.len() > budget {
                            return Err(SimError::Budget {
                                what: "hopping",
                                limit: budget,
                                time: t,
                            });
                        }
                    }
                }
            }
        }
        done += 1;
    }
    Ok(out)
}

/// The open region between a backward right-most path `r̂` and a backward
/// left-most path `l̂`, from their common top `s` down to the last time
/// `bottom` at which they met. If they never meet on their common domain,
/// `bottom` is the later of the two path starts.
#[derive(Debug, Clone, PartialEq)]
pub struct Wedge {
    pub r_hat: CadlagPath,
    pub l_hat: CadlagPath,
    pub top: f64,
    pub bottom: f64,
    pub met: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Inside,
    Boundary,
    Outside,
}

impl Wedge {
    /// `None` unless `r̂(s) < l̂(s)`.
    pub fn from_pair(r_hat: &CadlagPath, l_hat: &CadlagPath) -> Option<Wedge> {
        let top = r_hat.end().min(l_hat.end());
        let lo = r_hat.sigma().max(l_hat.sigma());
        if !top.is_finite() || !lo.is_finite() || lo > top {
            return None;
        }
        if !(r_hat.value(top)? < l_hat.value(top)?) {
            return None;
        }
        let slices = refine(&[r_hat, l_hat], lo, top).ok()?;
        let mut bottom = lo;
        let mut met = false;
        for s in slices.iter().rev() {
            if s.start >= top {
                continue;
            }
            if s.values[0] == s.values[1] {
                bottom = s.end.min(top);
                met = true;
                break;
            }
        }
        Some(Wedge {
            r_hat: r_hat.clone(),
            l_hat: l_hat.clone(),
            top,
            bottom,
            met,
        })
    }

    /// Whether `(x, u)` lies in the open wedge.
    pub fn contains(&self, x: f64, u: f64) -> bool {
        if !(u > self.bottom && u < self.top) {
            return false;
        }
        match (self.r_hat.value(u), self.l_hat.value(u)) {
            (Some(r), Some(l)) => r < x && x < l,
            _ => false,
        }
    }

    fn statuses(&self, pi: &CadlagPath) -> Vec<(f64, Status)> {
        let hi = pi.end().min(self.top);
        let lo = pi.sigma().max(self.bottom);
        let mut out = Vec::new();
        // Below an unmet bottom the wedge is unknown, not absent.
        if pi.sigma() < self.bottom && self.met {
            out.push((pi.sigma(), Status::Outside));
        }
        if !(hi >= lo) {
            return out;
        }
        let slices = refine(&[pi, &self.r_hat, &self.l_hat], lo, hi).expect("covered");
        let gap = |s: &Slice| -> Option<(f64, f64)> {
            let inside_time = s.start >= self.bottom && s.end <= self.top;
            (inside_time && s.values[1] < s.values[2]).then_some((s.values[1], s.values[2]))
        };
        for (k, s) in slices.iter().enumerate() {
            let x = s.values[0];
            let status = if s.is_instant() {
                let u = s.start;
                let mut closure: Vec<(f64, f64)> = Vec::new();
                if k > 0 {
                    closure.extend(gap(&slices[k - 1]));
                }
                if let Some(next) = slices.get(k + 1) {
                    closure.extend(gap(next));
                }
                let (r, l) = (s.values[1], s.values[2]);
                closure.push((r.min(l), r.max(l)));
                if u > self.bottom && u < self.top && r < x && x < l {
                    Status::Inside
                } else if closure.iter().any(|&(a, b)| a <= x && x <= b) {
                    Status::Boundary
                } else {
                    Status::Outside
                }
            } else {
                let (r, l) = (s.values[1], s.values[2]);
                if r < x && x < l {
                    Status::Inside
                } else if r <= x && x <= l {
                    Status::Boundary
                } else {
                    Status::Outside
                }
            };
            out.push((s.start, status));
        }
        out
    }
}

/// First time at which `pi` is inside the wedge after having been outside
/// its closure, if any.
pub fn enters_wedge(pi: &CadlagPath, wedge: &Wedge) -> Option<f64> {
    let mut was_outside = false;
    for (t, st) in wedge.statuses(pi) {
        match st {
            Status::Outside => was_outside = true,
            Status::Inside if was_outside => return Some(t),
            _ => {}
        }
    }
    None
}

/// Number of (forward path, wedge) pairs in which the path enters the wedge
/// from the outside. Wedges are built from every (r̂, l̂) pair that forms one.
pub fn wedge_violations(
    forward: &[CadlagPath],
    r_hats: &[CadlagPath],
    l_hats: &[CadlagPath],
) -> usize {
    let mut count = 0;
    for r in r_hats {
        for l in l_hats {
            if let Some(w) = Wedge::from_pair(r, l) {
                count += forward.iter().filter(|p| enters_wedge(p, &w).is_some()).count();
            }
        }
    }
    count
}
