use crate::error::{Result, SimError};

use super::CadlagPath;

/// Time change `κ_t = tanh⁻¹(t)` from `[-1, 1]` onto `[-∞, ∞]`.
pub fn kappa(t: f64) -> f64 {
    if t >= 1.0 {
        f64::INFINITY
    } else if t <= -1.0 {
        f64::NEG_INFINITY
    } else {
        t.atanh()
    }
}

pub fn kappa_inv(x: f64) -> f64 {
    x.tanh()
}

/// `1 / (1 + |κ_t|)`, zero at `t = ±1`.
#[inline]
pub fn envelope(t: f64) -> f64 {
    let k = kappa(t).abs();
    if k.is_infinite() {
        0.0
    } else {
        1.0 / (1.0 + k)
    }
}

/// Shape of a path in `G` between two consecutive knots.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Piece {
    Flat(f64),
    /// `c / (1 + |κ_t|)` with `c = tanh(f)` for the underlying value `f`.
    Envelope(f64),
}

impl Piece {
    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            Piece::Flat(c) => c,
            Piece::Envelope(c) => {
                if c == 0.0 {
                    0.0
                } else {
                    c * envelope(t)
                }
            }
        }
    }

    pub fn is_flat(&self) -> bool {
        matches!(self, Piece::Flat(_))
    }
}

/// A path in `G`: defined on `[sigma, 2]`, valued in `[-1, 1]`, constant on
/// `[1, 2]`. Piece `i` holds on `[knots[i], knots[i+1])`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompactifiedPath {
    knots: Vec<f64>,
    pieces: Vec<Piece>,
}

impl CompactifiedPath {
    /// `f̄(t) = tanh(f(κ_t)) / (1 + |κ_t|)` on `[tanh σ_f, 1]`, zero on
    /// `[1, 2]`.
    ///
    /// A left-continuous input is read through its right-continuous version.
    /// Jump times so large that `tanh` rounds them to 1 are absorbed into
    /// the terminal zero; several jumps that round to one `G` time keep the
    /// last value.
    pub fn from_path(f: &CadlagPath) -> Self {
        let sigma = kappa_inv(f.sigma());
        if sigma >= 1.0 {
            return Self {
                knots: vec![1.0],
                pieces: vec![Piece::Flat(0.0)],
            };
        }
        let mut knots = vec![sigma];
        let mut pieces = vec![Piece::Envelope(f.v0().tanh())];
        for &(t, v) in f.jumps() {
            let s = kappa_inv(t);
            if s >= 1.0 {
                break;
            }
            let piece = Piece::Envelope(v.tanh());
            if s <= *knots.last().expect("nonempty") {
                *pieces.last_mut().expect("nonempty") = piece;
            } else {
                knots.push(s);
                pieces.push(piece);
            }
        }
        knots.push(1.0);
        pieces.push(Piece::Flat(0.0));
        Self { knots, pieces }
    }

    /// Step path directly in `G`: jump times in `(sigma, 1]`, values in
    /// `[-1, 1]`; the value reached at time 1 persists on `[1, 2]`.
    pub fn step(sigma: f64, v0: f64, jumps: &[(f64, f64)]) -> Result<Self> {
        if !(-1.0..=1.0).contains(&sigma) {
            return Err(SimError::InvalidParams(format!("G start {sigma} outside [-1, 1]")));
        }
        let in_range = |v: f64| (-1.0..=1.0).contains(&v);
        if !in_range(v0) {
            return Err(SimError::InvalidParams(format!("G value {v0} outside [-1, 1]")));
        }
        let mut knots = vec![sigma];
        let mut pieces = vec![Piece::Flat(v0)];
        for &(t, v) in jumps {
            if !(t > *knots.last().expect("nonempty") && t <= 1.0) || !in_range(v) {
                return Err(SimError::InvalidParams(format!(
                    "G jump ({t}, {v}) out of order or out of range"
                )));
            }
            knots.push(t);
            pieces.push(Piece::Flat(v));
        }
        Ok(Self { knots, pieces })
    }

    pub fn sigma(&self) -> f64 {
        self.knots[0]
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    fn index(&self, t: f64) -> usize {
        self.knots.partition_point(|&k| k <= t) - 1
    }

    /// Value at `t ∈ [sigma, 2]`.
    pub fn eval(&self, t: f64) -> Option<f64> {
        if t < self.sigma() || t > 2.0 || t.is_nan() {
            return None;
        }
        let i = self.index(t);
        Some(self.pieces[i].eval(t))
    }

    /// Piece in force at `t` (clamped into the domain).
    pub fn piece_at(&self, t: f64) -> Piece {
        let t = t.clamp(self.sigma(), 2.0);
        self.pieces[self.index(t)]
    }

    /// Knot times at which the path is discontinuous.
    pub fn jump_times(&self) -> Vec<f64> {
        (1..self.knots.len())
            .filter(|&i| {
                let t = self.knots[i];
                self.pieces[i - 1].eval(t) != self.pieces[i].eval(t)
            })
            .map(|i| self.knots[i])
            .collect()
    }

    /// Whether `|f̄(t)| ≤ 1/(1+|κ_t|)` holds at `t`.
    pub fn envelope_bound_holds(&self, t: f64) -> bool {
        match self.eval(t) {
            Some(v) => {
                let bound = if t >= 1.0 { 0.0 } else { envelope(t) };
                v.abs() <= bound
            }
            None => true,
        }
    }
}
