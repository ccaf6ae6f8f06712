//! Model parameters, the radius measure and closed-form limit constants.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};

/// One atom `weight · δ_radius` of the radius measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub radius: f64,
    pub weight: f64,
}

/// Finite discrete radius measure `μ = Σ w_i δ_{r_i}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusMeasure {
    atoms: Vec<Atom>,
}

impl RadiusMeasure {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(SimError::InvalidParams("radius measure has no atoms".into()));
        }
        for a in &atoms {
            if !(a.radius.is_finite() && a.radius > 0.0) {
                return Err(SimError::InvalidParams(format!(
                    "atom radius must be positive and finite, got {}",
                    a.radius
                )));
            }
            if !(a.weight.is_finite() && a.weight > 0.0) {
                return Err(SimError::InvalidParams(format!(
                    "atom weight must be positive and finite, got {}",
                    a.weight
                )));
            }
        }
        Ok(Self { atoms })
    }

    /// Unit point mass at `radius`.
    pub fn delta(radius: f64) -> Result<Self> {
        Self::new(vec![Atom { radius, weight: 1.0 }])
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }

    pub fn max_radius(&self) -> f64 {
        self.atoms.iter().map(|a| a.radius).fold(0.0, f64::max)
    }

    /// `m_k = Σ w_i r_i^k`.
    pub fn moment(&self, k: i32) -> f64 {
        self.atoms.iter().map(|a| a.weight * a.radius.powi(k)).sum()
    }

    /// Multiply every weight by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(
            self.atoms
                .iter()
                .map(|a| Atom {
                    radius: a.radius,
                    weight: a.weight * c,
                })
                .collect(),
        )
    }
}

impl fmt::Display for RadiusMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let [a] = self.atoms.as_slice() {
            if a.weight == 1.0 {
                return write!(f, "delta:{}", a.radius);
            }
        }
        write!(f, "atoms:")?;
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "({},{})", a.weight, a.radius)?;
        }
        Ok(())
    }
}

impl FromStr for RadiusMeasure {
    type Err = SimError;

    /// `delta:R` or `atoms:(w1,r1),(w2,r2),...`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = |msg: &str| SimError::InvalidParams(format!("radius measure `{s}`: {msg}"));
        if let Some(rest) = s.strip_prefix("delta:") {
            let r: f64 = rest.trim().parse().map_err(|_| bad("bad radius"))?;
            return Self::delta(r);
        }
        let rest = s
            .strip_prefix("atoms:")
            .ok_or_else(|| bad("expected `delta:` or `atoms:` prefix"))?;
        let mut atoms = Vec::new();
        let mut rest = rest.trim();
        while !rest.is_empty() {
            let open = rest.strip_prefix('(').ok_or_else(|| bad("expected `(`"))?;
            let close = open.find(')').ok_or_else(|| bad("unclosed `(`"))?;
            let (w, r) = open[..close]
                .split_once(',')
                .ok_or_else(|| bad("atom must be (weight,radius)"))?;
            atoms.push(Atom {
                weight: w.trim().parse().map_err(|_| bad("bad weight"))?,
                radius: r.trim().parse().map_err(|_| bad("bad radius"))?,
            });
            rest = open[close + 1..].trim_start();
            if let Some(r) = rest.strip_prefix(',') {
                rest = r.trim_start();
            } else if !rest.is_empty() {
                return Err(bad("expected `,` between atoms"));
            }
        }
        Self::new(atoms)
    }
}

/// Parameters of one scaling stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Scaling stage.
    pub n: u64,
    /// Selection strength.
    pub alpha: f64,
    /// Impact: probability that a covered lineage is affected.
    pub upsilon: f64,
    pub mu: RadiusMeasure,
    pub seed: u64,
}

/// Drift and diffusion constants of the limiting net.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitConstants {
    pub zeta: f64,
    /// `(4/9) m_3`, the stated diffusion constant.
    pub xi2_paper: f64,
    /// `(4/3) m_3`, the variance rate implied by the neutral jump law.
    pub xi2_derived: f64,
}

impl ModelParams {
    pub fn new(n: u64, alpha: f64, upsilon: f64, mu: RadiusMeasure, seed: u64) -> Result<Self> {
        let p = Self {
            n,
            alpha,
            upsilon,
            mu,
            seed,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(SimError::InvalidParams("n must be a positive integer".into()));
        }
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return Err(SimError::InvalidParams(format!(
                "alpha must be finite and nonnegative, got {}",
                self.alpha
            )));
        }
        if !(self.upsilon > 0.0 && self.upsilon <= 1.0) {
            return Err(SimError::InvalidParams(format!(
                "upsilon must lie in (0,1], got {}",
                self.upsilon
            )));
        }
        let s = self.selection_probability();
        if s > 1.0 {
            return Err(SimError::InvalidParams(format!(
                "selection probability alpha/sqrt(n) = {s} exceeds 1"
            )));
        }
        Ok(())
    }

    pub fn with_n(&self, n: u64) -> Result<Self> {
        Self::new(n, self.alpha, self.upsilon, self.mu.clone(), self.seed)
    }

    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(self.n, alpha, self.upsilon, self.mu.clone(), self.seed)
    }

    pub fn with_upsilon(&self, upsilon: f64) -> Result<Self> {
        Self::new(self.n, self.alpha, upsilon, self.mu.clone(), self.seed)
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self {
            seed,
            ..self.clone()
        }
    }

    pub fn sqrt_n(&self) -> f64 {
        (self.n as f64).sqrt()
    }

    /// `s_n = α / √n`.
    pub fn selection_probability(&self) -> f64 {
        self.alpha / self.sqrt_n()
    }

    /// Rate at which events (of either kind) cover a fixed point: `2 n m_1`.
    pub fn per_point_event_rate(&self) -> f64 {
        2.0 * self.n as f64 * self.mu.moment(1)
    }

    /// Rate of selective events covering a fixed point: `2 α √n m_1`.
    pub fn selective_rate(&self) -> f64 {
        self.per_point_event_rate() * self.selection_probability()
    }

    /// Intensity of event centres per unit length and unit time for atom
    /// weight `w`: `n √n w`.
    pub fn centre_intensity(&self, weight: f64) -> f64 {
        self.n as f64 * self.sqrt_n() * weight
    }

    /// Rescaled radius `r / √n` of every atom, in atom order.
    pub fn rescaled_radii(&self) -> Vec<f64> {
        let s = self.sqrt_n();
        self.mu.atoms().iter().map(|a| a.radius / s).collect()
    }

    /// Largest rescaled radius `R / √n`.
    pub fn max_rescaled_radius(&self) -> f64 {
        self.mu.max_radius() / self.sqrt_n()
    }

    pub fn limit_constants(&self) -> LimitConstants {
        let m3 = self.mu.moment(3);
        LimitConstants {
            zeta: 2.0 / 3.0 * self.alpha * self.mu.moment(2),
            xi2_paper: 4.0 / 9.0 * m3,
            xi2_derived: 4.0 / 3.0 * m3,
        }
    }

    /// Build from the `n`, `alpha`, `upsilon`, `mu`, `seed` keys of a config;
    /// missing keys fall back to `defaults`.
    pub fn from_config(cfg: &ConfigMap, defaults: &ModelParams) -> Result<Self> {
        let n = cfg.get_parsed("n")?.unwrap_or(defaults.n);
        let alpha = cfg.get_parsed("alpha")?.unwrap_or(defaults.alpha);
        let upsilon = cfg.get_parsed("upsilon")?.unwrap_or(defaults.upsilon);
        let seed = cfg.get_parsed("seed")?.unwrap_or(defaults.seed);
        let mu = match cfg.get("mu") {
            Some(s) => s.parse()?,
            None => defaults.mu.clone(),
        };
        Self::new(n, alpha, upsilon, mu, seed)
    }
}

impl Default for ModelParams {
    /// `n = 1000`, `α = 1`, `υ = 1`, `μ = δ_1`, seed 1.
    fn default() -> Self {
        Self {
            n: 1000,
            alpha: 1.0,
            upsilon: 1.0,
            mu: RadiusMeasure::delta(1.0).expect("unit delta is valid"),
            seed: 1,
        }
    }
}

pub fn limit_constants(params: &ModelParams) -> Result<LimitConstants> {
    params.validate()?;
    Ok(params.limit_constants())
}

/// Parsed `key = value` configuration file. Blank lines and `#` comments are
/// ignored.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigMap {
    entries: BTreeMap<String, (usize, String)>,
}

impl ConfigMap {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| SimError::Config {
                line: i + 1,
                msg: format!("expected `key = value`, got `{line}`"),
            })?;
            let key = k.trim().to_string();
            if key.is_empty() {
                return Err(SimError::Config {
                    line: i + 1,
                    msg: "empty key".into(),
                });
            }
            if entries.insert(key.clone(), (i + 1, v.trim().to_string())).is_some() {
                return Err(SimError::Config {
                    line: i + 1,
                    msg: format!("duplicate key `{key}`"),
                });
            }
        }
        Ok(Self { entries })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(_, v)| v.as_str())
    }

    pub fn get_parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some((line, v)) => v.parse().map(Some).map_err(|_| SimError::Config {
                line: *line,
                msg: format!("cannot parse value `{v}` for `{key}`"),
            }),
        }
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(|k| k.as_str())
    }
}
