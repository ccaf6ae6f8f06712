//! Experiment drivers. Each returns a [`ResultTable`] and leaves writing
//! files to the caller.

mod bench;
mod metric_suite;
mod named;
mod pu;
mod structure;
mod table;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::model::ModelParams;

pub use bench::{sampler_crossover, CrossoverPoint};
pub use metric_suite::{interpolation_gap, metric_selftest, random_step_path};
pub use named::{
    duality_battery, run_drift_diffusion, run_duality, run_nearby_scaling, run_pair_limit,
    run_simulate, BatteryCase,
};
pub use pu::{default_upsilon_sweep, run_pu_curve, PointStatus, PuPoint};
pub use structure::{
    meeting_sample, run_diagnostics, run_meeting_time, run_samelaw, samelaw_jumps, MeetingSample,
    TrialCounts,
};
pub use table::{fmt_f64, Attachment, Outcome, Provenance, ResultTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentName {
    PuCurve,
    DriftDiffusion,
    Duality,
    Samelaw,
    NearbyScaling,
    MeetingTime,
    NetDiagnostics,
    MetricSelftest,
    Simulate,
    PairLimit,
    SamplerBench,
}

impl ExperimentName {
    pub const ALL: [ExperimentName; 11] = [
        ExperimentName::PuCurve,
        ExperimentName::DriftDiffusion,
        ExperimentName::Duality,
        ExperimentName::Samelaw,
        ExperimentName::NearbyScaling,
        ExperimentName::MeetingTime,
        ExperimentName::NetDiagnostics,
        ExperimentName::MetricSelftest,
        ExperimentName::Simulate,
        ExperimentName::PairLimit,
        ExperimentName::SamplerBench,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentName::PuCurve => "pu-curve",
            ExperimentName::DriftDiffusion => "drift-diffusion",
            ExperimentName::Duality => "duality",
            ExperimentName::Samelaw => "samelaw",
            ExperimentName::NearbyScaling => "nearby-scaling",
            ExperimentName::MeetingTime => "meeting-time",
            ExperimentName::NetDiagnostics => "net-diagnostics",
            ExperimentName::MetricSelftest => "metric-selftest",
            ExperimentName::Simulate => "simulate",
            ExperimentName::PairLimit => "pair-limit",
            ExperimentName::SamplerBench => "sampler-bench",
        }
    }
}

impl fmt::Display for ExperimentName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentName {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| SimError::UnknownExperiment(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub name: ExperimentName,
    pub params: ModelParams,
    /// Replicates per sweep point (trials, jumps per class, or triples,
    /// depending on the experiment).
    pub replicates: u64,
    pub horizon: f64,
    pub out_dir: Option<PathBuf>,
    /// `None` uses every core.
    pub workers: Option<usize>,
    /// Start points for genealogy experiments; the gap for `meeting-time`.
    pub points: Vec<f64>,
    pub upsilons: Vec<f64>,
    pub ns: Vec<u64>,
}

impl ExperimentSpec {
    /// The documented defaults of each experiment.
    pub fn defaults(name: ExperimentName) -> Self {
        let base = ModelParams::default();
        let at_n = |n: u64| ModelParams { n, ..base.clone() };
        let (params, replicates, horizon) = match name {
            ExperimentName::PuCurve => (base.clone(), 200, 1.0),
            ExperimentName::DriftDiffusion => (base.clone(), 100_000, 1.0),
            ExperimentName::Duality => (at_n(100), 10_000, 0.25),
            ExperimentName::Samelaw => (base.clone(), 10_000, 1.0),
            ExperimentName::NearbyScaling => (base.clone(), 10_000, 1.0),
            ExperimentName::MeetingTime => (base.clone(), 5_000, 20.0),
            ExperimentName::NetDiagnostics => (at_n(100), 1_000, 0.5),
            ExperimentName::MetricSelftest => (at_n(10_000), 1_000, 1.0),
            ExperimentName::Simulate => (at_n(100), 1, 1.0),
            ExperimentName::PairLimit => (at_n(1_000_000), 1_000, 0.25),
            ExperimentName::SamplerBench => (base.clone(), 20_000, 1.0),
        };
        let points = match name {
            ExperimentName::MeetingTime => vec![0.0, 1.0],
            ExperimentName::PairLimit => vec![0.0, 0.0],
            _ => vec![0.0],
        };
        Self {
            name,
            params,
            replicates,
            horizon,
            out_dir: None,
            workers: None,
            points,
            upsilons: if name == ExperimentName::PuCurve {
                default_upsilon_sweep(20)
            } else {
                Vec::new()
            },
            ns: if name == ExperimentName::NearbyScaling {
                vec![100, 400, 1600]
            } else {
                Vec::new()
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.replicates == 0 {
            return Err(SimError::InvalidParams("replicates must be at least 1".into()));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(SimError::InvalidParams(format!(
                "horizon must be positive and finite, got {}",
                self.horizon
            )));
        }
        if let Some(u) = self.upsilons.iter().find(|&&u| !(u > 0.0 && u <= 1.0)) {
            return Err(SimError::InvalidParams(format!("upsilon sweep value {u} is outside (0,1]")));
        }
        if self.ns.iter().any(|&n| n == 0) {
            return Err(SimError::InvalidParams("n sweep values must be positive".into()));
        }
        if self.points.iter().any(|p| !p.is_finite()) {
            return Err(SimError::InvalidParams("start points must be finite".into()));
        }
        Ok(())
    }

    fn provenance(&self) -> Provenance {
        Provenance {
            experiment: self.name,
            seed: self.params.seed,
            n: self.params.n,
            alpha: self.params.alpha,
            upsilon: self.params.upsilon,
            mu: self.params.mu.to_string(),
            replicates: self.replicates,
            horizon: self.horizon,
            workers: self.workers,
            build_id: default_build_id(),
            wall_time_s: 0.0,
            unix_time_s: 0,
        }
    }
}

/// `slfvs-core <version>`, or the `SLFVS_BUILD_ID` given at compile time.
pub fn default_build_id() -> String {
    option_env!("SLFVS_BUILD_ID")
        .map(str::to_string)
        .unwrap_or_else(|| format!("slfvs-core {}", env!("CARGO_PKG_VERSION")))
}

#[cfg(not(target_arch = "wasm32"))]
mod clock {
    pub struct Stopwatch(std::time::Instant);

    impl Stopwatch {
        pub fn start() -> Self {
            Self(std::time::Instant::now())
        }

        pub fn seconds(&self) -> f64 {
            self.0.elapsed().as_secs_f64()
        }
    }

    pub fn unix_now() -> u64 {
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map_or(0, |d| d.as_secs())
    }
}

#[cfg(target_arch = "wasm32")]
mod clock {
    pub struct Stopwatch;

    impl Stopwatch {
        pub fn start() -> Self {
            Self
        }

        pub fn seconds(&self) -> f64 {
            0.0
        }
    }

    pub fn unix_now() -> u64 {
        0
    }
}

pub(crate) use clock::Stopwatch;

/// Run the experiment named in `spec`.
pub fn run_named(spec: &ExperimentSpec) -> Result<ResultTable> {
    spec.validate()?;
    let watch = Stopwatch::start();
    let mut table = match spec.name {
        ExperimentName::PuCurve => run_pu_curve(spec),
        ExperimentName::DriftDiffusion => run_drift_diffusion(spec),
        ExperimentName::Duality => run_duality(spec),
        ExperimentName::Samelaw => run_samelaw(spec),
        ExperimentName::NearbyScaling => run_nearby_scaling(spec),
        ExperimentName::MeetingTime => run_meeting_time(spec),
        ExperimentName::NetDiagnostics => run_diagnostics(spec),
        ExperimentName::MetricSelftest => metric_selftest(spec),
        ExperimentName::Simulate => run_simulate(spec),
        ExperimentName::PairLimit => run_pair_limit(spec),
        ExperimentName::SamplerBench => sampler_crossover(spec),
    }?;
    table.provenance.wall_time_s = watch.seconds();
    table.provenance.unix_time_s = clock::unix_now();
    Ok(table)
}
