use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use slfvs_core::experiments::{default_upsilon_sweep, ExperimentName, ExperimentSpec};
use slfvs_core::model::ConfigMap;
use slfvs_core::{ModelParams, RadiusMeasure};

#[derive(Debug, Parser)]
#[command(name = "slfvs", version, about = "Experiments on the spatial Lambda-Fleming-Viot process with selection")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mean right-most ancestor position against the impact.
    PuCurve(Common),
    /// Drift and diffusion constants of single extremal paths.
    DriftDiffusion(Common),
    /// Forward against dual moment estimates, plus a 20-case battery.
    Duality(Common),
    /// Forward against rotated backward left-most jump laws.
    Samelaw(Common),
    /// Mean nearby time of the left-right pair across n.
    NearbyScaling(Common),
    /// Backward left/right first meeting times against the inverse Gaussian.
    MeetingTime(Common),
    /// Crossing, hopping and wedge checks on coupled path families.
    NetDiagnostics(Common),
    /// Axioms and bounds of the path metrics.
    MetricSelftest(Common),
    /// One recorded dual genealogy.
    Simulate(Common),
    /// Prelimit left-right pair against the sticky reference pair.
    PairLimit(Common),
    /// Event sampler timings against the adaptive crossover ratio.
    SamplerBench(Common),
}

#[derive(Debug, Args)]
pub struct Common {
    /// `key = value` file; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub upsilon: Option<f64>,
    /// Radius measure: `delta:R` or `atoms:(w1,r1),(w2,r2),...`.
    #[arg(long)]
    pub mu: Option<String>,
    #[arg(long)]
    pub reps: Option<u64>,
    #[arg(long)]
    pub horizon: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; 0 uses every core.
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long, default_value = "results")]
    pub out: PathBuf,
    /// Start points, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub points: Option<Vec<f64>>,
    /// Impact sweep, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub upsilons: Option<Vec<f64>>,
    /// Number of equally spaced impacts in (0, 1]; overrides `--upsilons`.
    #[arg(long)]
    pub sweep: Option<usize>,
    /// Values of n, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub ns: Option<Vec<u64>>,
}

const CONFIG_KEYS: [&str; 13] = [
    "n", "alpha", "upsilon", "mu", "seed", "reps", "horizon", "workers", "points", "upsilons",
    "sweep", "ns", "out",
];

fn parse_list<T: FromStr>(cfg: &ConfigMap, key: &str) -> anyhow::Result<Option<Vec<T>>> {
    let Some(raw) = cfg.get(key) else { return Ok(None) };
    raw.split(',')
        .map(|s| s.trim().parse::<T>().map_err(|_| anyhow::anyhow!("cannot parse `{s}` in `{key}`")))
        .collect::<anyhow::Result<Vec<T>>>()
        .map(Some)
}

impl Command {
    fn parts(&self) -> (ExperimentName, &Common) {
        use Command::*;
        match self {
            PuCurve(c) => (ExperimentName::PuCurve, c),
            DriftDiffusion(c) => (ExperimentName::DriftDiffusion, c),
            Duality(c) => (ExperimentName::Duality, c),
            Samelaw(c) => (ExperimentName::Samelaw, c),
            NearbyScaling(c) => (ExperimentName::NearbyScaling, c),
            MeetingTime(c) => (ExperimentName::MeetingTime, c),
            NetDiagnostics(c) => (ExperimentName::NetDiagnostics, c),
            MetricSelftest(c) => (ExperimentName::MetricSelftest, c),
            Simulate(c) => (ExperimentName::Simulate, c),
            PairLimit(c) => (ExperimentName::PairLimit, c),
            SamplerBench(c) => (ExperimentName::SamplerBench, c),
        }
    }
}

impl Cli {
    /// Experiment defaults, then the config file, then flags.
    pub fn spec(&self) -> anyhow::Result<ExperimentSpec> {
        let (name, c) = self.command.parts();
        let mut spec = ExperimentSpec::defaults(name);
        spec.out_dir = Some(c.out.clone());
        let cfg = match &c.config {
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                ConfigMap::parse(&text)?
            }
            None => ConfigMap::default(),
        };
        if let Some(k) = cfg.keys().find(|k| !CONFIG_KEYS.contains(k)) {
            bail!("unknown config key `{k}`");
        }
        spec.params = ModelParams::from_config(&cfg, &spec.params)?;
        if let Some(r) = cfg.get_parsed("reps")? {
            spec.replicates = r;
        }
        if let Some(h) = cfg.get_parsed("horizon")? {
            spec.horizon = h;
        }
        if let Some(w) = cfg.get_parsed::<usize>("workers")? {
            spec.workers = Some(w);
        }
        if let Some(o) = cfg.get("out") {
            if c.out == PathBuf::from("results") {
                spec.out_dir = Some(o.into());
            }
        }
        if let Some(v) = parse_list(&cfg, "points")? {
            spec.points = v;
        }
        if let Some(v) = parse_list(&cfg, "upsilons")? {
            spec.upsilons = v;
        }
        if let Some(k) = cfg.get_parsed::<usize>("sweep")? {
            spec.upsilons = default_upsilon_sweep(k);
        }
        if let Some(v) = parse_list(&cfg, "ns")? {
            spec.ns = v;
        }

        let p = &mut spec.params;
        if let Some(n) = c.n {
            p.n = n;
        }
        if let Some(a) = c.alpha {
            p.alpha = a;
        }
        if let Some(u) = c.upsilon {
            p.upsilon = u;
        }
        if let Some(m) = &c.mu {
            p.mu = m.parse::<RadiusMeasure>()?;
        }
        if let Some(s) = c.seed {
            p.seed = s;
        }
        if let Some(r) = c.reps {
            spec.replicates = r;
        }
        if let Some(h) = c.horizon {
            spec.horizon = h;
        }
        if let Some(w) = c.workers {
            spec.workers = Some(w);
        }
        if let Some(v) = &c.points {
            spec.points = v.clone();
        }
        if let Some(v) = &c.upsilons {
            spec.upsilons = v.clone();
        }
        if let Some(k) = c.sweep {
            spec.upsilons = default_upsilon_sweep(k);
        }
        if let Some(v) = &c.ns {
            spec.ns = v.clone();
        }
        if spec.workers == Some(0) {
            spec.workers = None;
        }
        spec.validate()?;
        Ok(spec)
    }
}
