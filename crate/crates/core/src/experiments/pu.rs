use serde::{Deserialize, Serialize};

use crate::dual::{extremal_ancestor, DualOptions, Side};
use crate::error::Result;
use crate::replicates::map_replicates;
use crate::stats::Summary;

use super::table::{fmt_f64, Attachment, Outcome, ResultTable};
use super::ExperimentSpec;

/// `count` equally spaced impacts `1/count, 2/count, ..., 1`.
pub fn default_upsilon_sweep(count: usize) -> Vec<f64> {
    (1..=count).map(|k| k as f64 / count as f64).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointStatus {
    Complete,
    Partial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PuPoint {
    pub upsilon: f64,
    pub mean: f64,
    pub se: f64,
    /// Replicates that finished within budget.
    pub replicates: u64,
    pub status: PointStatus,
}

/// Mean position of the right-most ancestor in `Ξ_T` of the origin, for
/// each impact of the sweep. Replicate `k` uses the same event stream at
/// every impact.
pub fn run_pu_curve(spec: &ExperimentSpec) -> Result<ResultTable> {
    let opts = DualOptions::default();
    let mut table = ResultTable::new(
        spec.name,
        &["upsilon", "mean", "se", "replicates"],
        spec.provenance(),
    );
    let mut raw = String::from("upsilon,replicate,position\n");
    let mut points = Vec::with_capacity(spec.upsilons.len());
    for &u in &spec.upsilons {
        let p = spec.params.with_upsilon(u)?;
        let res = map_replicates(spec.replicates, spec.workers, |k| {
            match extremal_ancestor(0.0, spec.horizon, &p, k, Side::Right, &opts) {
                Ok(x) => Ok(Some(x)),
                Err(e) if e.is_budget() => Ok(None),
                Err(e) => Err(e),
            }
        })?;
        let mut s = Summary::new();
        for (k, x) in res.iter().enumerate() {
            let cell = x.map(fmt_f64).unwrap_or_default();
            raw.push_str(&format!("{},{k},{cell}\n", fmt_f64(u)));
            if let Some(x) = x {
                s.push(*x);
            }
        }
        let done = s.count;
        let pt = PuPoint {
            upsilon: u,
            mean: s.mean(),
            se: s.se(),
            replicates: done,
            status: if done == spec.replicates {
                PointStatus::Complete
            } else {
                PointStatus::Partial
            },
        };
        table.push_row(vec![
            fmt_f64(u),
            fmt_f64(pt.mean),
            fmt_f64(pt.se),
            done.to_string(),
        ])?;
        points.push(pt);
    }

    let zeta = spec.params.limit_constants().zeta;
    let endpoint = points.iter().find(|p| p.upsilon == 1.0).map(|p| {
        let z = if p.se > 0.0 { (p.mean - zeta) / p.se } else { f64::NAN };
        serde_json::json!({
            "mean": p.mean,
            "se": p.se,
            "zeta": zeta,
            "z": z,
            "within_3se": z.abs() <= 3.0,
        })
    });
    let partial: Vec<f64> = points
        .iter()
        .filter(|p| p.status == PointStatus::Partial)
        .map(|p| p.upsilon)
        .collect();
    if !partial.is_empty() {
        table.outcome = Outcome::BudgetExceeded {
            detail: format!("budget exceeded for some replicates at upsilon in {partial:?}"),
        };
    }
    table.summary = serde_json::json!({
        "alpha": spec.params.alpha,
        "n": spec.params.n,
        "horizon": spec.horizon,
        "zeta": zeta,
        "points": points,
        "endpoint": endpoint,
    });
    table.attachments.push(Attachment {
        file_name: "pu-curve-replicates.csv".into(),
        contents: raw,
    });
    Ok(table)
}
