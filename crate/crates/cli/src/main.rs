//! `slfvs`: run one experiment, write its CSV, JSON summary and any extra
//! files to the output directory.

mod args;

use std::fs;
use std::path::Path;
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;
use slfvs_core::experiments::{run_named, Outcome, ResultTable};
use slfvs_core::SimError;

use args::Cli;

const EXIT_VALIDATION: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_STRUCTURAL: u8 = 4;

fn write_outputs(table: &ResultTable, dir: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let put = |name: &str, body: &str| {
        let p = dir.join(name);
        fs::write(&p, body).with_context(|| format!("writing {}", p.display()))
    };
    put(&table.csv_file_name(), &table.to_csv())?;
    put(&table.json_file_name(), &table.to_json())?;
    for a in &table.attachments {
        put(&a.file_name, &a.contents)?;
    }
    Ok(())
}

fn exit_for(err: &SimError) -> u8 {
    if err.is_budget() {
        EXIT_BUDGET
    } else {
        match err {
            SimError::Unsupported(_) | SimError::SampleSize { .. } | SimError::Window(_) => EXIT_VALIDATION,
            e if e.is_validation() => EXIT_VALIDATION,
            _ => 1,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let spec = match cli.spec() {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(EXIT_VALIDATION);
        }
    };
    let mut table = match run_named(&spec) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_for(&e));
        }
    };
    table.provenance.build_id = env!("SLFVS_BUILD_ID").to_string();
    let dir = spec.out_dir.clone().unwrap_or_else(|| "results".into());
    if let Err(e) = write_outputs(&table, &dir) {
        eprintln!("error: {e:#}");
        return ExitCode::FAILURE;
    }
    println!("{}", serde_json::to_string_pretty(&table.summary).unwrap_or_default());
    eprintln!(
        "{}: {} rows written to {} in {:.2}s",
        table.name,
        table.rows.len(),
        dir.display(),
        table.provenance.wall_time_s
    );
    match &table.outcome {
        Outcome::Ok => ExitCode::SUCCESS,
        Outcome::BudgetExceeded { detail } => {
            eprintln!("budget exceeded: {detail}");
            ExitCode::from(EXIT_BUDGET)
        }
        Outcome::StructuralFailure { detail } => {
            eprintln!("structural diagnostic failed: {detail}");
            ExitCode::from(EXIT_STRUCTURAL)
        }
    }
}
