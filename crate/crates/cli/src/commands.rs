use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, Context};
use strbf_core::gradcheck::{run_gradcheck, GradCheckConfig};
use strbf_core::harness::config::load_assignments;
use strbf_core::harness::csv::emit_comparison;
use strbf_core::harness::Workload;
use strbf_core::plant::write_column_csv;
use strbf_core::{emit_csv, run_monte_carlo, AggregateResult, Error, ExperimentConfig, ModelKind};

use crate::args::{ExperimentArgs, GradcheckArgs, RunArgs};

/// Exit status 1 for usage/config problems, 2 for runtime failures.
#[derive(Debug)]
pub enum Failure {
    Usage(anyhow::Error),
    Runtime(anyhow::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config { .. } | Error::Parse { .. } | Error::InvalidArgument(_) => {
                Failure::Usage(e.into())
            }
            _ => Failure::Runtime(e.into()),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn assignments(args: &ExperimentArgs) -> Result<Vec<(String, String)>, Failure> {
    let mut out = match &args.config {
        Some(path) => load_assignments(path).map_err(|e| match e {
            Error::Io { .. } => Failure::Usage(anyhow!(e).context("cannot read config file")),
            other => other.into(),
        })?,
        None => Vec::new(),
    };
    out.extend(args.overrides.assignments());
    Ok(out)
}

fn resolve(
    assigned: &[(String, String)],
    model: Option<ModelKind>,
) -> Result<ExperimentConfig, Failure> {
    Ok(ExperimentConfig::resolve(assigned, model)?)
}

fn ensure_dir(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir)
        .with_context(|| format!("cannot create output directory {}", dir.display()))
        .map_err(Failure::Runtime)
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text)
        .with_context(|| format!("cannot write {}", path.display()))
        .map_err(Failure::Runtime)
}

fn run_one(cfg: &ExperimentConfig, dir: &Path) -> Result<AggregateResult, Failure> {
    let result = run_monte_carlo(cfg)?;
    emit_csv(&result, dir, cfg.model.as_str(), cfg.ma_window)?;
    write_text(&dir.join(format!("{}_config.txt", cfg.model)), &cfg.to_kv_string())?;
    Ok(result)
}

fn fmt_db(v: f64) -> String {
    format!("{v:>10.4}")
}

fn table(results: &[AggregateResult]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<6} {:>10} {:>10} {:>10} {:>10} {:>9}",
        "model", "train_dB", "test_dB", "ref_train", "ref_test", "diverged"
    );
    for r in results {
        let (rt, rs) = r.model.reference_db();
        let _ = writeln!(
            out,
            "{:<6} {} {} {} {} {:>4}/{:<4}",
            r.model.as_str(),
            fmt_db(r.final_train_mse_db),
            fmt_db(r.mean_test_mse_db),
            fmt_db(rt),
            fmt_db(rs),
            r.diverged_count,
            r.diverged_count + r.trials_used
        );
    }
    out
}

pub fn run(args: &RunArgs) -> CmdResult {
    let assigned = assignments(&args.exp)?;
    let cfg = resolve(&assigned, args.model)?;
    ensure_dir(&args.exp.output_dir)?;
    let result = run_one(&cfg, &args.exp.output_dir)?;
    print!("{}", table(std::slice::from_ref(&result)));
    Ok(())
}

pub fn compare(args: &ExperimentArgs) -> CmdResult {
    let assigned = assignments(args)?;
    let configs = ModelKind::ALL
        .iter()
        .map(|&m| resolve(&assigned, Some(m)))
        .collect::<Result<Vec<_>, _>>()?;
    ensure_dir(&args.output_dir)?;
    let mut results = Vec::with_capacity(configs.len());
    for cfg in &configs {
        results.push(run_one(cfg, &args.output_dir)?);
    }
    emit_comparison(&results, &args.output_dir.join("comparison.csv"))?;
    print!("{}", table(&results));
    Ok(())
}

pub fn gradcheck(args: &GradcheckArgs) -> CmdResult {
    let report = run_gradcheck(&GradCheckConfig {
        configs: args.configs,
        seed: args.seed,
        ..GradCheckConfig::default()
    });
    for m in &report.models {
        println!(
            "{:<6} parameters={:<6} max_deviation={:.3e}  worst: {}",
            m.model.as_str(),
            m.parameters_checked,
            m.max_deviation,
            m.worst
        );
    }
    println!(
        "max relative deviation {:.3e} (tolerance {:.0e}): {}",
        report.max_deviation(),
        report.tolerance,
        if report.passed() { "PASS" } else { "FAIL" }
    );
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Runtime(anyhow!("gradient check failed")))
    }
}

pub fn signals(args: &ExperimentArgs) -> CmdResult {
    let assigned = assignments(args)?;
    let cfg = resolve(&assigned, None)?;
    let work = Workload::new(&cfg)?;
    let dir = &args.output_dir;
    ensure_dir(dir)?;
    let files = [
        ("train_input.csv", "input", &work.train_input),
        ("train_output.csv", "plant_output", &work.train_clean),
        ("test_input.csv", "input", &work.test_input),
        ("test_output.csv", "plant_output", &work.test_clean),
    ];
    for (name, column, values) in files {
        write_column_csv(&dir.join(name), column, values).map_err(|e| Failure::Runtime(e.into()))?;
        println!("{} ({} rows)", dir.join(name).display(), values.len());
    }
    Ok(())
}
