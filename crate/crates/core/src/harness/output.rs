use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::Result;
use crate::task::RegretTrace;

use super::{Experiment, RunConfig, SweepRow};

pub const TRACE_HEADER: &str = "algo,seed,task,cum_regret";
pub const SWEEP_HEADER: &str = "param,value,algo,seed,final_regret";

/// Trace rows, sorted by algorithm, seed and task.
pub fn traces_csv(traces: &[RegretTrace]) -> String {
    let mut rows: Vec<(&str, u64, usize, f64)> = traces
        .iter()
        .flat_map(|t| {
            t.checkpoints
                .iter()
                .map(move |&(n, r)| (t.algorithm_id.as_str(), t.seed, n, r))
        })
        .collect();
    rows.sort_by(|a, b| (a.0, a.1, a.2).cmp(&(b.0, b.1, b.2)));
    let mut out = String::from(TRACE_HEADER);
    out.push('\n');
    for (algo, seed, n, r) in rows {
        let _ = writeln!(out, "{algo},{seed},{n},{r}");
    }
    out
}

/// Sweep rows in value order (as given), then algorithm and seed.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut order: Vec<usize> = Vec::new();
    for r in rows {
        if !order.contains(&r.value) {
            order.push(r.value);
        }
    }
    let mut sorted: Vec<&SweepRow> = rows.iter().collect();
    sorted.sort_by(|a, b| {
        let ia = order.iter().position(|&v| v == a.value);
        let ib = order.iter().position(|&v| v == b.value);
        (ia, a.algo.as_str(), a.seed).cmp(&(ib, b.algo.as_str(), b.seed))
    });
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for r in sorted {
        let _ = writeln!(out, "{},{},{},{},{}", r.param.name(), r.value, r.algo, r.seed, r.final_regret);
    }
    out
}

#[derive(Serialize)]
struct Metadata<'a> {
    artifact: &'static str,
    version: &'static str,
    config: RunConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    sweep: Option<SweepMeta<'a>>,
    ogo_gamma: Vec<(String, f64)>,
}

#[derive(Serialize)]
struct SweepMeta<'a> {
    param: &'static str,
    values: &'a [usize],
}

fn metadata_json(exp: &Experiment, sweep: Option<SweepMeta<'_>>) -> Result<String> {
    let mut config = exp.config.clone();
    // thread count never changes results
    config.threads = None;
    let meta = Metadata {
        artifact: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        config,
        sweep,
        ogo_gamma: exp.ogo_gamma.iter().map(|(k, v)| (k.clone(), *v)).collect(),
    };
    Ok(serde_json::to_string_pretty(&meta)? + "\n")
}

/// Writes `traces.csv` and `traces.json` into `dir`; returns the CSV path.
pub fn write_experiment(dir: &Path, exp: &Experiment) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let csv = dir.join("traces.csv");
    fs::write(&csv, traces_csv(&exp.traces()))?;
    fs::write(dir.join("traces.json"), metadata_json(exp, None)?)?;
    Ok(csv)
}

/// Writes `sweep.csv` and `sweep.json` into `dir`; returns the CSV path.
pub fn write_sweep(dir: &Path, rows: &[SweepRow], runs: &[Experiment], values: &[usize]) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let csv = dir.join("sweep.csv");
    fs::write(&csv, sweep_csv(rows))?;
    if let (Some(first), Some(row)) = (runs.first(), rows.first()) {
        let meta = metadata_json(
            first,
            Some(SweepMeta {
                param: row.param.name(),
                values,
            }),
        )?;
        fs::write(dir.join("sweep.json"), meta)?;
    }
    Ok(csv)
}
