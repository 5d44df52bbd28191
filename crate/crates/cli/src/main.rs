use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use bss_core::game::{saddle_point, solve_cost_to_go, CostTriple};
use bss_core::harness::{self, output, RunConfig, SweepParam, SweepSpec};
use bss_core::verify;

#[derive(Parser)]
#[command(name = "bss", version, about = "Bandit subset selection experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every algorithm and seed of a config and write traces.csv.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides output_dir from the config.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Vary one parameter of a config and write sweep.csv.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        param: SweepParam,
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Solve the cost-to-go game and print it as CSV.
    Dp {
        #[arg(long = "N")]
        n: usize,
        #[arg(long = "M")]
        m: usize,
        #[arg(long)]
        cinfo: f64,
        #[arg(long)]
        chit: f64,
        #[arg(long)]
        cmiss: f64,
    },
    /// Run the property and oracle suite.
    Verify {
        /// Smaller sample sizes, skips the Monte Carlo orderings.
        #[arg(long)]
        quick: bool,
    },
}

fn load(config: &Path, threads: Option<usize>) -> Result<RunConfig> {
    let mut cfg = RunConfig::load(config).with_context(|| format!("loading {}", config.display()))?;
    if threads.is_some() {
        cfg.threads = threads;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn dp_csv(n: usize, m: usize, costs: CostTriple) -> Result<String> {
    let table = solve_cost_to_go(n, m, costs)?;
    let mut out = String::from("n,s,V,G,p,q\n");
    for row in 0..=n {
        for s in 0..=m {
            let (p, q) = if row < n { saddle_point(&table, row, s)? } else { (0.0, 0.0) };
            out.push_str(&format!("{row},{s},{},{},{p},{q}\n", table.value(row, s), table.gap(row, s)));
        }
    }
    Ok(out)
}

fn main() -> ExitCode {
    match real_main() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn real_main() -> Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, out, threads } => {
            let cfg = load(&config, threads)?;
            let dir = out.unwrap_or_else(|| cfg.output_dir.clone());
            let exp = harness::run_experiment(&cfg)?;
            for (label, g) in &exp.ogo_gamma {
                eprintln!("{label}: gamma={g}");
            }
            let path = output::write_experiment(&dir, &exp)?;
            println!("{}", path.display());
        }
        Command::Sweep {
            config,
            param,
            values,
            out,
            threads,
        } => {
            let base = load(&config, threads)?;
            let dir = out.unwrap_or_else(|| base.output_dir.clone());
            let spec = SweepSpec {
                param,
                values: values.clone(),
                base,
            };
            let (rows, runs) = harness::run_sweep(&spec)?;
            let path = output::write_sweep(&dir, &rows, &runs, &values)?;
            println!("{}", path.display());
        }
        Command::Dp { n, m, cinfo, chit, cmiss } => {
            if m == 0 {
                bail!("M must be at least 1");
            }
            let csv = dp_csv(n, m, CostTriple::constant(cinfo, chit, cmiss))?;
            io::stdout().lock().write_all(csv.as_bytes())?;
        }
        Command::Verify { quick } => {
            let level = if quick { verify::Level::Quick } else { verify::Level::Full };
            let mut failed = 0;
            for check in verify::CHECKS.iter().filter(|c| c.runs_at(level)) {
                let outcome = (check.run)(level);
                let tag = if outcome.passed { "ok" } else { "FAIL" };
                println!("{tag:>4}  {:<28} {}", check.name, outcome.detail);
                if !outcome.passed {
                    failed += 1;
                }
            }
            if failed > 0 {
                println!("{failed} check(s) failed");
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
