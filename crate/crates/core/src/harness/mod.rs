//! Seeded experiment runner: every (algorithm, seed) pair plays its own
//! copy of the environment and yields a cumulative pseudo-regret trace.
//!
//! The environment stream depends only on `(master_seed, seed)`, so all
//! algorithms face the same tasks under the stochastic and oblivious modes.
//! Learner streams add a key derived from the algorithm label.

pub mod config;
pub mod learner;
pub mod output;

use std::collections::BTreeMap;

use crate::envgen::AdversaryState;
use crate::error::Result;
use crate::par;
use crate::reward::{f_max_unchecked, RewardVector};
use crate::rng::{derive_seed, label_key, stream};
use crate::subset::Subset;
use crate::task::{best_m_subset, RegretTrace, Task, TaskSequence};

pub use config::{AlgorithmSpec, BogScheduleKind, RunConfig, SweepParam, SweepSpec};
pub use learner::{build, MetaLearner};

/// Exploration probabilities tried when an OGo spec leaves gamma open.
pub const OGO_GAMMA_GRID: [f64; 10] = [0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5];

/// Pilot runs per grid point when picking OGo's gamma.
pub const OGO_PILOT_RUNS: u64 = 2;

/// What one (algorithm, seed) run leaves behind.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub trace: RegretTrace,
    /// Per-task pseudo-regret against the comparator.
    pub per_task: Vec<f64>,
    pub comparator: Subset,
}

/// Results of a whole experiment plus the parameters picked while resolving
/// the config.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub config: RunConfig,
    pub records: Vec<RunRecord>,
    pub ogo_gamma: BTreeMap<String, f64>,
}

impl Experiment {
    pub fn traces(&self) -> Vec<RegretTrace> {
        self.records.iter().map(|r| r.trace.clone()).collect()
    }
}

/// Best `M`-subset of the realized tasks. The hidden pool contains every
/// task's optimum, so when it reaches `Σ_n max r_n` it is a certified
/// maximiser and the exhaustive search is skipped.
pub fn comparator(rewards: &[RewardVector], pool: &Subset, m: usize, tau: usize) -> Result<(Subset, f64)> {
    let upper: f64 = rewards.iter().map(RewardVector::max).sum();
    let pool_value: f64 = rewards.iter().map(|r| f_max_unchecked(r, pool.arms())).sum();
    if pool.len() == m && pool_value >= upper {
        return Ok((pool.clone(), pool_value * tau as f64));
    }
    let seq = TaskSequence::new(
        rewards
            .iter()
            .map(|r| Task::new(r.clone(), tau))
            .collect::<Result<_>>()?,
    )?;
    best_m_subset(&seq, m)
}

fn checkpoints(per_task: &[f64], every: usize) -> Vec<(usize, f64)> {
    let mut out = Vec::with_capacity(per_task.len().div_ceil(every));
    let mut cum = 0.0;
    for (i, r) in per_task.iter().enumerate() {
        cum += r;
        let n = i + 1;
        if n % every == 0 || n == per_task.len() {
            out.push((n, cum));
        }
    }
    out
}

/// Plays one learner through one environment.
pub fn run_single(cfg: &RunConfig, spec: &AlgorithmSpec, seed: u64, gamma: Option<f64>) -> Result<RunRecord> {
    let env = &cfg.env;
    let label = spec.label();
    let mut adversary = AdversaryState::new(env, stream(env.master_seed, &[seed]))?;
    let mut rng = stream(env.master_seed, &[seed, label_key(&label)]);
    let mut learner = build(spec, env, adversary.pool(), gamma)?;

    let mut rewards = Vec::with_capacity(env.n);
    let mut earned = Vec::with_capacity(env.n);
    for _ in 0..env.n {
        let known = learner.discovered();
        let generated = adversary.next_task(Some(&known))?;
        let task = Task::new(generated.rewards, env.tau)?;
        let run = learner.play_task(&task, env.noise, &mut rng)?;
        earned.push(run.mean_total);
        rewards.push(task.rewards);
    }

    let (best, _) = comparator(&rewards, adversary.pool(), env.m, env.tau)?;
    let per_task: Vec<f64> = rewards
        .iter()
        .zip(&earned)
        .map(|(r, got)| env.tau as f64 * f_max_unchecked(r, best.arms()) - got)
        .collect();
    Ok(RunRecord {
        trace: RegretTrace {
            algorithm_id: label,
            seed,
            checkpoints: checkpoints(&per_task, cfg.checkpoint_every),
        },
        per_task,
        comparator: best,
    })
}

/// Picks OGo's gamma from [`OGO_GAMMA_GRID`] by mean final regret on pilot
/// seeds that are disjoint from the evaluation streams. Ties go to the
/// smaller gamma.
pub fn tune_ogo_gamma(cfg: &RunConfig, spec: &AlgorithmSpec) -> Result<f64> {
    let pilots: Vec<u64> = (0..OGO_PILOT_RUNS)
        .map(|j| derive_seed(cfg.env.master_seed, &[label_key("ogo-pilot"), j]))
        .collect();
    let jobs: Vec<(f64, u64)> = OGO_GAMMA_GRID
        .iter()
        .flat_map(|&g| pilots.iter().map(move |&s| (g, s)))
        .collect();
    let finals = par::map(jobs.clone(), cfg.threads, |(g, s)| {
        Ok(run_single(cfg, spec, s, Some(g))?.trace.final_regret())
    })?;
    let mut best = (f64::INFINITY, OGO_GAMMA_GRID[0]);
    for (i, &g) in OGO_GAMMA_GRID.iter().enumerate() {
        let per = OGO_PILOT_RUNS as usize;
        let mean = finals[i * per..(i + 1) * per].iter().sum::<f64>() / per as f64;
        if mean < best.0 {
            best = (mean, g);
        }
    }
    Ok(best.1)
}

/// Runs every (algorithm, seed) pair of `cfg`; records come back sorted by
/// algorithm label, then seed.
pub fn run_experiment(cfg: &RunConfig) -> Result<Experiment> {
    cfg.validate()?;
    let mut resolved = cfg.clone();
    resolved.env.delta = Some(cfg.env.delta());
    let mut ogo_gamma = BTreeMap::new();
    for spec in &mut resolved.algorithms {
        if matches!(spec, AlgorithmSpec::Ogo { gamma: None, .. }) {
            let picked = tune_ogo_gamma(cfg, spec)?;
            if let AlgorithmSpec::Ogo { gamma, .. } = spec {
                *gamma = Some(picked);
            }
            ogo_gamma.insert(spec.label(), picked);
        }
    }

    let jobs: Vec<(usize, u64)> = (0..resolved.algorithms.len())
        .flat_map(|a| resolved.seeds.iter().map(move |&s| (a, s)))
        .collect();
    let mut records = par::map(jobs, resolved.threads, |(a, seed)| {
        run_single(&resolved, &resolved.algorithms[a], seed, None)
    })?;
    records.sort_by(|x, y| {
        (x.trace.algorithm_id.as_str(), x.trace.seed).cmp(&(y.trace.algorithm_id.as_str(), y.trace.seed))
    });
    Ok(Experiment {
        config: resolved,
        records,
        ogo_gamma,
    })
}

/// One row of a sweep table.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub param: SweepParam,
    pub value: usize,
    pub algo: String,
    pub seed: u64,
    pub final_regret: f64,
}

pub fn run_sweep(spec: &SweepSpec) -> Result<(Vec<SweepRow>, Vec<Experiment>)> {
    let mut rows = Vec::new();
    let mut runs = Vec::new();
    for (cfg, &value) in spec.configs()?.iter().zip(&spec.values) {
        let exp = run_experiment(cfg)?;
        rows.extend(exp.records.iter().map(|r| SweepRow {
            param: spec.param,
            value,
            algo: r.trace.algorithm_id.clone(),
            seed: r.trace.seed,
            final_regret: r.trace.final_regret(),
        }));
        runs.push(exp);
    }
    Ok((rows, runs))
}
