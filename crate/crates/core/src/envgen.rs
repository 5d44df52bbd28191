//! Task sequence generation under stochastic, oblivious and non-oblivious
//! adversaries, with or without a minimum gap between the optimal arm and
//! the rest.
//!
//! Every sequence draws a hidden pool `S*` of `M` arms up front; each task's
//! optimal arm comes from the pool. The adversarial modes decide between a
//! pool arm the learner already knows and one it has not found yet, revealing
//! a new arm with the adversary's saddle-point probability `q_n`.

use std::io::Write;
use std::sync::Arc;

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::game::{saddle_point, solve_cost_to_go, ValueTable};
use crate::meta::gbass::{dp_costs, Gbass, GbassConfig, GbassSchedule};
use crate::meta::{BaiParams, Mode};
use crate::reward::{NoiseModel, RewardVector};
use crate::rng::{stream, SimRng};
use crate::subset::Subset;
use crate::task::{Task, TaskSequence};

/// Attempts at drawing a feasible optimal reward before giving up.
pub const GAP_RETRIES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdversaryMode {
    #[default]
    Stochastic,
    Oblivious,
    NonOblivious,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GapMode {
    #[default]
    MinGap,
    NoGap,
}

fn default_gap_constant() -> f64 {
    1.0
}

fn default_optimal_low() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvConfig {
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub tau: usize,
    #[serde(default)]
    pub mode: AdversaryMode,
    #[serde(default)]
    pub gap: GapMode,
    /// Overall failure probability; `1/(Nτ)` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default = "default_gap_constant")]
    pub gap_constant: f64,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub noise: NoiseModel,
    /// Lower end of the optimal arm's reward range `[low, 1]`.
    #[serde(default = "default_optimal_low")]
    pub optimal_low: f64,
}

impl EnvConfig {
    pub fn new(k: usize, m: usize, n: usize, tau: usize) -> Self {
        Self {
            k,
            m,
            n,
            tau,
            mode: AdversaryMode::default(),
            gap: GapMode::default(),
            delta: None,
            gap_constant: 1.0,
            master_seed: 0,
            noise: NoiseModel::default(),
            optimal_low: 0.5,
        }
    }

    pub fn delta(&self) -> f64 {
        self.delta
            .unwrap_or_else(|| 1.0 / (self.n.max(1) as f64 * self.tau.max(1) as f64))
    }

    /// Per-task identification failure probability `δ/N`.
    pub fn delta_task(&self) -> f64 {
        self.delta() / self.n.max(1) as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.m > self.k {
            return Err(Error::Config(format!("need 1 <= M <= K, got M={} K={}", self.m, self.k)));
        }
        if self.n == 0 || self.tau == 0 {
            return Err(Error::Config("N and tau must be at least 1".into()));
        }
        let d = self.delta();
        if !(d > 0.0 && d < 1.0) {
            return Err(Error::Config(format!("delta={d} must lie in (0,1)")));
        }
        if !(self.gap_constant > 0.0 && self.gap_constant.is_finite()) {
            return Err(Error::Config(format!("gap_constant={} must be positive", self.gap_constant)));
        }
        if !(0.0..1.0).contains(&self.optimal_low) {
            return Err(Error::Config(format!("optimal_low={} must lie in [0,1)", self.optimal_low)));
        }
        Ok(())
    }

    /// Identification parameters a learner tuned for this environment uses.
    pub fn bai_params(&self) -> BaiParams {
        BaiParams {
            delta_task: self.delta_task(),
            gap: Some(min_gap(self)),
        }
    }
}

/// `Δ = c_Δ √(K ln(N/δ) / τ)`, at most 0.5.
pub fn min_gap(cfg: &EnvConfig) -> f64 {
    let ln = (cfg.n.max(1) as f64 / cfg.delta()).ln();
    (cfg.gap_constant * (cfg.k as f64 * ln / cfg.tau.max(1) as f64).sqrt()).min(0.5)
}

/// Uniform `M`-subset of `[K]`.
pub fn sample_optimal_pool<R: Rng + ?Sized>(cfg: &EnvConfig, rng: &mut R) -> Result<Subset> {
    if cfg.m > cfg.k {
        return Err(invalid(format!("M={} exceeds K={}", cfg.m, cfg.k)));
    }
    Ok(Subset::from_arms(sample(rng, cfg.k, cfg.m)))
}

fn uniform<R: Rng + ?Sized>(lo: f64, hi: f64, rng: &mut R) -> f64 {
    lo + (hi - lo) * rng.gen::<f64>()
}

fn pick<R: Rng + ?Sized>(s: &Subset, rng: &mut R) -> usize {
    s.arms()[rng.gen_range(0..s.len())]
}

/// Rewards with optimum `best` under the configured gap mode.
pub fn draw_rewards<R: Rng + ?Sized>(cfg: &EnvConfig, best: usize, rng: &mut R) -> Result<RewardVector> {
    let gap = min_gap(cfg);
    let mut r = vec![0.0; cfg.k];
    match cfg.gap {
        GapMode::MinGap => {
            let top = (0..GAP_RETRIES)
                .map(|_| uniform(cfg.optimal_low, 1.0, rng))
                .find(|&t| t - gap > 0.0)
                .ok_or_else(|| {
                    Error::Config(format!(
                        "gap {gap} leaves no room below the optimal reward after {GAP_RETRIES} draws"
                    ))
                })?;
            for (a, x) in r.iter_mut().enumerate() {
                *x = if a == best { top } else { uniform(0.0, top - gap, rng) };
            }
        }
        GapMode::NoGap => {
            let top = uniform(cfg.optimal_low, 1.0, rng);
            for (a, x) in r.iter_mut().enumerate() {
                *x = if a == best { top } else { uniform(0.0, top, rng) };
            }
            if cfg.k > 1 {
                let mut near = rng.gen_range(0..cfg.k - 1);
                if near >= best {
                    near += 1;
                }
                let lo = (top - gap).max(0.0);
                let mut x = uniform(lo, top, rng);
                while x <= lo && lo < top {
                    x = uniform(lo, top, rng);
                }
                r[near] = x;
            }
        }
    }
    // keep the optimum unique even if a suboptimal draw hit it exactly
    if r.iter().enumerate().any(|(a, &x)| a != best && x >= r[best]) {
        return draw_rewards(cfg, best, rng);
    }
    RewardVector::new(r)
}

/// One generated task and the optimal set it was built around.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedTask {
    pub rewards: RewardVector,
    pub optimal: Subset,
}

/// Per-sequence adversary state: the hidden pool, the game table used for
/// `q_n`, and for the oblivious mode an imaginary greedy learner.
#[derive(Debug, Clone)]
pub struct AdversaryState {
    cfg: EnvConfig,
    pool: Subset,
    table: Option<Arc<ValueTable>>,
    imaginary: Option<Gbass>,
    round: usize,
    rng: SimRng,
}

impl AdversaryState {
    /// Draws the pool from `rng` and keeps using it for every later task.
    pub fn new(cfg: &EnvConfig, mut rng: SimRng) -> Result<Self> {
        cfg.validate()?;
        let pool = sample_optimal_pool(cfg, &mut rng)?;
        Self::with_pool(cfg, pool, rng)
    }

    pub fn with_pool(cfg: &EnvConfig, pool: Subset, rng: SimRng) -> Result<Self> {
        cfg.validate()?;
        pool.validate(cfg.k)?;
        if pool.is_empty() {
            return Err(invalid("optimal pool is empty"));
        }
        let table = match cfg.mode {
            AdversaryMode::Stochastic => None,
            _ => {
                let costs = dp_costs(cfg.k, cfg.m, cfg.tau, 1.0);
                Some(Arc::new(solve_cost_to_go(cfg.n, cfg.m, costs)?))
            }
        };
        let imaginary = match (cfg.mode, &table) {
            (AdversaryMode::Oblivious, Some(t)) => Some(Gbass::with_table(
                GbassConfig {
                    k: cfg.k,
                    m: cfg.m,
                    n_tasks: cfg.n,
                    tau: cfg.tau,
                    schedule: GbassSchedule::MinimaxDp,
                    c_b: 1.0,
                    base: Default::default(),
                    bai: cfg.bai_params(),
                },
                Arc::clone(t),
            )?),
            _ => None,
        };
        Ok(Self {
            cfg: cfg.clone(),
            pool,
            table,
            imaginary,
            round: 0,
            rng,
        })
    }

    pub fn pool(&self) -> &Subset {
        &self.pool
    }

    pub fn config(&self) -> &EnvConfig {
        &self.cfg
    }

    pub fn tasks_generated(&self) -> usize {
        self.round
    }

    /// Pool arms the oblivious adversary's imaginary learner has found.
    pub fn imaginary_discovered(&self) -> Option<&Subset> {
        self.imaginary.as_ref().map(Gbass::discovered)
    }

    fn reveal_probability(&self, known: &Subset) -> Result<f64> {
        let table = self.table.as_ref().expect("adversarial modes carry a table");
        if self.round >= table.horizon() {
            return Ok(0.0);
        }
        let s = known.intersection(&self.pool).len().min(self.cfg.m);
        Ok(saddle_point(table, self.round, s)?.1)
    }

    fn choose_adversarial(&mut self, known: &Subset) -> Result<usize> {
        let q = self.reveal_probability(known)?;
        let inside = self.pool.intersection(known);
        let outside = self.pool.difference(known);
        let reveal = self.rng.gen::<f64>() < q;
        Ok(match (reveal, outside.is_empty(), inside.is_empty()) {
            (true, false, _) => pick(&outside, &mut self.rng),
            (true, true, _) => pick(&inside, &mut self.rng),
            (false, _, false) => pick(&inside, &mut self.rng),
            (false, _, true) => pick(&self.pool, &mut self.rng),
        })
    }

    /// Generates the next task. The non-oblivious mode needs the learner's
    /// current discovered set; the other modes ignore it.
    pub fn next_task(&mut self, learner_set: Option<&Subset>) -> Result<GeneratedTask> {
        let best = match self.cfg.mode {
            AdversaryMode::Stochastic => pick(&self.pool.clone(), &mut self.rng),
            AdversaryMode::NonOblivious => {
                let known = learner_set
                    .ok_or_else(|| invalid("non-oblivious generation needs the learner's discovered set"))?
                    .clone();
                self.choose_adversarial(&known)?
            }
            AdversaryMode::Oblivious => {
                let mut imaginary = self.imaginary.take().expect("oblivious mode has an imaginary learner");
                let known = imaginary.discovered().clone();
                let mode = imaginary.decide(&mut self.rng)?;
                let best = self.choose_adversarial(&known);
                let best = match best {
                    Ok(b) => b,
                    Err(e) => {
                        self.imaginary = Some(imaginary);
                        return Err(e);
                    }
                };
                imaginary.record((mode == Mode::Explore).then(|| Subset::singleton(best)))?;
                self.imaginary = Some(imaginary);
                best
            }
        };
        let rewards = draw_rewards(&self.cfg, best, &mut self.rng)?;
        self.round += 1;
        Ok(GeneratedTask {
            rewards,
            optimal: Subset::singleton(best),
        })
    }
}

/// A whole pre-generated sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedSequence {
    pub sequence: TaskSequence,
    pub optimal: Vec<Subset>,
    pub pool: Subset,
}

/// Generates all `N` tasks from `cfg.master_seed`. Non-oblivious sequences
/// depend on the learner and must be streamed through [`AdversaryState`].
pub fn gen_sequence(cfg: &EnvConfig) -> Result<GeneratedSequence> {
    gen_sequence_with(cfg, stream(cfg.master_seed, &[]))
}

pub fn gen_sequence_with(cfg: &EnvConfig, rng: SimRng) -> Result<GeneratedSequence> {
    if cfg.mode == AdversaryMode::NonOblivious {
        return Err(invalid(
            "non-oblivious sequences react to the learner; stream them with AdversaryState::next_task",
        ));
    }
    let mut adv = AdversaryState::new(cfg, rng)?;
    let mut tasks = Vec::with_capacity(cfg.n);
    let mut optimal = Vec::with_capacity(cfg.n);
    for _ in 0..cfg.n {
        let t = adv.next_task(None)?;
        tasks.push(Task::new(t.rewards, cfg.tau)?);
        optimal.push(t.optimal);
    }
    Ok(GeneratedSequence {
        sequence: TaskSequence::new(tasks)?,
        optimal,
        pool: adv.pool,
    })
}

#[derive(Serialize)]
struct DumpRecord<'a> {
    n: usize,
    tau: usize,
    r: &'a [f64],
    opt: Vec<usize>,
}

/// One JSON object per line: `{"n", "tau", "r", "opt"}` with 1-based task
/// numbers and arm labels.
pub fn write_jsonl<W: Write>(out: &mut W, seq: &GeneratedSequence) -> Result<()> {
    for (i, (task, opt)) in seq.sequence.tasks().iter().zip(&seq.optimal).enumerate() {
        let rec = DumpRecord {
            n: i + 1,
            tau: task.len,
            r: task.rewards.values(),
            opt: opt.labels(),
        };
        serde_json::to_writer(&mut *out, &rec)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}
