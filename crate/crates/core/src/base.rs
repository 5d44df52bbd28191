//! In-task bandit policies restricted to a subset of arms, and phased
//! elimination for best-arm identification.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::reward::{draw, NoiseModel, RewardVector};
use crate::subset::Subset;
use crate::task::Task;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaseKind {
    Ucb,
    #[default]
    Moss,
    Exp3,
}

/// A bandit policy over `restricted_to` for a known horizon.
#[derive(Debug, Clone)]
pub struct BasePolicy {
    kind: BaseKind,
    arms: Vec<usize>,
    horizon: usize,
    counts: Vec<u64>,
    sums: Vec<f64>,
    // EXP3: cumulative importance-weighted loss estimates
    loss_est: Vec<f64>,
    probs: Vec<f64>,
    rate: f64,
    t: u64,
}

impl BasePolicy {
    pub fn new(kind: BaseKind, restricted_to: &Subset, horizon: usize) -> Result<Self> {
        if restricted_to.is_empty() {
            return Err(invalid("base policy needs a nonempty arm set"));
        }
        if horizon == 0 {
            return Err(invalid("base policy horizon must be at least 1"));
        }
        let n = restricted_to.len();
        let rate = if n > 1 {
            (2.0 * (n as f64).ln() / (horizon as f64 * n as f64)).sqrt()
        } else {
            0.0
        };
        Ok(Self {
            kind,
            arms: restricted_to.arms().to_vec(),
            horizon,
            counts: vec![0; n],
            sums: vec![0.0; n],
            loss_est: vec![0.0; n],
            probs: vec![1.0 / n as f64; n],
            rate,
            t: 0,
        })
    }

    pub fn kind(&self) -> BaseKind {
        self.kind
    }

    pub fn arms(&self) -> &[usize] {
        &self.arms
    }

    pub fn rounds(&self) -> u64 {
        self.t
    }

    /// Pull counts per arm of `restricted_to`, in sorted arm order.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    fn select_slot<R: Rng + ?Sized>(&mut self, rng: &mut R) -> usize {
        let n = self.arms.len();
        if n == 1 {
            return 0;
        }
        match self.kind {
            BaseKind::Ucb | BaseKind::Moss => {
                if let Some(i) = self.counts.iter().position(|&c| c == 0) {
                    return i;
                }
                let t = (self.t + 1) as f64;
                let horizon = self.horizon as f64;
                let mut best = 0;
                let mut best_idx = f64::NEG_INFINITY;
                for i in 0..n {
                    let c = self.counts[i] as f64;
                    let bonus = match self.kind {
                        BaseKind::Ucb => (2.0 * t.ln() / c).sqrt(),
                        _ => ((horizon / (n as f64 * c)).ln().max(0.0) / c).sqrt(),
                    };
                    let idx = self.sums[i] / c + bonus;
                    if idx > best_idx {
                        best_idx = idx;
                        best = i;
                    }
                }
                best
            }
            BaseKind::Exp3 => {
                let min = self.loss_est.iter().copied().fold(f64::INFINITY, f64::min);
                let mut total = 0.0;
                for i in 0..n {
                    self.probs[i] = (-self.rate * (self.loss_est[i] - min)).exp();
                    total += self.probs[i];
                }
                for p in &mut self.probs {
                    *p /= total;
                }
                sample_index(&self.probs, rng)
            }
        }
    }

    /// Picks the next arm (0-based index into `[K]`).
    pub fn select<R: Rng + ?Sized>(&mut self, rng: &mut R) -> usize {
        let slot = self.select_slot(rng);
        self.arms[slot]
    }

    pub fn update(&mut self, arm: usize, reward: f64) {
        let slot = self
            .arms
            .binary_search(&arm)
            .expect("update for an arm outside the policy's subset");
        self.t += 1;
        self.counts[slot] += 1;
        self.sums[slot] += reward;
        if self.kind == BaseKind::Exp3 && self.arms.len() > 1 {
            self.loss_est[slot] += (1.0 - reward) / self.probs[slot];
        }
    }
}

/// Inverse-CDF draw from a normalised probability vector.
pub(crate) fn sample_index<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    // rounding left u above the last partial sum
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(probs.len() - 1)
}

/// What one uninterrupted run of a base policy produced.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BaseRun {
    pub actions: Vec<usize>,
    pub realized: Vec<f64>,
    pub realized_total: f64,
    /// `Σ_t r(A_t)` with mean rewards.
    pub mean_total: f64,
}

impl BaseRun {
    pub fn rounds(&self) -> usize {
        self.actions.len()
    }

    fn record(&mut self, arm: usize, mean: f64, realized: f64) {
        self.actions.push(arm);
        self.realized.push(realized);
        self.realized_total += realized;
        self.mean_total += mean;
    }

    pub(crate) fn absorb(&mut self, other: BaseRun) {
        self.actions.extend(other.actions);
        self.realized.extend(other.realized);
        self.realized_total += other.realized_total;
        self.mean_total += other.mean_total;
    }
}

/// Plays `policy` for `task.len` rounds on `task.rewards`.
pub fn run_base<R: Rng + ?Sized>(
    policy: &mut BasePolicy,
    task: &Task,
    noise: NoiseModel,
    rng: &mut R,
) -> Result<BaseRun> {
    run_base_segment(policy, &[(&task.rewards, task.len)], noise, rng)
}

/// Plays `policy` across consecutive pieces of possibly different tasks,
/// without resetting it at the piece boundaries.
pub fn run_base_segment<R: Rng + ?Sized>(
    policy: &mut BasePolicy,
    pieces: &[(&RewardVector, usize)],
    noise: NoiseModel,
    rng: &mut R,
) -> Result<BaseRun> {
    if let Some(&last) = policy.arms.last() {
        if pieces.iter().any(|(r, _)| last >= r.k()) {
            return Err(invalid("policy subset exceeds the number of arms"));
        }
    }
    let total: usize = pieces.iter().map(|p| p.1).sum();
    let mut run = BaseRun {
        actions: Vec::with_capacity(total),
        realized: Vec::with_capacity(total),
        ..BaseRun::default()
    };
    for &(rewards, len) in pieces {
        for _ in 0..len {
            let arm = policy.select(rng);
            let mean = rewards.get(arm);
            let x = draw(mean, noise, rng);
            policy.update(arm, x);
            run.record(arm, mean, x);
        }
    }
    Ok(run)
}

/// `B_{τ,K} = c_B · √(K τ)`.
pub fn regret_bound(tau: usize, k: usize, c_b: f64) -> f64 {
    c_b * ((k as f64) * (tau as f64)).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaiOutcome {
    pub surviving: Subset,
    pub rounds_used: usize,
    /// Whether `surviving` only holds optimal arms. Computed from the true
    /// means for diagnostics; learners must not read it. `None` when the
    /// budget could not cover one pull per arm.
    pub succeeded: Option<bool>,
    pub run: BaseRun,
    pub phases: usize,
}

/// Phased elimination over all arms of `task` within `budget` rounds.
///
/// Phase `m` has tolerance `ε_m = 2^{-m}` and brings every active arm up to
/// `n_m = ⌈2 ln(2 K m (m+1) / δ) / ε_m²⌉` pulls (counts accumulate across
/// phases). An arm is dropped when `μ̂_a + ε/2 < max_b μ̂_b − ε/2`. If the
/// budget runs out inside a phase, the remaining rounds are spread evenly over
/// the active arms and one last elimination uses the tolerance implied by the
/// smallest count reached, `ε = √(2 ln(2 K m (m+1) / δ) / n_min)`.
pub fn phased_elimination<R: Rng + ?Sized>(
    task: &Task,
    budget: usize,
    delta: f64,
    noise: NoiseModel,
    rng: &mut R,
) -> Result<BaiOutcome> {
    phased_elimination_tuned(task, budget, delta, None, noise, rng)
}

/// Phased elimination for a learner that knows the minimum gap `Δ` of the
/// environment. Phases run as in [`phased_elimination`]; once the budget is
/// spent, the surviving arms are cut at the midpoint of the gap, dropping
/// every arm with `μ̂_a < max_b μ̂_b − Δ/2`.
pub fn phased_elimination_tuned<R: Rng + ?Sized>(
    task: &Task,
    budget: usize,
    delta: f64,
    gap: Option<f64>,
    noise: NoiseModel,
    rng: &mut R,
) -> Result<BaiOutcome> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid(format!("delta={delta} must lie in (0,1)")));
    }
    if let Some(g) = gap {
        if !(g > 0.0 && g.is_finite()) {
            return Err(invalid(format!("gap={g} must be positive")));
        }
    }
    let k = task.k();
    let budget = budget.min(task.len);
    let optimal = task.rewards.optimal_set();
    let mut run = BaseRun::default();
    if k == 1 {
        return Ok(BaiOutcome {
            surviving: Subset::singleton(0),
            rounds_used: 0,
            succeeded: Some(true),
            run,
            phases: 0,
        });
    }
    if budget < k {
        return Ok(BaiOutcome {
            surviving: Subset::full(k),
            rounds_used: 0,
            succeeded: None,
            run,
            phases: 0,
        });
    }

    let mut active: Vec<usize> = (0..k).collect();
    let mut counts = vec![0usize; k];
    let mut sums = vec![0.0f64; k];
    let mut used = 0usize;
    let mut phase = 0usize;

    let pull = |arm: usize, run: &mut BaseRun, rng: &mut R| {
        let mean = task.rewards.get(arm);
        let x = draw(mean, noise, rng);
        run.record(arm, mean, x);
        x
    };

    while active.len() > 1 && used < budget {
        phase += 1;
        let m = phase as f64;
        let log_term = (2.0 * k as f64 * m * (m + 1.0) / delta).ln();
        let eps = 0.5f64.powi(phase as i32);
        let target = (2.0 * log_term / (eps * eps)).ceil() as usize;
        let needed: usize = active.iter().map(|&a| target.saturating_sub(counts[a])).sum();

        let tolerance = if used + needed <= budget {
            for &a in &active {
                while counts[a] < target {
                    sums[a] += pull(a, &mut run, rng);
                    counts[a] += 1;
                    used += 1;
                }
            }
            eps
        } else {
            // round-robin the rest, least-pulled arm first
            while used < budget {
                let a = *active
                    .iter()
                    .min_by_key(|&&a| (counts[a], a))
                    .expect("active set is nonempty");
                sums[a] += pull(a, &mut run, rng);
                counts[a] += 1;
                used += 1;
            }
            let n_min = active.iter().map(|&a| counts[a]).min().unwrap_or(0);
            (2.0 * log_term / n_min as f64).sqrt()
        };

        let best = active
            .iter()
            .map(|&a| sums[a] / counts[a] as f64)
            .fold(f64::NEG_INFINITY, f64::max);
        active.retain(|&a| sums[a] / counts[a] as f64 + tolerance / 2.0 >= best - tolerance / 2.0);
    }
    if let (Some(g), true) = (gap, active.len() > 1 && used >= budget) {
        let best = active
            .iter()
            .map(|&a| sums[a] / counts[a] as f64)
            .fold(f64::NEG_INFINITY, f64::max);
        active.retain(|&a| sums[a] / counts[a] as f64 >= best - g / 2.0);
    }

    let surviving = Subset::from_arms(active);
    let succeeded = Some(surviving.is_subset_of(&optimal));
    Ok(BaiOutcome {
        surviving,
        rounds_used: used,
        succeeded,
        run,
        phases: phase,
    })
}
