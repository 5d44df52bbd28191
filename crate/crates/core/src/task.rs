//! Task sequences, the best fixed `M`-subset comparator and pseudo-regret.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::reward::{f_max_unchecked, RewardVector};
use crate::subset::{binomial, Combinations, Subset};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Task {
    pub rewards: RewardVector,
    pub len: usize,
}

impl Task {
    pub fn new(rewards: RewardVector, len: usize) -> Result<Self> {
        if len == 0 {
            return Err(invalid("task length must be at least 1"));
        }
        Ok(Self { rewards, len })
    }

    pub fn k(&self) -> usize {
        self.rewards.k()
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TaskSequence {
    tasks: Vec<Task>,
}

impl TaskSequence {
    pub fn new(tasks: Vec<Task>) -> Result<Self> {
        if let Some(first) = tasks.first() {
            let k = first.k();
            if tasks.iter().any(|t| t.k() != k) {
                return Err(invalid("all tasks must share the same number of arms"));
            }
        }
        Ok(Self { tasks })
    }

    pub fn tasks(&self) -> &[Task] {
        &self.tasks
    }

    pub fn len(&self) -> usize {
        self.tasks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tasks.is_empty()
    }

    pub fn k(&self) -> usize {
        self.tasks.first().map_or(0, Task::k)
    }

    pub fn total_rounds(&self) -> usize {
        self.tasks.iter().map(|t| t.len).sum()
    }

    pub fn push(&mut self, task: Task) -> Result<()> {
        if !self.tasks.is_empty() && task.k() != self.k() {
            return Err(invalid("all tasks must share the same number of arms"));
        }
        self.tasks.push(task);
        Ok(())
    }
}

/// Largest `K` accepted by [`best_m_subset`].
pub const BEST_SUBSET_MAX_K: usize = 25;
/// Largest `C(K, M)` accepted by [`best_m_subset`].
pub const BEST_SUBSET_MAX_COUNT: u128 = 10_000_000;

/// Value `Σ_n τ_n · f_max(r_n, S)` of a fixed subset over a sequence.
pub fn subset_value(seq: &TaskSequence, s: &Subset) -> Result<f64> {
    if s.is_empty() {
        return Err(invalid("comparator subset is empty"));
    }
    s.validate(seq.k())?;
    Ok(value_unchecked(seq, s.arms()))
}

fn value_unchecked(seq: &TaskSequence, arms: &[usize]) -> f64 {
    seq.tasks
        .iter()
        .map(|t| t.len as f64 * f_max_unchecked(&t.rewards, arms))
        .sum()
}

/// Exhaustive search for the `M`-subset with the largest value. Ties keep the
/// lexicographically smallest arm list.
pub fn best_m_subset(seq: &TaskSequence, m: usize) -> Result<(Subset, f64)> {
    let k = seq.k();
    if seq.is_empty() {
        return Err(invalid("empty task sequence"));
    }
    if m == 0 || m > k {
        return Err(invalid(format!("M={m} must lie in 1..=K={k}")));
    }
    if k > BEST_SUBSET_MAX_K {
        return Err(Error::ResourceLimit {
            what: "K for exhaustive best M-subset".into(),
            value: k as u128,
            limit: BEST_SUBSET_MAX_K as u128,
        });
    }
    let count = binomial(k, m);
    if count > BEST_SUBSET_MAX_COUNT {
        return Err(Error::ResourceLimit {
            what: format!("C(K={k}, M={m}) subsets"),
            value: count,
            limit: BEST_SUBSET_MAX_COUNT,
        });
    }
    let mut best: Option<(Vec<usize>, f64)> = None;
    for arms in Combinations::new(k, m) {
        let v = value_unchecked(seq, &arms);
        if best.as_ref().is_none_or(|(_, bv)| v > *bv) {
            best = Some((arms, v));
        }
    }
    let (arms, v) = best.expect("at least one subset");
    Ok((Subset::from_arms(arms), v))
}

/// `Σ_n Σ_t (f_max(r_n, comparator) − r_n(A_{n,t}))` using mean rewards.
pub fn pseudo_regret(seq: &TaskSequence, actions: &[Vec<usize>], comparator: &Subset) -> Result<f64> {
    if actions.len() != seq.len() {
        return Err(invalid(format!(
            "{} action lists for {} tasks",
            actions.len(),
            seq.len()
        )));
    }
    if comparator.is_empty() {
        return Err(invalid("comparator subset is empty"));
    }
    comparator.validate(seq.k())?;
    let mut regret = 0.0;
    for (n, (task, acts)) in seq.tasks.iter().zip(actions).enumerate() {
        if acts.len() != task.len {
            return Err(invalid(format!(
                "task {} has {} rounds but {} actions",
                n + 1,
                task.len,
                acts.len()
            )));
        }
        let best = f_max_unchecked(&task.rewards, comparator.arms());
        for &a in acts {
            if a >= task.k() {
                return Err(invalid(format!("action {} outside 1..={}", a + 1, task.k())));
            }
            regret += best - task.rewards.get(a);
        }
    }
    Ok(regret)
}

/// Cumulative pseudo-regret of one (algorithm, seed) run at task checkpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretTrace {
    pub algorithm_id: String,
    pub seed: u64,
    /// `(task index, cumulative regret)`, task index 1-based and increasing.
    pub checkpoints: Vec<(usize, f64)>,
}

impl RegretTrace {
    pub fn final_regret(&self) -> f64 {
        self.checkpoints.last().map_or(0.0, |c| c.1)
    }
}
