//! Meta-algorithms that pick a subset of arms for each task.

pub mod bog;
pub mod cover;
pub mod ebass;
pub mod ewa_pm;
pub mod gbass;
pub mod og;
pub mod schedule;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::base::{phased_elimination_tuned, run_base, BaseKind, BasePolicy, BaseRun};
use crate::error::Result;
use crate::reward::NoiseModel;
use crate::subset::Subset;
use crate::task::Task;

pub use crate::game::CostTriple;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Explore,
    Exploit,
}

/// Parameters of the best-arm-identification step run on exploration tasks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaiParams {
    /// Per-task failure probability.
    pub delta_task: f64,
    /// Minimum gap known to the learner, if any.
    pub gap: Option<f64>,
}

/// What a meta-learner did on one task.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskPlay {
    pub mode: Mode,
    /// Subset the base policy was restricted to (all arms during the
    /// identification phase of an exploration task).
    pub played: Subset,
    pub run: BaseRun,
    /// Optimal set reported by identification, on exploration tasks.
    pub observed: Option<Subset>,
}

/// Identification over all arms, then `base` on the surviving arms for the
/// rest of the task.
pub fn explore_task<R: Rng + ?Sized>(
    task: &Task,
    bai: BaiParams,
    base: BaseKind,
    noise: NoiseModel,
    rng: &mut R,
) -> Result<(BaseRun, Subset)> {
    let out = phased_elimination_tuned(task, task.len, bai.delta_task, bai.gap, noise, rng)?;
    let mut run = out.run;
    let rest = task.len - out.rounds_used;
    if rest > 0 {
        let mut policy = BasePolicy::new(base, &out.surviving, rest)?;
        let tail = Task::new(task.rewards.clone(), rest)?;
        run.absorb(run_base(&mut policy, &tail, noise, rng)?);
    }
    Ok((run, out.surviving))
}

/// Runs `base` restricted to `subset` for the whole task.
pub fn exploit_task<R: Rng + ?Sized>(
    task: &Task,
    subset: &Subset,
    base: BaseKind,
    noise: NoiseModel,
    rng: &mut R,
) -> Result<BaseRun> {
    let mut policy = BasePolicy::new(base, subset, task.len)?;
    run_base(&mut policy, task, noise, rng)
}
