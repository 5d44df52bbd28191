use crate::base::{BaseKind, BasePolicy, BaseRun};
use crate::envgen::{min_gap, EnvConfig};
use crate::error::Result;
use crate::meta::bog::{Bog, BogConfig, BogSchedule, SegmentPlan};
use crate::meta::ebass::{Ebass, EbassConfig};
use crate::meta::ewa_pm::EwaPm;
use crate::meta::gbass::{dp_costs, Gbass, GbassConfig};
use crate::meta::{exploit_task, BaiParams};
use crate::reward::{draw, NoiseModel};
use crate::rng::SimRng;
use crate::subset::Subset;
use crate::task::Task;

use super::config::{AlgorithmSpec, BogScheduleKind};

/// A learner that plays a sequence of tasks one at a time.
pub trait MetaLearner: Send {
    fn play_task(&mut self, task: &Task, noise: NoiseModel, rng: &mut SimRng) -> Result<BaseRun>;

    /// Arms the learner believes optimal for some task so far. The
    /// non-oblivious adversary reads this between tasks.
    fn discovered(&self) -> Subset;
}

/// Base policy on a fixed subset, restarted every task.
pub struct FixedSubset {
    subset: Subset,
    base: BaseKind,
}

impl MetaLearner for FixedSubset {
    fn play_task(&mut self, task: &Task, noise: NoiseModel, rng: &mut SimRng) -> Result<BaseRun> {
        exploit_task(task, &self.subset, self.base, noise, rng)
    }

    fn discovered(&self) -> Subset {
        Subset::empty()
    }
}

/// BOG over a continuous stream cut into segments of `tau_prime` rounds that
/// may straddle task boundaries.
pub struct BogLearner {
    bog: Bog,
    tau_prime: usize,
    current: Option<OpenSegment>,
}

struct OpenSegment {
    plan: SegmentPlan,
    policy: BasePolicy,
    left: usize,
    rounds: usize,
    realized: f64,
}

impl BogLearner {
    pub fn new(bog: Bog, tau_prime: usize) -> Self {
        Self {
            bog,
            tau_prime,
            current: None,
        }
    }

    pub fn bog(&self) -> &Bog {
        &self.bog
    }

    fn close(&mut self) -> Result<()> {
        if let Some(seg) = self.current.take() {
            self.bog.finish_segment(&seg.plan, seg.realized / seg.rounds.max(1) as f64)?;
        }
        Ok(())
    }
}

impl MetaLearner for BogLearner {
    fn play_task(&mut self, task: &Task, noise: NoiseModel, rng: &mut SimRng) -> Result<BaseRun> {
        let mut run = BaseRun::default();
        for _ in 0..task.len {
            if self.current.is_none() {
                let plan = self.bog.begin_segment(rng);
                let policy = BasePolicy::new(self.bog.base(), &plan.played, self.tau_prime)?;
                self.current = Some(OpenSegment {
                    plan,
                    policy,
                    left: self.tau_prime,
                    rounds: 0,
                    realized: 0.0,
                });
            }
            let seg = self.current.as_mut().expect("segment opened above");
            let arm = seg.policy.select(rng);
            let mean = task.rewards.get(arm);
            let x = draw(mean, noise, rng);
            seg.policy.update(arm, x);
            seg.left -= 1;
            seg.rounds += 1;
            seg.realized += x;
            run.actions.push(arm);
            run.realized.push(x);
            run.realized_total += x;
            run.mean_total += mean;
            if seg.left == 0 {
                self.close()?;
            }
        }
        Ok(run)
    }

    fn discovered(&self) -> Subset {
        self.bog.greedy_set()
    }
}

pub struct GbassLearner(pub Gbass);

impl MetaLearner for GbassLearner {
    fn play_task(&mut self, task: &Task, noise: NoiseModel, rng: &mut SimRng) -> Result<BaseRun> {
        Ok(self.0.play_task(task, noise, rng)?.run)
    }

    fn discovered(&self) -> Subset {
        self.0.discovered().clone()
    }
}

pub struct EbassLearner(pub Ebass);

impl MetaLearner for EbassLearner {
    fn play_task(&mut self, task: &Task, noise: NoiseModel, rng: &mut SimRng) -> Result<BaseRun> {
        Ok(self.0.play_task(task, noise, rng)?.run)
    }

    fn discovered(&self) -> Subset {
        self.0.discovered().clone()
    }
}

pub struct EwaPmLearner(pub EwaPm);

impl MetaLearner for EwaPmLearner {
    fn play_task(&mut self, task: &Task, noise: NoiseModel, rng: &mut SimRng) -> Result<BaseRun> {
        Ok(self.0.play_task(task, noise, rng)?.run)
    }

    fn discovered(&self) -> Subset {
        self.0.discovered().clone()
    }
}

/// Segments covering the whole horizon.
fn segment_count(env: &EnvConfig, tau_prime: usize) -> usize {
    (env.n * env.tau).div_ceil(tau_prime).max(1)
}

/// Builds the learner for `spec`. `pool` is only used by the oracle
/// baseline; `gamma` resolves an OGo spec without its own value.
pub fn build(spec: &AlgorithmSpec, env: &EnvConfig, pool: &Subset, gamma: Option<f64>) -> Result<Box<dyn MetaLearner>> {
    let bai = BaiParams {
        delta_task: env.delta_task(),
        gap: Some(min_gap(env)),
    };
    Ok(match spec {
        AlgorithmSpec::Bog {
            schedule,
            tau_prime,
            base,
            ..
        } => {
            let tau_prime = tau_prime.unwrap_or(env.tau);
            let n_prime = segment_count(env, tau_prime);
            let schedule = match schedule {
                BogScheduleKind::Anytime => BogSchedule::Anytime,
                BogScheduleKind::KnownHorizon => BogSchedule::KnownHorizon { n_prime },
            };
            let bog = Bog::new(&BogConfig {
                k: env.k,
                m: env.m,
                schedule,
                base: *base,
                n_prime,
                m_tilde: None,
            })?;
            Box::new(BogLearner::new(bog, tau_prime))
        }
        AlgorithmSpec::Ogo { gamma: own, base, .. } => {
            let gamma = own.or(gamma).ok_or_else(|| {
                crate::error::Error::Config("OGo needs gamma (set it or let the harness pick one)".into())
            })?;
            let bog = Bog::new(&BogConfig {
                k: env.k,
                m: env.m,
                schedule: BogSchedule::Fixed { gamma },
                base: *base,
                n_prime: env.n,
                m_tilde: None,
            })?;
            Box::new(BogLearner::new(bog, env.tau))
        }
        AlgorithmSpec::Gbass {
            schedule, c_b, base, ..
        } => Box::new(GbassLearner(Gbass::new(GbassConfig {
            k: env.k,
            m: env.m,
            n_tasks: env.n,
            tau: env.tau,
            schedule: *schedule,
            c_b: *c_b,
            base: *base,
            bai,
        })?)),
        AlgorithmSpec::Ebass { p, base, .. } => Box::new(EbassLearner(Ebass::new(EbassConfig {
            k: env.k,
            m: env.m,
            n_tasks: env.n,
            tau: env.tau,
            p: *p,
            base: *base,
            bai,
        })?)),
        AlgorithmSpec::Ewapm { mode, c_b, base, .. } => {
            let costs = dp_costs(env.k, env.m, env.tau, *c_b);
            Box::new(EwaPmLearner(
                EwaPm::tuned(env.k, env.m, costs, *mode, env.n)?.with_bandit(*base, bai),
            ))
        }
        AlgorithmSpec::Moss { .. } => Box::new(FixedSubset {
            subset: Subset::full(env.k),
            base: BaseKind::Moss,
        }),
        AlgorithmSpec::OptMoss { .. } => Box::new(FixedSubset {
            subset: pool.clone(),
            base: BaseKind::Moss,
        }),
    })
}
