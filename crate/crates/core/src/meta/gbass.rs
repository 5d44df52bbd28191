//! Greedy bandit subset selection: explore with best-arm identification,
//! otherwise run the base policy on a greedy hitting set of everything
//! identified so far.

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::base::{regret_bound, BaseKind};
use crate::error::{invalid, Result};
use crate::game::{saddle_point, solve_cost_to_go, CostTriple, ValueTable};
use crate::reward::NoiseModel;
use crate::subset::Subset;
use crate::task::Task;

use super::cover::greedy_cover;
use super::schedule::{clamp_probability, gbass_general};
use super::{explore_task, exploit_task, BaiParams, Mode, TaskPlay};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GbassSchedule {
    /// Learner's saddle-point probability from the cost-to-go table.
    #[default]
    MinimaxDp,
    /// `√(|S_n| K τ / (N B_{τ,K}))`.
    General,
    /// Constant probability after the first task (not clamped).
    Fixed { p: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbassConfig {
    pub k: usize,
    pub m: usize,
    pub n_tasks: usize,
    pub tau: usize,
    pub schedule: GbassSchedule,
    pub c_b: f64,
    pub base: BaseKind,
    pub bai: BaiParams,
}

/// Costs used to solve the game for the given task shape:
/// `C_info = c_B √(Kτ)`, `C_hit = c_B √(Mτ)`, `C_miss = τ`, with `C_info` and
/// `C_hit` capped at `τ` (regret in a task can never exceed its length).
pub fn dp_costs(k: usize, m: usize, tau: usize, c_b: f64) -> CostTriple {
    let c_miss = tau as f64;
    let c_info = regret_bound(tau, k, c_b).min(c_miss);
    let c_hit = regret_bound(tau, m, c_b).min(c_info);
    CostTriple::constant(c_info, c_hit, c_miss)
}

#[derive(Debug, Clone)]
pub struct Gbass {
    cfg: GbassConfig,
    table: Option<Arc<ValueTable>>,
    knowledge: Vec<Subset>,
    discovered: Subset,
    cover: Subset,
    tasks: usize,
}

impl Gbass {
    pub fn new(cfg: GbassConfig) -> Result<Self> {
        let table = match cfg.schedule {
            GbassSchedule::MinimaxDp => {
                let costs = dp_costs(cfg.k, cfg.m, cfg.tau, cfg.c_b);
                Some(Arc::new(solve_cost_to_go(cfg.n_tasks, cfg.m, costs)?))
            }
            _ => None,
        };
        Self::build(cfg, table)
    }

    /// Reuses an already solved table (it must match `N` and `M`).
    pub fn with_table(cfg: GbassConfig, table: Arc<ValueTable>) -> Result<Self> {
        if table.horizon() != cfg.n_tasks || table.m() != cfg.m {
            return Err(invalid(format!(
                "table solved for N={}, M={} but config has N={}, M={}",
                table.horizon(),
                table.m(),
                cfg.n_tasks,
                cfg.m
            )));
        }
        Self::build(cfg, Some(table))
    }

    fn build(cfg: GbassConfig, table: Option<Arc<ValueTable>>) -> Result<Self> {
        if cfg.k == 0 || cfg.m == 0 || cfg.m > cfg.k {
            return Err(invalid(format!("need 1 <= M={} <= K={}", cfg.m, cfg.k)));
        }
        if cfg.n_tasks == 0 || cfg.tau == 0 {
            return Err(invalid("N and tau must be positive"));
        }
        if let GbassSchedule::Fixed { p } = cfg.schedule {
            if !(0.0..=1.0).contains(&p) {
                return Err(invalid(format!("fixed p={p} outside [0,1]")));
            }
        }
        Ok(Self {
            cfg,
            table,
            knowledge: Vec::new(),
            discovered: Subset::empty(),
            cover: Subset::empty(),
            tasks: 0,
        })
    }

    pub fn config(&self) -> &GbassConfig {
        &self.cfg
    }

    pub fn knowledge(&self) -> &[Subset] {
        &self.knowledge
    }

    pub fn discovered(&self) -> &Subset {
        &self.discovered
    }

    pub fn cover(&self) -> &Subset {
        &self.cover
    }

    pub fn tasks_played(&self) -> usize {
        self.tasks
    }

    /// Exploration probability for the next task.
    pub fn exploration_probability(&self) -> Result<f64> {
        let n = self.tasks;
        if n == 0 {
            return Ok(1.0);
        }
        Ok(match self.cfg.schedule {
            GbassSchedule::MinimaxDp => {
                let table = self.table.as_ref().expect("table is built for this schedule");
                if n >= table.horizon() {
                    return Ok(0.0);
                }
                let s = self.discovered.len().min(self.cfg.m);
                clamp_probability(saddle_point(table, n, s)?.0)
            }
            GbassSchedule::General => gbass_general(
                self.cover.len().max(1),
                self.cfg.k,
                self.cfg.tau,
                self.cfg.n_tasks,
                self.cfg.c_b,
            ),
            GbassSchedule::Fixed { p } => p,
        })
    }

    /// Flips the explore/exploit coin for the next task. The first task is
    /// always an exploration task.
    pub fn decide<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Mode> {
        let p = self.exploration_probability()?;
        Ok(if self.tasks == 0 || rng.gen::<f64>() < p {
            Mode::Explore
        } else {
            Mode::Exploit
        })
    }

    /// Ends the current task; `observed` is the identified optimal set when
    /// the task was explored.
    pub fn record(&mut self, observed: Option<Subset>) -> Result<()> {
        if let Some(s) = observed {
            if s.is_empty() {
                return Err(invalid("identified optimal set is empty"));
            }
            self.discovered = self.discovered.union(&s);
            self.knowledge.push(s);
            self.cover = greedy_cover(&self.knowledge)?;
        }
        self.tasks += 1;
        Ok(())
    }

    pub fn play_task<R: Rng + ?Sized>(&mut self, task: &Task, noise: NoiseModel, rng: &mut R) -> Result<TaskPlay> {
        if task.k() != self.cfg.k {
            return Err(invalid(format!("task has K={} but learner expects K={}", task.k(), self.cfg.k)));
        }
        let mode = self.decide(rng)?;
        let play = match mode {
            Mode::Explore => {
                let (run, surviving) = explore_task(task, self.cfg.bai, self.cfg.base, noise, rng)?;
                TaskPlay {
                    mode,
                    played: Subset::full(self.cfg.k),
                    run,
                    observed: Some(surviving),
                }
            }
            Mode::Exploit => {
                let run = exploit_task(task, &self.cover, self.cfg.base, noise, rng)?;
                TaskPlay {
                    mode,
                    played: self.cover.clone(),
                    run,
                    observed: None,
                }
            }
        };
        self.record(play.observed.clone())?;
        Ok(play)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reward::RewardVector;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cfg(schedule: GbassSchedule) -> GbassConfig {
        GbassConfig {
            k: 6,
            m: 2,
            n_tasks: 50,
            tau: 600,
            schedule,
            c_b: 1.0,
            base: BaseKind::Moss,
            bai: BaiParams {
                delta_task: 1e-3,
                gap: Some(0.3),
            },
        }
    }

    fn task(best: usize) -> Task {
        let mut r = vec![0.1; 6];
        r[best] = 0.8;
        Task::new(RewardVector::new(r).unwrap(), 600).unwrap()
    }

    #[test]
    fn first_task_explores() {
        for schedule in [GbassSchedule::MinimaxDp, GbassSchedule::General, GbassSchedule::Fixed { p: 0.0 }] {
            let mut g = Gbass::new(cfg(schedule)).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            let play = g.play_task(&task(3), NoiseModel::Uniform, &mut rng).unwrap();
            assert_eq!(play.mode, Mode::Explore);
            assert_eq!(play.observed, Some(Subset::singleton(3)));
        }
    }

    #[test]
    fn zero_probability_freezes_cover() {
        let mut g = Gbass::new(cfg(GbassSchedule::Fixed { p: 0.0 })).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        g.play_task(&task(4), NoiseModel::Uniform, &mut rng).unwrap();
        for n in 0..20 {
            let play = g.play_task(&task(n % 6), NoiseModel::Uniform, &mut rng).unwrap();
            assert_eq!(play.mode, Mode::Exploit);
            assert_eq!(play.played, Subset::singleton(4));
        }
    }

    #[test]
    fn cover_hits_all_knowledge() {
        let mut g = Gbass::new(cfg(GbassSchedule::Fixed { p: 1.0 })).unwrap();
        for s in [vec![0, 1], vec![1, 2], vec![4], vec![5, 0]] {
            g.record(Some(Subset::from_arms(s))).unwrap();
            for k in g.knowledge() {
                assert!(g.cover().intersects(k));
            }
        }
        assert_eq!(g.discovered().labels(), vec![1, 2, 3, 5, 6]);
        assert!(g.record(Some(Subset::empty())).is_err());
    }

    #[test]
    fn minimax_probability_drops_once_pool_is_known() {
        let mut g = Gbass::new(cfg(GbassSchedule::MinimaxDp)).unwrap();
        g.record(Some(Subset::singleton(0))).unwrap();
        let p1 = g.exploration_probability().unwrap();
        assert!(p1 > 1e-6 && p1 <= 1.0);
        g.record(Some(Subset::singleton(1))).unwrap();
        // both pool arms found: the learner stops exploring
        assert_eq!(g.exploration_probability().unwrap(), 1e-6);
    }

    #[test]
    fn table_shape_must_match() {
        let costs = dp_costs(6, 2, 600, 1.0);
        let t = Arc::new(solve_cost_to_go(10, 2, costs).unwrap());
        assert!(Gbass::with_table(cfg(GbassSchedule::MinimaxDp), t).is_err());
    }

    #[test]
    fn dp_costs_are_ordered() {
        let c = dp_costs(15, 5, 1000, 1.0);
        assert!((c.c_info - 122.474_487_139_158_9).abs() < 1e-9);
        assert!((c.hit(0) - 70.710_678_118_654_76).abs() < 1e-9);
        assert_eq!(c.c_miss, 1000.0);
        c.validate(5).unwrap();
        let c = dp_costs(15, 5, 4, 1.0);
        assert!(c.c_info <= c.c_miss);
    }
}
