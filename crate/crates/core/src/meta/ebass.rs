//! Elimination-based bandit subset selection: keep every `M`-subset that
//! hits all identified optimal sets and exploit a uniformly drawn survivor.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::base::BaseKind;
use crate::error::{invalid, Result};
use crate::reward::NoiseModel;
use crate::subset::{all_m_subsets, Subset};
use crate::task::Task;

use super::schedule::ebass_schedule;
use super::{explore_task, exploit_task, BaiParams, Mode, TaskPlay};

/// Largest hypothesis class enumerated by the subset-enumerating learners.
pub const MAX_HYPOTHESES: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EbassConfig {
    pub k: usize,
    pub m: usize,
    pub n_tasks: usize,
    pub tau: usize,
    /// Overrides the default `(τ/K)^{1/4} √(ln K / N)`.
    pub p: Option<f64>,
    pub base: BaseKind,
    pub bai: BaiParams,
}

#[derive(Debug, Clone)]
pub struct Ebass {
    cfg: EbassConfig,
    p: f64,
    hypotheses: Vec<Subset>,
    active: Vec<usize>,
    observed: Vec<Subset>,
    discovered: Subset,
    resets: usize,
    tasks: usize,
}

impl Ebass {
    pub fn new(cfg: EbassConfig) -> Result<Self> {
        if cfg.k == 0 || cfg.m == 0 || cfg.m > cfg.k {
            return Err(invalid(format!("need 1 <= M={} <= K={}", cfg.m, cfg.k)));
        }
        let p = match cfg.p {
            Some(p) if !(0.0..=1.0).contains(&p) => return Err(invalid(format!("p={p} outside [0,1]"))),
            Some(p) => p,
            None => ebass_schedule(cfg.tau, cfg.k, cfg.n_tasks),
        };
        let hypotheses = all_m_subsets(cfg.k, cfg.m, MAX_HYPOTHESES)?;
        let active = (0..hypotheses.len()).collect();
        Ok(Self {
            cfg,
            p,
            hypotheses,
            active,
            observed: Vec::new(),
            discovered: Subset::empty(),
            resets: 0,
            tasks: 0,
        })
    }

    pub fn exploration_probability(&self) -> f64 {
        self.p
    }

    /// Surviving hypotheses in lexicographic order.
    pub fn active(&self) -> impl Iterator<Item = &Subset> {
        self.active.iter().map(|&i| &self.hypotheses[i])
    }

    pub fn active_len(&self) -> usize {
        self.active.len()
    }

    pub fn observed(&self) -> &[Subset] {
        &self.observed
    }

    pub fn discovered(&self) -> &Subset {
        &self.discovered
    }

    /// How often every hypothesis was eliminated and the class restarted.
    pub fn resets(&self) -> usize {
        self.resets
    }

    pub fn decide<R: Rng + ?Sized>(&self, rng: &mut R) -> Mode {
        if self.tasks == 0 || rng.gen::<f64>() < self.p {
            Mode::Explore
        } else {
            Mode::Exploit
        }
    }

    /// Drops hypotheses missing `s`. If none survive, the class restarts from
    /// all `M`-subsets and the event is counted.
    pub fn observe(&mut self, s: Subset) -> Result<()> {
        if s.is_empty() {
            return Err(invalid("identified optimal set is empty"));
        }
        let hyps = &self.hypotheses;
        self.active.retain(|&i| hyps[i].intersects(&s));
        if self.active.is_empty() {
            self.active = (0..self.hypotheses.len()).collect();
            self.resets += 1;
        }
        self.discovered = self.discovered.union(&s);
        self.observed.push(s);
        Ok(())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> &Subset {
        &self.hypotheses[self.active[rng.gen_range(0..self.active.len())]]
    }

    pub fn play_task<R: Rng + ?Sized>(&mut self, task: &Task, noise: NoiseModel, rng: &mut R) -> Result<TaskPlay> {
        if task.k() != self.cfg.k {
            return Err(invalid(format!("task has K={} but learner expects K={}", task.k(), self.cfg.k)));
        }
        let mode = self.decide(rng);
        let play = match mode {
            Mode::Explore => {
                let (run, surviving) = explore_task(task, self.cfg.bai, self.cfg.base, noise, rng)?;
                self.observe(surviving.clone())?;
                TaskPlay {
                    mode,
                    played: Subset::full(self.cfg.k),
                    run,
                    observed: Some(surviving),
                }
            }
            Mode::Exploit => {
                let s = self.sample(rng).clone();
                let run = exploit_task(task, &s, self.cfg.base, noise, rng)?;
                TaskPlay {
                    mode,
                    played: s,
                    run,
                    observed: None,
                }
            }
        };
        self.tasks += 1;
        Ok(play)
    }
}
