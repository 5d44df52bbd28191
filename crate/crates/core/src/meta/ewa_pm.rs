//! Exponentially weighted forecaster for the partial-monitoring version of
//! the subset game: meta-actions are `M`-subsets, exploring reveals the
//! task's optimal set at price `C_info`, exploiting pays `C_hit` or `C_miss`
//! without feedback.

use rand::Rng;

use crate::base::{sample_index, BaseKind};
use crate::error::{invalid, Result};
use crate::game::CostTriple;
use crate::reward::NoiseModel;
use crate::subset::{all_m_subsets, Subset};
use crate::task::Task;

use super::ebass::MAX_HYPOTHESES;
use super::schedule::{ewa_pm_tuning, PmMode};
use super::{explore_task, exploit_task, BaiParams, Mode, TaskPlay};

#[derive(Debug, Clone, PartialEq)]
pub struct PmRound {
    pub mode: Mode,
    /// Index of the exploited subset.
    pub chosen: Option<usize>,
    pub cost: f64,
}

#[derive(Debug, Clone)]
pub struct EwaPm {
    hypotheses: Vec<Subset>,
    estimated: Vec<f64>,
    costs: CostTriple,
    p: f64,
    eta: f64,
    k: usize,
    base: BaseKind,
    bai: Option<BaiParams>,
    discovered: Subset,
}

impl EwaPm {
    pub fn new(k: usize, m: usize, costs: CostTriple, p: f64, eta: f64) -> Result<Self> {
        if k == 0 || m == 0 || m > k {
            return Err(invalid(format!("need 1 <= M={m} <= K={k}")));
        }
        costs.validate(0)?;
        if !(p > 0.0 && p <= 1.0) {
            return Err(invalid(format!("p={p} outside (0,1]")));
        }
        if !(eta >= 0.0 && eta.is_finite()) {
            return Err(invalid(format!("eta={eta} must be finite and >= 0")));
        }
        let hypotheses = all_m_subsets(k, m, MAX_HYPOTHESES)?;
        Ok(Self {
            estimated: vec![0.0; hypotheses.len()],
            hypotheses,
            costs,
            p,
            eta,
            k,
            base: BaseKind::Moss,
            bai: None,
            discovered: Subset::empty(),
        })
    }

    /// Uses the closed-form `(p, η)` of `mode` for `n_tasks` rounds.
    pub fn tuned(k: usize, m: usize, costs: CostTriple, mode: PmMode, n_tasks: usize) -> Result<Self> {
        let z = crate::subset::binomial(k, m);
        if z > MAX_HYPOTHESES {
            return Err(crate::Error::ResourceLimit {
                what: format!("C(K={k}, M={m})"),
                value: z,
                limit: MAX_HYPOTHESES,
            });
        }
        let (p, eta) = ewa_pm_tuning(mode, costs.c_info, costs.c_miss, n_tasks, z as f64);
        Self::new(k, m, costs, p, eta)
    }

    /// Sets what runs inside real tasks: identification on exploration and
    /// `base` on the chosen subset otherwise.
    pub fn with_bandit(mut self, base: BaseKind, bai: BaiParams) -> Self {
        self.base = base;
        self.bai = Some(bai);
        self
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn hypotheses(&self) -> &[Subset] {
        &self.hypotheses
    }

    pub fn estimated_costs(&self) -> &[f64] {
        &self.estimated
    }

    pub fn discovered(&self) -> &Subset {
        &self.discovered
    }

    /// `Q ∝ exp(−η Σ Ĉ)`.
    pub fn probabilities(&self) -> Vec<f64> {
        let min = self.estimated.iter().copied().fold(f64::INFINITY, f64::min);
        let mut w: Vec<f64> = self.estimated.iter().map(|&c| (-self.eta * (c - min)).exp()).collect();
        let total: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= total);
        w
    }

    /// Charges the importance-weighted excess cost `(C_{i,S*} − C_hit)/p` to
    /// every subset missing `optimal`.
    pub fn observe(&mut self, optimal: &Subset) {
        let excess = (self.costs.c_miss - self.costs.hit(0)) / self.p;
        for (h, c) in self.hypotheses.iter().zip(&mut self.estimated) {
            if !h.intersects(optimal) {
                *c += excess;
            }
        }
        self.discovered = self.discovered.union(optimal);
    }

    pub fn decide<R: Rng + ?Sized>(&self, rng: &mut R) -> Mode {
        if rng.gen::<f64>() < self.p {
            Mode::Explore
        } else {
            Mode::Exploit
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        sample_index(&self.probabilities(), rng)
    }

    /// One round of the abstract game against a hidden optimal set.
    pub fn round<R: Rng + ?Sized>(&mut self, optimal: &Subset, rng: &mut R) -> PmRound {
        match self.decide(rng) {
            Mode::Explore => {
                self.observe(optimal);
                PmRound {
                    mode: Mode::Explore,
                    chosen: None,
                    cost: self.costs.c_info,
                }
            }
            Mode::Exploit => {
                let i = self.sample(rng);
                let cost = if self.hypotheses[i].intersects(optimal) {
                    self.costs.hit(0)
                } else {
                    self.costs.c_miss
                };
                PmRound {
                    mode: Mode::Exploit,
                    chosen: Some(i),
                    cost,
                }
            }
        }
    }

    pub fn play_task<R: Rng + ?Sized>(&mut self, task: &Task, noise: NoiseModel, rng: &mut R) -> Result<TaskPlay> {
        if task.k() != self.k {
            return Err(invalid(format!("task has K={} but learner expects K={}", task.k(), self.k)));
        }
        let bai = self
            .bai
            .ok_or_else(|| invalid("bandit parameters not set; call with_bandit first"))?;
        match self.decide(rng) {
            Mode::Explore => {
                let (run, surviving) = explore_task(task, bai, self.base, noise, rng)?;
                self.observe(&surviving);
                Ok(TaskPlay {
                    mode: Mode::Explore,
                    played: Subset::full(self.k),
                    run,
                    observed: Some(surviving),
                })
            }
            Mode::Exploit => {
                let s = self.hypotheses[self.sample(rng)].clone();
                let run = exploit_task(task, &s, self.base, noise, rng)?;
                Ok(TaskPlay {
                    mode: Mode::Exploit,
                    played: s,
                    run,
                    observed: None,
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn miss_estimate_example() {
        let mut e = EwaPm::new(3, 1, CostTriple::constant(50.0, 10.0, 100.0), 0.5, 1.0).unwrap();
        e.observe(&Subset::singleton(2));
        assert_eq!(e.estimated_costs(), &[180.0, 180.0, 0.0]);
    }

    #[test]
    fn realizable_consistent_subsets_stay_uniform() {
        let costs = CostTriple::constant(31.62, 10.0, 100.0);
        let mut e = EwaPm::tuned(6, 2, costs, PmMode::Realizable, 1000).unwrap();
        let pool = [Subset::singleton(1), Subset::singleton(4)];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let target = Subset::from_arms([1, 4]);
        let mut last_bad = 1.0;
        for n in 0..1000 {
            e.round(&pool[n % 2], &mut rng);
            let q = e.probabilities();
            let ti = e.hypotheses().iter().position(|h| *h == target).unwrap();
            assert_eq!(e.estimated_costs()[ti], 0.0);
            let bad: f64 = e
                .hypotheses()
                .iter()
                .zip(&q)
                .filter(|(h, _)| **h != target)
                .map(|(_, p)| p)
                .sum();
            assert!(bad <= last_bad + 1e-12);
            last_bad = bad;
            let consistent: Vec<f64> = e
                .hypotheses()
                .iter()
                .zip(&q)
                .zip(e.estimated_costs())
                .filter(|(_, &c)| c == 0.0)
                .map(|((_, &p), _)| p)
                .collect();
            assert!(consistent.windows(2).all(|w| (w[0] - w[1]).abs() < 1e-15));
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let c = CostTriple::constant(31.62, 10.0, 100.0);
        assert!(EwaPm::new(3, 1, c.clone(), 0.0, 1.0).is_err());
        assert!(EwaPm::new(3, 4, c.clone(), 0.5, 1.0).is_err());
        assert!(EwaPm::new(3, 1, CostTriple::constant(200.0, 10.0, 100.0), 0.5, 1.0).is_err());
    }
}
