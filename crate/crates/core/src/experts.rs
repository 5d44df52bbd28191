//! Exponential-weights (randomized weighted majority) expert over `K` actions.
//!
//! Payoffs are rewards: the sampling distribution is `∝ exp(η · cumulative
//! payoff)`. In anytime mode `η_t = √(ln K / t)` after `t` updates.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::base::sample_index;
use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LearningRate {
    Fixed(f64),
    Anytime,
}

#[derive(Debug, Clone)]
pub struct ExpertState {
    cumulative: Vec<f64>,
    rate: LearningRate,
    rounds: usize,
}

impl ExpertState {
    pub fn new(k: usize, rate: LearningRate) -> Result<Self> {
        if k == 0 {
            return Err(invalid("expert needs at least one action"));
        }
        if let LearningRate::Fixed(eta) = rate {
            if !(eta >= 0.0 && eta.is_finite()) {
                return Err(invalid(format!("learning rate {eta} must be finite and >= 0")));
            }
        }
        Ok(Self {
            cumulative: vec![0.0; k],
            rate,
            rounds: 0,
        })
    }

    /// Fixed rate `√(ln K / horizon)` tuned for a known number of rounds.
    pub fn tuned(k: usize, horizon: usize) -> Result<Self> {
        let eta = ((k as f64).ln() / horizon.max(1) as f64).sqrt();
        Self::new(k, LearningRate::Fixed(eta))
    }

    pub fn num_actions(&self) -> usize {
        self.cumulative.len()
    }

    pub fn rounds_seen(&self) -> usize {
        self.rounds
    }

    pub fn cumulative_payoffs(&self) -> &[f64] {
        &self.cumulative
    }

    pub fn eta(&self) -> f64 {
        match self.rate {
            LearningRate::Fixed(eta) => eta,
            LearningRate::Anytime if self.rounds == 0 => 0.0,
            LearningRate::Anytime => ((self.num_actions() as f64).ln() / self.rounds as f64).sqrt(),
        }
    }

    pub fn probabilities(&self) -> Vec<f64> {
        let eta = self.eta();
        let max = self.cumulative.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut w: Vec<f64> = self
            .cumulative
            .iter()
            .map(|&c| (eta * (c - max)).exp())
            .collect();
        let total: f64 = w.iter().sum();
        for x in &mut w {
            *x /= total;
        }
        w
    }

    /// Samples an action from the current distribution.
    pub fn advise<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        if self.num_actions() == 1 {
            return 0;
        }
        sample_index(&self.probabilities(), rng)
    }

    pub fn update(&mut self, payoff: &[f64]) -> Result<()> {
        if payoff.len() != self.num_actions() {
            return Err(invalid(format!(
                "payoff has {} entries, expected {}",
                payoff.len(),
                self.num_actions()
            )));
        }
        if let Some(x) = payoff.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(invalid(format!("payoff entry {x} outside [0,1]")));
        }
        for (c, x) in self.cumulative.iter_mut().zip(payoff) {
            *c += x;
        }
        self.rounds += 1;
        Ok(())
    }

    /// All-zero payoff vector.
    pub fn update_zero(&mut self) {
        self.rounds += 1;
    }

    /// Update that is zero everywhere except `value` at `action`.
    pub fn update_sparse(&mut self, action: usize, value: f64) -> Result<()> {
        if action >= self.num_actions() {
            return Err(invalid(format!("action {} outside 1..={}", action + 1, self.num_actions())));
        }
        if !(0.0..=1.0).contains(&value) {
            return Err(invalid(format!("payoff entry {value} outside [0,1]")));
        }
        self.cumulative[action] += value;
        self.rounds += 1;
        Ok(())
    }
}

/// `max_a Σ_n x^n_a − Σ_n x^n_{chosen_n}`.
pub fn expert_regret(payoffs: &[Vec<f64>], actions: &[usize]) -> Result<f64> {
    if payoffs.len() != actions.len() {
        return Err(invalid("payoff and action histories differ in length"));
    }
    let Some(k) = payoffs.first().map(Vec::len) else {
        return Ok(0.0);
    };
    let mut totals = vec![0.0; k];
    let mut got = 0.0;
    for (x, &a) in payoffs.iter().zip(actions) {
        if x.len() != k || a >= k {
            return Err(invalid("ragged payoff history or action out of range"));
        }
        for (t, v) in totals.iter_mut().zip(x) {
            *t += v;
        }
        got += x[a];
    }
    Ok(totals.iter().copied().fold(f64::NEG_INFINITY, f64::max) - got)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn frequencies(e: &ExpertState, draws: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut f = vec![0.0; e.num_actions()];
        for _ in 0..draws {
            f[e.advise(&mut rng)] += 1.0;
        }
        f.iter().map(|c| c / draws as f64).collect()
    }

    #[test]
    fn fresh_state_is_uniform() {
        let e = ExpertState::new(4, LearningRate::Anytime).unwrap();
        assert!(e.probabilities().iter().all(|&p| (p - 0.25).abs() < 1e-15));
        for f in frequencies(&e, 10_000, 1) {
            assert!((f - 0.25).abs() < 0.02);
        }
    }

    #[test]
    fn weights_two_to_one() {
        let mut e = ExpertState::new(2, LearningRate::Fixed(2f64.ln())).unwrap();
        e.update(&[1.0, 0.0]).unwrap();
        let p = e.probabilities();
        assert!((p[0] - 2.0 / 3.0).abs() < 1e-12);
        let f = frequencies(&e, 10_000, 2);
        assert!((f[0] - 2.0 / 3.0).abs() < 0.02);
        assert!((f[1] - 1.0 / 3.0).abs() < 0.02);
    }

    #[test]
    fn single_action() {
        let e = ExpertState::new(1, LearningRate::Anytime).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!((0..100).all(|_| e.advise(&mut rng) == 0));
    }

    #[test]
    fn zero_payoff_leaves_fixed_rate_distribution() {
        let mut e = ExpertState::new(3, LearningRate::Fixed(0.7)).unwrap();
        e.update(&[0.2, 0.9, 0.0]).unwrap();
        let before = e.probabilities();
        e.update(&[0.0; 3]).unwrap();
        assert_eq!(before, e.probabilities());
    }

    #[test]
    fn concentrates_on_repeated_payoff() {
        let mut e = ExpertState::new(5, LearningRate::Anytime).unwrap();
        for _ in 0..1000 {
            e.update(&[1.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        }
        assert!(e.probabilities()[0] >= 0.99);
    }

    #[test]
    fn updates_are_additive_in_fixed_mode() {
        let mut a = ExpertState::new(2, LearningRate::Fixed(0.4)).unwrap();
        a.update(&[0.3, 0.1]).unwrap();
        a.update(&[0.2, 0.6]).unwrap();
        let mut b = ExpertState::new(2, LearningRate::Fixed(0.4)).unwrap();
        b.cumulative = vec![0.5, 0.7];
        let (pa, pb) = (a.probabilities(), b.probabilities());
        assert!((pa[0] - pb[0]).abs() < 1e-15);
    }

    #[test]
    fn rejects_out_of_range_payoffs() {
        let mut e = ExpertState::new(2, LearningRate::Anytime).unwrap();
        assert!(e.update(&[1.5, 0.0]).is_err());
        assert!(e.update(&[0.5]).is_err());
        assert!(e.update_sparse(2, 0.5).is_err());
        assert!(e.update_sparse(0, -0.1).is_err());
    }

    #[test]
    fn regret_examples() {
        let x = vec![vec![1.0, 0.0]];
        assert_eq!(expert_regret(&x, &[1]).unwrap(), 1.0);
        let x = vec![vec![0.2, 0.9], vec![0.4, 0.5]];
        assert_eq!(expert_regret(&x, &[1, 1]).unwrap(), 0.0);
        assert!(expert_regret(&x, &[1]).is_err());
    }
}
