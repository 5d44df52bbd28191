//! Online greedy submodular maximisation with exact oracles: the full
//! information variant and the explore/exploit (opaque feedback) variant.
//!
//! Expert `j` learns the `j`-th pick of the offline greedy procedure. Both
//! variants work on any monotone submodular `g` with values in `[0, 1]`;
//! `g(∅)` is taken to be 0.

use rand::Rng;

use crate::error::{invalid, Result};
use crate::experts::{ExpertState, LearningRate};
use crate::reward::{f_max_unchecked, RewardVector};
use crate::subset::Subset;
use crate::task::{best_m_subset, Task, TaskSequence};

use super::Mode;

/// A stack of `M̃` experts over `K` actions.
#[derive(Debug, Clone)]
pub struct ExpertStack {
    experts: Vec<ExpertState>,
    k: usize,
}

impl ExpertStack {
    pub fn new(m_tilde: usize, k: usize, rate: LearningRate) -> Result<Self> {
        if m_tilde == 0 {
            return Err(invalid("need at least one expert"));
        }
        let experts = (0..m_tilde)
            .map(|_| ExpertState::new(k, rate))
            .collect::<Result<_>>()?;
        Ok(Self { experts, k })
    }

    pub fn len(&self) -> usize {
        self.experts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.experts.is_empty()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn experts(&self) -> &[ExpertState] {
        &self.experts
    }

    pub fn expert_mut(&mut self, i: usize) -> &mut ExpertState {
        &mut self.experts[i]
    }

    /// One sampled action per expert, in expert order.
    pub fn advise<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<usize> {
        self.experts.iter().map(|e| e.advise(rng)).collect()
    }

    /// Each expert's most likely action (lowest arm on ties).
    pub fn modes(&self) -> Vec<usize> {
        self.experts
            .iter()
            .map(|e| {
                let p = e.probabilities();
                let best = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                p.iter().position(|&x| x == best).unwrap_or(0)
            })
            .collect()
    }

    pub fn zero_all(&mut self) {
        self.experts.iter_mut().for_each(ExpertState::update_zero);
    }

    /// Gives expert `i` payoff `value` at `action` and every other expert the
    /// zero vector.
    pub fn reward_one(&mut self, i: usize, action: usize, value: f64) -> Result<()> {
        for (j, e) in self.experts.iter_mut().enumerate() {
            if j == i {
                e.update_sparse(action, value)?;
            } else {
                e.update_zero();
            }
        }
        Ok(())
    }
}

/// Max-reward oracle `S ↦ max_{a∈S} r(a)` with `g(∅) = 0`.
pub fn max_reward_oracle(r: &RewardVector) -> impl Fn(&[usize]) -> f64 + '_ {
    move |arms: &[usize]| {
        if arms.is_empty() {
            0.0
        } else {
            f_max_unchecked(r, arms)
        }
    }
}

/// One full-information round. Returns the ordered expert picks; every expert
/// `j` receives `x_{j,a} = g(S_{j−1} ∪ {a}) − g(S_{j−1})`.
pub fn og_round<G, R>(stack: &mut ExpertStack, g: G, rng: &mut R) -> Result<Vec<usize>>
where
    G: Fn(&[usize]) -> f64,
    R: Rng + ?Sized,
{
    let picks = stack.advise(rng);
    let k = stack.k;
    let mut prefix: Vec<usize> = Vec::with_capacity(picks.len() + 1);
    let mut payoff = vec![0.0; k];
    for (j, &pick) in picks.iter().enumerate() {
        let base = g(&prefix);
        for (a, x) in payoff.iter_mut().enumerate() {
            prefix.push(a);
            *x = g(&prefix) - base;
            prefix.pop();
        }
        stack.experts[j].update(&payoff)?;
        prefix.push(pick);
    }
    Ok(picks)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OgoStep {
    pub mode: Mode,
    /// Expert picks `a_1..a_M̃`.
    pub picks: Vec<usize>,
    /// On exploration: `(i, a'_i, g(S_{n:i}))` with `i` 0-based.
    pub feedback: Option<(usize, usize, f64)>,
}

impl OgoStep {
    /// The set actually played: all picks, or `{a_1..a_{i−1}, a'_i}`.
    pub fn played(&self) -> Subset {
        match self.feedback {
            None => Subset::from_arms(self.picks.iter().copied()),
            Some((i, a, _)) => Subset::from_arms(self.picks[..i].iter().copied().chain([a])),
        }
    }
}

/// One opaque-feedback round: with probability `gamma` a uniformly chosen
/// expert `i` has its pick replaced by a uniform arm `a'`, and only that
/// expert is paid `g(S_{n:i})` at `a'`; otherwise every expert gets zeros.
pub fn ogo_round<G, R>(stack: &mut ExpertStack, gamma: f64, g: G, rng: &mut R) -> Result<OgoStep>
where
    G: Fn(&[usize]) -> f64,
    R: Rng + ?Sized,
{
    let picks = stack.advise(rng);
    if gamma <= 0.0 || rng.gen::<f64>() >= gamma {
        stack.zero_all();
        return Ok(OgoStep {
            mode: Mode::Exploit,
            picks,
            feedback: None,
        });
    }
    let i = rng.gen_range(0..stack.len());
    let a = rng.gen_range(0..stack.k);
    let mut played: Vec<usize> = picks[..i].to_vec();
    played.push(a);
    let value = g(&played);
    stack.reward_one(i, a, value)?;
    Ok(OgoStep {
        mode: Mode::Explore,
        picks,
        feedback: Some((i, a, value)),
    })
}

/// `(1 − 1/N') · max_{|S|=M} Σ_n g_n(S) − Σ_n g_n(S_n)` for max-reward
/// functions `g_n = f_max(r_n, ·)`, with the maximum found exhaustively.
pub fn coverage_regret(rewards: &[RewardVector], played: &[Subset], m: usize) -> Result<f64> {
    if rewards.len() != played.len() {
        return Err(invalid("reward and played histories differ in length"));
    }
    if rewards.is_empty() {
        return Ok(0.0);
    }
    let seq = TaskSequence::new(
        rewards
            .iter()
            .map(|r| Task::new(r.clone(), 1))
            .collect::<Result<_>>()?,
    )?;
    let (_, best) = best_m_subset(&seq, m)?;
    let got: f64 = rewards
        .iter()
        .zip(played)
        .map(|(r, s)| max_reward_oracle(r)(s.arms()))
        .sum();
    let n = rewards.len() as f64;
    Ok((1.0 - 1.0 / n) * best - got)
}
