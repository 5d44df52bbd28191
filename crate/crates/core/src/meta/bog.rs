//! Bandit online greedy: the explore/exploit expert stack driving a base
//! bandit policy on the chosen subset for each segment.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::base::{run_base_segment, BaseKind, BasePolicy, BaseRun};
use crate::error::{invalid, Result};
use crate::experts::LearningRate;
use crate::reward::{NoiseModel, RewardVector};
use crate::subset::Subset;

use super::og::ExpertStack;
use super::schedule::{clamp_probability, gamma_anytime, gamma_known, m_tilde};
use super::Mode;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BogSchedule {
    /// `γ = ((M̃ K ln K)/N')^{1/3}` with experts at fixed rate `√(ln K / N')`.
    KnownHorizon { n_prime: usize },
    /// `γ_n = ((M̃ K ln K)/n)^{1/3}` with anytime experts.
    Anytime,
    /// Constant exploration probability (not clamped, so 0 is allowed).
    Fixed { gamma: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BogConfig {
    pub k: usize,
    pub m: usize,
    pub schedule: BogSchedule,
    pub base: BaseKind,
    /// Number of segments used to size `M̃ = ⌈M ln N'⌉`.
    pub n_prime: usize,
    /// Overrides `M̃` when set.
    pub m_tilde: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentOutcome {
    pub mode: Mode,
    pub played: Subset,
    pub run: BaseRun,
    /// On exploration: `(expert i, arm a', payoff)` with 0-based indices.
    pub feedback: Option<(usize, usize, f64)>,
}

#[derive(Debug, Clone)]
pub struct Bog {
    stack: ExpertStack,
    schedule: BogSchedule,
    base: BaseKind,
    k: usize,
    segments: usize,
    last_picks: Vec<usize>,
}

impl Bog {
    pub fn new(cfg: &BogConfig) -> Result<Self> {
        if cfg.k == 0 || cfg.m == 0 || cfg.m > cfg.k {
            return Err(invalid(format!("need 1 <= M={} <= K={}", cfg.m, cfg.k)));
        }
        let m_tilde = cfg.m_tilde.unwrap_or_else(|| m_tilde(cfg.m, cfg.n_prime));
        if m_tilde == 0 {
            return Err(invalid("M̃ must be at least 1"));
        }
        let rate = match cfg.schedule {
            BogSchedule::KnownHorizon { n_prime } => {
                LearningRate::Fixed(((cfg.k as f64).ln() / n_prime.max(1) as f64).sqrt())
            }
            BogSchedule::Fixed { gamma } if !(0.0..=1.0).contains(&gamma) => {
                return Err(invalid(format!("fixed gamma {gamma} outside [0,1]")))
            }
            _ => LearningRate::Anytime,
        };
        Ok(Self {
            stack: ExpertStack::new(m_tilde, cfg.k, rate)?,
            schedule: cfg.schedule,
            base: cfg.base,
            k: cfg.k,
            segments: 0,
            last_picks: Vec::new(),
        })
    }

    pub fn m_tilde(&self) -> usize {
        self.stack.len()
    }

    pub fn experts(&self) -> &ExpertStack {
        &self.stack
    }

    pub fn segments_played(&self) -> usize {
        self.segments
    }

    /// Exploration probability for the next segment (1-based index `n`).
    pub fn gamma(&self) -> f64 {
        let n = self.segments + 1;
        match self.schedule {
            BogSchedule::KnownHorizon { n_prime } => gamma_known(self.m_tilde(), self.k, n_prime),
            BogSchedule::Anytime => gamma_anytime(self.m_tilde(), self.k, n),
            BogSchedule::Fixed { gamma } => gamma,
        }
    }

    /// Arms picked by the experts in the last segment.
    pub fn last_picks(&self) -> Subset {
        Subset::from_arms(self.last_picks.iter().copied())
    }

    /// Each expert's most likely arm, as a set.
    pub fn greedy_set(&self) -> Subset {
        Subset::from_arms(self.stack.modes())
    }

    /// Draws the expert picks and the explore/exploit coin for the next
    /// segment. The caller runs a base policy on `plan.played` and reports
    /// back through [`Bog::finish_segment`].
    pub fn begin_segment<R: Rng + ?Sized>(&mut self, rng: &mut R) -> SegmentPlan {
        let gamma = self.gamma();
        let picks = self.stack.advise(rng);
        self.segments += 1;
        let explore = gamma > 0.0 && rng.gen::<f64>() < gamma;
        let plan = if explore {
            let i = rng.gen_range(0..self.stack.len());
            let a = rng.gen_range(0..self.k);
            SegmentPlan {
                mode: Mode::Explore,
                played: Subset::from_arms(picks[..i].iter().copied().chain([a])),
                slot: Some((i, a)),
            }
        } else {
            SegmentPlan {
                mode: Mode::Exploit,
                played: Subset::from_arms(picks.iter().copied()),
                slot: None,
            }
        };
        self.last_picks = picks;
        plan
    }

    /// Feeds the segment's average realized reward, clipped to `[0, 1]`, to
    /// the explored expert; all other experts (every expert, after an
    /// exploitation segment) get the zero vector. Returns the payoff given.
    pub fn finish_segment(&mut self, plan: &SegmentPlan, average_reward: f64) -> Result<Option<(usize, usize, f64)>> {
        match plan.slot {
            None => {
                self.stack.zero_all();
                Ok(None)
            }
            Some((i, a)) => {
                let payoff = average_reward.clamp(0.0, 1.0);
                self.stack.reward_one(i, a, payoff)?;
                Ok(Some((i, a, payoff)))
            }
        }
    }

    /// Plays one segment made of `pieces` (consecutive task slices; a single
    /// piece in the meta-learning setting) with a freshly started base policy.
    pub fn segment<R: Rng + ?Sized>(
        &mut self,
        pieces: &[(&RewardVector, usize)],
        noise: NoiseModel,
        rng: &mut R,
    ) -> Result<SegmentOutcome> {
        if let Some((r, _)) = pieces.iter().find(|(r, _)| r.k() != self.k) {
            return Err(invalid(format!("segment has K={} but BOG was built for K={}", r.k(), self.k)));
        }
        let len: usize = pieces.iter().map(|p| p.1).sum();
        if len == 0 {
            return Err(invalid("empty segment"));
        }
        let plan = self.begin_segment(rng);
        let mut policy = BasePolicy::new(self.base, &plan.played, len)?;
        let run = run_base_segment(&mut policy, pieces, noise, rng)?;
        let feedback = self.finish_segment(&plan, run.realized_total / len as f64)?;
        Ok(SegmentOutcome {
            mode: plan.mode,
            played: plan.played,
            run,
            feedback,
        })
    }

    pub fn base(&self) -> BaseKind {
        self.base
    }
}

/// Decisions for one segment.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentPlan {
    pub mode: Mode,
    pub played: Subset,
    /// Explored `(expert i, arm a')`, 0-based.
    pub slot: Option<(usize, usize)>,
}

/// Clamped version of a fixed schedule value, for callers that want the
/// global probability floor.
pub fn clamped_fixed(gamma: f64) -> BogSchedule {
    BogSchedule::Fixed {
        gamma: clamp_probability(gamma),
    }
}
