//! Mean-reward vectors, observation noise and the max-reward set function.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::subset::Subset;

/// Mean reward of every arm in one task, each in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct RewardVector(Vec<f64>);

impl RewardVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(invalid("reward vector needs at least one arm"));
        }
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=1.0).contains(*v))
        {
            return Err(invalid(format!("mean reward of arm {} is {v}, not in [0,1]", i + 1)));
        }
        Ok(Self(values))
    }

    pub fn k(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, arm: usize) -> f64 {
        self.0[arm]
    }

    /// Largest mean reward.
    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Lowest-index arm attaining the maximum.
    pub fn argmax(&self) -> usize {
        let best = self.max();
        self.0.iter().position(|&v| v == best).unwrap_or(0)
    }

    /// All arms attaining the maximum.
    pub fn optimal_set(&self) -> Subset {
        let best = self.max();
        Subset::from_arms(
            self.0
                .iter()
                .enumerate()
                .filter(|(_, &v)| v == best)
                .map(|(a, _)| a),
        )
    }
}

impl<'de> Deserialize<'de> for RewardVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        RewardVector::new(Vec::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

/// Observation noise added to the mean reward of the pulled arm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseModel {
    None,
    /// `r(a) + u` with `u ~ Uniform(-1/2, 1/2)`.
    #[default]
    Uniform,
    /// `Bernoulli(r(a))`. Leaves the `[-1/2, 1/2]` noise band unless
    /// `r(a)` is 0, 1/2 or 1.
    Bernoulli,
}

pub fn sample_reward<R: Rng + ?Sized>(
    r: &RewardVector,
    arm: usize,
    noise: NoiseModel,
    rng: &mut R,
) -> Result<f64> {
    if arm >= r.k() {
        return Err(invalid(format!("arm {} outside 1..={}", arm + 1, r.k())));
    }
    Ok(draw(r.get(arm), noise, rng))
}

#[inline]
pub(crate) fn draw<R: Rng + ?Sized>(mean: f64, noise: NoiseModel, rng: &mut R) -> f64 {
    match noise {
        NoiseModel::None => mean,
        NoiseModel::Uniform => mean + rng.gen::<f64>() - 0.5,
        NoiseModel::Bernoulli => {
            if rng.gen::<f64>() < mean {
                1.0
            } else {
                0.0
            }
        }
    }
}

/// `max_{a in S} r(a)`.
pub fn f_max(r: &RewardVector, s: &Subset) -> Result<f64> {
    if s.is_empty() {
        return Err(invalid("f_max of an empty subset"));
    }
    s.validate(r.k())?;
    Ok(f_max_unchecked(r, s.arms()))
}

#[inline]
pub(crate) fn f_max_unchecked(r: &RewardVector, arms: &[usize]) -> f64 {
    arms.iter()
        .map(|&a| r.get(a))
        .fold(f64::NEG_INFINITY, f64::max)
}

pub const SUBMODULAR_CHECK_MAX_K: usize = 12;

/// Exhaustively checks that `S -> f_max(r, S)` is monotone and has
/// diminishing returns over all nonempty `S1 ⊆ S2` and arms `a`.
pub fn check_submodular_monotone(r: &RewardVector) -> Result<bool> {
    let k = r.k();
    if k > SUBMODULAR_CHECK_MAX_K {
        return Err(Error::ResourceLimit {
            what: "K for exhaustive submodularity check".into(),
            value: k as u128,
            limit: SUBMODULAR_CHECK_MAX_K as u128,
        });
    }
    let full = 1usize << k;
    // f over bitmasks; index 0 (empty set) unused
    let mut f = vec![f64::NEG_INFINITY; full];
    for mask in 1..full {
        let low = mask.trailing_zeros() as usize;
        f[mask] = f[mask & (mask - 1)].max(r.get(low));
    }
    for s2 in 1..full {
        // nonempty submasks of s2
        let mut s1 = s2;
        while s1 > 0 {
            if f[s1] > f[s2] {
                return Ok(false);
            }
            for a in 0..k {
                let bit = 1 << a;
                let gain_big = f[s2 | bit] - f[s2];
                let gain_small = f[s1 | bit] - f[s1];
                if gain_big > gain_small {
                    return Ok(false);
                }
            }
            s1 = (s1 - 1) & s2;
        }
    }
    Ok(true)
}
