//! Bandit subset selection: meta-learners that pick a small set of arms for
//! each task in a sequence of multi-armed bandit tasks, the explore/exploit
//! game that tunes them, task generators and an experiment harness.
//!
//! Arms are 0-based internally and printed 1-based.

pub mod base;
pub mod envgen;
pub mod error;
pub mod experts;
pub mod game;
pub mod harness;
pub mod meta;
pub mod par;
pub mod reward;
pub mod rng;
pub mod subset;
pub mod task;
pub mod verify;

pub use error::{Error, Result};
pub use reward::{NoiseModel, RewardVector};
pub use subset::Subset;
pub use task::{Task, TaskSequence};
