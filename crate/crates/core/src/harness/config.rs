use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::base::BaseKind;
use crate::envgen::EnvConfig;
use crate::error::{Error, Result};
use crate::meta::gbass::GbassSchedule;
use crate::meta::schedule::PmMode;

/// Exploration schedule of BOG in a config file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BogScheduleKind {
    #[default]
    Anytime,
    KnownHorizon,
}

fn default_c_b() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AlgorithmSpec {
    Bog {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        #[serde(default)]
        schedule: BogScheduleKind,
        /// Segment length; the task length when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tau_prime: Option<usize>,
        #[serde(default)]
        base: BaseKind,
    },
    /// BOG with segments equal to tasks and a constant exploration
    /// probability, picked on pilot runs when absent.
    Ogo {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gamma: Option<f64>,
        #[serde(default)]
        base: BaseKind,
    },
    Gbass {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        #[serde(default)]
        schedule: GbassSchedule,
        #[serde(default = "default_c_b")]
        c_b: f64,
        #[serde(default)]
        base: BaseKind,
    },
    Ebass {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        p: Option<f64>,
        #[serde(default)]
        base: BaseKind,
    },
    Ewapm {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        #[serde(default)]
        mode: PmMode,
        #[serde(default = "default_c_b")]
        c_b: f64,
        #[serde(default)]
        base: BaseKind,
    },
    /// The base policy on all arms, restarted every task.
    Moss {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
    },
    /// MOSS restricted to the hidden optimal pool.
    OptMoss {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
    },
}

impl AlgorithmSpec {
    /// Name used in output files.
    pub fn label(&self) -> String {
        let (custom, default) = match self {
            Self::Bog { label, .. } => (label, "BOG"),
            Self::Ogo { label, .. } => (label, "OGo"),
            Self::Gbass { label, .. } => (label, "G-BASS"),
            Self::Ebass { label, .. } => (label, "E-BASS"),
            Self::Ewapm { label, .. } => (label, "EWA-PM"),
            Self::Moss { label } => (label, "MOSS"),
            Self::OptMoss { label } => (label, "Opt-MOSS"),
        };
        custom.clone().unwrap_or_else(|| default.to_string())
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(format!("{}: {msg}", self.label())));
        match *self {
            Self::Bog { tau_prime: Some(0), .. } => bad("tau_prime must be at least 1".into()),
            Self::Ogo { gamma: Some(g), .. } if !(0.0..=1.0).contains(&g) => bad(format!("gamma={g} outside [0,1]")),
            Self::Gbass { c_b, .. } | Self::Ewapm { c_b, .. } if !(c_b > 0.0 && c_b.is_finite()) => {
                bad(format!("c_b={c_b} must be positive"))
            }
            Self::Gbass {
                schedule: GbassSchedule::Fixed { p },
                ..
            } if !(0.0..=1.0).contains(&p) => bad(format!("p={p} outside [0,1]")),
            Self::Ebass { p: Some(p), .. } if !(0.0..=1.0).contains(&p) => bad(format!("p={p} outside [0,1]")),
            _ => Ok(()),
        }
    }
}

fn default_seeds() -> Vec<u64> {
    (0..5).collect()
}

fn default_checkpoint() -> usize {
    1
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub env: EnvConfig,
    pub algorithms: Vec<AlgorithmSpec>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default = "default_checkpoint")]
    pub checkpoint_every: usize,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Worker threads; all cores when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn new(env: EnvConfig, algorithms: Vec<AlgorithmSpec>) -> Self {
        Self {
            env,
            algorithms,
            seeds: default_seeds(),
            checkpoint_every: 1,
            output_dir: default_output_dir(),
            threads: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        self.env.validate()?;
        if self.algorithms.is_empty() {
            return Err(Error::Config("at least one algorithm is required".into()));
        }
        if self.seeds.is_empty() {
            return Err(Error::Config("at least one seed is required".into()));
        }
        if self.checkpoint_every == 0 {
            return Err(Error::Config("checkpoint_every must be at least 1".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        let mut labels = HashSet::new();
        for a in &self.algorithms {
            a.validate()?;
            if !labels.insert(a.label()) {
                return Err(Error::Config(format!("duplicate algorithm label {:?}", a.label())));
            }
        }
        let mut seeds = HashSet::new();
        if let Some(s) = self.seeds.iter().find(|s| !seeds.insert(**s)) {
            return Err(Error::Config(format!("duplicate seed {s}")));
        }
        Ok(())
    }
}

/// Parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepParam {
    N,
    #[serde(rename = "tau")]
    Tau,
    K,
    M,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            Self::N => "N",
            Self::Tau => "tau",
            Self::K => "K",
            Self::M => "M",
        }
    }

    pub fn apply(self, env: &mut EnvConfig, value: usize) {
        match self {
            Self::N => env.n = value,
            Self::Tau => env.tau = value,
            Self::K => env.k = value,
            Self::M => env.m = value,
        }
    }
}

impl std::str::FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "N" => Ok(Self::N),
            "tau" => Ok(Self::Tau),
            "K" => Ok(Self::K),
            "M" => Ok(Self::M),
            _ => Err(Error::Config(format!("unknown sweep parameter {s:?}; use N, tau, K or M"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub values: Vec<usize>,
    pub base: RunConfig,
}

impl SweepSpec {
    /// One config per value, each validated.
    pub fn configs(&self) -> Result<Vec<RunConfig>> {
        if self.values.is_empty() {
            return Err(Error::Config("sweep needs at least one value".into()));
        }
        self.values
            .iter()
            .map(|&v| {
                let mut cfg = self.base.clone();
                self.param.apply(&mut cfg.env, v);
                // a resolved delta belongs to the base shape, not the swept one
                if self.base.env.delta.is_none() {
                    cfg.env.delta = None;
                }
                cfg.validate().map_err(|e| Error::Config(format!("{}={v}: {e}", self.param.name())))?;
                Ok(cfg)
            })
            .collect()
    }
}
