//! Experiment configuration files.
//!
//! A config is one JSON document. Arms come either from an `env` list of
//! environment specs (each with an optional `copies` count) or from an
//! inline `instance` holding explicit kernels; `budget` and `eta` always sit
//! at the top level:
//!
//! ```json
//! {
//!   "env": [{"kind": "lmss", "elevation": 40, "copies": 2}],
//!   "budget": 1,
//!   "eta": [0.2, 0.2],
//!   "episodes": 20,
//!   "algorithm": "fair-ucrl"
//! }
//! ```

use std::fs;
use std::path::Path;

use rmabf_core::env::EnvSpec;
use rmabf_core::harness::SimulationConfig;
use rmabf_core::learner::{Algorithm, LearnerConfig};
use rmabf_core::model::{ArmModel, RewardDist, RmabInstance};
use serde::Deserialize;

use crate::error::CliError;

pub const DEFAULT_TRIALS: usize = 100;
pub const DEFAULT_EPSILON: f64 = 0.1;
pub const DEFAULT_RESOLUTION: f64 = 0.01;
pub const DEFAULT_REPLICAS: [usize; 2] = [1, 10];

#[derive(Debug, Deserialize)]
struct ArmEntry {
    #[serde(flatten)]
    spec: EnvSpec,
    #[serde(default = "one")]
    copies: usize,
}

fn one() -> usize {
    1
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct InlineArm {
    /// Indexed `[action][state][next_state]`.
    transition: Vec<Vec<Vec<f64>>>,
    /// Indexed `[state][action]`.
    reward_mean: Vec<[f64; 2]>,
    #[serde(default = "bernoulli")]
    reward_dist: RewardDist,
}

fn bernoulli() -> RewardDist {
    RewardDist::Bernoulli
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct InlineInstance {
    arms: Vec<InlineArm>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimulationSection {
    epochs: Option<usize>,
    burn_in: Option<usize>,
    trials: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    env: Vec<ArmEntry>,
    instance: Option<InlineInstance>,
    budget: usize,
    eta: Vec<f64>,
    initial_states: Option<Vec<usize>>,
    episodes: Option<usize>,
    horizon: Option<usize>,
    epsilon: Option<f64>,
    algorithm: Option<String>,
    trials: Option<usize>,
    #[serde(default)]
    seed: u64,
    replicas: Option<Vec<usize>>,
    resolution: Option<f64>,
    #[serde(default)]
    simulation: SimulationSection,
}

/// A loaded and validated experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub instance: RmabInstance,
    /// `(K, H)`; absent when the file sets neither.
    pub schedule: Option<(usize, usize)>,
    pub epsilon: f64,
    pub algorithm: Algorithm,
    pub trials: usize,
    pub seed: u64,
    pub replicas: Vec<usize>,
    pub resolution: f64,
    /// Long-run simulation settings for benchmarks and sweeps, seeded with
    /// the master seed.
    pub simulation: SimulationConfig,
}

impl ExperimentConfig {
    pub fn learner_config(&self) -> Result<LearnerConfig, CliError> {
        let (episodes, horizon) = self
            .schedule
            .ok_or_else(|| CliError::Config("learning needs `episodes` or `horizon`".into()))?;
        let mut config = LearnerConfig::new(episodes, horizon, self.seed, self.algorithm);
        config.epsilon = self.epsilon;
        config.validate()?;
        Ok(config)
    }
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })?;
    parse_config(&text).map_err(|e| match e {
        CliError::Parse { message, .. } => CliError::Parse {
            path: path.to_owned(),
            message,
        },
        other => other,
    })
}

/// Parses and validates a config document; parse errors carry the field
/// path and source position.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let raw: RawConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        let inner = e.into_inner();
        let message = if field == "." {
            inner.to_string()
        } else {
            format!("field `{field}`: {inner}")
        };
        CliError::Parse {
            path: "<config>".into(),
            message,
        }
    })?;
    build(raw)
}

fn build(raw: RawConfig) -> Result<ExperimentConfig, CliError> {
    let arms = match (&raw.instance, raw.env.is_empty()) {
        (Some(_), false) => return Err(CliError::Config("give either `env` or `instance`, not both".into())),
        (None, true) => return Err(CliError::Config("no arms: `env` and `instance` are both missing".into())),
        (Some(inline), true) => inline
            .arms
            .iter()
            .map(|a| ArmModel::new(a.transition.clone(), a.reward_mean.clone(), a.reward_dist))
            .collect::<Result<Vec<_>, _>>()?,
        (None, false) => {
            let mut arms = Vec::new();
            for entry in &raw.env {
                let arm = entry.spec.build()?;
                arms.extend(std::iter::repeat_n(arm, entry.copies));
            }
            arms
        }
    };
    let initial = raw.initial_states.unwrap_or_else(|| vec![0; arms.len()]);
    let instance = RmabInstance::new(arms, raw.budget, raw.eta, initial)?;
    instance.validate().into_result()?;

    let schedule = match (raw.episodes, raw.horizon) {
        (Some(k), Some(h)) => Some((k, h)),
        (Some(k), None) => Some((k, k)),
        (None, Some(h)) => Some((h, h)),
        (None, None) => None,
    };
    let algorithm = match raw.algorithm {
        Some(name) => name.parse::<Algorithm>()?,
        None => Algorithm::FairUcrl,
    };
    let replicas = raw.replicas.unwrap_or_else(|| DEFAULT_REPLICAS.to_vec());
    if replicas.is_empty() || replicas.contains(&0) {
        return Err(CliError::Config("`replicas` must be a nonempty list of positive counts".into()));
    }
    let resolution = raw.resolution.unwrap_or(DEFAULT_RESOLUTION);
    if !(resolution > 0.0 && resolution <= 0.5) {
        return Err(CliError::Config(format!("resolution {resolution} outside (0, 0.5]")));
    }
    let defaults = SimulationConfig::default();
    let simulation = SimulationConfig {
        epochs: raw.simulation.epochs.unwrap_or(defaults.epochs),
        burn_in: raw.simulation.burn_in.unwrap_or(defaults.burn_in),
        trials: raw.simulation.trials.unwrap_or(defaults.trials),
        seed: raw.seed,
    };
    if simulation.epochs == 0 || simulation.trials == 0 {
        return Err(CliError::Config("`simulation.epochs` and `simulation.trials` must be positive".into()));
    }
    let config = ExperimentConfig {
        instance,
        schedule,
        epsilon: raw.epsilon.unwrap_or(DEFAULT_EPSILON),
        algorithm,
        trials: raw.trials.unwrap_or(DEFAULT_TRIALS),
        seed: raw.seed,
        replicas,
        resolution,
        simulation,
    };
    if config.trials == 0 {
        return Err(CliError::Config("`trials` must be positive".into()));
    }
    if config.schedule.is_some() {
        config.learner_config()?;
    }
    Ok(config)
}
