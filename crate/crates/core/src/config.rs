//! Run configuration: a TOML file with `[run]`, `[scenarios]`, `[world]`,
//! and `[agent]` sections. Every field has a default, so an empty file is a
//! valid configuration (the standard combination-ablation training run);
//! unknown keys are rejected to catch typos.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::harness::Ablation;
use crate::rulebook::{rulebook_from_toml, standard_rulebook, Rulebook, RulebookError};
use crate::world::WorldParams;

/// Complete configuration of one training or evaluation run.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub run: RunSection,
    pub scenarios: ScenarioSection,
    pub world: WorldParams,
    pub agent: AgentSection,
}

/// Top-level run shape: what to train, for how long, and when to evaluate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub ablation: Ablation,
    /// Total environment steps to train for.
    pub total_steps: usize,
    /// Global step at which episodes switch from normal to anomaly
    /// scenarios (checked at episode start).
    pub curriculum_switch_step: usize,
    /// Seed every random stream of the run derives from.
    pub master_seed: u64,
    /// Evaluate on the validation split every this many steps.
    pub eval_every: usize,
    /// Validation episodes per evaluation pass.
    pub eval_scenarios: usize,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            ablation: Ablation::Combination,
            total_steps: 40_000,
            curriculum_switch_step: 3_000,
            master_seed: 1,
            eval_every: 2_000,
            eval_scenarios: 20,
        }
    }
}

/// Benchmark-scenario addressing: the generator seed and the index ranges
/// of the train/validation/evaluation splits (half-open, non-overlapping).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioSection {
    pub base_seed: u64,
    pub train: (usize, usize),
    pub val: (usize, usize),
    pub eval: (usize, usize),
    /// Optional rulebook TOML; the built-in standard book when omitted.
    pub rulebook: Option<PathBuf>,
}

impl Default for ScenarioSection {
    fn default() -> Self {
        Self {
            base_seed: 42,
            train: (0, 800),
            val: (800, 900),
            eval: (900, 1000),
            rulebook: None,
        }
    }
}

/// Q-learning hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AgentSection {
    pub replay_capacity: usize,
    pub batch_size: usize,
    pub discount: f64,
    pub learning_rate: f64,
    /// ε decays linearly from 1 to this floor…
    pub epsilon_final: f64,
    /// …over this fraction of `total_steps`, then stays at the floor.
    pub epsilon_fraction: f64,
    /// Copy the online network into the target every this many updates.
    pub target_sync: usize,
    /// Run one update every this many environment steps.
    pub update_every: usize,
    /// Steps collected before the first update.
    pub learning_starts: usize,
}

impl Default for AgentSection {
    fn default() -> Self {
        Self {
            replay_capacity: 50_000,
            batch_size: 32,
            discount: 0.997,
            learning_rate: 3e-4,
            epsilon_final: 0.05,
            epsilon_fraction: 0.25,
            target_sync: 500,
            update_every: 4,
            learning_starts: 1_000,
        }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {field}: {reason}")]
    Invalid { field: &'static str, reason: String },
    #[error("rulebook config: {0}")]
    Rulebook(#[from] RulebookError),
}

fn invalid(field: &'static str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field,
        reason: reason.into(),
    }
}

impl RunConfig {
    /// Parse and validate a TOML string (empty input = all defaults).
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let config: RunConfig = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    /// Read, parse, and validate a config file.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text)
    }

    /// The fully resolved configuration as TOML (what `validate-config`
    /// prints so defaults become visible).
    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes to TOML")
    }

    /// The rulebook this run scores against, with situation awareness wired
    /// to the configured ablation.
    pub fn build_rulebook(&self) -> Result<Rulebook, ConfigError> {
        let mut rulebook = match &self.scenarios.rulebook {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
                    path: path.clone(),
                    source,
                })?;
                rulebook_from_toml(&text)?
            }
            None => standard_rulebook(),
        };
        rulebook.set_situation_aware(self.run.ablation.situation_aware());
        Ok(rulebook)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let run = &self.run;
        if run.total_steps == 0 {
            return Err(invalid("run.total_steps", "must be positive"));
        }
        if run.curriculum_switch_step >= run.total_steps {
            return Err(invalid(
                "run.curriculum_switch_step",
                format!(
                    "must be below run.total_steps ({}), got {}",
                    run.total_steps, run.curriculum_switch_step
                ),
            ));
        }
        if run.eval_every == 0 {
            return Err(invalid("run.eval_every", "must be positive"));
        }
        let s = &self.scenarios;
        for (field, range) in [
            ("scenarios.train", s.train),
            ("scenarios.val", s.val),
            ("scenarios.eval", s.eval),
        ] {
            if range.0 >= range.1 {
                return Err(invalid(
                    field,
                    format!("range [{}, {}) is empty or reversed", range.0, range.1),
                ));
            }
        }
        if s.train.1 > s.val.0 || s.val.1 > s.eval.0 {
            return Err(invalid(
                "scenarios",
                format!(
                    "splits must be ordered and disjoint: train [{}, {}), val [{}, {}), eval [{}, {})",
                    s.train.0, s.train.1, s.val.0, s.val.1, s.eval.0, s.eval.1
                ),
            ));
        }
        if run.eval_scenarios == 0 || run.eval_scenarios > s.val.1 - s.val.0 {
            return Err(invalid(
                "run.eval_scenarios",
                format!(
                    "must be in [1, {}] (the validation split size), got {}",
                    s.val.1 - s.val.0,
                    run.eval_scenarios
                ),
            ));
        }
        let a = &self.agent;
        if a.batch_size == 0 {
            return Err(invalid("agent.batch_size", "must be positive"));
        }
        if a.replay_capacity < a.batch_size {
            return Err(invalid(
                "agent.replay_capacity",
                format!("must hold at least one batch ({})", a.batch_size),
            ));
        }
        if a.learning_starts < a.batch_size {
            return Err(invalid(
                "agent.learning_starts",
                format!("must be at least agent.batch_size ({})", a.batch_size),
            ));
        }
        if !(a.discount > 0.0 && a.discount <= 1.0) {
            return Err(invalid("agent.discount", "must lie in (0, 1]"));
        }
        if !(a.learning_rate.is_finite() && a.learning_rate > 0.0) {
            return Err(invalid("agent.learning_rate", "must be positive and finite"));
        }
        if !(0.0..=1.0).contains(&a.epsilon_final) {
            return Err(invalid("agent.epsilon_final", "must lie in [0, 1]"));
        }
        if !(a.epsilon_fraction > 0.0 && a.epsilon_fraction <= 1.0) {
            return Err(invalid("agent.epsilon_fraction", "must lie in (0, 1]"));
        }
        if a.target_sync == 0 {
            return Err(invalid("agent.target_sync", "must be positive"));
        }
        if a.update_every == 0 {
            return Err(invalid("agent.update_every", "must be positive"));
        }
        let w = &self.world;
        for (field, value) in [
            ("world.lane_width", w.lane_width),
            ("world.dt", w.dt),
            ("world.v_const", w.v_const),
            ("world.t_const", w.t_const),
            ("world.ego_length", w.ego_length),
            ("world.ego_width", w.ego_width),
            ("world.goal_d_tolerance", w.goal_d_tolerance),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(invalid(field, format!("must be positive and finite, got {value}")));
            }
        }
        if w.step_budget == 0 {
            return Err(invalid("world.step_budget", "must be positive"));
        }
        if w.initial_speed < 0.0 || w.initial_speed > w.limits.speed_max {
            return Err(invalid(
                "world.initial_speed",
                format!("must lie in [0, {}]", w.limits.speed_max),
            ));
        }
        if w.activation_ahead < 0.0 || w.activation_behind < 0.0 {
            return Err(invalid(
                "world.activation_ahead",
                "activation window bounds must be non-negative",
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_the_standard_run() {
        let config = RunConfig::from_toml("").unwrap();
        assert_eq!(config.run.ablation, Ablation::Combination);
        assert_eq!(config.run.total_steps, 40_000);
        assert_eq!(config.agent.discount, 0.997);
        assert_eq!(config.scenarios.base_seed, 42);
        assert_eq!(config.scenarios.eval, (900, 1000));
        assert_eq!(config, RunConfig::default());
    }

    #[test]
    fn partial_overrides_keep_other_defaults() {
        let config = RunConfig::from_toml(
            "[run]\nablation = \"baseline\"\ntotal_steps = 500\ncurriculum_switch_step = 100\n",
        )
        .unwrap();
        assert_eq!(config.run.ablation, Ablation::Baseline);
        assert_eq!(config.run.total_steps, 500);
        assert_eq!(config.agent.batch_size, 32);
        assert_eq!(config.world.lane_width, 3.5);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = RunConfig::from_toml("[run]\ntotal_stepz = 10\n").unwrap_err();
        assert!(err.to_string().contains("total_stepz"), "{err}");
        let err = RunConfig::from_toml("[agentt]\n").unwrap_err();
        assert!(matches!(err, ConfigError::Parse(_)));
    }

    #[test]
    fn validation_names_the_offending_field() {
        let late_switch =
            RunConfig::from_toml("[run]\ntotal_steps = 100\ncurriculum_switch_step = 100\n")
                .unwrap_err();
        assert!(late_switch.to_string().contains("run.curriculum_switch_step"));

        let overlap =
            RunConfig::from_toml("[scenarios]\ntrain = [0, 850]\nval = [800, 900]\n").unwrap_err();
        assert!(overlap.to_string().contains("scenarios"), "{overlap}");

        let batch = RunConfig::from_toml("[agent]\nbatch_size = 0\n").unwrap_err();
        assert!(batch.to_string().contains("agent.batch_size"));

        let lane = RunConfig::from_toml("[world]\nlane_width = -2.0\n").unwrap_err();
        assert!(lane.to_string().contains("world.lane_width"));
    }

    #[test]
    fn resolved_toml_round_trips() {
        let config = RunConfig::from_toml("[run]\nmaster_seed = 7\n").unwrap();
        let text = config.to_toml();
        let back = RunConfig::from_toml(&text).unwrap();
        assert_eq!(config, back);
    }

    #[test]
    fn build_rulebook_wires_situation_awareness_to_the_ablation() {
        let aware = RunConfig::from_toml("").unwrap().build_rulebook().unwrap();
        assert!(aware.situation_aware());
        let strict = RunConfig::from_toml("[run]\nablation = \"trajectory\"\n")
            .unwrap()
            .build_rulebook()
            .unwrap();
        assert!(!strict.situation_aware());
    }
}
