//! Training and evaluation harness: ablation wiring, episode runners,
//! scripted reference policies, the curriculum training loop, and
//! metrics/plot-data export.

pub mod plot;
pub mod scripted;
pub mod train;

pub use plot::plot_series;
pub use train::{train, TrainArtifacts, METRICS_HEADER};

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agent::{greedy_action, AgentError, QNetwork};
use crate::config::ConfigError;
use crate::reward::total_reward;
use crate::rulebook::{Rulebook, RulebookError};
use crate::trajectory::Trajectory;
use crate::world::{
    rulebook_active, ActionMode, EnvError, LaneWorldEnv, Scenario, StepEvents, WorldParams,
};

/// Which parts of the full system a run exercises.
///
/// | ablation      | actions        | rule coefficients      |
/// |---------------|----------------|------------------------|
/// | `baseline`    | raw controls   | strict (never relaxed) |
/// | `trajectory`  | manifold plans | strict (never relaxed) |
/// | `rulebook`    | raw controls   | situation-aware        |
/// | `combination` | manifold plans | situation-aware        |
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ablation {
    Baseline,
    Trajectory,
    Rulebook,
    #[default]
    Combination,
}

impl Ablation {
    pub fn action_mode(self) -> ActionMode {
        match self {
            Ablation::Baseline | Ablation::Rulebook => ActionMode::Control,
            Ablation::Trajectory | Ablation::Combination => ActionMode::Trajectory,
        }
    }

    /// Whether rule penalties relax inside the exception window.
    pub fn situation_aware(self) -> bool {
        matches!(self, Ablation::Rulebook | Ablation::Combination)
    }

    /// The name used in config files and metrics rows.
    pub fn label(self) -> &'static str {
        match self {
            Ablation::Baseline => "baseline",
            Ablation::Trajectory => "trajectory",
            Ablation::Rulebook => "rulebook",
            Ablation::Combination => "combination",
        }
    }

    pub fn all() -> [Ablation; 4] {
        [
            Ablation::Baseline,
            Ablation::Trajectory,
            Ablation::Rulebook,
            Ablation::Combination,
        ]
    }
}

/// Number of discrete actions each mode exposes.
pub fn outputs_for(mode: ActionMode) -> usize {
    match mode {
        ActionMode::Trajectory => 3,
        ActionMode::Control => 9,
    }
}

/// Infer the action mode from a checkpoint's output count.
pub fn mode_for_outputs(outputs: usize) -> Result<ActionMode, HarnessError> {
    match outputs {
        3 => Ok(ActionMode::Trajectory),
        9 => Ok(ActionMode::Control),
        _ => Err(HarnessError::UnknownActionCount { outputs }),
    }
}

/// Episode completion score: 1 for reaching the goal arc length within
/// lateral tolerance, ½ for reaching it off-center, 0 otherwise.
pub fn finished_score(events: &StepEvents) -> f64 {
    if events.reached_both {
        1.0
    } else if events.reached_s_target {
        0.5
    } else {
        0.0
    }
}

/// Summary of one completed episode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpisodeResult {
    /// Final arc length along the route, meters.
    pub arrived_distance: f64,
    pub finished_score: f64,
    /// Agent steps taken.
    pub steps: usize,
    /// Undiscounted sum of step rewards.
    pub return_sum: f64,
    pub collided: bool,
    pub left_road: bool,
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Rulebook(#[from] RulebookError),
    #[error(transparent)]
    Agent(#[from] AgentError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("metrics file {path}: {reason}")]
    Metrics { path: PathBuf, reason: String },
    #[error("training diverged at step {step}: {reason}")]
    Diverged { step: usize, reason: String },
    #[error("cannot resume: {reason}")]
    Resume { reason: String },
    #[error("checkpoint has {outputs} outputs; expected 3 (trajectory) or 9 (control)")]
    UnknownActionCount { outputs: usize },
}

pub(crate) fn io_err(path: &std::path::Path, source: std::io::Error) -> HarnessError {
    HarnessError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Run `policy` on a freshly reset or mid-episode environment until the
/// episode ends, scoring each step against `rulebook`.
pub fn run_policy_episode<P>(
    env: &mut LaneWorldEnv,
    rulebook: &mut Rulebook,
    mut policy: P,
) -> Result<EpisodeResult, HarnessError>
where
    P: FnMut(&LaneWorldEnv) -> usize,
{
    let mut return_sum = 0.0;
    let mut finished = 0.0;
    let mut collided = false;
    let mut left_road = false;
    while !env.is_done() {
        let action = policy(env);
        let outcome = env.step(action)?;
        let breakdown = total_reward(&outcome, env.scenario(), rulebook, env.params())?;
        return_sum += breakdown.r_total;
        collided |= outcome.events.collision;
        left_road |= outcome.events.off_road;
        if outcome.done {
            finished = finished_score(&outcome.events);
        }
    }
    Ok(EpisodeResult {
        arrived_distance: env.state().frenet.s.max(0.0),
        finished_score: finished,
        steps: env.steps_taken(),
        return_sum,
        collided,
        left_road,
    })
}

/// Run one episode with the network's greedy policy.
pub fn run_greedy_episode(
    env: &mut LaneWorldEnv,
    rulebook: &mut Rulebook,
    net: &QNetwork<f32>,
) -> Result<EpisodeResult, HarnessError> {
    run_policy_episode(env, rulebook, |env| {
        greedy_action(net, env.observe().as_slice())
    })
}

/// Greedy evaluation of a network over a scenario set.
#[derive(Debug, Clone)]
pub struct EvalSummary {
    /// Per-scenario results, in input order, keyed by scenario id.
    pub results: Vec<(u64, EpisodeResult)>,
    pub mean_arrived_distance: f64,
    pub mean_finished_score: f64,
    pub mean_return: f64,
}

pub fn evaluate(
    net: &QNetwork<f32>,
    scenarios: &[Scenario],
    params: &WorldParams,
    rulebook: &mut Rulebook,
) -> Result<EvalSummary, HarnessError> {
    let mode = mode_for_outputs(net.config().outputs)?;
    let mut results = Vec::with_capacity(scenarios.len());
    let (mut arrived, mut finished, mut ret) = (0.0, 0.0, 0.0);
    for scenario in scenarios {
        let mut env = LaneWorldEnv::new(params.clone(), mode, scenario.clone());
        let result = run_greedy_episode(&mut env, rulebook, net)?;
        arrived += result.arrived_distance;
        finished += result.finished_score;
        ret += result.return_sum;
        results.push((scenario.id, result));
    }
    let n = (scenarios.len().max(1)) as f64;
    Ok(EvalSummary {
        results,
        mean_arrived_distance: arrived / n,
        mean_finished_score: finished / n,
        mean_return: ret / n,
    })
}

/// One agent step of a replayed episode, for CSV export: the end-of-step
/// pose, the rule atoms there, and the reward split that the step earned.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplayRow {
    pub step: usize,
    pub time: f64,
    pub x: f64,
    pub y: f64,
    pub s: f64,
    pub d: f64,
    pub speed: f64,
    pub action: usize,
    pub no_collision: bool,
    pub in_lane: bool,
    pub no_out_road: bool,
    /// Whether the exception window was open at the step's start (what the
    /// reward judged).
    pub rulebook_active: bool,
    pub r_ego: f64,
    pub r_rulebook: f64,
    pub r_total: f64,
}

/// A replayed episode: per-step rows plus, in trajectory mode, the plan
/// each step executed.
#[derive(Debug, Clone)]
pub struct ReplayRecord {
    pub rows: Vec<ReplayRow>,
    pub plans: Vec<(usize, Trajectory)>,
    pub result: EpisodeResult,
}

/// Re-run one scenario under the network's greedy policy, recording every
/// step for export.
pub fn replay_episode(
    net: &QNetwork<f32>,
    scenario: &Scenario,
    params: &WorldParams,
    rulebook: &mut Rulebook,
) -> Result<ReplayRecord, HarnessError> {
    let mode = mode_for_outputs(net.config().outputs)?;
    let mut env = LaneWorldEnv::new(params.clone(), mode, scenario.clone());
    let mut rows = Vec::new();
    let mut plans = Vec::new();
    let mut return_sum = 0.0;
    let mut finished = 0.0;
    let mut collided = false;
    let mut left_road = false;
    while !env.is_done() {
        let active = rulebook_active(
            env.state(),
            env.scenario(),
            params.activation_ahead,
            params.activation_behind,
        );
        let action = greedy_action(net, env.observe().as_slice());
        let outcome = env.step(action)?;
        let breakdown = total_reward(&outcome, env.scenario(), rulebook, env.params())?;
        return_sum += breakdown.r_total;
        collided |= outcome.events.collision;
        left_road |= outcome.events.off_road;
        if outcome.done {
            finished = finished_score(&outcome.events);
        }
        let atoms = outcome.trace.last().expect("a step visits at least one state");
        let step = env.steps_taken();
        rows.push(ReplayRow {
            step,
            time: env.elapsed(),
            x: outcome.state.position.x,
            y: outcome.state.position.y,
            s: outcome.state.frenet.s,
            d: outcome.state.frenet.d,
            speed: outcome.state.speed,
            action,
            no_collision: atoms["no_collision"],
            in_lane: atoms["in_lane"],
            no_out_road: atoms["no_out_road"],
            rulebook_active: active,
            r_ego: breakdown.r_ego,
            r_rulebook: breakdown.r_rulebook,
            r_total: breakdown.r_total,
        });
        if let Some(plan) = env.last_plan() {
            plans.push((step, plan.clone()));
        }
    }
    let result = EpisodeResult {
        arrived_distance: env.state().frenet.s.max(0.0),
        finished_score: finished,
        steps: env.steps_taken(),
        return_sum,
        collided,
        left_road,
    };
    Ok(ReplayRecord { rows, plans, result })
}
