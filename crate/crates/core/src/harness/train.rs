//! The curriculum training loop: ε-greedy experience collection into a
//! replay ring, periodic Q-updates toward a target network, a normal→anomaly
//! scenario curriculum, greedy validation passes on a schedule, and
//! append-only metrics plus checkpoint emission. Every random draw comes
//! from a named stream of the master seed, so a rerun with the same config
//! produces byte-identical metrics and checkpoints.

use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::Rng;

use crate::agent::{
    act, dqn_update, load_checkpoint, save_checkpoint, sync_target, AdamState, AgentError,
    NetConfig, PackedTransition, QNetwork, ReplayBuffer,
};
use crate::config::RunConfig;
use crate::reward::total_reward;
use crate::rng::stream_rng;
use crate::world::{benchmark_scenario, LaneWorldEnv, Scenario, ScenarioKind};

use super::{evaluate, finished_score, io_err, outputs_for, HarnessError};

/// Column names of `metrics.csv`. Training rows carry one completed (or
/// cut-off) episode each; `phase = "eval"` rows carry validation means.
pub const METRICS_HEADER: &str =
    "step,episode,phase,ablation,arrived_distance,finished_score,return,loss,epsilon";

/// Size of the seed pool the warm-up phase draws normal scenarios from.
const NORMAL_POOL: u64 = 1000;

/// Everything a training run leaves behind.
#[derive(Debug, Clone)]
pub struct TrainArtifacts {
    pub metrics_path: PathBuf,
    pub latest_checkpoint: PathBuf,
    pub final_checkpoint: PathBuf,
    /// Episodes completed (or cut off) by this invocation.
    pub episodes: u64,
    /// Global step count, including any resumed-from steps.
    pub trained_steps: u64,
}

/// Linear ε decay: 1 at step 0 down to `floor` after the first `fraction`
/// of `total_steps`, constant afterwards.
pub fn epsilon_at(step: u64, total_steps: usize, fraction: f64, floor: f64) -> f64 {
    let horizon = (total_steps as f64 * fraction).max(1.0);
    let progress = step as f64 / horizon;
    if progress >= 1.0 {
        floor
    } else {
        1.0 + (floor - 1.0) * progress
    }
}

/// Append-only metrics log with strictly increasing `step` keys.
struct MetricsWriter {
    path: PathBuf,
    file: BufWriter<File>,
    last_step: u64,
}

impl MetricsWriter {
    fn create(path: &Path) -> Result<Self, HarnessError> {
        let mut file = BufWriter::new(File::create(path).map_err(|e| io_err(path, e))?);
        writeln!(file, "{METRICS_HEADER}").map_err(|e| io_err(path, e))?;
        file.flush().map_err(|e| io_err(path, e))?;
        Ok(Self {
            path: path.to_path_buf(),
            file,
            last_step: 0,
        })
    }

    /// Reopen an existing log for appending. Returns the writer plus the
    /// last episode number already recorded.
    fn append(path: &Path) -> Result<(Self, u64), HarnessError> {
        let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        let mut lines = text.lines().filter(|line| !line.trim().is_empty());
        match lines.next() {
            Some(header) if header == METRICS_HEADER => {}
            other => {
                return Err(HarnessError::Metrics {
                    path: path.to_path_buf(),
                    reason: format!("unexpected header {other:?}"),
                })
            }
        }
        let (mut last_step, mut last_episode) = (0u64, 0u64);
        for line in lines {
            let mut fields = line.split(',');
            let step = fields.next().and_then(|f| f.parse().ok());
            let episode = fields.next().and_then(|f| f.parse().ok());
            match (step, episode) {
                (Some(step), Some(episode)) => {
                    last_step = step;
                    last_episode = episode;
                }
                _ => {
                    return Err(HarnessError::Metrics {
                        path: path.to_path_buf(),
                        reason: format!("unparseable row {line:?}"),
                    })
                }
            }
        }
        let file = OpenOptions::new()
            .append(true)
            .open(path)
            .map_err(|e| io_err(path, e))?;
        Ok((
            Self {
                path: path.to_path_buf(),
                file: BufWriter::new(file),
                last_step,
            },
            last_episode,
        ))
    }

    #[allow(clippy::too_many_arguments)]
    fn write_row(
        &mut self,
        step: u64,
        episode: u64,
        phase: &str,
        ablation: &str,
        arrived: f64,
        finished: f64,
        return_sum: f64,
        loss: Option<f32>,
        epsilon: f64,
    ) -> Result<u64, HarnessError> {
        // Steps are unique row keys: simultaneous rows (an episode ending on
        // an evaluation boundary) are nudged forward by one.
        let step = step.max(self.last_step + 1);
        self.last_step = step;
        let loss_text = loss.map(|l| l.to_string()).unwrap_or_default();
        writeln!(
            self.file,
            "{step},{episode},{phase},{ablation},{arrived},{finished},{return_sum},{loss_text},{epsilon}"
        )
        .map_err(|e| io_err(&self.path, e))?;
        // Flush per row so an aborted run keeps everything written so far.
        self.file.flush().map_err(|e| io_err(&self.path, e))?;
        Ok(step)
    }
}

/// Train per `config` into `out_dir` (`metrics.csv`, `checkpoint_latest.ckpt`
/// at every validation boundary, `checkpoint_final.ckpt` at the end).
///
/// With `resume`, the latest checkpoint supplies the parameters and the
/// global step count and new metrics rows are appended; the replay buffer,
/// optimizer moments, and random streams start fresh (streams are re-keyed
/// by the resumed step so exploration does not replay its own prefix).
pub fn train(config: &RunConfig, out_dir: &Path, resume: bool) -> Result<TrainArtifacts, HarnessError> {
    config.validate()?;
    fs::create_dir_all(out_dir).map_err(|e| io_err(out_dir, e))?;
    let metrics_path = out_dir.join("metrics.csv");
    let latest_path = out_dir.join("checkpoint_latest.ckpt");
    let final_path = out_dir.join("checkpoint_final.ckpt");

    let ablation = config.run.ablation;
    let mode = ablation.action_mode();
    let net_config = NetConfig::q_default(outputs_for(mode));
    let obs_len = net_config.input_len();
    let mut rulebook = config.build_rulebook()?;
    let master = config.run.master_seed;

    let (mut online, start_step, mut metrics, mut episode) = if resume {
        let (net, trained_steps) = load_checkpoint(&latest_path)?;
        if *net.config() != net_config {
            return Err(HarnessError::Resume {
                reason: format!(
                    "checkpoint at {} has a different network shape than the configured run",
                    latest_path.display()
                ),
            });
        }
        let (metrics, last_episode) = MetricsWriter::append(&metrics_path)?;
        (net, trained_steps, metrics, last_episode + 1)
    } else {
        let mut init_rng = stream_rng(master, "net-init", 0);
        let net = QNetwork::<f32>::init(net_config.clone(), &mut init_rng);
        (net, 0, MetricsWriter::create(&metrics_path)?, 1)
    };
    let mut eps_rng = stream_rng(master, "epsilon", start_step);
    let mut sample_rng = stream_rng(master, "replay-sample", start_step);
    let mut curriculum_rng = stream_rng(master, "curriculum", start_step);

    let mut target = online.clone();
    let mut adam = AdamState::new(&online, config.agent.learning_rate as f32);
    let mut replay = ReplayBuffer::new(config.agent.replay_capacity);

    let agent = &config.agent;
    let total = config.run.total_steps as u64;
    let switch = config.run.curriculum_switch_step as u64;
    let gamma = agent.discount as f32;
    let val_scenarios: Vec<Scenario> = (0..config.run.eval_scenarios)
        .map(|i| {
            benchmark_scenario(
                config.scenarios.base_seed,
                ScenarioKind::Anomaly,
                (config.scenarios.val.0 + i) as u64,
            )
        })
        .collect();

    let first_episode = episode;
    let mut global = start_step;
    let mut updates = 0u64;
    let mut last_loss: Option<f32> = None;

    while global < total {
        let anomaly_phase = global >= switch;
        let scenario = if anomaly_phase {
            let index =
                curriculum_rng.gen_range(config.scenarios.train.0 as u64..config.scenarios.train.1 as u64);
            benchmark_scenario(config.scenarios.base_seed, ScenarioKind::Anomaly, index)
        } else {
            let index = curriculum_rng.gen_range(0..NORMAL_POOL);
            benchmark_scenario(config.scenarios.base_seed, ScenarioKind::Normal, index)
        };
        let phase = if anomaly_phase { "anomaly" } else { "normal" };
        let mut env = LaneWorldEnv::new(config.world.clone(), mode, scenario);

        let mut ep_return = 0.0;
        let mut ep_finished = 0.0;
        while !env.is_done() {
            let obs = env.observe();
            let epsilon = epsilon_at(global, config.run.total_steps, agent.epsilon_fraction, agent.epsilon_final);
            let action = act(&online, obs.as_slice(), epsilon, &mut eps_rng);
            let outcome = env.step(action)?;
            let breakdown = total_reward(&outcome, env.scenario(), &mut rulebook, env.params())?;
            ep_return += breakdown.r_total;
            if outcome.done {
                ep_finished = finished_score(&outcome.events);
            }
            // Ending by event bootstraps to zero; running out of step budget
            // is a truncation, not a terminal state.
            let terminal = outcome.events.collision
                || outcome.events.off_road
                || outcome.events.reached_s_target;
            let next_obs = env.observe();
            replay.push(PackedTransition {
                obs: obs.pack().into_boxed_slice(),
                action: action as u8,
                reward: breakdown.r_total as f32,
                next_obs: next_obs.pack().into_boxed_slice(),
                terminal,
            });
            global += 1;

            if replay.len() >= agent.learning_starts && global % agent.update_every as u64 == 0 {
                let batch = replay.sample::<f32, _>(&mut sample_rng, agent.batch_size, obs_len);
                match dqn_update(&mut online, &target, &batch, gamma, &mut adam) {
                    Ok(loss) => {
                        last_loss = Some(loss);
                        updates += 1;
                        if updates % agent.target_sync as u64 == 0 {
                            sync_target(&mut target, &online);
                        }
                    }
                    Err(AgentError::NonFiniteLoss(value)) => {
                        // Keep the log and the last parameters for forensics.
                        save_checkpoint(&latest_path, &online, global)
                            .map_err(HarnessError::Agent)?;
                        return Err(HarnessError::Diverged {
                            step: global as usize,
                            reason: format!("non-finite loss {value}"),
                        });
                    }
                    Err(other) => return Err(other.into()),
                }
            }

            if global % config.run.eval_every as u64 == 0 {
                let summary = evaluate(&online, &val_scenarios, &config.world, &mut rulebook)?;
                metrics.write_row(
                    global,
                    episode,
                    "eval",
                    ablation.label(),
                    summary.mean_arrived_distance,
                    summary.mean_finished_score,
                    summary.mean_return,
                    last_loss,
                    epsilon_at(global, config.run.total_steps, agent.epsilon_fraction, agent.epsilon_final),
                )?;
                save_checkpoint(&latest_path, &online, global)?;
            }

            if global >= total {
                break;
            }
        }

        let arrived = env.state().frenet.s.max(0.0);
        metrics.write_row(
            global,
            episode,
            phase,
            ablation.label(),
            arrived,
            ep_finished,
            ep_return,
            last_loss,
            epsilon_at(global, config.run.total_steps, agent.epsilon_fraction, agent.epsilon_final),
        )?;
        episode += 1;
    }

    save_checkpoint(&final_path, &online, global)?;
    save_checkpoint(&latest_path, &online, global)?;
    Ok(TrainArtifacts {
        metrics_path,
        latest_checkpoint: latest_path,
        final_checkpoint: final_path,
        episodes: episode - first_episode,
        trained_steps: global,
    })
}
