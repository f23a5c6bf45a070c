//! Command-line interface: benchmark generation, training, checkpoint
//! evaluation, episode replay export, plot-data aggregation, and config
//! validation. Argument errors exit with clap's status 2; runtime failures
//! print a chained error and exit 1.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::agent::load_checkpoint;
use crate::config::RunConfig;
use crate::harness::{self, evaluate, plot_series, replay_episode};
use crate::world::scenario::{
    benchmark_file_name, benchmark_scenario, load_scenario, save_scenario, Scenario, ScenarioKind,
};

/// A desk-scale driving benchmark: lane-world scenarios, temporal-logic
/// traffic rules with situation-aware exceptions, and a deterministic
/// Q-learning harness over trajectory or raw-control actions.
#[derive(Debug, Parser)]
#[command(name = "lanerl", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    /// Both scenario kinds, in sibling directories.
    Both,
    /// Free routes only.
    Normal,
    /// Blocked-lane routes only.
    Anomaly,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the benchmark scenario files (deterministic in --seed).
    GenScenarios {
        /// Scenarios to write per kind.
        #[arg(long, default_value_t = 1000)]
        count: u64,
        /// Base seed of the benchmark.
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Directory that receives `normal/` and `anomaly/` subdirectories.
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, value_enum, default_value_t = KindArg::Both)]
        kind: KindArg,
    },
    /// Train an agent and write metrics plus checkpoints.
    Train {
        /// Run configuration TOML; defaults apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out_dir: PathBuf,
        /// Continue from `checkpoint_latest.ckpt` in --out-dir.
        #[arg(long)]
        resume: bool,
    },
    /// Evaluate a checkpoint greedily over a scenario set.
    Eval {
        #[arg(long)]
        checkpoint: PathBuf,
        /// A scenario JSON file or a directory of them.
        #[arg(long)]
        scenarios: PathBuf,
        /// Directory for eval_results.csv and eval_summary.json.
        #[arg(long)]
        out: PathBuf,
        /// Config supplying world parameters and the rulebook; defaults
        /// apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Re-run one scenario under a checkpoint and export per-step rows.
    Replay {
        #[arg(long)]
        checkpoint: PathBuf,
        /// Scenario JSON file to replay.
        #[arg(long)]
        scenario: PathBuf,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
        /// Also dump each executed plan into this directory.
        #[arg(long)]
        trajectories: Option<PathBuf>,
        /// Config supplying world parameters and the rulebook; defaults
        /// apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Aggregate a metrics log into per-metric plot series.
    PlotData {
        #[arg(long)]
        metrics: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Parse and validate a config file, printing the resolved settings.
    ValidateConfig {
        /// Config TOML path.
        path: PathBuf,
    },
}

/// Header of `eval_results.csv`.
pub const EVAL_RESULTS_HEADER: &str =
    "scenario,arrived_distance,finished_score,steps,return,collided,left_road";

/// Header of a replay export.
pub const REPLAY_HEADER: &str = "step,time,x,y,s,d,speed,action,no_collision,in_lane,\
                                 no_out_road,rulebook_active,r_ego,r_rulebook,r_total";

/// Header of a dumped plan file.
pub const TRAJECTORY_HEADER: &str = "time,s,d,x,y,speed";

#[derive(Debug, Serialize)]
struct EvalSummaryFile {
    scenarios: usize,
    mean_arrived_distance: f64,
    mean_finished_score: f64,
    mean_return: f64,
    perfect_count: usize,
    collision_count: usize,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::GenScenarios {
            count,
            seed,
            out_dir,
            kind,
        } => gen_scenarios(count, seed, &out_dir, kind),
        Command::Train {
            config,
            out_dir,
            resume,
        } => train(config.as_deref(), &out_dir, resume),
        Command::Eval {
            checkpoint,
            scenarios,
            out,
            config,
        } => eval(&checkpoint, &scenarios, &out, config.as_deref()),
        Command::Replay {
            checkpoint,
            scenario,
            out,
            trajectories,
            config,
        } => replay(&checkpoint, &scenario, &out, trajectories.as_deref(), config.as_deref()),
        Command::PlotData { metrics, out_dir } => plot_data(&metrics, &out_dir),
        Command::ValidateConfig { path } => validate_config(&path),
    }
}

fn load_config_opt(path: Option<&Path>) -> Result<RunConfig> {
    match path {
        Some(path) => {
            RunConfig::load(path).with_context(|| format!("loading config {}", path.display()))
        }
        None => Ok(RunConfig::default()),
    }
}

fn gen_scenarios(count: u64, seed: u64, out_dir: &Path, kind: KindArg) -> Result<()> {
    if count == 0 {
        bail!("--count must be positive");
    }
    let kinds: &[ScenarioKind] = match kind {
        KindArg::Both => &[ScenarioKind::Normal, ScenarioKind::Anomaly],
        KindArg::Normal => &[ScenarioKind::Normal],
        KindArg::Anomaly => &[ScenarioKind::Anomaly],
    };
    for &kind in kinds {
        let sub = out_dir.join(match kind {
            ScenarioKind::Normal => "normal",
            ScenarioKind::Anomaly => "anomaly",
        });
        fs::create_dir_all(&sub).with_context(|| format!("creating {}", sub.display()))?;
        for index in 0..count {
            let scenario = benchmark_scenario(seed, kind, index);
            save_scenario(&sub.join(benchmark_file_name(index)), &scenario)?;
        }
        println!("wrote {count} scenarios to {}", sub.display());
    }
    Ok(())
}

fn train(config: Option<&Path>, out_dir: &Path, resume: bool) -> Result<()> {
    let config = load_config_opt(config)?;
    let artifacts = harness::train(&config, out_dir, resume).context("training failed")?;
    println!(
        "trained {} steps over {} episodes ({} ablation)",
        artifacts.trained_steps,
        artifacts.episodes,
        config.run.ablation.label()
    );
    println!("metrics:    {}", artifacts.metrics_path.display());
    println!("checkpoint: {}", artifacts.final_checkpoint.display());
    Ok(())
}

/// Load one scenario file, or every `*.json` in a directory (sorted by
/// file name).
fn load_scenarios(path: &Path) -> Result<Vec<Scenario>> {
    if path.is_dir() {
        let mut files: Vec<PathBuf> = fs::read_dir(path)
            .with_context(|| format!("reading {}", path.display()))?
            .filter_map(|entry| entry.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
            .collect();
        files.sort();
        if files.is_empty() {
            bail!("no .json scenario files in {}", path.display());
        }
        files
            .iter()
            .map(|file| Ok(load_scenario(file)?))
            .collect()
    } else {
        Ok(vec![load_scenario(path)?])
    }
}

fn eval(checkpoint: &Path, scenarios: &Path, out: &Path, config: Option<&Path>) -> Result<()> {
    let config = load_config_opt(config)?;
    let (net, _) = load_checkpoint(checkpoint)
        .with_context(|| format!("loading checkpoint {}", checkpoint.display()))?;
    let list = load_scenarios(scenarios)?;
    let mut rulebook = config.build_rulebook()?;
    let summary = evaluate(&net, &list, &config.world, &mut rulebook)?;

    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let results_path = out.join("eval_results.csv");
    let mut csv = String::from(EVAL_RESULTS_HEADER);
    csv.push('\n');
    for (id, r) in &summary.results {
        csv.push_str(&format!(
            "{id},{},{},{},{},{},{}\n",
            r.arrived_distance,
            r.finished_score,
            r.steps,
            r.return_sum,
            u8::from(r.collided),
            u8::from(r.left_road),
        ));
    }
    fs::write(&results_path, csv).with_context(|| format!("writing {}", results_path.display()))?;

    let summary_file = EvalSummaryFile {
        scenarios: summary.results.len(),
        mean_arrived_distance: summary.mean_arrived_distance,
        mean_finished_score: summary.mean_finished_score,
        mean_return: summary.mean_return,
        perfect_count: summary
            .results
            .iter()
            .filter(|(_, r)| r.finished_score == 1.0)
            .count(),
        collision_count: summary.results.iter().filter(|(_, r)| r.collided).count(),
    };
    let summary_path = out.join("eval_summary.json");
    let mut json = serde_json::to_string_pretty(&summary_file)?;
    json.push('\n');
    fs::write(&summary_path, json).with_context(|| format!("writing {}", summary_path.display()))?;

    println!(
        "evaluated {} scenarios: mean finished {:.3}, mean arrived {:.1} m, mean return {:.2}",
        summary_file.scenarios,
        summary.mean_finished_score,
        summary.mean_arrived_distance,
        summary.mean_return
    );
    println!("results: {}", results_path.display());
    println!("summary: {}", summary_path.display());
    Ok(())
}

fn replay(
    checkpoint: &Path,
    scenario: &Path,
    out: &Path,
    trajectories: Option<&Path>,
    config: Option<&Path>,
) -> Result<()> {
    let config = load_config_opt(config)?;
    let (net, _) = load_checkpoint(checkpoint)
        .with_context(|| format!("loading checkpoint {}", checkpoint.display()))?;
    let scenario = load_scenario(scenario)?;
    let mut rulebook = config.build_rulebook()?;
    let record = replay_episode(&net, &scenario, &config.world, &mut rulebook)?;

    let mut csv = String::from(REPLAY_HEADER);
    csv.push('\n');
    for row in &record.rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            row.step,
            row.time,
            row.x,
            row.y,
            row.s,
            row.d,
            row.speed,
            row.action,
            u8::from(row.no_collision),
            u8::from(row.in_lane),
            u8::from(row.no_out_road),
            u8::from(row.rulebook_active),
            row.r_ego,
            row.r_rulebook,
            row.r_total,
        ));
    }
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    fs::write(out, csv).with_context(|| format!("writing {}", out.display()))?;

    if let Some(dir) = trajectories {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        for (step, plan) in &record.plans {
            let mut text = String::from(TRAJECTORY_HEADER);
            text.push('\n');
            for sample in &plan.samples {
                text.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    sample.time,
                    sample.pose.s,
                    sample.pose.d,
                    sample.cartesian.x,
                    sample.cartesian.y,
                    sample.speed,
                ));
            }
            let path = dir.join(format!("step_{step:04}.csv"));
            fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        }
    }

    println!(
        "replayed {} steps: finished {}, arrived {:.1} m, return {:.2} -> {}",
        record.result.steps,
        record.result.finished_score,
        record.result.arrived_distance,
        record.result.return_sum,
        out.display()
    );
    Ok(())
}

fn plot_data(metrics: &Path, out_dir: &Path) -> Result<()> {
    let written = plot_series(metrics, out_dir)?;
    for path in &written {
        println!("{}", path.display());
    }
    Ok(())
}

fn validate_config(path: &Path) -> Result<()> {
    let config =
        RunConfig::load(path).with_context(|| format!("invalid config {}", path.display()))?;
    print!("{}", config.to_toml());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;
    use tempfile::TempDir;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn gen_scenarios_defaults_match_the_benchmark() {
        let cli = Cli::try_parse_from(["lanerl", "gen-scenarios", "--out-dir", "x"]).unwrap();
        match cli.command {
            Command::GenScenarios {
                count, seed, kind, ..
            } => {
                assert_eq!(count, 1000);
                assert_eq!(seed, 42);
                assert_eq!(kind, KindArg::Both);
            }
            other => panic!("parsed {other:?}"),
        }
    }

    #[test]
    fn unknown_arguments_are_parse_errors() {
        assert!(Cli::try_parse_from(["lanerl", "train"]).is_err());
        assert!(Cli::try_parse_from(["lanerl", "no-such-command"]).is_err());
        assert!(
            Cli::try_parse_from(["lanerl", "gen-scenarios", "--out-dir", "x", "--bogus"]).is_err()
        );
    }

    #[test]
    fn gen_scenarios_writes_both_kinds_deterministically() {
        let dir = TempDir::new().unwrap();
        gen_scenarios(3, 42, dir.path(), KindArg::Both).unwrap();
        for kind in ["normal", "anomaly"] {
            for index in 0..3 {
                let path = dir.path().join(kind).join(format!("{index:04}.json"));
                assert!(path.exists(), "{}", path.display());
            }
        }
        let text = fs::read_to_string(dir.path().join("anomaly/0002.json")).unwrap();
        let again = dir.path().join("again");
        gen_scenarios(3, 42, &again, KindArg::Anomaly).unwrap();
        let text_again = fs::read_to_string(again.join("anomaly/0002.json")).unwrap();
        assert_eq!(text, text_again, "regeneration must be byte-identical");
        assert!(!again.join("normal").exists());
    }

    #[test]
    fn validate_config_rejects_bad_files() {
        let dir = TempDir::new().unwrap();
        let path = dir.path().join("bad.toml");
        fs::write(&path, "[agent]\nbatch_size = 0\n").unwrap();
        assert!(validate_config(&path).is_err());
        fs::write(&path, "[run]\nmaster_seed = 3\n").unwrap();
        validate_config(&path).unwrap();
    }

    #[test]
    fn full_command_chain_produces_all_artifacts() {
        let dir = TempDir::new().unwrap();
        let scenario_dir = dir.path().join("scenarios");
        gen_scenarios(2, 42, &scenario_dir, KindArg::Anomaly).unwrap();

        let config_path = dir.path().join("run.toml");
        fs::write(
            &config_path,
            "[run]\ntotal_steps = 8\ncurriculum_switch_step = 2\n\
             eval_every = 4\neval_scenarios = 1\n\
             [agent]\nbatch_size = 2\nlearning_starts = 2\nupdate_every = 2\n",
        )
        .unwrap();
        let train_dir = dir.path().join("train");
        train(Some(&config_path), &train_dir, false).unwrap();
        let checkpoint = train_dir.join("checkpoint_final.ckpt");
        assert!(checkpoint.exists());

        let eval_dir = dir.path().join("eval");
        eval(
            &checkpoint,
            &scenario_dir.join("anomaly"),
            &eval_dir,
            Some(&config_path),
        )
        .unwrap();
        let results = fs::read_to_string(eval_dir.join("eval_results.csv")).unwrap();
        assert!(results.starts_with(EVAL_RESULTS_HEADER));
        assert_eq!(results.lines().count(), 3, "{results}");
        let summary = fs::read_to_string(eval_dir.join("eval_summary.json")).unwrap();
        assert!(summary.contains("\"scenarios\": 2"));

        let replay_csv = dir.path().join("replay/episode.csv");
        let plans_dir = dir.path().join("replay/plans");
        replay(
            &checkpoint,
            &scenario_dir.join("anomaly/0000.json"),
            &replay_csv,
            Some(&plans_dir),
            Some(&config_path),
        )
        .unwrap();
        let replay_text = fs::read_to_string(&replay_csv).unwrap();
        assert!(replay_text.starts_with(REPLAY_HEADER));
        assert!(replay_text.lines().count() > 1);
        let plan_files = fs::read_dir(&plans_dir).unwrap().count();
        assert_eq!(plan_files, replay_text.lines().count() - 1, "one plan per step");

        let plots_dir = dir.path().join("plots");
        plot_data(&train_dir.join("metrics.csv"), &plots_dir).unwrap();
        assert!(plots_dir.join("plot_return.csv").exists());
        assert!(plots_dir.join("plot_loss.csv").exists());
    }
}
