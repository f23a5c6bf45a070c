//! Scenario generation and serialization.
//!
//! A scenario is an 80 m reference route (straight or gently curved), a lane
//! width, a goal just short of the route end, and — in the anomaly variant —
//! a static obstacle blocking the ego lane so the route can only be finished
//! by briefly using the oncoming lane. Generation is fully determined by a
//! seed; the benchmark variants derive per-index seeds from one base seed via
//! the named-stream scheme, so the shipped scenario files can always be
//! regenerated byte for byte.

use std::f64::consts::TAU;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{build_reference_path, Point2, ReferencePath};
use crate::rng::stream_seed;

/// Version tag written into every scenario file.
pub const SCENARIO_FILE_VERSION: u32 = 1;

/// Length of every generated route, meters.
pub const ROUTE_LENGTH: f64 = 80.0;

/// Longitudinal gap between the route end and the goal, meters.
pub const GOAL_SETBACK: f64 = 2.0;

/// Lane width used by generated scenarios, meters.
pub const DEFAULT_LANE_WIDTH: f64 = 3.5;

/// Spacing of generated route waypoints, meters.
const WAYPOINT_STEP: f64 = 0.5;

/// Maximum route curvature magnitude, 1/m.
const MAX_CURVATURE: f64 = 0.01;

/// Obstacle center placement range along the route, meters.
const OBSTACLE_S_RANGE: (f64, f64) = (15.0, 60.0);

/// Obstacle length range, meters.
const OBSTACLE_LENGTH_RANGE: (f64, f64) = (2.0, 5.0);

/// Obstacle width range as a fraction of the lane width. The lower bound
/// keeps the lane fully blocked — squeezing past inside the lane is never an
/// option, so the only way forward is a controlled lane exception.
const OBSTACLE_WIDTH_FRACTION: (f64, f64) = (0.6, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioKind {
    /// Free route, no obstacle.
    Normal,
    /// The ego lane is blocked by a static obstacle.
    Anomaly,
}

impl ScenarioKind {
    /// Label of the named seed stream the benchmark derives this kind from.
    pub fn stream_label(self) -> &'static str {
        match self {
            ScenarioKind::Normal => "scenario-normal",
            ScenarioKind::Anomaly => "scenario-anomaly",
        }
    }
}

/// A static obstacle centered on the ego lane, described in path coordinates.
/// Its rectangle is aligned with the path tangent at `s_center`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Obstacle {
    /// Arc length of the obstacle center, meters.
    pub s_center: f64,
    /// Extent along the path, meters.
    pub length: f64,
    /// Extent across the path, meters.
    pub width: f64,
}

impl Obstacle {
    /// Arc length of the leading (nearer to the start) edge.
    pub fn s_front(&self) -> f64 {
        self.s_center - self.length / 2.0
    }

    /// Arc length of the trailing edge.
    pub fn s_rear(&self) -> f64 {
        self.s_center + self.length / 2.0
    }
}

/// Episode goal in path coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Goal {
    pub s_target: f64,
    pub d_target: f64,
}

/// One driving task: route, lane geometry, optional blockage, and goal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub id: u64,
    pub kind: ScenarioKind,
    /// The seed this scenario was generated from (regeneration key).
    pub seed: u64,
    pub lane_width: f64,
    pub goal: Goal,
    pub obstacle: Option<Obstacle>,
    pub path: ReferencePath,
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("scenario file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("scenario JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported scenario file version {found} (expected {expected})")]
    UnsupportedVersion { found: u32, expected: u32 },
}

/// Generate a scenario deterministically from a seed.
///
/// The route starts at the origin with a random heading and is either
/// straight (1 in 4) or a constant-curvature arc with |curvature| in
/// [0.002, 0.01]. Anomaly scenarios place an obstacle uniformly in
/// [15, 60] m with length in [2, 5] m and width in [0.6, 1.0] lane widths,
/// centered on the ego lane. The scenario id defaults to the seed; benchmark
/// construction overrides it with the benchmark index.
pub fn generate_scenario(seed: u64, kind: ScenarioKind) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let heading = rng.gen_range(0.0..TAU);
    let curvature = if rng.gen_range(0.0..1.0) < 0.25 {
        0.0
    } else {
        let magnitude = rng.gen_range(0.2 * MAX_CURVATURE..MAX_CURVATURE);
        if rng.gen::<bool>() {
            magnitude
        } else {
            -magnitude
        }
    };
    let obstacle = match kind {
        ScenarioKind::Normal => None,
        ScenarioKind::Anomaly => Some(Obstacle {
            s_center: rng.gen_range(OBSTACLE_S_RANGE.0..=OBSTACLE_S_RANGE.1),
            length: rng.gen_range(OBSTACLE_LENGTH_RANGE.0..=OBSTACLE_LENGTH_RANGE.1),
            width: DEFAULT_LANE_WIDTH
                * rng.gen_range(OBSTACLE_WIDTH_FRACTION.0..=OBSTACLE_WIDTH_FRACTION.1),
        }),
    };

    let steps = (ROUTE_LENGTH / WAYPOINT_STEP).round() as usize;
    let mut waypoints = Vec::with_capacity(steps + 1);
    for i in 0..=steps {
        let s = i as f64 * WAYPOINT_STEP;
        let p = if curvature == 0.0 {
            Point2::new(s * heading.cos(), s * heading.sin())
        } else {
            // Constant-curvature arc from the origin with initial heading.
            Point2::new(
                ((heading + curvature * s).sin() - heading.sin()) / curvature,
                (heading.cos() - (heading + curvature * s).cos()) / curvature,
            )
        };
        waypoints.push(p);
    }
    let path = build_reference_path(&waypoints).expect("generated waypoints are valid");
    let goal = Goal {
        s_target: path.total_length() - GOAL_SETBACK,
        d_target: 0.0,
    };
    Scenario {
        id: seed,
        kind,
        seed,
        lane_width: DEFAULT_LANE_WIDTH,
        goal,
        obstacle,
        path,
    }
}

/// The `index`-th scenario of the benchmark rooted at `base_seed`.
///
/// Each index gets its own seed from the kind's named stream, so scenarios
/// are independent and the set can be extended without perturbing existing
/// entries.
pub fn benchmark_scenario(base_seed: u64, kind: ScenarioKind, index: u64) -> Scenario {
    let mut scenario = generate_scenario(stream_seed(base_seed, kind.stream_label(), index), kind);
    scenario.id = index;
    scenario
}

/// Versioned on-disk wrapper around [`Scenario`].
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    version: u32,
    scenario: Scenario,
}

/// Canonical JSON text for a scenario file (compact, trailing newline).
/// Compact keeps the shipped benchmark small; floats use round-trip
/// precision so load(save(x)) reproduces every value bit for bit.
pub fn scenario_to_json(scenario: &Scenario) -> String {
    let file = ScenarioFile {
        version: SCENARIO_FILE_VERSION,
        scenario: scenario.clone(),
    };
    let mut text = serde_json::to_string(&file).expect("scenario serializes");
    text.push('\n');
    text
}

pub fn scenario_from_json(text: &str) -> Result<Scenario, ScenarioError> {
    let file: ScenarioFile = serde_json::from_str(text)?;
    if file.version != SCENARIO_FILE_VERSION {
        return Err(ScenarioError::UnsupportedVersion {
            found: file.version,
            expected: SCENARIO_FILE_VERSION,
        });
    }
    Ok(file.scenario)
}

pub fn save_scenario(path: &Path, scenario: &Scenario) -> Result<(), ScenarioError> {
    fs::write(path, scenario_to_json(scenario)).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_scenario(path: &Path) -> Result<Scenario, ScenarioError> {
    let text = fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })?;
    scenario_from_json(&text)
}

/// File name of the `index`-th benchmark scenario: `0000.json`, `0001.json`, …
pub fn benchmark_file_name(index: u64) -> String {
    format!("{index:04}.json")
}
