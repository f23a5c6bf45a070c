//! The 2D lane world: scenario generation, vehicle dynamics and trajectory
//! tracking, rule-atom evaluation, rasterized bird's-eye observations, and
//! the stepped environment that ties them together.

pub mod atoms;
pub mod env;
pub mod observe;
pub mod scenario;
pub mod vehicle;

pub use atoms::{eval_atoms, obbs_intersect, rulebook_active, Obb};
pub use env::{ActionMode, EnvError, LaneWorldEnv, StepEvents, StepOutcome, WorldParams};
pub use observe::{render_observation, ObservationGrid, CELL_METERS, GRID_CHANNELS, GRID_SIZE};
pub use scenario::{
    benchmark_scenario, generate_scenario, Goal, Obstacle, Scenario, ScenarioError, ScenarioKind,
};
pub use vehicle::{
    pid_track, step_unicycle, step_vehicle, PidGains, TrackerGains, TrajectoryTracker,
    VehicleLimits, VehicleState,
};
