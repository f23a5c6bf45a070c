//! The stepped lane-world environment.
//!
//! One agent step is either a whole tracked trajectory (up to three seconds
//! of simulation at 0.1 s resolution) or a single 0.1 s control tick,
//! depending on the action mode. Each step reports the visited states' rule
//! atoms as a trace, the distance traveled, and the termination events the
//! reward layer turns into scores.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::cartesian_to_frenet_near;
use crate::ltl::TraceState;
use crate::trajectory::{
    candidate_manifolds, generate_trajectory, FrenetPose, TerminalManifold, Trajectory,
    TrajectoryError,
};
use crate::world::atoms::eval_atoms;
use crate::world::observe::{render_observation, ObservationGrid};
use crate::world::scenario::Scenario;
use crate::world::vehicle::{
    step_unicycle, step_vehicle, TrackerGains, TrajectoryTracker, VehicleLimits, VehicleState,
};

/// Arc-length half-window when re-projecting the ego after one 0.1 s step.
const PROJECTION_WINDOW: f64 = 5.0;

/// Everything that parameterizes the world and its termination rules.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WorldParams {
    /// Lane width, meters.
    pub lane_width: f64,
    /// Simulation tick, seconds.
    pub dt: f64,
    /// Cruise speed targeted by trajectory actions, m/s.
    pub v_const: f64,
    /// Duration of every trajectory action, seconds.
    pub t_const: f64,
    /// Ego footprint, meters.
    pub ego_length: f64,
    pub ego_width: f64,
    /// Speed at episode start, m/s.
    pub initial_speed: f64,
    /// Lateral slack beyond the road edge before the episode aborts, meters.
    pub off_road_margin: f64,
    /// Maximum agent steps per episode.
    pub step_budget: usize,
    /// How close to the goal lateral offset counts as fully finished, meters.
    pub goal_d_tolerance: f64,
    /// Exception-rulebook activation span around the obstacle, meters.
    pub activation_ahead: f64,
    pub activation_behind: f64,
    pub limits: VehicleLimits,
    pub tracker_gains: TrackerGains,
}

impl Default for WorldParams {
    fn default() -> Self {
        Self {
            lane_width: 3.5,
            dt: 0.1,
            v_const: 8.0,
            t_const: 3.0,
            ego_length: 4.5,
            ego_width: 2.0,
            initial_speed: 0.0,
            off_road_margin: 2.0,
            step_budget: 400,
            goal_d_tolerance: 0.5,
            activation_ahead: 50.0,
            activation_behind: 25.0,
            limits: VehicleLimits::default(),
            tracker_gains: TrackerGains::default(),
        }
    }
}

/// Whether actions select terminal manifolds or raw controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ActionMode {
    /// Three lateral-offset manifolds, tracked over `t_const` seconds.
    Trajectory,
    /// Nine acceleration × heading-rate pairs, one tick each.
    Control,
}

/// Terminal events of one agent step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct StepEvents {
    /// Ego rectangle intersected the obstacle rectangle.
    pub collision: bool,
    /// Lateral offset left the road corridor plus margin.
    pub off_road: bool,
    /// Ego crossed the goal arc length.
    pub reached_s_target: bool,
    /// Crossed the goal arc length within lateral tolerance of the goal.
    pub reached_both: bool,
}

/// Everything observed during one agent step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    /// State at the start of the step (where activation is judged).
    pub start: VehicleState,
    /// State after the step.
    pub state: VehicleState,
    /// Distance traveled during the step, meters.
    pub traveled: f64,
    pub events: StepEvents,
    /// Rule-atom assignments of every state visited during the step, in
    /// order, excluding the start state (it closed the previous step).
    pub trace: Vec<TraceState>,
    /// Whether the episode is over after this step.
    pub done: bool,
}

#[derive(Debug, Error)]
pub enum EnvError {
    #[error("the episode is over; reset the environment before stepping")]
    EpisodeOver,
    #[error("action {action} out of range for a {count}-action environment")]
    InvalidAction { action: usize, count: usize },
    #[error(transparent)]
    Trajectory(#[from] TrajectoryError),
}

/// A single-obstacle lane world evolving one agent step at a time.
#[derive(Debug, Clone)]
pub struct LaneWorldEnv {
    params: WorldParams,
    mode: ActionMode,
    scenario: Scenario,
    state: VehicleState,
    tracker: TrajectoryTracker,
    /// Most recently executed plan, drawn into the observation.
    last_plan: Option<Trajectory>,
    steps_taken: usize,
    elapsed: f64,
    done: bool,
}

impl LaneWorldEnv {
    pub fn new(params: WorldParams, mode: ActionMode, scenario: Scenario) -> Self {
        let state = VehicleState::on_path(&scenario.path, 0.0, 0.0, params.initial_speed);
        let tracker = TrajectoryTracker::new(params.tracker_gains);
        Self {
            params,
            mode,
            scenario,
            state,
            tracker,
            last_plan: None,
            steps_taken: 0,
            elapsed: 0.0,
            done: false,
        }
    }

    /// Begin a fresh episode on `scenario`.
    pub fn reset(&mut self, scenario: Scenario) {
        self.state = VehicleState::on_path(&scenario.path, 0.0, 0.0, self.params.initial_speed);
        self.scenario = scenario;
        self.tracker.reset();
        self.last_plan = None;
        self.steps_taken = 0;
        self.elapsed = 0.0;
        self.done = false;
    }

    pub fn params(&self) -> &WorldParams {
        &self.params
    }

    pub fn mode(&self) -> ActionMode {
        self.mode
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn state(&self) -> &VehicleState {
        &self.state
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    /// The most recently executed plan, if any (trajectory mode only).
    pub fn last_plan(&self) -> Option<&Trajectory> {
        self.last_plan.as_ref()
    }

    pub fn steps_taken(&self) -> usize {
        self.steps_taken
    }

    /// Simulated seconds since the episode started.
    pub fn elapsed(&self) -> f64 {
        self.elapsed
    }

    pub fn action_count(&self) -> usize {
        match self.mode {
            ActionMode::Trajectory => 3,
            ActionMode::Control => 9,
        }
    }

    /// The three terminal manifolds the trajectory actions map to, given the
    /// current lateral position (ordering flips between lane regimes).
    pub fn candidates(&self) -> [TerminalManifold; 3] {
        candidate_manifolds(
            self.state.frenet.d,
            self.params.lane_width,
            self.params.v_const,
            self.params.t_const,
        )
    }

    /// Render the agent's view of the current state.
    pub fn observe(&self) -> ObservationGrid {
        render_observation(
            &self.state,
            &self.scenario,
            self.last_plan.as_ref(),
            self.params.ego_length,
            self.params.ego_width,
        )
    }

    /// Advance one agent step. Trajectory actions simulate the whole tracked
    /// maneuver (ending early on a terminal event); control actions simulate
    /// one tick.
    pub fn step(&mut self, action: usize) -> Result<StepOutcome, EnvError> {
        if self.done {
            return Err(EnvError::EpisodeOver);
        }
        let count = self.action_count();
        if action >= count {
            return Err(EnvError::InvalidAction { action, count });
        }

        let start = self.state;
        let mut events = StepEvents::default();
        let mut trace = Vec::new();
        let mut traveled = 0.0;
        let mut done = false;

        match self.mode {
            ActionMode::Trajectory => {
                let manifold = self.candidates()[action];
                let plan =
                    generate_trajectory(&self.state.frenet, &manifold, &self.scenario.path, self.params.dt)?;
                for k in 1..plan.samples.len() {
                    let elapsed_in_plan = (k - 1) as f64 * self.params.dt;
                    let (accel, steer) =
                        self.tracker
                            .controls(&self.state, &plan, elapsed_in_plan, self.params.dt);
                    traveled += self.advance(|state, params| {
                        step_vehicle(state, accel, steer, params.dt, &params.limits)
                    });
                    done = self.record(&mut trace, &mut events);
                    if done {
                        break;
                    }
                }
                self.last_plan = Some(plan);
            }
            ActionMode::Control => {
                let accel = (action / 3) as f64 - 1.0;
                let omega = ((action % 3) as f64 - 1.0) * self.params.limits.omega_max;
                traveled += self.advance(|state, params| {
                    step_unicycle(state, accel, omega, params.dt, &params.limits)
                });
                done = self.record(&mut trace, &mut events);
            }
        }

        self.steps_taken += 1;
        if self.steps_taken >= self.params.step_budget {
            done = true;
        }
        self.done = done;
        Ok(StepOutcome {
            start,
            state: self.state,
            traveled,
            events,
            trace,
            done,
        })
    }

    /// Run one simulation tick via `stepper`, refresh the cached
    /// path-relative pose, and return the distance moved.
    fn advance(&mut self, stepper: impl FnOnce(&VehicleState, &WorldParams) -> VehicleState) -> f64 {
        let before = self.state.position;
        let mut next = stepper(&self.state, &self.params);
        match cartesian_to_frenet_near(
            &self.scenario.path,
            next.position,
            self.state.frenet.s,
            PROJECTION_WINDOW,
        ) {
            Ok((s, d)) => {
                // Heading error against the path tangent; sine/cosine are
                // 2π-periodic, so no angle normalization is needed.
                let heading_error = next.heading - self.scenario.path.heading_at(s);
                next.frenet = FrenetPose {
                    s,
                    d,
                    s_dot: next.speed * heading_error.cos(),
                    d_dot: next.speed * heading_error.sin(),
                    d_ddot: 0.0,
                };
            }
            Err(_) => {
                // Left the projection corridor entirely — flag as far
                // off-road by saturating the lateral offset.
                next.frenet = FrenetPose {
                    s: self.state.frenet.s,
                    d: f64::INFINITY.copysign(self.state.frenet.d),
                    s_dot: 0.0,
                    d_dot: 0.0,
                    d_ddot: 0.0,
                };
            }
        }
        self.state = next;
        self.elapsed += self.params.dt;
        before.distance(&next.position)
    }

    /// Append the current state's atoms to `trace`, fold terminal events
    /// into `events`, and report whether the episode ends here. Collision
    /// outranks going off-road, which outranks reaching the goal.
    fn record(&mut self, trace: &mut Vec<TraceState>, events: &mut StepEvents) -> bool {
        let atoms = eval_atoms(
            &self.state,
            &self.scenario,
            self.params.ego_length,
            self.params.ego_width,
        );
        let collision = !atoms["no_collision"];
        trace.push(atoms);
        if collision {
            events.collision = true;
            return true;
        }
        let road_limit = 1.5 * self.params.lane_width + self.params.off_road_margin;
        if self.state.frenet.d.abs() > road_limit {
            events.off_road = true;
            return true;
        }
        if self.state.frenet.s >= self.scenario.goal.s_target {
            events.reached_s_target = true;
            events.reached_both = (self.state.frenet.d - self.scenario.goal.d_target).abs()
                <= self.params.goal_d_tolerance;
            return true;
        }
        false
    }
}
