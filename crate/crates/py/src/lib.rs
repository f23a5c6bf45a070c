//! Python bindings for the lane-world stack: scenarios, the simulator,
//! temporal-logic rules, hierarchical rulebook rewards, trajectory
//! generation, and trained-policy inference.
//!
//! The module mirrors the Rust API at the same granularity a script needs:
//! build or load a [`Scenario`], drive a [`LaneWorld`] step by step (with the
//! reward decomposition computed by the same code the trainer uses), check
//! traces against [`Formula`]s or a whole [`Rulebook`], and run a trained
//! checkpoint through [`Policy`].

use std::collections::BTreeMap;
use std::path::PathBuf;

use pyo3::exceptions::{PyIOError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use lanerl_core::agent::net::{greedy_action, load_checkpoint, NetConfig, QNetwork};
use lanerl_core::geometry::{
    build_reference_path, cartesian_to_frenet, frenet_to_cartesian, Point2, ReferencePath,
};
use lanerl_core::harness::evaluate;
use lanerl_core::ltl::{eval_formula, parse_formula, rule_penalty, Formula as CoreFormula};
use lanerl_core::reward::total_reward;
use lanerl_core::rng::stream_rng;
use lanerl_core::rulebook::{
    rulebook_reward, rulebook_from_toml, standard_rulebook, Rulebook as CoreRulebook,
};
use lanerl_core::trajectory::{
    generate_trajectory, solve_lateral_quintic, solve_longitudinal_quartic, FrenetPose,
    TerminalManifold,
};
use lanerl_core::world::env::{ActionMode, LaneWorldEnv, StepOutcome, WorldParams};
use lanerl_core::world::observe::{GRID_CHANNELS, GRID_SIZE};
use lanerl_core::world::scenario::{
    benchmark_scenario, generate_scenario, scenario_from_json, scenario_to_json,
    Scenario as CoreScenario, ScenarioKind,
};

/// One trace state: atom name → truth value, as Python dicts.
type Trace = Vec<BTreeMap<String, bool>>;

fn value_err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_kind(kind: &str) -> PyResult<ScenarioKind> {
    match kind {
        "normal" => Ok(ScenarioKind::Normal),
        "anomaly" => Ok(ScenarioKind::Anomaly),
        other => Err(PyValueError::new_err(format!(
            "unknown scenario kind {other:?} (expected \"normal\" or \"anomaly\")"
        ))),
    }
}

fn kind_str(kind: ScenarioKind) -> &'static str {
    match kind {
        ScenarioKind::Normal => "normal",
        ScenarioKind::Anomaly => "anomaly",
    }
}

// ---------------------------------------------------------------------------
// Temporal logic
// ---------------------------------------------------------------------------

/// A finite-trace temporal-logic formula over named boolean atoms.
///
/// Surface syntax: atoms `[a-z_][a-z0-9_]*`, `!`, `&`, `|`, `->`, and the
/// temporal operators `G` (always), `F` (eventually), `X` (next),
/// `U` (until), e.g. `"G(no_collision)"` or `"F(a & X b)"`.
#[pyclass(frozen)]
struct Formula {
    inner: CoreFormula,
}

#[pymethods]
impl Formula {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: parse_formula(text).map_err(value_err)?,
        })
    }

    /// Evaluate the formula on a trace (a list of `{atom: bool}` dicts)
    /// starting at `position`.
    #[pyo3(signature = (trace, position = 0))]
    fn evaluate(&self, trace: Trace, position: usize) -> PyResult<bool> {
        eval_formula(&self.inner, &trace, position).map_err(value_err)
    }

    /// Violation signal on the whole trace: -1.0 if violated, 0.0 if not.
    fn penalty(&self, trace: Trace) -> PyResult<f64> {
        rule_penalty(&self.inner, &trace).map_err(value_err)
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Formula({:?})", self.inner.to_string())
    }
}

// ---------------------------------------------------------------------------
// Rulebook
// ---------------------------------------------------------------------------

/// A prioritized hierarchy of temporal-logic rules with per-level damping
/// coefficients that take effect only while an exception situation holds.
#[pyclass]
struct Rulebook {
    inner: CoreRulebook,
}

#[pymethods]
impl Rulebook {
    /// The built-in two-level hierarchy: no_collision (level 1, scale 10,
    /// per step) above in_lane and no_out_road (level 2, scale 1, per meter
    /// traveled), with the lower level damped to 0.1 during exceptions.
    #[staticmethod]
    fn standard() -> Self {
        Self {
            inner: standard_rulebook(),
        }
    }

    /// Build a rulebook from its TOML description (the same format the
    /// trainer's `rulebook` config option points at).
    #[staticmethod]
    fn from_toml(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: rulebook_from_toml(text).map_err(value_err)?,
        })
    }

    /// The rules, highest priority first, as dicts.
    fn rules<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyList>> {
        let out = PyList::empty_bound(py);
        for rule in self.inner.rules() {
            let d = PyDict::new_bound(py);
            d.set_item("id", &rule.id)?;
            d.set_item("formula", rule.formula.to_string())?;
            d.set_item("level", rule.level)?;
            d.set_item("scale", rule.scale)?;
            d.set_item("per_length", rule.per_length)?;
            out.append(d)?;
        }
        Ok(out)
    }

    #[getter]
    fn max_level(&self) -> usize {
        self.inner.max_level()
    }

    /// Whether exception damping may ever engage. Strict ablations turn
    /// this off, pinning every coefficient at 1.
    #[getter]
    fn situation_aware(&self) -> bool {
        self.inner.situation_aware()
    }

    #[setter]
    fn set_situation_aware(&mut self, aware: bool) {
        self.inner.set_situation_aware(aware);
    }

    /// Whether the exception situation currently holds (set per step from
    /// the world state; writable here for direct experimentation).
    #[getter]
    fn active(&self) -> bool {
        self.inner.is_active()
    }

    #[setter]
    fn set_active(&mut self, active: bool) {
        self.inner.set_active(active);
    }

    /// Weighted rule reward of one trace. `weights` maps rule id → weight
    /// (e.g. meters traveled for per-length rules); omitted rules default to
    /// weight 1. Returns `{"total": float, "per_rule": {id: {...}}}`.
    #[pyo3(signature = (trace, weights = None))]
    fn reward<'py>(
        &self,
        py: Python<'py>,
        trace: Trace,
        weights: Option<BTreeMap<String, f64>>,
    ) -> PyResult<Bound<'py, PyDict>> {
        let mut merged: BTreeMap<String, f64> = self
            .inner
            .rules()
            .iter()
            .map(|r| (r.id.clone(), 1.0))
            .collect();
        merged.extend(weights.unwrap_or_default());
        let weights = merged;
        let reward = rulebook_reward(&self.inner, &trace, &weights).map_err(value_err)?;
        let out = PyDict::new_bound(py);
        out.set_item("total", reward.total)?;
        let per_rule = PyDict::new_bound(py);
        for (id, c) in &reward.per_rule {
            let entry = PyDict::new_bound(py);
            entry.set_item("penalty", c.penalty)?;
            entry.set_item("coefficient", c.coefficient)?;
            entry.set_item("contribution", c.contribution)?;
            per_rule.set_item(id, entry)?;
        }
        out.set_item("per_rule", per_rule)?;
        Ok(out)
    }

    fn __repr__(&self) -> String {
        format!(
            "Rulebook(rules={}, levels={}, situation_aware={}, active={})",
            self.inner.rules().len(),
            self.inner.max_level(),
            self.inner.situation_aware(),
            self.inner.is_active(),
        )
    }
}

// ---------------------------------------------------------------------------
// Geometry
// ---------------------------------------------------------------------------

/// An arc-length-parameterized reference path with exact Cartesian↔Frenet
/// conversions.
#[pyclass(frozen, name = "ReferencePath")]
struct PyReferencePath {
    inner: ReferencePath,
}

#[pymethods]
impl PyReferencePath {
    /// Build from waypoints (a list of `(x, y)` pairs, meters).
    #[new]
    fn new(waypoints: Vec<(f64, f64)>) -> PyResult<Self> {
        let points: Vec<Point2> = waypoints
            .into_iter()
            .map(|(x, y)| Point2::new(x, y))
            .collect();
        Ok(Self {
            inner: build_reference_path(&points).map_err(value_err)?,
        })
    }

    #[getter]
    fn total_length(&self) -> f64 {
        self.inner.total_length()
    }

    /// Project a Cartesian point onto the path: returns `(s, d)`.
    fn to_frenet(&self, x: f64, y: f64) -> PyResult<(f64, f64)> {
        cartesian_to_frenet(&self.inner, Point2::new(x, y)).map_err(value_err)
    }

    /// Map path coordinates back to Cartesian: returns `(x, y)`.
    fn to_cartesian(&self, s: f64, d: f64) -> PyResult<(f64, f64)> {
        let p = frenet_to_cartesian(&self.inner, s, d).map_err(value_err)?;
        Ok((p.x, p.y))
    }

    /// Path heading (radians) at arc length `s`.
    fn heading_at(&self, s: f64) -> f64 {
        self.inner.heading_at(s)
    }

    fn __repr__(&self) -> String {
        format!("ReferencePath(length={:.2} m)", self.inner.total_length())
    }
}

// ---------------------------------------------------------------------------
// Scenarios
// ---------------------------------------------------------------------------

/// One driving task: a route, lane geometry, an optional blocking obstacle,
/// and a goal along the route.
#[pyclass(frozen)]
struct Scenario {
    inner: CoreScenario,
}

#[pymethods]
impl Scenario {
    /// Scenario `index` of the reproducible benchmark set derived from
    /// `base_seed` (the shipped set uses base seed 42).
    #[staticmethod]
    #[pyo3(signature = (index, kind = "anomaly", base_seed = 42))]
    fn benchmark(index: u64, kind: &str, base_seed: u64) -> PyResult<Self> {
        Ok(Self {
            inner: benchmark_scenario(base_seed, parse_kind(kind)?, index),
        })
    }

    /// Generate a scenario directly from a raw seed.
    #[staticmethod]
    #[pyo3(signature = (seed, kind = "anomaly"))]
    fn generate(seed: u64, kind: &str) -> PyResult<Self> {
        Ok(Self {
            inner: generate_scenario(seed, parse_kind(kind)?),
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: scenario_from_json(text).map_err(value_err)?,
        })
    }

    /// The canonical JSON form (byte-stable for a given scenario).
    fn to_json(&self) -> String {
        scenario_to_json(&self.inner)
    }

    #[getter]
    fn id(&self) -> u64 {
        self.inner.id
    }

    #[getter]
    fn kind(&self) -> &'static str {
        kind_str(self.inner.kind)
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    #[getter]
    fn lane_width(&self) -> f64 {
        self.inner.lane_width
    }

    /// Goal as `(s_target, d_target)`.
    #[getter]
    fn goal(&self) -> (f64, f64) {
        (self.inner.goal.s_target, self.inner.goal.d_target)
    }

    /// The blocking obstacle as a dict, or None on normal scenarios.
    #[getter]
    fn obstacle<'py>(&self, py: Python<'py>) -> PyResult<Option<Bound<'py, PyDict>>> {
        match &self.inner.obstacle {
            None => Ok(None),
            Some(o) => {
                let d = PyDict::new_bound(py);
                d.set_item("s_center", o.s_center)?;
                d.set_item("length", o.length)?;
                d.set_item("width", o.width)?;
                d.set_item("s_front", o.s_front())?;
                d.set_item("s_rear", o.s_rear())?;
                Ok(Some(d))
            }
        }
    }

    #[getter]
    fn path(&self) -> PyReferencePath {
        PyReferencePath {
            inner: self.inner.path.clone(),
        }
    }

    fn __repr__(&self) -> String {
        format!(
            "Scenario(id={}, kind={:?}, goal_s={:.1})",
            self.inner.id,
            kind_str(self.inner.kind),
            self.inner.goal.s_target,
        )
    }
}

// ---------------------------------------------------------------------------
// Environment
// ---------------------------------------------------------------------------

fn state_dict<'py>(
    py: Python<'py>,
    state: &lanerl_core::world::vehicle::VehicleState,
) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new_bound(py);
    d.set_item("x", state.position.x)?;
    d.set_item("y", state.position.y)?;
    d.set_item("heading", state.heading)?;
    d.set_item("speed", state.speed)?;
    d.set_item("s", state.frenet.s)?;
    d.set_item("d", state.frenet.d)?;
    Ok(d)
}

/// The single-obstacle lane world, stepped one agent action at a time, with
/// rewards computed by the same rulebook machinery the trainer uses.
#[pyclass]
struct LaneWorld {
    env: LaneWorldEnv,
    rulebook: CoreRulebook,
    scenario: CoreScenario,
}

#[pymethods]
impl LaneWorld {
    /// Create a world for `scenario`.
    ///
    /// `mode` is `"trajectory"` (3 lateral-offset plans per step) or
    /// `"control"` (9 acceleration × heading-rate pairs, one tick each).
    /// `rulebook` defaults to the standard situation-aware hierarchy.
    #[new]
    #[pyo3(signature = (scenario, mode = "trajectory", rulebook = None))]
    fn new(scenario: &Scenario, mode: &str, rulebook: Option<&Rulebook>) -> PyResult<Self> {
        let mode = match mode {
            "trajectory" => ActionMode::Trajectory,
            "control" => ActionMode::Control,
            other => {
                return Err(PyValueError::new_err(format!(
                    "unknown action mode {other:?} (expected \"trajectory\" or \"control\")"
                )))
            }
        };
        let rulebook = rulebook.map_or_else(standard_rulebook, |r| r.inner.clone());
        let scenario = scenario.inner.clone();
        Ok(Self {
            env: LaneWorldEnv::new(WorldParams::default(), mode, scenario.clone()),
            rulebook,
            scenario,
        })
    }

    /// Restart the episode, optionally swapping in a different scenario.
    #[pyo3(signature = (scenario = None))]
    fn reset(&mut self, scenario: Option<&Scenario>) {
        if let Some(s) = scenario {
            self.scenario = s.inner.clone();
        }
        self.env.reset(self.scenario.clone());
    }

    /// Number of discrete actions in the current mode (3 or 9).
    #[getter]
    fn action_count(&self) -> usize {
        self.env.action_count()
    }

    /// `(channels, rows, cols)` of the observation grid.
    #[classattr]
    fn observation_shape() -> (usize, usize, usize) {
        (GRID_CHANNELS, GRID_SIZE, GRID_SIZE)
    }

    /// The ego-centric bird's-eye observation as a flat channel-major list
    /// of 0.0/1.0 floats (`channels × rows × cols` entries).
    fn observe(&self) -> Vec<f32> {
        self.env.observe().as_slice().to_vec()
    }

    /// The observation bit-packed to bytes (1536 per grid), LSB-first.
    fn observe_packed(&self) -> Vec<u8> {
        self.env.observe().pack()
    }

    /// Take one action. Returns a dict with the reward decomposition
    /// (`reward`, `r_ego`, `r_rulebook`, `components`), the terminal events
    /// (`collision`, `off_road`, `reached_s_target`, `reached_goal`), the
    /// post-step state, `traveled`, and `done`.
    fn step<'py>(&mut self, py: Python<'py>, action: usize) -> PyResult<Bound<'py, PyDict>> {
        let outcome: StepOutcome = self.env.step(action).map_err(|e| {
            use lanerl_core::world::env::EnvError;
            match e {
                EnvError::EpisodeOver => PyRuntimeError::new_err(e.to_string()),
                _ => PyValueError::new_err(e.to_string()),
            }
        })?;
        let breakdown = total_reward(
            &outcome,
            self.env.scenario(),
            &mut self.rulebook,
            self.env.params(),
        )
        .map_err(value_err)?;

        let out = PyDict::new_bound(py);
        out.set_item("reward", breakdown.r_total)?;
        out.set_item("r_ego", breakdown.r_ego)?;
        out.set_item("r_rulebook", breakdown.r_rulebook)?;
        let components = PyDict::new_bound(py);
        for (name, value) in &breakdown.components {
            components.set_item(name, value)?;
        }
        out.set_item("components", components)?;
        out.set_item("rulebook_active", self.rulebook.is_active())?;
        out.set_item("collision", outcome.events.collision)?;
        out.set_item("off_road", outcome.events.off_road)?;
        out.set_item("reached_s_target", outcome.events.reached_s_target)?;
        out.set_item("reached_goal", outcome.events.reached_both)?;
        out.set_item("traveled", outcome.traveled)?;
        out.set_item("done", outcome.done)?;
        out.set_item("state", state_dict(py, &outcome.state)?)?;
        Ok(out)
    }

    /// Current ego state as a dict (`x`, `y`, `heading`, `speed`, `s`, `d`).
    #[getter]
    fn state<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        state_dict(py, self.env.state())
    }

    #[getter]
    fn is_done(&self) -> bool {
        self.env.is_done()
    }

    #[getter]
    fn steps_taken(&self) -> usize {
        self.env.steps_taken()
    }

    /// Simulated seconds since the episode started.
    #[getter]
    fn elapsed(&self) -> f64 {
        self.env.elapsed()
    }

    /// The three terminal manifolds currently selectable in trajectory mode,
    /// as `{"v", "d", "t"}` dicts in action-index order.
    fn candidates<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyList>> {
        let out = PyList::empty_bound(py);
        for m in self.env.candidates() {
            let d = PyDict::new_bound(py);
            d.set_item("v", m.v)?;
            d.set_item("d", m.d)?;
            d.set_item("t", m.t)?;
            out.append(d)?;
        }
        Ok(out)
    }

    fn __repr__(&self) -> String {
        format!(
            "LaneWorld(scenario={}, actions={}, steps={}, done={})",
            self.scenario.id,
            self.env.action_count(),
            self.env.steps_taken(),
            self.env.is_done(),
        )
    }
}

// ---------------------------------------------------------------------------
// Trained policies
// ---------------------------------------------------------------------------

/// A Q-network policy: load a training checkpoint and act greedily.
#[pyclass(frozen)]
struct Policy {
    net: QNetwork<f32>,
    trained_steps: u64,
}

#[pymethods]
impl Policy {
    /// Load a `.ckpt` checkpoint written by the trainer.
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        let (net, trained_steps) = load_checkpoint(&path).map_err(|e| {
            use lanerl_core::agent::net::AgentError;
            match e {
                AgentError::Io { .. } => PyIOError::new_err(e.to_string()),
                _ => PyValueError::new_err(e.to_string()),
            }
        })?;
        Ok(Self { net, trained_steps })
    }

    /// A freshly initialized (untrained) policy with `outputs` actions,
    /// seeded deterministically — useful for exercising pipelines.
    #[staticmethod]
    #[pyo3(signature = (outputs, seed = 0))]
    fn init(outputs: usize, seed: u64) -> PyResult<Self> {
        if !(outputs == 3 || outputs == 9) {
            return Err(PyValueError::new_err(format!(
                "outputs must be 3 (trajectory mode) or 9 (control mode), got {outputs}"
            )));
        }
        let mut rng = stream_rng(seed, "net-init", 0);
        Ok(Self {
            net: QNetwork::<f32>::init(NetConfig::q_default(outputs), &mut rng),
            trained_steps: 0,
        })
    }

    /// Number of actions (3 = trajectory mode, 9 = control mode).
    #[getter]
    fn outputs(&self) -> usize {
        self.net.config().outputs
    }

    /// Environment steps the checkpoint had trained for when saved.
    #[getter]
    fn trained_steps(&self) -> u64 {
        self.trained_steps
    }

    /// Greedy action for a flat observation (as returned by
    /// `LaneWorld.observe()`).
    fn act(&self, obs: Vec<f32>) -> PyResult<usize> {
        self.check_obs(&obs)?;
        Ok(greedy_action(&self.net, &obs))
    }

    /// All action values for a flat observation.
    fn q_values(&self, obs: Vec<f32>) -> PyResult<Vec<f32>> {
        self.check_obs(&obs)?;
        Ok(self.net.forward(&obs))
    }

    /// Run the policy greedily over whole scenarios and summarize: returns
    /// `{"mean_arrived_distance", "mean_finished_score", "mean_return",
    /// "results": [{...} per scenario]}`. `situation_aware` controls the
    /// reward rulebook (it does not change the policy).
    #[pyo3(signature = (scenarios, situation_aware = true))]
    fn evaluate<'py>(
        &self,
        py: Python<'py>,
        scenarios: Vec<PyRef<'py, Scenario>>,
        situation_aware: bool,
    ) -> PyResult<Bound<'py, PyDict>> {
        let scenarios: Vec<CoreScenario> =
            scenarios.iter().map(|s| s.inner.clone()).collect();
        let mut rulebook = standard_rulebook();
        rulebook.set_situation_aware(situation_aware);
        let summary = evaluate(&self.net, &scenarios, &WorldParams::default(), &mut rulebook)
            .map_err(value_err)?;
        let out = PyDict::new_bound(py);
        out.set_item("mean_arrived_distance", summary.mean_arrived_distance)?;
        out.set_item("mean_finished_score", summary.mean_finished_score)?;
        out.set_item("mean_return", summary.mean_return)?;
        let results = PyList::empty_bound(py);
        for (id, r) in &summary.results {
            let d = PyDict::new_bound(py);
            d.set_item("scenario", id)?;
            d.set_item("arrived_distance", r.arrived_distance)?;
            d.set_item("finished_score", r.finished_score)?;
            d.set_item("steps", r.steps)?;
            d.set_item("return", r.return_sum)?;
            d.set_item("collided", r.collided)?;
            d.set_item("left_road", r.left_road)?;
            results.append(d)?;
        }
        out.set_item("results", results)?;
        Ok(out)
    }

    fn __repr__(&self) -> String {
        format!(
            "Policy(outputs={}, trained_steps={})",
            self.net.config().outputs,
            self.trained_steps,
        )
    }
}

impl Policy {
    fn check_obs(&self, obs: &[f32]) -> PyResult<()> {
        let expected = self.net.config().input_len();
        if obs.len() != expected {
            return Err(PyValueError::new_err(format!(
                "observation has {} values, expected {expected}",
                obs.len()
            )));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Trajectory helpers
// ---------------------------------------------------------------------------

/// Quintic lateral profile coefficients `[c0..c5]` for boundary conditions
/// `d(0)=d0, d'(0)=d0_dot, d''(0)=d0_ddot, d(T)=d_target, d'(T)=d''(T)=0`.
#[pyfunction]
#[pyo3(signature = (d0, d0_dot, d0_ddot, d_target, duration))]
fn lateral_quintic(
    d0: f64,
    d0_dot: f64,
    d0_ddot: f64,
    d_target: f64,
    duration: f64,
) -> PyResult<Vec<f64>> {
    Ok(solve_lateral_quintic(d0, d0_dot, d0_ddot, d_target, duration)
        .map_err(value_err)?
        .coefficients
        .to_vec())
}

/// Quartic longitudinal profile coefficients `[c0..c4]` for boundary
/// conditions `s(0)=s0, s'(0)=v0, s''(0)=a0, s'(T)=v_target, s''(T)=0`
/// (terminal position free).
#[pyfunction]
#[pyo3(signature = (s0, v0, a0, v_target, duration))]
fn longitudinal_quartic(
    s0: f64,
    v0: f64,
    a0: f64,
    v_target: f64,
    duration: f64,
) -> PyResult<Vec<f64>> {
    Ok(solve_longitudinal_quartic(s0, v0, a0, v_target, duration)
        .map_err(value_err)?
        .coefficients
        .to_vec())
}

/// Plan a polynomial trajectory along `path` from path coordinates
/// `(s, d)` at speed `v` toward lateral offset `d_target` (reaching speed
/// `v_target`) over `duration` seconds, sampled every `dt`. Returns one dict
/// per sample: `time`, `s`, `d`, `x`, `y`, `speed`.
#[pyfunction]
#[pyo3(signature = (path, s, d, v, d_target, v_target = 8.0, duration = 3.0, dt = 0.1))]
#[allow(clippy::too_many_arguments)]
fn plan_trajectory<'py>(
    py: Python<'py>,
    path: &PyReferencePath,
    s: f64,
    d: f64,
    v: f64,
    d_target: f64,
    v_target: f64,
    duration: f64,
    dt: f64,
) -> PyResult<Bound<'py, PyList>> {
    let pose = FrenetPose {
        s,
        d,
        s_dot: v,
        d_dot: 0.0,
        d_ddot: 0.0,
    };
    let manifold = TerminalManifold {
        v: v_target,
        d: d_target,
        t: duration,
    };
    let trajectory =
        generate_trajectory(&pose, &manifold, &path.inner, dt).map_err(value_err)?;
    let out = PyList::empty_bound(py);
    for sample in &trajectory.samples {
        let row = PyDict::new_bound(py);
        row.set_item("time", sample.time)?;
        row.set_item("s", sample.pose.s)?;
        row.set_item("d", sample.pose.d)?;
        row.set_item("x", sample.cartesian.x)?;
        row.set_item("y", sample.cartesian.y)?;
        row.set_item("speed", sample.speed)?;
        out.append(row)?;
    }
    Ok(out)
}

#[pymodule]
fn lanerl(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Formula>()?;
    m.add_class::<Rulebook>()?;
    m.add_class::<PyReferencePath>()?;
    m.add_class::<Scenario>()?;
    m.add_class::<LaneWorld>()?;
    m.add_class::<Policy>()?;
    m.add_function(wrap_pyfunction!(lateral_quintic, m)?)?;
    m.add_function(wrap_pyfunction!(longitudinal_quartic, m)?)?;
    m.add_function(wrap_pyfunction!(plan_trajectory, m)?)?;
    Ok(())
}
