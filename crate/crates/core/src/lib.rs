//! Lane-world driving at desk scale: a 2D simulator with anomaly scenarios,
//! Frenet-frame trajectory actions, finite-trace temporal-logic traffic rules
//! organized in a prioritized hierarchy, and a deterministic DQN training
//! harness that learns when breaking a low-priority rule is the right call.
//!
//! The crate is organized bottom-up:
//!
//! * [`geometry`] — reference paths (dense polylines) and the Cartesian/Frenet
//!   coordinate transform pair everything else is built on.
//! * [`trajectory`] — quintic/quartic polynomial trajectory generation toward
//!   a small discrete set of terminal manifolds (lateral offset targets).
//! * [`ltl`] — finite-trace linear temporal logic: parser, evaluator, and the
//!   per-rule penalty signal.
//! * [`rulebook`] — prioritized rule hierarchies with per-level coefficients
//!   and situation-aware activation.
//! * [`world`] — scenario generation, kinematic bicycle vehicle, PID tracking,
//!   rule atoms, bird's-eye-view observations, and the episode environment.
//! * [`reward`] — ego progress/speed reward combined with the rulebook term.
//! * [`agent`] — a small convolutional Q-network with experience replay and a
//!   target network, dependency-free with bit-reproducible arithmetic.
//! * [`harness`] — curriculum training loop, ablation wiring, evaluation, and
//!   metrics/plot-data export.
//! * [`config`] + [`cli`] — run configuration and the command-line interface.
//!
//! Everything is deterministic given a master seed: scenario generation,
//! training, and evaluation reproduce byte-identical outputs run-to-run.

pub mod agent;
pub mod cli;
pub mod config;
pub mod geometry;
pub mod harness;
pub mod ltl;
pub mod reward;
pub mod rng;
pub mod rulebook;
pub mod trajectory;
pub mod world;
