//! Polynomial trajectory generation in Frenet coordinates.
//!
//! Lateral motion is a quintic in time pinned at both ends (position,
//! velocity, acceleration), longitudinal motion a quartic that reaches a
//! target cruise speed with zero terminal acceleration while leaving the
//! terminal position free — the classic velocity-keeping pair. An action is
//! the choice of one terminal manifold (target speed, lateral offset,
//! duration); the dynamic candidate set offers exactly three lateral
//! targets ordered by the vehicle's current regime.

use crate::geometry::{self, GeometryError, Point2, ReferencePath};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Kinematic state in path coordinates: arc length `s`, lateral offset `d`,
/// longitudinal speed `s_dot`, and the first two time derivatives of `d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrenetPose {
    pub s: f64,
    pub d: f64,
    pub s_dot: f64,
    pub d_dot: f64,
    pub d_ddot: f64,
}

/// Terminal manifold of a trajectory: reach speed `v` and lateral offset `d`
/// after `t` seconds (terminal lateral velocity/acceleration are zero, the
/// terminal longitudinal position is free).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TerminalManifold {
    pub v: f64,
    pub d: f64,
    pub t: f64,
}

#[derive(Debug, Error)]
pub enum TrajectoryError {
    #[error("manifold duration must be positive and finite, got {0}")]
    BadDuration(f64),
    #[error("trajectory left the path corridor: {0}")]
    Geometry(#[from] GeometryError),
}

/// Quintic polynomial `c0 + c1 t + ... + c5 t^5`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuinticPolynomial {
    pub coefficients: [f64; 6],
}

impl QuinticPolynomial {
    pub fn value(&self, t: f64) -> f64 {
        // Horner evaluation.
        self.coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * t + c)
    }

    pub fn first_derivative(&self, t: f64) -> f64 {
        let c = &self.coefficients;
        c[1] + t * (2.0 * c[2] + t * (3.0 * c[3] + t * (4.0 * c[4] + t * 5.0 * c[5])))
    }

    pub fn second_derivative(&self, t: f64) -> f64 {
        let c = &self.coefficients;
        2.0 * c[2] + t * (6.0 * c[3] + t * (12.0 * c[4] + t * 20.0 * c[5]))
    }
}

/// Quartic polynomial `c0 + c1 t + ... + c4 t^4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuarticPolynomial {
    pub coefficients: [f64; 5],
}

impl QuarticPolynomial {
    pub fn value(&self, t: f64) -> f64 {
        self.coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * t + c)
    }

    pub fn first_derivative(&self, t: f64) -> f64 {
        let c = &self.coefficients;
        c[1] + t * (2.0 * c[2] + t * (3.0 * c[3] + t * 4.0 * c[4]))
    }

    pub fn second_derivative(&self, t: f64) -> f64 {
        let c = &self.coefficients;
        2.0 * c[2] + t * (6.0 * c[3] + t * 12.0 * c[4])
    }
}

/// Solve the lateral quintic with boundary conditions
/// `p(0)=d0, p'(0)=d0_dot, p''(0)=d0_ddot, p(T)=d_t, p'(T)=0, p''(T)=0`.
pub fn solve_lateral_quintic(
    d0: f64,
    d0_dot: f64,
    d0_ddot: f64,
    d_t: f64,
    t_total: f64,
) -> Result<QuinticPolynomial, TrajectoryError> {
    if !(t_total.is_finite() && t_total > 0.0) {
        return Err(TrajectoryError::BadDuration(t_total));
    }
    let (c0, c1, c2) = (d0, d0_dot, d0_ddot / 2.0);
    let t = t_total;
    let (t2, t3, t4, t5) = (t * t, t * t * t, t * t * t * t, t * t * t * t * t);
    // Remaining conditions as a 3x3 system in (c3, c4, c5):
    //   [ t^3   t^4    t^5  ] [c3]   [ d_t - (c0 + c1 t + c2 t^2) ]
    //   [ 3t^2  4t^3   5t^4 ] [c4] = [    - (c1 + 2 c2 t)         ]
    //   [ 6t    12t^2  20t^3] [c5]   [    - 2 c2                  ]
    let r0 = d_t - (c0 + c1 * t + c2 * t2);
    let r1 = -(c1 + 2.0 * c2 * t);
    let r2 = -2.0 * c2;
    // Closed-form inverse of the boundary matrix (standard result).
    let c3 = (20.0 * r0 - 8.0 * r1 * t + r2 * t2) / (2.0 * t3);
    let c4 = (-30.0 * r0 + 14.0 * r1 * t - 2.0 * r2 * t2) / (2.0 * t4);
    let c5 = (12.0 * r0 - 6.0 * r1 * t + r2 * t2) / (2.0 * t5);
    Ok(QuinticPolynomial {
        coefficients: [c0, c1, c2, c3, c4, c5],
    })
}

/// Solve the longitudinal quartic with boundary conditions
/// `p(0)=s0, p'(0)=s0_dot, p''(0)=s0_ddot, p'(T)=v_t, p''(T)=0`
/// (terminal position free).
pub fn solve_longitudinal_quartic(
    s0: f64,
    s0_dot: f64,
    s0_ddot: f64,
    v_t: f64,
    t_total: f64,
) -> Result<QuarticPolynomial, TrajectoryError> {
    if !(t_total.is_finite() && t_total > 0.0) {
        return Err(TrajectoryError::BadDuration(t_total));
    }
    let (c0, c1, c2) = (s0, s0_dot, s0_ddot / 2.0);
    let t = t_total;
    let t2 = t * t;
    // Remaining conditions as a 2x2 system in (c3, c4):
    //   [ 3t^2  4t^3 ] [c3]   [ v_t - (c1 + 2 c2 t) ]
    //   [ 6t   12t^2 ] [c4] = [   - 2 c2            ]
    let r0 = v_t - (c1 + 2.0 * c2 * t);
    let r1 = -2.0 * c2;
    let c3 = (3.0 * r0 - r1 * t) / (3.0 * t2);
    let c4 = (r1 * t - 2.0 * r0) / (4.0 * t2 * t);
    Ok(QuarticPolynomial {
        coefficients: [c0, c1, c2, c3, c4],
    })
}

/// The dynamic discrete action set: three lateral targets whose order
/// depends on the current regime.
///
/// Left of the lane-center/overtake midpoint (`current_d < lane_width/2`) the
/// targets are `{0, w/2, w}` — keep lane, straddle, move to the oncoming
/// lane. At or beyond the midpoint they flip to `{w, w/2, 0}` — keep the
/// oncoming lane, straddle, return. Action indices always mean
/// "hold regime's primary lane, straddle, cross to the other lane" in order.
pub fn candidate_manifolds(
    current_d: f64,
    lane_width: f64,
    v_const: f64,
    t_const: f64,
) -> [TerminalManifold; 3] {
    let offsets = if current_d < lane_width / 2.0 {
        [0.0, lane_width / 2.0, lane_width]
    } else {
        [lane_width, lane_width / 2.0, 0.0]
    };
    offsets.map(|d| TerminalManifold {
        v: v_const,
        d,
        t: t_const,
    })
}

/// One sampling point along a generated trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    /// Seconds since the trajectory's start.
    pub time: f64,
    pub pose: FrenetPose,
    pub cartesian: Point2,
    /// Planar speed magnitude in m/s.
    pub speed: f64,
}

/// A time-sampled polynomial trajectory toward one terminal manifold.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub manifold: TerminalManifold,
    pub samples: Vec<TrajectorySample>,
    /// Fixed spacing between consecutive sample times, seconds.
    pub sample_step: f64,
}

impl Trajectory {
    pub fn duration(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.time)
    }

    /// Sample nearest to `time`, clamped to the trajectory's span.
    pub fn sample_at(&self, time: f64) -> &TrajectorySample {
        let idx = (time / self.sample_step).round() as usize;
        &self.samples[idx.min(self.samples.len() - 1)]
    }
}

/// Generate the trajectory from `current` toward `manifold`, sampled every
/// `dt` seconds, with Frenet samples converted to Cartesian against `path`.
///
/// The longitudinal solution starts from zero longitudinal acceleration
/// (replanning resets it). Arc length is clamped to the end of the path and
/// sampling stops there — the episode goal lies before the path end, so a
/// clamped tail is never tracked in practice. The first sample reproduces
/// `current` exactly.
pub fn generate_trajectory(
    current: &FrenetPose,
    manifold: &TerminalManifold,
    path: &ReferencePath,
    dt: f64,
) -> Result<Trajectory, TrajectoryError> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(TrajectoryError::BadDuration(dt));
    }
    let lateral = solve_lateral_quintic(
        current.d,
        current.d_dot,
        current.d_ddot,
        manifold.d,
        manifold.t,
    )?;
    let longitudinal =
        solve_longitudinal_quartic(current.s, current.s_dot, 0.0, manifold.v, manifold.t)?;

    let steps = (manifold.t / dt).round().max(1.0) as usize;
    let step = manifold.t / steps as f64;
    let mut samples = Vec::with_capacity(steps + 1);
    for i in 0..=steps {
        let time = step * i as f64;
        let mut s = longitudinal.value(time);
        let mut s_dot = longitudinal.first_derivative(time);
        let clamped = s >= path.total_length();
        if clamped {
            s = path.total_length();
            s_dot = 0.0;
        }
        let d = lateral.value(time);
        let d_dot = lateral.first_derivative(time);
        let d_ddot = lateral.second_derivative(time);
        let cartesian = geometry::frenet_to_cartesian(path, s, d)?;
        samples.push(TrajectorySample {
            time,
            pose: FrenetPose {
                s,
                d,
                s_dot,
                d_dot,
                d_ddot,
            },
            cartesian,
            speed: s_dot.hypot(d_dot),
        });
        if clamped {
            break;
        }
    }
    Ok(Trajectory {
        manifold: *manifold,
        samples,
        sample_step: step,
    })
}
