//! Rule atoms: the per-state truth values the rule formulas are written over.
//!
//! Three atoms are produced for every simulated state: `no_collision` (the
//! ego rectangle does not intersect the obstacle rectangle), `in_lane`
//! (lateral offset within the ego lane), and `no_out_road` (lateral offset
//! within the two-lane road plus half a lane of shoulder). Collision checks
//! use oriented bounding boxes with the separating-axis test.

use crate::geometry::Point2;
use crate::ltl::TraceState;
use crate::world::scenario::Scenario;
use crate::world::vehicle::VehicleState;

/// An oriented rectangle: center, heading of the long axis, half-extents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Obb {
    pub center: Point2,
    pub heading: f64,
    pub half_length: f64,
    pub half_width: f64,
}

impl Obb {
    fn axes(&self) -> [Point2; 2] {
        let (sin, cos) = self.heading.sin_cos();
        [Point2::new(cos, sin), Point2::new(-sin, cos)]
    }

    /// Projection radius onto a unit axis.
    fn radius_along(&self, axis: Point2) -> f64 {
        let [long, lat] = self.axes();
        self.half_length * (axis.x * long.x + axis.y * long.y).abs()
            + self.half_width * (axis.x * lat.x + axis.y * lat.y).abs()
    }

    pub fn contains(&self, p: Point2) -> bool {
        let [long, lat] = self.axes();
        let dx = p.x - self.center.x;
        let dy = p.y - self.center.y;
        (dx * long.x + dy * long.y).abs() <= self.half_length
            && (dx * lat.x + dy * lat.y).abs() <= self.half_width
    }

    pub fn corners(&self) -> [Point2; 4] {
        let [long, lat] = self.axes();
        let l = self.half_length;
        let w = self.half_width;
        [(l, w), (l, -w), (-l, -w), (-l, w)].map(|(a, b)| {
            Point2::new(
                self.center.x + a * long.x + b * lat.x,
                self.center.y + a * long.y + b * lat.y,
            )
        })
    }
}

/// Separating-axis intersection test for two oriented rectangles. Touching
/// boundaries count as intersecting.
pub fn obbs_intersect(a: &Obb, b: &Obb) -> bool {
    let dx = b.center.x - a.center.x;
    let dy = b.center.y - a.center.y;
    for axis in a.axes().into_iter().chain(b.axes()) {
        let distance = (dx * axis.x + dy * axis.y).abs();
        if distance > a.radius_along(axis) + b.radius_along(axis) {
            return false;
        }
    }
    true
}

/// The ego footprint rectangle for a vehicle state.
pub fn ego_obb(state: &VehicleState, ego_length: f64, ego_width: f64) -> Obb {
    Obb {
        center: state.position,
        heading: state.heading,
        half_length: ego_length / 2.0,
        half_width: ego_width / 2.0,
    }
}

/// The obstacle rectangle, aligned with the path tangent at its center.
pub fn obstacle_obb(scenario: &Scenario) -> Option<Obb> {
    let o = scenario.obstacle?;
    let center = crate::geometry::frenet_to_cartesian(&scenario.path, o.s_center, 0.0)
        .expect("obstacle center lies on the path");
    Some(Obb {
        center,
        heading: scenario.path.heading_at(o.s_center),
        half_length: o.length / 2.0,
        half_width: o.width / 2.0,
    })
}

/// Truth assignment of the three standard atoms for one state.
pub fn eval_atoms(
    state: &VehicleState,
    scenario: &Scenario,
    ego_length: f64,
    ego_width: f64,
) -> TraceState {
    let no_collision = match obstacle_obb(scenario) {
        Some(obstacle) => !obbs_intersect(&ego_obb(state, ego_length, ego_width), &obstacle),
        None => true,
    };
    let d = state.frenet.d.abs();
    [
        ("no_collision".to_string(), no_collision),
        ("in_lane".to_string(), d <= scenario.lane_width / 2.0),
        ("no_out_road".to_string(), d <= 1.5 * scenario.lane_width),
    ]
    .into_iter()
    .collect()
}

/// Ground-truth situation awareness: the exception rulebook applies while an
/// obstacle center lies within `[-behind, ahead]` meters of the ego along
/// the path (ahead positive). Always false without an obstacle.
pub fn rulebook_active(state: &VehicleState, scenario: &Scenario, ahead: f64, behind: f64) -> bool {
    match scenario.obstacle {
        Some(o) => {
            let gap = o.s_center - state.frenet.s;
            (-behind..=ahead).contains(&gap)
        }
        None => false,
    }
}
