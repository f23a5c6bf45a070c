//! Rasterized bird's-eye observations.
//!
//! The agent perceives the world as a 3-channel 64×64 occupancy grid with
//! half-meter cells, anchored near the ego vehicle and rotated so the ego
//! heading points up: 24 m of view ahead, 7.5 m behind, 16 m to each side.
//!
//! * channel 0 — road surface (own lane plus the passing lane to the left),
//! * channel 1 — obstacle footprint,
//! * channel 2 — ego footprint plus the most recently executed trajectory.
//!
//! Cells are strictly binary, which lets replayed observations be stored
//! bit-packed at 1536 bytes apiece.

use crate::geometry::{project_near, Point2};
use crate::trajectory::Trajectory;
use crate::world::atoms::{ego_obb, obstacle_obb};
use crate::world::scenario::Scenario;
use crate::world::vehicle::VehicleState;

/// Grid side length in cells.
pub const GRID_SIZE: usize = 64;
/// Number of channels.
pub const GRID_CHANNELS: usize = 3;
/// Cell edge length in meters.
pub const CELL_METERS: f64 = 0.5;
/// Ego anchor cell (row counts down from the top of the view).
pub const EGO_ROW: usize = 48;
/// Ego anchor cell column.
pub const EGO_COL: usize = 32;

/// Bytes in a bit-packed grid.
pub const PACKED_BYTES: usize = GRID_CHANNELS * GRID_SIZE * GRID_SIZE / 8;

/// Arc-length half-window for hinted path projections of neighboring cells.
const HINT_WINDOW: f64 = 3.0;
/// Spacing of trajectory splat points along the plan polyline.
const PLAN_STEP: f64 = 0.25;

/// A channel-major (`[channel][row][col]`) float grid with binary contents.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationGrid {
    cells: Vec<f32>,
}

impl ObservationGrid {
    pub fn zeros() -> Self {
        Self {
            cells: vec![0.0; GRID_CHANNELS * GRID_SIZE * GRID_SIZE],
        }
    }

    fn index(channel: usize, row: usize, col: usize) -> usize {
        debug_assert!(channel < GRID_CHANNELS && row < GRID_SIZE && col < GRID_SIZE);
        (channel * GRID_SIZE + row) * GRID_SIZE + col
    }

    pub fn get(&self, channel: usize, row: usize, col: usize) -> f32 {
        self.cells[Self::index(channel, row, col)]
    }

    pub fn set(&mut self, channel: usize, row: usize, col: usize, value: f32) {
        self.cells[Self::index(channel, row, col)] = value;
    }

    /// The flat channel-major cell buffer (network input layout).
    pub fn as_slice(&self) -> &[f32] {
        &self.cells
    }

    /// Bit-pack the grid, one bit per cell, least-significant bit first.
    /// Cells count as set when above one half.
    pub fn pack(&self) -> Vec<u8> {
        let mut bytes = vec![0u8; PACKED_BYTES];
        for (i, &v) in self.cells.iter().enumerate() {
            if v > 0.5 {
                bytes[i / 8] |= 1 << (i % 8);
            }
        }
        bytes
    }

    /// Inverse of [`pack`](Self::pack) for binary grids.
    pub fn unpack(bytes: &[u8]) -> Self {
        assert_eq!(bytes.len(), PACKED_BYTES, "packed grid must be {PACKED_BYTES} bytes");
        let mut grid = Self::zeros();
        for (i, cell) in grid.cells.iter_mut().enumerate() {
            if bytes[i / 8] & (1 << (i % 8)) != 0 {
                *cell = 1.0;
            }
        }
        grid
    }
}

/// Render the ego-centric observation for one state.
///
/// `executed` is the trajectory the controller most recently tracked (drawn
/// into channel 2 alongside the ego footprint); pass `None` at episode start
/// or when the agent issues raw controls rather than trajectories.
pub fn render_observation(
    state: &VehicleState,
    scenario: &Scenario,
    executed: Option<&Trajectory>,
    ego_length: f64,
    ego_width: f64,
) -> ObservationGrid {
    let mut grid = ObservationGrid::zeros();
    let (sin_h, cos_h) = state.heading.sin_cos();
    let ego = ego_obb(state, ego_length, ego_width);
    let obstacle = obstacle_obb(scenario);
    // Road band in lateral offset: own lane plus the passing lane on the left.
    let road = -scenario.lane_width / 2.0..1.5 * scenario.lane_width;

    // Hinted projection: each cell seeds from its left neighbor, each row's
    // first cell from the row above, and the top-left corner from a full
    // search. Adjacent cell foot points move by far less than the window.
    let mut row_hint = None;
    for row in 0..GRID_SIZE {
        let mut hint = row_hint;
        for col in 0..GRID_SIZE {
            let forward = (EGO_ROW as f64 - row as f64) * CELL_METERS;
            let right = (col as f64 - EGO_COL as f64) * CELL_METERS;
            let p = Point2::new(
                state.position.x + forward * cos_h + right * sin_h,
                state.position.y + forward * sin_h - right * cos_h,
            );
            let (s, d) = match hint {
                Some(s_hint) => project_near(&scenario.path, p, s_hint, HINT_WINDOW),
                None => project_near(&scenario.path, p, 0.0, scenario.path.total_length()),
            };
            hint = Some(s);
            if col == 0 {
                row_hint = Some(s);
            }
            if road.contains(&d) {
                grid.set(0, row, col, 1.0);
            }
            if obstacle.map_or(false, |o| o.contains(p)) {
                grid.set(1, row, col, 1.0);
            }
            if ego.contains(p) {
                grid.set(2, row, col, 1.0);
            }
        }
    }

    if let Some(trajectory) = executed {
        splat_polyline(&mut grid, state, sin_h, cos_h, trajectory);
    }
    grid
}

/// Draw the trajectory's Cartesian polyline into channel 2, marking the cell
/// under points spaced every quarter meter along each sample-to-sample leg.
fn splat_polyline(
    grid: &mut ObservationGrid,
    state: &VehicleState,
    sin_h: f64,
    cos_h: f64,
    trajectory: &Trajectory,
) {
    let mut mark = |p: Point2| {
        let dx = p.x - state.position.x;
        let dy = p.y - state.position.y;
        let forward = dx * cos_h + dy * sin_h;
        let right = dx * sin_h - dy * cos_h;
        let row = EGO_ROW as f64 - (forward / CELL_METERS).round();
        let col = EGO_COL as f64 + (right / CELL_METERS).round();
        if (0.0..GRID_SIZE as f64).contains(&row) && (0.0..GRID_SIZE as f64).contains(&col) {
            grid.set(2, row as usize, col as usize, 1.0);
        }
    };
    let samples = &trajectory.samples;
    if let Some(first) = samples.first() {
        mark(first.cartesian);
    }
    for pair in samples.windows(2) {
        let (a, b) = (pair[0].cartesian, pair[1].cartesian);
        let length = a.distance(&b);
        let steps = (length / PLAN_STEP).ceil().max(1.0) as usize;
        for k in 1..=steps {
            let t = k as f64 / steps as f64;
            mark(Point2::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)));
        }
    }
}
