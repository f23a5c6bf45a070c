//! Reference paths and the Cartesian ↔ Frenet transform pair.
//!
//! A reference path is a dense polyline (consecutive points ≤ 1 m apart).
//! Frenet coordinates are measured against it: `s` is arc length along the
//! polyline from its start, `d` is signed lateral offset, positive to the
//! LEFT of the direction of travel. The transform pair is exact (round-trip
//! error below 1e-6 m) for corridor points whose projection falls in a
//! segment interior; points in the sliver wedges at outside corners of a
//! curved polyline project to the joint itself and are documented edge cases.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Half-width of the valid lateral corridor around a path, in meters.
/// Transforms reject points farther from the path than this.
pub const CORRIDOR_HALF_WIDTH: f64 = 20.0;

/// Maximum segment length after densification, in meters.
const MAX_SEGMENT_LEN: f64 = 1.0;

/// A point in the 2D world plane, meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Errors from path construction and coordinate transforms.
#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("reference path needs at least 2 waypoints, got {0}")]
    TooFewWaypoints(usize),
    #[error("duplicate consecutive waypoint at index {0}")]
    DuplicateWaypoint(usize),
    #[error("point is {d:.3} m from the path, outside the ±{limit} m corridor")]
    OutsideCorridor { d: f64, limit: f64 },
    #[error("arc length {s:.3} outside path range [0, {len:.3}]")]
    ArcLengthOutOfRange { s: f64, len: f64 },
}

/// A dense polyline with precomputed cumulative arc length.
///
/// Built through [`build_reference_path`], which densifies long segments, so
/// consecutive waypoints are at most 1 m apart and `cumulative[i]` is the arc
/// length from the start to waypoint `i` (strictly increasing, starts at 0).
#[derive(Debug, Clone, PartialEq)]
pub struct ReferencePath {
    waypoints: Vec<Point2>,
    cumulative: Vec<f64>,
    total_length: f64,
}

impl ReferencePath {
    pub fn waypoints(&self) -> &[Point2] {
        &self.waypoints
    }

    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    pub fn total_length(&self) -> f64 {
        self.total_length
    }

    /// Index of the segment containing arc length `s`.
    ///
    /// Segment `i` spans `[cumulative[i], cumulative[i+1])`; the final segment
    /// is closed on the right so `s == total_length` is valid.
    fn segment_at(&self, s: f64) -> usize {
        let n_segments = self.waypoints.len() - 1;
        // partition_point returns the first index whose cumulative exceeds s.
        let idx = self.cumulative.partition_point(|&c| c <= s);
        idx.saturating_sub(1).min(n_segments - 1)
    }

    /// Unit tangent of the segment containing `s`.
    pub fn tangent_at(&self, s: f64) -> Point2 {
        let i = self.segment_at(s.clamp(0.0, self.total_length));
        let a = self.waypoints[i];
        let b = self.waypoints[i + 1];
        let len = a.distance(&b);
        Point2::new((b.x - a.x) / len, (b.y - a.y) / len)
    }

    /// Heading angle (radians, world frame) of the path at arc length `s`.
    pub fn heading_at(&self, s: f64) -> f64 {
        let t = self.tangent_at(s);
        t.y.atan2(t.x)
    }
}

// Serialize only the waypoints; cumulative lengths are derived data and are
// rebuilt on deserialization so files stay small and cannot go inconsistent.
impl Serialize for ReferencePath {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.waypoints.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ReferencePath {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let waypoints = Vec::<Point2>::deserialize(deserializer)?;
        build_reference_path(&waypoints).map_err(serde::de::Error::custom)
    }
}

/// Build a reference path from waypoints.
///
/// Validates that there are at least two points and no consecutive
/// duplicates, subdivides segments longer than 1 m into equal parts, and
/// precomputes cumulative arc length.
pub fn build_reference_path(waypoints: &[Point2]) -> Result<ReferencePath, GeometryError> {
    if waypoints.len() < 2 {
        return Err(GeometryError::TooFewWaypoints(waypoints.len()));
    }
    let mut dense = Vec::with_capacity(waypoints.len());
    dense.push(waypoints[0]);
    for (i, pair) in waypoints.windows(2).enumerate() {
        let (a, b) = (pair[0], pair[1]);
        let len = a.distance(&b);
        if len < 1e-9 {
            return Err(GeometryError::DuplicateWaypoint(i + 1));
        }
        let pieces = (len / MAX_SEGMENT_LEN).ceil() as usize;
        for k in 1..=pieces {
            let t = k as f64 / pieces as f64;
            dense.push(Point2::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)));
        }
    }
    let mut cumulative = Vec::with_capacity(dense.len());
    cumulative.push(0.0);
    let mut acc = 0.0;
    for pair in dense.windows(2) {
        acc += pair[0].distance(&pair[1]);
        cumulative.push(acc);
    }
    Ok(ReferencePath {
        waypoints: dense,
        cumulative,
        total_length: acc,
    })
}

/// Result of projecting a point onto one segment: squared distance, arc
/// length of the foot point, and the signed lateral offset.
struct Projection {
    dist2: f64,
    s: f64,
    d: f64,
}

fn project_onto_segment(path: &ReferencePath, i: usize, p: Point2) -> Projection {
    let a = path.waypoints[i];
    let b = path.waypoints[i + 1];
    let seg = Point2::new(b.x - a.x, b.y - a.y);
    let seg_len2 = seg.x * seg.x + seg.y * seg.y;
    let t = (((p.x - a.x) * seg.x + (p.y - a.y) * seg.y) / seg_len2).clamp(0.0, 1.0);
    let foot = Point2::new(a.x + t * seg.x, a.y + t * seg.y);
    let off = Point2::new(p.x - foot.x, p.y - foot.y);
    let dist2 = off.x * off.x + off.y * off.y;
    // Sign from the z-component of tangent × offset: positive = left of travel.
    let cross = seg.x * off.y - seg.y * off.x;
    let d = if cross >= 0.0 { dist2.sqrt() } else { -dist2.sqrt() };
    let seg_len = seg_len2.sqrt();
    Projection {
        dist2,
        s: path.cumulative[i] + t * seg_len,
        d,
    }
}

fn nearest_projection(
    path: &ReferencePath,
    p: Point2,
    segment_range: std::ops::Range<usize>,
) -> Projection {
    let mut best = project_onto_segment(path, segment_range.start, p);
    for i in segment_range.start + 1..segment_range.end {
        let proj = project_onto_segment(path, i, p);
        // Strict inequality keeps the smaller-s segment on exact ties, since
        // segments are scanned in increasing-s order.
        if proj.dist2 < best.dist2 {
            best = proj;
        }
    }
    best
}

/// Project a world point into Frenet coordinates `(s, d)`.
///
/// Scans every segment for the nearest foot point; exact ties between
/// segments resolve to the smaller `s`. Errors if the point lies outside the
/// ±20 m corridor.
pub fn cartesian_to_frenet(path: &ReferencePath, p: Point2) -> Result<(f64, f64), GeometryError> {
    let proj = nearest_projection(path, p, 0..path.waypoints.len() - 1);
    if proj.d.abs() > CORRIDOR_HALF_WIDTH {
        return Err(GeometryError::OutsideCorridor {
            d: proj.d,
            limit: CORRIDOR_HALF_WIDTH,
        });
    }
    Ok((proj.s, proj.d))
}

/// Like [`cartesian_to_frenet`] but only scans segments within `window`
/// meters of arc length `s_hint`. The simulator uses this on consecutive
/// vehicle states, which move well under a meter per tick, so the hinted
/// search returns the same answer as the full scan at a fraction of the cost.
pub(crate) fn cartesian_to_frenet_near(
    path: &ReferencePath,
    p: Point2,
    s_hint: f64,
    window: f64,
) -> Result<(f64, f64), GeometryError> {
    let lo = path.segment_at((s_hint - window).clamp(0.0, path.total_length));
    let hi = path.segment_at((s_hint + window).clamp(0.0, path.total_length)) + 1;
    let proj = nearest_projection(path, p, lo..hi);
    if proj.d.abs() > CORRIDOR_HALF_WIDTH {
        return Err(GeometryError::OutsideCorridor {
            d: proj.d,
            limit: CORRIDOR_HALF_WIDTH,
        });
    }
    Ok((proj.s, proj.d))
}

/// Hinted projection without the corridor bound: the raw `(s, d)` of the
/// nearest foot point among segments within `window` meters of `s_hint`.
/// The observation rasterizer projects grid cells that may sit tens of
/// meters off the path, where the corridor error of the public conversion
/// would be spurious; callers must treat large `|d|` as "far from the road".
pub(crate) fn project_near(path: &ReferencePath, p: Point2, s_hint: f64, window: f64) -> (f64, f64) {
    let lo = path.segment_at((s_hint - window).clamp(0.0, path.total_length));
    let hi = path.segment_at((s_hint + window).clamp(0.0, path.total_length)) + 1;
    let proj = nearest_projection(path, p, lo..hi);
    (proj.s, proj.d)
}

/// Map Frenet coordinates `(s, d)` back to the world plane.
///
/// `s` must lie within `[0, total_length]` and `|d|` within the corridor.
/// The lateral offset is applied along the left normal of the segment
/// containing `s`.
pub fn frenet_to_cartesian(path: &ReferencePath, s: f64, d: f64) -> Result<Point2, GeometryError> {
    if !(0.0..=path.total_length).contains(&s) {
        return Err(GeometryError::ArcLengthOutOfRange {
            s,
            len: path.total_length,
        });
    }
    if d.abs() > CORRIDOR_HALF_WIDTH {
        return Err(GeometryError::OutsideCorridor {
            d,
            limit: CORRIDOR_HALF_WIDTH,
        });
    }
    let i = path.segment_at(s);
    let a = path.waypoints[i];
    let b = path.waypoints[i + 1];
    let len = a.distance(&b);
    let tx = (b.x - a.x) / len;
    let ty = (b.y - a.y) / len;
    let along = s - path.cumulative[i];
    // Left normal of (tx, ty) is (-ty, tx).
    Ok(Point2::new(
        a.x + tx * along - ty * d,
        a.y + ty * along + tx * d,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn straight_80m() -> ReferencePath {
        build_reference_path(&[Point2::new(0.0, 0.0), Point2::new(80.0, 0.0)]).unwrap()
    }

    /// Quarter circle of radius 50 sampled every ~0.5 m of arc.
    fn quarter_circle_r50() -> ReferencePath {
        let r = 50.0;
        let n = 157; // ~0.5 m steps over 25π ≈ 78.5 m
        let pts: Vec<Point2> = (0..=n)
            .map(|i| {
                let ang = (i as f64 / n as f64) * std::f64::consts::FRAC_PI_2;
                Point2::new(r * ang.sin(), r * (1.0 - ang.cos()))
            })
            .collect();
        build_reference_path(&pts).unwrap()
    }

    #[test]
    fn straight_path_projects_identically() {
        let path = straight_80m();
        let (s, d) = cartesian_to_frenet(&path, Point2::new(12.5, -1.0)).unwrap();
        assert!((s - 12.5).abs() < 1e-12, "s = {s}");
        assert!((d + 1.0).abs() < 1e-12, "d = {d}");
        let p = frenet_to_cartesian(&path, 30.0, 2.0).unwrap();
        assert!((p.x - 30.0).abs() < 1e-12 && (p.y - 2.0).abs() < 1e-12);
    }

    #[test]
    fn positive_d_is_left_of_travel() {
        // Travel along +x: left is +y. Travel along +y: left is -x.
        let east = straight_80m();
        let (_, d) = cartesian_to_frenet(&east, Point2::new(10.0, 3.0)).unwrap();
        assert!(d > 0.0);
        let north =
            build_reference_path(&[Point2::new(0.0, 0.0), Point2::new(0.0, 40.0)]).unwrap();
        let (_, d) = cartesian_to_frenet(&north, Point2::new(-2.0, 10.0)).unwrap();
        assert!((d - 2.0).abs() < 1e-12);
    }

    #[test]
    fn mirrored_points_negate_d() {
        let path = straight_80m();
        let mut rng = crate::rng::stream_rng(7, "geometry-mirror", 0);
        for _ in 0..200 {
            let x = rng.gen_range(0.0..80.0);
            let y = rng.gen_range(0.0..CORRIDOR_HALF_WIDTH);
            let (s1, d1) = cartesian_to_frenet(&path, Point2::new(x, y)).unwrap();
            let (s2, d2) = cartesian_to_frenet(&path, Point2::new(x, -y)).unwrap();
            assert_eq!(s1, s2);
            assert_eq!(d1, -d2);
        }
    }

    #[test]
    fn projection_is_monotone_along_straight_path() {
        let path = straight_80m();
        let mut rng = crate::rng::stream_rng(7, "geometry-monotone", 0);
        let mut xs: Vec<f64> = (0..64).map(|_| rng.gen_range(0.0..80.0)).collect();
        xs.sort_by(f64::total_cmp);
        let mut prev = -1.0;
        for x in xs {
            let (s, _) = cartesian_to_frenet(&path, Point2::new(x, 1.3)).unwrap();
            assert!(s >= prev, "projection went backwards at x = {x}");
            prev = s;
        }
    }

    #[test]
    fn round_trip_on_quarter_circle() {
        let path = quarter_circle_r50();
        let mut rng = crate::rng::stream_rng(7, "geometry-roundtrip", 0);
        for _ in 0..200 {
            let s = rng.gen_range(0.0..path.total_length());
            let d = rng.gen_range(-CORRIDOR_HALF_WIDTH * 0.99..CORRIDOR_HALF_WIDTH * 0.99);
            let p = frenet_to_cartesian(&path, s, d).unwrap();
            let (s2, d2) = cartesian_to_frenet(&path, p).unwrap();
            let p2 = frenet_to_cartesian(&path, s2, d2).unwrap();
            assert!(
                p.distance(&p2) < 1e-6,
                "round trip error {} at s={s} d={d}",
                p.distance(&p2)
            );
        }
    }

    #[test]
    fn hinted_projection_matches_full_scan() {
        let path = quarter_circle_r50();
        let mut rng = crate::rng::stream_rng(7, "geometry-hint", 0);
        for _ in 0..200 {
            let s = rng.gen_range(0.0..path.total_length());
            let d = rng.gen_range(-6.0..6.0);
            let p = frenet_to_cartesian(&path, s, d).unwrap();
            let full = cartesian_to_frenet(&path, p).unwrap();
            let hinted = cartesian_to_frenet_near(&path, p, s + 0.9, 15.0).unwrap();
            assert_eq!(full, hinted);
        }
    }

    #[test]
    fn equidistant_corner_point_takes_smaller_s() {
        // Right-angle corner at (10, 0); the probe point on the outside
        // bisector is equidistant from both segments' clamped feet.
        let path = build_reference_path(&[
            Point2::new(0.0, 0.0),
            Point2::new(10.0, 0.0),
            Point2::new(10.0, 10.0),
        ])
        .unwrap();
        let (s, d) = cartesian_to_frenet(&path, Point2::new(11.0, -1.0)).unwrap();
        assert!((s - 10.0).abs() < 1e-12, "tie should land at s=10, got {s}");
        assert!(d < 0.0, "outside corner point is right of travel");
    }

    #[test]
    fn densification_keeps_segments_short_and_length_exact() {
        let path = straight_80m();
        assert_eq!(path.waypoints().len(), 81);
        for pair in path.waypoints().windows(2) {
            assert!(pair[0].distance(&pair[1]) <= MAX_SEGMENT_LEN + 1e-12);
        }
        assert!((path.total_length() - 80.0).abs() < 1e-9);
        let quarter = quarter_circle_r50();
        // Chord total is a hair under the true arc length of 25π.
        assert!((quarter.total_length() - 25.0 * std::f64::consts::PI).abs() < 0.01);
    }

    #[test]
    fn construction_errors() {
        assert_eq!(
            build_reference_path(&[Point2::new(0.0, 0.0)]),
            Err(GeometryError::TooFewWaypoints(1))
        );
        assert_eq!(
            build_reference_path(&[
                Point2::new(0.0, 0.0),
                Point2::new(0.0, 0.0),
                Point2::new(5.0, 0.0)
            ]),
            Err(GeometryError::DuplicateWaypoint(1))
        );
    }

    #[test]
    fn transform_errors() {
        let path = straight_80m();
        assert!(matches!(
            cartesian_to_frenet(&path, Point2::new(10.0, 25.0)),
            Err(GeometryError::OutsideCorridor { .. })
        ));
        assert!(matches!(
            frenet_to_cartesian(&path, 81.0, 0.0),
            Err(GeometryError::ArcLengthOutOfRange { .. })
        ));
        assert!(matches!(
            frenet_to_cartesian(&path, -0.1, 0.0),
            Err(GeometryError::ArcLengthOutOfRange { .. })
        ));
        assert!(matches!(
            frenet_to_cartesian(&path, 10.0, 21.0),
            Err(GeometryError::OutsideCorridor { .. })
        ));
    }

    #[test]
    fn serde_round_trip_rebuilds_identical_path() {
        let path = quarter_circle_r50();
        let json = serde_json::to_string(&path).unwrap();
        let back: ReferencePath = serde_json::from_str(&json).unwrap();
        assert_eq!(path, back);
    }

    #[test]
    fn heading_follows_the_curve() {
        let path = quarter_circle_r50();
        assert!(path.heading_at(0.0).abs() < 0.02);
        let end = path.heading_at(path.total_length());
        assert!((end - std::f64::consts::FRAC_PI_2).abs() < 0.02);
    }
}
