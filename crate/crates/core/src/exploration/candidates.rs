use alloc::vec::Vec;

use super::{ExplorationError, LocalVertexSet, ObstacleCluster};
use crate::geometry::{attraction_for_curvature, OrbitDirection, PathFunction, Point2, SplineCoeffs};
use crate::polygon::{point_segment_distance, segment_intersection, segment_segment_distance};
use crate::sim::RobotPose;

/// Boundary chord between known and unknown space.
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frontier {
    pub endpoints: (Point2, Point2),
    pub width: f64,
}

impl Frontier {
    pub fn new(p1: Point2, p2: Point2) -> Option<Self> {
        let width = p1.distance(p2);
        (width > 1e-9).then_some(Self { endpoints: (p1, p2), width })
    }

    pub fn midpoint(&self) -> Point2 {
        self.endpoints.0.lerp(self.endpoints.1, 0.5)
    }
}

/// Chords closing the visible region, right to left: from the right FOV
/// edge to the first cluster, between consecutive clusters, and from the
/// last cluster to the left FOV edge. Edges covered by a cluster are skipped.
pub fn frontiers(local: &LocalVertexSet) -> Vec<Frontier> {
    let mut out = Vec::new();
    let (Some(&right), Some(&left)) = (local.fov_vertices.first(), local.fov_vertices.last()) else {
        return out;
    };
    let mut cursor = Some(right);
    for (i, o) in local.obstacles.iter().enumerate() {
        if i == 0 && o.first_ray == 0 {
            cursor = None;
        }
        if let Some(c) = cursor {
            out.extend(Frontier::new(c, o.first));
        }
        cursor = Some(o.last);
    }
    let left_open = local
        .obstacles
        .last()
        .is_none_or(|o| o.last_ray + 1 < local.ray_count);
    if let (Some(c), true) = (cursor, left_open) {
        out.extend(Frontier::new(c, left));
    }
    out
}

/// Candidate generation knobs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CandidateConfig {
    /// Odd, at least 3.
    pub fan_size: usize,
    /// Half-width of the swept corridor.
    pub corridor_radius: f64,
    /// Polyline samples per candidate.
    pub samples: usize,
    /// Tolerance for a candidate ending on a chord.
    pub epsilon: f64,
    /// Fixed k_e for every candidate; by default it follows curvature.
    pub attraction_rate: Option<f64>,
}

impl Default for CandidateConfig {
    fn default() -> Self {
        Self { fan_size: 9, corridor_radius: 0.5, samples: 48, epsilon: 0.3, attraction_rate: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub path: PathFunction,
    /// Bearing of the terminal point relative to the heading.
    pub terminal_bearing: f64,
    pub terminal: Point2,
    /// World-frame samples of the zero set from the anchor to the terminal.
    pub polyline: Vec<Point2>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet {
    /// Ordered by terminal bearing, right to left.
    pub candidates: Vec<Candidate>,
    pub feasible_mask: Vec<bool>,
}

impl CandidateSet {
    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn any_feasible(&self) -> bool {
        self.feasible_mask.iter().any(|&f| f)
    }
}

/// First chord crossed by a polyline: (frontier index, segment index, segment parameter).
pub fn first_crossing(polyline: &[Point2], fronts: &[Frontier], epsilon: f64) -> Option<(usize, usize, f64)> {
    for (s, w) in polyline.windows(2).enumerate() {
        let mut best: Option<(usize, f64)> = None;
        for (fi, f) in fronts.iter().enumerate() {
            if let Some((t, _)) = segment_intersection(w[0], w[1], f.endpoints.0, f.endpoints.1) {
                if best.is_none_or(|(_, bt)| t < bt) {
                    best = Some((fi, t));
                }
            }
        }
        if let Some((fi, t)) = best {
            return Some((fi, s, t));
        }
    }
    // tolerate a terminal point resting on a chord
    let end = *polyline.last()?;
    let seg = polyline.len().saturating_sub(2);
    fronts
        .iter()
        .enumerate()
        .filter(|(_, f)| point_segment_distance(end, f.endpoints.0, f.endpoints.1) <= epsilon)
        .min_by(|a, b| {
            let da = point_segment_distance(end, a.1.endpoints.0, a.1.endpoints.1);
            let db = point_segment_distance(end, b.1.endpoints.0, b.1.endpoints.1);
            da.total_cmp(&db)
        })
        .map(|(fi, _)| (fi, seg, 1.0))
}

fn clearance(a: Point2, b: Point2, o: &ObstacleCluster) -> f64 {
    let v = o.vertices();
    if v.len() == 1 {
        return point_segment_distance(v[0], a, b);
    }
    v.windows(2)
        .map(|e| segment_segment_distance(a, b, e[0], e[1]))
        .fold(f64::INFINITY, f64::min)
}

/// Smallest distance from the polyline prefix ending at segment `seg`,
/// parameter `t`, to any obstacle cluster.
pub fn prefix_clearance(polyline: &[Point2], seg: usize, t: f64, obstacles: &[ObstacleCluster]) -> f64 {
    let mut d = f64::INFINITY;
    for (s, w) in polyline.windows(2).enumerate().take(seg + 1) {
        let b = if s == seg { w[0].lerp(w[1], t) } else { w[1] };
        for o in obstacles {
            d = d.min(clearance(w[0], b, o));
        }
    }
    d
}

/// Orbit direction for a candidate turning toward `terminal_bearing`.
pub fn direction_for(terminal_bearing: f64, curvature: f64) -> OrbitDirection {
    if terminal_bearing >= 0.0 || curvature.abs() < 0.05 {
        OrbitDirection::Counterclockwise
    } else {
        OrbitDirection::Clockwise
    }
}

/// Cubic through the origin tangent to the x-axis, ending at `(x, y)` with
/// slope `y / x`.
pub fn fan_coeffs(x: f64, y: f64) -> SplineCoeffs {
    SplineCoeffs::new(-y / (x * x * x) + 0.0, 2.0 * y / (x * x) + 0.0, 0.0, 0.0)
}

/// Fan of cubic candidates from `pose` ending on the FOV arc at evenly
/// spaced bearings, each leaving the anchor along `tangent_heading`. A
/// candidate is feasible when it reaches a frontier and its corridor up to
/// that crossing stays clear of every cluster.
pub fn generate_candidates(
    local: &LocalVertexSet,
    pose: &RobotPose,
    tangent_heading: f64,
    cfg: &CandidateConfig,
) -> Result<CandidateSet, ExplorationError> {
    let n = cfg.fan_size;
    if n < 3 || n.is_multiple_of(2) {
        return Err(ExplorationError::FanSize(n));
    }
    local.fov.validate()?;
    let h = local.fov.half_angle;
    let r = local.fov.max_range;
    let samples = cfg.samples.max(2);
    let fronts = frontiers(local);
    // offset of the tangent from the body heading; sub-nanoradian offsets
    // are treated as none so the straight candidate stays exactly straight
    let offset = crate::math::wrap_angle(tangent_heading - pose.heading);
    let (offset, tangent_heading) = if offset.abs() < 1e-9 { (0.0, pose.heading) } else { (offset, tangent_heading) };
    let mut candidates = Vec::with_capacity(n);
    let mut feasible_mask = Vec::with_capacity(n);
    for i in 0..n {
        let beta = h * (2.0 * i as f64 - (n - 1) as f64) / (n - 1) as f64;
        let (sb, cb) = crate::math::sin_cos(beta - offset);
        let (x, y) = (r * cb, r * sb);
        // terminals behind the tangent cannot be reached by a forward cubic
        let reachable = x > 0.25 * r;
        let coeffs = if reachable { fan_coeffs(x, y) } else { SplineCoeffs::ZERO };
        let curvature = 2.0 * coeffs.b;
        let dir = direction_for(crate::math::atan2(y, x), curvature);
        let k = cfg.attraction_rate.unwrap_or_else(|| attraction_for_curvature(curvature));
        let path = PathFunction::along_travel(pose.position, tangent_heading, coeffs, dir, k)
            .map_err(ExplorationError::Geometry)?;
        let forward = PathFunction::new(pose.position, tangent_heading, coeffs, OrbitDirection::Counterclockwise, k)
            .map_err(ExplorationError::Geometry)?;
        let polyline: Vec<Point2> =
            (0..=samples).map(|j| forward.point_at(x * j as f64 / samples as f64)).collect();
        let feasible = reachable
            && match first_crossing(&polyline, &fronts, cfg.epsilon) {
                Some((_, seg, t)) => prefix_clearance(&polyline, seg, t, &local.obstacles) >= cfg.corridor_radius,
                None => false,
            };
        let end = *polyline.last().expect("samples >= 2");
        candidates.push(Candidate { path, terminal_bearing: beta, terminal: end, polyline });
        feasible_mask.push(feasible);
    }
    Ok(CandidateSet { candidates, feasible_mask })
}
