use alloc::vec::Vec;
use core::ops::Range;

use super::{ExplorationError, PointCloud};
use crate::geometry::Point2;
use crate::sim::RobotPose;

/// Sensor field of view.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FovConfig {
    pub half_angle: f64,
    pub max_range: f64,
    /// Chords used to polygonize the range arc.
    pub arc_chords: usize,
}

impl Default for FovConfig {
    fn default() -> Self {
        Self { half_angle: 43.5_f64.to_radians(), max_range: 6.0, arc_chords: 16 }
    }
}

impl FovConfig {
    pub fn validate(&self) -> Result<(), ExplorationError> {
        let h = self.half_angle;
        if !(h > 0.0 && h < core::f64::consts::FRAC_PI_2 + 1e-12) {
            return Err(ExplorationError::InvalidFov("half angle must lie in (0, pi/2]"));
        }
        if !(self.max_range.is_finite() && self.max_range > 0.0) {
            return Err(ExplorationError::InvalidFov("max range must be > 0"));
        }
        if self.arc_chords == 0 {
            return Err(ExplorationError::InvalidFov("arc chords must be >= 1"));
        }
        Ok(())
    }
}

/// A chain of hits reduced to its extreme points, in world coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ObstacleCluster {
    pub first_ray: usize,
    pub last_ray: usize,
    pub first: Point2,
    pub last: Point2,
    pub nearest: Point2,
    pub farthest: Point2,
    vertices: Vec<Point2>,
}

impl ObstacleCluster {
    /// Reduced vertices in sweep order, duplicates removed.
    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    /// The points compared by the scene-change test.
    pub fn landmarks(&self) -> [Point2; 4] {
        [self.first, self.last, self.nearest, self.farthest]
    }
}

/// The sensed scene at one stamp: FOV limits plus obstacle clusters.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalVertexSet {
    pub origin: Point2,
    pub heading: f64,
    pub fov: FovConfig,
    /// Arc points from the right FOV edge to the left one.
    pub fov_vertices: Vec<Point2>,
    pub obstacles: Vec<ObstacleCluster>,
    pub ray_count: usize,
    pub stamp: f64,
}

/// Splits the hits of `cloud` into maximal chains of consecutive rays whose
/// successive gaps are at most `epsilon`. Free returns break a chain.
pub fn cluster_partition(cloud: &PointCloud, epsilon: f64) -> Result<Vec<Range<usize>>, ExplorationError> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(ExplorationError::Epsilon(epsilon));
    }
    let rs = cloud.returns();
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for i in 0..rs.len() {
        if rs[i].free {
            if let Some(s) = start.take() {
                out.push(s..i);
            }
            continue;
        }
        match start {
            None => start = Some(i),
            Some(s) => {
                if rs[i - 1].local().distance(rs[i].local()) > epsilon {
                    out.push(s..i);
                    start = Some(i);
                }
            }
        }
    }
    if let Some(s) = start {
        out.push(s..rs.len());
    }
    Ok(out)
}

/// Reduces `cloud` to FOV limit vertices and clustered obstacle hulls in the
/// world frame.
pub fn extract_vertices(
    cloud: &PointCloud,
    epsilon: f64,
    fov: &FovConfig,
    pose: &RobotPose,
) -> Result<LocalVertexSet, ExplorationError> {
    fov.validate()?;
    let parts = cluster_partition(cloud, epsilon)?;
    let rs = cloud.returns();
    let n = fov.arc_chords;
    let fov_vertices = (0..=n)
        .map(|i| {
            let b = fov.half_angle * (2.0 * i as f64 - n as f64) / n as f64;
            pose.polar_to_world(b, fov.max_range)
        })
        .collect();
    let obstacles = parts
        .into_iter()
        .map(|r| {
            let (mut near, mut far) = (r.start, r.start);
            for i in r.clone() {
                if rs[i].range < rs[near].range {
                    near = i;
                }
                if rs[i].range > rs[far].range {
                    far = i;
                }
            }
            let last = r.end - 1;
            let mut idx = [r.start, near, far, last];
            idx.sort_unstable();
            let world = |i: usize| pose.polar_to_world(rs[i].bearing, rs[i].range);
            let mut vertices: Vec<Point2> = Vec::with_capacity(4);
            let mut prev = usize::MAX;
            for i in idx {
                if i != prev {
                    vertices.push(world(i));
                    prev = i;
                }
            }
            ObstacleCluster {
                first_ray: r.start,
                last_ray: last,
                first: world(r.start),
                last: world(last),
                nearest: world(near),
                farthest: world(far),
                vertices,
            }
        })
        .collect();
    Ok(LocalVertexSet {
        origin: pose.position,
        heading: pose.heading,
        fov: *fov,
        fov_vertices,
        obstacles,
        ray_count: rs.len(),
        stamp: cloud.stamp,
    })
}

/// True when the cluster count differs or any landmark moved more than
/// `epsilon`.
pub fn scene_changed(prev: &LocalVertexSet, next: &LocalVertexSet, epsilon: f64) -> bool {
    if prev.obstacles.len() != next.obstacles.len() {
        return true;
    }
    prev.obstacles.iter().zip(&next.obstacles).any(|(a, b)| {
        a.landmarks().iter().zip(b.landmarks().iter()).any(|(p, q)| p.distance(*q) > epsilon)
    })
}
