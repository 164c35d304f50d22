use alloc::string::String;
use alloc::vec::Vec;

use super::{RobotPose, SimError};
use crate::geometry::{Point2, Vec2};
use crate::polygon::{ray_segment_hit, ring_boundary_distance, ring_contains, ring_is_simple, segment_intersection, Aabb};
use crate::region::Region2;

/// Planar world: a simple boundary ring with disjoint obstacle rings inside.
#[derive(Debug, Clone, PartialEq)]
pub struct World {
    pub name: String,
    boundary: Vec<Point2>,
    obstacles: Vec<Vec<Point2>>,
    segments: Vec<(Point2, Point2)>,
    free: Region2,
}

fn ring_edges(ring: &[Point2]) -> impl Iterator<Item = (Point2, Point2)> + '_ {
    (0..ring.len()).map(move |i| (ring[i], ring[(i + 1) % ring.len()]))
}

fn rings_touch(a: &[Point2], b: &[Point2]) -> bool {
    for (p, p2) in ring_edges(a) {
        for (q, q2) in ring_edges(b) {
            if segment_intersection(p, p2, q, q2).is_some() {
                return true;
            }
        }
    }
    false
}

impl World {
    pub fn new(name: impl Into<String>, boundary: Vec<Point2>, obstacles: Vec<Vec<Point2>>) -> Result<Self, SimError> {
        if boundary.len() < 3 || !ring_is_simple(&boundary) {
            return Err(SimError::InvalidWorld("boundary must be a simple polygon"));
        }
        if boundary.iter().any(|p| !p.is_finite()) {
            return Err(SimError::InvalidWorld("non-finite boundary vertex"));
        }
        for (i, o) in obstacles.iter().enumerate() {
            if o.len() < 3 || !ring_is_simple(o) || o.iter().any(|p| !p.is_finite()) {
                return Err(SimError::InvalidWorld("obstacle must be a simple polygon"));
            }
            if o.iter().any(|p| !ring_contains(&boundary, *p)) || rings_touch(o, &boundary) {
                return Err(SimError::InvalidWorld("obstacle must lie inside the boundary"));
            }
            for other in &obstacles[..i] {
                if rings_touch(o, other) || ring_contains(other, o[0]) || ring_contains(o, other[0]) {
                    return Err(SimError::InvalidWorld("obstacles must be pairwise disjoint"));
                }
            }
        }
        let mut segments: Vec<(Point2, Point2)> = ring_edges(&boundary).collect();
        for o in &obstacles {
            segments.extend(ring_edges(o));
        }
        let mut blocked = Region2::new();
        for o in &obstacles {
            blocked.union_with(&Region2::from_ring(o));
        }
        let free = Region2::from_ring(&boundary).difference(&blocked);
        Ok(Self { name: name.into(), boundary, obstacles, segments, free })
    }

    pub fn boundary(&self) -> &[Point2] {
        &self.boundary
    }

    pub fn obstacles(&self) -> &[Vec<Point2>] {
        &self.obstacles
    }

    /// Free space: inside the boundary, outside every obstacle.
    pub fn free_space(&self) -> &Region2 {
        &self.free
    }

    pub fn bounds(&self) -> Aabb {
        Aabb::of(&self.boundary)
    }

    pub fn contains(&self, p: Point2) -> bool {
        ring_contains(&self.boundary, p) && !self.obstacles.iter().any(|o| ring_contains(o, p))
    }

    /// Distance along a unit direction to the first wall, if within `max_range`.
    pub fn cast_ray(&self, origin: Point2, dir: Vec2, max_range: f64) -> Option<f64> {
        let mut best: Option<f64> = None;
        for &(a, b) in &self.segments {
            if let Some(t) = ray_segment_hit(origin, dir, a, b) {
                if t <= max_range && best.is_none_or(|x| t < x) {
                    best = Some(t);
                }
            }
        }
        best
    }

    /// Distance from `p` to the nearest wall or obstacle edge.
    pub fn clearance(&self, p: Point2) -> f64 {
        let mut d = ring_boundary_distance(&self.boundary, p);
        for o in &self.obstacles {
            d = d.min(ring_boundary_distance(o, p));
        }
        d
    }

    /// Distance from `p` to one obstacle's boundary.
    pub fn obstacle_clearance(&self, index: usize, p: Point2) -> f64 {
        ring_boundary_distance(&self.obstacles[index], p)
    }
}

/// True iff the disc of `radius` around the pose leaves the free space.
pub fn collision_check(world: &World, pose: &RobotPose, radius: f64) -> bool {
    let p = pose.position;
    !world.contains(p) || world.clearance(p) < radius
}
