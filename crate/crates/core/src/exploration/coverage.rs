use alloc::vec::Vec;

use super::{ExplorationError, LocalVertexSet};
use crate::geometry::{PathFunction, Point2};
use crate::polygon::ConvexPolygon;
use crate::region::Region2;
use crate::sim::RobotPose;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageEntry {
    pub path: PathFunction,
    pub t: f64,
}

/// Append-only record of accepted paths and the explored area they revealed.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CoverageStack {
    entries: Vec<CoverageEntry>,
    explored: Region2,
}

impl CoverageStack {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn entries(&self) -> &[CoverageEntry] {
        &self.entries
    }

    pub fn explored(&self) -> &Region2 {
        &self.explored
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Appends `<path, t>` and merges `region`; returns the newly explored part.
    pub fn push(&mut self, path: PathFunction, t: f64, region: &Region2) -> Result<Region2, ExplorationError> {
        if let Some(last) = self.entries.last() {
            if !(t > last.t) {
                return Err(ExplorationError::NonMonotonicStamp { last: last.t, got: t });
            }
        }
        if !t.is_finite() {
            return Err(ExplorationError::NonMonotonicStamp { last: f64::NAN, got: t });
        }
        self.entries.push(CoverageEntry { path, t });
        Ok(self.explored.union_with(region))
    }
}

/// Value-style wrapper around [`CoverageStack::push`].
pub fn update_coverage(
    mut stack: CoverageStack,
    path: PathFunction,
    t: f64,
    region: &Region2,
) -> Result<CoverageStack, ExplorationError> {
    stack.push(path, t, region)?;
    Ok(stack)
}

/// Uncovered fraction of `free_space` is at most `1 - threshold`.
pub fn is_complete(stack: &CoverageStack, free_space: &Region2, threshold: f64) -> bool {
    completion_reached(free_space.intersection_area(stack.explored()), free_space.area(), threshold)
}

pub(crate) fn completion_reached(covered: f64, total: f64, threshold: f64) -> bool {
    debug_assert!(threshold > 0.0 && threshold <= 1.0);
    if total <= 0.0 {
        return true;
    }
    let uncovered = (total - covered).max(0.0) / total;
    uncovered <= (1.0 - threshold) + 1e-9
}

/// Area seen from the pose: the FOV sector minus the shadow behind each
/// obstacle cluster.
pub fn vertices_to_region(local: &LocalVertexSet, pose: &RobotPose) -> Region2 {
    let o = pose.position;
    let mut ring = Vec::with_capacity(local.fov_vertices.len() + 1);
    ring.push(o);
    ring.extend_from_slice(&local.fov_vertices);
    let Some(sector) = ConvexPolygon::new(ring) else {
        return Region2::new();
    };
    let reach = 3.0 * local.fov.max_range;
    let project = |p: Point2| -> Option<Point2> {
        let d = p.distance(o);
        (d > 1e-9).then(|| o + (p - o) * (reach / d))
    };
    let mut shadows: Vec<ConvexPolygon> = Vec::new();
    for c in &local.obstacles {
        for e in c.vertices().windows(2) {
            let (u, v) = (e[0], e[1]);
            let (Some(u2), Some(v2)) = (project(u), project(v)) else { continue };
            match ConvexPolygon::new(alloc::vec![u, v, v2, u2]) {
                Some(q) => shadows.push(q),
                None => {
                    shadows.extend(ConvexPolygon::new(alloc::vec![u, v, v2]));
                    shadows.extend(ConvexPolygon::new(alloc::vec![u, v2, u2]));
                }
            }
        }
    }
    let seen = Region2::from_convex([sector]);
    if shadows.is_empty() {
        return seen;
    }
    seen.difference(&Region2::from_convex(shadows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exploration::{extract_vertices, FovConfig, PointCloud, RangeReturn};
    use rand_chacha::ChaCha8Rng;
    use rand_core::{RngCore, SeedableRng};

    fn sq(x0: f64, y0: f64) -> Region2 {
        Region2::from_convex(ConvexPolygon::rect(Point2::new(x0, y0), Point2::new(x0 + 1.0, y0 + 1.0)))
    }

    fn line() -> PathFunction {
        PathFunction::line(Point2::ORIGIN, 0.0, 0.1).unwrap()
    }

    fn fov90() -> FovConfig {
        FovConfig { half_angle: core::f64::consts::FRAC_PI_4, max_range: 5.0, arc_chords: 16 }
    }

    fn sweep(fov: &FovConfig, range_at: impl Fn(f64) -> Option<f64>) -> PointCloud {
        let rays = 181;
        let h = fov.half_angle;
        let returns = (0..rays)
            .map(|i| {
                let b = h * (2.0 * i as f64 - (rays - 1) as f64) / (rays - 1) as f64;
                range_at(b).map_or(RangeReturn::free(fov.max_range, b), |r| RangeReturn::hit(r, b))
            })
            .collect();
        PointCloud::new(returns, 0.0, fov.max_range).unwrap()
    }

    #[test]
    fn stack_examples() {
        let s = update_coverage(CoverageStack::new(), line(), 1.0, &sq(0.0, 0.0)).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.explored().area(), 1.0);
        let s = update_coverage(s, line(), 2.0, &sq(0.0, 0.0)).unwrap();
        assert_eq!(s.explored().area(), 1.0);
        let s = update_coverage(s, line(), 3.0, &sq(5.0, 0.0)).unwrap();
        assert_eq!(s.explored().area(), 2.0);
        let err = update_coverage(s, line(), 3.0, &sq(9.0, 0.0));
        assert!(matches!(err, Err(ExplorationError::NonMonotonicStamp { .. })));
    }

    #[test]
    fn completion_examples() {
        let free = Region2::from_convex(ConvexPolygon::rect(Point2::ORIGIN, Point2::new(10.0, 10.0)));
        let mut s = CoverageStack::new();
        assert!(!is_complete(&s, &free, 0.95));
        s.push(line(), 1.0, &free).unwrap();
        assert!(is_complete(&s, &free, 1.0));
        assert!(is_complete(&s, &free, 0.5));

        let mut part = CoverageStack::new();
        let cover = Region2::from_convex(ConvexPolygon::rect(Point2::ORIGIN, Point2::new(9.6, 10.0)));
        part.push(line(), 1.0, &cover).unwrap();
        assert!(is_complete(&part, &free, 0.95));
        assert!(!is_complete(&part, &free, 0.97));
    }

    #[test]
    fn open_sector_area() {
        let fov = fov90();
        let pose = RobotPose::new(0.0, 0.0, 0.0);
        let local = extract_vertices(&sweep(&fov, |_| None), 0.2, &fov, &pose).unwrap();
        let a = vertices_to_region(&local, &pose).area();
        let exact = 0.25 * core::f64::consts::PI * 25.0;
        assert!((a - exact).abs() / exact < 0.02, "{a}");
    }

    #[test]
    fn full_occlusion_is_within_unit_sector() {
        let fov = fov90();
        let pose = RobotPose::new(0.0, 0.0, 0.0);
        let local = extract_vertices(&sweep(&fov, |_| Some(1.0)), 0.2, &fov, &pose).unwrap();
        let a = vertices_to_region(&local, &pose).area();
        assert!(a <= 0.25 * core::f64::consts::PI + 1e-9, "{a}");
    }

    #[test]
    fn off_centre_obstacle_matches_monte_carlo() {
        let fov = fov90();
        let pose = RobotPose::new(0.0, 0.0, 0.0);
        // flat wall segment x = 2 covering bearings [0.1, 0.4]
        let cloud = sweep(&fov, |b| (0.1..=0.4).contains(&b).then(|| 2.0 / libm::cos(b)));
        let local = extract_vertices(&cloud, 0.2, &fov, &pose).unwrap();
        let region = vertices_to_region(&local, &pose);
        let open = 0.25 * core::f64::consts::PI * 25.0;
        assert!(region.area() < open && region.area() > 0.25 * core::f64::consts::PI);

        let o = &local.obstacles[0];
        let (b0, b1) = (libm::atan2(o.first.y, o.first.x), libm::atan2(o.last.y, o.last.x));
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut uni = || (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        let n = 100_000;
        let mut hits = 0;
        for _ in 0..n {
            let p = Point2::new(uni() * 5.0, -5.0 + uni() * 10.0);
            let (r, b) = (libm::hypot(p.x, p.y), libm::atan2(p.y, p.x));
            let in_fov = b.abs() <= fov.half_angle && r <= 5.0;
            let shadowed = b >= b0 && b <= b1 && p.x > 2.0;
            if in_fov && !shadowed {
                hits += 1;
            }
        }
        let mc = hits as f64 / n as f64 * 50.0;
        assert!((region.area() - mc).abs() / mc < 0.01, "{} vs {}", region.area(), mc);
    }
}
