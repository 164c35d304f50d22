//! Planar polygon primitives: convex clipping, segment queries and ear
//! clipping. Convex polygons are stored counterclockwise.

use alloc::vec::Vec;

use crate::geometry::{Point2, Vec2};

/// Pieces smaller than this (m^2) are dropped as clipping slivers.
pub const SLIVER_AREA: f64 = 1e-9;

const SIDE_EPS: f64 = 1e-12;

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: Point2,
    pub max: Point2,
}

impl Aabb {
    pub fn of(points: &[Point2]) -> Aabb {
        let mut min = Point2::new(f64::INFINITY, f64::INFINITY);
        let mut max = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in points {
            min.x = min.x.min(p.x);
            min.y = min.y.min(p.y);
            max.x = max.x.max(p.x);
            max.y = max.y.max(p.y);
        }
        Aabb { min, max }
    }

    #[inline]
    pub fn overlaps(&self, o: &Aabb) -> bool {
        self.min.x <= o.max.x && o.min.x <= self.max.x && self.min.y <= o.max.y && o.min.y <= self.max.y
    }

    #[inline]
    pub fn contains(&self, p: Point2) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }
}

/// Signed area of a closed ring (positive when counterclockwise).
pub fn signed_area(ring: &[Point2]) -> f64 {
    let n = ring.len();
    if n < 3 {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in 0..n {
        let a = ring[i];
        let b = ring[(i + 1) % n];
        acc += a.x * b.y - b.x * a.y;
    }
    0.5 * acc
}

/// A convex polygon with counterclockwise vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexPolygon {
    vertices: Vec<Point2>,
    area: f64,
    bbox: Aabb,
}

impl ConvexPolygon {
    /// Builds from a ring, reorienting clockwise input. Returns `None` for
    /// rings with fewer than 3 distinct vertices, zero area, or a reflex
    /// corner.
    pub fn new(ring: Vec<Point2>) -> Option<ConvexPolygon> {
        let mut ring = dedup_ring(ring);
        if ring.len() < 3 {
            return None;
        }
        let mut area = signed_area(&ring);
        if area < 0.0 {
            ring.reverse();
            area = -area;
        }
        if area <= SLIVER_AREA {
            return None;
        }
        let n = ring.len();
        let scale = area.max(1.0);
        for i in 0..n {
            let a = ring[i];
            let b = ring[(i + 1) % n];
            let c = ring[(i + 2) % n];
            if (b - a).cross(c - b) < -1e-9 * scale {
                return None;
            }
        }
        let bbox = Aabb::of(&ring);
        Some(ConvexPolygon { vertices: ring, area, bbox })
    }

    fn from_clipped(ring: Vec<Point2>) -> Option<ConvexPolygon> {
        let ring = dedup_ring(ring);
        if ring.len() < 3 {
            return None;
        }
        let area = signed_area(&ring);
        if area <= SLIVER_AREA {
            return None;
        }
        let bbox = Aabb::of(&ring);
        Some(ConvexPolygon { vertices: ring, area, bbox })
    }

    /// Axis-aligned rectangle.
    pub fn rect(min: Point2, max: Point2) -> Option<ConvexPolygon> {
        ConvexPolygon::new(alloc::vec![
            min,
            Point2::new(max.x, min.y),
            max,
            Point2::new(min.x, max.y),
        ])
    }

    #[inline]
    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    #[inline]
    pub fn area(&self) -> f64 {
        self.area
    }

    #[inline]
    pub fn bbox(&self) -> &Aabb {
        &self.bbox
    }

    /// Inclusive containment test.
    pub fn contains(&self, p: Point2) -> bool {
        if !self.bbox.contains(p) {
            return false;
        }
        let n = self.vertices.len();
        (0..n).all(|i| {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            (b - a).cross(p - a) >= -SIDE_EPS
        })
    }

    /// Keeps the part on the left of the directed line `a -> b`.
    pub fn clip_left_of(&self, a: Point2, b: Point2) -> Option<ConvexPolygon> {
        clip_ring_left(&self.vertices, a, b).and_then(ConvexPolygon::from_clipped)
    }

    pub fn intersection(&self, other: &ConvexPolygon) -> Option<ConvexPolygon> {
        if !self.bbox.overlaps(&other.bbox) {
            return None;
        }
        let mut ring = self.vertices.clone();
        let n = other.vertices.len();
        for i in 0..n {
            let a = other.vertices[i];
            let b = other.vertices[(i + 1) % n];
            ring = clip_ring_left(&ring, a, b)?;
        }
        ConvexPolygon::from_clipped(ring)
    }

    pub fn intersection_area(&self, other: &ConvexPolygon) -> f64 {
        self.intersection(other).map_or(0.0, |p| p.area)
    }

    /// `self \ other` as disjoint convex pieces.
    pub fn difference(&self, other: &ConvexPolygon) -> Vec<ConvexPolygon> {
        if !self.bbox.overlaps(&other.bbox) {
            return alloc::vec![self.clone()];
        }
        let mut pieces = Vec::new();
        let mut inside = self.vertices.clone();
        let n = other.vertices.len();
        for i in 0..n {
            let a = other.vertices[i];
            let b = other.vertices[(i + 1) % n];
            // the right side of each edge is outside `other`
            if let Some(out) = clip_ring_left(&inside, b, a).and_then(ConvexPolygon::from_clipped) {
                pieces.push(out);
            }
            match clip_ring_left(&inside, a, b) {
                Some(r) => inside = r,
                None => return pieces,
            }
            if inside.len() < 3 {
                return pieces;
            }
        }
        pieces
    }
}

fn dedup_ring(mut ring: Vec<Point2>) -> Vec<Point2> {
    ring.dedup_by(|a, b| a.distance(*b) < 1e-12);
    while ring.len() > 1 && ring[0].distance(ring[ring.len() - 1]) < 1e-12 {
        ring.pop();
    }
    ring
}

/// Sutherland-Hodgman against one half-plane (left of `a -> b`).
fn clip_ring_left(ring: &[Point2], a: Point2, b: Point2) -> Option<Vec<Point2>> {
    let dir = b - a;
    let len = dir.norm();
    if len == 0.0 {
        return Some(ring.to_vec());
    }
    let side = |p: Point2| dir.cross(p - a) / len;
    let n = ring.len();
    let mut out = Vec::with_capacity(n + 2);
    let mut any_out = false;
    for i in 0..n {
        let cur = ring[i];
        let nxt = ring[(i + 1) % n];
        let sc = side(cur);
        let sn = side(nxt);
        let cur_in = sc >= -SIDE_EPS;
        let nxt_in = sn >= -SIDE_EPS;
        if cur_in {
            out.push(cur);
        } else {
            any_out = true;
        }
        if cur_in != nxt_in {
            let t = sc / (sc - sn);
            out.push(cur.lerp(nxt, t));
        }
    }
    if !any_out {
        return Some(ring.to_vec());
    }
    if out.len() < 3 {
        None
    } else {
        Some(out)
    }
}

/// Distance from `p` to segment `a-b`.
pub fn point_segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sq();
    if len2 == 0.0 {
        return p.distance(a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.distance(a + ab * t)
}

/// Parameters `(t, u)` of the crossing of `p + t r` and `q + u s`, both in
/// `[0, 1]`, or `None` when the segments miss or are parallel.
pub fn segment_intersection(p: Point2, p2: Point2, q: Point2, q2: Point2) -> Option<(f64, f64)> {
    let r = p2 - p;
    let s = q2 - q;
    let denom = r.cross(s);
    if denom == 0.0 {
        return None;
    }
    let qp = q - p;
    let t = qp.cross(s) / denom;
    let u = qp.cross(r) / denom;
    if (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u) {
        Some((t, u))
    } else {
        None
    }
}

/// Minimum distance between two segments.
pub fn segment_segment_distance(a: Point2, a2: Point2, b: Point2, b2: Point2) -> f64 {
    if segment_intersection(a, a2, b, b2).is_some() {
        return 0.0;
    }
    point_segment_distance(a, b, b2)
        .min(point_segment_distance(a2, b, b2))
        .min(point_segment_distance(b, a, a2))
        .min(point_segment_distance(b2, a, a2))
}

/// Distance along a ray from `origin` with unit direction `dir` to segment
/// `a-b`, if it is hit.
pub fn ray_segment_hit(origin: Point2, dir: Vec2, a: Point2, b: Point2) -> Option<f64> {
    let s = b - a;
    let denom = dir.cross(s);
    if denom == 0.0 {
        return None;
    }
    let qp = a - origin;
    let t = qp.cross(s) / denom;
    let u = qp.cross(dir) / denom;
    if t >= 0.0 && (0.0..=1.0).contains(&u) {
        Some(t)
    } else {
        None
    }
}

/// Even-odd point-in-polygon for a simple ring.
pub fn ring_contains(ring: &[Point2], p: Point2) -> bool {
    let n = ring.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let a = ring[i];
        let b = ring[j];
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Distance from `p` to the boundary of a ring.
pub fn ring_boundary_distance(ring: &[Point2], p: Point2) -> f64 {
    let n = ring.len();
    (0..n)
        .map(|i| point_segment_distance(p, ring[i], ring[(i + 1) % n]))
        .fold(f64::INFINITY, f64::min)
}

/// True when no two non-adjacent edges of the ring touch.
pub fn ring_is_simple(ring: &[Point2]) -> bool {
    let n = ring.len();
    if n < 3 {
        return false;
    }
    for i in 0..n {
        let a = ring[i];
        let a2 = ring[(i + 1) % n];
        for j in (i + 1)..n {
            if j == i + 1 || (i == 0 && j == n - 1) {
                continue;
            }
            let b = ring[j];
            let b2 = ring[(j + 1) % n];
            if segment_intersection(a, a2, b, b2).is_some() {
                return false;
            }
        }
    }
    true
}

/// Ear-clipping triangulation of a simple ring of either orientation.
pub fn triangulate(ring: &[Point2]) -> Vec<ConvexPolygon> {
    let mut pts: Vec<Point2> = dedup_ring(ring.to_vec());
    if signed_area(&pts) < 0.0 {
        pts.reverse();
    }
    let mut idx: Vec<usize> = (0..pts.len()).collect();
    let mut out = Vec::new();
    let mut guard = 0usize;
    while idx.len() > 3 && guard < 10 * pts.len() * pts.len() {
        guard += 1;
        let m = idx.len();
        let mut clipped = false;
        for k in 0..m {
            let ia = idx[(k + m - 1) % m];
            let ib = idx[k];
            let ic = idx[(k + 1) % m];
            let (a, b, c) = (pts[ia], pts[ib], pts[ic]);
            let turn = (b - a).cross(c - b);
            if turn <= 0.0 {
                if turn == 0.0 && (b - a).dot(c - b) >= 0.0 {
                    // collinear interior vertex; drop it
                    idx.remove(k);
                    clipped = true;
                    break;
                }
                continue;
            }
            let blocked = idx.iter().any(|&other| {
                if other == ia || other == ib || other == ic {
                    return false;
                }
                let p = pts[other];
                (b - a).cross(p - a) >= 0.0 && (c - b).cross(p - b) >= 0.0 && (a - c).cross(p - c) >= 0.0
            });
            if blocked {
                continue;
            }
            if let Some(t) = ConvexPolygon::new(alloc::vec![a, b, c]) {
                out.push(t);
            }
            idx.remove(k);
            clipped = true;
            break;
        }
        if !clipped {
            break;
        }
    }
    if idx.len() == 3 {
        if let Some(t) = ConvexPolygon::new(alloc::vec![pts[idx[0]], pts[idx[1]], pts[idx[2]]]) {
            out.push(t);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sq(x0: f64, y0: f64, s: f64) -> ConvexPolygon {
        ConvexPolygon::rect(Point2::new(x0, y0), Point2::new(x0 + s, y0 + s)).unwrap()
    }

    #[test]
    fn reorients_and_rejects_degenerate() {
        let cw = ConvexPolygon::new(alloc::vec![
            Point2::new(0.0, 0.0),
            Point2::new(0.0, 1.0),
            Point2::new(1.0, 1.0),
            Point2::new(1.0, 0.0),
        ])
        .unwrap();
        assert_eq!(cw.area(), 1.0);
        assert!(signed_area(cw.vertices()) > 0.0);
        assert!(ConvexPolygon::new(alloc::vec![Point2::ORIGIN, Point2::new(1.0, 0.0), Point2::new(2.0, 0.0)]).is_none());
        // reflex corner
        assert!(ConvexPolygon::new(alloc::vec![
            Point2::new(0.0, 0.0),
            Point2::new(2.0, 0.0),
            Point2::new(1.0, 0.5),
            Point2::new(2.0, 2.0),
            Point2::new(0.0, 2.0),
        ])
        .is_none());
    }

    #[test]
    fn difference_partitions_area() {
        let a = sq(0.0, 0.0, 2.0);
        let b = sq(1.0, 1.0, 2.0);
        let pieces = a.difference(&b);
        let total: f64 = pieces.iter().map(|p| p.area()).sum();
        assert!((total - 3.0).abs() < 1e-12);
        assert!((a.intersection_area(&b) - 1.0).abs() < 1e-12);
        // pieces are disjoint
        for i in 0..pieces.len() {
            for j in (i + 1)..pieces.len() {
                assert!(pieces[i].intersection_area(&pieces[j]) < 1e-12);
            }
        }
        assert!(a.difference(&sq(-1.0, -1.0, 5.0)).is_empty());
        assert_eq!(a.difference(&sq(5.0, 5.0, 1.0)).len(), 1);
    }

    #[test]
    fn triangulates_l_shape() {
        let ring = [
            Point2::new(0.0, 0.0),
            Point2::new(3.0, 0.0),
            Point2::new(3.0, 1.0),
            Point2::new(1.0, 1.0),
            Point2::new(1.0, 3.0),
            Point2::new(0.0, 3.0),
        ];
        let tris = triangulate(&ring);
        let total: f64 = tris.iter().map(|t| t.area()).sum();
        assert!((total - 5.0).abs() < 1e-12);
        assert_eq!(tris.len(), 4);
        assert!(ring_is_simple(&ring));
        assert!(ring_contains(&ring, Point2::new(0.5, 2.5)));
        assert!(!ring_contains(&ring, Point2::new(2.0, 2.0)));
    }

    #[test]
    fn segment_queries() {
        let d = point_segment_distance(Point2::new(0.5, 1.0), Point2::ORIGIN, Point2::new(1.0, 0.0));
        assert_eq!(d, 1.0);
        assert!(segment_intersection(Point2::ORIGIN, Point2::new(2.0, 2.0), Point2::new(0.0, 2.0), Point2::new(2.0, 0.0))
            .is_some());
        let t = ray_segment_hit(Point2::ORIGIN, Vec2::new(1.0, 0.0), Point2::new(2.0, -1.0), Point2::new(2.0, 1.0));
        assert_eq!(t, Some(2.0));
        assert!(ray_segment_hit(Point2::ORIGIN, Vec2::new(-1.0, 0.0), Point2::new(2.0, -1.0), Point2::new(2.0, 1.0))
            .is_none());
        assert_eq!(
            segment_segment_distance(Point2::ORIGIN, Point2::new(1.0, 0.0), Point2::new(0.0, 2.0), Point2::new(1.0, 2.0)),
            2.0
        );
        assert!(!ring_is_simple(&[
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.0, 1.0)
        ]));
    }
}
