//! Planar regions kept as disjoint convex pieces, so the union area is the
//! plain sum of piece areas.

use alloc::vec::Vec;

use crate::geometry::Point2;
use crate::polygon::{triangulate, Aabb, ConvexPolygon};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Region2 {
    pieces: Vec<ConvexPolygon>,
    area: f64,
}

impl Region2 {
    pub fn new() -> Self {
        Self::default()
    }

    /// Union of arbitrary (possibly overlapping) convex polygons.
    pub fn from_convex<I: IntoIterator<Item = ConvexPolygon>>(polys: I) -> Self {
        let mut r = Region2::new();
        for p in polys {
            r.insert(p);
        }
        r
    }

    /// Region enclosed by a simple ring.
    pub fn from_ring(ring: &[Point2]) -> Self {
        Self::from_convex(triangulate(ring))
    }

    #[inline]
    pub fn area(&self) -> f64 {
        self.area
    }

    #[inline]
    pub fn pieces(&self) -> &[ConvexPolygon] {
        &self.pieces
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn contains(&self, p: Point2) -> bool {
        self.pieces.iter().any(|q| q.contains(p))
    }

    pub fn bbox(&self) -> Option<Aabb> {
        let pts: Vec<Point2> = self
            .pieces
            .iter()
            .flat_map(|q| [q.bbox().min, q.bbox().max])
            .collect();
        if pts.is_empty() {
            None
        } else {
            Some(Aabb::of(&pts))
        }
    }

    /// Adds `poly`, returning the newly covered fragments.
    pub fn insert(&mut self, poly: ConvexPolygon) -> Vec<ConvexPolygon> {
        let fresh = subtract_all(alloc::vec![poly], &self.pieces);
        for f in &fresh {
            self.area += f.area();
        }
        self.pieces.extend(fresh.iter().cloned());
        fresh
    }

    /// In-place union; returns the part of `other` that was not yet covered.
    pub fn union_with(&mut self, other: &Region2) -> Region2 {
        let mut delta = Region2::new();
        for p in &other.pieces {
            for f in self.insert(p.clone()) {
                delta.area += f.area();
                delta.pieces.push(f);
            }
        }
        delta
    }

    pub fn union(&self, other: &Region2) -> Region2 {
        let mut r = self.clone();
        r.union_with(other);
        r
    }

    pub fn difference(&self, other: &Region2) -> Region2 {
        let mut out = Region2::new();
        for p in &self.pieces {
            for f in subtract_all(alloc::vec![p.clone()], &other.pieces) {
                out.area += f.area();
                out.pieces.push(f);
            }
        }
        out
    }

    pub fn intersection_area(&self, other: &Region2) -> f64 {
        let mut acc = 0.0;
        for a in &self.pieces {
            for b in &other.pieces {
                if a.bbox().overlaps(b.bbox()) {
                    acc += a.intersection_area(b);
                }
            }
        }
        acc
    }
}

fn subtract_all(mut frags: Vec<ConvexPolygon>, cutters: &[ConvexPolygon]) -> Vec<ConvexPolygon> {
    for q in cutters {
        if frags.is_empty() {
            break;
        }
        if !frags.iter().any(|f| f.bbox().overlaps(q.bbox())) {
            continue;
        }
        let mut next = Vec::with_capacity(frags.len());
        for f in frags {
            if f.bbox().overlaps(q.bbox()) {
                next.extend(f.difference(q));
            } else {
                next.push(f);
            }
        }
        frags = next;
    }
    frags
}
