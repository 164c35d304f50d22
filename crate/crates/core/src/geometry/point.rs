use core::ops::{Add, AddAssign, Mul, Neg, Sub};

use crate::math;

/// A position in the world frame, meters.
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

/// A planar direction or displacement.
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2 {
    pub dx: f64,
    pub dy: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    #[inline]
    pub fn distance(self, other: Point2) -> f64 {
        math::hypot(self.x - other.x, self.y - other.y)
    }

    #[inline]
    pub fn to_vec(self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }

    /// Point at `range` along `bearing` from `self`.
    pub fn polar_offset(self, bearing: f64, range: f64) -> Point2 {
        let (s, c) = math::sin_cos(bearing);
        Point2::new(self.x + range * c, self.y + range * s)
    }

    pub fn lerp(self, other: Point2, t: f64) -> Point2 {
        Point2::new(self.x + (other.x - self.x) * t, self.y + (other.y - self.y) * t)
    }
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { dx: 0.0, dy: 0.0 };

    #[inline]
    pub const fn new(dx: f64, dy: f64) -> Self {
        Self { dx, dy }
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.dx.is_finite() && self.dy.is_finite()
    }

    #[inline]
    pub fn dot(self, o: Vec2) -> f64 {
        self.dx * o.dx + self.dy * o.dy
    }

    /// z-component of the 3D cross product.
    #[inline]
    pub fn cross(self, o: Vec2) -> f64 {
        self.dx * o.dy - self.dy * o.dx
    }

    #[inline]
    pub fn norm(self) -> f64 {
        math::hypot(self.dx, self.dy)
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.dx * self.dx + self.dy * self.dy
    }

    #[inline]
    pub fn angle(self) -> f64 {
        math::atan2(self.dy, self.dx)
    }

    /// Rescales to at most `cap` length, keeping direction.
    pub fn clamp_norm(self, cap: f64) -> Vec2 {
        let n = self.norm();
        if n > cap && n > 0.0 {
            self * (cap / n)
        } else {
            self
        }
    }

    pub fn from_angle(angle: f64) -> Vec2 {
        let (s, c) = math::sin_cos(angle);
        Vec2::new(c, s)
    }
}

impl Sub for Point2 {
    type Output = Vec2;
    #[inline]
    fn sub(self, o: Point2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Add<Vec2> for Point2 {
    type Output = Point2;
    #[inline]
    fn add(self, v: Vec2) -> Point2 {
        Point2::new(self.x + v.dx, self.y + v.dy)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    #[inline]
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.dx + o.dx, self.dy + o.dy)
    }
}

impl AddAssign for Vec2 {
    #[inline]
    fn add_assign(&mut self, o: Vec2) {
        self.dx += o.dx;
        self.dy += o.dy;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    #[inline]
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.dx - o.dx, self.dy - o.dy)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.dx * s, self.dy * s)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    #[inline]
    fn neg(self) -> Vec2 {
        Vec2::new(-self.dx, -self.dy)
    }
}
