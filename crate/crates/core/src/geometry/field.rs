use alloc::vec::Vec;

use thiserror::Error;

use super::point::{Point2, Vec2};
use crate::math;

/// Step size for the tracker update when a scenario does not set one.
pub const DEFAULT_STEP_SIZE: f64 = 0.1;

/// Default magnitude cap of the accumulated tracker vector.
pub const DEFAULT_TRACKER_CAP: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("attraction rate must be finite and > 0, got {0}")]
    AttractionRate(f64),
    #[error("non-finite input")]
    NonFinite,
    #[error("grid resolution must be > 0, got {0}")]
    Resolution(f64),
    #[error("degenerate bounds")]
    DegenerateBounds,
}

/// Traversal sense around the contour of a path function.
///
/// Counterclockwise rotates the gradient by +90 degrees, clockwise by -90.
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OrbitDirection {
    Counterclockwise,
    Clockwise,
}

impl OrbitDirection {
    /// The 2x2 following-direction matrix, row-major.
    pub fn matrix(self) -> [[f64; 2]; 2] {
        match self {
            OrbitDirection::Counterclockwise => [[0.0, -1.0], [1.0, 0.0]],
            OrbitDirection::Clockwise => [[0.0, 1.0], [-1.0, 0.0]],
        }
    }

    pub fn sign(self) -> f64 {
        match self {
            OrbitDirection::Counterclockwise => 1.0,
            OrbitDirection::Clockwise => -1.0,
        }
    }

    pub fn reversed(self) -> Self {
        match self {
            OrbitDirection::Counterclockwise => OrbitDirection::Clockwise,
            OrbitDirection::Clockwise => OrbitDirection::Counterclockwise,
        }
    }
}

/// Cubic coefficients `a x^3 + b x^2 + c x + d` of a path spline.
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SplineCoeffs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl SplineCoeffs {
    pub const ZERO: SplineCoeffs = SplineCoeffs { a: 0.0, b: 0.0, c: 0.0, d: 0.0 };

    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0.0 && self.b == 0.0 && self.c == 0.0 && self.d == 0.0
    }

    #[inline]
    fn poly(&self, x: f64) -> f64 {
        ((self.a * x + self.b) * x + self.c) * x + self.d
    }

    #[inline]
    fn slope(&self, x: f64) -> f64 {
        (3.0 * self.a * x + 2.0 * self.b) * x + self.c
    }
}

/// Anything with a value and a gradient over the plane.
pub trait ScalarField {
    fn value(&self, p: Point2) -> f64;
    fn gradient(&self, p: Point2) -> Vec2;
}

/// A spline trajectory `a x'^3 + b x'^2 + c x' + d - y' = 0`, where
/// `(x', y')` is the query point in the local frame placed at `anchor` with
/// its x-axis along `heading`.
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathFunction {
    pub anchor: Point2,
    pub heading: f64,
    pub coeffs: SplineCoeffs,
    pub direction: OrbitDirection,
    attraction_rate: f64,
}

impl PathFunction {
    pub fn new(
        anchor: Point2,
        heading: f64,
        coeffs: SplineCoeffs,
        direction: OrbitDirection,
        attraction_rate: f64,
    ) -> Result<Self, GeometryError> {
        if !(attraction_rate.is_finite() && attraction_rate > 0.0) {
            return Err(GeometryError::AttractionRate(attraction_rate));
        }
        let c = &coeffs;
        if !(anchor.is_finite()
            && heading.is_finite()
            && c.a.is_finite()
            && c.b.is_finite()
            && c.c.is_finite()
            && c.d.is_finite())
        {
            return Err(GeometryError::NonFinite);
        }
        Ok(Self { anchor, heading, coeffs, direction, attraction_rate })
    }

    /// Builds a path whose field moves forward along `travel_heading` for
    /// either orbit direction.
    ///
    /// `coeffs` describe the curve in the travel frame. A clockwise path is
    /// stored in the frame turned by pi, where the same curve reads
    /// `(a, -b, c, -d)` and the path function changes sign; `-E` applied to
    /// the negated gradient then points forward again.
    pub fn along_travel(
        anchor: Point2,
        travel_heading: f64,
        coeffs: SplineCoeffs,
        direction: OrbitDirection,
        attraction_rate: f64,
    ) -> Result<Self, GeometryError> {
        match direction {
            OrbitDirection::Counterclockwise => {
                Self::new(anchor, travel_heading, coeffs, direction, attraction_rate)
            }
            OrbitDirection::Clockwise => {
                let flipped = SplineCoeffs::new(coeffs.a, -coeffs.b + 0.0, coeffs.c, -coeffs.d + 0.0);
                Self::new(
                    anchor,
                    math::wrap_angle(travel_heading + core::f64::consts::PI),
                    flipped,
                    direction,
                    attraction_rate,
                )
            }
        }
    }

    /// Straight line through `anchor` along `heading`.
    pub fn line(anchor: Point2, heading: f64, attraction_rate: f64) -> Result<Self, GeometryError> {
        Self::new(anchor, heading, SplineCoeffs::ZERO, OrbitDirection::Counterclockwise, attraction_rate)
    }

    #[inline]
    pub fn attraction_rate(&self) -> f64 {
        self.attraction_rate
    }

    /// Query point in the path's local frame.
    #[inline]
    pub fn to_local(&self, p: Point2) -> Point2 {
        let (s, c) = math::sin_cos(self.heading);
        let dx = p.x - self.anchor.x;
        let dy = p.y - self.anchor.y;
        Point2::new(c * dx + s * dy, -s * dx + c * dy)
    }

    /// Local-frame point back to the world frame.
    #[inline]
    pub fn to_world(&self, q: Point2) -> Point2 {
        let (s, c) = math::sin_cos(self.heading);
        Point2::new(self.anchor.x + c * q.x - s * q.y, self.anchor.y + s * q.x + c * q.y)
    }

    /// World point on the zero level set at local abscissa `x`.
    pub fn point_at(&self, x: f64) -> Point2 {
        self.to_world(Point2::new(x, self.coeffs.poly(x)))
    }

    /// Signed second-order coefficient, the curvature proxy at the anchor.
    pub fn curvature_at_anchor(&self) -> f64 {
        2.0 * self.coeffs.b
    }
}

impl ScalarField for PathFunction {
    fn value(&self, p: Point2) -> f64 {
        eval_path(self, p)
    }

    fn gradient(&self, p: Point2) -> Vec2 {
        grad_path(self, p)
    }
}

/// Value of the path function at `p`; zero on the trajectory.
pub fn eval_path(phi: &PathFunction, p: Point2) -> f64 {
    let q = phi.to_local(p);
    phi.coeffs.poly(q.x) - q.y
}

/// World-frame gradient of [`eval_path`].
pub fn grad_path(phi: &PathFunction, p: Point2) -> Vec2 {
    let q = phi.to_local(p);
    let gx = phi.coeffs.slope(q.x);
    // local gradient is (gx, -1); rotate by heading
    let (s, c) = math::sin_cos(phi.heading);
    Vec2::new(gx * c + s, gx * s - c)
}

/// Applies the following-direction matrix of `d` to `v`.
pub fn apply_direction(d: OrbitDirection, v: Vec2) -> Vec2 {
    match d {
        OrbitDirection::Counterclockwise => Vec2::new(-v.dy, v.dx),
        OrbitDirection::Clockwise => Vec2::new(v.dy, -v.dx),
    }
}

/// Guidance vector `E grad - k_e * value * grad` for an arbitrary field.
pub fn guidance_for<F: ScalarField + ?Sized>(
    field: &F,
    direction: OrbitDirection,
    attraction_rate: f64,
    p: Point2,
) -> Vec2 {
    let value = field.value(p);
    let grad = field.gradient(p);
    apply_direction(direction, grad) - grad * (attraction_rate * value)
}

/// Guidance vector of a path function at `p`.
pub fn guidance_field(phi: &PathFunction, p: Point2) -> Vec2 {
    guidance_for(phi, phi.direction, phi.attraction_rate, p)
}

/// One tracker update: `prev + step * guidance(p)`.
pub fn track_step(prev: Vec2, phi: &PathFunction, p: Point2, step: f64) -> Vec2 {
    prev + guidance_field(phi, p) * step
}

/// [`track_step`] followed by the magnitude cap the controller relies on.
pub fn track_step_clamped(prev: Vec2, phi: &PathFunction, p: Point2, step: f64, cap: f64) -> Vec2 {
    track_step(prev, phi, p, step).clamp_norm(cap)
}

/// Picks the attraction rate from the anchor curvature `2b`.
pub fn attraction_for_curvature(curvature: f64) -> f64 {
    let k = curvature.abs();
    if k < 0.05 {
        0.05
    } else if k > 0.5 {
        0.4
    } else {
        0.1
    }
}

/// Axis-aligned rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub min: Point2,
    pub max: Point2,
}

impl Rect {
    pub const fn new(min: Point2, max: Point2) -> Self {
        Self { min, max }
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }
}

/// One grid sample of the guidance field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub at: Point2,
    pub value: f64,
    pub gradient: Vec2,
    pub guidance: Vec2,
}

impl FieldSample {
    /// Recomputes the guidance from the stored value and gradient.
    pub fn recomputed_guidance(&self, direction: OrbitDirection, attraction_rate: f64) -> Vec2 {
        apply_direction(direction, self.gradient) - self.gradient * (attraction_rate * self.value)
    }
}

/// Samples the guidance field on a row-major lattice including the edges.
pub fn sample_field_grid(
    phi: &PathFunction,
    bounds: Rect,
    resolution: f64,
) -> Result<Vec<FieldSample>, GeometryError> {
    if !(resolution.is_finite() && resolution > 0.0) {
        return Err(GeometryError::Resolution(resolution));
    }
    if !(bounds.min.is_finite() && bounds.max.is_finite())
        || bounds.width() <= 0.0
        || bounds.height() <= 0.0
    {
        return Err(GeometryError::DegenerateBounds);
    }
    // small slack so 2.0 / 1.0 lands on 3 lattice points
    let nx = math::floor(bounds.width() / resolution + 1e-9) as usize + 1;
    let ny = math::floor(bounds.height() / resolution + 1e-9) as usize + 1;
    let mut out = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        let y = bounds.min.y + j as f64 * resolution;
        for i in 0..nx {
            let at = Point2::new(bounds.min.x + i as f64 * resolution, y);
            let value = eval_path(phi, at);
            let gradient = grad_path(phi, at);
            let guidance =
                apply_direction(phi.direction, gradient) - gradient * (phi.attraction_rate * value);
            out.push(FieldSample { at, value, gradient, guidance });
        }
    }
    Ok(out)
}
