//! Path functions and the path-following guidance field.

mod field;
mod point;

pub use field::{
    apply_direction, attraction_for_curvature, grad_path, guidance_field, guidance_for,
    sample_field_grid, track_step, track_step_clamped, eval_path, FieldSample, GeometryError,
    OrbitDirection, PathFunction, Rect, ScalarField, SplineCoeffs, DEFAULT_STEP_SIZE,
    DEFAULT_TRACKER_CAP,
};
pub use point::{Point2, Vec2};
