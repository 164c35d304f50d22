//! Planning core for low-rate frontier exploration.
//!
//! The crate is `no_std` (it needs `alloc`) so the planner can run on the
//! same microcontroller-class hardware that drives the wheels. All
//! transcendental math goes through `libm`, which keeps simulation traces
//! bit-identical across platforms.
//!
//! Layout:
//! - [`geometry`]: path functions, their gradients and the guidance field.
//! - [`polygon`] / [`region`]: convex polygon clipping and the explored-area
//!   accumulator.
//! - [`exploration`]: vertex extraction, candidate fan, frontier selection,
//!   coverage stack and the per-step planner.
//! - [`sim`]: planar world, differential-drive kinematics, ray-cast sensor,
//!   pose providers and the scenario loop.
//! - [`link`]: teleop frame codec and the duty-cycled long-range link model.
#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod exploration;
pub mod geometry;
pub mod link;
pub mod math;
pub mod polygon;
pub mod region;
pub mod sim;

pub use geometry::{OrbitDirection, PathFunction, Point2, Vec2};
pub use region::Region2;
