//! Frontier exploration: vertex extraction, candidate fans, largest-frontier
//! selection and coverage bookkeeping.

mod candidates;
mod cloud;
mod coverage;
mod planner;
mod select;
mod vertices;

use thiserror::Error;

use crate::geometry::GeometryError;

pub use candidates::{
    direction_for, fan_coeffs, first_crossing, frontiers, generate_candidates, prefix_clearance, Candidate,
    CandidateConfig, CandidateSet, Frontier,
};
pub use cloud::{PointCloud, RangeReturn};
pub use coverage::{is_complete, update_coverage, vertices_to_region, CoverageEntry, CoverageStack};
pub use planner::{plan_step, Decision, ExplorationState, GoalZone, PlannerConfig, PlannerOutput};
pub use select::{chord_scores, score_and_select, select_middle, Selection};
pub use vertices::{cluster_partition, extract_vertices, scene_changed, FovConfig, LocalVertexSet, ObstacleCluster};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExplorationError {
    #[error("epsilon must be finite and > 0, got {0}")]
    Epsilon(f64),
    #[error("fan size must be odd and >= 3, got {0}")]
    FanSize(usize),
    #[error("completion threshold must lie in (0, 1], got {0}")]
    Threshold(f64),
    #[error("coverage stamps must increase: last {last}, got {got}")]
    NonMonotonicStamp { last: f64, got: f64 },
    #[error("invalid point cloud: {0}")]
    InvalidCloud(&'static str),
    #[error("invalid field of view: {0}")]
    InvalidFov(&'static str),
    #[error("invalid planner config: {0}")]
    InvalidConfig(&'static str),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}
