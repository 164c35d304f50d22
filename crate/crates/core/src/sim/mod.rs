//! Deterministic planar world, unicycle robot, range sensor and the
//! closed-loop scenario runner.

mod pose;
mod robot;
mod runner;
pub mod scenario;
mod sensor;
mod world;

use thiserror::Error;

use crate::exploration::ExplorationError;

pub use pose::{pose_provider, PoseProvider, PoseSource};
pub use robot::{step_robot, steer_from_tracker, Command, RobotLimits, RobotPose, RobotState};
pub use runner::{
    run_scenario, ControlMode, Outcome, PathRecord, Simulation, StepInfo, TeleopInput, TickKind, TickRecord, Trace,
    TraceMeta, GOTO_TOLERANCE,
};
pub use scenario::{builtin, RobotConfig, Rates, ScenarioConfig, BUILTIN_SCENARIOS};
pub use sensor::{sense, RangeSensor, SensorConfig};
pub use world::{collision_check, World};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid world: {0}")]
    InvalidWorld(&'static str),
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("pose ({x}, {y}) is outside the world")]
    PoseOutside { x: f64, y: f64 },
    #[error(transparent)]
    Planner(#[from] ExplorationError),
}
