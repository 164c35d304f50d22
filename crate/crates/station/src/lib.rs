//! Operator base station. A [`Session`] turns operator commands into link
//! frames and robot frames into a snapshot plus an ordered event log;
//! [`Headless`] joins a session to a simulated robot through two link
//! simulators; [`server`] exposes a session over HTTP and a WebSocket.

pub mod events;
pub mod headless;
pub mod robot;
pub mod server;
pub mod session;

pub use events::{CommandReply, CommandRequest, Event, OperatorCommand, Pose, Snapshot};
pub use headless::{Headless, HeadlessConfig};
pub use robot::{NodeConfig, RobotNode};
pub use session::Session;

use explore_core::link::LinkError;
use explore_core::sim::SimError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CommandError {
    #[error("client {driver} is driving")]
    Conflict { driver: String },
    #[error("cannot encode command: {0}")]
    Encoding(#[from] LinkError),
}

impl CommandError {
    pub fn code(&self) -> &'static str {
        match self {
            CommandError::Conflict { .. } => "conflict",
            CommandError::Encoding(_) => "encoding",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StationError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Link(#[from] LinkError),
    #[error("{0}")]
    Config(String),
}
