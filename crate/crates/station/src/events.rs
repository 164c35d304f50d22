//! Message bodies exchanged with operator clients, all JSON.
//!
//! Every event carries `id`, a per-session counter, and `t`, the station
//! clock in seconds. A client that attaches receives one `snapshot` whose
//! `last_event` names the newest event already folded into it; the feed then
//! continues with `last_event + 1`.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
}

/// Robot state as last reported over the link.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub session: String,
    pub t: f64,
    pub pose: Option<Pose>,
    /// Robot mode label: tracking, new_path, stuck, complete, teleop, holding.
    pub mode: Option<String>,
    pub coverage: f64,
    /// Explored sectors in arrival order, each a ring of world points.
    pub explored: Vec<Vec<[f64; 2]>>,
    pub trajectory: Vec<[f64; 2]>,
    /// Position of the open stuck alert, cleared by the next operator command.
    pub stuck: Option<[f64; 2]>,
    pub driver: Option<String>,
    pub last_seq_in: Option<u8>,
    pub last_seq_out: Option<u8>,
    pub last_event: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Event {
    Snapshot(Snapshot),
    Pose { id: u64, t: f64, pose: Pose },
    Explored { id: u64, t: f64, polygon: Vec<[f64; 2]>, coverage: f64 },
    Decision { id: u64, t: f64, mode: String },
    StuckAlert { id: u64, t: f64, x: f64, y: f64 },
    /// A command frame left the station.
    CommandSent { id: u64, t: f64, client: String, kind: String, seq: u8 },
    Heartbeat { id: u64, t: f64 },
}

impl Event {
    /// Feed position; snapshots report the event they include.
    pub fn id(&self) -> u64 {
        match self {
            Event::Snapshot(s) => s.last_event,
            Event::Pose { id, .. }
            | Event::Explored { id, .. }
            | Event::Decision { id, .. }
            | Event::StuckAlert { id, .. }
            | Event::CommandSent { id, .. }
            | Event::Heartbeat { id, .. } => *id,
        }
    }

    pub fn t(&self) -> f64 {
        match self {
            Event::Snapshot(s) => s.t,
            Event::Pose { t, .. }
            | Event::Explored { t, .. }
            | Event::Decision { t, .. }
            | Event::StuckAlert { t, .. }
            | Event::CommandSent { t, .. }
            | Event::Heartbeat { t, .. } => *t,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OperatorCommand {
    /// Sets the robot's tracker vector directly.
    Drive { vx: f64, vy: f64 },
    Goto { x: f64, y: f64 },
    ResumeAutonomy,
    Stop,
}

impl OperatorCommand {
    pub fn label(&self) -> &'static str {
        match self {
            OperatorCommand::Drive { .. } => "drive",
            OperatorCommand::Goto { .. } => "goto",
            OperatorCommand::ResumeAutonomy => "resume_autonomy",
            OperatorCommand::Stop => "stop",
        }
    }
}

/// Body of `POST /api/command`, also accepted on the event socket.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommandRequest {
    pub client: String,
    pub command: OperatorCommand,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CommandReply {
    /// `queued` counts commands waiting for the radio, this one included.
    Accepted { queued: usize },
    Rejected { error: String, message: String },
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_names_are_stable() {
        let e = Event::StuckAlert { id: 3, t: 1.5, x: 50.0, y: 2.0 };
        assert_eq!(serde_json::to_string(&e).unwrap(), r#"{"type":"stuck_alert","id":3,"t":1.5,"x":50.0,"y":2.0}"#);
        let c = CommandRequest { client: "a".into(), command: OperatorCommand::Drive { vx: 0.5, vy: 0.0 } };
        assert_eq!(serde_json::to_string(&c).unwrap(), r#"{"client":"a","command":{"kind":"drive","vx":0.5,"vy":0.0}}"#);
        let r: CommandRequest = serde_json::from_str(r#"{"client":"b","command":{"kind":"resume_autonomy"}}"#).unwrap();
        assert_eq!(r.command, OperatorCommand::ResumeAutonomy);
        let reply = CommandReply::Rejected { error: "conflict".into(), message: "x".into() };
        assert_eq!(serde_json::to_string(&reply).unwrap(), r#"{"status":"rejected","error":"conflict","message":"x"}"#);
    }
}
