use std::collections::VecDeque;

use explore_core::link::{
    decode_frame, encode_frame, AckPayload, ControlPayload, Delivery, Frame, LinkConfig, LinkSim, Payload,
    PositionPayload, RobotMode, Transmission,
};
use explore_core::{Point2, Vec2};

use crate::events::{Event, OperatorCommand, Pose, Snapshot};
use crate::{CommandError, StationError};

#[derive(Debug, Clone)]
struct Pending {
    client: String,
    kind: &'static str,
    payload: Payload,
}

impl Pending {
    fn is_drive(&self) -> bool {
        matches!(self.payload, Payload::Control(_))
    }
}

/// Station side of one robot link: command queue, robot snapshot and the
/// event log clients read from.
#[derive(Debug, Clone)]
pub struct Session {
    downlink: LinkSim,
    pending: VecDeque<Pending>,
    next_seq: u8,
    snapshot: Snapshot,
    log: Vec<Event>,
    heartbeat_period: f64,
    last_emit: f64,
    decode_errors: usize,
}

impl Session {
    pub fn new(id: impl Into<String>, downlink: LinkConfig, heartbeat_period: f64) -> Result<Self, StationError> {
        if !(heartbeat_period > 0.0 && heartbeat_period.is_finite()) {
            return Err(StationError::Config("heartbeat period must be > 0".into()));
        }
        Ok(Self {
            downlink: LinkSim::new(downlink)?,
            pending: VecDeque::new(),
            next_seq: 0,
            snapshot: Snapshot {
                session: id.into(),
                t: 0.0,
                pose: None,
                mode: None,
                coverage: 0.0,
                explored: Vec::new(),
                trajectory: Vec::new(),
                stuck: None,
                driver: None,
                last_seq_in: None,
                last_seq_out: None,
                last_event: 0,
            },
            log: Vec::new(),
            heartbeat_period,
            last_emit: 0.0,
            decode_errors: 0,
        })
    }

    pub fn snapshot(&self) -> &Snapshot {
        &self.snapshot
    }

    /// Events with an id greater than `after`.
    pub fn events_since(&self, after: u64) -> &[Event] {
        let start = self.log.partition_point(|e| e.id() <= after);
        &self.log[start..]
    }

    pub fn events(&self) -> &[Event] {
        &self.log
    }

    pub fn pending(&self) -> usize {
        self.pending.len()
    }

    pub fn decode_errors(&self) -> usize {
        self.decode_errors
    }

    pub fn downlink(&mut self) -> &mut LinkSim {
        &mut self.downlink
    }

    fn emit(&mut self, make: impl FnOnce(u64, f64) -> Event) {
        let id = self.snapshot.last_event + 1;
        let t = self.snapshot.t;
        self.log.push(make(id, t));
        self.snapshot.last_event = id;
        self.last_emit = t;
    }

    fn advance_clock(&mut self, now: f64) {
        if now > self.snapshot.t {
            self.snapshot.t = now;
        }
    }

    /// Validates, encodes and queues `cmd`. Frames leave on [`Session::pump`].
    ///
    /// Drive and goto make `client` the driver; only the driver may issue
    /// further drive, goto or stop commands, and resume releases the role.
    pub fn submit_command(&mut self, client: &str, cmd: OperatorCommand) -> Result<usize, CommandError> {
        if let Some(d) = &self.snapshot.driver {
            if d != client {
                return Err(CommandError::Conflict { driver: d.clone() });
            }
        }
        let payload = match cmd {
            OperatorCommand::Drive { vx, vy } => Payload::Control(ControlPayload::from_tracker(Vec2::new(vx, vy))?),
            OperatorCommand::Stop => Payload::Control(ControlPayload::default()),
            OperatorCommand::Goto { x, y } => Payload::Position(PositionPayload::from_point(Point2::new(x, y))?),
            // seq of the ack is filled in at hand-off
            OperatorCommand::ResumeAutonomy => Payload::Ack(AckPayload::resume(0)),
        };
        self.snapshot.driver = match cmd {
            OperatorCommand::ResumeAutonomy => None,
            _ => Some(client.to_string()),
        };
        self.snapshot.stuck = None;
        let item = Pending { client: client.to_string(), kind: cmd.label(), payload };
        // a newer drive supersedes one still waiting for the radio
        if item.is_drive() && self.pending.back().is_some_and(Pending::is_drive) {
            *self.pending.back_mut().expect("checked") = item;
        } else {
            self.pending.push_back(item);
        }
        Ok(self.pending.len())
    }

    /// Hands queued frames to the radio while it can transmit at `now`.
    /// Sequence numbers are assigned here, so they stay consecutive.
    pub fn pump(&mut self, now: f64) -> Result<Vec<Transmission>, StationError> {
        self.advance_clock(now);
        let mut sent = Vec::new();
        while let Some(front) = self.pending.front() {
            let seq = self.next_seq;
            let payload = match &front.payload {
                Payload::Ack(a) => Payload::Ack(AckPayload { seq: self.snapshot.last_seq_in.unwrap_or(0), ..*a }),
                p => p.clone(),
            };
            let bytes = encode_frame(&Frame::new(seq, payload))?;
            if self.downlink.earliest_start(bytes.len(), now) > now {
                break;
            }
            let item = self.pending.pop_front().expect("peeked");
            sent.push(self.downlink.send(bytes, now)?);
            self.next_seq = seq.wrapping_add(1);
            self.snapshot.last_seq_out = Some(seq);
            self.emit(|id, t| Event::CommandSent { id, t, client: item.client, kind: item.kind.into(), seq });
        }
        Ok(sent)
    }

    /// Folds one uplink delivery into the snapshot. Undecodable frames are
    /// counted and dropped.
    pub fn receive(&mut self, d: &Delivery) {
        self.advance_clock(d.at);
        let frame = match decode_frame(&d.bytes) {
            Ok(f) => f,
            Err(_) => {
                self.decode_errors += 1;
                return;
            }
        };
        self.snapshot.last_seq_in = Some(frame.seq);
        match frame.payload {
            Payload::Telemetry(tm) => {
                let p = tm.position();
                let pose = Pose { x: p.x, y: p.y, heading: tm.heading() };
                if self.snapshot.pose != Some(pose) {
                    self.snapshot.pose = Some(pose);
                    self.snapshot.trajectory.push([p.x, p.y]);
                    self.emit(|id, t| Event::Pose { id, t, pose });
                }
                let coverage = tm.coverage();
                let vertices = tm.world_vertices();
                if !vertices.is_empty() {
                    let polygon: Vec<[f64; 2]> = vertices.iter().map(|v| [v.x, v.y]).collect();
                    self.snapshot.explored.push(polygon.clone());
                    self.snapshot.coverage = coverage;
                    self.emit(|id, t| Event::Explored { id, t, polygon, coverage });
                } else if coverage != self.snapshot.coverage {
                    self.snapshot.coverage = coverage;
                    self.emit(|id, t| Event::Explored { id, t, polygon: Vec::new(), coverage });
                }
                let mode = tm.mode.label().to_string();
                if self.snapshot.mode.as_deref() != Some(&mode) {
                    self.snapshot.mode = Some(mode.clone());
                    self.emit(|id, t| Event::Decision { id, t, mode });
                }
            }
            Payload::Stuck(s) => {
                let (x, y) = (s.x as f64 / 1000.0, s.y as f64 / 1000.0);
                self.snapshot.stuck = Some([x, y]);
                if self.snapshot.mode.as_deref() != Some(RobotMode::Stuck.label()) {
                    self.snapshot.mode = Some(RobotMode::Stuck.label().into());
                    self.emit(|id, t| Event::Decision { id, t, mode: RobotMode::Stuck.label().into() });
                }
                self.emit(|id, t| Event::StuckAlert { id, t, x, y });
            }
            Payload::Ack(_) | Payload::Control(_) | Payload::Position(_) => {}
        }
    }

    /// Service tick: emits a heartbeat when the feed has been quiet for a
    /// full period.
    pub fn tick(&mut self, now: f64) {
        self.advance_clock(now);
        if now - self.last_emit >= self.heartbeat_period - 1e-9 {
            self.emit(|id, t| Event::Heartbeat { id, t });
        }
    }
}
