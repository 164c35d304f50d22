use explore_core::link::{
    decode_frame, encode_frame, AckPayload, Delivery, Frame, LinkConfig, LinkSim, Payload, RobotMode, StuckPayload,
    TelemetryPayload,
};
use explore_core::sim::{ControlMode, Outcome, ScenarioConfig, Simulation, TeleopInput, TickKind};
use explore_core::Point2;

use crate::StationError;

/// Encoded size of a STUCK frame.
const STUCK_LEN: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeConfig {
    /// Seconds between telemetry attempts.
    pub telemetry_period: f64,
    /// Vertex cap of the explored sector carried by telemetry.
    pub max_vertices: usize,
}

impl Default for NodeConfig {
    fn default() -> Self {
        Self { telemetry_period: 2.0, max_vertices: 8 }
    }
}

/// Robot side of the link: the simulator plus its uplink radio.
#[derive(Debug, Clone)]
pub struct RobotNode {
    sim: Simulation,
    uplink: LinkSim,
    cfg: NodeConfig,
    seq: u8,
    tick: u64,
    next_telemetry: f64,
    stuck_latched: bool,
    sector: Option<Vec<Point2>>,
    last_kind: Option<TickKind>,
    stuck_sent: Vec<f64>,
    inputs: Vec<(f64, TeleopInput)>,
}

impl RobotNode {
    pub fn new(scenario: ScenarioConfig, uplink: LinkConfig, cfg: NodeConfig) -> Result<Self, StationError> {
        if !(cfg.telemetry_period > 0.0) || cfg.max_vertices < 3 {
            return Err(StationError::Config("telemetry period must be > 0 and the vertex cap >= 3".into()));
        }
        Ok(Self {
            sim: Simulation::new(scenario)?.hold_on_stuck(),
            uplink: LinkSim::new(uplink)?,
            cfg,
            seq: 0,
            tick: 0,
            next_telemetry: 0.0,
            stuck_latched: false,
            sector: None,
            last_kind: None,
            stuck_sent: Vec::new(),
            inputs: Vec::new(),
        })
    }

    pub fn sim(&self) -> &Simulation {
        &self.sim
    }

    pub fn uplink(&mut self) -> &mut LinkSim {
        &mut self.uplink
    }

    pub fn time(&self) -> f64 {
        self.tick as f64 * self.sim.dt()
    }

    /// Times at which STUCK frames were handed to the radio.
    pub fn stuck_sent(&self) -> &[f64] {
        &self.stuck_sent
    }

    /// Operator inputs applied, with their arrival time.
    pub fn inputs(&self) -> &[(f64, TeleopInput)] {
        &self.inputs
    }

    pub fn mode(&self) -> RobotMode {
        if self.stuck_latched {
            return RobotMode::Stuck;
        }
        if self.sim.outcome() == Some(Outcome::Complete) {
            return RobotMode::Complete;
        }
        match self.sim.mode() {
            ControlMode::Drive(_) | ControlMode::Goto(_) => RobotMode::Teleop,
            ControlMode::Holding => RobotMode::Holding,
            ControlMode::Autonomous if self.last_kind == Some(TickKind::NewPath) => RobotMode::NewPath,
            ControlMode::Autonomous => RobotMode::Tracking,
        }
    }

    /// Applies one downlink frame. A zero CONTROL vector means stop.
    pub fn deliver(&mut self, d: &Delivery) {
        let Ok(frame) = decode_frame(&d.bytes) else { return };
        let input = match frame.payload {
            Payload::Control(c) if c.vx == 0 && c.vy == 0 => TeleopInput::Stop,
            Payload::Control(c) => TeleopInput::Drive(c.tracker()),
            Payload::Position(p) => TeleopInput::Goto(p.point()),
            Payload::Ack(AckPayload { status: AckPayload::RESUME, .. }) => TeleopInput::Resume,
            _ => return,
        };
        self.stuck_latched = false;
        self.inputs.push((d.at, input));
        self.sim.push_input(input);
    }

    fn next_seq(&mut self) -> u8 {
        let s = self.seq;
        self.seq = s.wrapping_add(1);
        s
    }

    fn sector_from_last_plan(&self) -> Option<Vec<Point2>> {
        let local = self.sim.last_output()?.local.as_ref()?;
        let arc = &local.fov_vertices;
        if arc.len() < 2 {
            return None;
        }
        let keep = (self.cfg.max_vertices - 1).min(arc.len());
        let mut ring = vec![local.origin];
        ring.extend((0..keep).map(|i| arc[i * (arc.len() - 1) / (keep - 1)]));
        Some(ring)
    }

    /// Advances one control tick and transmits what the tick produced.
    pub fn step(&mut self) -> Result<(), StationError> {
        if let Some(info) = self.sim.step()? {
            let kind = info.record.kind;
            self.last_kind = Some(kind);
            match kind {
                TickKind::NewPath => self.sector = self.sector_from_last_plan(),
                TickKind::Stuck => {
                    self.stuck_latched = true;
                    self.send_stuck(info.record.pose.position)?;
                }
                _ => {}
            }
        }
        self.tick += 1;
        let now = self.time();
        if now >= self.next_telemetry - 1e-9 {
            let sent = self.try_telemetry(now)?;
            self.next_telemetry = now + if sent { self.cfg.telemetry_period } else { 0.1 };
        }
        Ok(())
    }

    fn send_stuck(&mut self, at: Point2) -> Result<(), StationError> {
        let now = self.time() + self.sim.dt();
        let seq = self.next_seq();
        let bytes = encode_frame(&Frame::new(seq, Payload::Stuck(StuckPayload::from_point(at)?)))?;
        debug_assert_eq!(bytes.len(), STUCK_LEN);
        self.uplink.send(bytes, now)?;
        self.stuck_sent.push(now);
        Ok(())
    }

    /// Sends telemetry only when it can start now and still leaves the duty
    /// budget room for an immediate STUCK frame afterwards.
    fn try_telemetry(&mut self, now: f64) -> Result<bool, StationError> {
        let pose = self.sim.state().pose;
        let vertices = self.sector.clone().unwrap_or_default();
        let tm = TelemetryPayload::new(pose.position, pose.heading, self.sim.coverage(), self.mode(), &vertices)?;
        let bytes = encode_frame(&Frame::new(self.seq, Payload::Telemetry(tm)))?;
        let len = bytes.len();
        if self.uplink.earliest_start(len, now) > now {
            return Ok(false);
        }
        let end = now + self.uplink.airtime(len);
        let mut probe = self.uplink.clone();
        probe.send(vec![0; len], now)?;
        if probe.earliest_start(STUCK_LEN, end) > end {
            return Ok(false);
        }
        self.next_seq();
        self.uplink.send(bytes, now)?;
        self.sector = None;
        Ok(true)
    }
}
