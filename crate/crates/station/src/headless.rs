use explore_core::link::LinkConfig;
use explore_core::sim::ScenarioConfig;

use crate::robot::{NodeConfig, RobotNode};
use crate::session::Session;
use crate::StationError;

#[derive(Debug, Clone, PartialEq)]
pub struct HeadlessConfig {
    pub scenario: ScenarioConfig,
    /// Robot to station.
    pub uplink: LinkConfig,
    /// Station to robot.
    pub downlink: LinkConfig,
    pub service_hz: f64,
    pub heartbeat_period: f64,
    pub node: NodeConfig,
}

impl HeadlessConfig {
    /// Station defaults around `scenario`, which is made open-ended: a
    /// session lasts until it is dropped.
    pub fn new(mut scenario: ScenarioConfig) -> Self {
        scenario.duration = 1e9;
        Self {
            scenario,
            uplink: LinkConfig { seed: 1, ..LinkConfig::default() },
            downlink: LinkConfig { seed: 2, ..LinkConfig::default() },
            service_hz: 10.0,
            heartbeat_period: 1.0,
            node: NodeConfig::default(),
        }
    }
}

/// Station and simulated robot joined only by the two link simulators,
/// advanced on one deterministic clock.
#[derive(Debug, Clone)]
pub struct Headless {
    robot: RobotNode,
    session: Session,
    service_every: u64,
    tick: u64,
    dt: f64,
}

impl Headless {
    pub fn new(cfg: HeadlessConfig) -> Result<Self, StationError> {
        let ratio = cfg.scenario.rates.control_hz / cfg.service_hz;
        let every = ratio.round();
        if !(every >= 1.0 && (ratio - every).abs() < 1e-9) {
            return Err(StationError::Config("control rate must be a multiple of the service rate".into()));
        }
        let dt = 1.0 / cfg.scenario.rates.control_hz;
        let name = cfg.scenario.world.name.clone();
        Ok(Self {
            robot: RobotNode::new(cfg.scenario, cfg.uplink, cfg.node)?,
            session: Session::new(name, cfg.downlink, cfg.heartbeat_period)?,
            service_every: every as u64,
            tick: 0,
            dt,
        })
    }

    pub fn time(&self) -> f64 {
        self.tick as f64 * self.dt
    }

    pub fn service_period(&self) -> f64 {
        self.service_every as f64 * self.dt
    }

    pub fn robot(&self) -> &RobotNode {
        &self.robot
    }

    pub fn session(&self) -> &Session {
        &self.session
    }

    pub fn session_mut(&mut self) -> &mut Session {
        &mut self.session
    }

    /// One control tick; every `service_every` ticks the station drains the
    /// uplink, hands queued commands to the radio and runs its service tick.
    pub fn step(&mut self) -> Result<(), StationError> {
        let now = self.time();
        for d in self.session.downlink().poll(now) {
            self.robot.deliver(&d);
        }
        self.robot.step()?;
        self.tick += 1;
        if self.tick.is_multiple_of(self.service_every) {
            let now = self.time();
            for d in self.robot.uplink().poll(now) {
                self.session.receive(&d);
            }
            self.session.pump(now)?;
            self.session.tick(now);
        }
        Ok(())
    }

    /// Steps until the clock reaches `t`.
    pub fn run_until(&mut self, t: f64) -> Result<(), StationError> {
        while self.time() < t - 1e-9 {
            self.step()?;
        }
        Ok(())
    }

    /// Advances one service period.
    pub fn service_step(&mut self) -> Result<(), StationError> {
        for _ in 0..self.service_every {
            self.step()?;
        }
        Ok(())
    }
}
