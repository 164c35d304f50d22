use alloc::collections::VecDeque;
use alloc::string::String;
use alloc::vec::Vec;

use super::{
    collision_check, step_robot, steer_from_tracker, Command, PoseProvider, RangeSensor, RobotPose, RobotState,
    ScenarioConfig, SimError,
};
use crate::exploration::{plan_step, Decision, ExplorationState, Frontier, PlannerOutput, PointCloud};
use crate::geometry::{track_step_clamped, PathFunction, Point2, Vec2};

/// How a run ended.
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Complete = 0,
    Stuck = 1,
    Collision = 2,
    Timeout = 3,
}

impl Outcome {
    pub fn label(self) -> &'static str {
        match self {
            Outcome::Complete => "complete",
            Outcome::Stuck => "stuck",
            Outcome::Collision => "collision",
            Outcome::Timeout => "timeout",
        }
    }

    pub fn from_label(s: &str) -> Option<Outcome> {
        Some(match s {
            "complete" => Outcome::Complete,
            "stuck" => Outcome::Stuck,
            "collision" => Outcome::Collision,
            "timeout" => Outcome::Timeout,
            _ => return None,
        })
    }
}

/// What drove the robot on a tick.
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TickKind {
    /// Control-only tick following the current path.
    Track,
    Continue,
    NewPath,
    Stuck,
    Complete,
    Teleop,
    Hold,
}

impl TickKind {
    pub const ALL: [TickKind; 7] = [
        TickKind::Track,
        TickKind::Continue,
        TickKind::NewPath,
        TickKind::Stuck,
        TickKind::Complete,
        TickKind::Teleop,
        TickKind::Hold,
    ];

    pub fn label(self) -> &'static str {
        match self {
            TickKind::Track => "track",
            TickKind::Continue => "continue",
            TickKind::NewPath => "new_path",
            TickKind::Stuck => "stuck",
            TickKind::Complete => "complete",
            TickKind::Teleop => "teleop",
            TickKind::Hold => "hold",
        }
    }

    pub fn from_label(s: &str) -> Option<TickKind> {
        TickKind::ALL.into_iter().find(|k| k.label() == s)
    }
}

#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TickRecord {
    pub tick: u64,
    /// Time at the end of the tick.
    pub t: f64,
    pub pose: RobotPose,
    pub v: f64,
    pub omega: f64,
    pub tracker: Vec2,
    pub kind: TickKind,
    pub path_id: Option<u32>,
    /// Hit count of the latest sweep.
    pub hits: u32,
    pub min_range: Option<f64>,
    /// Explored fraction of the free space.
    pub coverage: f64,
    pub collision: bool,
}

#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathRecord {
    pub id: u32,
    pub tick: u64,
    pub t: f64,
    pub path: PathFunction,
    pub frontier: Frontier,
    pub candidate: usize,
}

#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[derive(Debug, Clone, PartialEq)]
pub struct TraceMeta {
    pub world: String,
    pub seed: u64,
    pub config_hash: u64,
}

/// Per-tick log of a run plus the paths it accepted.
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub meta: TraceMeta,
    pub ticks: Vec<TickRecord>,
    pub paths: Vec<PathRecord>,
    pub outcome: Option<Outcome>,
}

impl Trace {
    pub fn distance(&self) -> f64 {
        self.ticks.windows(2).map(|w| w[0].pose.position.distance(w[1].pose.position)).sum()
    }

    pub fn final_coverage(&self) -> f64 {
        self.ticks.last().map_or(0.0, |r| r.coverage)
    }

    pub fn any_collision(&self) -> bool {
        self.ticks.iter().any(|r| r.collision)
    }

    pub fn count(&self, kind: TickKind) -> usize {
        self.ticks.iter().filter(|r| r.kind == kind).count()
    }

    pub fn path(&self, id: u32) -> Option<&PathRecord> {
        self.paths.iter().find(|p| p.id == id)
    }

    /// Index of the first differing tick record, or the shorter length when
    /// one trace is a prefix of the other.
    pub fn first_divergence(&self, other: &Trace) -> Option<usize> {
        let n = self.ticks.len().min(other.ticks.len());
        if let Some(i) = (0..n).find(|&i| !same_record(&self.ticks[i], &other.ticks[i])) {
            return Some(i);
        }
        (self.ticks.len() != other.ticks.len()).then_some(n)
    }
}

fn same_record(a: &TickRecord, b: &TickRecord) -> bool {
    let f = |x: f64, y: f64| x.to_bits() == y.to_bits();
    a.tick == b.tick
        && f(a.t, b.t)
        && f(a.pose.position.x, b.pose.position.x)
        && f(a.pose.position.y, b.pose.position.y)
        && f(a.pose.heading, b.pose.heading)
        && f(a.v, b.v)
        && f(a.omega, b.omega)
        && f(a.tracker.dx, b.tracker.dx)
        && f(a.tracker.dy, b.tracker.dy)
        && a.kind == b.kind
        && a.path_id == b.path_id
        && a.hits == b.hits
        && a.min_range.map(f64::to_bits) == b.min_range.map(f64::to_bits)
        && f(a.coverage, b.coverage)
        && a.collision == b.collision
}

/// Operator input applied at the start of a control tick.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TeleopInput {
    /// Sets the tracker directly until autonomy resumes.
    Drive(Vec2),
    Goto(Point2),
    Resume,
    Stop,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ControlMode {
    Autonomous,
    Drive(Vec2),
    Goto(Point2),
    Holding,
}

/// Distance at which a goto target counts as reached.
pub const GOTO_TOLERANCE: f64 = 0.25;

/// Summary of one control tick.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInfo {
    pub record: TickRecord,
    pub outcome: Option<Outcome>,
}

/// Fixed-step closed loop: sense, plan, steer, integrate, check.
#[derive(Debug, Clone)]
pub struct Simulation {
    cfg: ScenarioConfig,
    state: RobotState,
    explore: ExplorationState,
    sensor: RangeSensor,
    poses: PoseProvider,
    cloud: Option<PointCloud>,
    mode: ControlMode,
    inbox: VecDeque<TeleopInput>,
    trace: Trace,
    last_output: Option<PlannerOutput>,
    outcome: Option<Outcome>,
    stop_on_stuck: bool,
    path_id: Option<u32>,
    next_path_id: u32,
    tick: u64,
    dt: f64,
    sense_every: u64,
    plan_every: u64,
}

impl Simulation {
    pub fn new(cfg: ScenarioConfig) -> Result<Self, SimError> {
        cfg.validate()?;
        let (sense_every, plan_every) = cfg.rates.periods()?;
        let trace = Trace {
            meta: TraceMeta { world: cfg.world.name.clone(), seed: cfg.sensor.seed, config_hash: cfg.fingerprint() },
            ticks: Vec::new(),
            paths: Vec::new(),
            outcome: None,
        };
        Ok(Self {
            state: RobotState::at_rest(cfg.robot.start),
            explore: ExplorationState::default(),
            sensor: RangeSensor::new(cfg.sensor)?,
            poses: PoseProvider::new(cfg.pose_source)?,
            cloud: None,
            mode: ControlMode::Autonomous,
            inbox: VecDeque::new(),
            trace,
            last_output: None,
            outcome: None,
            stop_on_stuck: true,
            path_id: None,
            next_path_id: 0,
            tick: 0,
            dt: 1.0 / cfg.rates.control_hz,
            sense_every,
            plan_every,
            cfg,
        })
    }

    /// Keep running after a stuck decision, holding position until an
    /// operator intervenes.
    pub fn hold_on_stuck(mut self) -> Self {
        self.stop_on_stuck = false;
        self
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.cfg
    }

    pub fn state(&self) -> &RobotState {
        &self.state
    }

    pub fn mode(&self) -> ControlMode {
        self.mode
    }

    pub fn exploration(&self) -> &ExplorationState {
        &self.explore
    }

    /// Latest sweep; refreshed on ticks that are multiples of
    /// [`Simulation::sense_period`].
    pub fn cloud(&self) -> Option<&PointCloud> {
        self.cloud.as_ref()
    }

    /// Control ticks per sensor sweep.
    pub fn sense_period(&self) -> u64 {
        self.sense_every
    }

    /// Control ticks per planning step.
    pub fn plan_period(&self) -> u64 {
        self.plan_every
    }

    pub fn last_output(&self) -> Option<&PlannerOutput> {
        self.last_output.as_ref()
    }

    pub fn trace(&self) -> &Trace {
        &self.trace
    }

    pub fn into_trace(self) -> Trace {
        self.trace
    }

    pub fn outcome(&self) -> Option<Outcome> {
        self.outcome
    }

    pub fn time(&self) -> f64 {
        self.tick as f64 * self.dt
    }

    pub fn tick(&self) -> u64 {
        self.tick
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn coverage(&self) -> f64 {
        let free = self.cfg.world.free_space().area();
        if free > 0.0 {
            (self.explore.covered_free / free).min(1.0)
        } else {
            1.0
        }
    }

    /// Queues operator input for the next tick.
    pub fn push_input(&mut self, input: TeleopInput) {
        self.inbox.push_back(input);
    }

    fn apply_inputs(&mut self) {
        while let Some(input) = self.inbox.pop_front() {
            self.mode = match input {
                TeleopInput::Drive(v) => ControlMode::Drive(v),
                TeleopInput::Goto(p) => ControlMode::Goto(p),
                TeleopInput::Stop => ControlMode::Holding,
                TeleopInput::Resume => {
                    // force a fresh plan on the next planning tick
                    self.explore.reference = None;
                    ControlMode::Autonomous
                }
            };
        }
    }

    /// Advances one control tick. Does nothing once the run has ended.
    pub fn step(&mut self) -> Result<Option<StepInfo>, SimError> {
        if self.outcome.is_some() {
            return Ok(None);
        }
        let k = self.tick;
        let now = k as f64 * self.dt;
        self.apply_inputs();
        if k.is_multiple_of(self.sense_every) {
            self.cloud = Some(self.sensor.sense(&self.cfg.world, &self.state.pose, now)?);
        }
        let estimate = self.poses.estimate(&self.state.pose);
        let planner = &self.cfg.planner;
        let mut kind = TickKind::Track;
        let mut halt = false;
        match self.mode {
            ControlMode::Autonomous if k.is_multiple_of(self.plan_every) => {
                let cloud = self.cloud.as_ref().expect("plan ticks are sense ticks");
                let robot = RobotState { pose: estimate, ..self.state };
                let explore = core::mem::take(&mut self.explore);
                let (out, next) = plan_step(&robot, cloud, explore, planner, self.cfg.world.free_space())?;
                self.explore = next;
                self.state.tracker = out.tracker;
                match out.decision {
                    Decision::ContinueTracking => kind = TickKind::Continue,
                    Decision::NewPath(path) => {
                        kind = TickKind::NewPath;
                        let id = self.next_path_id;
                        self.next_path_id += 1;
                        self.path_id = Some(id);
                        self.trace.paths.push(PathRecord {
                            id,
                            tick: k,
                            t: now,
                            path,
                            frontier: out.chosen_frontier.expect("new path carries its frontier"),
                            candidate: out.selected.expect("new path carries its index"),
                        });
                    }
                    Decision::Stuck => {
                        kind = TickKind::Stuck;
                        halt = true;
                        self.path_id = None;
                        if self.stop_on_stuck {
                            self.outcome = Some(super::Outcome::Stuck);
                        } else {
                            self.mode = ControlMode::Holding;
                        }
                    }
                    Decision::Complete => {
                        kind = TickKind::Complete;
                        halt = true;
                        self.outcome = Some(super::Outcome::Complete);
                    }
                }
                self.last_output = Some(out);
            }
            ControlMode::Autonomous => {
                if let Some(phi) = &self.explore.current {
                    self.state.tracker = track_step_clamped(
                        self.state.tracker,
                        phi,
                        estimate.position,
                        planner.step_size,
                        planner.tracker_cap,
                    );
                }
            }
            ControlMode::Drive(v) => {
                kind = TickKind::Teleop;
                self.state.tracker = v;
            }
            ControlMode::Goto(target) => {
                kind = TickKind::Teleop;
                let d = target - estimate.position;
                if d.norm() <= GOTO_TOLERANCE {
                    self.mode = ControlMode::Holding;
                    halt = true;
                } else {
                    self.state.tracker = d;
                }
            }
            ControlMode::Holding => {
                kind = TickKind::Hold;
                halt = true;
            }
        }
        let cmd = if halt { Command::STOP } else { steer_from_tracker(&self.state, &self.cfg.robot.limits) };
        self.state = step_robot(&self.state, cmd, self.dt);
        let collision = collision_check(&self.cfg.world, &self.state.pose, self.cfg.robot.radius);
        if collision {
            self.outcome = Some(super::Outcome::Collision);
        }
        self.tick += 1;
        let t = self.tick as f64 * self.dt;
        if self.outcome.is_none() && t >= self.cfg.duration - 1e-9 {
            self.outcome = Some(super::Outcome::Timeout);
        }
        let cloud = self.cloud.as_ref();
        let record = TickRecord {
            tick: k,
            t,
            pose: self.state.pose,
            v: self.state.linear_velocity,
            omega: self.state.angular_velocity,
            tracker: self.state.tracker,
            kind,
            path_id: self.path_id,
            hits: cloud.map_or(0, |c| c.hit_count() as u32),
            min_range: cloud.and_then(PointCloud::min_hit_range),
            coverage: self.coverage(),
            collision,
        };
        self.trace.ticks.push(record);
        self.trace.outcome = self.outcome;
        Ok(Some(StepInfo { record, outcome: self.outcome }))
    }

    /// Steps until the run ends.
    pub fn run(&mut self) -> Result<Outcome, SimError> {
        loop {
            if let Some(o) = self.outcome {
                return Ok(o);
            }
            self.step()?;
        }
    }
}

/// Runs a scenario headless to its end.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<Trace, SimError> {
    let mut sim = Simulation::new(cfg.clone())?;
    sim.run()?;
    Ok(sim.into_trace())
}
