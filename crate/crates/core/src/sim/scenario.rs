use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::hash::Hasher;

use super::{collision_check, Outcome, PoseSource, RobotLimits, RobotPose, SensorConfig, SimError, World};
use crate::exploration::PlannerConfig;
use crate::geometry::Point2;

/// Loop rates in hertz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rates {
    pub sense_hz: f64,
    pub plan_hz: f64,
    pub control_hz: f64,
}

impl Default for Rates {
    fn default() -> Self {
        Self { sense_hz: 10.0, plan_hz: 10.0, control_hz: 50.0 }
    }
}

fn whole_ratio(num: f64, den: f64) -> Option<u64> {
    let r = num / den;
    let k = libm::round(r);
    ((r - k).abs() < 1e-9 && k >= 1.0).then_some(k as u64)
}

impl Rates {
    /// Control ticks per sense tick and per plan tick.
    pub fn periods(&self) -> Result<(u64, u64), SimError> {
        let ok = |x: f64| x.is_finite() && x > 0.0;
        if !(ok(self.sense_hz) && ok(self.plan_hz) && ok(self.control_hz)) {
            return Err(SimError::InvalidConfig("rates must be > 0"));
        }
        if self.control_hz < self.plan_hz || self.control_hz < self.sense_hz || self.sense_hz < self.plan_hz {
            return Err(SimError::InvalidConfig("rates must satisfy control >= sense >= plan"));
        }
        let sense = whole_ratio(self.control_hz, self.sense_hz)
            .ok_or(SimError::InvalidConfig("control rate must be a multiple of the sense rate"))?;
        let plan = whole_ratio(self.control_hz, self.plan_hz)
            .ok_or(SimError::InvalidConfig("control rate must be a multiple of the plan rate"))?;
        if plan % sense != 0 {
            return Err(SimError::InvalidConfig("plan ticks must coincide with sense ticks"));
        }
        Ok((sense, plan))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobotConfig {
    pub start: RobotPose,
    pub radius: f64,
    pub limits: RobotLimits,
}

impl Default for RobotConfig {
    fn default() -> Self {
        Self { start: RobotPose::new(0.0, 0.0, 0.0), radius: 0.5, limits: RobotLimits::default() }
    }
}

/// Everything a deterministic run depends on.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub world: World,
    pub planner: PlannerConfig,
    pub sensor: SensorConfig,
    pub robot: RobotConfig,
    pub rates: Rates,
    /// Simulated seconds.
    pub duration: f64,
    pub pose_source: PoseSource,
    /// Outcome that counts as success for this scenario.
    pub expect: Option<Outcome>,
}

impl ScenarioConfig {
    pub fn new(world: World, start: RobotPose) -> Self {
        let sensor = SensorConfig::default();
        let mut planner = PlannerConfig::default();
        planner.fov = sensor.fov(planner.fov.arc_chords);
        Self {
            world,
            planner,
            sensor,
            robot: RobotConfig { start, ..Default::default() },
            rates: Rates::default(),
            duration: 60.0,
            pose_source: PoseSource::GroundTruth,
            expect: None,
        }
    }

    fn shipped(world: World, start: RobotPose) -> Self {
        let mut cfg = Self::new(world, start);
        cfg.planner.tracker_cap = SCENARIO_TRACKER_CAP;
        cfg.planner.step_size = SCENARIO_STEP_SIZE;
        cfg
    }

    pub fn validate(&self) -> Result<(), SimError> {
        self.rates.periods()?;
        self.sensor.validate()?;
        self.planner.validate()?;
        if self.planner.fov.half_angle != self.sensor.half_angle || self.planner.fov.max_range != self.sensor.max_range {
            return Err(SimError::InvalidConfig("planner field of view must match the sensor"));
        }
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return Err(SimError::InvalidConfig("duration must be > 0"));
        }
        let l = &self.robot.limits;
        if !(self.robot.radius > 0.0 && l.v_max > 0.0 && l.omega_max > 0.0 && l.k_heading > 0.0) {
            return Err(SimError::InvalidConfig("robot radius and limits must be > 0"));
        }
        if collision_check(&self.world, &self.robot.start, self.robot.radius) {
            return Err(SimError::InvalidConfig("start pose collides"));
        }
        Ok(())
    }

    /// Stable 64-bit hash of every field that influences a run.
    pub fn fingerprint(&self) -> u64 {
        let mut h = Fnv::default();
        h.write(self.world.name.as_bytes());
        h.write_u8(0xff);
        let ring = |h: &mut Fnv, r: &[Point2]| {
            h.write_u64(r.len() as u64);
            for p in r {
                h.f(p.x);
                h.f(p.y);
            }
        };
        ring(&mut h, self.world.boundary());
        h.write_u64(self.world.obstacles().len() as u64);
        for o in self.world.obstacles() {
            ring(&mut h, o);
        }
        let p = &self.planner;
        for x in [p.epsilon, p.fov.half_angle, p.fov.max_range, p.corridor_radius, p.step_size, p.tracker_cap, p.completion_threshold] {
            h.f(x);
        }
        for n in [p.fov.arc_chords, p.fan_size, p.path_samples] {
            h.write_u64(n as u64);
        }
        h.write_u8(p.tangent_from_tracker as u8);
        h.f(p.attraction_rate.unwrap_or(0.0));
        match p.goal {
            None => h.write_u8(0),
            Some(g) => {
                h.write_u8(1);
                h.f(g.center.x);
                h.f(g.center.y);
                h.f(g.radius);
            }
        }
        let s = &self.sensor;
        for x in [s.half_angle, s.max_range, s.range_noise_sigma] {
            h.f(x);
        }
        h.write_u64(s.rays as u64);
        h.write_u64(s.seed);
        let r = &self.robot;
        for x in [
            r.start.position.x,
            r.start.position.y,
            r.start.heading,
            r.radius,
            r.limits.v_max,
            r.limits.omega_max,
            r.limits.k_heading,
        ] {
            h.f(x);
        }
        for x in [self.rates.sense_hz, self.rates.plan_hz, self.rates.control_hz, self.duration] {
            h.f(x);
        }
        match self.pose_source {
            PoseSource::GroundTruth => h.write_u8(0),
            PoseSource::NoisyOdometry { sigma_xy, sigma_heading, seed } => {
                h.write_u8(1);
                h.f(sigma_xy);
                h.f(sigma_heading);
                h.write_u64(seed);
            }
        }
        h.write_u8(self.expect.map_or(0, |o| o as u8 + 1));
        h.finish()
    }
}

/// FNV-1a, 64 bit.
struct Fnv(u64);

impl Default for Fnv {
    fn default() -> Self {
        Fnv(0xcbf2_9ce4_8422_2325)
    }
}

impl Fnv {
    fn f(&mut self, x: f64) {
        self.write_u64(x.to_bits());
    }
}

impl Hasher for Fnv {
    fn finish(&self) -> u64 {
        self.0
    }

    fn write(&mut self, bytes: &[u8]) {
        for b in bytes {
            self.0 ^= *b as u64;
            self.0 = self.0.wrapping_mul(0x0100_0000_01b3);
        }
    }

    fn write_u64(&mut self, n: u64) {
        self.write(&n.to_be_bytes());
    }
}

fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Vec<Point2> {
    vec![Point2::new(x0, y0), Point2::new(x1, y0), Point2::new(x1, y1), Point2::new(x0, y1)]
}

fn ngon(cx: f64, cy: f64, r: f64, n: usize) -> Vec<Point2> {
    (0..n)
        .map(|i| {
            let a = core::f64::consts::TAU * (i as f64 + 0.5) / n as f64;
            Point2::new(cx + r * libm::cos(a), cy + r * libm::sin(a))
        })
        .collect()
}

/// Tracker cap and step used by the shipped scenarios. Together they make
/// the tracker direction settle within a couple of planning ticks.
pub const SCENARIO_TRACKER_CAP: f64 = 1.0;
pub const SCENARIO_STEP_SIZE: f64 = 1.0;

fn fast(mut cfg: ScenarioConfig) -> ScenarioConfig {
    cfg.robot.limits = RobotLimits { v_max: 1.2, omega_max: 1.0, k_heading: 2.0 };
    cfg
}

/// Names accepted by [`builtin`].
pub const BUILTIN_SCENARIOS: [&str; 5] = ["open-field", "hallway-circuit", "tunnel-open", "sealed-corridor", "empty-room"];

/// Obstacle-free 80 x 5 m strip.
pub fn open_field() -> ScenarioConfig {
    let world = World::new("open-field", rect(0.0, 0.0, 80.0, 5.0), vec![]).expect("valid world");
    let mut cfg = fast(ScenarioConfig::shipped(world, RobotPose::new(0.8, 2.5, 0.0)));
    cfg.duration = 90.0;
    cfg.expect = Some(Outcome::Complete);
    cfg
}

/// Four 4 m corridors around a 16 m block (80 m centreline loop) with a
/// wall stub narrowing the south corridor to a door.
pub fn hallway_circuit() -> ScenarioConfig {
    let world = World::new(
        "hallway-circuit",
        rect(0.0, 0.0, 24.0, 24.0),
        vec![rect(4.0, 4.0, 20.0, 20.0), rect(11.0, 0.15, 11.3, 1.6)],
    )
    .expect("valid world");
    let mut cfg = fast(ScenarioConfig::shipped(world, RobotPose::new(2.0, 2.0, 0.0)));
    cfg.duration = 120.0;
    cfg.expect = Some(Outcome::Complete);
    cfg
}

/// Index of the wheel obstacle in [`tunnel_open`].
pub const TUNNEL_WHEEL: usize = 0;

/// 57 m hallway into a 43 m tunnel whose entrance is blocked, with a
/// 0.42 m wheel near the left side of the hallway.
pub fn tunnel_open() -> ScenarioConfig {
    let boundary = vec![
        Point2::new(0.0, 0.0),
        Point2::new(57.0, 0.0),
        Point2::new(57.0, 0.5),
        Point2::new(100.0, 0.5),
        Point2::new(100.0, 3.5),
        Point2::new(57.0, 3.5),
        Point2::new(57.0, 4.0),
        Point2::new(0.0, 4.0),
    ];
    let world = World::new(
        "tunnel-open",
        boundary,
        vec![ngon(20.0, 2.6, 0.21 / libm::cos(core::f64::consts::PI / 8.0), 8), rect(56.0, 0.05, 56.8, 3.95)],
    )
    .expect("valid world");
    let mut cfg = fast(ScenarioConfig::shipped(world, RobotPose::new(1.0, 2.0, 0.0)));
    cfg.duration = 60.0;
    cfg.expect = Some(Outcome::Stuck);
    cfg
}

/// Short dead-end corridor.
pub fn sealed_corridor() -> ScenarioConfig {
    let world = World::new("sealed-corridor", rect(0.0, 0.0, 12.0, 3.0), vec![]).expect("valid world");
    let mut cfg = ScenarioConfig::shipped(world, RobotPose::new(1.5, 1.5, 0.0));
    cfg.duration = 40.0;
    cfg.expect = Some(Outcome::Stuck);
    cfg
}

/// Empty 10 x 10 m room.
pub fn empty_room() -> ScenarioConfig {
    let world = World::new("empty-room", rect(0.0, 0.0, 10.0, 10.0), vec![]).expect("valid world");
    let mut cfg = ScenarioConfig::shipped(world, RobotPose::new(1.0, 5.0, 0.0));
    cfg.duration = 60.0;
    cfg.expect = Some(Outcome::Stuck);
    cfg
}

pub fn builtin(name: &str) -> Option<ScenarioConfig> {
    Some(match name {
        "open-field" => open_field(),
        "hallway-circuit" => hallway_circuit(),
        "tunnel-open" => tunnel_open(),
        "sealed-corridor" => sealed_corridor(),
        "empty-room" => empty_room(),
        _ => return None,
    })
}

/// Human-readable label for listings.
pub fn describe(name: &str) -> Option<String> {
    let text = match name {
        "open-field" => "obstacle-free 80 x 5 m strip; every plan should be a straight line",
        "hallway-circuit" => "closed 80 m loop of four corridors with a door stub; expect complete",
        "tunnel-open" => "hallway with a 0.42 m wheel and a blocked tunnel entrance; expect stuck near 50 m",
        "sealed-corridor" => "12 m dead end; expect stuck",
        "empty-room" => "empty 10 x 10 m room; expect stuck once every wall is in range",
        _ => return None,
    };
    Some(String::from(text))
}
