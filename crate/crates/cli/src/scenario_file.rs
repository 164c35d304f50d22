//! Scenario files: a TOML document describing one run.
//!
//! ```toml
//! name = "tunnel-open"
//! duration = 60.0
//! expect = "stuck"
//!
//! [world]
//! boundary = [[0.0, 0.0], [57.0, 0.0], ...]
//! obstacles = [[[19.8, 2.5], ...], ...]
//!
//! [robot]
//! start = [1.0, 2.0, 0.0]   # x, y, heading (rad)
//!
//! [planner]    # any field may be omitted; library defaults apply
//! [sensor]
//! [rates]
//! [pose]       # source = "ground_truth" | "noisy_odometry"
//! ```
//!
//! Angles are radians. The serializer writes every field so that a file
//! reproduces a run bit for bit.

use explore_core::exploration::{FovConfig, GoalZone, PlannerConfig};
use explore_core::sim::{Outcome, PoseSource, Rates, RobotConfig, RobotLimits, RobotPose, ScenarioConfig, SensorConfig, World};
use explore_core::Point2;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileDoc {
    name: String,
    #[serde(default = "default_duration")]
    duration: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    expect: Option<String>,
    world: WorldDoc,
    robot: RobotDoc,
    #[serde(default)]
    planner: PlannerDoc,
    #[serde(default)]
    sensor: SensorDoc,
    #[serde(default)]
    rates: RatesDoc,
    #[serde(default)]
    pose: PoseDoc,
}

fn default_duration() -> f64 {
    60.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WorldDoc {
    boundary: Vec<[f64; 2]>,
    #[serde(default)]
    obstacles: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RobotDoc {
    start: [f64; 3],
    #[serde(default = "RobotDoc::radius")]
    radius: f64,
    #[serde(default = "RobotDoc::v_max")]
    v_max: f64,
    #[serde(default = "RobotDoc::omega_max")]
    omega_max: f64,
    #[serde(default = "RobotDoc::k_heading")]
    k_heading: f64,
}

impl RobotDoc {
    fn radius() -> f64 {
        RobotConfig::default().radius
    }
    fn v_max() -> f64 {
        RobotLimits::default().v_max
    }
    fn omega_max() -> f64 {
        RobotLimits::default().omega_max
    }
    fn k_heading() -> f64 {
        RobotLimits::default().k_heading
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct PlannerDoc {
    epsilon: f64,
    arc_chords: usize,
    fan_size: usize,
    corridor_radius: f64,
    path_samples: usize,
    step_size: f64,
    tracker_cap: f64,
    completion_threshold: f64,
    tangent_from_tracker: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    attraction_rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    goal: Option<GoalDoc>,
}

impl Default for PlannerDoc {
    fn default() -> Self {
        Self::from_config(&PlannerConfig::default())
    }
}

impl PlannerDoc {
    fn from_config(p: &PlannerConfig) -> Self {
        Self {
            epsilon: p.epsilon,
            arc_chords: p.fov.arc_chords,
            fan_size: p.fan_size,
            corridor_radius: p.corridor_radius,
            path_samples: p.path_samples,
            step_size: p.step_size,
            tracker_cap: p.tracker_cap,
            completion_threshold: p.completion_threshold,
            tangent_from_tracker: p.tangent_from_tracker,
            attraction_rate: p.attraction_rate,
            goal: p.goal.map(|g| GoalDoc { center: [g.center.x, g.center.y], radius: g.radius }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GoalDoc {
    center: [f64; 2],
    radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct SensorDoc {
    half_angle: f64,
    max_range: f64,
    rays: usize,
    range_noise_sigma: f64,
    seed: u64,
}

impl Default for SensorDoc {
    fn default() -> Self {
        let s = SensorConfig::default();
        Self { half_angle: s.half_angle, max_range: s.max_range, rays: s.rays, range_noise_sigma: s.range_noise_sigma, seed: s.seed }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RatesDoc {
    sense_hz: f64,
    plan_hz: f64,
    control_hz: f64,
}

impl Default for RatesDoc {
    fn default() -> Self {
        let r = Rates::default();
        Self { sense_hz: r.sense_hz, plan_hz: r.plan_hz, control_hz: r.control_hz }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, tag = "source", rename_all = "snake_case")]
#[derive(Default)]
enum PoseDoc {
    #[default]
    GroundTruth,
    NoisyOdometry { sigma_xy: f64, sigma_heading: f64, seed: u64 },
}


fn point(p: [f64; 2]) -> Point2 {
    Point2::new(p[0], p[1])
}

/// 1-based line holding byte `offset` of `text`.
fn line_at(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].bytes().filter(|&b| b == b'\n').count() + 1
}

/// Best-effort line of `key` inside `[section]` (top level when empty).
fn line_of(text: &str, section: &str, key: &str) -> Option<usize> {
    let mut current = String::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if let Some(name) = t.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            current = name.trim().to_string();
            if key.is_empty() && current == section {
                return Some(i + 1);
            }
            continue;
        }
        if current == section && !key.is_empty() {
            if let Some((k, _)) = t.split_once('=') {
                if k.trim() == key {
                    return Some(i + 1);
                }
            }
        }
    }
    None
}

fn invalid(text: &str, section: &str, key: &str, message: impl Into<String>) -> CliError {
    CliError::Scenario { line: line_of(text, section, key).or_else(|| line_of(text, section, "")), message: message.into() }
}

/// Parse a scenario file. Syntax and type errors carry the offending line;
/// semantic errors point at the key they concern when it can be found.
pub fn parse_scenario(text: &str) -> Result<ScenarioConfig, CliError> {
    let doc: FileDoc = toml::from_str(text).map_err(|e| CliError::Scenario {
        line: e.span().map(|s| line_at(text, s.start)),
        message: e.message().trim().to_string(),
    })?;

    let boundary = doc.world.boundary.iter().copied().map(point).collect();
    let obstacles = doc.world.obstacles.iter().map(|o| o.iter().copied().map(point).collect()).collect();
    let world = World::new(doc.name.clone(), boundary, obstacles)
        .map_err(|e| invalid(text, "world", "boundary", e.to_string()))?;

    let [x, y, h] = doc.robot.start;
    let mut cfg = ScenarioConfig::new(world, RobotPose::new(x, y, h));
    cfg.duration = doc.duration;
    cfg.expect = match doc.expect.as_deref() {
        None => None,
        Some(s) => Some(
            Outcome::from_label(s).ok_or_else(|| invalid(text, "", "expect", format!("unknown outcome `{s}`")))?,
        ),
    };
    cfg.robot.radius = doc.robot.radius;
    cfg.robot.limits = RobotLimits { v_max: doc.robot.v_max, omega_max: doc.robot.omega_max, k_heading: doc.robot.k_heading };

    let s = &doc.sensor;
    cfg.sensor = SensorConfig { half_angle: s.half_angle, max_range: s.max_range, rays: s.rays, range_noise_sigma: s.range_noise_sigma, seed: s.seed };
    let p = &doc.planner;
    cfg.planner = PlannerConfig {
        epsilon: p.epsilon,
        fov: FovConfig { half_angle: s.half_angle, max_range: s.max_range, arc_chords: p.arc_chords },
        fan_size: p.fan_size,
        corridor_radius: p.corridor_radius,
        path_samples: p.path_samples,
        step_size: p.step_size,
        tracker_cap: p.tracker_cap,
        completion_threshold: p.completion_threshold,
        goal: p.goal.as_ref().map(|g| GoalZone { center: point(g.center), radius: g.radius }),
        tangent_from_tracker: p.tangent_from_tracker,
        attraction_rate: p.attraction_rate,
    };
    cfg.rates = Rates { sense_hz: doc.rates.sense_hz, plan_hz: doc.rates.plan_hz, control_hz: doc.rates.control_hz };
    cfg.pose_source = match doc.pose {
        PoseDoc::GroundTruth => PoseSource::GroundTruth,
        PoseDoc::NoisyOdometry { sigma_xy, sigma_heading, seed } => PoseSource::NoisyOdometry { sigma_xy, sigma_heading, seed },
    };

    cfg.planner.validate().map_err(|e| invalid(text, "planner", "", e.to_string()))?;
    cfg.sensor.validate().map_err(|e| invalid(text, "sensor", "", e.to_string()))?;
    cfg.rates.periods().map_err(|e| invalid(text, "rates", "", e.to_string()))?;
    cfg.validate().map_err(|e| invalid(text, "robot", "start", e.to_string()))?;
    Ok(cfg)
}

/// Serialize `cfg` so that [`parse_scenario`] returns an equal config.
pub fn write_scenario(cfg: &ScenarioConfig) -> String {
    let pair = |p: &Point2| [p.x, p.y];
    let s = &cfg.sensor;
    let r = &cfg.robot;
    let doc = FileDoc {
        name: cfg.world.name.clone(),
        duration: cfg.duration,
        expect: cfg.expect.map(|o| o.label().to_string()),
        world: WorldDoc {
            boundary: cfg.world.boundary().iter().map(pair).collect(),
            obstacles: cfg.world.obstacles().iter().map(|o| o.iter().map(pair).collect()).collect(),
        },
        robot: RobotDoc {
            start: [r.start.position.x, r.start.position.y, r.start.heading],
            radius: r.radius,
            v_max: r.limits.v_max,
            omega_max: r.limits.omega_max,
            k_heading: r.limits.k_heading,
        },
        planner: PlannerDoc::from_config(&cfg.planner),
        sensor: SensorDoc { half_angle: s.half_angle, max_range: s.max_range, rays: s.rays, range_noise_sigma: s.range_noise_sigma, seed: s.seed },
        rates: RatesDoc { sense_hz: cfg.rates.sense_hz, plan_hz: cfg.rates.plan_hz, control_hz: cfg.rates.control_hz },
        pose: match cfg.pose_source {
            PoseSource::GroundTruth => PoseDoc::GroundTruth,
            PoseSource::NoisyOdometry { sigma_xy, sigma_heading, seed } => PoseDoc::NoisyOdometry { sigma_xy, sigma_heading, seed },
        },
    };
    toml::to_string(&doc).expect("scenario documents always serialize")
}

/// Builtin name or path to a scenario file.
pub fn load_scenario(spec: &str) -> Result<ScenarioConfig, CliError> {
    if let Some(cfg) = explore_core::sim::builtin(spec) {
        return Ok(cfg);
    }
    let text = std::fs::read_to_string(spec).map_err(|e| CliError::Io { path: spec.into(), source: e })?;
    parse_scenario(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use explore_core::sim::BUILTIN_SCENARIOS;

    #[test]
    fn builtins_round_trip_exactly() {
        for name in BUILTIN_SCENARIOS {
            let cfg = explore_core::sim::builtin(name).unwrap();
            let text = write_scenario(&cfg);
            let back = parse_scenario(&text).unwrap();
            assert_eq!(back, cfg, "{name}");
            assert_eq!(back.fingerprint(), cfg.fingerprint());
        }
    }

    #[test]
    fn minimal_file_uses_defaults() {
        let text = "name = \"box\"\n[world]\nboundary = [[0,0],[10,0],[10,10],[0,10]]\n[robot]\nstart = [5, 5, 0]\n";
        let cfg = parse_scenario(text).unwrap();
        assert_eq!(cfg.planner, PlannerConfig { fov: cfg.planner.fov, ..PlannerConfig::default() });
        assert_eq!(cfg.rates, Rates::default());
        assert_eq!(cfg.duration, 60.0);
    }

    #[test]
    fn syntax_error_reports_line() {
        let text = "name = \"box\"\nduration = 5\n[world]\nboundary = [[0,0],[10,0],\n";
        match parse_scenario(text) {
            Err(CliError::Scenario { line: Some(l), .. }) => assert!(l >= 4, "{l}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_key_reports_line() {
        let text = "name = \"box\"\n[world]\nboundary = [[0,0],[10,0],[10,10],[0,10]]\n[robot]\nstart = [5, 5, 0]\nspeed = 3\n";
        match parse_scenario(text) {
            Err(CliError::Scenario { line: Some(6), message }) => assert!(message.contains("speed"), "{message}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn semantic_errors_point_at_their_section() {
        let text = "name = \"box\"\n[world]\nboundary = [[0,0],[10,0],[10,10],[0,10]]\n[robot]\nstart = [5, 5, 0]\n[rates]\nsense_hz = 7\nplan_hz = 3\ncontrol_hz = 50\n";
        match parse_scenario(text) {
            Err(CliError::Scenario { line: Some(6), .. }) => {}
            other => panic!("{other:?}"),
        }
        let text = "name = \"box\"\n[world]\nboundary = [[0,0],[10,0],[10,10],[0,10]]\n[robot]\nstart = [0.1, 5, 0]\n";
        match parse_scenario(text) {
            Err(CliError::Scenario { line: Some(5), message }) => assert!(message.contains("collides"), "{message}"),
            other => panic!("{other:?}"),
        }
        let text = "name = \"box\"\nexpect = \"won\"\n[world]\nboundary = [[0,0],[10,0],[10,10],[0,10]]\n[robot]\nstart = [5, 5, 0]\n";
        assert!(matches!(parse_scenario(text), Err(CliError::Scenario { line: Some(2), .. })));
    }
}
