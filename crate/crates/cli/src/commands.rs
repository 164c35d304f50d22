//! The four verbs, callable without a process boundary.

use std::path::{Path, PathBuf};
use std::time::Instant;

use explore_core::link::LinkConfig;
use explore_core::sim::scenario::describe;
use explore_core::sim::{Outcome, ScenarioConfig, Trace, BUILTIN_SCENARIOS};

use crate::export::{self, ExportKind, FieldSvgOptions};
use crate::report::RunReport;
use crate::scenario_file::load_scenario;
use crate::trace_file::{read_trace, trace_to_string};
use crate::{exit, CliError};

/// Scalar knobs that may override a scenario file.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub sense_hz: Option<f64>,
    pub plan_hz: Option<f64>,
    pub control_hz: Option<f64>,
    pub seed: Option<u64>,
    pub attraction_rate: Option<f64>,
    pub step_size: Option<f64>,
    pub epsilon: Option<f64>,
    pub duration: Option<f64>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut ScenarioConfig) {
        let set = |dst: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *dst = v;
            }
        };
        set(&mut cfg.rates.sense_hz, self.sense_hz);
        set(&mut cfg.rates.plan_hz, self.plan_hz);
        set(&mut cfg.rates.control_hz, self.control_hz);
        set(&mut cfg.planner.step_size, self.step_size);
        set(&mut cfg.planner.epsilon, self.epsilon);
        set(&mut cfg.duration, self.duration);
        if let Some(s) = self.seed {
            cfg.sensor.seed = s;
        }
        if self.attraction_rate.is_some() {
            cfg.planner.attraction_rate = self.attraction_rate;
        }
    }
}

/// What `run` produced.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub report: RunReport,
    pub trace: Trace,
    pub dir: PathBuf,
    pub exit_code: i32,
}

/// Exit code for a finished run.
pub fn outcome_exit_code(trace: &Trace, expect: Option<Outcome>) -> i32 {
    if trace.any_collision() || trace.outcome == Some(Outcome::Collision) {
        return exit::COLLISION;
    }
    let ok = match expect {
        Some(e) => trace.outcome == Some(e),
        None => trace.outcome == Some(Outcome::Complete),
    };
    if ok {
        exit::SUCCESS
    } else {
        exit::UNEXPECTED
    }
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

/// Runs a builtin or file scenario and writes `trace.jsonl`, `report.json`,
/// `trajectory.csv` and `points.xyz` under `out_root/<name>/`.
pub fn cmd_run(scenario: &str, overrides: &Overrides, out_root: &Path, filter_n: usize) -> Result<RunResult, CliError> {
    let mut cfg = load_scenario(scenario)?;
    overrides.apply(&mut cfg);
    cfg.validate()?;
    let started = Instant::now();
    let (trace, points) = export::run_collecting(&cfg)?;
    let wall = started.elapsed().as_secs_f64();

    let dir = out_root.join(&cfg.world.name);
    std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    let report = RunReport::new(&cfg, &trace, wall);
    write(&dir.join("trace.jsonl"), &trace_to_string(&cfg, &trace))?;
    write(&dir.join("report.json"), &report.to_json())?;
    write(&dir.join(ExportKind::Trajectory.file_name()), &export::trajectory_csv(&trace))?;
    let kept = export::filter_points(&points, filter_n)?;
    write(&dir.join(ExportKind::PointMap.file_name()), &export::point_map(&kept, export::SLICE_HEIGHT))?;
    let exit_code = outcome_exit_code(&trace, cfg.expect);
    Ok(RunResult { report, trace, dir, exit_code })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExportRequest {
    pub kind: ExportKind,
    pub filter_n: usize,
    pub tick: Option<u64>,
    pub height: f64,
}

impl Default for ExportRequest {
    fn default() -> Self {
        Self { kind: ExportKind::Trajectory, filter_n: 1, tick: None, height: export::SLICE_HEIGHT }
    }
}

/// Renders one export of `trace_path`. The output depends only on the trace.
pub fn render_export(trace_path: &Path, req: &ExportRequest) -> Result<String, CliError> {
    let file = read_trace(trace_path)?;
    match req.kind {
        ExportKind::Trajectory => Ok(export::trajectory_csv(&file.trace)),
        ExportKind::PointMap => {
            let points = export::sensed_points(&file)?;
            Ok(export::point_map(&export::filter_points(&points, req.filter_n)?, req.height))
        }
        ExportKind::FieldSvg => {
            let tick = match req.tick {
                Some(t) => t,
                None => first_tick_with_path(&file.trace)
                    .ok_or_else(|| CliError::Range("the trace never accepted a path".into()))?,
            };
            export::field_svg(&file.scenario, &file.trace, tick, FieldSvgOptions::default())
        }
    }
}

fn first_tick_with_path(trace: &Trace) -> Option<u64> {
    trace.ticks.iter().find(|r| r.path_id.is_some()).map(|r| r.tick)
}

/// Writes the export next to the trace unless `out` is given.
pub fn cmd_export(trace_path: &Path, req: &ExportRequest, out: Option<&Path>) -> Result<PathBuf, CliError> {
    let text = render_export(trace_path, req)?;
    let dest = match out {
        Some(p) => p.to_path_buf(),
        None => trace_path.with_file_name(req.kind.file_name()),
    };
    write(&dest, &text)?;
    Ok(dest)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplayReport {
    pub ticks: usize,
    /// First tick whose record, accepted path or outcome differs.
    pub first_divergence: Option<u64>,
    pub link: LinkConfig,
}

impl ReplayReport {
    pub fn matches(&self) -> bool {
        self.first_divergence.is_none()
    }

    pub fn exit_code(&self) -> i32 {
        if self.matches() {
            exit::SUCCESS
        } else {
            exit::MISMATCH
        }
    }
}

/// Tick at which `got` first departs from `want`.
pub fn divergence(want: &Trace, got: &Trace) -> Option<u64> {
    if let Some(i) = want.first_divergence(got) {
        return Some(i as u64);
    }
    let n = want.paths.len().min(got.paths.len());
    if let Some(i) = (0..n).find(|&i| !same_path(&want.paths[i], &got.paths[i])) {
        return Some(want.paths[i].tick.min(got.paths[i].tick));
    }
    if want.paths.len() != got.paths.len() {
        let tick = want.paths.get(n).or(got.paths.get(n)).map_or(0, |p| p.tick);
        return Some(tick);
    }
    if want.outcome != got.outcome || want.meta != got.meta {
        return Some(want.ticks.len().saturating_sub(1) as u64);
    }
    None
}

fn same_path(a: &explore_core::sim::PathRecord, b: &explore_core::sim::PathRecord) -> bool {
    // f64 Debug is round-trip exact and keeps the sign of zero
    format!("{a:?}") == format!("{b:?}")
}

/// Re-runs the embedded scenario and compares bit for bit. Headless traces
/// carry no radio traffic, so `link` is validated and echoed only.
pub fn cmd_replay(trace_path: &Path, link: LinkConfig) -> Result<ReplayReport, CliError> {
    link.validate()?;
    let file = read_trace(trace_path)?;
    let (again, _) = export::run_collecting(&file.scenario)?;
    Ok(ReplayReport { ticks: file.trace.ticks.len(), first_divergence: divergence(&file.trace, &again), link })
}

/// `(name, description)` of every builtin scenario.
pub fn list_scenarios() -> Vec<(&'static str, String)> {
    BUILTIN_SCENARIOS.iter().map(|&n| (n, describe(n).unwrap_or_default())).collect()
}
