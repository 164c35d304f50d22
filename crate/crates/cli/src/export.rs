//! Artifacts derived from a trace: trajectory table, point map, field panel.

use std::fmt::Write as _;

use explore_core::geometry::{sample_field_grid, Rect};
use explore_core::sim::{ScenarioConfig, Simulation, Trace};
use explore_core::Point2;

use crate::trace_file::TraceFile;
use crate::CliError;

/// Default height of the planar slice in the point map, meters.
pub const SLICE_HEIGHT: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportKind {
    Trajectory,
    PointMap,
    FieldSvg,
}

impl ExportKind {
    pub fn file_name(self) -> &'static str {
        match self {
            ExportKind::Trajectory => "trajectory.csv",
            ExportKind::PointMap => "points.xyz",
            ExportKind::FieldSvg => "field.svg",
        }
    }
}

pub const TRAJECTORY_COLUMNS: [&str; 11] =
    ["tick", "t", "x", "y", "heading", "v", "omega", "kind", "path_id", "coverage", "collision"];

/// One row per tick, comma separated, with a header row.
pub fn trajectory_csv(trace: &Trace) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(TRAJECTORY_COLUMNS).expect("in-memory csv");
    for r in &trace.ticks {
        w.write_record([
            r.tick.to_string(),
            r.t.to_string(),
            r.pose.position.x.to_string(),
            r.pose.position.y.to_string(),
            r.pose.heading.to_string(),
            r.v.to_string(),
            r.omega.to_string(),
            r.kind.label().to_string(),
            r.path_id.map(|p| p.to_string()).unwrap_or_default(),
            r.coverage.to_string(),
            u8::from(r.collision).to_string(),
        ])
        .expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("csv is UTF-8")
}

/// Runs `cfg` to its end, collecting the world-frame obstacle hits of every
/// sweep in sensing order.
pub fn run_collecting(cfg: &ScenarioConfig) -> Result<(Trace, Vec<Point2>), CliError> {
    let mut sim = Simulation::new(cfg.clone())?;
    let period = sim.sense_period();
    let mut points = Vec::new();
    loop {
        let k = sim.tick();
        let pose = sim.state().pose;
        if sim.step()?.is_none() {
            break;
        }
        if k % period == 0 {
            let cloud = sim.cloud().expect("sense tick produced a sweep");
            points.extend(cloud.returns().iter().filter(|r| !r.free).map(|r| pose.polar_to_world(r.bearing, r.range)));
        }
    }
    Ok((sim.into_trace(), points))
}

/// Sensed points of a recorded run, re-simulated from its embedded scenario.
/// Fails when the trace does not reproduce.
pub fn sensed_points(file: &TraceFile) -> Result<Vec<Point2>, CliError> {
    let (trace, points) = run_collecting(&file.scenario)?;
    if let Some(k) = trace.first_divergence(&file.trace) {
        return Err(CliError::Range(format!("trace does not reproduce from its scenario (tick {k}); no point map")));
    }
    Ok(points)
}

/// Every `n`-th point, starting with the first.
pub fn filter_points(points: &[Point2], n: usize) -> Result<Vec<Point2>, CliError> {
    if n == 0 {
        return Err(CliError::Usage("filter-n must be at least 1".into()));
    }
    Ok(points.iter().step_by(n).copied().collect())
}

/// `x y z` per line; the slice lies in the plane `z = height`.
pub fn point_map(points: &[Point2], height: f64) -> String {
    let mut s = String::with_capacity(points.len() * 24);
    for p in points {
        let _ = writeln!(s, "{} {} {}", p.x, p.y, height);
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSvgOptions {
    /// Half side of the square view around the robot, meters.
    pub half_extent: f64,
    /// Arrows per side.
    pub arrows: usize,
    /// Pixels per meter.
    pub scale: f64,
}

impl Default for FieldSvgOptions {
    fn default() -> Self {
        Self { half_extent: 6.0, arrows: 17, scale: 40.0 }
    }
}

struct View {
    min: Point2,
    max: Point2,
    scale: f64,
}

impl View {
    fn px(&self, p: Point2) -> (f64, f64) {
        ((p.x - self.min.x) * self.scale, (self.max.y - p.y) * self.scale)
    }

    fn points(&self, pts: impl IntoIterator<Item = Point2>) -> String {
        pts.into_iter()
            .map(|p| {
                let (x, y) = self.px(p);
                format!("{x:.2},{y:.2}")
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Guidance field around the robot at `tick`: arrows, the zero contour of
/// the active path, obstacles, frontier and the trajectory so far.
pub fn field_svg(cfg: &ScenarioConfig, trace: &Trace, tick: u64, opts: FieldSvgOptions) -> Result<String, CliError> {
    let rec = usize::try_from(tick)
        .ok()
        .and_then(|i| trace.ticks.get(i))
        .ok_or_else(|| CliError::Range(format!("tick {tick} is outside 0..{}", trace.ticks.len())))?;
    let id = rec.path_id.ok_or_else(|| CliError::Range(format!("no path is active at tick {tick}")))?;
    let path = trace.path(id).ok_or_else(|| CliError::Range(format!("path {id} missing from the trace")))?;
    let phi = &path.path;

    let c = rec.pose.position;
    let h = opts.half_extent;
    let view = View { min: Point2::new(c.x - h, c.y - h), max: Point2::new(c.x + h, c.y + h), scale: opts.scale };
    let side = 2.0 * h * opts.scale;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{side:.0}" height="{side:.0}" viewBox="0 0 {side:.0} {side:.0}">"#
    );
    let _ = writeln!(s, r#"<rect class="background" width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<polygon class="boundary" points="{}" fill="none" stroke="black" stroke-width="2"/>"#,
        view.points(cfg.world.boundary().iter().copied())
    );
    for o in cfg.world.obstacles() {
        let _ = writeln!(s, r#"<polygon class="obstacle" points="{}" fill="gray"/>"#, view.points(o.iter().copied()));
    }

    let res = 2.0 * h / (opts.arrows.max(2) - 1) as f64;
    let grid = sample_field_grid(phi, Rect::new(view.min, view.max), res).map_err(|e| CliError::Range(e.to_string()))?;
    let len = 0.4 * res;
    for g in grid {
        let n = g.guidance.norm();
        if !(n > 1e-12) {
            continue;
        }
        let tip = g.at + g.guidance * (len / n);
        let (x1, y1) = view.px(g.at);
        let (x2, y2) = view.px(tip);
        let _ = writeln!(
            s,
            r#"<line class="arrow" x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="steelblue" marker-end="url(#head)"/>"#
        );
    }

    // zero contour, clipped to the view
    let n = 400;
    let reach = 4.0 * h;
    let inside = |p: Point2| p.x >= view.min.x && p.x <= view.max.x && p.y >= view.min.y && p.y <= view.max.y;
    let mut d = String::new();
    let mut pen_down = false;
    for i in 0..=n {
        let p = phi.point_at(-reach + 2.0 * reach * i as f64 / n as f64);
        if inside(p) {
            let (x, y) = view.px(p);
            let _ = write!(d, "{}{x:.2},{y:.2} ", if pen_down { "L" } else { "M" });
            pen_down = true;
        } else {
            pen_down = false;
        }
    }
    if !d.is_empty() {
        let _ = writeln!(s, r#"<path class="contour" d="{}" fill="none" stroke="cyan" stroke-width="3"/>"#, d.trim_end());
    }

    let (a, b) = path.frontier.endpoints;
    let ((x1, y1), (x2, y2)) = (view.px(a), view.px(b));
    let _ = writeln!(
        s,
        r#"<line class="frontier" x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="orange" stroke-width="2"/>"#
    );
    let upto = &trace.ticks[..=tick as usize];
    let _ = writeln!(
        s,
        r#"<polyline class="trajectory" points="{}" fill="none" stroke="red"/>"#,
        view.points(upto.iter().map(|r| r.pose.position))
    );
    let (rx, ry) = view.px(c);
    let _ = writeln!(
        s,
        r#"<circle class="robot" cx="{rx:.2}" cy="{ry:.2}" r="{:.2}" fill="none" stroke="black"/>"#,
        cfg.robot.radius * opts.scale
    );
    let _ = writeln!(
        s,
        r#"<defs><marker id="head" markerWidth="6" markerHeight="6" refX="5" refY="3" orient="auto"><path d="M0,0 L6,3 L0,6 z" fill="steelblue"/></marker></defs>"#
    );
    s.push_str("</svg>\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filter_keeps_every_nth() {
        let pts: Vec<Point2> = (0..250_000).map(|i| Point2::new(i as f64, 0.0)).collect();
        let kept = filter_points(&pts, 250).unwrap();
        assert_eq!(kept.len(), 1000);
        assert_eq!(kept[1].x, 250.0);
        assert_eq!(filter_points(&pts, 1).unwrap(), pts);
        assert!(filter_points(&pts, 0).is_err());
    }

    #[test]
    fn point_map_lines() {
        let s = point_map(&[Point2::new(1.5, -2.0), Point2::new(0.1, 3.0)], 0.3);
        assert_eq!(s, "1.5 -2 0.3\n0.1 3 0.3\n");
    }
}
