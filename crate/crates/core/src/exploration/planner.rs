use super::candidates::{generate_candidates, CandidateConfig, CandidateSet, Frontier};
use super::coverage::{completion_reached, vertices_to_region, CoverageStack};
use super::select::score_and_select;
use super::vertices::{extract_vertices, scene_changed, FovConfig, LocalVertexSet};
use super::{ExplorationError, PointCloud};
use crate::geometry::{track_step_clamped, PathFunction, Point2, Vec2, DEFAULT_STEP_SIZE, DEFAULT_TRACKER_CAP};
use crate::region::Region2;
use crate::sim::RobotState;

/// Disc that ends exploration once the robot enters it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoalZone {
    pub center: Point2,
    pub radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlannerConfig {
    /// Clustering gap and scene-change tolerance, meters.
    pub epsilon: f64,
    pub fov: FovConfig,
    pub fan_size: usize,
    pub corridor_radius: f64,
    pub path_samples: usize,
    /// Tracker step size.
    pub step_size: f64,
    pub tracker_cap: f64,
    pub completion_threshold: f64,
    pub goal: Option<GoalZone>,
    /// Start new candidates along the tracker direction instead of the body
    /// heading, so consecutive plans keep the turn already under way.
    pub tangent_from_tracker: bool,
    /// Overrides the curvature-based k_e of every candidate.
    pub attraction_rate: Option<f64>,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.3,
            fov: FovConfig::default(),
            fan_size: 9,
            corridor_radius: 0.5,
            path_samples: 48,
            step_size: DEFAULT_STEP_SIZE,
            tracker_cap: DEFAULT_TRACKER_CAP,
            completion_threshold: 0.95,
            goal: None,
            tangent_from_tracker: true,
            attraction_rate: None,
        }
    }
}

impl PlannerConfig {
    pub fn validate(&self) -> Result<(), ExplorationError> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(ExplorationError::Epsilon(self.epsilon));
        }
        self.fov.validate()?;
        if self.fan_size < 3 || self.fan_size.is_multiple_of(2) {
            return Err(ExplorationError::FanSize(self.fan_size));
        }
        if !(self.completion_threshold > 0.0 && self.completion_threshold <= 1.0) {
            return Err(ExplorationError::Threshold(self.completion_threshold));
        }
        if !(self.corridor_radius >= 0.0 && self.step_size > 0.0 && self.tracker_cap > 0.0) {
            return Err(ExplorationError::InvalidConfig("radius, step size and tracker cap"));
        }
        if self.attraction_rate.is_some_and(|k| !(k > 0.0 && k.is_finite())) {
            return Err(ExplorationError::InvalidConfig("attraction rate must be positive"));
        }
        Ok(())
    }

    pub fn candidate_config(&self) -> CandidateConfig {
        CandidateConfig {
            fan_size: self.fan_size,
            corridor_radius: self.corridor_radius,
            samples: self.path_samples,
            epsilon: self.epsilon,
            attraction_rate: self.attraction_rate,
        }
    }
}

/// Planner memory carried between steps.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExplorationState {
    pub stack: CoverageStack,
    /// Path being tracked.
    pub current: Option<PathFunction>,
    /// Scene at the last accepted path.
    pub reference: Option<LocalVertexSet>,
    /// Explored area inside the free space, maintained incrementally.
    pub covered_free: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Decision {
    ContinueTracking,
    NewPath(PathFunction),
    Stuck,
    Complete,
}

impl Decision {
    pub fn label(&self) -> &'static str {
        match self {
            Decision::ContinueTracking => "continue",
            Decision::NewPath(_) => "new_path",
            Decision::Stuck => "stuck",
            Decision::Complete => "complete",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlannerOutput {
    pub decision: Decision,
    pub tracker: Vec2,
    pub chosen_frontier: Option<Frontier>,
    /// Extracted scene; absent when the completion check returned early.
    pub local: Option<LocalVertexSet>,
    /// Present when the scene changed and candidates were scored.
    pub candidates: Option<CandidateSet>,
    pub selected: Option<usize>,
    /// Explored fraction of the free space after this step.
    pub coverage: f64,
}

fn fraction(covered: f64, free: &Region2) -> f64 {
    if free.area() > 0.0 {
        (covered / free.area()).min(1.0)
    } else {
        1.0
    }
}

/// One pass of the exploration loop.
///
/// Order: completion check, vertex extraction, change detection, candidate
/// generation and selection on change, then the tracker update along the
/// current path.
pub fn plan_step(
    robot: &RobotState,
    cloud: &PointCloud,
    mut state: ExplorationState,
    cfg: &PlannerConfig,
    free_space: &Region2,
) -> Result<(PlannerOutput, ExplorationState), ExplorationError> {
    cfg.validate()?;
    let pose = &robot.pose;
    let goal_hit = cfg
        .goal
        .is_some_and(|g| g.center.distance(pose.position) <= g.radius);
    if goal_hit || completion_reached(state.covered_free, free_space.area(), cfg.completion_threshold) {
        let out = PlannerOutput {
            decision: Decision::Complete,
            tracker: robot.tracker,
            chosen_frontier: None,
            local: None,
            candidates: None,
            selected: None,
            coverage: fraction(state.covered_free, free_space),
        };
        return Ok((out, state));
    }

    let local = extract_vertices(cloud, cfg.epsilon, &cfg.fov, pose)?;
    let changed = state
        .reference
        .as_ref()
        .is_none_or(|r| scene_changed(r, &local, cfg.epsilon));

    let mut decision = Decision::ContinueTracking;
    let mut chosen_frontier = None;
    let mut candidates = None;
    let mut selected = None;
    if changed {
        let t = robot.tracker;
        let tangent = if cfg.tangent_from_tracker && (t.dx != 0.0 || t.dy != 0.0) { t.angle() } else { pose.heading };
        let set = generate_candidates(&local, pose, tangent, &cfg.candidate_config())?;
        match score_and_select(&set, &local, cfg.epsilon) {
            Some(sel) => {
                let region = vertices_to_region(&local, pose);
                let delta = state.stack.push(sel.path, cloud.stamp, &region)?;
                state.covered_free += free_space.intersection_area(&delta);
                state.current = Some(sel.path);
                state.reference = Some(local.clone());
                decision = Decision::NewPath(sel.path);
                chosen_frontier = Some(sel.frontier);
                selected = Some(sel.index);
            }
            None => {
                state.current = None;
                state.reference = None;
                decision = Decision::Stuck;
            }
        }
        candidates = Some(set);
    }

    let tracker = match &state.current {
        Some(phi) => track_step_clamped(robot.tracker, phi, pose.position, cfg.step_size, cfg.tracker_cap),
        None => robot.tracker,
    };
    let out = PlannerOutput {
        decision,
        tracker,
        chosen_frontier,
        local: Some(local),
        candidates,
        selected,
        coverage: fraction(state.covered_free, free_space),
    };
    Ok((out, state))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exploration::{is_complete, RangeReturn};
    use crate::polygon::ConvexPolygon;
    use crate::sim::RobotPose;
    use alloc::vec::Vec;

    fn sweep(cfg: &PlannerConfig, stamp: f64, range_at: impl Fn(f64) -> Option<f64>) -> PointCloud {
        let rays = 96;
        let h = cfg.fov.half_angle;
        let returns = (0..rays)
            .map(|i| {
                let b = h * (2.0 * i as f64 - (rays - 1) as f64) / (rays - 1) as f64;
                range_at(b).map_or(RangeReturn::free(cfg.fov.max_range, b), |r| RangeReturn::hit(r, b))
            })
            .collect();
        PointCloud::new(returns, stamp, cfg.fov.max_range).unwrap()
    }

    fn big_free() -> Region2 {
        Region2::from_convex(ConvexPolygon::rect(Point2::new(-50.0, -50.0), Point2::new(50.0, 50.0)))
    }

    #[test]
    fn open_scene_picks_straight_line_then_continues() {
        let cfg = PlannerConfig::default();
        let robot = RobotState::at_rest(RobotPose::new(0.0, 0.0, 0.0));
        let free = big_free();
        let (out, st) = plan_step(&robot, &sweep(&cfg, 0.1, |_| None), ExplorationState::default(), &cfg, &free).unwrap();
        let Decision::NewPath(phi) = out.decision else { panic!("{:?}", out.decision) };
        assert!(phi.coeffs.is_zero());
        assert!(out.chosen_frontier.is_some());
        assert_eq!(st.stack.len(), 1);
        assert!(out.tracker.dx > 1.0 && out.tracker.dy.abs() < 1e-12);

        let (out2, st2) = plan_step(&robot, &sweep(&cfg, 0.2, |_| None), st, &cfg, &free).unwrap();
        assert_eq!(out2.decision, Decision::ContinueTracking);
        assert_eq!(st2.stack.len(), 1);
    }

    #[test]
    fn covered_space_completes() {
        let cfg = PlannerConfig::default();
        let robot = RobotState::at_rest(RobotPose::new(0.0, 0.0, 0.0));
        let free = Region2::from_convex(ConvexPolygon::rect(Point2::new(0.5, -0.5), Point2::new(1.5, 0.5)));
        let (out, st) = plan_step(&robot, &sweep(&cfg, 0.1, |_| None), ExplorationState::default(), &cfg, &free).unwrap();
        assert!(matches!(out.decision, Decision::NewPath(_)));
        assert!(is_complete(&st.stack, &free, 0.95));
        assert!((st.covered_free - free.intersection_area(st.stack.explored())).abs() < 1e-9);
        let (out2, _) = plan_step(&robot, &sweep(&cfg, 0.2, |_| None), st, &cfg, &free).unwrap();
        assert_eq!(out2.decision, Decision::Complete);
    }

    #[test]
    fn wall_across_fov_is_stuck() {
        let cfg = PlannerConfig::default();
        let robot = RobotState::at_rest(RobotPose::new(0.0, 0.0, 0.0));
        let free = big_free();
        let (_, st) = plan_step(&robot, &sweep(&cfg, 0.1, |_| None), ExplorationState::default(), &cfg, &free).unwrap();
        let wall = |b: f64| Some(1.2 / libm::cos(b));
        let (out, st) = plan_step(&robot, &sweep(&cfg, 0.2, wall), st, &cfg, &free).unwrap();
        assert_eq!(out.decision, Decision::Stuck);
        assert!(!out.candidates.unwrap().any_feasible());
        assert!(st.current.is_none());
        assert_eq!(out.tracker, robot.tracker);
    }

    #[test]
    fn coverage_is_monotone_over_a_sequence() {
        let cfg = PlannerConfig::default();
        let free = big_free();
        let mut st = ExplorationState::default();
        let mut last_area = 0.0;
        let mut stamps: Vec<f64> = Vec::new();
        for k in 0..20 {
            let robot = RobotState::at_rest(RobotPose::new(k as f64 * 0.7, 0.0, 0.05 * k as f64));
            let off = k as f64 * 0.1;
            let cloud = sweep(&cfg, 0.1 * (k + 1) as f64, |b| (b > 0.3 + off * 0.1).then_some(3.0 + off));
            let (_, next) = plan_step(&robot, &cloud, st, &cfg, &free).unwrap();
            st = next;
            assert!(st.stack.explored().area() >= last_area);
            last_area = st.stack.explored().area();
            stamps = st.stack.entries().iter().map(|e| e.t).collect();
        }
        assert!(stamps.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn config_validation() {
        let bad = PlannerConfig { fan_size: 4, ..Default::default() };
        assert_eq!(bad.validate(), Err(ExplorationError::FanSize(4)));
        let bad = PlannerConfig { completion_threshold: 0.0, ..Default::default() };
        assert!(bad.validate().is_err());
        assert!(PlannerConfig::default().validate().is_ok());
    }
}
