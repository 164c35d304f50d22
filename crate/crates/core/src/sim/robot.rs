use crate::geometry::{Point2, Vec2};
use crate::math;

/// Planar pose in the world frame; heading in `(-pi, pi]`.
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobotPose {
    pub position: Point2,
    pub heading: f64,
}

impl RobotPose {
    pub fn new(x: f64, y: f64, heading: f64) -> Self {
        Self { position: Point2::new(x, y), heading: math::wrap_angle(heading) }
    }

    /// Sensor-frame polar point to the world frame.
    pub fn polar_to_world(&self, bearing: f64, range: f64) -> Point2 {
        self.position.polar_offset(self.heading + bearing, range)
    }
}

/// Pose plus commanded velocities and the accumulated tracker vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobotState {
    pub pose: RobotPose,
    pub linear_velocity: f64,
    pub angular_velocity: f64,
    pub tracker: Vec2,
}

impl RobotState {
    /// At rest with the tracker pointing along the heading.
    pub fn at_rest(pose: RobotPose) -> Self {
        Self { pose, linear_velocity: 0.0, angular_velocity: 0.0, tracker: Vec2::from_angle(pose.heading) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobotLimits {
    /// m/s
    pub v_max: f64,
    /// rad/s
    pub omega_max: f64,
    /// heading-error gain of the steering law
    pub k_heading: f64,
}

impl Default for RobotLimits {
    fn default() -> Self {
        Self { v_max: 0.5, omega_max: 1.0, k_heading: 2.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Command {
    pub v: f64,
    pub omega: f64,
}

impl Command {
    pub const STOP: Command = Command { v: 0.0, omega: 0.0 };

    pub fn clamped(self, limits: &RobotLimits) -> Command {
        Command {
            v: self.v.clamp(-limits.v_max, limits.v_max),
            omega: self.omega.clamp(-limits.omega_max, limits.omega_max),
        }
    }
}

/// Unicycle integration over `dt` using the midpoint heading.
pub fn step_robot(state: &RobotState, cmd: Command, dt: f64) -> RobotState {
    debug_assert!(dt > 0.0);
    if cmd.v == 0.0 && cmd.omega == 0.0 {
        return RobotState { linear_velocity: 0.0, angular_velocity: 0.0, ..*state };
    }
    let h0 = state.pose.heading;
    let mid = h0 + 0.5 * cmd.omega * dt;
    let (s, c) = math::sin_cos(mid);
    let position = Point2::new(
        state.pose.position.x + cmd.v * c * dt,
        state.pose.position.y + cmd.v * s * dt,
    );
    RobotState {
        pose: RobotPose { position, heading: math::wrap_angle(h0 + cmd.omega * dt) },
        linear_velocity: cmd.v,
        angular_velocity: cmd.omega,
        tracker: state.tracker,
    }
}

/// Turns the tracker direction into wheel commands. Never reverses.
pub fn steer_from_tracker(state: &RobotState, limits: &RobotLimits) -> Command {
    let t = state.tracker;
    if t.dx == 0.0 && t.dy == 0.0 {
        return Command::STOP;
    }
    let err = math::wrap_angle(t.angle() - state.pose.heading);
    let omega = (limits.k_heading * err).clamp(-limits.omega_max, limits.omega_max);
    let v = limits.v_max * math::cos(err).max(0.0);
    Command { v, omega }
}
