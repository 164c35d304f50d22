use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

use super::{RobotPose, SimError, World};
use crate::exploration::{FovConfig, PointCloud, RangeReturn};
use crate::geometry::Vec2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorConfig {
    pub half_angle: f64,
    pub max_range: f64,
    pub rays: usize,
    pub range_noise_sigma: f64,
    pub seed: u64,
}

impl Default for SensorConfig {
    fn default() -> Self {
        Self { half_angle: 43.5_f64.to_radians(), max_range: 6.0, rays: 96, range_noise_sigma: 0.01, seed: 1 }
    }
}

impl SensorConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if self.rays < 2 {
            return Err(SimError::InvalidConfig("sensor needs at least 2 rays"));
        }
        if !(self.max_range > 0.0 && self.max_range.is_finite()) {
            return Err(SimError::InvalidConfig("sensor max range must be > 0"));
        }
        if !(self.range_noise_sigma >= 0.0 && self.range_noise_sigma.is_finite()) {
            return Err(SimError::InvalidConfig("sensor noise sigma must be >= 0"));
        }
        if !(self.half_angle > 0.0 && self.half_angle <= core::f64::consts::FRAC_PI_2) {
            return Err(SimError::InvalidConfig("sensor half angle must lie in (0, pi/2]"));
        }
        Ok(())
    }

    /// Ray bearing `i`, symmetric about zero.
    pub fn bearing(&self, i: usize) -> f64 {
        let n = (self.rays - 1) as f64;
        self.half_angle * (2.0 * i as f64 - n) / n
    }

    /// Matching planner field of view.
    pub fn fov(&self, arc_chords: usize) -> FovConfig {
        FovConfig { half_angle: self.half_angle, max_range: self.max_range, arc_chords }
    }
}

/// Planar ray-cast range sensor with its own seeded noise stream.
#[derive(Debug, Clone)]
pub struct RangeSensor {
    cfg: SensorConfig,
    rng: ChaCha8Rng,
}

impl RangeSensor {
    pub fn new(cfg: SensorConfig) -> Result<Self, SimError> {
        cfg.validate()?;
        Ok(Self { cfg, rng: ChaCha8Rng::seed_from_u64(cfg.seed) })
    }

    pub fn config(&self) -> &SensorConfig {
        &self.cfg
    }

    /// One sweep from `pose`. Every ray draws one noise sample so the stream
    /// stays aligned regardless of what is hit.
    pub fn sense(&mut self, world: &World, pose: &RobotPose, stamp: f64) -> Result<PointCloud, SimError> {
        if !world.contains(pose.position) {
            return Err(SimError::PoseOutside { x: pose.position.x, y: pose.position.y });
        }
        let c = self.cfg;
        let mut returns = Vec::with_capacity(c.rays);
        for i in 0..c.rays {
            let b = c.bearing(i);
            let z: f64 = StandardNormal.sample(&mut self.rng);
            let dir = Vec2::from_angle(pose.heading + b);
            let ret = match world.cast_ray(pose.position, dir, c.max_range) {
                Some(r) => RangeReturn::hit((r + c.range_noise_sigma * z).clamp(0.0, c.max_range), b),
                None => RangeReturn::free(c.max_range, b),
            };
            returns.push(ret);
        }
        PointCloud::new(returns, stamp, c.max_range).map_err(|_| SimError::InvalidConfig("sensor produced an invalid cloud"))
    }
}

/// Wrapper for one-off sweeps with a fresh noise stream.
pub fn sense(world: &World, pose: &RobotPose, cfg: &SensorConfig) -> Result<PointCloud, SimError> {
    RangeSensor::new(*cfg)?.sense(world, pose, 0.0)
}
