use alloc::vec::Vec;

use super::ExplorationError;
use crate::geometry::Point2;
use crate::math;

/// One ray of a planar range sweep, in the sensor frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeReturn {
    pub range: f64,
    pub bearing: f64,
    /// Nothing was hit; `range` is the sensor limit.
    pub free: bool,
}

impl RangeReturn {
    pub fn hit(range: f64, bearing: f64) -> Self {
        Self { range, bearing, free: false }
    }

    pub fn free(max_range: f64, bearing: f64) -> Self {
        Self { range: max_range, bearing, free: true }
    }

    /// Cartesian point in the sensor frame.
    pub fn local(&self) -> Point2 {
        let (s, c) = math::sin_cos(self.bearing);
        Point2::new(self.range * c, self.range * s)
    }
}

/// An angular sweep, ordered right to left.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    returns: Vec<RangeReturn>,
    pub stamp: f64,
    pub max_range: f64,
}

impl PointCloud {
    pub fn new(returns: Vec<RangeReturn>, stamp: f64, max_range: f64) -> Result<Self, ExplorationError> {
        if !(max_range.is_finite() && max_range > 0.0) || !stamp.is_finite() {
            return Err(ExplorationError::InvalidCloud("bad stamp or max range"));
        }
        for w in returns.windows(2) {
            if !(w[1].bearing > w[0].bearing) {
                return Err(ExplorationError::InvalidCloud("bearings not strictly increasing"));
            }
        }
        for r in &returns {
            if !r.bearing.is_finite() || !(r.range >= 0.0 && r.range <= max_range) {
                return Err(ExplorationError::InvalidCloud("range outside [0, max_range]"));
            }
        }
        Ok(Self { returns, stamp, max_range })
    }

    pub fn empty(stamp: f64, max_range: f64) -> Self {
        Self { returns: Vec::new(), stamp, max_range }
    }

    #[inline]
    pub fn returns(&self) -> &[RangeReturn] {
        &self.returns
    }

    pub fn len(&self) -> usize {
        self.returns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.returns.is_empty()
    }

    pub fn hit_count(&self) -> usize {
        self.returns.iter().filter(|r| !r.free).count()
    }

    /// Smallest hit range, if anything was hit.
    pub fn min_hit_range(&self) -> Option<f64> {
        self.returns.iter().filter(|r| !r.free).map(|r| r.range).reduce(f64::min)
    }
}
