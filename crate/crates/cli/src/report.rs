use std::collections::BTreeMap;

use explore_core::sim::{Outcome, ScenarioConfig, TickKind, Trace};
use serde::{Deserialize, Serialize};

/// Summary of one run. Everything outside `metadata` is a pure function of
/// the trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub scenario: String,
    pub outcome: Option<String>,
    pub expected: Option<String>,
    pub coverage: f64,
    /// Meters.
    pub distance: f64,
    pub sim_time: f64,
    pub ticks: usize,
    pub paths: usize,
    pub collisions: usize,
    /// Tick count per decision kind.
    pub decisions: BTreeMap<String, usize>,
    /// FNV-1a of the scenario config, hex.
    pub config_hash: String,
    pub metadata: Metadata,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub wall_time: f64,
    pub version: String,
}

impl RunReport {
    pub fn new(cfg: &ScenarioConfig, trace: &Trace, wall_time: f64) -> Self {
        let label = |o: Option<Outcome>| o.map(|o| o.label().to_string());
        Self {
            scenario: cfg.world.name.clone(),
            outcome: label(trace.outcome),
            expected: label(cfg.expect),
            coverage: trace.final_coverage().clamp(0.0, 1.0),
            distance: trace.distance(),
            sim_time: trace.ticks.last().map_or(0.0, |r| r.t),
            ticks: trace.ticks.len(),
            paths: trace.paths.len(),
            collisions: trace.ticks.iter().filter(|r| r.collision).count(),
            decisions: TickKind::ALL.iter().map(|&k| (k.label().to_string(), trace.count(k))).collect(),
            config_hash: format!("{:016x}", trace.meta.config_hash),
            metadata: Metadata { wall_time, version: env!("CARGO_PKG_VERSION").into() },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize") + "\n"
    }
}
