//! Trace files: JSON lines.
//!
//! Line 1 is a `header` record carrying the format version, the trace
//! metadata and the full scenario file the run used. Then one `tick` record
//! per control tick; a `path` record precedes the tick that accepted it. The
//! last line is an `end` record with the outcome and record counts. Floats
//! are written with shortest round-trip formatting, so a trace read back is
//! bitwise equal to the one written.

use std::io::Write;

use explore_core::sim::{Outcome, PathRecord, ScenarioConfig, TickRecord, Trace, TraceMeta};
use serde::{Deserialize, Serialize};

use crate::scenario_file::{parse_scenario, write_scenario};
use crate::CliError;

pub const FORMAT: &str = "explore-trace";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Header {
    pub format: String,
    pub version: u32,
    pub meta: TraceMeta,
    pub scenario: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct End {
    pub outcome: Option<Outcome>,
    pub ticks: usize,
    pub paths: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
pub enum Record {
    Header(Header),
    Tick(TickRecord),
    Path(PathRecord),
    End(End),
}

/// A parsed trace together with the scenario embedded in it.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceFile {
    pub scenario: ScenarioConfig,
    pub trace: Trace,
}

fn put<W: Write>(w: &mut W, rec: &Record) -> std::io::Result<()> {
    serde_json::to_writer(&mut *w, rec)?;
    w.write_all(b"\n")
}

pub fn write_trace<W: Write>(w: &mut W, cfg: &ScenarioConfig, trace: &Trace) -> std::io::Result<()> {
    let header = Header {
        format: FORMAT.into(),
        version: FORMAT_VERSION,
        meta: trace.meta.clone(),
        scenario: write_scenario(cfg),
    };
    put(w, &Record::Header(header))?;
    let mut paths = trace.paths.iter().peekable();
    for t in &trace.ticks {
        while let Some(p) = paths.next_if(|p| p.tick <= t.tick) {
            put(w, &Record::Path(*p))?;
        }
        put(w, &Record::Tick(*t))?;
    }
    for p in paths {
        put(w, &Record::Path(*p))?;
    }
    put(w, &Record::End(End { outcome: trace.outcome, ticks: trace.ticks.len(), paths: trace.paths.len() }))
}

pub fn trace_to_string(cfg: &ScenarioConfig, trace: &Trace) -> String {
    let mut buf = Vec::new();
    write_trace(&mut buf, cfg, trace).expect("writing to memory");
    String::from_utf8(buf).expect("JSON is UTF-8")
}

fn bad(line: usize, message: impl Into<String>) -> CliError {
    CliError::Trace { line, message: message.into() }
}

pub fn parse_trace(text: &str) -> Result<TraceFile, CliError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l)).filter(|(_, l)| !l.trim().is_empty());
    let record = |(n, l): (usize, &str)| -> Result<(usize, Record), CliError> {
        serde_json::from_str(l).map(|r| (n, r)).map_err(|e| bad(n, e.to_string()))
    };

    let header = match lines.next().map(record).transpose()? {
        Some((_, Record::Header(h))) => h,
        Some((n, _)) => return Err(bad(n, "first record must be the header")),
        None => return Err(bad(1, "empty trace")),
    };
    if header.format != FORMAT || header.version != FORMAT_VERSION {
        return Err(bad(1, format!("unsupported format {} v{}", header.format, header.version)));
    }
    let scenario = parse_scenario(&header.scenario).map_err(|e| bad(1, format!("embedded {e}")))?;
    if scenario.fingerprint() != header.meta.config_hash {
        return Err(bad(1, "embedded scenario does not match the config hash"));
    }

    let mut trace = Trace { meta: header.meta, ticks: Vec::new(), paths: Vec::new(), outcome: None };
    let mut end = None;
    for item in lines {
        let (n, rec) = record(item)?;
        if end.is_some() {
            return Err(bad(n, "record after end"));
        }
        match rec {
            Record::Tick(t) => {
                if t.tick != trace.ticks.len() as u64 {
                    return Err(bad(n, format!("expected tick {}, found {}", trace.ticks.len(), t.tick)));
                }
                trace.ticks.push(t);
            }
            Record::Path(p) => trace.paths.push(p),
            Record::Header(_) => return Err(bad(n, "second header")),
            Record::End(e) => end = Some((n, e)),
        }
    }
    let Some((n, end)) = end else {
        return Err(bad(text.lines().count().max(1), "missing end record"));
    };
    if end.ticks != trace.ticks.len() || end.paths != trace.paths.len() {
        return Err(bad(n, "record counts do not match the end record"));
    }
    trace.outcome = end.outcome;
    Ok(TraceFile { scenario, trace })
}

pub fn read_trace(path: &std::path::Path) -> Result<TraceFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_trace(&text)
}
