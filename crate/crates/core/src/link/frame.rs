use alloc::vec::Vec;

use crc::{Crc, CRC_16_IBM_3740};

use super::LinkError;
use crate::geometry::{Point2, Vec2};

pub const VERSION: u8 = 1;
pub const MAX_FRAME_LEN: usize = 222;
pub const HEADER_LEN: usize = 2;
pub const CRC_LEN: usize = 2;

// x, y, heading, coverage, mode, count
const TELEMETRY_FIXED: usize = 4 + 4 + 2 + 2 + 1 + 1;
pub const MAX_TELEMETRY_VERTICES: usize = (MAX_FRAME_LEN - HEADER_LEN - CRC_LEN - TELEMETRY_FIXED) / 4;

// CCITT-FALSE: poly 0x1021, init 0xFFFF, no reflection, no final xor
const CCITT: Crc<u16> = Crc::<u16>::new(&CRC_16_IBM_3740);

pub fn crc16(bytes: &[u8]) -> u16 {
    CCITT.checksum(bytes)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum FrameKind {
    Control = 1,
    Position = 2,
    Stuck = 3,
    Telemetry = 4,
    Ack = 5,
}

impl FrameKind {
    pub fn from_nibble(n: u8) -> Option<Self> {
        Some(match n {
            1 => FrameKind::Control,
            2 => FrameKind::Position,
            3 => FrameKind::Stuck,
            4 => FrameKind::Telemetry,
            5 => FrameKind::Ack,
            _ => return None,
        })
    }
}

/// Fixed-point helpers shared by the payload types.
pub mod fixed {
    use super::LinkError;

    fn quantize(v: f64, scale: f64, min: f64, max: f64, field: &'static str) -> Result<f64, LinkError> {
        let q = libm::round(v * scale);
        if !q.is_finite() || q < min || q > max {
            return Err(LinkError::OutOfRange(field));
        }
        Ok(q)
    }

    pub fn to_i16(v: f64, scale: f64, field: &'static str) -> Result<i16, LinkError> {
        quantize(v, scale, i16::MIN as f64, i16::MAX as f64, field).map(|q| q as i16)
    }

    pub fn to_i32(v: f64, scale: f64, field: &'static str) -> Result<i32, LinkError> {
        quantize(v, scale, i32::MIN as f64, i32::MAX as f64, field).map(|q| q as i32)
    }

    pub fn to_u16(v: f64, scale: f64, field: &'static str) -> Result<u16, LinkError> {
        quantize(v, scale, 0.0, u16::MAX as f64, field).map(|q| q as u16)
    }
}

/// Tracker components in thousandths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ControlPayload {
    pub vx: i16,
    pub vy: i16,
}

impl ControlPayload {
    pub fn from_tracker(v: Vec2) -> Result<Self, LinkError> {
        Ok(Self { vx: fixed::to_i16(v.dx, 1000.0, "vx")?, vy: fixed::to_i16(v.dy, 1000.0, "vy")? })
    }

    pub fn tracker(&self) -> Vec2 {
        Vec2::new(self.vx as f64 / 1000.0, self.vy as f64 / 1000.0)
    }
}

/// World position in millimeters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct PositionPayload {
    pub x: i32,
    pub y: i32,
}

impl PositionPayload {
    pub fn from_point(p: Point2) -> Result<Self, LinkError> {
        Ok(Self { x: fixed::to_i32(p.x, 1000.0, "x")?, y: fixed::to_i32(p.y, 1000.0, "y")? })
    }

    pub fn point(&self) -> Point2 {
        Point2::new(self.x as f64 / 1000.0, self.y as f64 / 1000.0)
    }
}

/// Where the robot halted, millimeters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct StuckPayload {
    pub x: i32,
    pub y: i32,
}

impl StuckPayload {
    pub fn from_point(p: Point2) -> Result<Self, LinkError> {
        let PositionPayload { x, y } = PositionPayload::from_point(p)?;
        Ok(Self { x, y })
    }

    pub fn point(&self) -> Point2 {
        PositionPayload { x: self.x, y: self.y }.point()
    }
}

/// Robot activity reported in telemetry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
#[repr(u8)]
pub enum RobotMode {
    #[default]
    Tracking = 0,
    NewPath = 1,
    Stuck = 2,
    Complete = 3,
    Teleop = 4,
    Holding = 5,
}

impl RobotMode {
    pub fn from_u8(v: u8) -> Option<Self> {
        Some(match v {
            0 => RobotMode::Tracking,
            1 => RobotMode::NewPath,
            2 => RobotMode::Stuck,
            3 => RobotMode::Complete,
            4 => RobotMode::Teleop,
            5 => RobotMode::Holding,
            _ => return None,
        })
    }

    pub fn label(self) -> &'static str {
        match self {
            RobotMode::Tracking => "tracking",
            RobotMode::NewPath => "new_path",
            RobotMode::Stuck => "stuck",
            RobotMode::Complete => "complete",
            RobotMode::Teleop => "teleop",
            RobotMode::Holding => "holding",
        }
    }
}

/// Periodic robot state. Vertices are centimeter offsets from `(x, y)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct TelemetryPayload {
    /// Millimeters.
    pub x: i32,
    pub y: i32,
    /// Milliradians.
    pub heading: i16,
    /// Explored fraction scaled by 65535.
    pub coverage: u16,
    pub mode: RobotMode,
    pub vertices: Vec<(i16, i16)>,
}

impl TelemetryPayload {
    pub fn new(
        position: Point2,
        heading: f64,
        coverage: f64,
        mode: RobotMode,
        vertices: &[Point2],
    ) -> Result<Self, LinkError> {
        if vertices.len() > MAX_TELEMETRY_VERTICES {
            return Err(LinkError::Oversize(HEADER_LEN + TELEMETRY_FIXED + 4 * vertices.len() + CRC_LEN));
        }
        let PositionPayload { x, y } = PositionPayload::from_point(position)?;
        let origin = Point2::new(x as f64 / 1000.0, y as f64 / 1000.0);
        let vertices = vertices
            .iter()
            .map(|v| {
                let d = *v - origin;
                Ok((fixed::to_i16(d.dx, 100.0, "vertex")?, fixed::to_i16(d.dy, 100.0, "vertex")?))
            })
            .collect::<Result<Vec<_>, LinkError>>()?;
        Ok(Self {
            x,
            y,
            heading: fixed::to_i16(crate::math::wrap_angle(heading), 1000.0, "heading")?,
            coverage: fixed::to_u16(coverage.clamp(0.0, 1.0), 65535.0, "coverage")?,
            mode,
            vertices,
        })
    }

    pub fn position(&self) -> Point2 {
        PositionPayload { x: self.x, y: self.y }.point()
    }

    pub fn heading(&self) -> f64 {
        self.heading as f64 / 1000.0
    }

    pub fn coverage(&self) -> f64 {
        self.coverage as f64 / 65535.0
    }

    pub fn world_vertices(&self) -> Vec<Point2> {
        let o = self.position();
        self.vertices
            .iter()
            .map(|&(dx, dy)| Point2::new(o.x + dx as f64 / 100.0, o.y + dy as f64 / 100.0))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct AckPayload {
    pub seq: u8,
    pub status: u8,
}

impl AckPayload {
    pub const OK: u8 = 0;
    /// Sent by the station: hand control back to the planner.
    pub const RESUME: u8 = 1;

    pub fn resume(seq: u8) -> Self {
        Self { seq, status: Self::RESUME }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Payload {
    Control(ControlPayload),
    Position(PositionPayload),
    Stuck(StuckPayload),
    Telemetry(TelemetryPayload),
    Ack(AckPayload),
}

impl Payload {
    pub fn kind(&self) -> FrameKind {
        match self {
            Payload::Control(_) => FrameKind::Control,
            Payload::Position(_) => FrameKind::Position,
            Payload::Stuck(_) => FrameKind::Stuck,
            Payload::Telemetry(_) => FrameKind::Telemetry,
            Payload::Ack(_) => FrameKind::Ack,
        }
    }

    fn encoded_len(&self) -> usize {
        match self {
            Payload::Control(_) => 4,
            Payload::Position(_) | Payload::Stuck(_) => 8,
            Payload::Telemetry(t) => TELEMETRY_FIXED + 4 * t.vertices.len(),
            Payload::Ack(_) => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Frame {
    pub version: u8,
    pub seq: u8,
    pub payload: Payload,
}

impl Frame {
    pub fn new(seq: u8, payload: Payload) -> Self {
        Self { version: VERSION, seq, payload }
    }

    pub fn kind(&self) -> FrameKind {
        self.payload.kind()
    }

    pub fn encoded_len(&self) -> usize {
        HEADER_LEN + self.payload.encoded_len() + CRC_LEN
    }
}

pub fn encode_frame(f: &Frame) -> Result<Vec<u8>, LinkError> {
    if f.version != VERSION {
        return Err(LinkError::UnsupportedVersion(f.version));
    }
    let len = f.encoded_len();
    if len > MAX_FRAME_LEN {
        return Err(LinkError::Oversize(len));
    }
    let mut out = Vec::with_capacity(len);
    out.push((f.version << 4) | f.kind() as u8);
    out.push(f.seq);
    match &f.payload {
        Payload::Control(c) => {
            out.extend_from_slice(&c.vx.to_be_bytes());
            out.extend_from_slice(&c.vy.to_be_bytes());
        }
        Payload::Position(PositionPayload { x, y }) | Payload::Stuck(StuckPayload { x, y }) => {
            out.extend_from_slice(&x.to_be_bytes());
            out.extend_from_slice(&y.to_be_bytes());
        }
        Payload::Telemetry(t) => {
            out.extend_from_slice(&t.x.to_be_bytes());
            out.extend_from_slice(&t.y.to_be_bytes());
            out.extend_from_slice(&t.heading.to_be_bytes());
            out.extend_from_slice(&t.coverage.to_be_bytes());
            out.push(t.mode as u8);
            out.push(t.vertices.len() as u8);
            for (dx, dy) in &t.vertices {
                out.extend_from_slice(&dx.to_be_bytes());
                out.extend_from_slice(&dy.to_be_bytes());
            }
        }
        Payload::Ack(a) => {
            out.push(a.seq);
            out.push(a.status);
        }
    }
    let crc = crc16(&out);
    out.extend_from_slice(&crc.to_be_bytes());
    debug_assert_eq!(out.len(), len);
    Ok(out)
}

struct Reader<'a> {
    buf: &'a [u8],
}

impl Reader<'_> {
    fn take<const N: usize>(&mut self, total: usize) -> Result<[u8; N], LinkError> {
        if self.buf.len() < N {
            return Err(LinkError::TooShort(total));
        }
        let (head, rest) = self.buf.split_at(N);
        self.buf = rest;
        Ok(head.try_into().expect("split at N"))
    }
}

/// Parse a frame. Checks run in order: minimum length, budget, checksum,
/// version, kind, then payload length.
pub fn decode_frame(b: &[u8]) -> Result<Frame, LinkError> {
    let total = b.len();
    if total < HEADER_LEN + CRC_LEN {
        return Err(LinkError::TooShort(total));
    }
    if total > MAX_FRAME_LEN {
        return Err(LinkError::Oversize(total));
    }
    let (body, tail) = b.split_at(total - CRC_LEN);
    let carried = u16::from_be_bytes([tail[0], tail[1]]);
    let computed = crc16(body);
    if carried != computed {
        return Err(LinkError::BadCrc { computed, carried });
    }
    let version = body[0] >> 4;
    if version != VERSION {
        return Err(LinkError::UnsupportedVersion(version));
    }
    let kind = FrameKind::from_nibble(body[0] & 0x0F).ok_or(LinkError::UnknownKind(body[0] & 0x0F))?;
    let seq = body[1];
    let mut r = Reader { buf: &body[HEADER_LEN..] };
    let payload = match kind {
        FrameKind::Control => Payload::Control(ControlPayload {
            vx: i16::from_be_bytes(r.take(total)?),
            vy: i16::from_be_bytes(r.take(total)?),
        }),
        FrameKind::Position => Payload::Position(PositionPayload {
            x: i32::from_be_bytes(r.take(total)?),
            y: i32::from_be_bytes(r.take(total)?),
        }),
        FrameKind::Stuck => Payload::Stuck(StuckPayload {
            x: i32::from_be_bytes(r.take(total)?),
            y: i32::from_be_bytes(r.take(total)?),
        }),
        FrameKind::Telemetry => {
            let x = i32::from_be_bytes(r.take(total)?);
            let y = i32::from_be_bytes(r.take(total)?);
            let heading = i16::from_be_bytes(r.take(total)?);
            let coverage = u16::from_be_bytes(r.take(total)?);
            let [mode] = r.take(total)?;
            let mode = RobotMode::from_u8(mode).ok_or(LinkError::InvalidField("mode"))?;
            let [count] = r.take(total)?;
            let mut vertices = Vec::with_capacity((count as usize).min(MAX_TELEMETRY_VERTICES));
            for _ in 0..count {
                vertices.push((i16::from_be_bytes(r.take(total)?), i16::from_be_bytes(r.take(total)?)));
            }
            Payload::Telemetry(TelemetryPayload { x, y, heading, coverage, mode, vertices })
        }
        FrameKind::Ack => {
            let [seq, status] = r.take(total)?;
            Payload::Ack(AckPayload { seq, status })
        }
    };
    if !r.buf.is_empty() {
        return Err(LinkError::TrailingBytes(r.buf.len()));
    }
    Ok(Frame { version, seq, payload })
}
