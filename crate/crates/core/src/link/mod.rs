//! Teleop wire protocol and a simulated duty-cycled long-range link.
//!
//! Frame layout, all multi-byte fields big-endian:
//!
//! ```text
//! [version:4 | kind:4] [seq] [payload ...] [crc hi] [crc lo]
//! ```
//!
//! The checksum is CRC-16/CCITT-FALSE (poly 0x1021, init 0xFFFF) over every
//! byte before it. A frame never exceeds [`MAX_FRAME_LEN`] bytes.

mod frame;
mod sim;

use thiserror::Error;

pub use frame::{
    crc16, decode_frame, encode_frame, fixed, AckPayload, ControlPayload, Frame, FrameKind, Payload, PositionPayload,
    RobotMode, StuckPayload, TelemetryPayload, CRC_LEN, HEADER_LEN, MAX_FRAME_LEN, MAX_TELEMETRY_VERTICES, VERSION,
};
pub use sim::{Delivery, LinkConfig, LinkSim, Transmission};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum LinkError {
    #[error("frame too short: {0} bytes")]
    TooShort(usize),
    #[error("frame of {0} bytes exceeds the payload budget")]
    Oversize(usize),
    #[error("checksum mismatch: computed {computed:#06x}, frame carries {carried:#06x}")]
    BadCrc { computed: u16, carried: u16 },
    #[error("unsupported protocol version {0}")]
    UnsupportedVersion(u8),
    #[error("unknown frame kind {0}")]
    UnknownKind(u8),
    #[error("{0} trailing bytes after payload")]
    TrailingBytes(usize),
    #[error("field `{0}` holds an invalid value")]
    InvalidField(&'static str),
    #[error("value for `{0}` does not fit its fixed-point encoding")]
    OutOfRange(&'static str),
    #[error("invalid link configuration: {0}")]
    InvalidConfig(&'static str),
}
