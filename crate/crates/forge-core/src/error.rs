//! Crate-wide error type.

use crate::netlist::{GateKind, NetId};

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while building, loading or analyzing a netlist.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("arity mismatch for {kind}: expected {expected} fanins, got {got}")]
    ArityMismatch {
        kind: GateKind,
        expected: usize,
        got: usize,
    },
    #[error("unknown net {0}")]
    UnknownNet(NetId),
    #[error("net {0} is driven more than once")]
    DuplicateDriver(NetId),
    #[error("input net {0} must not have a driver")]
    DrivenInput(NetId),
    #[error("net {0} has no driver and is not an input")]
    Undriven(NetId),
    #[error("combinational cycle through net {0}")]
    Cycle(NetId),
    #[error("gate {0} stored out of order (expected id {1})")]
    GateOrder(u32, u32),
    #[error("stimulus missing a value for input net {0}")]
    PartialStimulus(NetId),
    #[error("no arrival time given for input net {0}")]
    MissingArrival(NetId),
    #[error("{what}: width must be at least {min}, got {got}")]
    InvalidWidth {
        what: &'static str,
        min: usize,
        got: usize,
    },
    #[error("operand width mismatch: expected {expected}, got {got}")]
    WidthMismatch { expected: usize, got: usize },
    #[error("{0}")]
    InvalidSpec(String),
    #[error("reduction schedule inconsistent at column {column} (target {target})")]
    ScheduleInconsistent { column: usize, target: usize },
    #[error("arrival profile is degenerate (no falling or flat section); widen the tolerance")]
    DegenerateProfile,
    #[error("empty bit region")]
    EmptyRegion,
    #[error("region partition does not match profile: {0}")]
    PartitionMismatch(String),
    #[error("verification failed: {0}")]
    Verify(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
