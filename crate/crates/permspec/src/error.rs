//! Error type shared by all modules.

use crate::trapezoid::Regime;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Derivative-based moduli are undefined for discontinuous functions.
    #[error("unsupported function for {op}: {reason}")]
    UnsupportedFunction { op: &'static str, reason: String },

    #[error("invalid function spec: {0}")]
    InvalidFunction(String),

    #[error("invalid cycle type: sum of j*a_j is {got}, expected {expected}")]
    InvalidCycleType { got: u64, expected: u64 },

    #[error("n = {n} too large for {op} (limit {limit})")]
    TooLarge { op: &'static str, n: u64, limit: u64 },

    #[error("horizon {horizon} too small for n = {n}: need at least {min}")]
    HorizonTooSmall { horizon: u64, n: u64, min: u64 },

    #[error("error series built to jmax = {jmax} is too short for n = {n}")]
    SeriesTooShort { jmax: usize, n: usize },

    #[error("index j = {j} out of range 1..={n}")]
    OutOfRange { j: usize, n: usize },

    #[error("{op} requires the Bounded regime, but the series is {found:?}")]
    WrongRegime { op: &'static str, found: Regime },

    /// All `u_j` vanish: the limit statistic is non-random and the limit-law
    /// hypothesis `Σ j R_j² ∈ (0,∞)` fails on the left end.
    #[error("degenerate limit law: every u_j = j*R_j is zero")]
    DegenerateLaw,

    #[error("cannot meet tolerance eps = {eps}: truncation tail bound is {tail}")]
    CannotMeetTolerance { eps: f64, tail: f64 },

    #[error("empty sample")]
    EmptySample,

    /// Text-syntax parse failure; `pos` is a byte offset into the input.
    #[error("parse error at position {pos}: expected {expected}")]
    Parse { pos: usize, expected: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

impl Error {
    /// Stable short name of the error variant (used by the CLI exit paths).
    pub fn name(&self) -> &'static str {
        match self {
            Self::UnsupportedFunction { .. } => "UnsupportedFunction",
            Self::InvalidFunction(_) => "InvalidFunction",
            Self::InvalidCycleType { .. } => "InvalidCycleType",
            Self::TooLarge { .. } => "TooLarge",
            Self::HorizonTooSmall { .. } => "HorizonTooSmall",
            Self::SeriesTooShort { .. } => "SeriesTooShort",
            Self::OutOfRange { .. } => "OutOfRange",
            Self::WrongRegime { .. } => "WrongRegime",
            Self::DegenerateLaw => "DegenerateLaw",
            Self::CannotMeetTolerance { .. } => "CannotMeetTolerance",
            Self::EmptySample => "EmptySample",
            Self::Parse { .. } => "ParseError",
            Self::InvalidConfig(_) => "InvalidConfig",
        }
    }
}
