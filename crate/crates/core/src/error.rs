use std::fmt;

use thiserror::Error;

/// States whose relative order was decided by a tie-break rather than by an
/// exact comparison, reported when the active policy refuses to break ties.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TieReport {
    /// House size at which the tie mattered.
    pub house: u64,
    /// Tied states, as indices into the size-sorted view.
    pub states: Vec<usize>,
    pub context: &'static str,
}

impl fmt::Display for TieReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} tie at house {} between states {:?}",
            self.context, self.house, self.states
        )
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("invalid shift {0}: must lie in [0, 1)")]
    InvalidShift(String),
    #[error("invalid rational {0:?}")]
    ParseRational(String),
    #[error("invalid scale factor: {0}")]
    InvalidScale(String),
    #[error("scale factor {lambda} is not admissible for {seats:?}")]
    NotAdmissible { lambda: String, seats: Vec<u64> },
    #[error("house size 0 admits every scale factor")]
    EmptyHouse,
    #[error("invalid rounding rule: {0}")]
    InvalidRule(String),
    #[error("unknown method {0:?}")]
    UnknownMethod(String),
    #[error("unknown fixture {0:?}")]
    UnknownFixture(String),
    #[error("seat vector has {got} entries, instance has {expected} states")]
    LengthMismatch { expected: usize, got: usize },
    #[error("state {state} holds {seats} seats, outside its quota [{lower}, {upper}]")]
    QuotaViolation {
        state: usize,
        seats: u64,
        lower: u64,
        upper: u64,
    },
    #[error(
        "no divisor exists: state {over} (last seat) ranks below state {under} (next seat)"
    )]
    Certificate { over: usize, under: usize },
    #[error("{0}")]
    Tie(TieReport),
    #[error("degenerate instance: {0}")]
    Degenerate(String),
    #[error("internal invariant broken: {0}")]
    Internal(String),
    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
