use thiserror::Error;

use crate::event::Symbol;

/// Validation failures for events, intervals and rules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoreError {
    #[error("an event needs at least one literal")]
    EmptyEvent,
    #[error("`{0}` occurs both positive and negated in one conjunction")]
    Contradiction(Symbol),
    #[error("`{0}` is not a valid event name")]
    InvalidSymbol(String),
    #[error("interval bounds [{lo}, {hi}] are outside [0, 1]")]
    OutOfRange { lo: f64, hi: f64 },
    #[error("interval lower bound {lo} exceeds upper bound {hi}")]
    IntervalOrder { lo: f64, hi: f64 },
    #[error("events `{left}` and `{right}` share a symbol")]
    OverlappingEvents { left: String, right: String },
    #[error(
        "bidirectional rule `{a} <-> {b}`: an upper bound of 0 in one direction requires 0 in the other"
    )]
    Coupling { a: String, b: String },
}
