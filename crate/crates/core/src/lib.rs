//! Interval probability knowledge bases over conjunctive events.
//!
//! A knowledge base holds uncertain rules `A -> B : [lo, hi]` bounding
//! `P(B|A)`, bidirectional rules and conditional independences. The
//! [`engine`] saturates it with the local rules of [`calculus`]; the
//! [`oracle`] brute-forces the same questions over joint distributions.

pub mod calculus;
pub mod engine;
pub mod error;
pub mod event;
pub mod interval;
pub mod kbformat;
pub mod oracle;
pub mod report;
pub mod rule;

pub use error::CoreError;
pub use event::{ConjEvent, Literal, Symbol};
pub use interval::{format_prob, interval_meet, ProbInterval};
pub use rule::{BidirRule, IndepStmt, RuleKey, UncertainRule};
