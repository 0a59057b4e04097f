//! Brute-force semantics over joint distributions.
//!
//! Everything the calculus derives is a claim about all joint distributions
//! that satisfy a knowledge base. For up to five basic events the oracle
//! checks such claims directly: [`satisfies`] tests one model,
//! [`estimate_range`] searches for models that push a conditional as low and
//! as high as the knowledge base allows.

mod generate;
mod model;
mod search;

use thiserror::Error;

use crate::engine::KnowledgeBase;
use crate::error::CoreError;
use crate::event::Symbol;

pub use generate::{random_dirichlet_model, random_kb_from_model, random_product_model};
pub use model::{JointModel, MAX_ORACLE_SYMBOLS};
pub use search::{estimate_range, OracleReport};

/// Operational meaning of "P(A) > 0" for antecedents.
pub const DELTA_POS: f64 = 1e-7;

/// Default tolerance on rule bounds and independence products.
pub const FEASIBILITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("{0} basic events exceed the oracle limit of {MAX_ORACLE_SYMBOLS}")]
    TooManySymbols(usize),
    #[error("symbol `{0}` listed twice")]
    DuplicateSymbol(Symbol),
    #[error("expected {expected} atom masses, got {got}")]
    MassLength { expected: usize, got: usize },
    #[error("atom masses must be finite and nonnegative")]
    NegativeMass,
    #[error("atom masses sum to {0}, not 1")]
    MassSum(f64),
    #[error("symbol `{0}` is not part of the model")]
    UnknownSymbol(Symbol),
    #[error(transparent)]
    InvalidQuery(#[from] CoreError),
    #[error("sample budget must be positive")]
    ZeroBudget,
    #[error("no model satisfying the knowledge base was found in {samples} samples")]
    NoFeasibleModel { samples: usize },
}

/// True iff `m` satisfies every statement of `kb` within `tol`:
///
/// - for each rule, `P(a) >= DELTA_POS` and `P(b|a)` lies in
///   `[lo - tol, hi + tol]`;
/// - for each `I(a, b, c)`, `P(a b) >= DELTA_POS` and
///   `|P(a b c) P(b) - P(a b) P(b c)| <= tol`.
pub fn satisfies(m: &JointModel, kb: &KnowledgeBase, tol: f64) -> Result<bool, OracleError> {
    for r in kb.rules() {
        let sa = m.atoms(&r.antecedent)?;
        let pa = m.prob_of(sa);
        if pa < DELTA_POS {
            return Ok(false);
        }
        let p = m.prob_of(sa.and(m.atoms(&r.consequent)?)) / pa;
        if p < r.bounds.lo() - tol || p > r.bounds.hi() + tol {
            return Ok(false);
        }
    }
    for ind in kb.independences() {
        let (a, b, c) = (m.atoms(&ind.a)?, m.atoms(&ind.b)?, m.atoms(&ind.c)?);
        let pab = m.prob_of(a.and(b));
        if pab < DELTA_POS {
            return Ok(false);
        }
        let gap = m.prob_of(a.and(b).and(c)) * m.prob_of(b) - pab * m.prob_of(b.and(c));
        if gap.abs() > tol {
            return Ok(false);
        }
    }
    Ok(true)
}
