//! Uncertain rules, bidirectional rules and conditional-independence facts.

use std::fmt;

use crate::error::CoreError;
use crate::event::ConjEvent;
use crate::interval::ProbInterval;

/// Identity of a conditional probability `P(consequent | antecedent)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RuleKey {
    pub antecedent: ConjEvent,
    pub consequent: ConjEvent,
}

impl RuleKey {
    pub fn new(antecedent: ConjEvent, consequent: ConjEvent) -> Result<Self, CoreError> {
        check_disjoint(&antecedent, &consequent)?;
        Ok(RuleKey { antecedent, consequent })
    }

    pub fn reversed(&self) -> RuleKey {
        RuleKey { antecedent: self.consequent.clone(), consequent: self.antecedent.clone() }
    }
}

impl fmt::Display for RuleKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.antecedent, self.consequent)
    }
}

pub(crate) fn check_disjoint(left: &ConjEvent, right: &ConjEvent) -> Result<(), CoreError> {
    if left.shares_symbol(right) {
        return Err(CoreError::OverlappingEvents {
            left: left.to_string(),
            right: right.to_string(),
        });
    }
    Ok(())
}

/// `antecedent -> consequent : [lo, hi]`, asserting
/// `P(consequent | antecedent) ∈ [lo, hi]` and `P(antecedent) > 0`.
///
/// Antecedent and consequent never share a symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct UncertainRule {
    pub antecedent: ConjEvent,
    pub consequent: ConjEvent,
    pub bounds: ProbInterval,
}

impl UncertainRule {
    pub fn new(
        antecedent: ConjEvent,
        consequent: ConjEvent,
        bounds: ProbInterval,
    ) -> Result<Self, CoreError> {
        check_disjoint(&antecedent, &consequent)?;
        Ok(UncertainRule { antecedent, consequent, bounds })
    }

    pub fn key(&self) -> RuleKey {
        RuleKey { antecedent: self.antecedent.clone(), consequent: self.consequent.clone() }
    }
}

impl fmt::Display for UncertainRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {} : {}", self.antecedent, self.consequent, self.bounds)
    }
}

/// Paired bounds on `P(b|a)` (`forward`) and `P(a|b)` (`backward`).
#[derive(Debug, Clone, PartialEq)]
pub struct BidirRule {
    pub a: ConjEvent,
    pub b: ConjEvent,
    pub forward: ProbInterval,
    pub backward: ProbInterval,
}

impl BidirRule {
    /// Since `P(b|a) = 0` iff `P(a|b) = 0`, an upper bound of zero in one
    /// direction must be matched by an upper bound of zero in the other.
    pub fn new(
        a: ConjEvent,
        b: ConjEvent,
        forward: ProbInterval,
        backward: ProbInterval,
    ) -> Result<Self, CoreError> {
        check_disjoint(&a, &b)?;
        if !coupling_holds(&forward, &backward) {
            return Err(CoreError::Coupling { a: a.to_string(), b: b.to_string() });
        }
        Ok(BidirRule { a, b, forward, backward })
    }

    pub fn split(&self) -> (UncertainRule, UncertainRule) {
        (
            UncertainRule {
                antecedent: self.a.clone(),
                consequent: self.b.clone(),
                bounds: self.forward,
            },
            UncertainRule {
                antecedent: self.b.clone(),
                consequent: self.a.clone(),
                bounds: self.backward,
            },
        )
    }
}

pub(crate) fn coupling_holds(forward: &ProbInterval, backward: &ProbInterval) -> bool {
    (forward.hi() == 0.0) == (backward.hi() == 0.0)
}

impl fmt::Display for BidirRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} <-> {} : {} / {}", self.a, self.b, self.forward, self.backward)
    }
}

/// `I(a, b, c)`: `c` is independent of `a` given `b`, i.e.
/// `P(c | b a) = P(c | b)`, which also asserts `P(a b) > 0`.
///
/// The three events are pairwise symbol-disjoint.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IndepStmt {
    pub a: ConjEvent,
    pub b: ConjEvent,
    pub c: ConjEvent,
}

impl IndepStmt {
    pub fn new(a: ConjEvent, b: ConjEvent, c: ConjEvent) -> Result<Self, CoreError> {
        check_disjoint(&a, &b)?;
        check_disjoint(&b, &c)?;
        check_disjoint(&a, &c)?;
        Ok(IndepStmt { a, b, c })
    }

    /// `I(c, b, a)`.
    pub fn mirrored(&self) -> IndepStmt {
        IndepStmt { a: self.c.clone(), b: self.b.clone(), c: self.a.clone() }
    }
}

impl fmt::Display for IndepStmt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "I({}, {}, {})", self.a, self.b, self.c)
    }
}
