//! Basic events, literals and canonical conjunctive events.
//!
//! A [`ConjEvent`] is a conjunction of literals over distinct symbols, kept
//! sorted by symbol name so that structurally equal events compare equal and
//! can be used directly as map keys.

use std::fmt;
use std::sync::Arc;

use crate::error::CoreError;

/// Name of a basic event. Names follow identifier syntax
/// (`[A-Za-z_][A-Za-z0-9_]*`) so that every event can be written back out in
/// the textual knowledge-base format.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: &str) -> Result<Self, CoreError> {
        if !is_identifier(name) {
            return Err(CoreError::InvalidSymbol(name.to_string()));
        }
        Ok(Symbol(Arc::from(name)))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub(crate) fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// A basic event or its complement.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub symbol: Symbol,
    pub negated: bool,
}

impl Literal {
    pub fn positive(symbol: Symbol) -> Self {
        Literal { symbol, negated: false }
    }

    pub fn negative(symbol: Symbol) -> Self {
        Literal { symbol, negated: true }
    }

    /// Parses `A` or `!A`.
    pub fn parse(text: &str) -> Result<Self, CoreError> {
        let text = text.trim();
        match text.strip_prefix('!') {
            Some(rest) => Ok(Literal::negative(Symbol::new(rest.trim())?)),
            None => Ok(Literal::positive(Symbol::new(text)?)),
        }
    }

    pub fn complement(&self) -> Self {
        Literal { symbol: self.symbol.clone(), negated: !self.negated }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "!{}", self.symbol)
        } else {
            write!(f, "{}", self.symbol)
        }
    }
}

/// Canonical conjunction of literals over pairwise distinct symbols.
///
/// Invariants: nonempty, sorted by symbol name, no symbol repeated. A
/// conjunction containing both `A` and `!A` cannot be built.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConjEvent {
    literals: Vec<Literal>,
}

impl ConjEvent {
    /// Sorts and deduplicates `literals`. Fails on an empty list or when a
    /// symbol occurs with both polarities.
    pub fn new(literals: impl IntoIterator<Item = Literal>) -> Result<Self, CoreError> {
        let mut literals: Vec<Literal> = literals.into_iter().collect();
        if literals.is_empty() {
            return Err(CoreError::EmptyEvent);
        }
        literals.sort();
        literals.dedup();
        for pair in literals.windows(2) {
            if pair[0].symbol == pair[1].symbol {
                return Err(CoreError::Contradiction(pair[0].symbol.clone()));
            }
        }
        Ok(ConjEvent { literals })
    }

    pub fn literal(literal: Literal) -> Self {
        ConjEvent { literals: vec![literal] }
    }

    /// Parses `A & !B & C`.
    pub fn parse(text: &str) -> Result<Self, CoreError> {
        let literals = text.split('&').map(Literal::parse).collect::<Result<Vec<_>, _>>()?;
        ConjEvent::new(literals)
    }

    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    pub fn width(&self) -> usize {
        self.literals.len()
    }

    pub fn symbols(&self) -> impl Iterator<Item = &Symbol> {
        self.literals.iter().map(|l| &l.symbol)
    }

    pub fn contains(&self, literal: &Literal) -> bool {
        self.literals.binary_search(literal).is_ok()
    }

    pub fn mentions(&self, symbol: &Symbol) -> bool {
        self.literals.iter().any(|l| &l.symbol == symbol)
    }

    /// True when the two events have at least one symbol in common,
    /// regardless of polarity.
    pub fn shares_symbol(&self, other: &ConjEvent) -> bool {
        self.symbols().any(|s| other.mentions(s))
    }

    /// Canonical union of the two literal sets.
    pub fn conjoin(&self, other: &ConjEvent) -> Result<ConjEvent, CoreError> {
        ConjEvent::new(self.literals.iter().chain(other.literals.iter()).cloned())
    }

    /// The literals of `self` not in `other`, or `None` if nothing is left.
    pub fn without(&self, other: &ConjEvent) -> Option<ConjEvent> {
        let rest: Vec<Literal> =
            self.literals.iter().filter(|l| !other.contains(l)).cloned().collect();
        (!rest.is_empty()).then_some(ConjEvent { literals: rest })
    }

    pub fn is_subset_of(&self, other: &ConjEvent) -> bool {
        self.literals.iter().all(|l| other.contains(l))
    }
}

impl fmt::Display for ConjEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, literal) in self.literals.iter().enumerate() {
            if i > 0 {
                f.write_str(" & ")?;
            }
            write!(f, "{literal}")?;
        }
        Ok(())
    }
}

/// Canonicalizes a literal list into a conjunctive event.
pub fn canonicalize(literals: &[Literal]) -> Result<ConjEvent, CoreError> {
    ConjEvent::new(literals.iter().cloned())
}

/// Conjunction of two events.
pub fn conjoin(e1: &ConjEvent, e2: &ConjEvent) -> Result<ConjEvent, CoreError> {
    e1.conjoin(e2)
}
