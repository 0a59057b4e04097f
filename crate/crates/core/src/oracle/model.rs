//! Joint distributions over the atoms of a few basic events.

use crate::event::{ConjEvent, Symbol};

use super::OracleError;

/// Largest number of basic events a [`JointModel`] may range over.
pub const MAX_ORACLE_SYMBOLS: usize = 5;

/// Probability mass over the `2^n` atoms of `n` basic events.
///
/// Atom `t` makes symbol `i` true iff bit `i` of `t` is set. Invariants:
/// masses are nonnegative and sum to 1 within `1e-12`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointModel {
    symbols: Vec<Symbol>,
    mass: Vec<f64>,
}

/// An event as the set of atoms `t` with `t & mask == pos`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct AtomSet {
    pub mask: usize,
    pub pos: usize,
}

impl AtomSet {
    pub fn contains(self, atom: usize) -> bool {
        atom & self.mask == self.pos
    }

    pub fn indicator(self, n_atoms: usize) -> Vec<f64> {
        (0..n_atoms).map(|t| if self.contains(t) { 1.0 } else { 0.0 }).collect()
    }

    /// True when some symbol has opposite polarity in the two sets.
    pub fn conflicts(self, other: AtomSet) -> bool {
        (self.mask & other.mask) & (self.pos ^ other.pos) != 0
    }

    pub fn and(self, other: AtomSet) -> AtomSet {
        AtomSet { mask: self.mask | other.mask, pos: self.pos | other.pos }
    }
}

pub(crate) fn encode(symbols: &[Symbol], e: &ConjEvent) -> Result<AtomSet, OracleError> {
    let mut set = AtomSet { mask: 0, pos: 0 };
    for literal in e.literals() {
        let i = symbols
            .iter()
            .position(|s| s == &literal.symbol)
            .ok_or_else(|| OracleError::UnknownSymbol(literal.symbol.clone()))?;
        set.mask |= 1 << i;
        if !literal.negated {
            set.pos |= 1 << i;
        }
    }
    Ok(set)
}

pub(crate) fn check_symbols(symbols: &[Symbol]) -> Result<(), OracleError> {
    if symbols.len() > MAX_ORACLE_SYMBOLS {
        return Err(OracleError::TooManySymbols(symbols.len()));
    }
    for (i, s) in symbols.iter().enumerate() {
        if symbols[..i].contains(s) {
            return Err(OracleError::DuplicateSymbol(s.clone()));
        }
    }
    Ok(())
}

impl JointModel {
    pub fn new(symbols: Vec<Symbol>, mass: Vec<f64>) -> Result<Self, OracleError> {
        check_symbols(&symbols)?;
        let expected = 1usize << symbols.len();
        if mass.len() != expected {
            return Err(OracleError::MassLength { expected, got: mass.len() });
        }
        if mass.iter().any(|&m| !(m >= 0.0) || !m.is_finite()) {
            return Err(OracleError::NegativeMass);
        }
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(OracleError::MassSum(total));
        }
        Ok(JointModel { symbols, mass })
    }

    /// Rescales nonnegative weights to sum to 1.
    pub fn normalized(symbols: Vec<Symbol>, weights: Vec<f64>) -> Result<Self, OracleError> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || weights.iter().any(|&w| !(w >= 0.0)) {
            return Err(OracleError::NegativeMass);
        }
        JointModel::new(symbols, weights.into_iter().map(|w| w / total).collect())
    }

    pub fn uniform(symbols: Vec<Symbol>) -> Result<Self, OracleError> {
        let n_atoms = 1usize << symbols.len().min(usize::BITS as usize - 1);
        JointModel::new(symbols, vec![1.0 / n_atoms as f64; n_atoms])
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub(crate) fn atoms(&self, e: &ConjEvent) -> Result<AtomSet, OracleError> {
        encode(&self.symbols, e)
    }

    pub(crate) fn prob_of(&self, set: AtomSet) -> f64 {
        self.mass.iter().enumerate().filter(|&(t, _)| set.contains(t)).map(|(_, m)| m).sum()
    }

    pub fn probability(&self, e: &ConjEvent) -> Result<f64, OracleError> {
        Ok(self.prob_of(self.atoms(e)?))
    }

    /// `P(b | a)`, or `None` when `P(a) = 0`.
    pub fn eval_conditional(&self, a: &ConjEvent, b: &ConjEvent) -> Result<Option<f64>, OracleError> {
        let (sa, sb) = (self.atoms(a)?, self.atoms(b)?);
        let pa = self.prob_of(sa);
        if pa <= 0.0 {
            return Ok(None);
        }
        if sa.conflicts(sb) {
            return Ok(Some(0.0));
        }
        Ok(Some(self.prob_of(sa.and(sb)) / pa))
    }
}
