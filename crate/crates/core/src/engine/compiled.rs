//! Bitset encoding of conjunctive events used inside saturation.

use std::collections::BTreeSet;

use crate::event::{ConjEvent, Literal, Symbol};

/// Maximum number of distinct symbols one saturation can handle.
pub const MAX_SYMBOLS: usize = 64;

/// A conjunction as two bitsets over symbol indices: `mask` holds the
/// mentioned symbols, `pos` the ones that occur positively.
///
/// Invariant: `pos & !mask == 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct Ev {
    pub mask: u64,
    pub pos: u64,
}

impl Ev {
    pub fn width(self) -> u32 {
        self.mask.count_ones()
    }

    pub fn disjoint(self, other: Ev) -> bool {
        self.mask & other.mask == 0
    }

    /// Conjunction of two symbol-disjoint events.
    pub fn union(self, other: Ev) -> Ev {
        debug_assert!(self.disjoint(other));
        Ev { mask: self.mask | other.mask, pos: self.pos | other.pos }
    }

    /// The literals of `self` over the symbols in `mask`.
    pub fn restrict(self, mask: u64) -> Ev {
        debug_assert_eq!(mask & !self.mask, 0);
        Ev { mask, pos: self.pos & mask }
    }

    pub fn without(self, mask: u64) -> Ev {
        self.restrict(self.mask & !mask)
    }

    /// Negates the literal on symbol bit `bit`.
    pub fn flip(self, bit: u64) -> Ev {
        debug_assert_ne!(self.mask & bit, 0);
        Ev { mask: self.mask, pos: self.pos ^ bit }
    }

    /// Single-bit masks of the mentioned symbols, lowest first.
    pub fn bits(self) -> impl Iterator<Item = u64> {
        let mut rest = self.mask;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let bit = rest & rest.wrapping_neg();
            rest &= !bit;
            Some(bit)
        })
    }

    /// Nonempty proper submasks of `mask`, in decreasing numeric order.
    pub fn proper_submasks(self) -> impl Iterator<Item = u64> {
        let mask = self.mask;
        let mut next = mask.wrapping_sub(1) & mask;
        std::iter::from_fn(move || {
            if next == 0 {
                return None;
            }
            let current = next;
            next = (next - 1) & mask;
            Some(current)
        })
    }
}

/// Symbols indexed in name order, so that encoding does not depend on the
/// order statements were inserted in.
#[derive(Debug, Clone, Default)]
pub(crate) struct SymbolTable {
    symbols: Vec<Symbol>,
}

impl SymbolTable {
    /// `symbols` must have at most [`MAX_SYMBOLS`] entries.
    pub fn new(symbols: &BTreeSet<Symbol>) -> Self {
        debug_assert!(symbols.len() <= MAX_SYMBOLS);
        SymbolTable { symbols: symbols.iter().cloned().collect() }
    }

    pub fn index(&self, symbol: &Symbol) -> Option<usize> {
        self.symbols.binary_search(symbol).ok()
    }

    /// `Err` carries the first symbol that is not in the table.
    pub fn encode(&self, event: &ConjEvent) -> Result<Ev, Symbol> {
        let mut ev = Ev { mask: 0, pos: 0 };
        for literal in event.literals() {
            let i = self.index(&literal.symbol).ok_or_else(|| literal.symbol.clone())?;
            let bit = 1u64 << i;
            ev.mask |= bit;
            if !literal.negated {
                ev.pos |= bit;
            }
        }
        Ok(ev)
    }

    pub fn decode(&self, ev: Ev) -> ConjEvent {
        let literals = ev.bits().map(|bit| {
            let symbol = self.symbols[bit.trailing_zeros() as usize].clone();
            if ev.pos & bit != 0 {
                Literal::positive(symbol)
            } else {
                Literal::negative(symbol)
            }
        });
        ConjEvent::new(literals).expect("a nonempty bitset decodes to a valid event")
    }
}
