//! Knowledge-base store, fixpoint saturation and query answering.
//!
//! A [`KnowledgeBase`] keeps at most one interval per conditional: every
//! insert sharpens the stored bound. [`KnowledgeBase::saturate`] applies the
//! enabled calculus rules until no interval narrows by more than `epsilon`
//! and returns an immutable [`Saturation`] that answers queries with
//! derivation traces.

mod compiled;
mod saturate;
mod trace;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::calculus::RuleId;
use crate::error::CoreError;
use crate::event::{ConjEvent, Symbol};
use crate::interval::ProbInterval;
use crate::rule::{check_disjoint, coupling_holds, BidirRule, IndepStmt, RuleKey, UncertainRule};

pub use compiled::MAX_SYMBOLS;
pub use saturate::{QueryAnswer, Saturation};
pub use trace::{DerivationTrace, Fact, TraceNode};

/// Bounds that cross by at most this much are treated as equal and collapse
/// to a point; floating-point evaluation of two derivations of the same exact
/// value can differ in the last bits.
pub const MERGE_TOLERANCE: f64 = 1e-9;

/// Anything that can be stored in a knowledge base.
#[derive(Debug, Clone, PartialEq)]
pub enum KbItem {
    Rule(UncertainRule),
    Bidir(BidirRule),
    Indep(IndepStmt),
}

impl From<UncertainRule> for KbItem {
    fn from(r: UncertainRule) -> Self {
        KbItem::Rule(r)
    }
}

impl From<BidirRule> for KbItem {
    fn from(r: BidirRule) -> Self {
        KbItem::Bidir(r)
    }
}

impl From<IndepStmt> for KbItem {
    fn from(i: IndepStmt) -> Self {
        KbItem::Indep(i)
    }
}

/// Two bounds on the same conditional with an empty intersection.
#[derive(Debug, Clone, PartialEq)]
pub struct InconsistencyReport {
    pub key: RuleKey,
    pub existing: ProbInterval,
    pub conflicting: ProbInterval,
    pub existing_trace: DerivationTrace,
    pub conflicting_trace: DerivationTrace,
}

impl fmt::Display for InconsistencyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "inconsistent bounds for P({} | {}): {} and {} do not intersect",
            self.key.consequent, self.key.antecedent, self.existing, self.conflicting
        )
    }
}

impl std::error::Error for InconsistencyReport {}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InsertError {
    #[error(transparent)]
    Invalid(#[from] CoreError),
    #[error("{0}")]
    Inconsistent(Box<InconsistencyReport>),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("max_width {max_width} is below the widest event in the knowledge base ({needed})")]
    WidthTooSmall { max_width: usize, needed: usize },
    #[error("epsilon must be a finite nonnegative number, got {0}")]
    BadEpsilon(f64),
    #[error("max_rounds must be positive")]
    ZeroRounds,
    #[error("{0} symbols exceed the supported maximum of {MAX_SYMBOLS}")]
    TooManySymbols(usize),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SaturateError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Inconsistent(Box<InconsistencyReport>),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QueryError {
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(Symbol),
    #[error(transparent)]
    Invalid(#[from] CoreError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SaturationConfig {
    /// Largest antecedent or consequent width a derivation may create.
    pub max_width: usize,
    /// Narrowing of at most this much does not count as progress.
    pub epsilon: f64,
    pub max_rounds: usize,
    pub enabled_rules: BTreeSet<RuleId>,
}

impl Default for SaturationConfig {
    /// Every rule except plain rule chaining, which precise chaining
    /// supersedes.
    fn default() -> Self {
        SaturationConfig {
            max_width: 4,
            epsilon: 1e-9,
            max_rounds: 1000,
            enabled_rules: RuleId::ALL.into_iter().filter(|&r| r != RuleId::RuleChaining).collect(),
        }
    }
}

impl SaturationConfig {
    /// Default limits with only the given rules enabled.
    pub fn with_rules(rules: impl IntoIterator<Item = RuleId>) -> Self {
        SaturationConfig { enabled_rules: rules.into_iter().collect(), ..Self::default() }
    }

    pub fn enables(&self, rule: RuleId) -> bool {
        self.enabled_rules.contains(&rule)
    }

    fn validate(&self, kb: &KnowledgeBase) -> Result<(), ConfigError> {
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return Err(ConfigError::BadEpsilon(self.epsilon));
        }
        if self.max_rounds == 0 {
            return Err(ConfigError::ZeroRounds);
        }
        let needed = kb.max_event_width();
        if self.max_width < needed.max(1) {
            return Err(ConfigError::WidthTooSmall { max_width: self.max_width, needed: needed.max(1) });
        }
        if kb.symbols.len() > MAX_SYMBOLS {
            return Err(ConfigError::TooManySymbols(kb.symbols.len()));
        }
        Ok(())
    }
}

/// Outcome of [`KnowledgeBase::check_consistency`].
#[derive(Debug, Clone, PartialEq)]
pub enum Consistency {
    /// No contradiction found. `reached_fixpoint` is false when saturation
    /// stopped at `max_rounds`, so the verdict covers only what was derived.
    Consistent { rounds: usize, reached_fixpoint: bool },
    Inconsistent(Box<InconsistencyReport>),
}

/// The given intervals for one conditional and their intersection.
#[derive(Debug, Clone, PartialEq)]
struct Axiom {
    sources: Vec<ProbInterval>,
    merged: ProbInterval,
}

/// Rules, bidirectional pairings and independences as asserted.
///
/// Invariant: every stored interval is nonempty; an insert whose
/// intersection would be empty is rejected and leaves the store unchanged.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KnowledgeBase {
    symbols: BTreeSet<Symbol>,
    axioms: BTreeMap<RuleKey, Axiom>,
    pairs: BTreeSet<(ConjEvent, ConjEvent)>,
    independences: BTreeSet<IndepStmt>,
}

impl KnowledgeBase {
    pub fn new() -> Self {
        KnowledgeBase::default()
    }

    /// Builds a knowledge base from items, stopping at the first failure.
    pub fn from_items<I>(items: I) -> Result<Self, InsertError>
    where
        I: IntoIterator,
        I::Item: Into<KbItem>,
    {
        let mut kb = KnowledgeBase::new();
        for item in items {
            kb.insert(item)?;
        }
        Ok(kb)
    }

    /// Sharpens the stored bounds with `item`. A bidirectional rule is
    /// stored as its two directed rules plus a pairing record; both halves
    /// are merged or neither is.
    pub fn insert(&mut self, item: impl Into<KbItem>) -> Result<(), InsertError> {
        match item.into() {
            KbItem::Rule(r) => {
                check_disjoint(&r.antecedent, &r.consequent)?;
                check_bounds(r.bounds)?;
                let merged = self.merged_with(&r)?;
                self.store(r, merged);
            }
            KbItem::Bidir(bi) => {
                check_disjoint(&bi.a, &bi.b)?;
                check_bounds(bi.forward)?;
                check_bounds(bi.backward)?;
                if !coupling_holds(&bi.forward, &bi.backward) {
                    return Err(CoreError::Coupling { a: bi.a.to_string(), b: bi.b.to_string() }.into());
                }
                let (forward, backward) = bi.split();
                let merged_forward = self.merged_with(&forward)?;
                let merged_backward = self.merged_with(&backward)?;
                self.store(forward, merged_forward);
                self.store(backward, merged_backward);
                self.pairs.insert((bi.a, bi.b));
            }
            KbItem::Indep(ind) => {
                check_disjoint(&ind.a, &ind.b)?;
                check_disjoint(&ind.b, &ind.c)?;
                check_disjoint(&ind.a, &ind.c)?;
                for e in [&ind.a, &ind.b, &ind.c] {
                    self.symbols.extend(e.symbols().cloned());
                }
                self.independences.insert(ind);
            }
        }
        Ok(())
    }

    fn merged_with(&self, r: &UncertainRule) -> Result<ProbInterval, InsertError> {
        let Some(axiom) = self.axioms.get(&r.key()) else {
            return Ok(r.bounds);
        };
        let met = axiom.merged.meet(&r.bounds);
        match settle(met) {
            Some(m) => Ok(m),
            None => {
                let leaf = |bounds| DerivationTrace::axiom(r.antecedent.clone(), r.consequent.clone(), bounds);
                Err(InsertError::Inconsistent(Box::new(InconsistencyReport {
                    key: r.key(),
                    existing: axiom.merged,
                    conflicting: r.bounds,
                    existing_trace: leaf(axiom.merged),
                    conflicting_trace: leaf(r.bounds),
                })))
            }
        }
    }

    fn store(&mut self, r: UncertainRule, merged: ProbInterval) {
        self.symbols.extend(r.antecedent.symbols().cloned());
        self.symbols.extend(r.consequent.symbols().cloned());
        let axiom = self
            .axioms
            .entry(r.key())
            .or_insert_with(|| Axiom { sources: Vec::new(), merged });
        axiom.merged = merged;
        let at = axiom
            .sources
            .partition_point(|s| (s.lo(), s.hi()) < (r.bounds.lo(), r.bounds.hi()));
        if axiom.sources.get(at) != Some(&r.bounds) {
            axiom.sources.insert(at, r.bounds);
        }
    }

    pub fn is_empty(&self) -> bool {
        self.axioms.is_empty() && self.independences.is_empty()
    }

    /// Stored rules in canonical key order, one per conditional.
    pub fn rules(&self) -> impl Iterator<Item = UncertainRule> + '_ {
        self.axioms.iter().map(|(k, a)| UncertainRule {
            antecedent: k.antecedent.clone(),
            consequent: k.consequent.clone(),
            bounds: a.merged,
        })
    }

    pub fn bounds(&self, key: &RuleKey) -> Option<ProbInterval> {
        self.axioms.get(key).map(|a| a.merged)
    }

    /// Pairs `(a, b)` that were inserted as bidirectional rules.
    pub fn pairings(&self) -> impl Iterator<Item = &(ConjEvent, ConjEvent)> {
        self.pairs.iter()
    }

    pub fn independences(&self) -> impl Iterator<Item = &IndepStmt> {
        self.independences.iter()
    }

    pub fn symbols(&self) -> impl Iterator<Item = &Symbol> {
        self.symbols.iter()
    }

    pub fn max_event_width(&self) -> usize {
        let rule_widths = self.axioms.keys().map(|k| k.antecedent.width().max(k.consequent.width()));
        let indep_widths = self.independences.iter().map(|i| i.a.width().max(i.b.width()).max(i.c.width()));
        rule_widths.chain(indep_widths).max().unwrap_or(0)
    }

    /// Runs the enabled rules to a fixpoint (or `max_rounds`). Fails on the
    /// first empty intersection.
    pub fn saturate(&self, config: &SaturationConfig) -> Result<Saturation, SaturateError> {
        config.validate(self)?;
        saturate::run(self, config)
    }

    pub fn check_consistency(&self, config: &SaturationConfig) -> Result<Consistency, ConfigError> {
        match self.saturate(config) {
            Ok(s) => Ok(Consistency::Consistent {
                rounds: s.rounds(),
                reached_fixpoint: s.reached_fixpoint(),
            }),
            Err(SaturateError::Inconsistent(report)) => Ok(Consistency::Inconsistent(report)),
            Err(SaturateError::Config(e)) => Err(e),
        }
    }

    pub(crate) fn axiom_sources(&self) -> impl Iterator<Item = (&RuleKey, &[ProbInterval], ProbInterval)> {
        self.axioms.iter().map(|(k, a)| (k, a.sources.as_slice(), a.merged))
    }
}

fn check_bounds(b: ProbInterval) -> Result<(), CoreError> {
    ProbInterval::new(b.lo(), b.hi()).map(|_| ())
}

/// Resolves a meet: nonempty results pass through, crossings within
/// [`MERGE_TOLERANCE`] collapse to their midpoint, anything else is `None`.
pub(crate) fn settle(met: ProbInterval) -> Option<ProbInterval> {
    if !met.is_empty() {
        return Some(met);
    }
    if met.lo() - met.hi() <= MERGE_TOLERANCE {
        let mid = 0.5 * (met.lo() + met.hi());
        return Some(ProbInterval::raw(mid, mid));
    }
    None
}
