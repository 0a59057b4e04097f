//! The local inference calculus.
//!
//! Every operation maps premise rules to a single [`Conclusion`] and keeps no
//! state. The interval arithmetic lives in [`bounds`]; the functions here
//! check that the premise events have the shape each rule requires and build
//! the concluded events.
//!
//! Inconsistent premises are not errors: they produce a conclusion whose
//! interval is empty.

pub mod bounds;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::event::{ConjEvent, Literal};
use crate::interval::ProbInterval;
use crate::rule::{BidirRule, IndepStmt, RuleKey, UncertainRule};

pub use bounds::{
    precise_rule_chaining as prc_bounds, prci_forward, prci_update, rci_point,
    rule_chaining as rc_bounds, ChainingBounds,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CalculusError {
    /// Premise events do not decompose the way the rule needs.
    #[error("premise shape: {0}")]
    Shape(String),
    /// Premises talk about different conditionals.
    #[error("premise mismatch: {0}")]
    Mismatch(String),
    #[error("precondition violated: {0}")]
    Precondition(&'static str),
}

/// Tag naming the rule that produced a derived fact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleId {
    Axiom,
    ChainComplementary,
    ChainWeaken,
    ChainImplied,
    ChainCertain,
    Sharpen,
    ConjunctionLeft,
    ConjunctionRight,
    WeakConjunctionLeft,
    WeakConjunctionRight,
    WeakConjunctionRightCertain,
    Negation,
    ConjunctionRightNegation,
    WeakConjunctionRightNegation,
    Annulment,
    InvarianceExtend,
    InvarianceReduce,
    Symmetry,
    RuleChaining,
    PreciseRuleChaining,
    IndependentChaining,
    IndependentUpdate,
    PreciseIndependentChaining,
    PreciseIndependentUpdate,
}

impl RuleId {
    pub const ALL: [RuleId; 24] = [
        RuleId::Axiom,
        RuleId::ChainComplementary,
        RuleId::ChainWeaken,
        RuleId::ChainImplied,
        RuleId::ChainCertain,
        RuleId::Sharpen,
        RuleId::ConjunctionLeft,
        RuleId::ConjunctionRight,
        RuleId::WeakConjunctionLeft,
        RuleId::WeakConjunctionRight,
        RuleId::WeakConjunctionRightCertain,
        RuleId::Negation,
        RuleId::ConjunctionRightNegation,
        RuleId::WeakConjunctionRightNegation,
        RuleId::Annulment,
        RuleId::InvarianceExtend,
        RuleId::InvarianceReduce,
        RuleId::Symmetry,
        RuleId::RuleChaining,
        RuleId::PreciseRuleChaining,
        RuleId::IndependentChaining,
        RuleId::IndependentUpdate,
        RuleId::PreciseIndependentChaining,
        RuleId::PreciseIndependentUpdate,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            RuleId::Axiom => "axiom",
            RuleId::ChainComplementary => "I1a",
            RuleId::ChainWeaken => "I1b",
            RuleId::ChainImplied => "I1c",
            RuleId::ChainCertain => "I1d",
            RuleId::Sharpen => "I2",
            RuleId::ConjunctionLeft => "I3",
            RuleId::ConjunctionRight => "I4",
            RuleId::WeakConjunctionLeft => "I5",
            RuleId::WeakConjunctionRight => "I6a",
            RuleId::WeakConjunctionRightCertain => "I6b",
            RuleId::Negation => "I7",
            RuleId::ConjunctionRightNegation => "I8",
            RuleId::WeakConjunctionRightNegation => "I9",
            RuleId::Annulment => "I10",
            RuleId::InvarianceExtend => "I11a",
            RuleId::InvarianceReduce => "I11b",
            RuleId::Symmetry => "I12",
            RuleId::RuleChaining => "RC",
            RuleId::PreciseRuleChaining => "PRC",
            RuleId::IndependentChaining => "RCI1",
            RuleId::IndependentUpdate => "RCI2",
            RuleId::PreciseIndependentChaining => "PRCI_A",
            RuleId::PreciseIndependentUpdate => "PRCI_B",
        }
    }

    /// Expands a tag or a family name (`I1`, `I6`, `I11`, `RCI`, `PRCI`) to
    /// the rules it names.
    pub fn family(name: &str) -> Option<Vec<RuleId>> {
        let members: Vec<RuleId> = match name {
            "I1" => vec![
                RuleId::ChainComplementary,
                RuleId::ChainWeaken,
                RuleId::ChainImplied,
                RuleId::ChainCertain,
            ],
            "I6" => vec![RuleId::WeakConjunctionRight, RuleId::WeakConjunctionRightCertain],
            "I11" => vec![RuleId::InvarianceExtend, RuleId::InvarianceReduce],
            "RCI" => vec![RuleId::IndependentChaining, RuleId::IndependentUpdate],
            "PRCI" => vec![RuleId::PreciseIndependentChaining, RuleId::PreciseIndependentUpdate],
            tag => vec![tag.parse().ok()?],
        };
        Some(members)
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for RuleId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RuleId::ALL
            .iter()
            .copied()
            .find(|r| r.tag() == s)
            .ok_or_else(|| format!("unknown rule tag `{s}`"))
    }
}

/// Identity of a premise used by a derivation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PremiseRef {
    Rule(RuleKey),
    Indep(IndepStmt),
}

/// A derived rule together with the rule that produced it and its premises.
/// `rule.bounds` may be empty, which marks the premises as inconsistent.
#[derive(Debug, Clone, PartialEq)]
pub struct Conclusion {
    pub rule: UncertainRule,
    pub rule_id: RuleId,
    pub premises: Vec<PremiseRef>,
}

impl Conclusion {
    pub fn bounds(&self) -> ProbInterval {
        self.rule.bounds
    }

    pub fn is_inconsistent(&self) -> bool {
        self.rule.bounds.is_empty()
    }
}

fn conclude(
    antecedent: ConjEvent,
    consequent: ConjEvent,
    bounds: ProbInterval,
    rule_id: RuleId,
    premises: Vec<PremiseRef>,
) -> Result<Conclusion, CalculusError> {
    let rule = UncertainRule::new(antecedent, consequent, bounds)
        .map_err(|e| CalculusError::Shape(e.to_string()))?;
    Ok(Conclusion { rule, rule_id, premises })
}

fn refs(rules: &[&UncertainRule]) -> Vec<PremiseRef> {
    rules.iter().map(|r| PremiseRef::Rule(r.key())).collect()
}

fn same_antecedent(r1: &UncertainRule, r2: &UncertainRule) -> Result<(), CalculusError> {
    if r1.antecedent != r2.antecedent {
        return Err(CalculusError::Mismatch(format!(
            "antecedents `{}` and `{}` differ",
            r1.antecedent, r2.antecedent
        )));
    }
    Ok(())
}

fn shape(msg: impl Into<String>) -> CalculusError {
    CalculusError::Shape(msg.into())
}

fn join(e1: &ConjEvent, e2: &ConjEvent) -> Result<ConjEvent, CalculusError> {
    e1.conjoin(e2).map_err(|e| shape(e.to_string()))
}

fn single_literal(e: &ConjEvent) -> Option<&Literal> {
    match e.literals() {
        [only] => Some(only),
        _ => None,
    }
}

/// I1a: `A -> F C`, `A -> !F C` give `A -> C`. `F` must be one literal.
pub fn chain_complementary(
    fc: &UncertainRule,
    not_fc: &UncertainRule,
) -> Result<Conclusion, CalculusError> {
    same_antecedent(fc, not_fc)?;
    let split = fc.consequent.literals().iter().find(|f| {
        !not_fc.consequent.contains(f) && not_fc.consequent.contains(&f.complement())
    });
    let Some(f) = split else {
        return Err(shape("consequents must differ in the polarity of one literal"));
    };
    let f_event = ConjEvent::literal(f.clone());
    let c = fc.consequent.without(&f_event).ok_or_else(|| shape("consequent has no remainder C"))?;
    let not_f = ConjEvent::literal(f.complement());
    if not_fc.consequent != join(&not_f, &c)? {
        return Err(shape(format!("`{}` is not `{}` with `{f}` negated", not_fc.consequent, fc.consequent)));
    }
    let bounds = bounds::chain_complementary(fc.bounds, not_fc.bounds);
    conclude(fc.antecedent.clone(), c, bounds, RuleId::ChainComplementary, refs(&[fc, not_fc]))
}

/// I1b: `A -> B C` gives `A -> [x1, 1] C` for the kept part `C`.
pub fn chain_weaken(bc: &UncertainRule, keep: &ConjEvent) -> Result<Conclusion, CalculusError> {
    if !keep.is_subset_of(&bc.consequent) || keep == &bc.consequent {
        return Err(shape(format!("`{keep}` is not a proper part of `{}`", bc.consequent)));
    }
    let bounds = bounds::chain_weaken(bc.bounds);
    conclude(bc.antecedent.clone(), keep.clone(), bounds, RuleId::ChainWeaken, refs(&[bc]))
}

/// I1c: `A -> B C` and `C -> [1, 1] B` give `A -> C` with the same bounds.
pub fn chain_implied(
    bc: &UncertainRule,
    c_implies_b: &UncertainRule,
) -> Result<Conclusion, CalculusError> {
    let (b, c) = (&c_implies_b.consequent, &c_implies_b.antecedent);
    if join(b, c)? != bc.consequent {
        return Err(CalculusError::Mismatch(format!(
            "`{c_implies_b}` does not split `{}`",
            bc.consequent
        )));
    }
    if c_implies_b.bounds != ProbInterval::ONE {
        return Err(CalculusError::Precondition("C -> B must hold with certainty"));
    }
    conclude(bc.antecedent.clone(), c.clone(), bc.bounds, RuleId::ChainImplied, refs(&[bc, c_implies_b]))
}

/// I1d: `A -> B C` and `A -> [1, 1] B` give `A -> C` with the same bounds.
pub fn chain_certain(
    bc: &UncertainRule,
    a_implies_b: &UncertainRule,
) -> Result<Conclusion, CalculusError> {
    same_antecedent(bc, a_implies_b)?;
    if !a_implies_b.consequent.is_subset_of(&bc.consequent) {
        return Err(shape(format!("`{}` is not part of `{}`", a_implies_b.consequent, bc.consequent)));
    }
    let c = bc
        .consequent
        .without(&a_implies_b.consequent)
        .ok_or_else(|| shape("consequent has no remainder C"))?;
    if a_implies_b.bounds != ProbInterval::ONE {
        return Err(CalculusError::Precondition("A -> B must hold with certainty"));
    }
    conclude(bc.antecedent.clone(), c, bc.bounds, RuleId::ChainCertain, refs(&[bc, a_implies_b]))
}

/// I2: intersection of two bounds on the same conditional.
pub fn sharpen(r1: &UncertainRule, r2: &UncertainRule) -> Result<Conclusion, CalculusError> {
    if r1.key() != r2.key() {
        return Err(CalculusError::Mismatch(format!("`{}` vs `{}`", r1.key(), r2.key())));
    }
    let bounds = r1.bounds.meet(&r2.bounds);
    conclude(r1.antecedent.clone(), r1.consequent.clone(), bounds, RuleId::Sharpen, refs(&[r1, r2]))
}

/// I3: `A -> B` with `x1 > 0` and `A -> B C` give `A B -> C`.
pub fn conjunction_left(
    rb: &UncertainRule,
    rbc: &UncertainRule,
) -> Result<Conclusion, CalculusError> {
    same_antecedent(rb, rbc)?;
    if !rb.consequent.is_subset_of(&rbc.consequent) {
        return Err(shape(format!("`{}` is not part of `{}`", rb.consequent, rbc.consequent)));
    }
    let c = rbc.consequent.without(&rb.consequent).ok_or_else(|| shape("no remainder C"))?;
    let bounds = bounds::conjunction_left(rb.bounds, rbc.bounds)?;
    let ab = join(&rb.antecedent, &rb.consequent)?;
    conclude(ab, c, bounds, RuleId::ConjunctionLeft, refs(&[rb, rbc]))
}

/// I4: `A -> B` and `A B -> C` give `A -> B C`.
pub fn conjunction_right(
    rb: &UncertainRule,
    rc: &UncertainRule,
) -> Result<Conclusion, CalculusError> {
    if rc.antecedent != join(&rb.antecedent, &rb.consequent)? {
        return Err(CalculusError::Mismatch(format!(
            "`{}` is not the conjunction of `{}` and `{}`",
            rc.antecedent, rb.antecedent, rb.consequent
        )));
    }
    let bc = join(&rb.consequent, &rc.consequent)?;
    let bounds = bounds::conjunction_right(rb.bounds, rc.bounds);
    conclude(rb.antecedent.clone(), bc, bounds, RuleId::ConjunctionRight, refs(&[rb, rc]))
}

/// I5: `A <-> B` with a positive lower bound on `P(A|B)` and `B -> C` give
/// `A B -> C`.
pub fn weak_conjunction_left(
    bi: &BidirRule,
    rc: &UncertainRule,
) -> Result<Conclusion, CalculusError> {
    if rc.antecedent != bi.b {
        return Err(CalculusError::Mismatch(format!("`{}` is not `{}`", rc.antecedent, bi.b)));
    }
    let bounds = bounds::weak_conjunction_left(bi.backward, rc.bounds)?;
    let ab = join(&bi.a, &bi.b)?;
    let (forward, backward) = bi.split();
    conclude(
        ab,
        rc.consequent.clone(),
        bounds,
        RuleId::WeakConjunctionLeft,
        refs(&[&forward, &backward, rc]),
    )
}

/// I6a: `A -> B` gives `A -> [0, x2] B C` for any `C` other than `A`.
pub fn weak_conjunction_right(
    r: &UncertainRule,
    extra: &ConjEvent,
) -> Result<Conclusion, CalculusError> {
    if extra == &r.antecedent {
        return Err(CalculusError::Precondition("C must differ from the antecedent A"));
    }
    let bc = join(&r.consequent, extra)?;
    let bounds = bounds::weak_conjunction_right(r.bounds);
    conclude(r.antecedent.clone(), bc, bounds, RuleId::WeakConjunctionRight, refs(&[r]))
}

/// I6b: `A -> B` and `B -> [y, y] C` with `y` 0 or 1 give `A -> B C`.
pub fn weak_conjunction_right_certain(
    r: &UncertainRule,
    bc: &UncertainRule,
) -> Result<Conclusion, CalculusError> {
    if bc.antecedent != r.consequent {
        return Err(CalculusError::Mismatch(format!("`{}` is not `{}`", bc.antecedent, r.consequent)));
    }
    if bc.consequent == r.antecedent {
        return Err(CalculusError::Precondition("C must differ from the antecedent A"));
    }
    let bounds = bounds::weak_conjunction_right_certain(r.bounds, bc.bounds)?;
    let joined = join(&r.consequent, &bc.consequent)?;
    conclude(r.antecedent.clone(), joined, bounds, RuleId::WeakConjunctionRightCertain, refs(&[r, bc]))
}

/// I7: `A -> F` gives `A -> !F` for a single literal `F`.
pub fn negate(r: &UncertainRule) -> Result<Conclusion, CalculusError> {
    let f = single_literal(&r.consequent)
        .ok_or_else(|| shape(format!("`{}` is not a single literal", r.consequent)))?;
    let bounds = bounds::negate(r.bounds);
    conclude(
        r.antecedent.clone(),
        ConjEvent::literal(f.complement()),
        bounds,
        RuleId::Negation,
        refs(&[r]),
    )
}

/// I8: `A -> C` and `A -> F C` give `A -> !F C`.
pub fn conjunction_right_negation(
    rc: &UncertainRule,
    rfc: &UncertainRule,
) -> Result<Conclusion, CalculusError> {
    same_antecedent(rc, rfc)?;
    let rest = if rc.consequent.is_subset_of(&rfc.consequent) {
        rfc.consequent.without(&rc.consequent)
    } else {
        None
    };
    let f = rest
        .as_ref()
        .and_then(single_literal)
        .ok_or_else(|| shape(format!("`{}` is not `{}` plus one literal", rfc.consequent, rc.consequent)))?;
    let not_fc = join(&ConjEvent::literal(f.complement()), &rc.consequent)?;
    let bounds = bounds::conjunction_right_negation(rc.bounds, rfc.bounds);
    conclude(rc.antecedent.clone(), not_fc, bounds, RuleId::ConjunctionRightNegation, refs(&[rc, rfc]))
}

/// I9: `A <-> F`, `F <-> C` with positive lower bounds on `P(A|F)` and
/// `P(F|C)` give `A -> !F C`.
pub fn weak_conjunction_right_negation(
    af: &BidirRule,
    fc: &BidirRule,
) -> Result<Conclusion, CalculusError> {
    if af.b != fc.a {
        return Err(CalculusError::Mismatch(format!("`{}` is not `{}`", af.b, fc.a)));
    }
    let f = single_literal(&af.b).ok_or_else(|| shape(format!("`{}` is not a single literal", af.b)))?;
    if af.a == fc.b {
        return Err(CalculusError::Precondition("C must differ from A"));
    }
    let bounds = bounds::weak_conjunction_right_negation(af.forward, af.backward, fc.forward, fc.backward)?;
    let not_fc = join(&ConjEvent::literal(f.complement()), &fc.b)?;
    let (r1, r2) = af.split();
    let (r3, r4) = fc.split();
    conclude(
        af.a.clone(),
        not_fc,
        bounds,
        RuleId::WeakConjunctionRightNegation,
        refs(&[&r1, &r2, &r3, &r4]),
    )
}

/// I10: `P(A|B) = 0` forces `P(B|A) = 0`.
pub fn annul(zero_back: &UncertainRule, r: &UncertainRule) -> Result<Conclusion, CalculusError> {
    if zero_back.key() != r.key().reversed() {
        return Err(CalculusError::Mismatch(format!("`{}` is not the reverse of `{}`", zero_back.key(), r.key())));
    }
    if zero_back.bounds != ProbInterval::ZERO {
        return Err(CalculusError::Precondition("the reverse rule must have bounds [0, 0]"));
    }
    conclude(
        r.antecedent.clone(),
        r.consequent.clone(),
        ProbInterval::ZERO,
        RuleId::Annulment,
        refs(&[zero_back, r]),
    )
}

/// I11a: `B -> C` and `I(A, B, C)` give `A B -> C`.
pub fn invariance_extend(r: &UncertainRule, ind: &IndepStmt) -> Result<Conclusion, CalculusError> {
    if r.antecedent != ind.b || r.consequent != ind.c {
        return Err(CalculusError::Mismatch(format!("`{}` does not match {ind}", r.key())));
    }
    let ab = join(&ind.a, &ind.b)?;
    let premises = vec![PremiseRef::Rule(r.key()), PremiseRef::Indep(ind.clone())];
    conclude(ab, r.consequent.clone(), r.bounds, RuleId::InvarianceExtend, premises)
}

/// I11b: `A B -> C` and `I(A, B, C)` give `B -> C`.
pub fn invariance_reduce(r: &UncertainRule, ind: &IndepStmt) -> Result<Conclusion, CalculusError> {
    if r.antecedent != join(&ind.a, &ind.b)? || r.consequent != ind.c {
        return Err(CalculusError::Mismatch(format!("`{}` does not match {ind}", r.key())));
    }
    let premises = vec![PremiseRef::Rule(r.key()), PremiseRef::Indep(ind.clone())];
    conclude(ind.b.clone(), r.consequent.clone(), r.bounds, RuleId::InvarianceReduce, premises)
}

/// I12: `I(A, B, C)` and `B <-> C` with a positive lower bound in either
/// direction give `I(C, B, A)`.
pub fn independence_symmetry(ind: &IndepStmt, bi: &BidirRule) -> Result<IndepStmt, CalculusError> {
    let matches = (bi.a == ind.b && bi.b == ind.c) || (bi.a == ind.c && bi.b == ind.b);
    if !matches {
        return Err(CalculusError::Mismatch(format!("`{} <-> {}` does not match {ind}", bi.a, bi.b)));
    }
    if bi.forward.lo() <= 0.0 && bi.backward.lo() <= 0.0 {
        return Err(CalculusError::Precondition("symmetry needs P(B C) > 0"));
    }
    Ok(ind.mirrored())
}

fn chaining_events(ab: &BidirRule, bc: &BidirRule) -> Result<(), CalculusError> {
    if ab.b != bc.a {
        return Err(CalculusError::Mismatch(format!("`{}` is not `{}`", ab.b, bc.a)));
    }
    if ab.a.shares_symbol(&bc.b) {
        return Err(shape(format!("`{}` and `{}` share a symbol", ab.a, bc.b)));
    }
    Ok(())
}

fn chaining_refs(ab: &BidirRule, bc: &BidirRule) -> Vec<PremiseRef> {
    let (r1, r2) = ab.split();
    let (r3, r4) = bc.split();
    refs(&[&r1, &r2, &r3, &r4])
}

/// Rule chaining `A <-> B <-> C` to `A -> C` for a single-literal `B`.
pub fn rule_chaining(ab: &BidirRule, bc: &BidirRule) -> Result<Conclusion, CalculusError> {
    chaining_events(ab, bc)?;
    if ab.b.width() != 1 {
        return Err(shape(format!("`{}` is not a single literal", ab.b)));
    }
    let bounds = bounds::rule_chaining(ab.forward, ab.backward, bc.forward, bc.backward);
    conclude(ab.a.clone(), bc.b.clone(), bounds, RuleId::RuleChaining, chaining_refs(ab, bc))
}

/// Precise rule chaining `A <-> B <-> C` to `A -> C`; `B` may be any
/// conjunction.
pub fn precise_rule_chaining(ab: &BidirRule, bc: &BidirRule) -> Result<Conclusion, CalculusError> {
    chaining_events(ab, bc)?;
    let result = bounds::precise_rule_chaining(ab.forward, ab.backward, bc.forward, bc.backward);
    conclude(ab.a.clone(), bc.b.clone(), result.bounds, RuleId::PreciseRuleChaining, chaining_refs(ab, bc))
}

/// Chaining through a single literal `B` under `I(A, B, C)` and
/// `I(A, !B, C)`.
///
/// Returns the bound on `P(C|A)` and, when `x1 > 0` or `y1 > 0`, the updated
/// bound on `P(B|A C)`. Point premises are tagged `RCI1`/`RCI2`, interval
/// premises `PRCI_A`/`PRCI_B`.
pub fn chaining_under_independence(
    ab: &UncertainRule,
    bc: &UncertainRule,
    not_bc: &UncertainRule,
    ind: &IndepStmt,
    not_ind: &IndepStmt,
) -> Result<(Conclusion, Option<Conclusion>), CalculusError> {
    let b = single_literal(&ab.consequent)
        .ok_or_else(|| shape(format!("`{}` is not a single literal", ab.consequent)))?;
    let not_b = ConjEvent::literal(b.complement());
    let (a, c) = (&ab.antecedent, &bc.consequent);
    if bc.antecedent != ab.consequent || not_bc.antecedent != not_b || &not_bc.consequent != c {
        return Err(CalculusError::Mismatch("rules do not form A -> B, B -> C, !B -> C".into()));
    }
    let expected = IndepStmt { a: a.clone(), b: ab.consequent.clone(), c: c.clone() };
    let expected_not = IndepStmt { a: a.clone(), b: not_b.clone(), c: c.clone() };
    if ind != &expected || not_ind != &expected_not {
        return Err(CalculusError::Mismatch(format!("independences must be {expected} and {expected_not}")));
    }
    let (u, x, y) = (ab.bounds, bc.bounds, not_bc.bounds);
    let premises = vec![
        PremiseRef::Rule(ab.key()),
        PremiseRef::Rule(bc.key()),
        PremiseRef::Rule(not_bc.key()),
        PremiseRef::Indep(ind.clone()),
        PremiseRef::Indep(not_ind.clone()),
    ];
    let ac = join(a, c)?;
    if u.is_point() && x.is_point() && y.is_point() {
        let (w, z) = bounds::rci_point(u.lo(), x.lo(), y.lo());
        let forward = conclude(
            a.clone(),
            c.clone(),
            ProbInterval::raw(w, w),
            RuleId::IndependentChaining,
            premises.clone(),
        )?;
        let update = match z {
            Some(z) => Some(conclude(
                ac,
                ab.consequent.clone(),
                ProbInterval::raw(z, z),
                RuleId::IndependentUpdate,
                premises,
            )?),
            None => None,
        };
        return Ok((forward, update));
    }
    let forward = conclude(
        a.clone(),
        c.clone(),
        bounds::prci_forward(u, x, y),
        RuleId::PreciseIndependentChaining,
        premises.clone(),
    )?;
    let update = if x.lo() > 0.0 || y.lo() > 0.0 {
        Some(conclude(
            ac,
            ab.consequent.clone(),
            bounds::prci_update(u, x, y)?,
            RuleId::PreciseIndependentUpdate,
            premises,
        )?)
    } else {
        None
    };
    Ok((forward, update))
}
