//! Textual knowledge-base format (`.duck` files).
//!
//! ```text
//! # comment
//! rule A & !B -> C : [0.5, 0.75]
//! birule A <-> B : [0.2, 0.8] / [0.8, 0.8]
//! indep I(A, B & C, D)
//! query P(D | A)
//! ```
//!
//! Each statement occupies one line. A `birule` lists the forward bounds on
//! `P(b|a)` first and the backward bounds on `P(a|b)` second. Numbers are
//! plain decimals. Serialization is canonical: literals sorted, one
//! statement per line, numbers in the shortest form that reads back to the
//! same `f64`.

mod lexer;
mod parser;

use std::fmt;

use crate::engine::{InsertError, KnowledgeBase, Saturation};
use crate::event::ConjEvent;
use crate::rule::{coupling_holds, BidirRule, IndepStmt, RuleKey, UncertainRule};

pub use parser::parse_kb;

/// A source region: 1-based line and column, length in characters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Span {
    pub line: usize,
    pub column: usize,
    pub len: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagnosticKind {
    Syntax,
    /// A bound outside `[0, 1]`.
    Range,
    IntervalOrder,
    Coupling,
    /// A symbol negated and unnegated in one conjunction.
    Contradiction,
    /// Events of one statement share a symbol.
    Overlap,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub span: Span,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.span.line, self.span.column, self.message)
    }
}

/// `query P(target | given)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Query {
    pub target: ConjEvent,
    pub given: ConjEvent,
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P({} | {})", self.target, self.given)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Statement {
    Rule(UncertainRule),
    Birule(BidirRule),
    Indep(IndepStmt),
    Query(Query),
    /// Text after the `#`.
    Comment(String),
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statement::Rule(r) => write!(f, "rule {r}"),
            Statement::Birule(b) => write!(f, "birule {b}"),
            Statement::Indep(i) => write!(f, "indep {i}"),
            Statement::Query(q) => write!(f, "query {q}"),
            Statement::Comment(c) => write!(f, "#{c}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Located {
    pub statement: Statement,
    pub span: Span,
}

/// Statements in source order. Equality compares statements only, not
/// their positions.
#[derive(Debug, Clone, Default)]
pub struct KbDocument {
    pub statements: Vec<Located>,
}

impl PartialEq for KbDocument {
    fn eq(&self, other: &Self) -> bool {
        self.statements.len() == other.statements.len()
            && self.statements.iter().zip(&other.statements).all(|(a, b)| a.statement == b.statement)
    }
}

impl KbDocument {
    pub fn new() -> Self {
        KbDocument::default()
    }

    /// Appends a statement without a source position.
    pub fn push(&mut self, statement: Statement) {
        self.statements.push(Located { statement, span: Span::default() });
    }

    pub fn extend(&mut self, other: KbDocument) {
        self.statements.extend(other.statements);
    }

    pub fn iter(&self) -> impl Iterator<Item = &Statement> {
        self.statements.iter().map(|l| &l.statement)
    }

    pub fn queries(&self) -> impl Iterator<Item = &Query> {
        self.iter().filter_map(|s| match s {
            Statement::Query(q) => Some(q),
            _ => None,
        })
    }

    /// Loads every rule, birule and independence in order. Fails when two
    /// statements bound the same conditional by disjoint intervals.
    pub fn to_kb(&self) -> Result<KnowledgeBase, InsertError> {
        let mut kb = KnowledgeBase::new();
        for s in self.iter() {
            match s {
                Statement::Rule(r) => kb.insert(r.clone())?,
                Statement::Birule(b) => kb.insert(b.clone())?,
                Statement::Indep(i) => kb.insert(i.clone())?,
                Statement::Query(_) | Statement::Comment(_) => {}
            }
        }
        Ok(kb)
    }

    /// The merged content of `kb`. Pairings come out as birules at the
    /// position of their forward rule unless merging broke the zero
    /// coupling, in which case both halves are written as plain rules.
    pub fn from_kb(kb: &KnowledgeBase) -> KbDocument {
        let mut doc = KbDocument::new();
        let mut paired = std::collections::BTreeMap::new();
        for (a, b) in kb.pairings() {
            let fk = RuleKey { antecedent: a.clone(), consequent: b.clone() };
            let bk = fk.reversed();
            let (Some(fw), Some(bw)) = (kb.bounds(&fk), kb.bounds(&bk)) else { continue };
            if coupling_holds(&fw, &bw) && !paired.contains_key(&fk) && !paired.contains_key(&bk) {
                let bi = BidirRule { a: a.clone(), b: b.clone(), forward: fw, backward: bw };
                paired.insert(bk, None);
                paired.insert(fk, Some(bi));
            }
        }
        for r in kb.rules() {
            match paired.get(&r.key()) {
                Some(Some(bi)) => doc.push(Statement::Birule(bi.clone())),
                Some(None) => {}
                None => doc.push(Statement::Rule(r)),
            }
        }
        for ind in kb.independences() {
            doc.push(Statement::Indep(ind.clone()));
        }
        doc
    }

    /// Every given and derived fact of a saturation, as plain rules and
    /// independences.
    pub fn from_saturation(sat: &Saturation) -> KbDocument {
        let mut doc = KbDocument::new();
        for r in sat.rules() {
            doc.push(Statement::Rule(r));
        }
        for ind in sat.independences() {
            doc.push(Statement::Indep(ind));
        }
        doc
    }
}

/// One canonical line per statement, each ending in a newline.
pub fn serialize(doc: &KbDocument) -> String {
    let mut out = String::new();
    for s in doc.iter() {
        out.push_str(&s.to_string());
        out.push('\n');
    }
    out
}

pub fn serialize_kb(kb: &KnowledgeBase) -> String {
    serialize(&KbDocument::from_kb(kb))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::SaturationConfig;
    use crate::interval::ProbInterval;
    use proptest::prelude::*;

    fn parse_ok(text: &str) -> KbDocument {
        parse_kb(text).unwrap_or_else(|d| panic!("{d:?}"))
    }

    #[test]
    fn canonical_literal_order() {
        assert_eq!(serialize(&parse_ok("rule B&A->C:[0,1]")), "rule A & B -> C : [0, 1]\n");
        assert_eq!(serialize(&parse_ok("rule A -> B : [0, 0.625]")), "rule A -> B : [0, 0.625]\n");
    }

    #[test]
    fn kb_serialization_keeps_birules() {
        let doc = parse_ok(
            "birule A <-> B : [0.2, 0.8] / [0.8, 0.8]\nrule B -> C : [0.5, 1]\nindep I(A, B, C)\nquery P(C | A)\n",
        );
        let kb = doc.to_kb().unwrap();
        assert_eq!(
            serialize_kb(&kb),
            "birule A <-> B : [0.2, 0.8] / [0.8, 0.8]\nrule B -> C : [0.5, 1]\nindep I(A, B, C)\n"
        );
    }

    #[test]
    fn broken_coupling_falls_back_to_rules() {
        let doc = parse_ok("birule A <-> B : [0, 0.5] / [0, 0.5]\nrule A -> B : [0, 0]\n");
        let text = serialize_kb(&doc.to_kb().unwrap());
        assert_eq!(text, "rule A -> B : [0, 0]\nrule B -> A : [0, 0.5]\n");
        assert!(parse_kb(&text).is_ok());
    }

    #[test]
    fn saturated_kb_round_trips() {
        let doc = parse_ok(
            "birule A <-> B : [0.2, 0.8] / [0.8, 0.8]\nbirule B <-> C : [0.2, 0.2] / [0.2, 0.2]\n",
        );
        let sat = doc.to_kb().unwrap().saturate(&SaturationConfig::default()).unwrap();
        let out = KbDocument::from_saturation(&sat);
        assert!(out.statements.len() > 4);
        assert_eq!(parse_ok(&serialize(&out)), out);
    }

    #[test]
    fn to_kb_reports_conflicts() {
        let doc = parse_ok("rule A -> B : [0.6, 0.6]\nrule A -> B : [0.7, 0.7]\n");
        assert!(matches!(doc.to_kb(), Err(InsertError::Inconsistent(_))));
    }

    const NAMES: [&str; 6] = ["A", "B", "C", "D", "rule", "x_1"];

    /// Up to three pairwise disjoint events over `NAMES`.
    fn events(n: usize) -> impl Strategy<Value = Vec<ConjEvent>> {
        (Just(NAMES.to_vec()).prop_shuffle(), proptest::collection::vec((1usize..=2, any::<[bool; 2]>()), n))
            .prop_map(|(names, shapes)| {
                let mut next = 0;
                shapes
                    .into_iter()
                    .map(|(w, neg)| {
                        let lits = (0..w).map(|i| {
                            let s = crate::event::Symbol::new(names[next + i]).unwrap();
                            crate::event::Literal { symbol: s, negated: neg[i] }
                        });
                        let e = ConjEvent::new(lits).unwrap();
                        next += w;
                        e
                    })
                    .collect()
            })
    }

    fn prob() -> impl Strategy<Value = f64> {
        prop_oneof![
            (0u32..=100).prop_map(|k| k as f64 / 100.0),
            0.0f64..=1.0,
            Just(0.0),
            Just(1.0),
        ]
    }

    fn interval() -> impl Strategy<Value = ProbInterval> {
        (prob(), prob()).prop_map(|(a, b)| ProbInterval::new(a.min(b), a.max(b)).unwrap())
    }

    fn statement() -> impl Strategy<Value = Statement> {
        prop_oneof![
            (events(2), interval()).prop_map(|(e, b)| Statement::Rule(
                UncertainRule::new(e[0].clone(), e[1].clone(), b).unwrap()
            )),
            (events(2), interval(), interval())
                .prop_filter("coupling", |(_, f, b)| coupling_holds(f, b))
                .prop_map(|(e, f, b)| Statement::Birule(
                    BidirRule::new(e[0].clone(), e[1].clone(), f, b).unwrap()
                )),
            events(3).prop_map(|e| Statement::Indep(
                IndepStmt::new(e[0].clone(), e[1].clone(), e[2].clone()).unwrap()
            )),
            events(2).prop_map(|e| Statement::Query(Query { target: e[0].clone(), given: e[1].clone() })),
            "[ a-z0-9#&!:]{0,12}".prop_map(Statement::Comment),
        ]
    }

    proptest! {
        #[test]
        fn serialize_then_parse_is_identity(stmts in proptest::collection::vec(statement(), 0..12)) {
            let mut doc = KbDocument::new();
            for s in stmts {
                doc.push(s);
            }
            let text = serialize(&doc);
            let back = parse_kb(&text).map_err(|d| TestCaseError::fail(format!("{d:?}\n{text}")))?;
            prop_assert_eq!(back, doc);
        }
    }
}
