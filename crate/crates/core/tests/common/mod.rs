//! Helpers shared by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use duck_core::kbformat::{KbDocument, Query, Statement};
use duck_core::{BidirRule, ConjEvent, IndepStmt, Literal, ProbInterval, Symbol, UncertainRule};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

pub fn ev(s: &str) -> ConjEvent {
    ConjEvent::parse(s).unwrap()
}

pub fn iv(lo: f64, hi: f64) -> ProbInterval {
    ProbInterval::new(lo, hi).unwrap()
}

pub fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples").join(name)
}

pub fn read_corpus(name: &str) -> String {
    std::fs::read_to_string(corpus(name)).unwrap()
}

/// `[lo, lo + w]` with `lo` uniform in `lo_range` and `w` uniform in
/// `[0, max_width]`, a point a quarter of the time.
pub fn random_interval(rng: &mut impl Rng, lo_range: (f64, f64), max_width: f64) -> ProbInterval {
    let lo = rng.random_range(lo_range.0..=lo_range.1);
    let w = if rng.random_bool(0.25) { 0.0 } else { rng.random_range(0.0..=max_width) };
    iv(lo, (lo + w).min(1.0))
}

const NAMES: [&str; 7] = ["A", "B", "C", "D", "E", "rule", "x_1"];

/// Up to `n` pairwise disjoint random events, or fewer if the names run out.
fn disjoint_events(rng: &mut impl Rng, n: usize) -> Vec<ConjEvent> {
    let mut names = NAMES.to_vec();
    names.shuffle(rng);
    let mut out = Vec::new();
    let mut next = 0;
    for _ in 0..n {
        let w = rng.random_range(1..=2).min(names.len() - next);
        let lits = names[next..next + w].iter().map(|s| Literal {
            symbol: Symbol::new(s).unwrap(),
            negated: rng.random_bool(0.4),
        });
        out.push(ConjEvent::new(lits).unwrap());
        next += w;
    }
    out
}

fn random_prob(rng: &mut impl Rng) -> f64 {
    match rng.random_range(0..4) {
        0 => 0.0,
        1 => 1.0,
        2 => rng.random_range(0..=100) as f64 / 100.0,
        _ => rng.random_range(0.0..=1.0),
    }
}

fn random_bounds(rng: &mut impl Rng) -> ProbInterval {
    let (a, b) = (random_prob(rng), random_prob(rng));
    iv(a.min(b), a.max(b))
}

pub fn random_statement(rng: &mut impl Rng) -> Statement {
    match rng.random_range(0..5) {
        0 => {
            let e = disjoint_events(rng, 2);
            Statement::Rule(UncertainRule::new(e[0].clone(), e[1].clone(), random_bounds(rng)).unwrap())
        }
        1 => {
            let e = disjoint_events(rng, 2);
            let f = random_bounds(rng);
            let mut b = random_bounds(rng);
            if (f.hi() == 0.0) != (b.hi() == 0.0) {
                b = if f.hi() == 0.0 { iv(0.0, 0.0) } else { iv(b.lo(), 1.0) };
            }
            Statement::Birule(BidirRule::new(e[0].clone(), e[1].clone(), f, b).unwrap())
        }
        2 => {
            let e = disjoint_events(rng, 3);
            Statement::Indep(IndepStmt::new(e[0].clone(), e[1].clone(), e[2].clone()).unwrap())
        }
        3 => {
            let e = disjoint_events(rng, 2);
            Statement::Query(Query { target: e[0].clone(), given: e[1].clone() })
        }
        _ => {
            let len = rng.random_range(0..16);
            let text: String = (0..len).map(|_| *b" ab#&!:[]->09".choose(rng).unwrap() as char).collect();
            Statement::Comment(text)
        }
    }
}

pub fn random_document(rng: &mut impl Rng) -> KbDocument {
    let mut doc = KbDocument::new();
    for _ in 0..rng.random_range(0..20) {
        doc.push(random_statement(rng));
    }
    doc
}

fn space(rng: &mut impl Rng) -> &'static str {
    ["", " ", "  ", "\t"][rng.random_range(0..4)]
}

fn noisy_event(rng: &mut impl Rng, e: &ConjEvent) -> String {
    let mut lits: Vec<String> = e.literals().iter().map(|l| l.to_string()).collect();
    lits.shuffle(rng);
    let mut out = String::new();
    for (i, l) in lits.iter().enumerate() {
        if i > 0 {
            out.push_str(space(rng));
            out.push('&');
            out.push_str(space(rng));
        }
        out.push_str(l);
    }
    out
}

/// Decimal text for `p` that parses back to `p`, sometimes with extra
/// trailing zeros or without the leading zero.
fn noisy_number(rng: &mut impl Rng, p: f64) -> String {
    let mut s = format!("{p}");
    if rng.random_bool(0.3) {
        if !s.contains('.') {
            s.push('.');
        }
        s.push_str("000");
    }
    if rng.random_bool(0.3) && s.starts_with("0.") {
        s.remove(0);
    }
    s
}

fn noisy_interval(rng: &mut impl Rng, b: ProbInterval) -> String {
    let sp = |rng: &mut _| space(rng);
    format!(
        "[{}{}{},{}{}{}]",
        sp(rng),
        noisy_number(rng, b.lo()),
        sp(rng),
        sp(rng),
        noisy_number(rng, b.hi()),
        sp(rng)
    )
}

/// Source text for `doc` with irregular spacing, literal order and number
/// spelling, and blank lines.
pub fn render_noisy(rng: &mut impl Rng, doc: &KbDocument) -> String {
    let mut out = String::new();
    for s in doc.iter() {
        if rng.random_bool(0.1) {
            out.push('\n');
        }
        out.push_str(space(rng));
        let line = match s {
            Statement::Rule(r) => format!(
                "rule {}{}->{}{}{}:{}",
                noisy_event(rng, &r.antecedent),
                space(rng),
                space(rng),
                noisy_event(rng, &r.consequent),
                space(rng),
                noisy_interval(rng, r.bounds)
            ),
            Statement::Birule(b) => format!(
                "birule {} <->{}{} :{}{}/{}",
                noisy_event(rng, &b.a),
                space(rng),
                noisy_event(rng, &b.b),
                noisy_interval(rng, b.forward),
                space(rng),
                noisy_interval(rng, b.backward)
            ),
            Statement::Indep(i) => format!(
                "indep I({},{}{}, {}{})",
                noisy_event(rng, &i.a),
                space(rng),
                noisy_event(rng, &i.b),
                noisy_event(rng, &i.c),
                space(rng)
            ),
            Statement::Query(q) => format!(
                "query P({}{}|{}{})",
                noisy_event(rng, &q.target),
                space(rng),
                space(rng),
                noisy_event(rng, &q.given)
            ),
            Statement::Comment(c) => format!("#{c}"),
        };
        out.push_str(&line);
        out.push('\n');
    }
    out
}
