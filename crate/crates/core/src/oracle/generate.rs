//! Random models and knowledge bases read off them.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

use super::model::JointModel;
use crate::engine::KnowledgeBase;
use crate::event::{ConjEvent, Literal, Symbol};
use crate::interval::ProbInterval;
use crate::rule::{BidirRule, IndepStmt, UncertainRule};

/// Antecedents of generated rules have at least this probability.
const MIN_ANTECEDENT: f64 = 1e-3;
/// Generated independences hold to this precision in conditional form.
const EXACT: f64 = 1e-12;

/// Uniform draw from the atom simplex.
pub fn random_dirichlet_model(symbols: Vec<Symbol>, rng: &mut impl Rng) -> JointModel {
    let n_atoms = 1usize << symbols.len();
    let weights: Vec<f64> = (0..n_atoms).map(|_| Exp1.sample(rng)).collect();
    JointModel::normalized(symbols, weights).expect("at most five symbols and positive weights")
}

/// A random Bayesian network in symbol order: every symbol depends on at
/// most two earlier ones, with conditional probabilities in `(0.05, 0.95)`.
/// Such models satisfy many conditional independences exactly.
pub fn random_product_model(symbols: Vec<Symbol>, rng: &mut impl Rng) -> JointModel {
    let n = symbols.len();
    let mut parents: Vec<Vec<usize>> = Vec::with_capacity(n);
    let mut tables: Vec<Vec<f64>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut earlier: Vec<usize> = (0..i).collect();
        earlier.shuffle(rng);
        earlier.truncate(rng.random_range(0..=i.min(2)));
        earlier.sort();
        tables.push((0..1usize << earlier.len()).map(|_| rng.random_range(0.05..0.95)).collect());
        parents.push(earlier);
    }
    let mass: Vec<f64> = (0..1usize << n)
        .map(|atom| {
            (0..n)
                .map(|i| {
                    let row = parents[i].iter().enumerate().fold(0, |acc, (k, &p)| acc | (((atom >> p) & 1) << k));
                    let p_true = tables[i][row];
                    if atom >> i & 1 == 1 {
                        p_true
                    } else {
                        1.0 - p_true
                    }
                })
                .product()
        })
        .collect();
    JointModel::normalized(symbols, mass).expect("positive product masses")
}

fn random_event(rng: &mut impl Rng, pool: &[Symbol], max_width: usize) -> Option<ConjEvent> {
    if pool.is_empty() {
        return None;
    }
    let mut chosen: Vec<Symbol> = pool.to_vec();
    chosen.shuffle(rng);
    chosen.truncate(rng.random_range(1..=max_width.min(pool.len())));
    let literals = chosen.into_iter().map(|s| if rng.random_bool(0.5) { Literal::negative(s) } else { Literal::positive(s) });
    ConjEvent::new(literals).ok()
}

fn remaining(symbols: &[Symbol], used: &ConjEvent) -> Vec<Symbol> {
    symbols.iter().filter(|s| !used.mentions(s)).cloned().collect()
}

/// An interval of width at most `slack` around `t`, clipped to `[0, 1]`.
fn widen(rng: &mut impl Rng, t: f64, slack: f64) -> ProbInterval {
    if slack <= 0.0 {
        return ProbInterval::point(t.clamp(0.0, 1.0)).expect("t is a probability");
    }
    let width = rng.random_range(0.0..slack);
    let below = width * rng.random_range(0.0..1.0);
    ProbInterval::new((t - below).max(0.0), (t + width - below).min(1.0)).expect("t is a probability")
}

fn conditional(m: &JointModel, a: &ConjEvent, b: &ConjEvent) -> Option<f64> {
    let pa = m.probability(a).ok()?;
    if pa < MIN_ANTECEDENT {
        return None;
    }
    m.eval_conditional(a, b).ok()?
}

fn rule_from(m: &JointModel, rng: &mut impl Rng, a: &ConjEvent, b: &ConjEvent, slack: f64) -> Option<UncertainRule> {
    let t = conditional(m, a, b)?;
    UncertainRule::new(a.clone(), b.clone(), widen(rng, t, slack)).ok()
}

/// Independences `I(a, b, c)` over single-literal `a`, `c` and `b` of width
/// one or two that `m` satisfies to within `1e-12`.
fn exact_independences(m: &JointModel) -> Vec<IndepStmt> {
    let literals: Vec<ConjEvent> = m
        .symbols()
        .iter()
        .flat_map(|s| [Literal::positive(s.clone()), Literal::negative(s.clone())])
        .map(ConjEvent::literal)
        .collect();
    let mut middles = literals.clone();
    for (i, x) in literals.iter().enumerate() {
        for y in &literals[i + 1..] {
            if !x.shares_symbol(y) {
                middles.push(x.conjoin(y).expect("distinct symbols"));
            }
        }
    }
    let mut out = Vec::new();
    for b in &middles {
        for a in &literals {
            for c in &literals {
                if a.shares_symbol(b) || c.shares_symbol(b) || a.shares_symbol(c) {
                    continue;
                }
                let ab = a.conjoin(b).expect("disjoint");
                let (Some(with_a), Some(without)) = (conditional(m, &ab, c), conditional(m, b, c)) else {
                    continue;
                };
                if (with_a - without).abs() <= EXACT {
                    out.push(IndepStmt { a: a.clone(), b: b.clone(), c: c.clone() });
                }
            }
        }
    }
    out
}

/// A knowledge base that `m` satisfies: random rules and bidirectional rules
/// whose intervals contain the true conditionals (widened by at most
/// `slack`), and up to four independences that hold in `m`, each possibly
/// with the rules needed to chain through it.
pub fn random_kb_from_model(m: &JointModel, slack: f64, seed: u64) -> KnowledgeBase {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let symbols = m.symbols().to_vec();
    let mut kb = KnowledgeBase::new();
    let insert = |kb: &mut KnowledgeBase, item: crate::engine::KbItem| {
        kb.insert(item).expect("statements true in one model are consistent");
    };
    let pair = |rng: &mut ChaCha8Rng| -> Option<(ConjEvent, ConjEvent)> {
        let a = random_event(rng, &symbols, 2)?;
        let b = random_event(rng, &remaining(&symbols, &a), 2)?;
        Some((a, b))
    };

    for _ in 0..rng.random_range(2..=6) {
        if let Some((a, b)) = pair(&mut rng) {
            if let Some(r) = rule_from(m, &mut rng, &a, &b, slack) {
                insert(&mut kb, r.into());
            }
        }
    }
    for _ in 0..rng.random_range(0..=2) {
        let Some((a, b)) = pair(&mut rng) else { continue };
        let (Some(f), Some(g)) = (rule_from(m, &mut rng, &a, &b, slack), rule_from(m, &mut rng, &b, &a, slack)) else {
            continue;
        };
        if let Ok(bi) = BidirRule::new(a, b, f.bounds, g.bounds) {
            insert(&mut kb, bi.into());
        }
    }
    let mut candidates = exact_independences(m);
    candidates.shuffle(&mut rng);
    for ind in candidates.into_iter().take(4) {
        if ind.b.width() == 1 && rng.random_bool(0.5) {
            let not_b = ConjEvent::literal(ind.b.literals()[0].complement());
            for (x, y) in [(&ind.a, &ind.b), (&ind.b, &ind.c), (&not_b, &ind.c)] {
                if let Some(r) = rule_from(m, &mut rng, x, y, slack) {
                    insert(&mut kb, r.into());
                }
            }
        }
        insert(&mut kb, ind.into());
    }
    kb
}
