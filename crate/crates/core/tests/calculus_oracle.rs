//! Inference-rule values checked against joint distributions: the sampling
//! oracle for tightness and random models for soundness.

mod common;

use common::{ev, iv};
use duck_core::calculus::{
    self, prc_bounds, prci_forward, prci_update, rc_bounds, rci_point, Conclusion,
};
use duck_core::engine::KnowledgeBase;
use duck_core::oracle::{estimate_range, random_dirichlet_model, JointModel, OracleReport};
use duck_core::{BidirRule, ConjEvent, IndepStmt, ProbInterval, Symbol, UncertainRule};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rule(a: &str, b: &str, lo: f64, hi: f64) -> UncertainRule {
    UncertainRule::new(ev(a), ev(b), iv(lo, hi)).unwrap()
}

fn birule(a: &str, b: &str, f: (f64, f64), g: (f64, f64)) -> BidirRule {
    BidirRule::new(ev(a), ev(b), iv(f.0, f.1), iv(g.0, g.1)).unwrap()
}

fn oracle(kb: &KnowledgeBase, given: &str, target: &str, budget: usize) -> OracleReport {
    estimate_range(kb, &ev(given), &ev(target), budget, 17).unwrap()
}

fn assert_close(b: ProbInterval, lo: f64, hi: f64) {
    assert!((b.lo() - lo).abs() < 1e-12 && (b.hi() - hi).abs() < 1e-12, "{b} != [{lo}, {hi}]");
}

fn assert_within(r: &OracleReport, b: ProbInterval, tol: f64) {
    assert!(r.achieved_min >= b.lo() - tol && r.achieved_max <= b.hi() + tol, "oracle [{}, {}] outside {b}", r.achieved_min, r.achieved_max);
}

fn assert_tight(r: &OracleReport, b: ProbInterval, gap: f64) {
    assert!(
        (r.achieved_min - b.lo()).abs() <= gap && (b.hi() - r.achieved_max).abs() <= gap,
        "oracle [{}, {}] not within {gap} of {b}",
        r.achieved_min,
        r.achieved_max
    );
}

#[test]
fn conjunction_left_example_matches_models() {
    let (ab, abc) = (rule("A", "B", 0.5, 0.5), rule("A", "B & C", 0.2, 0.2));
    let c = calculus::conjunction_left(&ab, &abc).unwrap();
    assert_eq!(c.rule.antecedent, ev("A & B"));
    assert_close(c.bounds(), 0.4, 0.4);
    let kb = KnowledgeBase::from_items([ab, abc]).unwrap();
    let r = oracle(&kb, "A & B", "C", 20_000);
    assert!((r.achieved_min - 0.4).abs() < 1e-6 && (r.achieved_max - 0.4).abs() < 1e-6);
}

#[test]
fn weak_conjunction_left_is_tight() {
    let bi = birule("A", "B", (0.0, 1.0), (0.8, 1.0));
    let bc = rule("B", "C", 0.7, 0.9);
    let c = calculus::weak_conjunction_left(&bi, &bc).unwrap();
    assert_close(c.bounds(), 0.625, 1.0);
    let kb = KnowledgeBase::from_items([duck_core::engine::KbItem::from(bi), bc.into()]).unwrap();
    let r = oracle(&kb, "A & B", "C", 50_000);
    assert_within(&r, c.bounds(), 1e-6);
    assert_tight(&r, c.bounds(), 0.02);
}

#[test]
fn conjunction_right_negation_is_sound() {
    let (ac, afc) = (rule("A", "C", 0.9, 0.95), rule("A", "B & C", 0.2, 0.3));
    let c = calculus::conjunction_right_negation(&ac, &afc).unwrap();
    assert_eq!(c.rule.consequent, ev("!B & C"));
    assert_close(c.bounds(), 0.6, 0.75);
    let kb = KnowledgeBase::from_items([ac, afc]).unwrap();
    let r = oracle(&kb, "A", "!B & C", 50_000);
    assert_within(&r, c.bounds(), 1e-6);
}

#[test]
fn weak_conjunction_right_negation_is_sound() {
    let af = birule("A", "B", (0.0, 0.5), (0.5, 1.0));
    let fc = birule("B", "C", (0.0, 0.4), (0.8, 1.0));
    let c = calculus::weak_conjunction_right_negation(&af, &fc).unwrap();
    assert_eq!(c.rule.consequent, ev("!B & C"));
    assert_close(c.bounds(), 0.0, 0.1);
    let kb = KnowledgeBase::from_items([af, fc]).unwrap();
    let r = oracle(&kb, "A", "!B & C", 50_000);
    assert_within(&r, c.bounds(), 1e-6);
}

#[test]
fn plain_chaining_example_is_sound_but_loose() {
    let (u, v, x, y) = (iv(0.2, 0.8), iv(0.8, 0.8), iv(0.2, 0.2), iv(0.2, 0.2));
    assert_close(rc_bounds(u, v, x, y), 0.0, 1.0);
    let kb = KnowledgeBase::from_items([
        BidirRule::new(ev("A"), ev("B"), u, v).unwrap(),
        BidirRule::new(ev("B"), ev("C"), x, y).unwrap(),
    ])
    .unwrap();
    let r = oracle(&kb, "A", "C", 50_000);
    assert_within(&r, prc_bounds(u, v, x, y).bounds, 1e-6);
    assert!(r.achieved_max < 0.9, "plain chaining's upper bound 1 is not attained");
}

#[test]
fn independent_chaining_point_values() {
    let (w, z) = rci_point(0.2, 0.8, 0.6);
    assert!((w - 0.64).abs() < 1e-12);
    assert!((z.unwrap() - 0.25).abs() < 1e-12);
    let kb = KnowledgeBase::from_items([
        duck_core::engine::KbItem::from(rule("A", "B", 0.2, 0.2)),
        rule("B", "C", 0.8, 0.8).into(),
        rule("!B", "C", 0.6, 0.6).into(),
        IndepStmt::new(ev("A"), ev("B"), ev("C")).unwrap().into(),
        IndepStmt::new(ev("A"), ev("!B"), ev("C")).unwrap().into(),
    ])
    .unwrap();
    let r = oracle(&kb, "A & C", "B", 20_000);
    assert!((r.achieved_min - 0.25).abs() < 1e-4 && (r.achieved_max - 0.25).abs() < 1e-4, "{r:?}");
    let r = oracle(&kb, "A", "C", 20_000);
    assert!((r.achieved_min - 0.64).abs() < 1e-4 && (r.achieved_max - 0.64).abs() < 1e-4);
}

/// Extremes of `f` over a grid on the box `u x v x y`, vertices included.
fn box_extremes(u: ProbInterval, x: ProbInterval, y: ProbInterval, f: impl Fn(f64, f64, f64) -> Option<f64>) -> (f64, f64) {
    let pts = |b: ProbInterval| (0..=20).map(move |i| b.lo() + b.width() * i as f64 / 20.0);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for a in pts(u) {
        for b in pts(x) {
            for c in pts(y) {
                if let Some(v) = f(a, b, c) {
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
            }
        }
    }
    (lo, hi)
}

#[test]
fn interval_chaining_under_independence_matches_box_search() {
    let mix = |u: f64, x: f64, y: f64| Some(u * x + (1.0 - u) * y);
    let (u, x, y) = (iv(0.3, 0.6), iv(0.2, 0.2), iv(0.5, 0.9));
    let (lo, hi) = box_extremes(u, x, y, mix);
    assert!((lo - 0.32).abs() < 1e-9 && (hi - 0.69).abs() < 1e-9);
    assert_close(prci_forward(u, x, y), 0.32, 0.69);

    let update = |u: f64, x: f64, y: f64| {
        let w = u * x + (1.0 - u) * y;
        (w > 0.0).then(|| u * x / w)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for _ in 0..300 {
        let mut draw = || {
            let (a, b): (f64, f64) = (rng.random_range(0.0..=1.0), rng.random_range(0.0..=1.0));
            iv(a.min(b), a.max(b))
        };
        let (u, x, y) = (draw(), draw(), draw());
        let (lo, hi) = box_extremes(u, x, y, mix);
        let f = prci_forward(u, x, y);
        assert!((f.lo() - lo).abs() < 1e-9 && (f.hi() - hi).abs() < 1e-9, "{u} {x} {y}: {f} vs [{lo}, {hi}]");
        // the update needs 0 < u < 1 throughout and a positive denominator
        if u.lo() > 0.0 && u.hi() < 1.0 && x.lo() > 0.0 && y.lo() > 0.0 {
            let (lo, hi) = box_extremes(u, x, y, update);
            let z = prci_update(u, x, y).unwrap();
            assert!((z.lo() - lo).abs() < 1e-9 && (z.hi() - hi).abs() < 1e-9, "{u} {x} {y}: {z} vs [{lo}, {hi}]");
        }
    }
}

#[test]
fn interval_update_example() {
    assert_close(prci_forward(iv(0.8, 1.0), iv(0.7, 0.8), iv(0.2, 0.3)), 0.6, 0.8);
    let z = prci_update(iv(0.6, 0.8), iv(0.4, 0.4), iv(0.8, 0.9)).unwrap();
    assert_close(z, 0.4, 2.0 / 3.0);
}

fn symbols() -> Vec<Symbol> {
    ["A", "B", "C", "D"].iter().map(|s| Symbol::new(s).unwrap()).collect()
}

/// A rule whose interval contains the model's conditional, widened at
/// random; exact half the time.
fn true_rule(m: &JointModel, rng: &mut ChaCha8Rng, a: &ConjEvent, b: &ConjEvent) -> UncertainRule {
    let p = m.eval_conditional(a, b).unwrap().unwrap();
    let bounds = if rng.random_bool(0.5) {
        iv(p, p)
    } else {
        iv((p - rng.random_range(0.0..0.3)).max(0.0), (p + rng.random_range(0.0..0.3)).min(1.0))
    };
    UncertainRule::new(a.clone(), b.clone(), bounds).unwrap()
}

fn true_birule(m: &JointModel, rng: &mut ChaCha8Rng, a: &ConjEvent, b: &ConjEvent) -> BidirRule {
    let (f, g) = (true_rule(m, rng, a, b), true_rule(m, rng, b, a));
    BidirRule::new(a.clone(), b.clone(), f.bounds, g.bounds).unwrap()
}

fn check(m: &JointModel, name: &str, c: Result<Conclusion, calculus::CalculusError>) -> bool {
    let Ok(c) = c else { return false };
    let p = m.eval_conditional(&c.rule.antecedent, &c.rule.consequent).unwrap().unwrap();
    let b = c.bounds();
    assert!(b.lo() - 1e-9 <= p && p <= b.hi() + 1e-9, "{name}: true value {p} outside {}", c.rule);
    true
}

/// Every rule, fed premises that a random model satisfies, concludes an
/// interval containing that model's value.
#[test]
fn rules_are_sound_on_random_models() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut fired = std::collections::BTreeMap::<&str, usize>::new();
    for _ in 0..2000 {
        let m = random_dirichlet_model(symbols(), &mut rng);
        let lit = |rng: &mut ChaCha8Rng, s: &str| ev(&if rng.random_bool(0.5) { format!("!{s}") } else { s.to_string() });
        let (a, b, c, d) = (lit(&mut rng, "A"), lit(&mut rng, "B"), lit(&mut rng, "C"), lit(&mut rng, "D"));
        let a = if rng.random_bool(0.3) { a.conjoin(&d).unwrap() } else { a };
        let ab = a.conjoin(&b).unwrap();
        let bc = b.conjoin(&c).unwrap();
        let not_b = ev(&b.literals()[0].complement().to_string());

        let mut run = |name: &'static str, r: Result<Conclusion, calculus::CalculusError>| {
            if check(&m, name, r) {
                *fired.entry(name).or_default() += 1;
            }
        };
        let r_ab = true_rule(&m, &mut rng, &a, &b);
        let r_a_bc = true_rule(&m, &mut rng, &a, &bc);
        let r_ab_c = true_rule(&m, &mut rng, &ab, &c);
        let r_a_c = true_rule(&m, &mut rng, &a, &c);
        let r_a_notb_c = true_rule(&m, &mut rng, &a, &not_b.conjoin(&c).unwrap());
        let bi_ab = true_birule(&m, &mut rng, &a, &b);
        let bi_bc = true_birule(&m, &mut rng, &b, &c);
        let r_bc = true_rule(&m, &mut rng, &b, &c);

        run("I1a", calculus::chain_complementary(&r_a_bc, &r_a_notb_c));
        run("I3", calculus::conjunction_left(&r_ab, &r_a_bc));
        run("I4", calculus::conjunction_right(&r_ab, &r_ab_c));
        run("I5", calculus::weak_conjunction_left(&bi_ab, &r_bc));
        run("I6a", calculus::weak_conjunction_right(&r_ab, &c));
        run("I7", calculus::negate(&r_ab));
        run("I8", calculus::conjunction_right_negation(&r_a_c, &r_a_bc));
        run("I9", calculus::weak_conjunction_right_negation(&bi_ab, &bi_bc));
        if b.width() == 1 {
            run("RC", calculus::rule_chaining(&bi_ab, &bi_bc));
            run("PRC", calculus::precise_rule_chaining(&bi_ab, &bi_bc));
        }
    }
    for name in ["I1a", "I3", "I4", "I5", "I6a", "I7", "I8", "I9", "RC", "PRC"] {
        assert!(fired.get(name).copied().unwrap_or(0) > 100, "{name} fired only {:?} times", fired.get(name));
    }
}
