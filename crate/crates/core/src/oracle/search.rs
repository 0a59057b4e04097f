//! Feasible-range search for one conditional probability.
//!
//! 1. Draw `budget` points uniformly from the atom simplex in fixed-size
//!    chunks, each chunk from its own seeded stream, and keep the points with
//!    the smallest constraint violation and the most extreme penalized
//!    objective.
//! 2. Repair each kept point by projecting it onto the constraint set
//!    (Dykstra's alternating projections over the rule half-spaces, the
//!    simplex and Newton steps for the independence equalities).
//! 3. Refine by projected gradient ascent or descent on `P(b|a)`.
//!
//! Rule constraints are linear in the masses, so the feasible set without
//! independences is a polytope on which `P(b|a)` is linear-fractional; any
//! local extremum found by the refinement is then global.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;

use super::model::{check_symbols, encode, AtomSet, JointModel};
use super::{satisfies, OracleError, DELTA_POS, FEASIBILITY_TOL};
use crate::engine::KnowledgeBase;
use crate::event::{ConjEvent, Symbol};
use crate::rule::check_disjoint;

const CHUNK: usize = 2048;
const SEEDS_PER_KIND: usize = 3;
const PENALTY: f64 = 5.0;
const PROJECTION_CYCLES: usize = 3000;
const PROJECTION_TOL: f64 = 1e-13;
const MAX_STEPS: usize = 400;

/// Extremes of `P(b|a)` over the feasible models found, with witnesses.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub achieved_min: f64,
    pub achieved_max: f64,
    pub min_witness: JointModel,
    pub max_witness: JointModel,
    pub samples_used: usize,
    pub feasible_found: bool,
}

#[derive(Debug, Clone)]
struct Row {
    coef: Vec<f64>,
    rhs: f64,
    equality: bool,
    norm2: f64,
}

impl Row {
    fn new(coef: Vec<f64>, rhs: f64, equality: bool) -> Self {
        let norm2 = dot(&coef, &coef);
        Row { coef, rhs, equality, norm2 }
    }

    /// Amount by which `p` misses the constraint.
    fn violation(&self, p: &[f64]) -> f64 {
        let slack = dot(&self.coef, p) - self.rhs;
        if self.equality {
            slack.abs()
        } else {
            (-slack).max(0.0)
        }
    }

    fn project(&self, y: &[f64]) -> Vec<f64> {
        let slack = dot(&self.coef, y) - self.rhs;
        if (!self.equality && slack >= 0.0) || self.norm2 == 0.0 {
            return y.to_vec();
        }
        let t = slack / self.norm2;
        y.iter().zip(&self.coef).map(|(v, c)| v - t * c).collect()
    }
}

/// `P(a b c) P(b) = P(a b) P(b c)` as indicator vectors.
#[derive(Debug, Clone)]
struct Product {
    abc: Vec<f64>,
    b: Vec<f64>,
    ab: Vec<f64>,
    bc: Vec<f64>,
}

impl Product {
    fn gap(&self, p: &[f64]) -> f64 {
        dot(&self.abc, p) * dot(&self.b, p) - dot(&self.ab, p) * dot(&self.bc, p)
    }

    fn newton_step(&self, p: &mut [f64]) {
        let (pabc, pb, pab, pbc) = (dot(&self.abc, p), dot(&self.b, p), dot(&self.ab, p), dot(&self.bc, p));
        let g = pabc * pb - pab * pbc;
        let grad: Vec<f64> = (0..p.len())
            .map(|i| self.abc[i] * pb + pabc * self.b[i] - self.ab[i] * pbc - pab * self.bc[i])
            .collect();
        let norm2 = dot(&grad, &grad);
        if norm2 > 0.0 {
            for (x, d) in p.iter_mut().zip(&grad) {
                *x -= g / norm2 * d;
            }
        }
    }
}

struct Problem {
    n_atoms: usize,
    rows: Vec<Row>,
    products: Vec<Product>,
    query_ab: Vec<f64>,
    query_a: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn positivity(set: AtomSet, n: usize) -> Row {
    // twice the threshold so that repaired points clear it
    Row::new(set.indicator(n), 2.0 * DELTA_POS, false)
}

impl Problem {
    fn new(kb: &KnowledgeBase, symbols: &[Symbol], a: &ConjEvent, b: &ConjEvent) -> Result<Self, OracleError> {
        let n = 1usize << symbols.len();
        let mut rows = Vec::new();
        for r in kb.rules() {
            let sa = encode(symbols, &r.antecedent)?;
            let sab = sa.and(encode(symbols, &r.consequent)?);
            let (ia, iab) = (sa.indicator(n), sab.indicator(n));
            rows.push(positivity(sa, n));
            let (lo, hi) = (r.bounds.lo(), r.bounds.hi());
            let combine = |wab: f64, wa: f64| -> Vec<f64> { (0..n).map(|t| wab * iab[t] + wa * ia[t]).collect() };
            if lo == hi {
                rows.push(Row::new(combine(1.0, -lo), 0.0, true));
            } else {
                if lo > 0.0 {
                    rows.push(Row::new(combine(1.0, -lo), 0.0, false));
                }
                if hi < 1.0 {
                    rows.push(Row::new(combine(-1.0, hi), 0.0, false));
                }
            }
        }
        let mut products = Vec::new();
        for ind in kb.independences() {
            let (sa, sb, sc) = (encode(symbols, &ind.a)?, encode(symbols, &ind.b)?, encode(symbols, &ind.c)?);
            rows.push(positivity(sa.and(sb), n));
            products.push(Product {
                abc: sa.and(sb).and(sc).indicator(n),
                b: sb.indicator(n),
                ab: sa.and(sb).indicator(n),
                bc: sb.and(sc).indicator(n),
            });
        }
        let (qa, qb) = (encode(symbols, a)?, encode(symbols, b)?);
        rows.push(positivity(qa, n));
        Ok(Problem {
            n_atoms: n,
            rows,
            products,
            query_ab: qa.and(qb).indicator(n),
            query_a: qa.indicator(n),
        })
    }

    fn objective(&self, p: &[f64]) -> f64 {
        dot(&self.query_ab, p) / dot(&self.query_a, p)
    }

    fn gradient(&self, p: &[f64]) -> Vec<f64> {
        let (pab, pa) = (dot(&self.query_ab, p), dot(&self.query_a, p));
        (0..p.len()).map(|i| (self.query_ab[i] * pa - pab * self.query_a[i]) / (pa * pa)).collect()
    }

    fn violation(&self, p: &[f64]) -> f64 {
        let rows: f64 = self.rows.iter().map(|r| r.violation(p)).sum();
        let products: f64 = self.products.iter().map(|g| g.gap(p).abs()).sum();
        rows + products
    }

    fn max_violation(&self, p: &[f64]) -> f64 {
        let rows = self.rows.iter().map(|r| r.violation(p)).fold(0.0, f64::max);
        self.products.iter().map(|g| g.gap(p).abs()).fold(rows, f64::max)
    }

    /// Nearby point satisfying every constraint within [`PROJECTION_TOL`].
    fn project(&self, start: &[f64]) -> Option<Vec<f64>> {
        let mut x = project_simplex(start);
        if self.max_violation(&x) <= PROJECTION_TOL {
            return Some(x);
        }
        let m = self.rows.len();
        let mut increments = vec![vec![0.0; self.n_atoms]; m + 1];
        for _ in 0..PROJECTION_CYCLES {
            for (k, row) in self.rows.iter().enumerate() {
                let y: Vec<f64> = x.iter().zip(&increments[k]).map(|(a, b)| a + b).collect();
                let projected = row.project(&y);
                increments[k] = y.iter().zip(&projected).map(|(a, b)| a - b).collect();
                x = projected;
            }
            for g in &self.products {
                g.newton_step(&mut x);
            }
            let y: Vec<f64> = x.iter().zip(&increments[m]).map(|(a, b)| a + b).collect();
            let projected = project_simplex(&y);
            increments[m] = y.iter().zip(&projected).map(|(a, b)| a - b).collect();
            x = projected;
            if self.max_violation(&x) <= PROJECTION_TOL {
                return Some(x);
            }
        }
        None
    }

    /// Projected gradient on `dir * P(b|a)` with a doubling/halving step.
    fn refine(&self, start: Vec<f64>, dir: f64) -> Vec<f64> {
        let mut x = start;
        let mut fx = self.objective(&x);
        let mut eta = 0.05;
        for _ in 0..MAX_STEPS {
            let g = self.gradient(&x);
            let norm = dot(&g, &g).sqrt();
            if !(norm > 1e-14) {
                break;
            }
            let mut improved = false;
            while eta > 1e-10 {
                let trial: Vec<f64> = x.iter().zip(&g).map(|(v, d)| v + dir * eta * d / norm).collect();
                if let Some(y) = self.project(&trial) {
                    let fy = self.objective(&y);
                    if dir * (fy - fx) > 1e-13 {
                        x = y;
                        fx = fy;
                        improved = true;
                        break;
                    }
                }
                eta *= 0.5;
            }
            if !improved {
                break;
            }
            eta = (eta * 2.0).min(0.5);
        }
        x
    }
}

/// Euclidean projection onto `{x >= 0, sum x = 1}`.
fn project_simplex(y: &[f64]) -> Vec<f64> {
    let mut sorted = y.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (j, &v) in sorted.iter().enumerate() {
        cumulative += v;
        let t = (cumulative - 1.0) / (j + 1) as f64;
        if v - t > 0.0 {
            theta = t;
        }
    }
    y.iter().map(|&v| (v - theta).max(0.0)).collect()
}

#[derive(Debug, Clone)]
struct Candidate {
    key: f64,
    index: usize,
    point: Vec<f64>,
}

/// Keeps the `SEEDS_PER_KIND` candidates with the smallest `(key, index)`.
fn keep_best(list: &mut Vec<Candidate>, c: Candidate) {
    let pos = list.partition_point(|x| x.key.total_cmp(&c.key).then(x.index.cmp(&c.index)).is_lt());
    if pos < SEEDS_PER_KIND {
        list.insert(pos, c);
        list.truncate(SEEDS_PER_KIND);
    }
}

/// `[least violation, best for max, best for min]` among one chunk's samples.
fn sample_chunk(problem: &Problem, seed: u64, chunk: usize, count: usize) -> [Vec<Candidate>; 3] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk as u64);
    let mut lists: [Vec<Candidate>; 3] = Default::default();
    for i in 0..count {
        let mut p: Vec<f64> = (0..problem.n_atoms).map(|_| Exp1.sample(&mut rng)).collect();
        let total: f64 = p.iter().sum();
        p.iter_mut().for_each(|v| *v /= total);
        let v = problem.violation(&p);
        let f = problem.objective(&p);
        if !f.is_finite() {
            continue;
        }
        let index = chunk * CHUNK + i;
        let keys = [v, PENALTY * v - f, PENALTY * v + f];
        for (list, key) in lists.iter_mut().zip(keys) {
            keep_best(list, Candidate { key, index, point: p.clone() });
        }
    }
    lists
}

/// Searches for the extremes of `P(b | a)` over models of `kb`.
///
/// Deterministic for fixed `(kb, a, b, budget, seed)` regardless of thread
/// count: chunk streams are derived from the seed and reduced in chunk order.
pub fn estimate_range(
    kb: &KnowledgeBase,
    a: &ConjEvent,
    b: &ConjEvent,
    budget: usize,
    seed: u64,
) -> Result<OracleReport, OracleError> {
    if budget == 0 {
        return Err(OracleError::ZeroBudget);
    }
    check_disjoint(a, b)?;
    let mut symbols: Vec<Symbol> = kb.symbols().cloned().collect();
    for s in a.symbols().chain(b.symbols()) {
        if !symbols.contains(s) {
            symbols.push(s.clone());
        }
    }
    symbols.sort();
    check_symbols(&symbols)?;
    let problem = Problem::new(kb, &symbols, a, b)?;

    let n_chunks = budget.div_ceil(CHUNK);
    let per_chunk: Vec<[Vec<Candidate>; 3]> = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| sample_chunk(&problem, seed, chunk, CHUNK.min(budget - chunk * CHUNK)))
        .collect();
    let mut best: [Vec<Candidate>; 3] = Default::default();
    for lists in per_chunk {
        for (into, from) in best.iter_mut().zip(lists) {
            for c in from {
                keep_best(into, c);
            }
        }
    }
    let [feasible, for_max, for_min] = best;
    let starts: Vec<(f64, Vec<f64>)> = for_max
        .iter()
        .chain(&feasible)
        .map(|c| (1.0, c.point.clone()))
        .chain(for_min.iter().chain(&feasible).map(|c| (-1.0, c.point.clone())))
        .collect();

    let finished: Vec<Option<(f64, f64, JointModel)>> = starts
        .into_par_iter()
        .map(|(dir, start)| {
            let repaired = problem.project(&start)?;
            let refined = problem.refine(repaired, dir);
            let model = JointModel::normalized(symbols.clone(), refined.iter().map(|v| v.max(0.0)).collect()).ok()?;
            let value = model.eval_conditional(a, b).ok()??;
            let pa = model.probability(a).ok()?;
            let ok = pa >= DELTA_POS && satisfies(&model, kb, FEASIBILITY_TOL).ok()?;
            ok.then_some((dir, value, model))
        })
        .collect();

    let mut lowest: Option<(f64, JointModel)> = None;
    let mut highest: Option<(f64, JointModel)> = None;
    for (_, value, model) in finished.into_iter().flatten() {
        if lowest.as_ref().is_none_or(|(v, _)| value < *v) {
            lowest = Some((value, model.clone()));
        }
        if highest.as_ref().is_none_or(|(v, _)| value > *v) {
            highest = Some((value, model));
        }
    }
    match (lowest, highest) {
        (Some((achieved_min, min_witness)), Some((achieved_max, max_witness))) => Ok(OracleReport {
            achieved_min,
            achieved_max,
            min_witness,
            max_witness,
            samples_used: budget,
            feasible_found: true,
        }),
        _ => Err(OracleError::NoFeasibleModel { samples: budget }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::ProbInterval;
    use crate::rule::{BidirRule, UncertainRule};

    fn ev(s: &str) -> ConjEvent {
        ConjEvent::parse(s).unwrap()
    }

    fn iv(lo: f64, hi: f64) -> ProbInterval {
        ProbInterval::new(lo, hi).unwrap()
    }

    #[test]
    fn simplex_projection() {
        let p = project_simplex(&[0.5, 0.5, 0.5]);
        assert!(p.iter().all(|&v| (v - 1.0 / 3.0).abs() < 1e-15));
        let p = project_simplex(&[2.0, -1.0, 0.0]);
        assert_eq!(p, vec![1.0, 0.0, 0.0]);
        let p = project_simplex(&[0.2, 0.3, 0.5]);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pinned_conditional() {
        let kb = KnowledgeBase::from_items([UncertainRule::new(ev("A"), ev("B"), iv(0.3, 0.3)).unwrap()]).unwrap();
        let r = estimate_range(&kb, &ev("A"), &ev("B"), 5000, 7).unwrap();
        assert!((r.achieved_min - 0.3).abs() < 1e-6 && (r.achieved_max - 0.3).abs() < 1e-6, "{r:?}");
    }

    #[test]
    fn precise_chaining_example_range() {
        let kb = KnowledgeBase::from_items([
            BidirRule::new(ev("A"), ev("B"), iv(0.2, 0.8), iv(0.8, 0.8)).unwrap(),
            BidirRule::new(ev("B"), ev("C"), iv(0.2, 0.2), iv(0.2, 0.2)).unwrap(),
        ])
        .unwrap();
        let r = estimate_range(&kb, &ev("A"), &ev("C"), 20_000, 1).unwrap();
        assert!(r.achieved_min >= -1e-9 && r.achieved_max <= 0.625 + 1e-6, "{r:?}");
        assert!(r.achieved_max >= 0.605, "{r:?}");
        assert!(r.achieved_min <= 0.02, "{r:?}");
        assert!(satisfies(&r.max_witness, &kb, FEASIBILITY_TOL).unwrap());
    }

    #[test]
    fn same_seed_same_report() {
        let kb = KnowledgeBase::from_items([UncertainRule::new(ev("A"), ev("B"), iv(0.3, 0.6)).unwrap()]).unwrap();
        let r1 = estimate_range(&kb, &ev("B"), &ev("A"), 9000, 3).unwrap();
        let r2 = estimate_range(&kb, &ev("B"), &ev("A"), 9000, 3).unwrap();
        assert_eq!(r1, r2);
    }

    #[test]
    fn infeasible_kb_reports_no_model() {
        // P(B & C|A) + P(!B & C|A) cannot exceed 1
        let kb = KnowledgeBase::from_items([
            UncertainRule::new(ev("A"), ev("B & C"), iv(0.6, 0.7)).unwrap(),
            UncertainRule::new(ev("A"), ev("!B & C"), iv(0.6, 0.7)).unwrap(),
        ])
        .unwrap();
        let err = estimate_range(&kb, &ev("A"), &ev("C"), 4000, 3).unwrap_err();
        assert!(matches!(err, OracleError::NoFeasibleModel { .. }));
    }
}
