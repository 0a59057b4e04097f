//! Semi-naive fixpoint saturation over bitset-encoded events.
//!
//! Each round reads the state left by the previous round, collects every
//! conclusion whose premises include at least one fact changed in that
//! round, and then merges the conclusions in generation order. Generation
//! order depends only on the cell creation order, which in turn depends only
//! on the canonical order of the axioms, so the result does not depend on
//! the order statements were inserted in.

use std::collections::BTreeMap;

use super::compiled::{Ev, SymbolTable};
use super::trace::{DerivationTrace, Node, NodeFact, NodeId, TraceBuilder};
use super::{settle, InconsistencyReport, KnowledgeBase, QueryError, SaturateError, SaturationConfig};
use crate::calculus::{bounds, RuleId};
use crate::event::ConjEvent;
use crate::interval::ProbInterval;
use crate::rule::{check_disjoint, coupling_holds, IndepStmt, RuleKey, UncertainRule};

const EV_MIN: Ev = Ev { mask: 0, pos: 0 };
const EV_MAX: Ev = Ev { mask: u64::MAX, pos: u64::MAX };

#[derive(Debug, Clone)]
struct Cell {
    ant: Ev,
    cons: Ev,
    bounds: ProbInterval,
    /// Node whose fact equals `bounds`.
    node: NodeId,
    changed_in: usize,
}

#[derive(Debug, Clone, Copy)]
struct IndepEntry {
    node: NodeId,
    changed_in: usize,
}

#[derive(Debug)]
struct Pending {
    ant: Ev,
    cons: Ev,
    bounds: ProbInterval,
    rule: RuleId,
    premises: Vec<NodeId>,
    /// Only narrows a cell that already exists.
    existing_only: bool,
}

#[derive(Debug)]
struct PendingIndep {
    key: (Ev, Ev, Ev),
    premises: Vec<NodeId>,
}

/// Interval for a queried conditional and how it was derived. A conditional
/// nothing was derived for gets `[0, 1]` and an empty trace.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryAnswer {
    pub bounds: ProbInterval,
    pub trace: DerivationTrace,
}

/// A saturated knowledge base. Immutable; safe to query from many threads.
#[derive(Debug, Clone)]
pub struct Saturation {
    symbols: SymbolTable,
    nodes: Vec<Node>,
    cells: Vec<Cell>,
    index: BTreeMap<(Ev, Ev), usize>,
    by_cons: BTreeMap<(Ev, Ev), usize>,
    indeps: BTreeMap<(Ev, Ev, Ev), IndepEntry>,
    axiom_cells: usize,
    rounds: usize,
    reached_fixpoint: bool,
}

pub(super) fn run(kb: &KnowledgeBase, config: &SaturationConfig) -> Result<Saturation, SaturateError> {
    let symbols = SymbolTable::new(&kb.symbols);
    let mut s = Saturation {
        symbols,
        nodes: Vec::new(),
        cells: Vec::new(),
        index: BTreeMap::new(),
        by_cons: BTreeMap::new(),
        indeps: BTreeMap::new(),
        axiom_cells: 0,
        rounds: 0,
        reached_fixpoint: false,
    };
    for (key, sources, merged) in kb.axiom_sources() {
        let ant = s.encode_known(&key.antecedent);
        let cons = s.encode_known(&key.consequent);
        let leaves: Vec<NodeId> = sources
            .iter()
            .map(|&b| s.push_node(RuleId::Axiom, NodeFact::Rule { ant, cons, bounds: b }, Vec::new()))
            .collect();
        let node = match leaves[..] {
            [only] if sources[0] == merged => only,
            _ => s.push_node(RuleId::Sharpen, NodeFact::Rule { ant, cons, bounds: merged }, leaves),
        };
        s.add_cell(ant, cons, merged, node, 0);
    }
    s.axiom_cells = s.cells.len();
    for ind in kb.independences() {
        let key = (s.encode_known(&ind.a), s.encode_known(&ind.b), s.encode_known(&ind.c));
        let node = s.push_node(RuleId::Axiom, NodeFact::Indep { a: key.0, b: key.1, c: key.2 }, Vec::new());
        s.indeps.insert(key, IndepEntry { node, changed_in: 0 });
    }

    let mut round = 0;
    loop {
        if round == config.max_rounds {
            break;
        }
        round += 1;
        let (pending, pending_indeps) = Generator::new(&s, round, config).run();
        if !s.merge(round, config.epsilon, pending, pending_indeps)? {
            s.reached_fixpoint = true;
            round -= 1;
            break;
        }
    }
    s.rounds = round;
    Ok(s)
}

impl Saturation {
    /// Rounds that changed at least one fact.
    pub fn rounds(&self) -> usize {
        self.rounds
    }

    /// False when saturation stopped because it ran out of rounds.
    pub fn reached_fixpoint(&self) -> bool {
        self.reached_fixpoint
    }

    /// Number of conditionals that were not given as axioms.
    pub fn derived_count(&self) -> usize {
        self.cells.len() - self.axiom_cells
    }

    /// Bounds on `P(b | a)`.
    pub fn query(&self, a: &ConjEvent, b: &ConjEvent) -> Result<QueryAnswer, QueryError> {
        check_disjoint(a, b)?;
        let ant = self.symbols.encode(a).map_err(QueryError::UnknownSymbol)?;
        let cons = self.symbols.encode(b).map_err(QueryError::UnknownSymbol)?;
        Ok(match self.index.get(&(ant, cons)) {
            Some(&ci) => {
                let cell = &self.cells[ci];
                QueryAnswer { bounds: cell.bounds, trace: self.trace(cell.node) }
            }
            None => QueryAnswer { bounds: ProbInterval::UNIT, trace: DerivationTrace::empty() },
        })
    }

    /// Every stored conditional, given or derived, in canonical key order.
    pub fn rules(&self) -> Vec<UncertainRule> {
        let mut rules: Vec<UncertainRule> = self
            .cells
            .iter()
            .map(|c| UncertainRule {
                antecedent: self.symbols.decode(c.ant),
                consequent: self.symbols.decode(c.cons),
                bounds: c.bounds,
            })
            .collect();
        rules.sort_by(|a, b| (&a.antecedent, &a.consequent).cmp(&(&b.antecedent, &b.consequent)));
        rules
    }

    /// Given and derived independences in canonical order.
    pub fn independences(&self) -> Vec<IndepStmt> {
        let mut out: Vec<IndepStmt> = self
            .indeps
            .keys()
            .map(|&(a, b, c)| IndepStmt {
                a: self.symbols.decode(a),
                b: self.symbols.decode(b),
                c: self.symbols.decode(c),
            })
            .collect();
        out.sort();
        out
    }

    fn trace(&self, node: NodeId) -> DerivationTrace {
        TraceBuilder::new(&self.nodes, &self.symbols).build(node)
    }

    fn encode_known(&self, e: &ConjEvent) -> Ev {
        self.symbols.encode(e).expect("knowledge-base symbols are in the table")
    }

    fn push_node(&mut self, rule: RuleId, fact: NodeFact, premises: Vec<NodeId>) -> NodeId {
        self.nodes.push(Node { rule, fact, premises });
        self.nodes.len() - 1
    }

    fn add_cell(&mut self, ant: Ev, cons: Ev, bounds: ProbInterval, node: NodeId, round: usize) {
        let ci = self.cells.len();
        self.cells.push(Cell { ant, cons, bounds, node, changed_in: round });
        self.index.insert((ant, cons), ci);
        self.by_cons.insert((cons, ant), ci);
    }

    fn key(&self, ant: Ev, cons: Ev) -> RuleKey {
        RuleKey { antecedent: self.symbols.decode(ant), consequent: self.symbols.decode(cons) }
    }

    fn inconsistency(
        &self,
        ant: Ev,
        cons: Ev,
        existing: Option<(ProbInterval, NodeId)>,
        conflicting: (ProbInterval, NodeId),
    ) -> SaturateError {
        let (existing, existing_trace) = match existing {
            Some((b, node)) => (b, self.trace(node)),
            None => (ProbInterval::UNIT, DerivationTrace::empty()),
        };
        SaturateError::Inconsistent(Box::new(InconsistencyReport {
            key: self.key(ant, cons),
            existing,
            conflicting: conflicting.0,
            existing_trace,
            conflicting_trace: self.trace(conflicting.1),
        }))
    }

    /// Applies conclusions in order. Returns whether anything changed.
    fn merge(
        &mut self,
        round: usize,
        epsilon: f64,
        pending: Vec<Pending>,
        pending_indeps: Vec<PendingIndep>,
    ) -> Result<bool, SaturateError> {
        let mut changed = false;
        for p in pending {
            let concl = p.bounds.meet(&ProbInterval::UNIT);
            let fact = |bounds| NodeFact::Rule { ant: p.ant, cons: p.cons, bounds };
            match self.index.get(&(p.ant, p.cons)).copied() {
                None => {
                    if p.existing_only {
                        continue;
                    }
                    let Some(bounds) = settle(concl) else {
                        let node = self.push_node(p.rule, fact(concl), p.premises);
                        return Err(self.inconsistency(p.ant, p.cons, None, (concl, node)));
                    };
                    if bounds.is_unit() {
                        continue;
                    }
                    let node = self.push_node(p.rule, fact(bounds), p.premises);
                    self.add_cell(p.ant, p.cons, bounds, node, round);
                    changed = true;
                }
                Some(ci) => {
                    let (old, old_node) = (self.cells[ci].bounds, self.cells[ci].node);
                    let Some(met) = settle(old.meet(&concl)) else {
                        let node = self.push_node(p.rule, fact(concl), p.premises);
                        return Err(self.inconsistency(p.ant, p.cons, Some((old, old_node)), (concl, node)));
                    };
                    let raise = met.lo() > old.lo() + epsilon;
                    let lower = met.hi() < old.hi() - epsilon;
                    if !raise && !lower {
                        continue;
                    }
                    let mut new = ProbInterval::raw(
                        if raise { met.lo() } else { old.lo() },
                        if lower { met.hi() } else { old.hi() },
                    );
                    if new.is_empty() {
                        new = met;
                    }
                    let node = self.push_node(p.rule, fact(concl), p.premises);
                    let cell_node = if new == concl {
                        node
                    } else {
                        self.push_node(RuleId::Sharpen, fact(new), vec![old_node, node])
                    };
                    let cell = &mut self.cells[ci];
                    cell.bounds = new;
                    cell.node = cell_node;
                    cell.changed_in = round;
                    changed = true;
                }
            }
        }
        for p in pending_indeps {
            if self.indeps.contains_key(&p.key) {
                continue;
            }
            let (a, b, c) = p.key;
            let node = self.push_node(RuleId::Symmetry, NodeFact::Indep { a, b, c }, p.premises);
            self.indeps.insert(p.key, IndepEntry { node, changed_in: round });
            changed = true;
        }
        Ok(changed)
    }
}

/// Collects the conclusions of one round from a read-only snapshot.
struct Generator<'a> {
    s: &'a Saturation,
    round: usize,
    config: &'a SaturationConfig,
    width: u32,
    out: Vec<Pending>,
    out_indeps: Vec<PendingIndep>,
}

impl<'a> Generator<'a> {
    fn new(s: &'a Saturation, round: usize, config: &'a SaturationConfig) -> Self {
        let width = u32::try_from(config.max_width).unwrap_or(u32::MAX);
        Generator { s, round, config, width, out: Vec::new(), out_indeps: Vec::new() }
    }

    fn run(mut self) -> (Vec<Pending>, Vec<PendingIndep>) {
        use RuleId::*;
        let steps: [(RuleId, fn(&mut Self)); 20] = [
            (ChainComplementary, Self::chain_complementary),
            (ChainWeaken, Self::chain_weaken),
            (ChainImplied, Self::chain_implied),
            (ChainCertain, Self::chain_certain),
            (ConjunctionLeft, Self::conjunction_left),
            (ConjunctionRight, Self::conjunction_right),
            (WeakConjunctionLeft, Self::weak_conjunction_left),
            (WeakConjunctionRight, Self::weak_conjunction_right),
            (WeakConjunctionRightCertain, Self::weak_conjunction_right_certain),
            (Negation, Self::negation),
            (ConjunctionRightNegation, Self::conjunction_right_negation),
            (WeakConjunctionRightNegation, Self::weak_conjunction_right_negation),
            (Annulment, Self::annulment),
            (InvarianceExtend, Self::invariance_extend),
            (InvarianceReduce, Self::invariance_reduce),
            (Symmetry, Self::symmetry),
            (PreciseRuleChaining, Self::precise_rule_chaining),
            (RuleChaining, Self::rule_chaining),
            (IndependentChaining, Self::independent_chaining),
            (PreciseIndependentChaining, Self::independent_chaining),
        ];
        let mut chaining_done = false;
        for (id, step) in steps {
            if !self.config.enables(id) {
                continue;
            }
            // one pass covers both tags of chaining under independence
            if matches!(id, IndependentChaining | PreciseIndependentChaining) {
                if chaining_done {
                    continue;
                }
                chaining_done = true;
            }
            step(&mut self);
        }
        if !chaining_done
            && [IndependentUpdate, PreciseIndependentUpdate].iter().any(|&r| self.config.enables(r))
        {
            self.independent_chaining();
        }
        (self.out, self.out_indeps)
    }

    fn cell(&self, ci: usize) -> &'a Cell {
        &self.s.cells[ci]
    }

    fn get(&self, ant: Ev, cons: Ev) -> Option<usize> {
        self.s.index.get(&(ant, cons)).copied()
    }

    fn with_ant(&self, ant: Ev) -> impl Iterator<Item = usize> + 'a {
        self.s.index.range((ant, EV_MIN)..=(ant, EV_MAX)).map(|(_, &ci)| ci)
    }

    fn with_cons(&self, cons: Ev) -> impl Iterator<Item = usize> + 'a {
        self.s.by_cons.range((cons, EV_MIN)..=(cons, EV_MAX)).map(|(_, &ci)| ci)
    }

    fn fresh(&self, ci: usize) -> bool {
        self.s.cells[ci].changed_in + 1 == self.round
    }

    fn fresh_indep(&self, key: &(Ev, Ev, Ev)) -> bool {
        self.s.indeps[key].changed_in + 1 == self.round
    }

    fn fits(&self, ev: Ev) -> bool {
        ev.width() <= self.width
    }

    fn emit(&mut self, ant: Ev, cons: Ev, bounds: ProbInterval, rule: RuleId, cells: &[usize]) {
        let premises = cells.iter().map(|&ci| self.s.cells[ci].node).collect();
        self.out.push(Pending { ant, cons, bounds, rule, premises, existing_only: false });
    }

    fn n_cells(&self) -> usize {
        self.s.cells.len()
    }

    /// `A -> F C`, `A -> !F C` give `A -> C`.
    fn chain_complementary(&mut self) {
        for ci in 0..self.n_cells() {
            let c = self.cell(ci);
            if c.cons.width() < 2 {
                continue;
            }
            for f in c.cons.bits() {
                if c.cons.pos & f == 0 {
                    continue;
                }
                let Some(cj) = self.get(c.ant, c.cons.flip(f)) else { continue };
                if !(self.fresh(ci) || self.fresh(cj)) {
                    continue;
                }
                let b = bounds::chain_complementary(c.bounds, self.cell(cj).bounds);
                self.emit(c.ant, c.cons.without(f), b, RuleId::ChainComplementary, &[ci, cj]);
            }
        }
    }

    /// `A -> B C` gives `A -> [x1, 1] C`.
    fn chain_weaken(&mut self) {
        for ci in 0..self.n_cells() {
            let c = self.cell(ci);
            if c.cons.width() < 2 || c.bounds.lo() <= 0.0 || !self.fresh(ci) {
                continue;
            }
            let b = bounds::chain_weaken(c.bounds);
            for m in c.cons.proper_submasks() {
                self.emit(c.ant, c.cons.restrict(m), b, RuleId::ChainWeaken, &[ci]);
            }
        }
    }

    /// `A -> B C`, `C -> [1, 1] B` give `A -> C`.
    fn chain_implied(&mut self) {
        for ci in 0..self.n_cells() {
            let c = self.cell(ci);
            if c.cons.width() < 2 {
                continue;
            }
            for m in c.cons.proper_submasks() {
                let (b, rest) = (c.cons.restrict(m), c.cons.without(m));
                let Some(cj) = self.get(rest, b) else { continue };
                if self.cell(cj).bounds != ProbInterval::ONE || !(self.fresh(ci) || self.fresh(cj)) {
                    continue;
                }
                self.emit(c.ant, rest, c.bounds, RuleId::ChainImplied, &[ci, cj]);
            }
        }
    }

    /// `A -> B C`, `A -> [1, 1] B` give `A -> C`.
    fn chain_certain(&mut self) {
        for ci in 0..self.n_cells() {
            let c = self.cell(ci);
            if c.cons.width() < 2 {
                continue;
            }
            for m in c.cons.proper_submasks() {
                let Some(cj) = self.get(c.ant, c.cons.restrict(m)) else { continue };
                if self.cell(cj).bounds != ProbInterval::ONE || !(self.fresh(ci) || self.fresh(cj)) {
                    continue;
                }
                self.emit(c.ant, c.cons.without(m), c.bounds, RuleId::ChainCertain, &[ci, cj]);
            }
        }
    }

    /// `A -> B` with `x1 > 0`, `A -> B C` give `A B -> C`.
    fn conjunction_left(&mut self) {
        for ci in 0..self.n_cells() {
            let c = self.cell(ci);
            if c.cons.width() < 2 {
                continue;
            }
            for m in c.cons.proper_submasks() {
                let b = c.cons.restrict(m);
                let ab = c.ant.union(b);
                if !self.fits(ab) {
                    continue;
                }
                let Some(cj) = self.get(c.ant, b) else { continue };
                let x = self.cell(cj).bounds;
                if x.lo() <= 0.0 || !(self.fresh(ci) || self.fresh(cj)) {
                    continue;
                }
                let z = bounds::conjunction_left(x, c.bounds).expect("x1 > 0 was checked");
                self.emit(ab, c.cons.without(m), z, RuleId::ConjunctionLeft, &[cj, ci]);
            }
        }
    }

    /// `A -> B`, `A B -> C` give `A -> B C`.
    fn conjunction_right(&mut self) {
        for ci in 0..self.n_cells() {
            let c = self.cell(ci);
            if c.ant.width() < 2 {
                continue;
            }
            for m in c.ant.proper_submasks() {
                let (a, b) = (c.ant.without(m), c.ant.restrict(m));
                let bc = b.union(c.cons);
                if !self.fits(bc) {
                    continue;
                }
                let Some(cj) = self.get(a, b) else { continue };
                if !(self.fresh(ci) || self.fresh(cj)) {
                    continue;
                }
                let z = bounds::conjunction_right(self.cell(cj).bounds, c.bounds);
                self.emit(a, bc, z, RuleId::ConjunctionRight, &[cj, ci]);
            }
        }
    }

    /// `B -> A` with `v1 > 0`, `B -> C` give `A B -> C`.
    fn weak_conjunction_left(&mut self) {
        for ci in 0..self.n_cells() {
            let back = self.cell(ci);
            let (b, a, v) = (back.ant, back.cons, back.bounds);
            if v.lo() <= 0.0 || !self.fits(a.union(b)) {
                continue;
            }
            for cj in self.with_ant(b) {
                let rc = self.cell(cj);
                if !rc.cons.disjoint(a) || !(self.fresh(ci) || self.fresh(cj)) {
                    continue;
                }
                let z = bounds::weak_conjunction_left(v, rc.bounds).expect("v1 > 0 was checked");
                self.emit(a.union(b), rc.cons, z, RuleId::WeakConjunctionLeft, &[ci, cj]);
            }
        }
    }

    /// `A -> B` caps `A -> B C` at `x2`; only narrows existing cells.
    fn weak_conjunction_right(&mut self) {
        for ci in 0..self.n_cells() {
            let c = self.cell(ci);
            if c.cons.width() < 2 {
                continue;
            }
            for m in c.cons.proper_submasks() {
                let Some(cj) = self.get(c.ant, c.cons.restrict(m)) else { continue };
                if !(self.fresh(ci) || self.fresh(cj)) {
                    continue;
                }
                let z = bounds::weak_conjunction_right(self.cell(cj).bounds);
                let premises = vec![self.cell(cj).node];
                self.out.push(Pending {
                    ant: c.ant,
                    cons: c.cons,
                    bounds: z,
                    rule: RuleId::WeakConjunctionRight,
                    premises,
                    existing_only: true,
                });
            }
        }
    }

    /// `A -> B`, `B -> [y, y] C` with `y` 0 or 1 give `A -> B C`.
    fn weak_conjunction_right_certain(&mut self) {
        for ci in 0..self.n_cells() {
            let bc = self.cell(ci);
            if bc.bounds != ProbInterval::ZERO && bc.bounds != ProbInterval::ONE {
                continue;
            }
            let joined = bc.ant.union(bc.cons);
            if !self.fits(joined) {
                continue;
            }
            for cj in self.with_cons(bc.ant) {
                let ab = self.cell(cj);
                if !ab.ant.disjoint(bc.cons) || !(self.fresh(ci) || self.fresh(cj)) {
                    continue;
                }
                let z = bounds::weak_conjunction_right_certain(ab.bounds, bc.bounds)
                    .expect("y is 0 or 1");
                self.emit(ab.ant, joined, z, RuleId::WeakConjunctionRightCertain, &[cj, ci]);
            }
        }
    }

    /// `A -> F` gives `A -> !F`.
    fn negation(&mut self) {
        for ci in 0..self.n_cells() {
            let c = self.cell(ci);
            if c.cons.width() != 1 || !self.fresh(ci) {
                continue;
            }
            let z = bounds::negate(c.bounds);
            self.emit(c.ant, c.cons.flip(c.cons.mask), z, RuleId::Negation, &[ci]);
        }
    }

    /// `A -> C`, `A -> F C` give `A -> !F C`.
    fn conjunction_right_negation(&mut self) {
        for ci in 0..self.n_cells() {
            let c = self.cell(ci);
            if c.cons.width() < 2 {
                continue;
            }
            for f in c.cons.bits() {
                let Some(cj) = self.get(c.ant, c.cons.without(f)) else { continue };
                if !(self.fresh(ci) || self.fresh(cj)) {
                    continue;
                }
                let z = bounds::conjunction_right_negation(self.cell(cj).bounds, c.bounds);
                self.emit(c.ant, c.cons.flip(f), z, RuleId::ConjunctionRightNegation, &[cj, ci]);
            }
        }
    }

    /// `A <-> F`, `F <-> C` with `v1 > 0`, `y1 > 0` give `A -> !F C`.
    fn weak_conjunction_right_negation(&mut self) {
        for ci in 0..self.n_cells() {
            let fa = self.cell(ci);
            let (f, a, v) = (fa.ant, fa.cons, fa.bounds);
            if f.width() != 1 || v.lo() <= 0.0 {
                continue;
            }
            let Some(cu) = self.get(a, f) else { continue };
            let u = self.cell(cu).bounds;
            if !coupling_holds(&u, &v) {
                continue;
            }
            for cy in self.with_cons(f) {
                let cf = self.cell(cy);
                let (c, y) = (cf.ant, cf.bounds);
                if y.lo() <= 0.0 || !c.disjoint(a) {
                    continue;
                }
                let target = f.flip(f.mask).union(c);
                if !self.fits(target) {
                    continue;
                }
                let Some(cx) = self.get(f, c) else { continue };
                let x = self.cell(cx).bounds;
                let premises = [cu, ci, cx, cy];
                if !coupling_holds(&x, &y) || !premises.iter().any(|&p| self.fresh(p)) {
                    continue;
                }
                let z = bounds::weak_conjunction_right_negation(u, v, x, y).expect("v1, y1 > 0 were checked");
                self.emit(a, target, z, RuleId::WeakConjunctionRightNegation, &premises);
            }
        }
    }

    /// `B -> [0, 0] A` forces `A -> [0, 0] B`.
    fn annulment(&mut self) {
        for ci in 0..self.n_cells() {
            let c = self.cell(ci);
            if c.bounds == ProbInterval::ZERO {
                continue;
            }
            let Some(cj) = self.get(c.cons, c.ant) else { continue };
            if self.cell(cj).bounds != ProbInterval::ZERO || !(self.fresh(ci) || self.fresh(cj)) {
                continue;
            }
            self.emit(c.ant, c.cons, ProbInterval::ZERO, RuleId::Annulment, &[cj, ci]);
        }
    }

    fn indep_keys(&self) -> Vec<(Ev, Ev, Ev)> {
        self.s.indeps.keys().copied().collect()
    }

    fn emit_with_indep(&mut self, ant: Ev, cons: Ev, z: ProbInterval, rule: RuleId, ci: usize, key: &(Ev, Ev, Ev)) {
        let premises = vec![self.cell(ci).node, self.s.indeps[key].node];
        self.out.push(Pending { ant, cons, bounds: z, rule, premises, existing_only: false });
    }

    /// `B -> C`, `I(A, B, C)` give `A B -> C`.
    fn invariance_extend(&mut self) {
        for key in self.indep_keys() {
            let (a, b, c) = key;
            let ab = a.union(b);
            if !self.fits(ab) {
                continue;
            }
            let Some(ci) = self.get(b, c) else { continue };
            if !(self.fresh(ci) || self.fresh_indep(&key)) {
                continue;
            }
            let z = self.cell(ci).bounds;
            self.emit_with_indep(ab, c, z, RuleId::InvarianceExtend, ci, &key);
        }
    }

    /// `A B -> C`, `I(A, B, C)` give `B -> C`.
    fn invariance_reduce(&mut self) {
        for key in self.indep_keys() {
            let (a, b, c) = key;
            let Some(ci) = self.get(a.union(b), c) else { continue };
            if !(self.fresh(ci) || self.fresh_indep(&key)) {
                continue;
            }
            let z = self.cell(ci).bounds;
            self.emit_with_indep(b, c, z, RuleId::InvarianceReduce, ci, &key);
        }
    }

    /// `I(A, B, C)` and a positive lower bound on `P(C|B)` or `P(B|C)` give
    /// `I(C, B, A)`.
    fn symmetry(&mut self) {
        for key in self.indep_keys() {
            let (a, b, c) = key;
            if self.s.indeps.contains_key(&(c, b, a)) {
                continue;
            }
            let support = [self.get(b, c), self.get(c, b)]
                .into_iter()
                .flatten()
                .find(|&ci| self.cell(ci).bounds.lo() > 0.0);
            let Some(ci) = support else { continue };
            if !(self.fresh(ci) || self.fresh_indep(&key)) {
                continue;
            }
            let premises = vec![self.s.indeps[&key].node, self.cell(ci).node];
            self.out_indeps.push(PendingIndep { key: (c, b, a), premises });
        }
    }

    /// Chaining premises `A <-> B <-> C` whose directions satisfy coupling:
    /// `[ab, ba, bc, cb]` cell ids.
    fn chain_quads(&self, single_middle: bool) -> Vec<[usize; 4]> {
        let mut quads = Vec::new();
        for ci in 0..self.n_cells() {
            let ab = self.cell(ci);
            let (a, b) = (ab.ant, ab.cons);
            if single_middle && b.width() != 1 {
                continue;
            }
            let Some(cv) = self.get(b, a) else { continue };
            if !coupling_holds(&ab.bounds, &self.cell(cv).bounds) {
                continue;
            }
            for cx in self.with_ant(b) {
                let c = self.cell(cx).cons;
                if !c.disjoint(a) {
                    continue;
                }
                let Some(cy) = self.get(c, b) else { continue };
                if !coupling_holds(&self.cell(cx).bounds, &self.cell(cy).bounds) {
                    continue;
                }
                let quad = [ci, cv, cx, cy];
                if quad.iter().any(|&p| self.fresh(p)) {
                    quads.push(quad);
                }
            }
        }
        quads
    }

    fn precise_rule_chaining(&mut self) {
        for quad in self.chain_quads(false) {
            let [u, v, x, y] = quad.map(|ci| self.cell(ci).bounds);
            let z = bounds::precise_rule_chaining(u, v, x, y).bounds;
            let (a, c) = (self.cell(quad[0]).ant, self.cell(quad[2]).cons);
            self.emit(a, c, z, RuleId::PreciseRuleChaining, &quad);
        }
    }

    fn rule_chaining(&mut self) {
        for quad in self.chain_quads(true) {
            let [u, v, x, y] = quad.map(|ci| self.cell(ci).bounds);
            let z = bounds::rule_chaining(u, v, x, y);
            let (a, c) = (self.cell(quad[0]).ant, self.cell(quad[2]).cons);
            self.emit(a, c, z, RuleId::RuleChaining, &quad);
        }
    }

    /// Chaining through a literal `B` under `I(A, B, C)` and `I(A, !B, C)`.
    fn independent_chaining(&mut self) {
        use RuleId::*;
        for key in self.indep_keys() {
            let (a, b, c) = key;
            if b.width() != 1 {
                continue;
            }
            let not_key = (a, b.flip(b.mask), c);
            if !self.s.indeps.contains_key(&not_key) {
                continue;
            }
            let (Some(cu), Some(cx), Some(cy)) = (self.get(a, b), self.get(b, c), self.get(not_key.1, c)) else {
                continue;
            };
            let fresh = [cu, cx, cy].iter().any(|&p| self.fresh(p))
                || self.fresh_indep(&key)
                || self.fresh_indep(&not_key);
            if !fresh {
                continue;
            }
            let (u, x, y) = (self.cell(cu).bounds, self.cell(cx).bounds, self.cell(cy).bounds);
            let mut premises: Vec<NodeId> = [cu, cx, cy].iter().map(|&ci| self.cell(ci).node).collect();
            premises.push(self.s.indeps[&key].node);
            premises.push(self.s.indeps[&not_key].node);
            let ac = a.union(c);
            let points = u.is_point() && x.is_point() && y.is_point();
            let (fwd_id, upd_id) = if points && (self.config.enables(IndependentChaining) || self.config.enables(IndependentUpdate)) {
                (IndependentChaining, IndependentUpdate)
            } else {
                (PreciseIndependentChaining, PreciseIndependentUpdate)
            };
            let (forward, update) = if fwd_id == IndependentChaining {
                let (w, z) = bounds::rci_point(u.lo(), x.lo(), y.lo());
                (ProbInterval::raw(w, w), z.map(|z| ProbInterval::raw(z, z)))
            } else {
                (bounds::prci_forward(u, x, y), bounds::prci_update(u, x, y).ok())
            };
            if self.config.enables(fwd_id) {
                self.out.push(Pending {
                    ant: a,
                    cons: c,
                    bounds: forward,
                    rule: fwd_id,
                    premises: premises.clone(),
                    existing_only: false,
                });
            }
            if let Some(update) = update {
                if self.config.enables(upd_id) && self.fits(ac) {
                    self.out.push(Pending {
                        ant: ac,
                        cons: b,
                        bounds: update,
                        rule: upd_id,
                        premises,
                        existing_only: false,
                    });
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::*;
    use crate::event::ConjEvent;
    use crate::rule::{BidirRule, IndepStmt, UncertainRule};

    fn ev(s: &str) -> ConjEvent {
        ConjEvent::parse(s).unwrap()
    }

    fn rule(a: &str, b: &str, p: f64) -> UncertainRule {
        UncertainRule::new(ev(a), ev(b), ProbInterval::point(p).unwrap()).unwrap()
    }

    fn ind(a: &str, b: &str, c: &str) -> IndepStmt {
        IndepStmt::new(ev(a), ev(b), ev(c)).unwrap()
    }

    fn cancer() -> KnowledgeBase {
        let mut kb = KnowledgeBase::new();
        for r in [
            rule("A", "B", 0.8),
            rule("A", "C", 0.2),
            rule("B & C", "D", 0.8),
            rule("!B & C", "D", 0.8),
            rule("B & !C", "D", 0.8),
            rule("!B & !C", "D", 0.05),
            rule("C", "E", 0.8),
            rule("!C", "E", 0.6),
        ] {
            kb.insert(r).unwrap();
        }
        for i in [
            ind("A", "B & C", "D"),
            ind("A", "!B & C", "D"),
            ind("A", "B & !C", "D"),
            ind("A", "!B & !C", "D"),
            ind("A", "C", "E"),
            ind("A", "!C", "E"),
            ind("B", "A", "C"),
            ind("!B", "A", "C"),
        ] {
            kb.insert(i).unwrap();
        }
        kb
    }

    fn assert_point(s: &Saturation, a: &str, b: &str, p: f64) {
        let ans = s.query(&ev(a), &ev(b)).unwrap();
        assert!(
            (ans.bounds.lo() - p).abs() < 1e-9 && (ans.bounds.hi() - p).abs() < 1e-9,
            "P({b} | {a}) = {} expected {p}",
            ans.bounds
        );
    }

    #[test]
    fn empty_kb_is_a_fixpoint() {
        let s = KnowledgeBase::new().saturate(&SaturationConfig::default()).unwrap();
        assert_eq!(s.rounds(), 0);
        assert!(s.reached_fixpoint());
        assert_eq!(s.derived_count(), 0);
    }

    #[test]
    fn cancer_kb_values() {
        let s = cancer().saturate(&SaturationConfig::default()).unwrap();
        assert!(s.reached_fixpoint());
        assert_point(&s, "A", "D", 0.68);
        assert_point(&s, "A", "E", 0.64);
    }

    #[test]
    fn cancer_kb_with_local_rules_only() {
        use crate::calculus::RuleId::*;
        let config = SaturationConfig::with_rules([InvarianceExtend, InvarianceReduce, Negation, ConjunctionRight, ChainComplementary]);
        let s = cancer().saturate(&config).unwrap();
        assert_point(&s, "A", "D", 0.68);
        let trace = s.query(&ev("A"), &ev("D")).unwrap().trace;
        let used = trace.rules_used();
        for id in [Axiom, InvarianceExtend, Negation, ConjunctionRight, ChainComplementary] {
            assert!(used.contains(&id), "{id} missing from {used:?}");
        }
        assert!(trace.nodes().iter().all(|n| n.premises.is_empty() == (n.rule == Axiom)));
    }

    #[test]
    fn absent_conditional_is_vacuous() {
        let kb = KnowledgeBase::from_items([rule("A", "C", 0.3)]).unwrap();
        let mut kb = kb;
        kb.insert(rule("B", "C", 0.3)).unwrap();
        let s = kb.saturate(&SaturationConfig::default()).unwrap();
        let ans = s.query(&ev("A"), &ev("B")).unwrap();
        assert_eq!(ans.bounds, ProbInterval::UNIT);
        assert!(ans.trace.is_empty());
        assert!(matches!(s.query(&ev("A"), &ev("Z")), Err(QueryError::UnknownSymbol(_))));
        assert!(matches!(s.query(&ev("A"), &ev("A & B")), Err(QueryError::Invalid(_))));
    }

    #[test]
    fn precise_chaining_example() {
        let iv = |lo, hi| ProbInterval::new(lo, hi).unwrap();
        let kb = KnowledgeBase::from_items([
            BidirRule::new(ev("A"), ev("B"), iv(0.2, 0.8), iv(0.8, 0.8)).unwrap(),
            BidirRule::new(ev("B"), ev("C"), iv(0.2, 0.2), iv(0.2, 0.2)).unwrap(),
        ])
        .unwrap();
        let s = kb.saturate(&SaturationConfig::default()).unwrap();
        let ans = s.query(&ev("A"), &ev("C")).unwrap();
        assert!(ans.bounds.lo().abs() < 1e-12 && (ans.bounds.hi() - 0.625).abs() < 1e-12, "{}", ans.bounds);
        assert!(ans.trace.rules_used().contains(&RuleId::PreciseRuleChaining));
    }

    #[test]
    fn contradictory_derivation_is_reported() {
        let iv = |lo, hi| ProbInterval::new(lo, hi).unwrap();
        // P(B C|A) + P(!B C|A) = P(C|A) cannot exceed 1
        let kb = KnowledgeBase::from_items([
            UncertainRule::new(ev("A"), ev("B & C"), iv(0.6, 0.7)).unwrap(),
            UncertainRule::new(ev("A"), ev("!B & C"), iv(0.6, 0.7)).unwrap(),
        ])
        .unwrap();
        let err = kb.saturate(&SaturationConfig::default()).unwrap_err();
        let SaturateError::Inconsistent(report) = err else { panic!("expected inconsistency") };
        assert!(!report.conflicting_trace.is_empty());
        assert!(matches!(
            kb.check_consistency(&SaturationConfig::default()),
            Ok(Consistency::Inconsistent(_))
        ));
    }

    #[test]
    fn max_rounds_stops_early() {
        let config = SaturationConfig { max_rounds: 1, ..SaturationConfig::default() };
        let s = cancer().saturate(&config).unwrap();
        assert!(!s.reached_fixpoint());
        assert_eq!(s.rounds(), 1);
    }

    #[test]
    fn permuted_insertion_gives_identical_state() {
        let kb = cancer();
        let mut items: Vec<KbItem> = kb.rules().map(KbItem::from).collect();
        items.extend(kb.independences().cloned().map(KbItem::from));
        items.reverse();
        let permuted = KnowledgeBase::from_items(items).unwrap();
        let config = SaturationConfig::default();
        let (s1, s2) = (kb.saturate(&config).unwrap(), permuted.saturate(&config).unwrap());
        assert_eq!(s1.rules(), s2.rules());
        assert_eq!(s1.independences(), s2.independences());
    }
}
