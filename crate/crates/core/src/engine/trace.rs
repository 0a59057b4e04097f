//! Derivation arena and the canonical traces extracted from it.

use std::collections::HashMap;
use std::fmt;

use super::compiled::{Ev, SymbolTable};
use crate::calculus::RuleId;
use crate::interval::ProbInterval;
use crate::rule::{IndepStmt, UncertainRule};

pub(crate) type NodeId = usize;

#[derive(Debug, Clone, Copy)]
pub(crate) enum NodeFact {
    Rule { ant: Ev, cons: Ev, bounds: ProbInterval },
    Indep { a: Ev, b: Ev, c: Ev },
}

/// One derivation step. `Sharpen` nodes record a merge whose interval takes
/// its two bounds from different premises.
#[derive(Debug, Clone)]
pub(crate) struct Node {
    pub rule: RuleId,
    pub fact: NodeFact,
    pub premises: Vec<NodeId>,
}

impl Node {
    fn bounds(&self) -> ProbInterval {
        match self.fact {
            NodeFact::Rule { bounds, .. } => bounds,
            NodeFact::Indep { .. } => ProbInterval::UNIT,
        }
    }
}

/// A derived or given fact in a trace.
#[derive(Debug, Clone, PartialEq)]
pub enum Fact {
    Rule(UncertainRule),
    Indep(IndepStmt),
}

impl fmt::Display for Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fact::Rule(r) => write!(f, "{r}"),
            Fact::Indep(i) => write!(f, "{i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceNode {
    /// Position of this node in [`DerivationTrace::nodes`].
    pub id: usize,
    pub rule: RuleId,
    pub fact: Fact,
    pub premises: Vec<usize>,
}

/// Derivation of one fact as a DAG. Node 0 is the root, ids follow
/// depth-first preorder, and shared sub-derivations appear once. Leaves are
/// knowledge-base axioms.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DerivationTrace {
    nodes: Vec<TraceNode>,
}

impl DerivationTrace {
    pub fn empty() -> Self {
        DerivationTrace::default()
    }

    /// A single given rule.
    pub(crate) fn axiom(
        antecedent: crate::event::ConjEvent,
        consequent: crate::event::ConjEvent,
        bounds: ProbInterval,
    ) -> Self {
        let fact = Fact::Rule(UncertainRule { antecedent, consequent, bounds });
        DerivationTrace { nodes: vec![TraceNode { id: 0, rule: RuleId::Axiom, fact, premises: Vec::new() }] }
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[TraceNode] {
        &self.nodes
    }

    pub fn root(&self) -> Option<&TraceNode> {
        self.nodes.first()
    }

    /// Distinct rule tags used, in tag order.
    pub fn rules_used(&self) -> Vec<RuleId> {
        let mut ids: Vec<RuleId> = self.nodes.iter().map(|n| n.rule).collect();
        ids.sort();
        ids.dedup();
        ids
    }

    /// Indented tree rendering; repeated sub-derivations are printed once and
    /// then referred to by id.
    pub fn render_tree(&self) -> String {
        let mut out = String::new();
        let mut seen = vec![false; self.nodes.len()];
        if !self.nodes.is_empty() {
            self.render_node(0, 0, &mut seen, &mut out);
        }
        out
    }

    fn render_node(&self, id: usize, depth: usize, seen: &mut [bool], out: &mut String) {
        let node = &self.nodes[id];
        let indent = "  ".repeat(depth);
        if seen[id] {
            out.push_str(&format!("{indent}#{id} (see above)\n"));
            return;
        }
        seen[id] = true;
        out.push_str(&format!("{indent}#{id} {} [{}]\n", node.fact, node.rule));
        for &p in &node.premises {
            self.render_node(p, depth + 1, seen, out);
        }
    }
}

/// A node after flattening sharpen chains: either an arena node or a merge of
/// the nodes supplying the lower and upper bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Resolved {
    Node(NodeId),
    Meet { merged: NodeId, lo: NodeId, hi: NodeId },
}

pub(crate) struct TraceBuilder<'a> {
    nodes: &'a [Node],
    symbols: &'a SymbolTable,
    ids: HashMap<Resolved, usize>,
    out: Vec<TraceNode>,
}

impl<'a> TraceBuilder<'a> {
    pub fn new(nodes: &'a [Node], symbols: &'a SymbolTable) -> Self {
        TraceBuilder { nodes, symbols, ids: HashMap::new(), out: Vec::new() }
    }

    pub fn build(mut self, root: NodeId) -> DerivationTrace {
        let r = self.resolve(root);
        self.visit(r);
        DerivationTrace { nodes: self.out }
    }

    /// Leaves of the sharpen chain below `id`: the nodes supplying the bounds.
    fn resolve(&self, id: NodeId) -> Resolved {
        if self.nodes[id].rule != RuleId::Sharpen {
            return Resolved::Node(id);
        }
        let mut leaves = Vec::new();
        let mut stack = vec![id];
        while let Some(n) = stack.pop() {
            let node = &self.nodes[n];
            if node.rule == RuleId::Sharpen {
                stack.extend(node.premises.iter().copied());
            } else {
                leaves.push(n);
            }
        }
        leaves.sort_unstable();
        leaves.dedup();
        // ties go to the earliest node, which has the shortest derivation
        let lo = *leaves
            .iter()
            .max_by(|&&a, &&b| {
                let (x, y) = (self.nodes[a].bounds().lo(), self.nodes[b].bounds().lo());
                x.total_cmp(&y).then(b.cmp(&a))
            })
            .expect("a sharpen node has premises");
        let hi = *leaves
            .iter()
            .min_by(|&&a, &&b| {
                let (x, y) = (self.nodes[a].bounds().hi(), self.nodes[b].bounds().hi());
                x.total_cmp(&y).then(a.cmp(&b))
            })
            .expect("a sharpen node has premises");
        if lo == hi {
            Resolved::Node(lo)
        } else {
            Resolved::Meet { merged: id, lo, hi }
        }
    }

    fn visit(&mut self, r: Resolved) -> usize {
        if let Some(&id) = self.ids.get(&r) {
            return id;
        }
        let id = self.out.len();
        self.ids.insert(r, id);
        let (arena_id, rule, children) = match r {
            Resolved::Node(n) => {
                let node = &self.nodes[n];
                let children: Vec<Resolved> = node.premises.iter().map(|&p| self.resolve(p)).collect();
                (n, node.rule, children)
            }
            Resolved::Meet { merged, lo, hi } => {
                (merged, RuleId::Sharpen, vec![Resolved::Node(lo), Resolved::Node(hi)])
            }
        };
        let fact = self.fact(arena_id);
        self.out.push(TraceNode { id, rule, fact, premises: Vec::new() });
        let premises: Vec<usize> = children.into_iter().map(|c| self.visit(c)).collect();
        self.out[id].premises = premises;
        id
    }

    fn fact(&self, id: NodeId) -> Fact {
        let s = self.symbols;
        match self.nodes[id].fact {
            NodeFact::Rule { ant, cons, bounds } => Fact::Rule(UncertainRule {
                antecedent: s.decode(ant),
                consequent: s.decode(cons),
                bounds,
            }),
            NodeFact::Indep { a, b, c } => {
                Fact::Indep(IndepStmt { a: s.decode(a), b: s.decode(b), c: s.decode(c) })
            }
        }
    }
}
