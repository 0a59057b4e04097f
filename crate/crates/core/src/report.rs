//! Human and machine renderings of results.
//!
//! Machine output is one record per line: a record name followed by
//! `key=value` fields separated by single spaces. Events are written
//! without spaces (`A&!B`) and numbers in shortest round-trip form, so every
//! value is a single token and two runs on the same input produce the same
//! bytes.

use std::fmt::Write;

use crate::calculus::ChainingBounds;
use crate::engine::{DerivationTrace, Fact, InconsistencyReport, QueryAnswer, Saturation};
use crate::event::ConjEvent;
use crate::interval::{format_prob, ProbInterval};
use crate::kbformat::Query;
use crate::oracle::OracleReport;
use crate::rule::{IndepStmt, UncertainRule};

/// `p` rounded to 9 significant digits, printed without trailing zeros.
pub fn human_prob(p: f64) -> String {
    let rounded: f64 = format!("{p:.8e}").parse().expect("formatted float parses");
    format_prob(rounded)
}

pub fn human_interval(b: ProbInterval) -> String {
    format!("[{}, {}]", human_prob(b.lo()), human_prob(b.hi()))
}

/// Half-up rounding to two decimals. The 1e-9 nudge lets values such as
/// 0.025, whose binary form sits just below the tie, round up.
pub fn round2(p: f64) -> f64 {
    ((p * 100.0) + 0.5 + 1e-9).floor() / 100.0
}

/// Two-decimal table form, e.g. `[0.48, 0.83]`.
pub fn two_decimal_interval(b: ProbInterval) -> String {
    format!("[{:.2}, {:.2}]", round2(b.lo()), round2(b.hi()))
}

pub fn machine_event(e: &ConjEvent) -> String {
    e.to_string().replace(" & ", "&")
}

fn rule_fields(r: &UncertainRule) -> String {
    format!(
        "ant={} cons={} lo={} hi={}",
        machine_event(&r.antecedent),
        machine_event(&r.consequent),
        format_prob(r.bounds.lo()),
        format_prob(r.bounds.hi())
    )
}

fn indep_fields(i: &IndepStmt) -> String {
    format!("a={} b={} c={}", machine_event(&i.a), machine_event(&i.b), machine_event(&i.c))
}

fn fact_fields(f: &Fact) -> String {
    match f {
        Fact::Rule(r) => format!("kind=rule {}", rule_fields(r)),
        Fact::Indep(i) => format!("kind=indep {}", indep_fields(i)),
    }
}

/// `trace <prefix> node=N rule=TAG kind=... premises=1,2` per node; `-`
/// stands for no premises.
pub fn machine_trace(prefix: &str, trace: &DerivationTrace) -> String {
    let mut out = String::new();
    for n in trace.nodes() {
        let premises = if n.premises.is_empty() {
            "-".to_string()
        } else {
            n.premises.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",")
        };
        writeln!(out, "trace {prefix} node={} rule={} {} premises={premises}", n.id, n.rule, fact_fields(&n.fact))
            .unwrap();
    }
    out
}

/// Indented derivation tree with 9-significant-digit bounds.
pub fn human_trace(trace: &DerivationTrace) -> String {
    fn walk(trace: &DerivationTrace, id: usize, depth: usize, seen: &mut [bool], out: &mut String) {
        let node = &trace.nodes()[id];
        let indent = "  ".repeat(depth);
        if seen[id] {
            writeln!(out, "{indent}#{id} (see above)").unwrap();
            return;
        }
        seen[id] = true;
        let fact = match &node.fact {
            Fact::Rule(r) => format!("{} -> {} : {}", r.antecedent, r.consequent, human_interval(r.bounds)),
            Fact::Indep(i) => i.to_string(),
        };
        writeln!(out, "{indent}#{id} {fact} [{}]", node.rule).unwrap();
        for &p in &node.premises {
            walk(trace, p, depth + 1, seen, out);
        }
    }
    let mut out = String::new();
    let mut seen = vec![false; trace.nodes().len()];
    if !trace.is_empty() {
        walk(trace, 0, 0, &mut seen, &mut out);
    }
    out
}

pub fn machine_saturation(sat: &Saturation) -> String {
    format!(
        "saturation rounds={} fixpoint={} derived={}\n",
        sat.rounds(),
        sat.reached_fixpoint(),
        sat.derived_count()
    )
}

/// Every stored conditional and independence, in canonical order.
pub fn machine_facts(sat: &Saturation) -> String {
    let mut out = String::new();
    for r in sat.rules() {
        writeln!(out, "rule {}", rule_fields(&r)).unwrap();
    }
    for i in sat.independences() {
        writeln!(out, "indep {}", indep_fields(&i)).unwrap();
    }
    out
}

pub fn machine_query(index: usize, q: &Query, answer: &QueryAnswer, with_trace: bool) -> String {
    let mut out = format!(
        "query id={index} target={} given={} lo={} hi={}\n",
        machine_event(&q.target),
        machine_event(&q.given),
        format_prob(answer.bounds.lo()),
        format_prob(answer.bounds.hi())
    );
    if with_trace {
        out.push_str(&machine_trace(&format!("query={index}"), &answer.trace));
    }
    out
}

pub fn human_query(q: &Query, answer: &QueryAnswer, with_trace: bool) -> String {
    let mut out = format!("{q} = {}\n", human_interval(answer.bounds));
    if with_trace {
        if answer.trace.is_empty() {
            out.push_str("  (nothing derived; vacuous bounds)\n");
        }
        for line in human_trace(&answer.trace).lines() {
            writeln!(out, "  {line}").unwrap();
        }
    }
    out
}

pub fn machine_inconsistency(r: &InconsistencyReport) -> String {
    let mut out = format!(
        "inconsistent ant={} cons={} existing_lo={} existing_hi={} conflicting_lo={} conflicting_hi={}\n",
        machine_event(&r.key.antecedent),
        machine_event(&r.key.consequent),
        format_prob(r.existing.lo()),
        format_prob(r.existing.hi()),
        format_prob(r.conflicting.lo()),
        format_prob(r.conflicting.hi())
    );
    out.push_str(&machine_trace("side=existing", &r.existing_trace));
    out.push_str(&machine_trace("side=conflicting", &r.conflicting_trace));
    out
}

pub fn human_inconsistency(r: &InconsistencyReport) -> String {
    let mut out = format!(
        "inconsistent: P({} | {}) is bounded by {} and by {}, which do not intersect\n",
        r.key.consequent,
        r.key.antecedent,
        human_interval(r.existing),
        human_interval(r.conflicting)
    );
    out.push_str("first derivation:\n");
    for line in human_trace(&r.existing_trace).lines() {
        writeln!(out, "  {line}").unwrap();
    }
    out.push_str("second derivation:\n");
    for line in human_trace(&r.conflicting_trace).lines() {
        writeln!(out, "  {line}").unwrap();
    }
    out
}

/// Inputs and outputs of one chaining comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainRow {
    pub u: ProbInterval,
    pub v: ProbInterval,
    pub x: ProbInterval,
    pub y: ProbInterval,
    pub rc: ProbInterval,
    pub prc: ChainingBounds,
}

pub const CHAIN_HEADER: &str = "u             v             x             y             RC            PRC";

pub fn human_chain_row(row: &ChainRow) -> String {
    let cells = [row.u, row.v, row.x, row.y, row.rc, row.prc.bounds].map(two_decimal_interval);
    let mut out = String::new();
    for (i, c) in cells.iter().enumerate() {
        if i + 1 < cells.len() {
            write!(out, "{c:<14}").unwrap();
        } else {
            out.push_str(c);
        }
    }
    out.push('\n');
    out
}

pub fn machine_chain_row(index: usize, row: &ChainRow) -> String {
    let f = |name: &str, b: ProbInterval| format!("{name}_lo={} {name}_hi={}", format_prob(b.lo()), format_prob(b.hi()));
    format!(
        "chain id={index} {} {} {} {} {} {} lower_case={} upper_case={}\n",
        f("u", row.u),
        f("v", row.v),
        f("x", row.x),
        f("y", row.y),
        f("rc", row.rc),
        f("prc", row.prc.bounds),
        row.prc.lower_case,
        row.prc.upper_case
    )
}

/// Outcome of checking a calculus interval against oracle extremes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Verdict {
    /// The oracle stayed inside the calculus interval (up to `tol`).
    pub contained: bool,
    /// Both oracle extremes came within `gap` of the calculus bounds.
    pub tight: bool,
}

pub fn verdict(calculus: ProbInterval, oracle: &OracleReport, tol: f64, gap: f64) -> Verdict {
    let contained = oracle.achieved_min >= calculus.lo() - tol && oracle.achieved_max <= calculus.hi() + tol;
    let tight = (oracle.achieved_min - calculus.lo()).abs() <= gap && (calculus.hi() - oracle.achieved_max).abs() <= gap;
    Verdict { contained, tight }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: f64, hi: f64) -> ProbInterval {
        ProbInterval::new(lo, hi).unwrap()
    }

    #[test]
    fn nine_significant_digits() {
        assert_eq!(human_prob(0.68), "0.68");
        assert_eq!(human_prob(0.6799999999999999), "0.68");
        assert_eq!(human_prob(2.0 / 3.0), "0.666666667");
        assert_eq!(human_prob(0.0), "0");
        assert_eq!(human_prob(1.0), "1");
        assert_eq!(human_interval(iv(0.0, 0.625)), "[0, 0.625]");
    }

    #[test]
    fn two_decimal_half_up() {
        assert_eq!(round2(0.025), 0.03);
        assert_eq!(round2(0.5), 0.5);
        assert_eq!(round2(0.5555), 0.56);
        assert_eq!(round2(0.8333), 0.83);
        assert_eq!(two_decimal_interval(iv(0.48, 0.8333)), "[0.48, 0.83]");
    }

    #[test]
    fn machine_events_have_no_spaces() {
        let e = ConjEvent::parse("B & !A").unwrap();
        assert_eq!(machine_event(&e), "!A&B");
    }

    #[test]
    fn trace_records() {
        let t = DerivationTrace::axiom(ConjEvent::parse("A").unwrap(), ConjEvent::parse("B").unwrap(), iv(0.1, 0.2));
        assert_eq!(
            machine_trace("query=0", &t),
            "trace query=0 node=0 rule=axiom kind=rule ant=A cons=B lo=0.1 hi=0.2 premises=-\n"
        );
        assert_eq!(human_trace(&t), "#0 A -> B : [0.1, 0.2] [axiom]\n");
    }
}
