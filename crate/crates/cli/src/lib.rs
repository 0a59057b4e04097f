//! The `duck` command: load `.duck` knowledge bases, check them, answer
//! their queries, compare chaining rules and cross-check bounds against the
//! brute-force oracle.
//!
//! Exit codes: 0 success, 1 inconsistent knowledge base or failed
//! verification, 2 parse or validation error, 3 round limit reached.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use duck_core::calculus::{prc_bounds, rc_bounds, RuleId};
use duck_core::engine::{
    DerivationTrace, InconsistencyReport, InsertError, KnowledgeBase, QueryAnswer, QueryError, SaturateError,
    Saturation, SaturationConfig,
};
use duck_core::kbformat::{parse_kb, KbDocument, Query, Statement};
use duck_core::oracle::{estimate_range, OracleError, FEASIBILITY_TOL};
use duck_core::report::{self, ChainRow};
use duck_core::ProbInterval;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INCONSISTENT: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_ROUND_LIMIT: i32 = 3;

/// Fixed default so oracle runs are reproducible.
pub const DEFAULT_SEED: u64 = 0x5eed;

/// Largest gap between calculus and oracle extremes still reported as tight.
pub const TIGHTNESS_GAP: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Machine,
}

#[derive(Debug, Parser)]
#[command(name = "duck", version, about = "Interval probability knowledge bases")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    /// Output style: readable text or `key=value` records.
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    pub format: Format,

    /// Widest event a derivation may create.
    #[arg(long, default_value_t = 4, global = true)]
    pub max_width: usize,

    /// Smallest bound improvement that counts as progress.
    #[arg(long, default_value_t = 1e-9, global = true)]
    pub epsilon: f64,

    /// Saturation stops after this many rounds (exit code 3).
    #[arg(long, default_value_t = 1000, global = true)]
    pub max_rounds: usize,

    /// Inference rules to enable, as tags or families (e.g. `I1,I7,PRC`).
    /// Defaults to every rule except RC.
    #[arg(long, value_delimiter = ',', global = true)]
    pub rules: Option<Vec<String>>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Saturate and report whether the knowledge base is consistent.
    Check {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Saturate and answer every `query` statement.
    Query {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Print the derivation of each answer.
        #[arg(long)]
        trace: bool,
        /// Also print every stored conditional and independence.
        #[arg(long)]
        facts: bool,
    },
    /// Compare RC and PRC on a chain A <-> B <-> C, given by flags or by
    /// consecutive birules in a file.
    Chain {
        file: Option<PathBuf>,
        /// Bounds on P(B|A) as `lo,hi` or a single value.
        #[arg(long, value_parser = parse_interval)]
        u: Option<ProbInterval>,
        /// Bounds on P(A|B).
        #[arg(long, value_parser = parse_interval)]
        v: Option<ProbInterval>,
        /// Bounds on P(C|B).
        #[arg(long, value_parser = parse_interval)]
        x: Option<ProbInterval>,
        /// Bounds on P(B|C).
        #[arg(long, value_parser = parse_interval)]
        y: Option<ProbInterval>,
    },
    /// Compare calculus bounds with the extremes the oracle finds.
    Verify {
        file: PathBuf,
        /// Query such as `P(B | A)`; defaults to the file's queries.
        #[arg(long)]
        query: Option<String>,
        /// Number of random starting models.
        #[arg(long, default_value_t = 100_000)]
        budget: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

fn parse_interval(text: &str) -> Result<ProbInterval, String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let num = |s: &str| s.parse::<f64>().map_err(|_| format!("`{s}` is not a number"));
    let (lo, hi) = match parts[..] {
        [p] => (num(p)?, num(p)?),
        [lo, hi] => (num(lo)?, num(hi)?),
        _ => return Err("expected `lo,hi` or a single value".into()),
    };
    ProbInterval::new(lo, hi).map_err(|e| e.to_string())
}

/// A failed command: exit code plus what goes to the error stream.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Failure { code: EXIT_INVALID, message: message.into() }
    }
}

type CmdResult = Result<i32, Failure>;

/// Runs the command line `args` (program name first), writing results to
/// `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let mut buf = Vec::new();
    let result = execute(&config, &mut buf);
    let _ = out.write_all(&buf);
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn execute(config: &RunConfig, out: &mut Vec<u8>) -> CmdResult {
    let sat_config = saturation_config(config)?;
    match &config.command {
        Command::Check { files } => check(config, &sat_config, files, out),
        Command::Query { files, trace, facts } => query(config, &sat_config, files, *trace, *facts, out),
        Command::Chain { file, u, v, x, y } => chain(config, file.as_deref(), [*u, *v, *x, *y], out),
        Command::Verify { file, query, budget, seed } => {
            verify(config, &sat_config, file, query.as_deref(), *budget, *seed, out)
        }
    }
}

fn saturation_config(config: &RunConfig) -> Result<SaturationConfig, Failure> {
    let mut sat = SaturationConfig::default();
    if let Some(names) = &config.rules {
        let mut ids = Vec::new();
        for name in names {
            match name.as_str() {
                "all" => ids.extend(RuleId::ALL),
                _ => ids.extend(RuleId::family(name).ok_or_else(|| Failure::invalid(format!("unknown rule `{name}`")))?),
            }
        }
        sat = SaturationConfig::with_rules(ids);
    }
    sat.max_width = config.max_width;
    sat.epsilon = config.epsilon;
    sat.max_rounds = config.max_rounds;
    Ok(sat)
}

fn load(files: &[PathBuf]) -> Result<KbDocument, Failure> {
    let mut doc = KbDocument::new();
    let mut messages = Vec::new();
    for path in files {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::invalid(format!("cannot read {}: {e}", path.display())))?;
        match parse_kb(&text) {
            Ok(d) => doc.extend(d),
            Err(diags) => messages.extend(diags.iter().map(|d| format!("{}:{d}", path.display()))),
        }
    }
    if messages.is_empty() {
        Ok(doc)
    } else {
        Err(Failure::invalid(messages.join("\nerror: ")))
    }
}

enum Built {
    Kb(KnowledgeBase),
    Inconsistent(Box<InconsistencyReport>),
}

fn build(doc: &KbDocument) -> Result<Built, Failure> {
    match doc.to_kb() {
        Ok(kb) => Ok(Built::Kb(kb)),
        Err(InsertError::Inconsistent(r)) => Ok(Built::Inconsistent(r)),
        Err(InsertError::Invalid(e)) => Err(Failure::invalid(e.to_string())),
    }
}

enum Saturated {
    Done(Saturation),
    Inconsistent(Box<InconsistencyReport>),
}

fn saturate(doc: &KbDocument, config: &SaturationConfig) -> Result<Saturated, Failure> {
    let kb = match build(doc)? {
        Built::Kb(kb) => kb,
        Built::Inconsistent(r) => return Ok(Saturated::Inconsistent(r)),
    };
    match kb.saturate(config) {
        Ok(s) => Ok(Saturated::Done(s)),
        Err(SaturateError::Inconsistent(r)) => Ok(Saturated::Inconsistent(r)),
        Err(SaturateError::Config(e)) => Err(Failure::invalid(e.to_string())),
    }
}

fn report_inconsistency(config: &RunConfig, r: &InconsistencyReport, out: &mut Vec<u8>) -> CmdResult {
    let text = match config.format {
        Format::Human => report::human_inconsistency(r),
        Format::Machine => format!("check status=inconsistent\n{}", report::machine_inconsistency(r)),
    };
    out.extend_from_slice(text.as_bytes());
    Ok(EXIT_INCONSISTENT)
}

fn check(config: &RunConfig, sat_config: &SaturationConfig, files: &[PathBuf], out: &mut Vec<u8>) -> CmdResult {
    let doc = load(files)?;
    let sat = match saturate(&doc, sat_config)? {
        Saturated::Done(s) => s,
        Saturated::Inconsistent(r) => return report_inconsistency(config, &r, out),
    };
    let text = match config.format {
        Format::Human if sat.reached_fixpoint() => format!(
            "consistent: fixpoint after {} rounds, {} derived conditionals\n",
            sat.rounds(),
            sat.derived_count()
        ),
        Format::Human => format!(
            "no contradiction within the round limit: {} rounds, {} derived conditionals\n",
            sat.rounds(),
            sat.derived_count()
        ),
        Format::Machine => {
            let status = if sat.reached_fixpoint() { "consistent" } else { "round_limit" };
            format!("check status={status}\n{}", report::machine_saturation(&sat))
        }
    };
    out.extend_from_slice(text.as_bytes());
    Ok(limit_code(&sat))
}

fn limit_code(sat: &Saturation) -> i32 {
    if sat.reached_fixpoint() {
        EXIT_OK
    } else {
        EXIT_ROUND_LIMIT
    }
}

/// Symbols the knowledge base never mentions leave a conditional
/// unconstrained.
fn answer(sat: &Saturation, q: &Query) -> Result<QueryAnswer, Failure> {
    match sat.query(&q.given, &q.target) {
        Ok(a) => Ok(a),
        Err(QueryError::UnknownSymbol(_)) => {
            Ok(QueryAnswer { bounds: ProbInterval::UNIT, trace: DerivationTrace::empty() })
        }
        Err(e @ QueryError::Invalid(_)) => Err(Failure::invalid(e.to_string())),
    }
}

fn query(
    config: &RunConfig,
    sat_config: &SaturationConfig,
    files: &[PathBuf],
    trace: bool,
    facts: bool,
    out: &mut Vec<u8>,
) -> CmdResult {
    let doc = load(files)?;
    let sat = match saturate(&doc, sat_config)? {
        Saturated::Done(s) => s,
        Saturated::Inconsistent(r) => return report_inconsistency(config, &r, out),
    };
    let mut text = String::new();
    if config.format == Format::Machine {
        text.push_str(&report::machine_saturation(&sat));
    }
    for (i, q) in doc.queries().enumerate() {
        let a = answer(&sat, q)?;
        text.push_str(&match config.format {
            Format::Human => report::human_query(q, &a, trace),
            Format::Machine => report::machine_query(i, q, &a, trace),
        });
    }
    if facts {
        match config.format {
            Format::Human => {
                for s in KbDocument::from_saturation(&sat).iter() {
                    text.push_str(&format!("{s}\n"));
                }
            }
            Format::Machine => text.push_str(&report::machine_facts(&sat)),
        }
    }
    if !sat.reached_fixpoint() && config.format == Format::Human {
        text.push_str(&format!("round limit reached after {} rounds; bounds may not be final\n", sat.rounds()));
    }
    out.extend_from_slice(text.as_bytes());
    Ok(limit_code(&sat))
}

fn chain_row(first: (ProbInterval, ProbInterval), second: (ProbInterval, ProbInterval)) -> ChainRow {
    let (u, v) = first;
    let (x, y) = second;
    ChainRow { u, v, x, y, rc: rc_bounds(u, v, x, y), prc: prc_bounds(u, v, x, y) }
}

/// Rows from every pair of birules `a <-> b`, `b <-> c` in file order.
fn chain_rows_from(path: &Path) -> Result<Vec<ChainRow>, Failure> {
    let doc = load(&[path.to_path_buf()])?;
    let birules: Vec<_> = doc
        .iter()
        .filter_map(|s| match s {
            Statement::Birule(b) => Some(b),
            _ => None,
        })
        .collect();
    let mut rows = Vec::new();
    for (i, ab) in birules.iter().enumerate() {
        for bc in &birules[i + 1..] {
            if bc.a == ab.b && !bc.b.shares_symbol(&ab.a) {
                rows.push(chain_row((ab.forward, ab.backward), (bc.forward, bc.backward)));
            }
        }
    }
    if rows.is_empty() {
        return Err(Failure::invalid(format!("{}: no birule pair a <-> b, b <-> c", path.display())));
    }
    Ok(rows)
}

fn chain(config: &RunConfig, file: Option<&Path>, flags: [Option<ProbInterval>; 4], out: &mut Vec<u8>) -> CmdResult {
    let rows = match (file, flags) {
        (Some(path), [None, None, None, None]) => chain_rows_from(path)?,
        (Some(_), _) => return Err(Failure::invalid("give either a file or --u/--v/--x/--y, not both")),
        (None, [Some(u), Some(v), Some(x), Some(y)]) => {
            for (name, f, b) in [("A <-> B", u, v), ("B <-> C", x, y)] {
                if (f.hi() == 0.0) != (b.hi() == 0.0) {
                    return Err(Failure::invalid(format!(
                        "{name}: an upper bound of 0 in one direction requires 0 in the other"
                    )));
                }
            }
            vec![chain_row((u, v), (x, y))]
        }
        (None, _) => return Err(Failure::invalid("chain needs a file or all of --u, --v, --x, --y")),
    };
    let mut text = String::new();
    match config.format {
        Format::Human => {
            text.push_str(report::CHAIN_HEADER);
            text.push('\n');
            for row in &rows {
                text.push_str(&report::human_chain_row(row));
            }
        }
        Format::Machine => {
            for (i, row) in rows.iter().enumerate() {
                text.push_str(&report::machine_chain_row(i, row));
            }
        }
    }
    out.extend_from_slice(text.as_bytes());
    Ok(EXIT_OK)
}

fn parse_query(text: &str) -> Result<Query, Failure> {
    let doc = parse_kb(&format!("query {text}"))
        .map_err(|d| Failure::invalid(format!("--query: {}", d[0].message)))?;
    let found = match doc.iter().next() {
        Some(Statement::Query(q)) if doc.statements.len() == 1 => Ok(q.clone()),
        _ => Err(Failure::invalid("--query expects one query such as `P(B | A)`")),
    };
    found
}

fn verify(
    config: &RunConfig,
    sat_config: &SaturationConfig,
    file: &Path,
    query_text: Option<&str>,
    budget: usize,
    seed: u64,
    out: &mut Vec<u8>,
) -> CmdResult {
    let doc = load(&[file.to_path_buf()])?;
    let queries: Vec<Query> = match query_text {
        Some(t) => vec![parse_query(t)?],
        None => doc.queries().cloned().collect(),
    };
    if queries.is_empty() {
        return Err(Failure::invalid("nothing to verify: pass --query or add query statements"));
    }
    let kb = match build(&doc)? {
        Built::Kb(kb) => kb,
        Built::Inconsistent(r) => return report_inconsistency(config, &r, out),
    };
    let sat = match saturate(&doc, sat_config)? {
        Saturated::Done(s) => s,
        Saturated::Inconsistent(r) => return report_inconsistency(config, &r, out),
    };
    let mut code = limit_code(&sat);
    let mut text = String::new();
    for (i, q) in queries.iter().enumerate() {
        let calc = answer(&sat, q)?.bounds;
        let oracle = match estimate_range(&kb, &q.given, &q.target, budget, seed) {
            Ok(r) => r,
            Err(OracleError::NoFeasibleModel { samples }) => {
                text.push_str(&match config.format {
                    Format::Human => format!("{q}\n  calculus {}\n  oracle   no model found in {samples} samples\n", report::human_interval(calc)),
                    Format::Machine => format!("verify id={i} status=no_model samples={samples}\n"),
                });
                code = EXIT_INCONSISTENT;
                continue;
            }
            Err(e) => {
                out.extend_from_slice(text.as_bytes());
                return Err(Failure::invalid(e.to_string()));
            }
        };
        let verdict = report::verdict(calc, &oracle, FEASIBILITY_TOL, TIGHTNESS_GAP);
        let oracle_iv = ProbInterval::raw(oracle.achieved_min, oracle.achieved_max);
        text.push_str(&match config.format {
            Format::Human => format!(
                "{q}\n  calculus {}\n  oracle   {} ({} samples)\n  contained: {}\n  tight within {TIGHTNESS_GAP}: {}\n",
                report::human_interval(calc),
                report::human_interval(oracle_iv),
                oracle.samples_used,
                yes_no(verdict.contained),
                yes_no(verdict.tight),
            ),
            Format::Machine => format!(
                "verify id={i} target={} given={} calc_lo={} calc_hi={} oracle_lo={} oracle_hi={} samples={} contained={} tight={}\n",
                report::machine_event(&q.target),
                report::machine_event(&q.given),
                duck_core::format_prob(calc.lo()),
                duck_core::format_prob(calc.hi()),
                duck_core::format_prob(oracle.achieved_min),
                duck_core::format_prob(oracle.achieved_max),
                oracle.samples_used,
                verdict.contained,
                verdict.tight,
            ),
        });
        if !verdict.contained {
            code = EXIT_INCONSISTENT;
        }
    }
    out.extend_from_slice(text.as_bytes());
    Ok(code)
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}
