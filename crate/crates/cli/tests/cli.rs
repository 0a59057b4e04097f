use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn manifest() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR"))
}

fn corpus(name: &str) -> PathBuf {
    manifest().join("../core/examples").join(name)
}

fn data(name: &str) -> PathBuf {
    manifest().join("tests/data").join(name)
}

fn duck(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_duck")).args(args).output().expect("duck runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Compares against `tests/golden/<name>`; `DUCK_BLESS=1` rewrites it.
fn golden(name: &str, actual: &str) {
    let path = manifest().join("tests/golden").join(name);
    if std::env::var_os("DUCK_BLESS").is_some() {
        std::fs::write(&path, actual).unwrap();
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden {}", path.display()));
    assert_eq!(actual, expected, "output differs from {}", path.display());
}

fn field(record: &str, key: &str) -> f64 {
    let prefix = format!("{key}=");
    let v = record.split_whitespace().find_map(|kv| kv.strip_prefix(prefix.as_str()));
    v.unwrap_or_else(|| panic!("no {key} in {record}")).parse().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn cancer_query_prints_exact_values() {
    let o = duck(&["query", s(&corpus("cancer.duck"))]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "P(D | A) = [0.68, 0.68]\nP(E | A) = [0.64, 0.64]\n");
}

#[test]
fn cancer_machine_trace_golden() {
    let o = duck(&["query", "--trace", "--format", "machine", s(&corpus("cancer.duck"))]);
    assert_eq!(o.status.code(), Some(0));
    golden("cancer_trace.machine", &stdout(&o));
}

#[test]
fn cancer_human_trace_golden() {
    let o = duck(&["query", "--trace", s(&corpus("cancer.duck"))]);
    golden("cancer_trace.human", &stdout(&o));
}

#[test]
fn machine_output_is_stable_across_runs() {
    let kb = corpus("cancer.duck");
    let args = ["query", "--trace", "--facts", "--format", "machine", s(&kb)];
    let first = duck(&args);
    let second = duck(&args);
    assert_eq!(first.stdout, second.stdout);
    assert!(stdout(&first).lines().all(|l| !l.is_empty() && !l.contains("  ")));
}

#[test]
fn chain_flags_match_figure_row() {
    let o = duck(&["chain", "--u", "0.6,1", "--v", "1,1", "--x", "0.8,0.8", "--y", "0.8,0.8"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let row = out.lines().nth(1).unwrap();
    assert!(row.ends_with("[0.48, 0.83]"), "{row}");
    assert!(row.contains("[0.48, 1.00]  [0.48, 0.83]"), "RC column: {row}");
}

#[test]
fn chain_corpus_golden() {
    let o = duck(&["chain", s(&corpus("fig2.duck"))]);
    assert_eq!(o.status.code(), Some(0));
    golden("fig2_chain.human", &stdout(&o));
    let m = duck(&["chain", "--format", "machine", s(&corpus("fig2.duck"))]);
    golden("fig2_chain.machine", &stdout(&m));
}

#[test]
fn chain_rejects_coupling_violation() {
    let o = duck(&["chain", "--u", "0,0", "--v", "0.5", "--x", "0.5", "--y", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("upper bound of 0"));
}

#[test]
fn check_consistent() {
    let o = duck(&["check", s(&corpus("cancer.duck"))]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("consistent: fixpoint after"));
}

#[test]
fn contradictory_points_exit_1_with_trace() {
    let o = duck(&["check", s(&data("conflict.duck"))]);
    assert_eq!(o.status.code(), Some(1));
    golden("conflict.human", &stdout(&o));
    let m = duck(&["check", "--format", "machine", s(&data("conflict.duck"))]);
    assert_eq!(m.status.code(), Some(1));
    golden("conflict.machine", &stdout(&m));
}

#[test]
fn derived_contradiction_exit_1() {
    let o = duck(&["check", "--format", "machine", s(&data("derived_conflict.duck"))]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.starts_with("check status=inconsistent\ninconsistent "), "{out}");
    assert!(out.contains("rule=I7"), "{out}");
}

#[test]
fn parse_errors_exit_2_with_every_diagnostic() {
    let path = data("broken.duck");
    let o = duck(&["check", s(&path)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    let err = stderr(&o);
    let lines: Vec<&str> = err.lines().collect();
    assert_eq!(lines.len(), 5, "{err}");
    for (line, (row, col)) in lines.iter().zip([(1, 15), (2, 13), (3, 1), (4, 12), (6, 16)]) {
        assert!(line.starts_with("error: "), "{line}");
        assert!(line.contains(&format!("broken.duck:{row}:{col}: ")), "{line}");
    }
    assert!(err.contains("exceeds upper bound"));
    assert!(err.contains("both positive and negated"));
}

#[test]
fn missing_file_exit_2() {
    let o = duck(&["query", "/nonexistent/kb.duck"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("cannot read"));
}

#[test]
fn round_limit_exit_3() {
    let o = duck(&["check", "--max-rounds", "1", s(&corpus("cancer.duck"))]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).starts_with("no contradiction within the round limit"));
    let q = duck(&["query", "--max-rounds", "1", "--format", "machine", s(&corpus("cancer.duck"))]);
    assert_eq!(q.status.code(), Some(3));
    assert!(stdout(&q).starts_with("saturation rounds=1 fixpoint=false"));
}

#[test]
fn width_limit_is_a_validation_error() {
    let o = duck(&["check", "--max-width", "1", s(&corpus("cancer.duck"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn restricted_rules_still_reach_the_coma_bound() {
    let o = duck(&["query", "--rules", "I1a,I4,I7,I11", s(&corpus("cancer.duck"))]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("P(D | A) = [0.68, 0.68]\n"));
}

#[test]
fn verify_prc_example() {
    let o = duck(&["verify", s(&data("prc_example.duck")), "--budget", "4000", "--format", "machine"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.starts_with("verify id=0 target=C given=A calc_lo=0 "), "{out}");
    assert!((field(&out, "calc_hi") - 0.625).abs() < 1e-12, "{out}");
    assert!(field(&out, "oracle_hi") > 0.6, "{out}");
    assert!(out.contains("contained=true"), "{out}");
    let again = duck(&["verify", s(&data("prc_example.duck")), "--budget", "4000", "--format", "machine"]);
    assert_eq!(again.stdout, o.stdout);
}

#[test]
fn verify_explicit_query() {
    let o = duck(&["verify", s(&corpus("cancer.duck")), "--query", "P(E|A)", "--budget", "2000"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.starts_with("P(E | A)\n  calculus [0.64, 0.64]\n  oracle   [0.64, 0.64]"), "{out}");
    assert!(out.contains("contained: yes"));
}

#[test]
fn help_exits_0() {
    let o = duck(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verify"));
}
