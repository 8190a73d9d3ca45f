use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rigidity::framework::{congruence_check, equivalence_check};
use rigidity::report::Report;
use rigidity::textio::matrix_from_text;
use rigidity::{fixtures, parse_framework};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn rigidity(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rigidity")).args(args).env_remove("RIGIDITY_SEED").output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

#[test]
fn check_exit_codes_follow_the_verdict() {
    for (name, code, verdict) in [
        ("lateration.fw", 0, "UniversallyRigid"),
        ("square.fw", 1, "NotUniversallyRigid"),
        ("counterexample.fw", 2, "Inconclusive"),
        ("simplex.fw", 0, "UniversallyRigid"),
    ] {
        let out = rigidity(&["check", path_str(&fixture(name)), "--format", "json"]);
        assert_eq!(out.status.code(), Some(code), "{name}");
        let report = Report::from_json(&stdout(&out)).unwrap();
        assert_eq!(report.verdict, verdict);
        assert!(report.timings_ms.is_none());
    }
}

#[test]
fn square_witness_is_equivalent_and_not_congruent() {
    let dir = tempfile::tempdir().unwrap();
    let witness = dir.path().join("witness.fw");
    let out = rigidity(&["check", path_str(&fixture("square.fw")), "--witness-out", witness.to_str().unwrap(), "--format", "json"]);
    assert_eq!(out.status.code(), Some(1));
    let report = Report::from_json(&stdout(&out)).unwrap();
    assert_eq!(report.evidence["witness_path"], serde_json::json!(witness.to_str().unwrap()));

    let p = fixtures::square();
    let q = parse_framework(&std::fs::read_to_string(&witness).unwrap()).unwrap();
    assert_eq!(q.graph(), p.graph());
    assert!(equivalence_check(p.graph(), p.config(), q.config(), 1e-9).unwrap());
    assert!(!congruence_check(p.config(), q.config(), 1e-6).unwrap());
}

#[test]
fn reports_are_deterministic_and_round_trip() {
    for name in ["square.fw", "counterexample.fw", "lateration.fw", "simplex.fw"] {
        let a = stdout(&rigidity(&["check", path_str(&fixture(name)), "--format", "json", "--seed", "3"]));
        let b = stdout(&rigidity(&["check", path_str(&fixture(name)), "--format", "json", "--seed", "3"]));
        assert_eq!(a, b, "{name}");
        let reemitted = Report::from_json(&a).unwrap().to_json();
        assert_eq!(a.trim_end(), reemitted);
    }
}

#[test]
fn seed_flag_beats_environment_which_beats_default() {
    let input = fixture("square.fw");
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_rigidity"));
        cmd.args(["check", path_str(&input), "--format", "json"]).env_remove("RIGIDITY_SEED");
        if let Some(v) = env {
            cmd.env("RIGIDITY_SEED", v);
        }
        if let Some(s) = flag {
            cmd.args(["--seed", s]);
        }
        let out = cmd.output().unwrap();
        (out.status.code(), Report::from_json(&stdout(&out)).map(|r| r.seed).ok())
    };
    assert_eq!(run(None, None).1, Some(0));
    assert_eq!(run(Some("5"), None).1, Some(5));
    assert_eq!(run(Some("5"), Some("7")).1, Some(7));
    assert_eq!(run(Some("five"), None).0, Some(64));
}

#[test]
fn genpos_reports_the_collinear_triple() {
    let out = rigidity(&["genpos", path_str(&fixture("counterexample.fw"))]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "false\ndependent {2,4,5}\n");
}

#[test]
fn gale_of_the_square_alternates() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("z.txt");
    let out = rigidity(&["gale", path_str(&fixture("square.fw")), "--dump-gale", dump.to_str().unwrap()]);
    assert!(out.status.success());
    let z = matrix_from_text(&std::fs::read_to_string(&dump).unwrap()).unwrap();
    assert_eq!(z.shape(), (4, 1));
    let s = z[(0, 0)].signum();
    for (i, expected) in [1.0, -1.0, 1.0, -1.0].iter().enumerate() {
        assert!((z[(i, 0)] - s * 0.5 * expected).abs() < 1e-12);
    }
}

#[test]
fn lateration_stress_has_psd_rank_two() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("s.txt");
    let out = rigidity(&["stress", "--lateration", path_str(&fixture("lateration.fw")), "--dump-stress", dump.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("PSD rank 2"), "{}", stdout(&out));
    let s = matrix_from_text(&std::fs::read_to_string(&dump).unwrap()).unwrap();
    assert_eq!(s.shape(), (5, 5));
}

#[test]
fn psi_dump_lists_constraint_residuals() {
    let out = rigidity(&["stress", path_str(&fixture("lateration.fw")), "--dump-psi"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let constraints: Vec<&str> = text.lines().filter(|l| l.starts_with("# constraint")).collect();
    assert_eq!(constraints.len(), 1);
    let residual: f64 = constraints[0].split_whitespace().last().unwrap().parse().unwrap();
    assert!(residual.abs() < 1e-9);
}

#[test]
fn flex_and_falsify_on_the_square() {
    let out = rigidity(&["flex", path_str(&fixture("square.fw")), "--all", "--format", "json"]);
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value["affine_flex"], serde_json::json!(false));
    assert_eq!(value["quadric_basis"].as_array().unwrap().len(), 0);

    let out = rigidity(&["falsify", path_str(&fixture("square.fw")), "--format", "json"]);
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value["found"], serde_json::json!(true));
}

#[test]
fn bad_input_exits_with_64() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.fw");
    std::fs::write(&bad, "3 2\n0 0\n1 0\n").unwrap();
    assert_eq!(rigidity(&["check", bad.to_str().unwrap()]).status.code(), Some(64));
    assert_eq!(rigidity(&["check", dir.path().join("missing.fw").to_str().unwrap()]).status.code(), Some(64));
    assert_eq!(rigidity(&["check", path_str(&fixture("square.fw")), "--psd-rel", "0"]).status.code(), Some(64));
    assert_eq!(rigidity(&["edm", path_str(&fixture("square.fw")), "--dump", "--format", "json"]).status.code(), Some(64));
}

#[test]
fn fixtures_command_regenerates_the_shipped_files() {
    let dir = tempfile::tempdir().unwrap();
    assert!(rigidity(&["fixtures", dir.path().to_str().unwrap()]).status.success());
    for (name, text) in fixtures::all_texts() {
        assert_eq!(std::fs::read_to_string(dir.path().join(name)).unwrap(), text);
        assert_eq!(std::fs::read_to_string(fixture(name)).unwrap(), text, "shipped {name} is stale");
    }
}
