use std::process::{Command, Output};

use arcring_cli::report::{CommandResult, Report};

fn arcring(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_arcring")).args(["--threads", "2"]).args(args).output().unwrap()
}

fn report(args: &[&str]) -> (i32, Report, String) {
    let out = arcring(args);
    let text = String::from_utf8(out.stdout).unwrap();
    let rep: Report = serde_json::from_str(&text).unwrap_or_else(|e| panic!("{args:?}: {e}\n{text}"));
    (out.status.code().unwrap(), rep, text)
}

/// Catalan numbers by the binomial formula.
fn catalan(m: u64) -> u64 {
    (0..m).fold(1, |c, i| c * (2 * m - i) / (i + 1)) / (m + 1)
}

#[test]
fn catalan_five_is_forty_two() {
    let (code, rep, _) = report(&["catalan", "--m", "5"]);
    assert_eq!(code, 0);
    let CommandResult::Catalan(c) = rep.result else { panic!() };
    assert_eq!(c.count, catalan(5));
    assert_eq!(c.count, 42);
}

#[test]
fn gram_of_the_smallest_weight() {
    let (code, rep, _) = report(&["gram", "--n", "2", "--k", "1", "--lambda", "1,1"]);
    assert_eq!(code, 0);
    let CommandResult::Gram(g) = rep.result else { panic!() };
    assert_eq!(g.matrix, vec![vec!["1 + q^-2".to_string()]]);
}

#[test]
fn presentation_of_the_six_point_example() {
    let (code, rep, _) = report(&["present", "--lambda", "1,1,1,0,2,1", "--matching", "(1,6)(2,3)"]);
    assert_eq!(code, 0);
    let CommandResult::Present(p) = rep.result else { panic!() };
    assert!(p.verified_functors && p.verified_k0);
    assert_eq!(p.word.len(), 8);
}

#[test]
fn json_round_trips() {
    for args in [
        &["ring", "--m", "2", "--table"][..],
        &["verify-relations", "--n", "3", "--k", "1"],
        &["canonical", "--n", "4", "--k", "2"],
        &["braid-k0", "--n", "3", "--k", "1"],
        &["tensor-check", "--m", "1"],
    ] {
        let (code, rep, text) = report(args);
        assert_eq!(code, 0, "{args:?}");
        assert!(rep.passed);
        assert_eq!(rep.to_json() + "\n", text, "{args:?}");
        assert_eq!(rep.version, env!("CARGO_PKG_VERSION"));
    }
}

#[test]
fn output_is_deterministic() {
    let args = ["--seed", "7", "ring", "--m", "4", "--samples", "200"];
    let a = arcring(&args);
    let b = arcring(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["gram", "--n", "3", "--lambda", "1,1"][..],
        &["verify-relations", "--n", "3", "--k", "1", "--relation", "nope"],
        &["canonical", "--n", "3", "--k", "3"],
        &["ring", "--m", "5"],
        &["catalan"],
        &["frobnicate"],
        &["--format", "xml", "catalan", "--m", "1"],
    ] {
        let out = arcring(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn csv_rows_are_labeled_by_index() {
    let out = arcring(&["--format", "csv", "gram", "--lambda", "1,1,1,1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], ",0,1");
    assert!(rows[1].starts_with("0,") && rows[2].starts_with("1,"));
    assert_eq!(rows.len(), 3);
}

#[test]
fn text_output_reports_status() {
    let out = arcring(&["--format", "text", "braid-k0", "--n", "3", "--k", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l == "status: pass"));
}
