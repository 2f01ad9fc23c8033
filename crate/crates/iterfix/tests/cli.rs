//! Command-line behavior: exit codes, output shapes, and stdout determinism.

mod common;

use common::{crate_dir, exit_code, run_cli, stderr_str, stdout_str};

#[test]
fn fl_ranks_failing_program_and_is_deterministic() {
    let cwd = crate_dir();
    // localize a deliberately broken abs variant (missing negation on line 3)
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.mini");
    std::fs::write(
        &bad,
        "fn abs(x: int) -> int {\n  if (x < 0) {\n    return x;\n  }\n  return x;\n}\n",
    )
    .unwrap();
    let tests = crate_dir().join("fixtures/programs/abs.tests.json");
    let args = [
        "fl",
        "--program",
        bad.to_str().unwrap(),
        "--tests",
        tests.to_str().unwrap(),
        "--json",
    ];
    let first = run_cli(&cwd, &args);
    assert_eq!(exit_code(&first), 0, "{}", stderr_str(&first));
    let ranked: Vec<serde_json::Value> = serde_json::from_str(&stdout_str(&first)).unwrap();
    assert!(!ranked.is_empty());
    assert_eq!(ranked[0]["rank"], 1);
    // the faulty return sits on line 3
    assert_eq!(ranked[0]["line"], 3);

    let second = run_cli(&cwd, &args);
    assert_eq!(first.stdout, second.stdout, "fl output must be run-to-run identical");

    // human table form
    let table = run_cli(&cwd, &args[..args.len() - 1]);
    assert_eq!(exit_code(&table), 0);
    assert!(stdout_str(&table).starts_with("rank  line  score"));
}

#[test]
fn fl_rejects_noncompiling_program() {
    let cwd = crate_dir();
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.mini");
    std::fs::write(&bad, "fn abs(x: int) -> int {\n  return y;\n}\n").unwrap();
    let out = run_cli(
        &cwd,
        &[
            "fl",
            "--program",
            bad.to_str().unwrap(),
            "--tests",
            crate_dir().join("fixtures/programs/abs.tests.json").to_str().unwrap(),
        ],
    );
    assert_eq!(exit_code(&out), 2);
    assert!(stderr_str(&out).contains("does not compile"));
}

#[test]
fn fl_on_passing_program_reports_nothing_to_localize() {
    let cwd = crate_dir();
    let out = run_cli(
        &cwd,
        &[
            "fl",
            "--program", "fixtures/programs/abs.mini",
            "--tests", "fixtures/programs/abs.tests.json",
        ],
    );
    assert_eq!(exit_code(&out), 1);
    assert!(stdout_str(&out).contains("nothing to localize"));
}

#[test]
fn repair_rejects_already_passing_program() {
    let cwd = crate_dir();
    let tmp = tempfile::tempdir().unwrap();
    let trace = tmp.path().join("trace.json");
    let out = run_cli(
        &cwd,
        &[
            "repair",
            "--program", "fixtures/bugs/swap3cycle/fixed.mini",
            "--tests", "fixtures/bugs/swap3cycle/tests.json",
            "--model", "fixtures/golden/model.json",
            "--out", trace.to_str().unwrap(),
        ],
    );
    assert_eq!(exit_code(&out), 2);
    assert!(stderr_str(&out).contains("nothing to repair"));
}

#[test]
fn repair_without_budget_finds_nothing_and_exits_one() {
    let cwd = crate_dir();
    let tmp = tempfile::tempdir().unwrap();
    let trace = tmp.path().join("trace.json");
    let out = run_cli(
        &cwd,
        &[
            "repair",
            "--program", "fixtures/bugs/swap3cycle/buggy.mini",
            "--tests", "fixtures/bugs/swap3cycle/tests.json",
            "--model", "fixtures/golden/model.json",
            "--max-iter", "0",
            "--out", trace.to_str().unwrap(),
        ],
    );
    assert_eq!(exit_code(&out), 1, "no-plausible-found must exit 1");
}

#[test]
fn repair_succeeds_on_handmade_bug_and_prints_path() {
    let cwd = crate_dir();
    let tmp = tempfile::tempdir().unwrap();
    let trace = tmp.path().join("trace.json");
    let out = run_cli(
        &cwd,
        &[
            "repair",
            "--program", "fixtures/bugs/swap3cycle/buggy.mini",
            "--tests", "fixtures/bugs/swap3cycle/tests.json",
            "--model", "fixtures/golden/model.json",
            "--out", trace.to_str().unwrap(),
        ],
    );
    assert_eq!(exit_code(&out), 0, "{}", stderr_str(&out));
    let text = stdout_str(&out);
    assert!(text.contains("plausible"), "stdout: {text}");
    assert!(text.contains("CE->plausible"), "stdout: {text}");
}

#[test]
fn train_prints_growth_table() {
    let cwd = crate_dir();
    let tmp = tempfile::tempdir().unwrap();
    let model = tmp.path().join("model.json");
    let out = run_cli(
        &cwd,
        &[
            "train",
            "--corpus", "fixtures/golden/corpus.jsonl",
            "--out", model.to_str().unwrap(),
        ],
    );
    assert_eq!(exit_code(&out), 0, "{}", stderr_str(&out));
    let text = stdout_str(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("iteration  size  added"));
    // default max-iter of 3 gives the initial row plus three growth rows
    assert_eq!(text.lines().count(), 5, "stdout: {text}");
}

#[test]
fn report_on_empty_directory_is_a_zero_table() {
    let cwd = crate_dir();
    let tmp = tempfile::tempdir().unwrap();
    let out = run_cli(&cwd, &["report", "--traces", tmp.path().to_str().unwrap()]);
    assert_eq!(exit_code(&out), 0);
    assert!(stdout_str(&out).contains("traces: 0"));
}

#[test]
fn missing_input_file_exits_two() {
    let cwd = crate_dir();
    let out = run_cli(
        &cwd,
        &[
            "fl",
            "--program", "no/such/file.mini",
            "--tests", "fixtures/programs/abs.tests.json",
        ],
    );
    assert_eq!(exit_code(&out), 2);
    assert!(stderr_str(&out).starts_with("error: "));
}
