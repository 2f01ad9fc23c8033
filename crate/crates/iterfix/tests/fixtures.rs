//! Sanity checks over the shipped seed programs and handmade bug fixtures.

mod common;

use iterfix::check::check;
use iterfix::exec::{run_suite, TestSuite, DEFAULT_STEP_BUDGET};
use iterfix::lang::{ast_sexpr, print_ast, SourceProgram};
use iterfix::perturb::{build_corpus, SeedProgram};

#[test]
fn seed_programs_are_canonical_and_green() {
    let seeds = common::seed_programs();
    assert!(seeds.len() >= 10, "expected a moderately sized seed set, got {}", seeds.len());
    for (name, program, suite) in &seeds {
        let ast = program
            .ast()
            .unwrap_or_else(|| panic!("{name}: seed program must parse"));
        assert_eq!(
            print_ast(ast),
            program.text(),
            "{name}: seed programs must already be in canonical form"
        );
        assert!(check(program).is_empty(), "{name}: seed program must compile");
        assert!(suite.tests.len() >= 3, "{name}: suite has too few tests");
        let report = run_suite(program, suite, DEFAULT_STEP_BUDGET);
        assert_eq!(report.failing, 0, "{name}: seed program must pass its own suite");
    }
}

#[test]
fn corpus_generation_kills_most_mutants() {
    let seeds: Vec<SeedProgram> = common::seed_programs()
        .into_iter()
        .map(|(name, program, suite)| SeedProgram { name, program, suite })
        .collect();
    let (samples, stats) = build_corpus(&seeds, 20, 42, 1).unwrap();
    assert_eq!(samples.len(), stats.kept as usize);
    assert!(
        stats.kept * 2 >= stats.executed,
        "under half the executed mutants were caught: {}/{}",
        stats.kept,
        stats.executed
    );
    // both diagnostic families must be represented
    assert!(samples.iter().any(|s| s.diagnostic.starts_with("[CE]")));
    assert!(samples.iter().any(|s| s.diagnostic.starts_with("[FE]")));
}

#[test]
fn handmade_bug_fixture_is_consistent() {
    let buggy =
        SourceProgram::from_file_text(&common::read_fixture("fixtures/bugs/swap3cycle/buggy.mini"));
    let fixed =
        SourceProgram::from_file_text(&common::read_fixture("fixtures/bugs/swap3cycle/fixed.mini"));
    let suite =
        TestSuite::from_json(&common::read_fixture("fixtures/bugs/swap3cycle/tests.json")).unwrap();

    let diags = check(&buggy);
    assert!(!diags.is_empty(), "buggy version must fail to compile");
    assert!(diags[0].render().starts_with("[CE]"));

    assert!(check(&fixed).is_empty());
    let report = run_suite(&fixed, &suite, DEFAULT_STEP_BUDGET);
    assert_eq!(report.failing, 0, "fixed version must pass the suite");
}

#[test]
fn ast_dump_matches_golden_snapshot() {
    let program =
        SourceProgram::from_file_text(&common::read_fixture("fixtures/programs/triangle.mini"));
    let dump = ast_sexpr(program.ast().unwrap());
    let golden_path = common::fixture("fixtures/golden/triangle.sexpr");
    if std::env::var("REGEN_GOLDEN").is_ok() {
        std::fs::write(&golden_path, &dump).unwrap();
    }
    let golden = std::fs::read_to_string(&golden_path).expect(
        "missing golden AST dump; run with REGEN_GOLDEN=1 once to create it",
    );
    assert_eq!(dump, golden, "AST dump drifted from the golden snapshot");
}
