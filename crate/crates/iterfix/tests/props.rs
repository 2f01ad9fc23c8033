//! Property-based invariants: printer fixpoint, line-edit locality, ranking
//! agreement with a brute-force oracle, and total (non-panicking) front ends.

mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use iterfix::check::check;
use iterfix::exec::{TestOutcome, TestReport, TestResult, TestStatus};
use iterfix::faultloc::rank;
use iterfix::lang::{parse, print_ast, SourceProgram};

#[test]
fn printer_is_a_fixpoint_on_canonical_sources() {
    for (name, program, _) in common::seed_programs() {
        let ast = program.ast().unwrap();
        let printed = print_ast(ast);
        let reparsed = parse(&printed).unwrap_or_else(|e| panic!("{name}: reprint must parse: {e:?}"));
        assert_eq!(
            reparsed.erased(),
            ast.erased(),
            "{name}: printing must preserve structure"
        );
        assert_eq!(print_ast(&reparsed), printed, "{name}: printing must be idempotent");
    }
}

/// Brute-force report builder for the ranking oracle below.
fn synth_report(
    statuses: &[bool],
    coverage: &[Vec<u32>],
) -> TestReport {
    let tests: Vec<TestResult> = statuses
        .iter()
        .zip(coverage)
        .enumerate()
        .map(|(i, (&pass, cov))| TestResult {
            name: format!("t{i}"),
            outcome: TestOutcome {
                status: if pass { TestStatus::Pass } else { TestStatus::Fail },
                detail: String::new(),
            },
            coverage: cov.iter().copied().collect(),
        })
        .collect();
    let failing = statuses.iter().filter(|&&p| !p).count() as u32;
    TestReport { tests, failing }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    /// Ranking agrees with a from-scratch reimplementation of the similarity
    /// score plus the documented ordering rules.
    #[test]
    fn ranking_matches_brute_force(
        statuses in proptest::collection::vec(any::<bool>(), 1..10),
        coverage in proptest::collection::vec(
            proptest::collection::vec(1u32..30, 0..12),
            1..10,
        ),
    ) {
        let n = statuses.len().min(coverage.len());
        let statuses = &statuses[..n];
        let coverage = &coverage[..n];
        prop_assume!(statuses.iter().any(|&p| !p));

        let report = synth_report(statuses, coverage);
        let executable: BTreeSet<u32> = (1..30).collect();
        let got = rank(&report, &executable, 50);

        // independent oracle
        let total_failing = statuses.iter().filter(|&&p| !p).count() as f64;
        let mut scored: Vec<(u32, f64)> = executable
            .iter()
            .map(|&line| {
                let e_f = statuses
                    .iter()
                    .zip(coverage)
                    .filter(|(&p, cov)| !p && cov.contains(&line))
                    .count() as f64;
                let e_p = statuses
                    .iter()
                    .zip(coverage)
                    .filter(|(&p, cov)| p && cov.contains(&line))
                    .count() as f64;
                let denom = (total_failing * (e_f + e_p)).sqrt();
                let score = if denom == 0.0 { 0.0 } else { e_f / denom };
                (line, score)
            })
            .filter(|&(_, s)| s > 0.0)
            .collect();
        scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));

        prop_assert_eq!(got.len(), scored.len());
        for (i, (g, (line, score))) in got.iter().zip(&scored).enumerate() {
            prop_assert_eq!(g.line, *line, "rank {} line mismatch", i + 1);
            prop_assert!((g.score - score).abs() < 1e-9);
            prop_assert_eq!(g.rank as usize, i + 1);
        }
    }

    /// Replacing one line leaves every other line untouched, and restoring
    /// the original text round-trips.
    #[test]
    fn single_line_edit_is_local_and_reversible(
        lines in proptest::collection::vec("[ -~]{0,20}", 1..15),
        target in 0usize..15,
        replacement in "[ -~]{0,20}",
    ) {
        prop_assume!(target < lines.len());
        let original = lines.join("\n");
        // a lone empty string joins to the empty text, which has zero lines
        prop_assume!(!original.is_empty());
        let program = SourceProgram::new(original.clone());
        let line_no = (target + 1) as u32;
        let edit = iterfix::edit::LineEdit::replace_line(line_no, replacement.clone());
        let edited_text = edit.apply(&program);
        let edited = SourceProgram::new(edited_text);
        prop_assert_eq!(edited.line_count() as usize, lines.len());
        for (i, l) in lines.iter().enumerate() {
            let got = edited.line((i + 1) as u32).unwrap();
            if i == target {
                prop_assert_eq!(got, replacement.as_str());
            } else {
                prop_assert_eq!(got, l.as_str());
            }
        }
        let undo = iterfix::edit::LineEdit::replace_line(line_no, lines[target].clone());
        prop_assert_eq!(undo.apply(&edited), original);
    }

    /// The front end is total: arbitrary text never panics the parser or the
    /// checker, at worst it produces diagnostics.
    #[test]
    fn parse_and_check_never_panic(text in "\\PC{0,300}") {
        let program = SourceProgram::new(text);
        if program.ast().is_some() {
            let _ = check(&program);
        } else {
            prop_assert!(program.parse_failure().is_some());
        }
    }
}
