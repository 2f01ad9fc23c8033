//! Spectrum-based fault localization: per-line coverage spectra from a
//! TestReport, ranked by Ochiai suspiciousness. The engine re-invokes this
//! whenever a partial patch reduces the failing-test count.

use crate::exec::{TestReport, TestStatus};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// Per-line execution counts against the pass/fail split of the suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LineSpectrum {
    /// Failing tests covering the line.
    pub e_f: u32,
    /// Passing tests covering the line.
    pub e_p: u32,
    /// Failing tests not covering the line.
    pub n_f: u32,
    /// Passing tests not covering the line.
    pub n_p: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub lines: BTreeMap<u32, LineSpectrum>,
    pub total_failing: u32,
    pub total_passing: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuspiciousLocation {
    pub line: u32,
    pub score: f64,
    pub rank: u32,
}

/// Builds the spectrum over the given executable lines. Coverage sets in the
/// report must be subsets of `executable`.
pub fn build_spectrum(report: &TestReport, executable: &BTreeSet<u32>) -> Spectrum {
    let total_failing = report.failing;
    let total_passing = report.passing();
    let mut lines = BTreeMap::new();
    for &line in executable {
        let mut s = LineSpectrum::default();
        for t in &report.tests {
            let covered = t.coverage.contains(&line);
            let failed = t.outcome.status != TestStatus::Pass;
            match (covered, failed) {
                (true, true) => s.e_f += 1,
                (true, false) => s.e_p += 1,
                (false, true) => s.n_f += 1,
                (false, false) => s.n_p += 1,
            }
        }
        lines.insert(line, s);
    }
    Spectrum { lines, total_failing, total_passing }
}

/// Ochiai suspiciousness: e_f / sqrt(total_failing * (e_f + e_p)).
/// Zero when the denominator is zero or no failing test covers the line.
pub fn ochiai(e_f: u32, e_p: u32, total_failing: u32) -> f64 {
    debug_assert!(e_f <= total_failing);
    let denom = (total_failing as f64 * (e_f + e_p) as f64).sqrt();
    if denom == 0.0 || e_f == 0 {
        0.0
    } else {
        e_f as f64 / denom
    }
}

/// Ranked list L of suspicious locations: at most `top_n` lines with score
/// greater than zero, scores non-increasing, ties broken by ascending line.
/// Requires at least one failing test.
pub fn rank(report: &TestReport, executable: &BTreeSet<u32>, top_n: usize) -> Vec<SuspiciousLocation> {
    assert!(report.failing > 0, "fault localization requires a failing test");
    let spectrum = build_spectrum(report, executable);
    let mut scored: Vec<(u32, f64)> = spectrum
        .lines
        .iter()
        .map(|(&line, s)| (line, ochiai(s.e_f, s.e_p, spectrum.total_failing)))
        .filter(|&(_, score)| score > 0.0)
        .collect();
    scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    scored
        .into_iter()
        .take(top_n)
        .enumerate()
        .map(|(i, (line, score))| SuspiciousLocation { line, score, rank: i as u32 + 1 })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::{TestOutcome, TestResult};

    fn report(tests: Vec<(&str, bool, Vec<u32>)>) -> TestReport {
        let failing = tests.iter().filter(|(_, pass, _)| !pass).count() as u32;
        TestReport {
            tests: tests
                .into_iter()
                .map(|(name, pass, cov)| TestResult {
                    name: name.into(),
                    outcome: TestOutcome {
                        status: if pass { TestStatus::Pass } else { TestStatus::Fail },
                        detail: String::new(),
                    },
                    coverage: cov.into_iter().collect(),
                })
                .collect(),
            failing,
        }
    }

    #[test]
    fn sole_failing_test_single_line() {
        let r = report(vec![("t", false, vec![4])]);
        let exec: BTreeSet<u32> = [4].into_iter().collect();
        let s = build_spectrum(&r, &exec);
        assert_eq!(s.lines[&4], LineSpectrum { e_f: 1, e_p: 0, n_f: 0, n_p: 0 });
        let l = rank(&r, &exec, 50);
        assert_eq!(l.len(), 1);
        assert_eq!(l[0].line, 4);
        assert_eq!(l[0].score, 1.0);
        assert_eq!(l[0].rank, 1);
    }

    #[test]
    fn uncovered_line_scores_zero_and_is_excluded() {
        let r = report(vec![("t", false, vec![2])]);
        let exec: BTreeSet<u32> = [2, 3].into_iter().collect();
        let s = build_spectrum(&r, &exec);
        assert_eq!(s.lines[&3].e_f, 0);
        assert_eq!(s.lines[&3].e_p, 0);
        let l = rank(&r, &exec, 50);
        assert!(l.iter().all(|s| s.line != 3));
    }

    #[test]
    fn ochiai_known_value() {
        // e_f=2, e_p=2, total failing 2 -> 2 / sqrt(2 * 4)
        let got = ochiai(2, 2, 2);
        assert!((got - 2.0 / (8.0f64).sqrt()).abs() < 1e-12);
        assert!((got - 0.7071067811865475).abs() < 1e-9);
    }

    #[test]
    fn ochiai_edge_cases() {
        assert_eq!(ochiai(0, 5, 3), 0.0);
        assert_eq!(ochiai(0, 0, 0), 0.0);
        assert_eq!(ochiai(1, 0, 1), 1.0);
    }

    #[test]
    fn golden_spectrum_three_tests_five_lines() {
        // t1 fail covers {1,2,3}; t2 pass covers {2,3,4}; t3 pass covers {3,5}.
        let r = report(vec![
            ("t1", false, vec![1, 2, 3]),
            ("t2", true, vec![2, 3, 4]),
            ("t3", true, vec![3, 5]),
        ]);
        let exec: BTreeSet<u32> = (1..=5).collect();
        let s = build_spectrum(&r, &exec);
        assert_eq!(s.lines[&1], LineSpectrum { e_f: 1, e_p: 0, n_f: 0, n_p: 2 });
        assert_eq!(s.lines[&2], LineSpectrum { e_f: 1, e_p: 1, n_f: 0, n_p: 1 });
        assert_eq!(s.lines[&3], LineSpectrum { e_f: 1, e_p: 2, n_f: 0, n_p: 0 });
        assert_eq!(s.lines[&4], LineSpectrum { e_f: 0, e_p: 1, n_f: 1, n_p: 1 });
        assert_eq!(s.lines[&5], LineSpectrum { e_f: 0, e_p: 1, n_f: 1, n_p: 1 });
        let l = rank(&r, &exec, 50);
        let lines: Vec<u32> = l.iter().map(|s| s.line).collect();
        assert_eq!(lines, vec![1, 2, 3]);
    }

    #[test]
    fn ranks_are_contiguous_and_scores_non_increasing() {
        let r = report(vec![
            ("t1", false, vec![1, 2]),
            ("t2", false, vec![2, 3]),
            ("t3", true, vec![3]),
        ]);
        let exec: BTreeSet<u32> = (1..=3).collect();
        let l = rank(&r, &exec, 50);
        for (i, s) in l.iter().enumerate() {
            assert_eq!(s.rank, i as u32 + 1);
            if i > 0 {
                assert!(l[i - 1].score >= s.score);
            }
        }
    }
}
