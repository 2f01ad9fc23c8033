//! Unified diffs between source texts, used in plausible-patch reports.

use similar::TextDiff;

/// Unified diff (3 context lines) from `a` to `b`, with stable synthetic
/// headers so output is byte-deterministic.
pub fn unified(a: &str, b: &str) -> String {
    TextDiff::from_lines(a, b)
        .unified_diff()
        .context_radius(3)
        .header("before", "after")
        .to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_texts_diff_empty_body() {
        let d = unified("a\nb", "a\nb");
        assert!(!d.contains('@'), "no hunks expected: {d}");
    }

    #[test]
    fn single_line_change_is_one_hunk() {
        let d = unified("a\nb\nc", "a\nx\nc");
        assert!(d.contains("-b"));
        assert!(d.contains("+x"));
        assert!(d.starts_with("--- before\n+++ after\n"));
    }
}
