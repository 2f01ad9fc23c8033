//! Self-supervised bug injection. Correct seed programs are perturbed into
//! buggy variants, executed, and only variants that produce a compile error
//! or a test failure are kept as (buggy, fixed) training pairs.

use crate::check::{self, first_ce_location};
use crate::edit::{
    binop_alternatives, expr_variants, function_at_line, indent_of, render_site_line,
    site_at_line, site_expr, site_stmt, stmt_with_expr, toggle_negation, LineEdit, LineSite,
};
use crate::exec::{render_fe_diagnostic, run_suite, TestSuite, DEFAULT_STEP_BUDGET};
use crate::lang::{executable_lines, Expr, SourceProgram, Stmt};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// The nine perturbation operators. Each one is invertible in principle by
/// some patch template, which is what makes the injected bugs repairable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PerturbOp {
    #[serde(rename = "replace-binop")]
    ReplaceBinop,
    #[serde(rename = "off-by-one-literal")]
    OffByOneLiteral,
    #[serde(rename = "wrong-variable")]
    WrongVariable,
    #[serde(rename = "negate-condition")]
    NegateCondition,
    #[serde(rename = "swap-call-args")]
    SwapCallArgs,
    #[serde(rename = "delete-statement")]
    DeleteStatement,
    #[serde(rename = "remove-delimiter")]
    RemoveDelimiter,
    #[serde(rename = "drop-else")]
    DropElse,
    #[serde(rename = "corrupt-keyword")]
    CorruptKeyword,
}

impl PerturbOp {
    pub const ALL: [PerturbOp; 9] = [
        PerturbOp::ReplaceBinop,
        PerturbOp::OffByOneLiteral,
        PerturbOp::WrongVariable,
        PerturbOp::NegateCondition,
        PerturbOp::SwapCallArgs,
        PerturbOp::DeleteStatement,
        PerturbOp::RemoveDelimiter,
        PerturbOp::DropElse,
        PerturbOp::CorruptKeyword,
    ];

    pub fn id(self) -> &'static str {
        match self {
            PerturbOp::ReplaceBinop => "replace-binop",
            PerturbOp::OffByOneLiteral => "off-by-one-literal",
            PerturbOp::WrongVariable => "wrong-variable",
            PerturbOp::NegateCondition => "negate-condition",
            PerturbOp::SwapCallArgs => "swap-call-args",
            PerturbOp::DeleteStatement => "delete-statement",
            PerturbOp::RemoveDelimiter => "remove-delimiter",
            PerturbOp::DropElse => "drop-else",
            PerturbOp::CorruptKeyword => "corrupt-keyword",
        }
    }
}

/// A candidate mutation before execution: the edit, where it applies, and
/// which operator produced it.
#[derive(Debug, Clone)]
pub struct Mutant {
    pub op: PerturbOp,
    pub site_line: u32,
    pub edit: LineEdit,
}

impl Mutant {
    pub fn apply(&self, source: &SourceProgram) -> SourceProgram {
        SourceProgram::new(&self.edit.apply(source))
    }
}

/// One kept training pair. `fixed` is the original seed program; the sample
/// invariants (CE iff diagnostics, FE iff clean but failing) hold under
/// re-execution. `op_2`/`site_line_2` are present only for two-location bugs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorpusSample {
    pub id: String,
    pub program: String,
    pub op: PerturbOp,
    pub site_line: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub op_2: Option<PerturbOp>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub site_line_2: Option<u32>,
    pub diag_kind: DiagKind,
    pub diagnostic: String,
    pub buggy: String,
    pub fixed: String,
    pub suite: TestSuite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DiagKind {
    CE,
    FE,
}

/// How a candidate source behaves against a suite: compile error, functional
/// error, or indistinguishable from correct.
#[derive(Debug, Clone)]
pub enum Verdict {
    Ce { line: u32, diagnostic: String },
    Fe { failing: u32, diagnostic: String },
    Pass,
}

pub fn classify(program: &SourceProgram, suite: &TestSuite) -> Verdict {
    let diags = check::check(program);
    if !diags.is_empty() {
        let line = first_ce_location(&diags, program.line_count());
        return Verdict::Ce { line, diagnostic: diags[0].render() };
    }
    let report = run_suite(program, suite, DEFAULT_STEP_BUDGET);
    if report.failing > 0 {
        Verdict::Fe { failing: report.failing, diagnostic: render_fe_diagnostic(&report) }
    } else {
        Verdict::Pass
    }
}

/// All mutation sites for `op` in a check-clean program, ordered by line then
/// by position within the line. Inapplicable operators yield an empty list.
pub fn perturb_sites(program: &SourceProgram, op: PerturbOp) -> Vec<Mutant> {
    match op {
        PerturbOp::RemoveDelimiter => remove_delimiter_sites(program),
        PerturbOp::CorruptKeyword => corrupt_keyword_sites(program),
        _ => ast_sites(program, op),
    }
}

fn ast_sites(program: &SourceProgram, op: PerturbOp) -> Vec<Mutant> {
    let Some(ast) = program.ast() else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for line in executable_lines(ast) {
        let Some(f) = function_at_line(program, line) else { continue };
        let Some(site) = site_at_line(f, line) else { continue };
        match op {
            PerturbOp::ReplaceBinop | PerturbOp::OffByOneLiteral | PerturbOp::SwapCallArgs => {
                let mut alt = |e: &Expr| expr_alternatives(op, e);
                for v in expr_variants(site_expr(&site), &mut alt) {
                    out.push(line_mutant(program, op, line, &site, v));
                }
            }
            PerturbOp::WrongVariable => {
                let vars = check::in_scope_vars(program, line);
                let mut alt = |e: &Expr| match e {
                    Expr::Var(name, span) => vars
                        .iter()
                        .filter(|(n, _)| n != name)
                        .map(|(n, _)| Expr::Var(n.clone(), *span))
                        .collect(),
                    _ => Vec::new(),
                };
                for v in expr_variants(site_expr(&site), &mut alt) {
                    out.push(line_mutant(program, op, line, &site, v));
                }
            }
            PerturbOp::NegateCondition => {
                if matches!(site, LineSite::IfHeader(_) | LineSite::WhileHeader(_)) {
                    let v = toggle_negation(site_expr(&site));
                    out.push(line_mutant(program, op, line, &site, v));
                }
            }
            PerturbOp::DeleteStatement => {
                if matches!(site, LineSite::Simple(_)) {
                    out.push(Mutant {
                        op,
                        site_line: line,
                        edit: LineEdit { start_line: line, end_line: line, replacement: vec![] },
                    });
                }
            }
            PerturbOp::DropElse => {
                if let LineSite::IfHeader(Stmt::If {
                    then_body,
                    else_body: Some(eb),
                    span,
                    ..
                }) = site
                {
                    if let (Some(last_then), Some(_)) = (then_body.last(), eb.first()) {
                        // `} else {` sits right after the then-branch.
                        let else_line = last_then.span().end_line + 1;
                        out.push(Mutant {
                            op,
                            site_line: line,
                            edit: LineEdit {
                                start_line: else_line,
                                end_line: span.end_line,
                                replacement: vec![format!("{}}}", indent_of(program, line))],
                            },
                        });
                    }
                }
            }
            PerturbOp::RemoveDelimiter | PerturbOp::CorruptKeyword => unreachable!(),
        }
    }
    out
}

fn expr_alternatives(op: PerturbOp, e: &Expr) -> Vec<Expr> {
    match (op, e) {
        (PerturbOp::ReplaceBinop, Expr::Binary { op: b, lhs, rhs, span }) => {
            binop_alternatives(*b)
                .into_iter()
                .map(|nb| Expr::Binary {
                    op: nb,
                    lhs: lhs.clone(),
                    rhs: rhs.clone(),
                    span: *span,
                })
                .collect()
        }
        (PerturbOp::OffByOneLiteral, Expr::Int(n, span)) => {
            vec![
                Expr::Int(n.wrapping_add(1), *span),
                Expr::Int(n.wrapping_sub(1), *span),
            ]
        }
        (PerturbOp::SwapCallArgs, Expr::Call { name, args, span }) if args.len() >= 2 => {
            let mut out = Vec::new();
            for i in 0..args.len() {
                for j in i + 1..args.len() {
                    let mut a = args.clone();
                    a.swap(i, j);
                    out.push(Expr::Call { name: name.clone(), args: a, span: *span });
                }
            }
            out
        }
        _ => Vec::new(),
    }
}

fn line_mutant(
    program: &SourceProgram,
    op: PerturbOp,
    line: u32,
    site: &LineSite<'_>,
    new_expr: Expr,
) -> Mutant {
    let stmt = stmt_with_expr(site_stmt(site), new_expr);
    Mutant {
        op,
        site_line: line,
        edit: LineEdit::replace_line(line, render_site_line(program, line, &stmt)),
    }
}

fn remove_delimiter_sites(program: &SourceProgram) -> Vec<Mutant> {
    let mut out = Vec::new();
    for (idx, text) in program.lines().iter().enumerate() {
        let line = idx as u32 + 1;
        for (col, ch) in text.char_indices() {
            if matches!(ch, '{' | '}' | '(' | ')' | ';') {
                let mut t = text.to_string();
                t.remove(col);
                out.push(Mutant {
                    op: PerturbOp::RemoveDelimiter,
                    site_line: line,
                    edit: LineEdit::replace_line(line, t),
                });
            }
        }
    }
    out
}

const KEYWORDS: [&str; 10] =
    ["fn", "let", "if", "else", "while", "return", "true", "false", "int", "bool"];

fn corrupt_keyword_sites(program: &SourceProgram) -> Vec<Mutant> {
    let mut out = Vec::new();
    for (idx, text) in program.lines().iter().enumerate() {
        let line = idx as u32 + 1;
        let words: Vec<(usize, &str)> = split_words(text);
        for (col, w) in words {
            if KEYWORDS.contains(&w) {
                // Drop the keyword's last character: a classic typo that
                // turns it into an identifier or garbage.
                let mut t = String::with_capacity(text.len());
                t.push_str(&text[..col]);
                t.push_str(&w[..w.len() - 1]);
                t.push_str(&text[col + w.len()..]);
                out.push(Mutant {
                    op: PerturbOp::CorruptKeyword,
                    site_line: line,
                    edit: LineEdit::replace_line(line, t),
                });
            }
        }
    }
    out
}

fn split_words(text: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i].is_ascii_alphabetic() || bytes[i] == b'_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, &text[start..i]));
        } else {
            i += 1;
        }
    }
    out
}

/// A named seed program paired with the suite it must pass.
#[derive(Debug, Clone)]
pub struct SeedProgram {
    pub name: String,
    pub program: SourceProgram,
    pub suite: TestSuite,
}

#[derive(Debug, Clone)]
pub struct CorpusStats {
    pub executed: u32,
    pub kept: u32,
}

/// Builds the training corpus. Mutants are sampled per seed program with a
/// seeded RNG, executed, and kept only when they produce a CE or FE; the
/// output is re-sorted by (program, op, site) so the file is byte-stable.
/// With `locations == 2`, pairs of single-line FE perturbations are composed
/// instead; each pair member's reversion must strictly reduce failing tests.
pub fn build_corpus(
    seeds: &[SeedProgram],
    per_program: usize,
    seed: u64,
    locations: u32,
) -> Result<(Vec<CorpusSample>, CorpusStats), String> {
    let mut ordered: Vec<&SeedProgram> = seeds.iter().collect();
    ordered.sort_by(|a, b| a.name.cmp(&b.name));
    for s in &ordered {
        if !check::check(&s.program).is_empty() {
            return Err(format!("seed program {} does not compile", s.name));
        }
        let report = run_suite(&s.program, &s.suite, DEFAULT_STEP_BUDGET);
        if report.failing > 0 {
            return Err(format!(
                "seed program {} fails its own suite ({} failing)",
                s.name, report.failing
            ));
        }
    }

    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut samples = Vec::new();
    let mut stats = CorpusStats { executed: 0, kept: 0 };
    for s in &ordered {
        if locations >= 2 {
            build_two_location(s, per_program, &mut rng, &mut samples, &mut stats);
        } else {
            build_single(s, per_program, &mut rng, &mut samples, &mut stats);
        }
    }
    samples.sort_by(|a, b| {
        (&a.program, a.op, a.site_line, a.op_2, a.site_line_2, &a.buggy).cmp(&(
            &b.program, b.op, b.site_line, b.op_2, b.site_line_2, &b.buggy,
        ))
    });
    for (i, s) in samples.iter_mut().enumerate() {
        s.id = format!("{}-{:04}", s.program, i);
    }
    Ok((samples, stats))
}

fn build_single(
    seed: &SeedProgram,
    per_program: usize,
    rng: &mut ChaCha20Rng,
    samples: &mut Vec<CorpusSample>,
    stats: &mut CorpusStats,
) {
    let mut candidates: Vec<Mutant> = PerturbOp::ALL
        .iter()
        .flat_map(|&op| perturb_sites(&seed.program, op))
        .collect();
    candidates.shuffle(rng);
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut kept = 0usize;
    for m in candidates {
        if kept >= per_program {
            break;
        }
        let buggy = m.apply(&seed.program);
        if buggy.text() == seed.program.text() || !seen.insert(buggy.text().to_string()) {
            continue;
        }
        stats.executed += 1;
        let verdict = classify(&buggy, &seed.suite);
        let (diag_kind, diagnostic) = match verdict {
            Verdict::Ce { diagnostic, .. } => (DiagKind::CE, diagnostic),
            Verdict::Fe { diagnostic, .. } => (DiagKind::FE, diagnostic),
            Verdict::Pass => continue,
        };
        stats.kept += 1;
        kept += 1;
        samples.push(CorpusSample {
            id: String::new(),
            program: seed.name.clone(),
            op: m.op,
            site_line: m.site_line,
            op_2: None,
            site_line_2: None,
            diag_kind,
            diagnostic,
            buggy: buggy.text().to_string(),
            fixed: seed.program.text().to_string(),
            suite: seed.suite.clone(),
        });
    }
}

/// Two-location composition. Only single-line replacement mutants compose
/// (line numbering stays aligned), and both perturbations must land on
/// distinct lines. A pair is kept when the composite is an FE and reverting
/// either edit alone leaves strictly fewer failing tests — the per-location
/// failing-count signal the search relies on.
fn build_two_location(
    seed: &SeedProgram,
    per_program: usize,
    rng: &mut ChaCha20Rng,
    samples: &mut Vec<CorpusSample>,
    stats: &mut CorpusStats,
) {
    const PAIRABLE: [PerturbOp; 4] = [
        PerturbOp::ReplaceBinop,
        PerturbOp::OffByOneLiteral,
        PerturbOp::WrongVariable,
        PerturbOp::NegateCondition,
    ];
    // Singles that compile and fail some (not all-pass) tests, with their
    // failing counts; only these carry a usable reversion signal.
    let mut fe_singles: Vec<(Mutant, u32)> = Vec::new();
    for &op in &PAIRABLE {
        for m in perturb_sites(&seed.program, op) {
            if m.edit.replacement.len() != 1 || m.edit.start_line != m.edit.end_line {
                continue;
            }
            let buggy = m.apply(&seed.program);
            if buggy.text() == seed.program.text() {
                continue;
            }
            if let Verdict::Fe { failing, .. } = classify(&buggy, &seed.suite) {
                fe_singles.push((m, failing));
            }
        }
    }
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for i in 0..fe_singles.len() {
        for j in i + 1..fe_singles.len() {
            if fe_singles[i].0.site_line != fe_singles[j].0.site_line {
                pairs.push((i, j));
            }
        }
    }
    pairs.shuffle(rng);
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut kept = 0usize;
    for (i, j) in pairs {
        if kept >= per_program {
            break;
        }
        let (a, fail_a) = &fe_singles[i];
        let (b, fail_b) = &fe_singles[j];
        let composite_text = b.edit.apply(&a.apply(&seed.program));
        let composite = SourceProgram::new(&composite_text);
        if !seen.insert(composite.text().to_string()) {
            continue;
        }
        stats.executed += 1;
        let Verdict::Fe { failing, diagnostic } = classify(&composite, &seed.suite) else {
            continue;
        };
        // Reverting either edit leaves just the other single perturbation.
        if *fail_a >= failing || *fail_b >= failing {
            continue;
        }
        stats.kept += 1;
        kept += 1;
        let (first, second) = if a.site_line <= b.site_line { (a, b) } else { (b, a) };
        samples.push(CorpusSample {
            id: String::new(),
            program: seed.name.clone(),
            op: first.op,
            site_line: first.site_line,
            op_2: Some(second.op),
            site_line_2: Some(second.site_line),
            diag_kind: DiagKind::FE,
            diagnostic,
            buggy: composite.text().to_string(),
            fixed: seed.program.text().to_string(),
            suite: seed.suite.clone(),
        });
    }
}

/// Serializes one sample per line (JSON Lines).
pub fn corpus_to_jsonl(samples: &[CorpusSample]) -> String {
    samples
        .iter()
        .map(|s| serde_json::to_string(s).expect("sample serializes"))
        .collect::<Vec<_>>()
        .join("\n")
}

pub fn corpus_from_jsonl(text: &str) -> Result<Vec<CorpusSample>, serde_json::Error> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(serde_json::from_str)
        .collect()
}
