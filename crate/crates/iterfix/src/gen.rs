//! Patch generation. A template catalog instantiates candidate edits at a
//! target line; a count-based model learned from the corpus ranks them; the
//! iterative-training loop augments the corpus with the generator's own
//! executed outputs so later models learn to repair earlier mistakes.

use crate::check;
use crate::edit::{
    binop_alternatives, expr_variants, function_at_line, indent_of, render_site_line,
    site_at_line, site_expr, site_stmt, stmt_with_expr, toggle_negation, LineEdit, LineSite,
};
use crate::lang::{print_expr, token_eq, token_key, Expr, SourceProgram, Stmt, Type};
use crate::perturb::{classify, CorpusSample, DiagKind, Verdict};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

pub const SMOOTHING: f64 = 0.1;

/// Coarse diagnostic class a model weight is keyed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum DiagClass {
    ParseError,
    UndefinedVariable,
    TypeMismatch,
    ArityMismatch,
    OtherCe,
    FeAssertFail,
    FeRuntimeError,
    FeTimeout,
}

impl DiagClass {
    pub fn id(self) -> &'static str {
        match self {
            DiagClass::ParseError => "parse-error",
            DiagClass::UndefinedVariable => "undefined-variable",
            DiagClass::TypeMismatch => "type-mismatch",
            DiagClass::ArityMismatch => "arity-mismatch",
            DiagClass::OtherCe => "other-ce",
            DiagClass::FeAssertFail => "fe-assert-fail",
            DiagClass::FeRuntimeError => "fe-runtime-error",
            DiagClass::FeTimeout => "fe-timeout",
        }
    }

    /// Classifies a rendered diagnostic string by its prefix and failure verb.
    pub fn of(diagnostic: &str) -> DiagClass {
        if diagnostic.starts_with("[CE]") {
            if diagnostic.contains(": parse-error:") {
                DiagClass::ParseError
            } else if diagnostic.contains(": undefined-variable:") {
                DiagClass::UndefinedVariable
            } else if diagnostic.contains(": type-mismatch:") {
                DiagClass::TypeMismatch
            } else if diagnostic.contains(": arity-mismatch:") {
                DiagClass::ArityMismatch
            } else {
                DiagClass::OtherCe
            }
        } else if diagnostic.contains(" timed out") {
            DiagClass::FeTimeout
        } else if diagnostic.contains(" runtime error: ") {
            DiagClass::FeRuntimeError
        } else {
            DiagClass::FeAssertFail
        }
    }
}

/// Everything a template sees when instantiating at one line.
#[derive(Debug, Clone)]
pub struct RepairContext {
    pub source: SourceProgram,
    pub target_line: u32,
    pub diagnostic: String,
    pub context_window: Vec<String>,
    pub in_scope_vars: Vec<(String, Type)>,
}

pub fn make_context(source: &SourceProgram, target_line: u32, diagnostic: &str) -> RepairContext {
    let line = target_line.clamp(1, source.line_count().max(1));
    let lo = line.saturating_sub(5).max(1);
    let hi = (line + 5).min(source.line_count());
    let window = (lo..=hi)
        .filter_map(|l| source.line(l).map(str::to_string))
        .collect();
    RepairContext {
        source: SourceProgram::new(source.text()),
        target_line: line,
        diagnostic: diagnostic.to_string(),
        context_window: window,
        in_scope_vars: check::in_scope_vars(source, line),
    }
}

/// One ranked edit proposal. Replacing lines [start_line, end_line] with
/// `replacement` (empty = deletion); start == end == length+1 is a pure
/// insertion at end of file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CandidatePatch {
    pub start_line: u32,
    pub end_line: u32,
    pub replacement: Vec<String>,
    pub template_id: String,
    pub score: f64,
    pub beam_rank: u32,
}

/// Frequency model: (diag-class, template) pairs seen fixing training
/// samples. Missing keys fall back to the smoothing constant so untrained
/// templates stay reachable.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GeneratorModel {
    pub weights: BTreeMap<String, f64>,
}

impl GeneratorModel {
    pub fn weight(&self, dc: DiagClass, template_id: &str) -> f64 {
        let key = format!("{}|{}", dc.id(), template_id);
        *self.weights.get(&key).unwrap_or(&SMOOTHING)
    }

    pub fn bump(&mut self, dc: DiagClass, template_id: &str) {
        let key = format!("{}|{}", dc.id(), template_id);
        let w = self.weights.entry(key).or_insert(SMOOTHING);
        *w += 1.0;
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<GeneratorModel, serde_json::Error> {
        serde_json::from_str(text)
    }
}

pub fn apply_patch(source: &SourceProgram, patch: &CandidatePatch) -> SourceProgram {
    let n = source.line_count();
    assert!(
        patch.start_line >= 1
            && patch.start_line <= patch.end_line
            && patch.end_line <= n + 1
            && (patch.start_line <= n || patch.start_line == patch.end_line),
        "patch range {}..{} invalid for {n}-line source",
        patch.start_line,
        patch.end_line
    );
    let edit = LineEdit {
        start_line: patch.start_line,
        end_line: patch.end_line,
        replacement: patch.replacement.clone(),
    };
    SourceProgram::new(&edit.apply(source))
}

/// All template instantiations at the context's target line, unranked.
/// Text-level templates fire on compile-error contexts (they work even when
/// the source cannot parse); statement-level templates fire whenever the
/// target line parses as part of a statement, including type-error contexts.
pub fn enumerate_candidates(ctx: &RepairContext) -> Vec<CandidatePatch> {
    let mut out = Vec::new();
    if ctx.diagnostic.starts_with("[CE]") {
        text_templates(ctx, &mut out);
    }
    if ctx.source.ast().is_some() {
        stmt_templates(ctx, &mut out);
    }
    out
}

/// Ranks candidates under the model and keeps the top k. Candidates whose
/// application reproduces the input text are dropped.
pub fn generate(model: &GeneratorModel, ctx: &RepairContext, k: usize) -> Vec<CandidatePatch> {
    assert!(k >= 1);
    let dc = DiagClass::of(&ctx.diagnostic);
    let mut scored: Vec<CandidatePatch> = enumerate_candidates(ctx)
        .into_iter()
        .filter(|c| apply_patch(&ctx.source, c).text() != ctx.source.text())
        .map(|mut c| {
            c.score = model.weight(dc, &c.template_id);
            c
        })
        .collect();
    scored.sort_by(|a, b| {
        b.score
            .partial_cmp(&a.score)
            .unwrap()
            .then_with(|| a.template_id.cmp(&b.template_id))
            .then_with(|| a.start_line.cmp(&b.start_line))
            .then_with(|| a.replacement.cmp(&b.replacement))
    });
    scored.truncate(k);
    for (i, c) in scored.iter_mut().enumerate() {
        c.beam_rank = i as u32 + 1;
    }
    scored
}

fn patch(line: u32, replacement: Vec<String>, template_id: &str) -> CandidatePatch {
    CandidatePatch {
        start_line: line,
        end_line: line,
        replacement,
        template_id: template_id.to_string(),
        score: 0.0,
        beam_rank: 0,
    }
}

// ---- text-level templates (usable on unparseable sources) ----

fn text_templates(ctx: &RepairContext, out: &mut Vec<CandidatePatch>) {
    let line = ctx.target_line;
    let Some(text) = ctx.source.line(line) else { return };

    // insert-missing-delimiter: append a closer to the line, or add a
    // standalone closing-brace line after it.
    for d in ["}", ")", ";"] {
        out.push(patch(line, vec![format!("{text}{d}")], "insert-missing-delimiter"));
    }
    out.push(patch(
        line,
        vec![text.to_string(), "}".to_string()],
        "insert-missing-delimiter",
    ));

    // insert-semicolon
    out.push(patch(line, vec![format!("{text};")], "insert-semicolon"));

    // delete-stray-token: drop each lexical chunk of the line.
    for (start, end) in segment_line(text) {
        let mut t = String::with_capacity(text.len());
        t.push_str(text[..start].trim_end());
        if !t.is_empty() && !text[end..].trim_start().is_empty() {
            t.push(' ');
        }
        t.push_str(text[end..].trim_start());
        let t = format!("{}{}", indent_of(&ctx.source, line), t);
        out.push(patch(line, vec![t], "delete-stray-token"));
    }

    // rename-to-nearest-declared: swap a word for a known name within edit
    // distance 2. Keywords count as known so typo'd keywords are reachable.
    let mut vocab: BTreeSet<String> = ctx
        .source
        .lines()
        .iter()
        .flat_map(|l| words_of(l))
        .map(str::to_string)
        .collect();
    for kw in ["fn", "let", "if", "else", "while", "return", "true", "false", "int", "bool"] {
        vocab.insert(kw.to_string());
    }
    for (start, w) in words_with_offsets(text) {
        for v in &vocab {
            if v != w && levenshtein(w, v) <= 2 {
                let t = format!("{}{}{}", &text[..start], v, &text[start + w.len()..]);
                out.push(patch(line, vec![t], "rename-to-nearest-declared"));
            }
        }
    }
}

// ---- statement-level templates (need a parsed site) ----

fn stmt_templates(ctx: &RepairContext, out: &mut Vec<CandidatePatch>) {
    let line = ctx.target_line;
    let Some(f) = function_at_line(&ctx.source, line) else { return };
    let Some(site) = site_at_line(f, line) else { return };
    let expr = site_expr(&site);
    let stmt = site_stmt(&site);
    let one = |ctx: &RepairContext, e: Expr, id: &str| {
        let s = stmt_with_expr(stmt, e);
        patch(line, vec![render_site_line(&ctx.source, line, &s)], id)
    };

    for v in expr_variants(expr, &mut |e| match e {
        Expr::Binary { op, lhs, rhs, span } => binop_alternatives(*op)
            .into_iter()
            .map(|nb| Expr::Binary { op: nb, lhs: lhs.clone(), rhs: rhs.clone(), span: *span })
            .collect(),
        _ => Vec::new(),
    }) {
        out.push(one(ctx, v, "replace-binop"));
    }

    for v in expr_variants(expr, &mut |e| match e {
        Expr::Int(n, span) => vec![
            Expr::Int(n.wrapping_add(1), *span),
            Expr::Int(n.wrapping_sub(1), *span),
        ],
        _ => Vec::new(),
    }) {
        out.push(one(ctx, v, "off-by-one-literal"));
    }

    // replace-variable: same-type in-scope alternatives only.
    let vars = &ctx.in_scope_vars;
    for v in expr_variants(expr, &mut |e| match e {
        Expr::Var(name, span) => {
            let ty = vars.iter().find(|(n, _)| n == name).map(|(_, t)| *t);
            vars.iter()
                .filter(|(n, t)| n != name && Some(*t) == ty)
                .map(|(n, _)| Expr::Var(n.clone(), *span))
                .collect()
        }
        _ => Vec::new(),
    }) {
        out.push(one(ctx, v, "replace-variable"));
    }

    for v in expr_variants(expr, &mut |e| match e {
        Expr::Call { name, args, span } if args.len() >= 2 => {
            let mut vs = Vec::new();
            for i in 0..args.len() {
                for j in i + 1..args.len() {
                    let mut a = args.clone();
                    a.swap(i, j);
                    vs.push(Expr::Call { name: name.clone(), args: a, span: *span });
                }
            }
            vs
        }
        _ => Vec::new(),
    }) {
        out.push(one(ctx, v, "swap-call-args"));
    }

    if matches!(site, LineSite::IfHeader(_) | LineSite::WhileHeader(_)) {
        out.push(one(ctx, toggle_negation(expr), "negate-condition"));

        // widen/narrow: borrow boolean clauses from the rest of the function.
        let own = print_expr(expr);
        for clause in function_conditions(f) {
            if clause == own {
                continue;
            }
            let widened = format!("({own}) || ({clause})");
            let narrowed = format!("({own}) && ({clause})");
            out.push(header_patch(ctx, line, stmt, &widened, "widen-condition"));
            out.push(header_patch(ctx, line, stmt, &narrowed, "narrow-condition"));
        }
    }

    if matches!(site, LineSite::Simple(_)) {
        out.push(CandidatePatch {
            start_line: line,
            end_line: line,
            replacement: vec![],
            template_id: "delete-statement".to_string(),
            score: 0.0,
            beam_rank: 0,
        });
    }

    // insert-guard-return: short-circuit on a simple zero comparison of an
    // in-scope int before the target line.
    let pad = indent_of(&ctx.source, line);
    let default = match f.ret {
        Type::Int => "0",
        Type::Bool => "false",
    };
    let orig = ctx.source.line(line).unwrap_or("").to_string();
    for (name, ty) in vars {
        if *ty != Type::Int {
            continue;
        }
        for cond in [format!("{name} < 0"), format!("{name} == 0")] {
            out.push(patch(
                line,
                vec![
                    format!("{pad}if ({cond}) {{"),
                    format!("{pad}  return {default};"),
                    format!("{pad}}}"),
                    orig.clone(),
                ],
                "insert-guard-return",
            ));
        }
    }
}

fn header_patch(
    ctx: &RepairContext,
    line: u32,
    stmt: &Stmt,
    cond_text: &str,
    id: &str,
) -> CandidatePatch {
    let pad = indent_of(&ctx.source, line);
    let kw = if matches!(stmt, Stmt::While { .. }) { "while" } else { "if" };
    patch(line, vec![format!("{pad}{kw} ({cond_text}) {{")], id)
}

fn function_conditions(f: &crate::lang::FuncDecl) -> Vec<String> {
    fn walk(body: &[Stmt], out: &mut Vec<String>) {
        for s in body {
            match s {
                Stmt::If { cond, then_body, else_body, .. } => {
                    out.push(print_expr(cond));
                    walk(then_body, out);
                    if let Some(eb) = else_body {
                        walk(eb, out);
                    }
                }
                Stmt::While { cond, body, .. } => {
                    out.push(print_expr(cond));
                    walk(body, out);
                }
                _ => {}
            }
        }
    }
    let mut out = Vec::new();
    walk(&f.body, &mut out);
    out
}

// ---- small text utilities ----

fn segment_line(text: &str) -> Vec<(usize, usize)> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c == b' ' {
            i += 1;
        } else if c.is_ascii_alphanumeric() || c == b'_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, i));
        } else {
            let two = matches!(
                &bytes[i..(i + 2).min(bytes.len())],
                b"==" | b"!=" | b"<=" | b">=" | b"&&" | b"||" | b"->"
            );
            let end = if two { i + 2 } else { i + 1 };
            out.push((i, end));
            i = end;
        }
    }
    out
}

fn words_with_offsets(text: &str) -> Vec<(usize, &str)> {
    segment_line(text)
        .into_iter()
        .filter(|&(s, _)| {
            let c = text.as_bytes()[s];
            c.is_ascii_alphabetic() || c == b'_'
        })
        .map(|(s, e)| (s, &text[s..e]))
        .collect()
}

fn words_of(text: &str) -> Vec<&str> {
    words_with_offsets(text).into_iter().map(|(_, w)| w).collect()
}

fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for i in 1..=a.len() {
        cur[0] = i;
        for j in 1..=b.len() {
            let sub = prev[j - 1] + usize::from(a[i - 1] != b[j - 1]);
            cur[j] = sub.min(prev[j] + 1).min(cur[j - 1] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

// ---- training ----

/// Counts, per (diag-class, template), how many corpus samples some
/// instantiation of that template repairs outright (token-normalized match
/// against the sample's fixed source).
pub fn train_initial(corpus: &[CorpusSample]) -> Result<GeneratorModel, String> {
    if corpus.is_empty() {
        return Err("cannot train on an empty corpus".to_string());
    }
    let mut model = GeneratorModel::default();
    for sample in corpus {
        let buggy = SourceProgram::new(&sample.buggy);
        let ctx = make_context(&buggy, sample.site_line, &sample.diagnostic);
        let dc = DiagClass::of(&sample.diagnostic);
        let mut credited: BTreeSet<String> = BTreeSet::new();
        for c in enumerate_candidates(&ctx) {
            if credited.contains(&c.template_id) {
                continue;
            }
            let applied = apply_patch(&buggy, &c);
            if token_eq(applied.text(), &sample.fixed) {
                credited.insert(c.template_id.clone());
                model.bump(dc, &c.template_id);
            }
        }
    }
    Ok(model)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GrowthRow {
    pub iteration: u32,
    pub size: usize,
    pub added: usize,
}

/// Iterative training: the model proposes k variants of every buggy program
/// in S; variants that differ from both their source and their fix, and that
/// still compile-fail or test-fail, join S with their own executed
/// diagnostics; the model is retrained after each of exactly `max_iter`
/// passes.
pub fn iterative_train(
    initial: &[CorpusSample],
    k: usize,
    max_iter: u32,
) -> Result<(GeneratorModel, Vec<CorpusSample>, Vec<GrowthRow>), String> {
    let mut s: Vec<CorpusSample> = initial.to_vec();
    let mut seen: BTreeSet<(String, String)> = s
        .iter()
        .map(|x| (token_key(&x.buggy), token_key(&x.fixed)))
        .collect();
    let mut model = train_initial(&s)?;
    let mut rows = vec![GrowthRow { iteration: 0, size: s.len(), added: 0 }];

    for it in 1..=max_iter {
        let snapshot_len = s.len();
        let mut added = 0usize;
        for idx in 0..snapshot_len {
            let (buggy_text, fixed_text, site_line, diagnostic) = {
                let b = &s[idx];
                (b.buggy.clone(), b.fixed.clone(), b.site_line, b.diagnostic.clone())
            };
            let buggy = SourceProgram::new(&buggy_text);
            let ctx = make_context(&buggy, site_line, &diagnostic);
            for c in generate(&model, &ctx, k) {
                let v = apply_patch(&buggy, &c);
                if token_eq(v.text(), &buggy_text) || token_eq(v.text(), &fixed_text) {
                    continue;
                }
                let key = (token_key(v.text()), token_key(&fixed_text));
                if seen.contains(&key) {
                    continue;
                }
                let (diag_kind, diag) = match classify(&v, &s[idx].suite) {
                    Verdict::Ce { diagnostic, .. } => (DiagKind::CE, diagnostic),
                    Verdict::Fe { diagnostic, .. } => (DiagKind::FE, diagnostic),
                    Verdict::Pass => continue, // silently-passing variant
                };
                seen.insert(key);
                added += 1;
                let parent = &s[idx];
                let aug = CorpusSample {
                    id: format!("{}-aug{}-{}", parent.id, it, added),
                    program: parent.program.clone(),
                    op: parent.op,
                    site_line: c.start_line,
                    op_2: parent.op_2,
                    site_line_2: parent.site_line_2,
                    diag_kind,
                    diagnostic: diag,
                    buggy: v.text().to_string(),
                    fixed: fixed_text.clone(),
                    suite: parent.suite.clone(),
                };
                s.push(aug);
            }
        }
        model = train_initial(&s)?;
        rows.push(GrowthRow { iteration: it, size: s.len(), added });
    }
    Ok((model, s, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::TestSuite;
    use crate::perturb::{build_corpus, SeedProgram};

    const PROG: &str = "fn max2(a: int, b: int) -> int {\n  if (a < b) {\n    return b;\n  }\n  return a;\n}";

    fn suite() -> TestSuite {
        TestSuite::from_json(
            r#"{"tests": [
                {"name": "lt", "entry": "max2", "args": [1, 2], "expect": 2},
                {"name": "gt", "entry": "max2", "args": [5, 3], "expect": 5},
                {"name": "eq", "entry": "max2", "args": [4, 4], "expect": 4}
            ]}"#,
        )
        .unwrap()
    }

    fn fe_ctx(text: &str, line: u32) -> RepairContext {
        make_context(&SourceProgram::new(text), line, "[FE] 1/3 failing; test lt failed: expected 2, got 1")
    }

    #[test]
    fn diag_class_parsing() {
        assert_eq!(DiagClass::of("[CE] line 3: parse-error: expected '}'"), DiagClass::ParseError);
        assert_eq!(
            DiagClass::of("[CE] line 5: type-mismatch: argument 1 of g"),
            DiagClass::TypeMismatch
        );
        assert_eq!(
            DiagClass::of("[CE] line 2: missing-return: function f"),
            DiagClass::OtherCe
        );
        assert_eq!(
            DiagClass::of("[FE] 1/3 failing; test lt failed: expected 2, got 1"),
            DiagClass::FeAssertFail
        );
        assert_eq!(
            DiagClass::of("[FE] 3/3 failing; test lt runtime error: division by zero"),
            DiagClass::FeRuntimeError
        );
        assert_eq!(DiagClass::of("[FE] 1/3 failing; test lt timed out"), DiagClass::FeTimeout);
    }

    #[test]
    fn negate_and_widen_on_if_header() {
        let ctx = fe_ctx(PROG, 2);
        let cands = enumerate_candidates(&ctx);
        let negated = cands
            .iter()
            .find(|c| c.template_id == "negate-condition")
            .expect("negate-condition present");
        assert_eq!(negated.replacement, vec!["  if (!(a < b)) {".to_string()]);
        assert!(cands.iter().all(|c| c.template_id != "widen-condition"),
            "no other conditions in this function to borrow");
    }

    #[test]
    fn swap_call_args_all_pairs() {
        let text = "fn id(x: int) -> int {\n  return x;\n}\nfn f(a: int, b: int, c: int) -> int {\n  return g(a, b, c);\n}\nfn g(x: int, y: int, z: int) -> int {\n  return x;\n}";
        let ctx = fe_ctx(text, 5);
        let swaps: Vec<_> = enumerate_candidates(&ctx)
            .into_iter()
            .filter(|c| c.template_id == "swap-call-args")
            .collect();
        assert_eq!(swaps.len(), 3);
    }

    #[test]
    fn generate_respects_beam_and_tiebreak() {
        let ctx = fe_ctx(PROG, 2);
        let model = GeneratorModel::default();
        let got = generate(&model, &ctx, 2);
        assert_eq!(got.len(), 2);
        assert_eq!(got[0].beam_rank, 1);
        // all weights equal => lexicographic template order decides
        assert!(got[0].template_id <= got[1].template_id);
    }

    #[test]
    fn trained_weights_reorder_templates() {
        // Hand corpus: fe-assert-fail samples all fixed by replace-binop.
        let seeds = vec![SeedProgram {
            name: "max2".into(),
            program: SourceProgram::new(PROG),
            suite: suite(),
        }];
        let (corpus, _) = build_corpus(&seeds, 20, 42, 1).unwrap();
        let model = train_initial(&corpus).unwrap();
        let fe_binop = model.weight(DiagClass::FeAssertFail, "replace-binop");
        assert!(fe_binop > SMOOTHING, "comparison perturbations should be binop-revertible");
    }

    #[test]
    fn apply_patch_round_trip() {
        let p = SourceProgram::new(PROG);
        let c = CandidatePatch {
            start_line: 2,
            end_line: 2,
            replacement: vec!["  if (a <= b) {".into()],
            template_id: "replace-binop".into(),
            score: 0.0,
            beam_rank: 1,
        };
        let applied = apply_patch(&p, &c);
        assert_eq!(applied.line_count(), p.line_count());
        let undo = CandidatePatch {
            start_line: 2,
            end_line: 2,
            replacement: vec![p.line(2).unwrap().to_string()],
            ..c
        };
        assert_eq!(apply_patch(&applied, &undo).text(), p.text());
    }

    #[test]
    fn iterative_train_grows_and_filters() {
        let seeds = vec![SeedProgram {
            name: "max2".into(),
            program: SourceProgram::new(PROG),
            suite: suite(),
        }];
        let (corpus, _) = build_corpus(&seeds, 15, 42, 1).unwrap();
        let n0 = corpus.len();
        let (_, s, rows) = iterative_train(&corpus, 2, 3).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[0].size, n0);
        assert!(s.len() > n0, "iterative training should add variants");
        for row in rows.windows(2) {
            assert!(row[1].size >= row[0].size);
        }
        // Alg.-1 guards hold for every augmented pair.
        for aug in &s[n0..] {
            assert!(!token_eq(&aug.buggy, &aug.fixed));
        }
    }

    #[test]
    fn max_iter_zero_is_initial_training() {
        let seeds = vec![SeedProgram {
            name: "max2".into(),
            program: SourceProgram::new(PROG),
            suite: suite(),
        }];
        let (corpus, _) = build_corpus(&seeds, 10, 42, 1).unwrap();
        let (m, s, rows) = iterative_train(&corpus, 2, 0).unwrap();
        assert_eq!(s.len(), corpus.len());
        assert_eq!(rows.len(), 1);
        let m0 = train_initial(&corpus).unwrap();
        assert_eq!(m.to_json(), m0.to_json());
    }

    #[test]
    fn rename_template_recovers_corrupted_keyword() {
        let broken = "fn f(x: int) -> int {\n  retur x;\n}";
        let ctx = make_context(
            &SourceProgram::new(broken),
            2,
            "[CE] line 2: parse-error: unexpected token",
        );
        let cands = enumerate_candidates(&ctx);
        let fixed = "fn f(x: int) -> int {\n  return x;\n}";
        assert!(
            cands.iter().any(|c| {
                c.template_id == "rename-to-nearest-declared"
                    && token_eq(apply_patch(&ctx.source, c).text(), fixed)
            }),
            "rename template should reach the keyword spelling"
        );
    }
}
