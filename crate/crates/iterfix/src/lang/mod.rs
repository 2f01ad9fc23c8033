//! MiniLang: a tiny imperative language with stable line numbers.
//!
//! Programs are lists of `fn name(p: type, ...) -> type { stmts }`.
//! Statements: `let x = e;`, `x = e;`, `if (e) { } else { }`, `while (e) { }`,
//! `return e;`. Types are `int` and `bool`. The canonical printer emits one
//! statement per line with two-space indentation, which is what makes
//! line-based localization and line-range patching well-defined.

mod ast;
mod lexer;
mod parser;
mod printer;
mod sexpr;

pub use ast::{Ast, BinOp, Expr, FuncDecl, Param, SourceSpan, Stmt, Type, UnOp};
pub use lexer::{tokenize, LexFailure, Token, TokenKind};
pub use parser::{parse, ParseFailure};
pub use printer::{print_ast, print_expr, print_stmt_lines};
pub use sexpr::ast_sexpr;

use std::collections::BTreeSet;

/// Immutable source text plus its parse result, the unit being repaired.
#[derive(Debug, Clone)]
pub struct SourceProgram {
    text: String,
    lines: Vec<String>,
    parse: Result<Ast, ParseFailure>,
}

impl SourceProgram {
    pub fn new(text: impl Into<String>) -> Self {
        let text = text.into();
        let lines: Vec<String> = if text.is_empty() {
            Vec::new()
        } else {
            text.split('\n').map(str::to_owned).collect()
        };
        let parse = parse(&text);
        SourceProgram { text, lines, parse }
    }

    /// Loads a `.mini` file, stripping at most one trailing newline so that
    /// the in-memory text/lines invariant holds.
    pub fn from_file_text(raw: &str) -> Self {
        let text = raw.strip_suffix('\n').unwrap_or(raw);
        Self::new(text)
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    /// 1-indexed line access.
    pub fn line(&self, n: u32) -> Option<&str> {
        self.lines.get((n as usize).wrapping_sub(1)).map(String::as_str)
    }

    pub fn lines(&self) -> &[String] {
        &self.lines
    }

    pub fn line_count(&self) -> u32 {
        self.lines.len() as u32
    }

    pub fn ast(&self) -> Option<&Ast> {
        self.parse.as_ref().ok()
    }

    pub fn parse_failure(&self) -> Option<&ParseFailure> {
        self.parse.as_ref().err()
    }
}

impl PartialEq for SourceProgram {
    fn eq(&self, other: &Self) -> bool {
        self.text == other.text
    }
}

impl Eq for SourceProgram {}

/// Lines containing at least one statement or condition expression.
/// Brace-only lines, `} else {` lines, blank lines and signatures are excluded.
pub fn executable_lines(ast: &Ast) -> BTreeSet<u32> {
    let mut out = BTreeSet::new();
    for f in &ast.functions {
        collect_stmt_lines(&f.body, &mut out);
    }
    out
}

fn collect_stmt_lines(body: &[Stmt], out: &mut BTreeSet<u32>) {
    for s in body {
        out.insert(s.span().start_line);
        match s {
            Stmt::If { then_body, else_body, .. } => {
                collect_stmt_lines(then_body, out);
                if let Some(e) = else_body {
                    collect_stmt_lines(e, out);
                }
            }
            Stmt::While { body, .. } => collect_stmt_lines(body, out),
            _ => {}
        }
    }
}

/// Whitespace-insensitive equality: compares the two sources as token
/// sequences. Falls back to raw text equality if either side does not lex.
/// Whitespace-insensitive canonical key for a source text, suitable for
/// dedup maps; two texts get the same key iff `token_eq` holds (unlexable
/// texts fall back to their raw form).
pub fn token_key(text: &str) -> String {
    match tokenize(text) {
        Ok(ts) => ts
            .iter()
            .map(|t| format!("{:?}", t.kind))
            .collect::<Vec<_>>()
            .join(" "),
        Err(_) => format!("raw:{text}"),
    }
}

pub fn token_eq(a: &str, b: &str) -> bool {
    match (tokenize(a), tokenize(b)) {
        (Ok(ta), Ok(tb)) => {
            ta.len() == tb.len() && ta.iter().zip(&tb).all(|(x, y)| x.kind == y.kind)
        }
        _ => a == b,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_lines_roundtrip() {
        let p = SourceProgram::new("a\nb\n\nc");
        assert_eq!(p.lines().join("\n"), p.text());
        assert_eq!(p.line_count(), 4);
        assert_eq!(p.line(3), Some(""));
        let empty = SourceProgram::new("");
        assert_eq!(empty.line_count(), 0);
        assert_eq!(empty.lines().join("\n"), "");
    }

    #[test]
    fn executable_lines_single_return() {
        let p = SourceProgram::new("fn main() -> int {\n  return 1;\n}");
        let lines = executable_lines(p.ast().unwrap());
        assert_eq!(lines.into_iter().collect::<Vec<_>>(), vec![2]);
    }

    #[test]
    fn executable_lines_empty_program() {
        let p = SourceProgram::new("");
        assert!(executable_lines(p.ast().unwrap()).is_empty());
    }

    #[test]
    fn token_eq_ignores_whitespace() {
        assert!(token_eq("return  1+2 ;", "return 1 + 2;"));
        assert!(!token_eq("return 1;", "return 2;"));
    }
}
