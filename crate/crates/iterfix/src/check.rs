//! Static checks over MiniLang programs. A nonempty result is the artifact's
//! "compilation error" (CE) state; parse failures surface here as a single
//! parse-error diagnostic so callers never need to special-case them.

use crate::lang::{Ast, BinOp, Expr, FuncDecl, SourceProgram, Stmt, Type, UnOp};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiagnosticKind {
    ParseError,
    UndefinedVariable,
    UndefinedFunction,
    ArityMismatch,
    TypeMismatch,
    DuplicateDefinition,
    MissingReturn,
}

impl DiagnosticKind {
    pub fn name(self) -> &'static str {
        match self {
            DiagnosticKind::ParseError => "parse-error",
            DiagnosticKind::UndefinedVariable => "undefined-variable",
            DiagnosticKind::UndefinedFunction => "undefined-function",
            DiagnosticKind::ArityMismatch => "arity-mismatch",
            DiagnosticKind::TypeMismatch => "type-mismatch",
            DiagnosticKind::DuplicateDefinition => "duplicate-definition",
            DiagnosticKind::MissingReturn => "missing-return",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompileDiagnostic {
    pub kind: DiagnosticKind,
    pub line: u32,
    pub message: String,
}

impl CompileDiagnostic {
    /// One-line rendering: `[CE] line <n>: <kind>: <message>`.
    pub fn render(&self) -> String {
        format!("[CE] line {}: {}: {}", self.line, self.kind.name(), self.message)
    }
}

/// Runs all static checks. Empty result iff the program parses and is
/// well-typed. Diagnostics come back sorted by (line, kind).
pub fn check(program: &SourceProgram) -> Vec<CompileDiagnostic> {
    let ast = match program.ast() {
        Some(a) => a,
        None => {
            let pf = program.parse_failure().unwrap();
            return vec![CompileDiagnostic {
                kind: DiagnosticKind::ParseError,
                line: pf.line,
                message: pf.message.clone(),
            }];
        }
    };
    let mut diags = check_ast(ast);
    diags.sort_by(|a, b| (a.line, a.kind).cmp(&(b.line, b.kind)));
    diags
}

/// The line driving repair this iteration: the first diagnostic in sorted
/// order, clamped into the file so it is always a patchable location.
pub fn first_ce_location(diags: &[CompileDiagnostic], line_count: u32) -> u32 {
    assert!(!diags.is_empty(), "first_ce_location requires a nonempty diagnostic list");
    diags[0].line.min(line_count.max(1))
}

/// Names and types visible at `line`: parameters of the enclosing function
/// plus every `let` declared on an earlier line (function-level scope).
/// Empty when the program does not parse or the line is not inside a function.
pub fn in_scope_vars(program: &SourceProgram, line: u32) -> Vec<(String, Type)> {
    let Some(ast) = program.ast() else {
        return Vec::new();
    };
    let Some(f) = ast
        .functions
        .iter()
        .find(|f| f.span.start_line <= line && line <= f.span.end_line)
    else {
        return Vec::new();
    };
    let mut sigs: HashMap<&str, FnSig> = HashMap::new();
    for g in &ast.functions {
        sigs.entry(&g.name).or_insert_with(|| FnSig {
            params: g.params.iter().map(|p| p.ty).collect(),
            ret: g.ret,
        });
    }
    let mut scope: HashMap<String, Type> = HashMap::new();
    let mut out: Vec<(String, Type)> = f.params.iter().map(|p| (p.name.clone(), p.ty)).collect();
    for p in &f.params {
        scope.insert(p.name.clone(), p.ty);
    }
    let mut sink = Vec::new();
    collect_lets(&f.body, line, &sigs, &mut scope, &mut out, &mut sink);
    out
}

fn collect_lets(
    body: &[Stmt],
    line: u32,
    sigs: &HashMap<&str, FnSig>,
    scope: &mut HashMap<String, Type>,
    out: &mut Vec<(String, Type)>,
    sink: &mut Vec<CompileDiagnostic>,
) {
    for s in body {
        if s.span().start_line >= line {
            // Function-level scope, but only earlier lines count as visible.
            if matches!(s, Stmt::Let { .. } | Stmt::Assign { .. } | Stmt::Return { .. }) {
                continue;
            }
        }
        match s {
            Stmt::Let { name, expr, .. } => {
                if let Some(ty) = infer(expr, sigs, scope, sink) {
                    if scope.insert(name.clone(), ty).is_none() {
                        out.push((name.clone(), ty));
                    }
                }
            }
            Stmt::If { then_body, else_body, .. } => {
                collect_lets(then_body, line, sigs, scope, out, sink);
                if let Some(eb) = else_body {
                    collect_lets(eb, line, sigs, scope, out, sink);
                }
            }
            Stmt::While { body, .. } => collect_lets(body, line, sigs, scope, out, sink),
            _ => {}
        }
    }
}

struct FnSig {
    params: Vec<Type>,
    ret: Type,
}

fn check_ast(ast: &Ast) -> Vec<CompileDiagnostic> {
    let mut diags = Vec::new();
    let mut sigs: HashMap<&str, FnSig> = HashMap::new();
    for f in &ast.functions {
        if sigs.contains_key(f.name.as_str()) {
            diags.push(CompileDiagnostic {
                kind: DiagnosticKind::DuplicateDefinition,
                line: f.span.start_line,
                message: format!("function `{}` is defined more than once", f.name),
            });
        } else {
            sigs.insert(
                &f.name,
                FnSig { params: f.params.iter().map(|p| p.ty).collect(), ret: f.ret },
            );
        }
    }
    for f in &ast.functions {
        check_function(f, &sigs, &mut diags);
    }
    diags
}

fn check_function(f: &FuncDecl, sigs: &HashMap<&str, FnSig>, diags: &mut Vec<CompileDiagnostic>) {
    let mut scope: HashMap<String, Type> = HashMap::new();
    for p in &f.params {
        if scope.contains_key(&p.name) {
            diags.push(CompileDiagnostic {
                kind: DiagnosticKind::DuplicateDefinition,
                line: p.span.start_line,
                message: format!("parameter `{}` is declared more than once", p.name),
            });
        }
        scope.insert(p.name.clone(), p.ty);
    }
    if !matches!(f.body.last(), Some(Stmt::Return { .. })) {
        diags.push(CompileDiagnostic {
            kind: DiagnosticKind::MissingReturn,
            line: f.span.end_line,
            message: format!("function `{}` must end with a return statement", f.name),
        });
    }
    check_body(&f.body, f, sigs, &mut scope, diags);
}

fn check_body(
    body: &[Stmt],
    f: &FuncDecl,
    sigs: &HashMap<&str, FnSig>,
    scope: &mut HashMap<String, Type>,
    diags: &mut Vec<CompileDiagnostic>,
) {
    for s in body {
        match s {
            Stmt::Let { name, expr, span } => {
                let ty = infer(expr, sigs, scope, diags);
                if scope.contains_key(name) {
                    diags.push(CompileDiagnostic {
                        kind: DiagnosticKind::DuplicateDefinition,
                        line: span.start_line,
                        message: format!("`{name}` is already declared"),
                    });
                } else if let Some(ty) = ty {
                    scope.insert(name.clone(), ty);
                }
            }
            Stmt::Assign { name, expr, span } => {
                let ty = infer(expr, sigs, scope, diags);
                match scope.get(name) {
                    None => diags.push(CompileDiagnostic {
                        kind: DiagnosticKind::UndefinedVariable,
                        line: span.start_line,
                        message: format!("assignment to undeclared variable `{name}`"),
                    }),
                    Some(&declared) => {
                        if let Some(ty) = ty {
                            if ty != declared {
                                diags.push(CompileDiagnostic {
                                    kind: DiagnosticKind::TypeMismatch,
                                    line: span.start_line,
                                    message: format!(
                                        "cannot assign {ty} to `{name}` of type {declared}"
                                    ),
                                });
                            }
                        }
                    }
                }
            }
            Stmt::If { cond, then_body, else_body, .. } => {
                expect_bool(cond, "if condition", sigs, scope, diags);
                check_body(then_body, f, sigs, scope, diags);
                if let Some(eb) = else_body {
                    check_body(eb, f, sigs, scope, diags);
                }
            }
            Stmt::While { cond, body, .. } => {
                expect_bool(cond, "while condition", sigs, scope, diags);
                check_body(body, f, sigs, scope, diags);
            }
            Stmt::Return { expr, span } => {
                if let Some(ty) = infer(expr, sigs, scope, diags) {
                    if ty != f.ret {
                        diags.push(CompileDiagnostic {
                            kind: DiagnosticKind::TypeMismatch,
                            line: span.start_line,
                            message: format!(
                                "function `{}` returns {} but this returns {ty}",
                                f.name, f.ret
                            ),
                        });
                    }
                }
            }
        }
    }
}

fn expect_bool(
    e: &Expr,
    what: &str,
    sigs: &HashMap<&str, FnSig>,
    scope: &HashMap<String, Type>,
    diags: &mut Vec<CompileDiagnostic>,
) {
    if let Some(ty) = infer(e, sigs, scope, diags) {
        if ty != Type::Bool {
            diags.push(CompileDiagnostic {
                kind: DiagnosticKind::TypeMismatch,
                line: e.span().start_line,
                message: format!("{what} must be bool, found {ty}"),
            });
        }
    }
}

/// Monomorphic, coercion-free type inference. Returns None when a subterm
/// already failed, to avoid cascading diagnostics from one bad site.
fn infer(
    e: &Expr,
    sigs: &HashMap<&str, FnSig>,
    scope: &HashMap<String, Type>,
    diags: &mut Vec<CompileDiagnostic>,
) -> Option<Type> {
    match e {
        Expr::Int(..) => Some(Type::Int),
        Expr::Bool(..) => Some(Type::Bool),
        Expr::Var(name, span) => match scope.get(name) {
            Some(t) => Some(*t),
            None => {
                diags.push(CompileDiagnostic {
                    kind: DiagnosticKind::UndefinedVariable,
                    line: span.start_line,
                    message: format!("use of undeclared variable `{name}`"),
                });
                None
            }
        },
        Expr::Call { name, args, span } => {
            let sig = match sigs.get(name.as_str()) {
                Some(s) => s,
                None => {
                    diags.push(CompileDiagnostic {
                        kind: DiagnosticKind::UndefinedFunction,
                        line: span.start_line,
                        message: format!("call to undefined function `{name}`"),
                    });
                    for a in args {
                        infer(a, sigs, scope, diags);
                    }
                    return None;
                }
            };
            if args.len() != sig.params.len() {
                diags.push(CompileDiagnostic {
                    kind: DiagnosticKind::ArityMismatch,
                    line: span.start_line,
                    message: format!(
                        "`{name}` expects {} argument(s), found {}",
                        sig.params.len(),
                        args.len()
                    ),
                });
            }
            let ret = sig.ret;
            let param_tys = sig.params.clone();
            for (i, a) in args.iter().enumerate() {
                let at = infer(a, sigs, scope, diags);
                if let (Some(at), Some(&want)) = (at, param_tys.get(i)) {
                    if at != want {
                        diags.push(CompileDiagnostic {
                            kind: DiagnosticKind::TypeMismatch,
                            line: a.span().start_line,
                            message: format!(
                                "argument {} of `{name}` expects {want}, found {at}",
                                i + 1
                            ),
                        });
                    }
                }
            }
            Some(ret)
        }
        Expr::Unary { op, operand, span } => {
            let t = infer(operand, sigs, scope, diags)?;
            let (want, out) = match op {
                UnOp::Neg => (Type::Int, Type::Int),
                UnOp::Not => (Type::Bool, Type::Bool),
            };
            if t != want {
                diags.push(CompileDiagnostic {
                    kind: DiagnosticKind::TypeMismatch,
                    line: span.start_line,
                    message: format!("unary operator expects {want}, found {t}"),
                });
                return None;
            }
            Some(out)
        }
        Expr::Binary { op, lhs, rhs, span } => {
            let lt = infer(lhs, sigs, scope, diags);
            let rt = infer(rhs, sigs, scope, diags);
            let (lt, rt) = (lt?, rt?);
            if op.is_arith() || op.is_cmp() {
                if lt != Type::Int || rt != Type::Int {
                    diags.push(CompileDiagnostic {
                        kind: DiagnosticKind::TypeMismatch,
                        line: span.start_line,
                        message: format!("`{}` expects int operands, found {lt} and {rt}", op.symbol()),
                    });
                    return None;
                }
                Some(if op.is_arith() { Type::Int } else { Type::Bool })
            } else if op.is_eq() {
                if lt != rt {
                    diags.push(CompileDiagnostic {
                        kind: DiagnosticKind::TypeMismatch,
                        line: span.start_line,
                        message: format!("`{}` requires same-type operands, found {lt} and {rt}", op.symbol()),
                    });
                    return None;
                }
                Some(Type::Bool)
            } else {
                debug_assert!(matches!(op, BinOp::And | BinOp::Or));
                if lt != Type::Bool || rt != Type::Bool {
                    diags.push(CompileDiagnostic {
                        kind: DiagnosticKind::TypeMismatch,
                        line: span.start_line,
                        message: format!("`{}` expects bool operands, found {lt} and {rt}", op.symbol()),
                    });
                    return None;
                }
                Some(Type::Bool)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(text: &str) -> SourceProgram {
        SourceProgram::new(text)
    }

    #[test]
    fn well_typed_program_is_clean() {
        let prog = p("fn main(a: int, b: int) -> int {\n  let c = a + b;\n  return c;\n}");
        assert!(check(&prog).is_empty());
    }

    #[test]
    fn undeclared_variable_reported_at_its_line() {
        let prog = p("fn main() -> int {\n  return y;\n}");
        let diags = check(&prog);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].kind, DiagnosticKind::UndefinedVariable);
        assert_eq!(diags[0].line, 2);
    }

    #[test]
    fn swapped_argument_types_yield_type_mismatch_at_call_line() {
        let prog = p(concat!(
            "fn g(p: bool, q: int, r: int) -> int {\n  return q + r;\n}\n",
            "fn main(a: int, b: int, c: bool) -> int {\n  return g(a, b, c);\n}"
        ));
        let diags = check(&prog);
        assert!(diags.iter().any(|d| d.kind == DiagnosticKind::TypeMismatch && d.line == 5));
    }

    #[test]
    fn parse_failure_is_exactly_one_diagnostic() {
        let prog = p("fn main() -> int { return 1;");
        let diags = check(&prog);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].kind, DiagnosticKind::ParseError);
        assert_eq!(first_ce_location(&diags, prog.line_count()), 1);
    }

    #[test]
    fn diagnostics_sorted_by_line_then_kind() {
        let prog = p("fn main() -> int {\n  x = y;\n  return z;\n}");
        let diags = check(&prog);
        let keys: Vec<(u32, DiagnosticKind)> = diags.iter().map(|d| (d.line, d.kind)).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        assert_eq!(first_ce_location(&diags, prog.line_count()), 2);
    }

    #[test]
    fn missing_return_flagged() {
        let prog = p("fn main() -> int {\n  let a = 1;\n}");
        let diags = check(&prog);
        assert_eq!(diags[0].kind, DiagnosticKind::MissingReturn);
    }

    #[test]
    fn render_format() {
        let d = CompileDiagnostic {
            kind: DiagnosticKind::TypeMismatch,
            line: 7,
            message: "x".into(),
        };
        assert_eq!(d.render(), "[CE] line 7: type-mismatch: x");
    }
}
