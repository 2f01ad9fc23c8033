//! Line-oriented edit machinery shared by the perturbation model and the
//! patch templates: locating the statement that owns a line of canonical
//! source, enumerating single-node expression mutations, and re-rendering
//! exactly one line.

use crate::lang::{BinOp, Expr, FuncDecl, SourceProgram, Stmt};
use crate::lang::print_expr;

/// Replace lines [start_line, end_line] (1-indexed, inclusive) with
/// `replacement`. `start_line == line_count + 1` with `end_line == start_line`
/// is a pure insertion at end of file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineEdit {
    pub start_line: u32,
    pub end_line: u32,
    pub replacement: Vec<String>,
}

impl LineEdit {
    pub fn replace_line(line: u32, text: String) -> Self {
        LineEdit { start_line: line, end_line: line, replacement: vec![text] }
    }

    pub fn apply(&self, source: &SourceProgram) -> String {
        let n = source.line_count();
        let mut lines: Vec<String> = source.lines().to_vec();
        if self.start_line == n + 1 {
            // pure insertion at EOF
            lines.extend(self.replacement.iter().cloned());
        } else {
            let start = (self.start_line - 1) as usize;
            let end = (self.end_line as usize).min(lines.len());
            lines.splice(start..end, self.replacement.iter().cloned());
        }
        lines.join("\n")
    }
}

/// What a given line of canonical source is, in terms of editable structure.
pub enum LineSite<'a> {
    /// `let`, assignment or `return` occupying exactly this line.
    Simple(&'a Stmt),
    /// `if (cond) {` header line; the statement is the whole `if`.
    IfHeader(&'a Stmt),
    /// `while (cond) {` header line.
    WhileHeader(&'a Stmt),
}

/// Finds the statement owning `line` in canonical source, innermost first.
pub fn site_at_line<'a>(f: &'a FuncDecl, line: u32) -> Option<LineSite<'a>> {
    site_in_body(&f.body, line)
}

pub fn function_at_line<'a>(program: &'a SourceProgram, line: u32) -> Option<&'a FuncDecl> {
    let ast = program.ast()?;
    ast.functions
        .iter()
        .find(|f| f.span.start_line <= line && line <= f.span.end_line)
}

fn site_in_body<'a>(body: &'a [Stmt], line: u32) -> Option<LineSite<'a>> {
    for s in body {
        let span = s.span();
        if line < span.start_line || line > span.end_line {
            continue;
        }
        match s {
            Stmt::Let { .. } | Stmt::Assign { .. } | Stmt::Return { .. } => {
                return Some(LineSite::Simple(s));
            }
            Stmt::If { then_body, else_body, .. } => {
                if line == span.start_line {
                    return Some(LineSite::IfHeader(s));
                }
                if let Some(inner) = site_in_body(then_body, line) {
                    return Some(inner);
                }
                if let Some(eb) = else_body {
                    if let Some(inner) = site_in_body(eb, line) {
                        return Some(inner);
                    }
                }
                return None; // a brace or `} else {` line
            }
            Stmt::While { body, .. } => {
                if line == span.start_line {
                    return Some(LineSite::WhileHeader(s));
                }
                return site_in_body(body, line);
            }
        }
    }
    None
}

pub fn indent_of(source: &SourceProgram, line: u32) -> String {
    let text = source.line(line).unwrap_or("");
    text.chars().take_while(|&c| c == ' ').collect()
}

/// Re-renders the single line owned by `site` with a mutated payload.
pub fn render_site_line(source: &SourceProgram, line: u32, site_stmt: &Stmt) -> String {
    let pad = indent_of(source, line);
    match site_stmt {
        Stmt::Let { name, expr, .. } => format!("{pad}let {name} = {};", print_expr(expr)),
        Stmt::Assign { name, expr, .. } => format!("{pad}{name} = {};", print_expr(expr)),
        Stmt::Return { expr, .. } => format!("{pad}return {};", print_expr(expr)),
        Stmt::If { cond, .. } => format!("{pad}if ({}) {{", print_expr(cond)),
        Stmt::While { cond, .. } => format!("{pad}while ({}) {{", print_expr(cond)),
    }
}

/// All variants of `e` obtained by replacing exactly one subexpression `s`
/// with each element of `alternatives(s)`, in pre-order (leftmost-outermost
/// first), which makes site enumeration deterministic.
pub fn expr_variants(e: &Expr, alternatives: &mut dyn FnMut(&Expr) -> Vec<Expr>) -> Vec<Expr> {
    let mut out = alternatives(e);
    match e {
        Expr::Int(..) | Expr::Bool(..) | Expr::Var(..) => {}
        Expr::Call { name, args, span } => {
            for i in 0..args.len() {
                for v in expr_variants(&args[i], alternatives) {
                    let mut new_args = args.clone();
                    new_args[i] = v;
                    out.push(Expr::Call { name: name.clone(), args: new_args, span: *span });
                }
            }
        }
        Expr::Unary { op, operand, span } => {
            for v in expr_variants(operand, alternatives) {
                out.push(Expr::Unary { op: *op, operand: Box::new(v), span: *span });
            }
        }
        Expr::Binary { op, lhs, rhs, span } => {
            for v in expr_variants(lhs, alternatives) {
                out.push(Expr::Binary {
                    op: *op,
                    lhs: Box::new(v),
                    rhs: rhs.clone(),
                    span: *span,
                });
            }
            for v in expr_variants(rhs, alternatives) {
                out.push(Expr::Binary {
                    op: *op,
                    lhs: lhs.clone(),
                    rhs: Box::new(v),
                    span: *span,
                });
            }
        }
    }
    out
}

/// Alternatives for one binary operator, staying inside its operator class.
pub fn binop_alternatives(op: BinOp) -> Vec<BinOp> {
    use BinOp::*;
    let class: &[BinOp] = if op.is_arith() {
        &[Add, Sub, Mul, Div, Rem]
    } else if op.is_cmp() || op.is_eq() {
        &[Lt, Le, Gt, Ge, Eq, Ne]
    } else {
        &[And, Or]
    };
    class.iter().copied().filter(|&o| o != op).collect()
}

/// The mutated-condition counterpart of a condition: strips a top-level
/// negation if present, otherwise wraps one, so the operation is an
/// involution on printed text.
pub fn toggle_negation(cond: &Expr) -> Expr {
    match cond {
        Expr::Unary { op: crate::lang::UnOp::Not, operand, .. } => (**operand).clone(),
        other => Expr::Unary {
            op: crate::lang::UnOp::Not,
            operand: Box::new(other.clone()),
            span: other.span(),
        },
    }
}

/// All variants of a statement's payload expression, keeping structure.
pub fn stmt_with_expr(stmt: &Stmt, new_expr: Expr) -> Stmt {
    match stmt {
        Stmt::Let { name, span, .. } => Stmt::Let { name: name.clone(), expr: new_expr, span: *span },
        Stmt::Assign { name, span, .. } => {
            Stmt::Assign { name: name.clone(), expr: new_expr, span: *span }
        }
        Stmt::Return { span, .. } => Stmt::Return { expr: new_expr, span: *span },
        Stmt::If { then_body, else_body, span, .. } => Stmt::If {
            cond: new_expr,
            then_body: then_body.clone(),
            else_body: else_body.clone(),
            span: *span,
        },
        Stmt::While { body, span, .. } => {
            Stmt::While { cond: new_expr, body: body.clone(), span: *span }
        }
    }
}

/// The payload expression of the statement at a line site: the bound/returned
/// expression for simple statements, the condition for headers.
pub fn site_expr<'a>(site: &LineSite<'a>) -> &'a Expr {
    match site {
        LineSite::Simple(s) => match s {
            Stmt::Let { expr, .. } | Stmt::Assign { expr, .. } | Stmt::Return { expr, .. } => expr,
            _ => unreachable!(),
        },
        LineSite::IfHeader(s) => match s {
            Stmt::If { cond, .. } => cond,
            _ => unreachable!(),
        },
        LineSite::WhileHeader(s) => match s {
            Stmt::While { cond, .. } => cond,
            _ => unreachable!(),
        },
    }
}

pub fn site_stmt<'a>(site: &LineSite<'a>) -> &'a Stmt {
    match site {
        LineSite::Simple(s) | LineSite::IfHeader(s) | LineSite::WhileHeader(s) => s,
    }
}
