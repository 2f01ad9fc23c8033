use super::ast::*;

// Precedence levels for minimal-parenthesis printing. Higher binds tighter.
fn prec(op: BinOp) -> u8 {
    match op {
        BinOp::Or => 1,
        BinOp::And => 2,
        BinOp::Eq | BinOp::Ne => 3,
        BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 4,
        BinOp::Add | BinOp::Sub => 5,
        BinOp::Mul | BinOp::Div | BinOp::Rem => 6,
    }
}

const UNARY_PREC: u8 = 7;

fn expr_prec(e: &Expr) -> u8 {
    match e {
        Expr::Binary { op, .. } => prec(*op),
        Expr::Unary { .. } => UNARY_PREC,
        _ => 8,
    }
}

pub fn print_expr(e: &Expr) -> String {
    let mut s = String::new();
    write_expr(&mut s, e);
    s
}

fn write_expr(out: &mut String, e: &Expr) {
    match e {
        Expr::Int(n, _) => out.push_str(&n.to_string()),
        Expr::Bool(b, _) => out.push_str(if *b { "true" } else { "false" }),
        Expr::Var(name, _) => out.push_str(name),
        Expr::Call { name, args, .. } => {
            out.push_str(name);
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_expr(out, a);
            }
            out.push(')');
        }
        Expr::Unary { op, operand, .. } => {
            out.push(match op {
                UnOp::Neg => '-',
                UnOp::Not => '!',
            });
            if expr_prec(operand) < UNARY_PREC {
                out.push('(');
                write_expr(out, operand);
                out.push(')');
            } else {
                write_expr(out, operand);
            }
        }
        Expr::Binary { op, lhs, rhs, .. } => {
            let p = prec(*op);
            if expr_prec(lhs) < p {
                out.push('(');
                write_expr(out, lhs);
                out.push(')');
            } else {
                write_expr(out, lhs);
            }
            out.push(' ');
            out.push_str(op.symbol());
            out.push(' ');
            // Right operand needs parens at equal precedence: binaries are
            // left-associative.
            if expr_prec(rhs) <= p {
                out.push('(');
                write_expr(out, rhs);
                out.push(')');
            } else {
                write_expr(out, rhs);
            }
        }
    }
}

fn indent(depth: usize) -> String {
    "  ".repeat(depth)
}

/// Renders one statement as canonical lines at the given block depth.
pub fn print_stmt_lines(s: &Stmt, depth: usize) -> Vec<String> {
    let pad = indent(depth);
    match s {
        Stmt::Let { name, expr, .. } => vec![format!("{pad}let {name} = {};", print_expr(expr))],
        Stmt::Assign { name, expr, .. } => vec![format!("{pad}{name} = {};", print_expr(expr))],
        Stmt::Return { expr, .. } => vec![format!("{pad}return {};", print_expr(expr))],
        Stmt::If { cond, then_body, else_body, .. } => {
            let mut lines = vec![format!("{pad}if ({}) {{", print_expr(cond))];
            for st in then_body {
                lines.extend(print_stmt_lines(st, depth + 1));
            }
            if let Some(eb) = else_body {
                lines.push(format!("{pad}}} else {{"));
                for st in eb {
                    lines.extend(print_stmt_lines(st, depth + 1));
                }
            }
            lines.push(format!("{pad}}}"));
            lines
        }
        Stmt::While { cond, body, .. } => {
            let mut lines = vec![format!("{pad}while ({}) {{", print_expr(cond))];
            for st in body {
                lines.extend(print_stmt_lines(st, depth + 1));
            }
            lines.push(format!("{pad}}}"));
            lines
        }
    }
}

/// Canonical form: one statement per line, two spaces per block depth, no
/// trailing newline. An empty program prints as "".
pub fn print_ast(ast: &Ast) -> String {
    let mut lines: Vec<String> = Vec::new();
    for f in &ast.functions {
        let params = f
            .params
            .iter()
            .map(|p| format!("{}: {}", p.name, p.ty))
            .collect::<Vec<_>>()
            .join(", ");
        lines.push(format!("fn {}({}) -> {} {{", f.name, params, f.ret));
        for st in &f.body {
            lines.extend(print_stmt_lines(st, 1));
        }
        lines.push("}".to_string());
    }
    lines.join("\n")
}
