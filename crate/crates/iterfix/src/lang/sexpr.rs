//! Line-oriented s-expression dump of an AST, for snapshot tests.
//!
//! Each function and statement starts its own line (two-space indent per
//! nesting level); expressions render inline. Spans are omitted so the dump
//! is stable under reformatting.

use super::ast::{Ast, Expr, Stmt, UnOp};

pub fn ast_sexpr(ast: &Ast) -> String {
    let mut out = String::new();
    for f in &ast.functions {
        let params = f
            .params
            .iter()
            .map(|p| format!("({} {})", p.name, p.ty))
            .collect::<Vec<_>>()
            .join(" ");
        out.push_str(&format!("(fn {} (params {}) (ret {})\n", f.name, params, f.ret));
        body_sexpr(&f.body, 1, &mut out);
        out.push_str(")\n");
    }
    out
}

fn body_sexpr(body: &[Stmt], depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    for s in body {
        match s {
            Stmt::Let { name, expr, .. } => {
                out.push_str(&format!("{pad}(let {} {})\n", name, expr_sexpr(expr)));
            }
            Stmt::Assign { name, expr, .. } => {
                out.push_str(&format!("{pad}(assign {} {})\n", name, expr_sexpr(expr)));
            }
            Stmt::Return { expr, .. } => {
                out.push_str(&format!("{pad}(return {})\n", expr_sexpr(expr)));
            }
            Stmt::If { cond, then_body, else_body, .. } => {
                out.push_str(&format!("{pad}(if {}\n", expr_sexpr(cond)));
                out.push_str(&format!("{pad}  (then\n"));
                body_sexpr(then_body, depth + 2, out);
                out.push_str(&format!("{pad}  )\n"));
                if let Some(e) = else_body {
                    out.push_str(&format!("{pad}  (else\n"));
                    body_sexpr(e, depth + 2, out);
                    out.push_str(&format!("{pad}  )\n"));
                }
                out.push_str(&format!("{pad})\n"));
            }
            Stmt::While { cond, body, .. } => {
                out.push_str(&format!("{pad}(while {}\n", expr_sexpr(cond)));
                body_sexpr(body, depth + 1, out);
                out.push_str(&format!("{pad})\n"));
            }
        }
    }
}

fn expr_sexpr(e: &Expr) -> String {
    match e {
        Expr::Int(v, _) => format!("(int {v})"),
        Expr::Bool(b, _) => format!("(bool {b})"),
        Expr::Var(n, _) => format!("(var {n})"),
        Expr::Call { name, args, .. } => {
            let mut s = format!("(call {name}");
            for a in args {
                s.push(' ');
                s.push_str(&expr_sexpr(a));
            }
            s.push(')');
            s
        }
        Expr::Unary { op, operand, .. } => {
            let op = match op {
                UnOp::Neg => "neg",
                UnOp::Not => "not",
            };
            format!("(unop {op} {})", expr_sexpr(operand))
        }
        Expr::Binary { op, lhs, rhs, .. } => {
            format!("(binop {} {} {})", op.symbol(), expr_sexpr(lhs), expr_sexpr(rhs))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    #[test]
    fn dump_covers_all_node_kinds() {
        let src = "fn f(v: int, b: bool) -> int {\n  let x = -v + 2 * 3;\n  x = f(x, !b);\n  if (x < 0 && b) {\n    return 0;\n  } else {\n    x = x - 1;\n  }\n  while (x > 0) {\n    x = x / 2;\n  }\n  return x;\n}";
        let ast = parse(src).unwrap();
        let dump = ast_sexpr(&ast);
        assert!(dump.starts_with("(fn f (params (v int) (b bool)) (ret int)\n"));
        assert!(dump.contains("(let x (binop + (unop neg (var v)) (binop * (int 2) (int 3))))"));
        assert!(dump.contains("(assign x (call f (var x) (unop not (var b))))"));
        assert!(dump.contains("(if (binop && (binop < (var x) (int 0)) (var b))"));
        assert!(dump.contains("(while (binop > (var x) (int 0))"));
        assert!(dump.ends_with(")\n"));
    }
}
