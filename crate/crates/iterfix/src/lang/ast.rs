use serde::{Deserialize, Serialize};

/// Half-open-free, fully 1-indexed span. `start_col`/`end_col` are inclusive
/// column positions of the first and last character.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SourceSpan {
    pub start_line: u32,
    pub end_line: u32,
    pub start_col: u32,
    pub end_col: u32,
}

impl SourceSpan {
    pub fn new(start_line: u32, start_col: u32, end_line: u32, end_col: u32) -> Self {
        debug_assert!(start_line <= end_line);
        debug_assert!(start_line != end_line || start_col <= end_col);
        SourceSpan { start_line, end_line, start_col, end_col }
    }

    pub fn merge(a: SourceSpan, b: SourceSpan) -> SourceSpan {
        SourceSpan {
            start_line: a.start_line,
            start_col: a.start_col,
            end_line: b.end_line,
            end_col: b.end_col,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Type {
    Int,
    Bool,
}

impl std::fmt::Display for Type {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Type::Int => write!(f, "int"),
            Type::Bool => write!(f, "bool"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnOp {
    Neg,
    Not,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    And,
    Or,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Rem => "%",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::And => "&&",
            BinOp::Or => "||",
        }
    }

    pub fn is_arith(self) -> bool {
        matches!(self, BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div | BinOp::Rem)
    }

    pub fn is_cmp(self) -> bool {
        matches!(self, BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge)
    }

    pub fn is_eq(self) -> bool {
        matches!(self, BinOp::Eq | BinOp::Ne)
    }

    pub fn is_logic(self) -> bool {
        matches!(self, BinOp::And | BinOp::Or)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Int(i64, SourceSpan),
    Bool(bool, SourceSpan),
    Var(String, SourceSpan),
    Call { name: String, args: Vec<Expr>, span: SourceSpan },
    Unary { op: UnOp, operand: Box<Expr>, span: SourceSpan },
    Binary { op: BinOp, lhs: Box<Expr>, rhs: Box<Expr>, span: SourceSpan },
}

impl Expr {
    pub fn span(&self) -> SourceSpan {
        match self {
            Expr::Int(_, s) | Expr::Bool(_, s) | Expr::Var(_, s) => *s,
            Expr::Call { span, .. } | Expr::Unary { span, .. } | Expr::Binary { span, .. } => {
                *span
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Stmt {
    Let { name: String, expr: Expr, span: SourceSpan },
    Assign { name: String, expr: Expr, span: SourceSpan },
    If { cond: Expr, then_body: Vec<Stmt>, else_body: Option<Vec<Stmt>>, span: SourceSpan },
    While { cond: Expr, body: Vec<Stmt>, span: SourceSpan },
    Return { expr: Expr, span: SourceSpan },
}

impl Stmt {
    pub fn span(&self) -> SourceSpan {
        match self {
            Stmt::Let { span, .. }
            | Stmt::Assign { span, .. }
            | Stmt::If { span, .. }
            | Stmt::While { span, .. }
            | Stmt::Return { span, .. } => *span,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub name: String,
    pub ty: Type,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FuncDecl {
    pub name: String,
    pub params: Vec<Param>,
    pub ret: Type,
    pub body: Vec<Stmt>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Ast {
    pub functions: Vec<FuncDecl>,
}

impl Ast {
    pub fn function(&self, name: &str) -> Option<&FuncDecl> {
        self.functions.iter().find(|f| f.name == name)
    }

    /// Erases every span, for structural comparisons that ignore layout.
    pub fn erased(&self) -> Ast {
        let mut a = self.clone();
        for f in &mut a.functions {
            f.span = SourceSpan::default();
            for p in &mut f.params {
                p.span = SourceSpan::default();
            }
            erase_body(&mut f.body);
        }
        a
    }
}

fn erase_body(body: &mut [Stmt]) {
    for s in body {
        match s {
            Stmt::Let { expr, span, .. } | Stmt::Assign { expr, span, .. } | Stmt::Return { expr, span } => {
                *span = SourceSpan::default();
                erase_expr(expr);
            }
            Stmt::If { cond, then_body, else_body, span } => {
                *span = SourceSpan::default();
                erase_expr(cond);
                erase_body(then_body);
                if let Some(e) = else_body {
                    erase_body(e);
                }
            }
            Stmt::While { cond, body, span } => {
                *span = SourceSpan::default();
                erase_expr(cond);
                erase_body(body);
            }
        }
    }
}

fn erase_expr(e: &mut Expr) {
    match e {
        Expr::Int(_, s) | Expr::Bool(_, s) | Expr::Var(_, s) => *s = SourceSpan::default(),
        Expr::Call { args, span, .. } => {
            *span = SourceSpan::default();
            for a in args {
                erase_expr(a);
            }
        }
        Expr::Unary { operand, span, .. } => {
            *span = SourceSpan::default();
            erase_expr(operand);
        }
        Expr::Binary { lhs, rhs, span, .. } => {
            *span = SourceSpan::default();
            erase_expr(lhs);
            erase_expr(rhs);
        }
    }
}
