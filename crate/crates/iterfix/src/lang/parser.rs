use super::ast::*;
use super::lexer::{tokenize, Token, TokenKind};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// First-error parse failure. `line` points at the first offending line;
/// for errors at end of input it is `number of lines + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[error("parse error at line {line}: {message}")]
pub struct ParseFailure {
    pub line: u32,
    pub message: String,
    pub expected_token: Option<String>,
}

/// Recursive-descent parser with first-error reporting and no recovery, so
/// every failure yields exactly one diagnostic line.
pub fn parse(text: &str) -> Result<Ast, ParseFailure> {
    let tokens = match tokenize(text) {
        Ok(t) => t,
        Err(e) => {
            return Err(ParseFailure {
                line: e.line,
                message: e.message,
                expected_token: None,
            })
        }
    };
    // Errors at end of input point at the line of the last token, so the
    // reported line always names a real line a patch can target.
    let eof_line = tokens.last().map(|t| t.span.end_line).unwrap_or(1);
    let mut p = Parser { tokens, pos: 0, eof_line };
    p.program()
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    eof_line: u32,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn current_line(&self) -> u32 {
        self.peek().map(|t| t.span.start_line).unwrap_or(self.eof_line)
    }

    fn fail(&self, message: impl Into<String>, expected: Option<&str>) -> ParseFailure {
        ParseFailure {
            line: self.current_line(),
            message: message.into(),
            expected_token: expected.map(str::to_owned),
        }
    }

    fn advance(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, kind: &TokenKind, what: &str) -> Result<Token, ParseFailure> {
        match self.peek() {
            Some(t) if &t.kind == kind => Ok(self.advance().unwrap()),
            Some(t) => Err(self.fail(
                format!("expected {what}, found {}", t.kind.describe()),
                Some(what),
            )),
            None => Err(self.fail(format!("expected {what}, found end of input"), Some(what))),
        }
    }

    fn expect_ident(&mut self, what: &str) -> Result<(String, SourceSpan), ParseFailure> {
        match self.peek() {
            Some(Token { kind: TokenKind::Ident(_), .. }) => {
                let t = self.advance().unwrap();
                match t.kind {
                    TokenKind::Ident(name) => Ok((name, t.span)),
                    _ => unreachable!(),
                }
            }
            Some(t) => Err(self.fail(
                format!("expected {what}, found {}", t.kind.describe()),
                Some(what),
            )),
            None => Err(self.fail(format!("expected {what}, found end of input"), Some(what))),
        }
    }

    fn program(&mut self) -> Result<Ast, ParseFailure> {
        let mut functions = Vec::new();
        while self.peek().is_some() {
            functions.push(self.func_decl()?);
        }
        Ok(Ast { functions })
    }

    fn func_decl(&mut self) -> Result<FuncDecl, ParseFailure> {
        let start = self.expect(&TokenKind::KwFn, "`fn`")?.span;
        let (name, _) = self.expect_ident("function name")?;
        self.expect(&TokenKind::LParen, "`(`")?;
        let mut params = Vec::new();
        if !matches!(self.peek().map(|t| &t.kind), Some(TokenKind::RParen)) {
            loop {
                let (pname, pspan) = self.expect_ident("parameter name")?;
                self.expect(&TokenKind::Colon, "`:`")?;
                let (ty, tspan) = self.type_name()?;
                params.push(Param { name: pname, ty, span: SourceSpan::merge(pspan, tspan) });
                if matches!(self.peek().map(|t| &t.kind), Some(TokenKind::Comma)) {
                    self.advance();
                } else {
                    break;
                }
            }
        }
        self.expect(&TokenKind::RParen, "`)`")?;
        // The return-type arrow is the token pair `-` `>`.
        self.expect(&TokenKind::Minus, "`->`")?;
        self.expect(&TokenKind::Gt, "`->`")?;
        let (ret, _) = self.type_name()?;
        let body = self.block()?;
        let end = self.tokens[self.pos - 1].span;
        Ok(FuncDecl { name, params, ret, body, span: SourceSpan::merge(start, end) })
    }

    fn type_name(&mut self) -> Result<(Type, SourceSpan), ParseFailure> {
        match self.peek().map(|t| t.kind.clone()) {
            Some(TokenKind::KwInt) => Ok((Type::Int, self.advance().unwrap().span)),
            Some(TokenKind::KwBool) => Ok((Type::Bool, self.advance().unwrap().span)),
            Some(k) => Err(self.fail(
                format!("expected type `int` or `bool`, found {}", k.describe()),
                Some("type"),
            )),
            None => Err(self.fail("expected type `int` or `bool`, found end of input", Some("type"))),
        }
    }

    /// `{ stmt* }`, returning the statements; the caller owns the span.
    fn block(&mut self) -> Result<Vec<Stmt>, ParseFailure> {
        self.expect(&TokenKind::LBrace, "`{`")?;
        let mut stmts = Vec::new();
        loop {
            match self.peek().map(|t| &t.kind) {
                Some(TokenKind::RBrace) => {
                    self.advance();
                    return Ok(stmts);
                }
                Some(_) => stmts.push(self.stmt()?),
                None => return Err(self.fail("expected `}`, found end of input", Some("`}`"))),
            }
        }
    }

    fn stmt(&mut self) -> Result<Stmt, ParseFailure> {
        match self.peek().map(|t| t.kind.clone()) {
            Some(TokenKind::KwLet) => {
                let start = self.advance().unwrap().span;
                let (name, _) = self.expect_ident("variable name")?;
                self.expect(&TokenKind::Assign, "`=`")?;
                let expr = self.expr()?;
                let end = self.expect(&TokenKind::Semi, "`;`")?.span;
                Ok(Stmt::Let { name, expr, span: SourceSpan::merge(start, end) })
            }
            Some(TokenKind::KwReturn) => {
                let start = self.advance().unwrap().span;
                let expr = self.expr()?;
                let end = self.expect(&TokenKind::Semi, "`;`")?.span;
                Ok(Stmt::Return { expr, span: SourceSpan::merge(start, end) })
            }
            Some(TokenKind::KwIf) => {
                let start = self.advance().unwrap().span;
                self.expect(&TokenKind::LParen, "`(`")?;
                let cond = self.expr()?;
                self.expect(&TokenKind::RParen, "`)`")?;
                let then_body = self.block()?;
                let mut end = self.tokens[self.pos - 1].span;
                let else_body = if matches!(self.peek().map(|t| &t.kind), Some(TokenKind::KwElse)) {
                    self.advance();
                    let b = self.block()?;
                    end = self.tokens[self.pos - 1].span;
                    Some(b)
                } else {
                    None
                };
                Ok(Stmt::If { cond, then_body, else_body, span: SourceSpan::merge(start, end) })
            }
            Some(TokenKind::KwWhile) => {
                let start = self.advance().unwrap().span;
                self.expect(&TokenKind::LParen, "`(`")?;
                let cond = self.expr()?;
                self.expect(&TokenKind::RParen, "`)`")?;
                let body = self.block()?;
                let end = self.tokens[self.pos - 1].span;
                Ok(Stmt::While { cond, body, span: SourceSpan::merge(start, end) })
            }
            Some(TokenKind::Ident(_)) => {
                let (name, start) = self.expect_ident("variable name")?;
                self.expect(&TokenKind::Assign, "`=`")?;
                let expr = self.expr()?;
                let end = self.expect(&TokenKind::Semi, "`;`")?.span;
                Ok(Stmt::Assign { name, expr, span: SourceSpan::merge(start, end) })
            }
            Some(k) => Err(self.fail(
                format!("expected statement, found {}", k.describe()),
                Some("statement"),
            )),
            None => Err(self.fail("expected statement, found end of input", Some("statement"))),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseFailure> {
        self.or_expr()
    }

    fn or_expr(&mut self) -> Result<Expr, ParseFailure> {
        let mut lhs = self.and_expr()?;
        while matches!(self.peek().map(|t| &t.kind), Some(TokenKind::OrOr)) {
            self.advance();
            let rhs = self.and_expr()?;
            let span = SourceSpan::merge(lhs.span(), rhs.span());
            lhs = Expr::Binary { op: BinOp::Or, lhs: Box::new(lhs), rhs: Box::new(rhs), span };
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> Result<Expr, ParseFailure> {
        let mut lhs = self.equality()?;
        while matches!(self.peek().map(|t| &t.kind), Some(TokenKind::AndAnd)) {
            self.advance();
            let rhs = self.equality()?;
            let span = SourceSpan::merge(lhs.span(), rhs.span());
            lhs = Expr::Binary { op: BinOp::And, lhs: Box::new(lhs), rhs: Box::new(rhs), span };
        }
        Ok(lhs)
    }

    fn equality(&mut self) -> Result<Expr, ParseFailure> {
        let mut lhs = self.comparison()?;
        loop {
            let op = match self.peek().map(|t| &t.kind) {
                Some(TokenKind::EqEq) => BinOp::Eq,
                Some(TokenKind::Ne) => BinOp::Ne,
                _ => break,
            };
            self.advance();
            let rhs = self.comparison()?;
            let span = SourceSpan::merge(lhs.span(), rhs.span());
            lhs = Expr::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs), span };
        }
        Ok(lhs)
    }

    fn comparison(&mut self) -> Result<Expr, ParseFailure> {
        let mut lhs = self.additive()?;
        loop {
            let op = match self.peek().map(|t| &t.kind) {
                Some(TokenKind::Lt) => BinOp::Lt,
                Some(TokenKind::Le) => BinOp::Le,
                Some(TokenKind::Gt) => BinOp::Gt,
                Some(TokenKind::Ge) => BinOp::Ge,
                _ => break,
            };
            self.advance();
            let rhs = self.additive()?;
            let span = SourceSpan::merge(lhs.span(), rhs.span());
            lhs = Expr::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs), span };
        }
        Ok(lhs)
    }

    fn additive(&mut self) -> Result<Expr, ParseFailure> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek().map(|t| &t.kind) {
                Some(TokenKind::Plus) => BinOp::Add,
                Some(TokenKind::Minus) => BinOp::Sub,
                _ => break,
            };
            self.advance();
            let rhs = self.term()?;
            let span = SourceSpan::merge(lhs.span(), rhs.span());
            lhs = Expr::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs), span };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseFailure> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek().map(|t| &t.kind) {
                Some(TokenKind::Star) => BinOp::Mul,
                Some(TokenKind::Slash) => BinOp::Div,
                Some(TokenKind::Percent) => BinOp::Rem,
                _ => break,
            };
            self.advance();
            let rhs = self.unary()?;
            let span = SourceSpan::merge(lhs.span(), rhs.span());
            lhs = Expr::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs), span };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseFailure> {
        match self.peek().map(|t| &t.kind) {
            Some(TokenKind::Minus) => {
                let start = self.advance().unwrap().span;
                let operand = self.unary()?;
                let span = SourceSpan::merge(start, operand.span());
                Ok(Expr::Unary { op: UnOp::Neg, operand: Box::new(operand), span })
            }
            Some(TokenKind::Not) => {
                let start = self.advance().unwrap().span;
                let operand = self.unary()?;
                let span = SourceSpan::merge(start, operand.span());
                Ok(Expr::Unary { op: UnOp::Not, operand: Box::new(operand), span })
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Expr, ParseFailure> {
        match self.peek().map(|t| t.kind.clone()) {
            Some(TokenKind::Int(n)) => {
                let span = self.advance().unwrap().span;
                Ok(Expr::Int(n, span))
            }
            Some(TokenKind::KwTrue) => {
                let span = self.advance().unwrap().span;
                Ok(Expr::Bool(true, span))
            }
            Some(TokenKind::KwFalse) => {
                let span = self.advance().unwrap().span;
                Ok(Expr::Bool(false, span))
            }
            Some(TokenKind::LParen) => {
                self.advance();
                let inner = self.expr()?;
                self.expect(&TokenKind::RParen, "`)`")?;
                Ok(inner)
            }
            Some(TokenKind::Ident(_)) => {
                let (name, span) = self.expect_ident("expression")?;
                if matches!(self.peek().map(|t| &t.kind), Some(TokenKind::LParen)) {
                    self.advance();
                    let mut args = Vec::new();
                    if !matches!(self.peek().map(|t| &t.kind), Some(TokenKind::RParen)) {
                        loop {
                            args.push(self.expr()?);
                            if matches!(self.peek().map(|t| &t.kind), Some(TokenKind::Comma)) {
                                self.advance();
                            } else {
                                break;
                            }
                        }
                    }
                    let end = self.expect(&TokenKind::RParen, "`)`")?.span;
                    Ok(Expr::Call { name, args, span: SourceSpan::merge(span, end) })
                } else {
                    Ok(Expr::Var(name, span))
                }
            }
            Some(k) => Err(self.fail(
                format!("expected expression, found {}", k.describe()),
                Some("expression"),
            )),
            None => Err(self.fail("expected expression, found end of input", Some("expression"))),
        }
    }
}
