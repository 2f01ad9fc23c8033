use super::ast::SourceSpan;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Ident(String),
    Int(i64),
    KwFn,
    KwLet,
    KwIf,
    KwElse,
    KwWhile,
    KwReturn,
    KwTrue,
    KwFalse,
    KwInt,
    KwBool,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Colon,
    Semi,
    Assign,
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
    Lt,
    Le,
    // `>` doubles as the second half of the `->` return-type arrow; the
    // lexer never fuses `-` and `>` into one token.
    Gt,
    Ge,
    EqEq,
    Ne,
    Not,
    AndAnd,
    OrOr,
}

impl TokenKind {
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Ident(s) => format!("identifier `{s}`"),
            TokenKind::Int(n) => format!("integer `{n}`"),
            TokenKind::KwFn => "`fn`".into(),
            TokenKind::KwLet => "`let`".into(),
            TokenKind::KwIf => "`if`".into(),
            TokenKind::KwElse => "`else`".into(),
            TokenKind::KwWhile => "`while`".into(),
            TokenKind::KwReturn => "`return`".into(),
            TokenKind::KwTrue => "`true`".into(),
            TokenKind::KwFalse => "`false`".into(),
            TokenKind::KwInt => "`int`".into(),
            TokenKind::KwBool => "`bool`".into(),
            TokenKind::LParen => "`(`".into(),
            TokenKind::RParen => "`)`".into(),
            TokenKind::LBrace => "`{`".into(),
            TokenKind::RBrace => "`}`".into(),
            TokenKind::Comma => "`,`".into(),
            TokenKind::Colon => "`:`".into(),
            TokenKind::Semi => "`;`".into(),
            TokenKind::Assign => "`=`".into(),
            TokenKind::Plus => "`+`".into(),
            TokenKind::Minus => "`-`".into(),
            TokenKind::Star => "`*`".into(),
            TokenKind::Slash => "`/`".into(),
            TokenKind::Percent => "`%`".into(),
            TokenKind::Lt => "`<`".into(),
            TokenKind::Le => "`<=`".into(),
            TokenKind::Gt => "`>`".into(),
            TokenKind::Ge => "`>=`".into(),
            TokenKind::EqEq => "`==`".into(),
            TokenKind::Ne => "`!=`".into(),
            TokenKind::Not => "`!`".into(),
            TokenKind::AndAnd => "`&&`".into(),
            TokenKind::OrOr => "`||`".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("lex error at line {line}, col {col}: {message}")]
pub struct LexFailure {
    pub line: u32,
    pub col: u32,
    pub message: String,
}

/// Lexes MiniLang source into tokens with 1-indexed spans. Any character
/// outside the MiniLang alphabet is a failure, never a panic.
pub fn tokenize(text: &str) -> Result<Vec<Token>, LexFailure> {
    let mut tokens = Vec::new();
    let mut line: u32 = 1;
    let mut col: u32 = 1;
    let mut chars = text.chars().peekable();

    macro_rules! single {
        ($kind:expr) => {{
            tokens.push(Token {
                kind: $kind,
                span: SourceSpan::new(line, col, line, col),
            });
            col += 1;
        }};
    }

    while let Some(&c) = chars.peek() {
        match c {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            ' ' | '\t' | '\r' => {
                chars.next();
                col += 1;
            }
            '0'..='9' => {
                let start_col = col;
                let mut lit = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_digit() {
                        lit.push(d);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                let value: i64 = lit.parse().map_err(|_| LexFailure {
                    line,
                    col: start_col,
                    message: format!("integer literal `{lit}` out of range"),
                })?;
                tokens.push(Token {
                    kind: TokenKind::Int(value),
                    span: SourceSpan::new(line, start_col, line, col - 1),
                });
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start_col = col;
                let mut word = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_alphanumeric() || d == '_' {
                        word.push(d);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                let kind = match word.as_str() {
                    "fn" => TokenKind::KwFn,
                    "let" => TokenKind::KwLet,
                    "if" => TokenKind::KwIf,
                    "else" => TokenKind::KwElse,
                    "while" => TokenKind::KwWhile,
                    "return" => TokenKind::KwReturn,
                    "true" => TokenKind::KwTrue,
                    "false" => TokenKind::KwFalse,
                    "int" => TokenKind::KwInt,
                    "bool" => TokenKind::KwBool,
                    _ => TokenKind::Ident(word),
                };
                tokens.push(Token {
                    kind,
                    span: SourceSpan::new(line, start_col, line, col - 1),
                });
            }
            '(' => {
                chars.next();
                single!(TokenKind::LParen)
            }
            ')' => {
                chars.next();
                single!(TokenKind::RParen)
            }
            '{' => {
                chars.next();
                single!(TokenKind::LBrace)
            }
            '}' => {
                chars.next();
                single!(TokenKind::RBrace)
            }
            ',' => {
                chars.next();
                single!(TokenKind::Comma)
            }
            ':' => {
                chars.next();
                single!(TokenKind::Colon)
            }
            ';' => {
                chars.next();
                single!(TokenKind::Semi)
            }
            '+' => {
                chars.next();
                single!(TokenKind::Plus)
            }
            '-' => {
                chars.next();
                single!(TokenKind::Minus)
            }
            '*' => {
                chars.next();
                single!(TokenKind::Star)
            }
            '/' => {
                chars.next();
                single!(TokenKind::Slash)
            }
            '%' => {
                chars.next();
                single!(TokenKind::Percent)
            }
            '=' | '<' | '>' | '!' => {
                chars.next();
                let start_col = col;
                col += 1;
                let two = chars.peek() == Some(&'=');
                if two {
                    chars.next();
                    col += 1;
                }
                let kind = match (c, two) {
                    ('=', true) => TokenKind::EqEq,
                    ('=', false) => TokenKind::Assign,
                    ('<', true) => TokenKind::Le,
                    ('<', false) => TokenKind::Lt,
                    ('>', true) => TokenKind::Ge,
                    ('>', false) => TokenKind::Gt,
                    ('!', true) => TokenKind::Ne,
                    ('!', false) => TokenKind::Not,
                    _ => unreachable!(),
                };
                let end = if two { start_col + 1 } else { start_col };
                tokens.push(Token {
                    kind,
                    span: SourceSpan::new(line, start_col, line, end),
                });
            }
            '&' => {
                chars.next();
                if chars.peek() == Some(&'&') {
                    chars.next();
                    tokens.push(Token {
                        kind: TokenKind::AndAnd,
                        span: SourceSpan::new(line, col, line, col + 1),
                    });
                    col += 2;
                } else {
                    return Err(LexFailure {
                        line,
                        col,
                        message: "expected `&&`".into(),
                    });
                }
            }
            '|' => {
                chars.next();
                if chars.peek() == Some(&'|') {
                    chars.next();
                    tokens.push(Token {
                        kind: TokenKind::OrOr,
                        span: SourceSpan::new(line, col, line, col + 1),
                    });
                    col += 2;
                } else {
                    return Err(LexFailure {
                        line,
                        col,
                        message: "expected `||`".into(),
                    });
                }
            }
            other => {
                return Err(LexFailure {
                    line,
                    col,
                    message: format!("character `{}` is not in the MiniLang alphabet", other.escape_default()),
                });
            }
        }
    }
    Ok(tokens)
}
