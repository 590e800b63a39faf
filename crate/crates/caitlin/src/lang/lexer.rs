//! Lexer. Keywords are case-insensitive; `{ ... }` comments are skipped;
//! quoted literals use `''` to escape a single quote.

use std::fmt;

use thiserror::Error;

use super::ast::SourcePos;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Keyword {
    Program,
    Var,
    Begin,
    End,
    If,
    Then,
    Else,
    While,
    Do,
    Repeat,
    Until,
    For,
    To,
    Downto,
    Case,
    Of,
    Writeln,
    Readln,
    Div,
    Mod,
    And,
    Or,
    Not,
    True,
    False,
    Integer,
    Boolean,
    Char,
}

impl Keyword {
    fn from_ident(ident: &str) -> Option<Keyword> {
        Some(match ident.to_ascii_lowercase().as_str() {
            "program" => Keyword::Program,
            "var" => Keyword::Var,
            "begin" => Keyword::Begin,
            "end" => Keyword::End,
            "if" => Keyword::If,
            "then" => Keyword::Then,
            "else" => Keyword::Else,
            "while" => Keyword::While,
            "do" => Keyword::Do,
            "repeat" => Keyword::Repeat,
            "until" => Keyword::Until,
            "for" => Keyword::For,
            "to" => Keyword::To,
            "downto" => Keyword::Downto,
            "case" => Keyword::Case,
            "of" => Keyword::Of,
            "writeln" => Keyword::Writeln,
            "readln" => Keyword::Readln,
            "div" => Keyword::Div,
            "mod" => Keyword::Mod,
            "and" => Keyword::And,
            "or" => Keyword::Or,
            "not" => Keyword::Not,
            "true" => Keyword::True,
            "false" => Keyword::False,
            "integer" => Keyword::Integer,
            "boolean" => Keyword::Boolean,
            "char" => Keyword::Char,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Ident,
    IntLiteral(i64),
    /// Contents of a `'...'` literal with escapes resolved. One character
    /// is a char literal; other lengths are string literals, valid only
    /// as Writeln arguments.
    QuotedLiteral(String),
    Kw(Keyword),
    Assign,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    Minus,
    Star,
    Semicolon,
    Colon,
    Comma,
    LParen,
    RParen,
    Dot,
    Eof,
}

/// Coarse token classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenCategory {
    Keyword,
    Identifier,
    IntegerLiteral,
    CharLiteral,
    Operator,
    Punctuation,
    Eof,
}

impl TokenKind {
    pub fn category(&self) -> TokenCategory {
        match self {
            TokenKind::Ident => TokenCategory::Identifier,
            TokenKind::IntLiteral(_) => TokenCategory::IntegerLiteral,
            TokenKind::QuotedLiteral(_) => TokenCategory::CharLiteral,
            TokenKind::Kw(_) => TokenCategory::Keyword,
            TokenKind::Assign
            | TokenKind::Eq
            | TokenKind::Ne
            | TokenKind::Lt
            | TokenKind::Le
            | TokenKind::Gt
            | TokenKind::Ge
            | TokenKind::Plus
            | TokenKind::Minus
            | TokenKind::Star => TokenCategory::Operator,
            TokenKind::Semicolon
            | TokenKind::Colon
            | TokenKind::Comma
            | TokenKind::LParen
            | TokenKind::RParen
            | TokenKind::Dot => TokenCategory::Punctuation,
            TokenKind::Eof => TokenCategory::Eof,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub lexeme: String,
    pub line: u32,
    pub column: u32,
}

impl Token {
    pub fn pos(&self) -> SourcePos {
        SourcePos {
            line: self.line,
            column: self.column,
        }
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.kind == TokenKind::Eof {
            f.write_str("end of input")
        } else {
            write!(f, "`{}`", self.lexeme)
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("lexical error at {line}:{column}: {message}")]
pub struct LexError {
    pub message: String,
    pub line: u32,
    pub column: u32,
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: u32,
    column: u32,
}

impl<'a> Cursor<'a> {
    fn new(source: &'a str) -> Cursor<'a> {
        Cursor {
            chars: source.chars().peekable(),
            line: 1,
            column: 1,
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }
}

/// Produces the full token stream for `source`, ending in an EOF token.
pub fn tokenize(source: &str) -> Result<Vec<Token>, LexError> {
    let mut cur = Cursor::new(source);
    let mut tokens = Vec::new();
    loop {
        while matches!(cur.peek(), Some(c) if c.is_whitespace()) {
            cur.bump();
        }
        if cur.peek() == Some('{') {
            let (line, column) = (cur.line, cur.column);
            cur.bump();
            loop {
                match cur.bump() {
                    Some('}') => break,
                    Some(_) => {}
                    None => {
                        return Err(LexError {
                            message: "unterminated comment".to_string(),
                            line,
                            column,
                        })
                    }
                }
            }
            continue;
        }
        let (line, column) = (cur.line, cur.column);
        let Some(c) = cur.peek() else {
            tokens.push(Token {
                kind: TokenKind::Eof,
                lexeme: String::new(),
                line,
                column,
            });
            return Ok(tokens);
        };
        let token = if c.is_ascii_alphabetic() {
            let mut ident = String::new();
            while matches!(cur.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
                ident.push(cur.bump().unwrap());
            }
            let kind = match Keyword::from_ident(&ident) {
                Some(kw) => TokenKind::Kw(kw),
                None => TokenKind::Ident,
            };
            Token { kind, lexeme: ident, line, column }
        } else if c.is_ascii_digit() {
            let mut digits = String::new();
            while matches!(cur.peek(), Some(c) if c.is_ascii_digit()) {
                digits.push(cur.bump().unwrap());
            }
            let value: i64 = digits.parse().map_err(|_| LexError {
                message: format!("integer literal `{digits}` out of range"),
                line,
                column,
            })?;
            Token {
                kind: TokenKind::IntLiteral(value),
                lexeme: digits,
                line,
                column,
            }
        } else if c == '\'' {
            cur.bump();
            let mut contents = String::new();
            let mut lexeme = String::from("'");
            loop {
                match cur.peek() {
                    None | Some('\n') => {
                        return Err(LexError {
                            message: "unterminated char literal".to_string(),
                            line,
                            column,
                        })
                    }
                    Some('\'') => {
                        cur.bump();
                        lexeme.push('\'');
                        // Doubled quote is an escaped quote.
                        if cur.peek() == Some('\'') {
                            cur.bump();
                            lexeme.push('\'');
                            contents.push('\'');
                        } else {
                            break;
                        }
                    }
                    Some(other) => {
                        cur.bump();
                        lexeme.push(other);
                        contents.push(other);
                    }
                }
            }
            Token {
                kind: TokenKind::QuotedLiteral(contents),
                lexeme,
                line,
                column,
            }
        } else {
            cur.bump();
            let (kind, lexeme) = match c {
                ':' => {
                    if cur.peek() == Some('=') {
                        cur.bump();
                        (TokenKind::Assign, ":=")
                    } else {
                        (TokenKind::Colon, ":")
                    }
                }
                '<' => match cur.peek() {
                    Some('=') => {
                        cur.bump();
                        (TokenKind::Le, "<=")
                    }
                    Some('>') => {
                        cur.bump();
                        (TokenKind::Ne, "<>")
                    }
                    _ => (TokenKind::Lt, "<"),
                },
                '>' => {
                    if cur.peek() == Some('=') {
                        cur.bump();
                        (TokenKind::Ge, ">=")
                    } else {
                        (TokenKind::Gt, ">")
                    }
                }
                '=' => (TokenKind::Eq, "="),
                '+' => (TokenKind::Plus, "+"),
                '-' => (TokenKind::Minus, "-"),
                '*' => (TokenKind::Star, "*"),
                ';' => (TokenKind::Semicolon, ";"),
                ',' => (TokenKind::Comma, ","),
                '(' => (TokenKind::LParen, "("),
                ')' => (TokenKind::RParen, ")"),
                '.' => (TokenKind::Dot, "."),
                other => {
                    return Err(LexError {
                        message: format!("illegal character `{other}`"),
                        line,
                        column,
                    })
                }
            };
            Token {
                kind,
                lexeme: lexeme.to_string(),
                line,
                column,
            }
        };
        tokens.push(token);
    }
}
