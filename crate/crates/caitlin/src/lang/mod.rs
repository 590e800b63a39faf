//! Frontend for the mini-Pascal subset hosting the eight auralizable
//! constructs: WHILE, REPEAT, FOR..TO, FOR..DOWNTO, IF, IF..ELSE, CASE
//! and CASE..ELSE, over integer/boolean/char variables.

mod ast;
mod check;
mod lexer;
mod parser;
mod pretty;

pub use ast::{
    normalized, CaseArm, CaseLabel, Declaration, Expr, BinaryOp, Program, SourcePos, Statement,
    UnaryOp, VarType, WriteArg,
};
pub use check::{check, Diagnostic};
pub use lexer::{tokenize, Keyword, LexError, Token, TokenCategory, TokenKind};
pub use parser::{parse, ParseError};
#[cfg(test)]
pub(crate) use parser::parse_expression_only;
pub use pretty::pretty_print;

use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CompileError {
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// SHA-256 of the source bytes, lowercase hex. Ties traces to the exact
/// source text they were recorded from.
pub fn source_digest(source: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(source.as_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Tokenize + parse, stamping the program with the digest of `source`.
/// Static checking is separate; see [`check`].
pub fn compile(source: &str) -> Result<Program, CompileError> {
    let tokens = tokenize(source)?;
    let mut program = parse(&tokens)?;
    program.source_digest = source_digest(source);
    Ok(program)
}
