//! Recursive descent parser.
//!
//! Binding strength, loosest to tightest: OR, AND, relational, additive,
//! multiplicative, then the prefix operators NOT and unary minus. The
//! binary levels are left-associative. Construct ids are assigned in
//! depth-first source order starting at 0; expression ids are assigned
//! in node creation order.

use thiserror::Error;

use super::ast::*;
use super::lexer::{Keyword, Token, TokenKind};
use crate::trace::{ConstructId, ExprId};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("syntax error at {pos}: expected {expected}, found {found}")]
pub struct ParseError {
    pub expected: String,
    pub found: String,
    pub pos: SourcePos,
}

pub type ParseResult<T> = Result<T, ParseError>;

/// Parses a token stream (as produced by [`super::tokenize`]) into a
/// [`Program`].
pub fn parse(tokens: &[Token]) -> ParseResult<Program> {
    let mut parser = Parser::new(tokens);
    parser.parse_program()
}

/// Parses a standalone expression; the stream must be fully consumed.
#[cfg(test)]
pub(crate) fn parse_expression_only(tokens: &[Token]) -> ParseResult<Expr> {
    let mut parser = Parser::new(tokens);
    let expr = parser.parse_expr()?;
    parser.expect(&TokenKind::Eof, "end of input")?;
    Ok(expr)
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    next_construct: u32,
    next_expr: u32,
}

impl<'a> Parser<'a> {
    fn new(tokens: &'a [Token]) -> Parser<'a> {
        Parser {
            tokens,
            pos: 0,
            next_construct: 0,
            next_expr: 0,
        }
    }

    fn peek(&self) -> &'a Token {
        &self.tokens[self.pos.min(self.tokens.len() - 1)]
    }

    fn bump(&mut self) -> &'a Token {
        let tok = self.peek();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        tok
    }

    fn error<T>(&self, expected: &str) -> ParseResult<T> {
        Err(ParseError {
            expected: expected.to_string(),
            found: self.peek().to_string(),
            pos: self.peek().pos(),
        })
    }

    fn expect(&mut self, kind: &TokenKind, expected: &str) -> ParseResult<&'a Token> {
        if &self.peek().kind == kind {
            Ok(self.bump())
        } else {
            self.error(expected)
        }
    }

    fn expect_kw(&mut self, kw: Keyword, expected: &str) -> ParseResult<&'a Token> {
        self.expect(&TokenKind::Kw(kw), expected)
    }

    fn at_kw(&self, kw: Keyword) -> bool {
        self.peek().kind == TokenKind::Kw(kw)
    }

    fn fresh_construct(&mut self) -> ConstructId {
        let id = ConstructId(self.next_construct);
        self.next_construct += 1;
        id
    }

    fn fresh_expr(&mut self) -> ExprId {
        let id = ExprId(self.next_expr);
        self.next_expr += 1;
        id
    }

    fn parse_ident(&mut self, what: &str) -> ParseResult<(String, SourcePos)> {
        if self.peek().kind == TokenKind::Ident {
            let tok = self.bump();
            Ok((tok.lexeme.clone(), tok.pos()))
        } else {
            self.error(what)
        }
    }

    fn parse_program(&mut self) -> ParseResult<Program> {
        self.expect_kw(Keyword::Program, "PROGRAM")?;
        let (name, _) = self.parse_ident("program name")?;
        self.expect(&TokenKind::Semicolon, "`;`")?;
        let declarations = if self.at_kw(Keyword::Var) {
            self.parse_var_block()?
        } else {
            Vec::new()
        };
        let body = self.parse_compound_body()?;
        self.expect(&TokenKind::Dot, "`.`")?;
        self.expect(&TokenKind::Eof, "end of input")?;
        Ok(Program {
            name,
            declarations,
            body,
            construct_count: self.next_construct,
            expr_count: self.next_expr,
            source_digest: String::new(),
        })
    }

    fn parse_var_block(&mut self) -> ParseResult<Vec<Declaration>> {
        self.expect_kw(Keyword::Var, "VAR")?;
        let mut decls = Vec::new();
        loop {
            let mut group = Vec::new();
            group.push(self.parse_ident("variable name")?);
            while self.peek().kind == TokenKind::Comma {
                self.bump();
                group.push(self.parse_ident("variable name")?);
            }
            self.expect(&TokenKind::Colon, "`:`")?;
            let ty = match self.peek().kind {
                TokenKind::Kw(Keyword::Integer) => VarType::Integer,
                TokenKind::Kw(Keyword::Boolean) => VarType::Boolean,
                TokenKind::Kw(Keyword::Char) => VarType::Char,
                _ => return self.error("a type (INTEGER, BOOLEAN or CHAR)"),
            };
            self.bump();
            self.expect(&TokenKind::Semicolon, "`;`")?;
            for (name, pos) in group {
                decls.push(Declaration { name, ty, pos });
            }
            if self.peek().kind != TokenKind::Ident {
                break;
            }
        }
        Ok(decls)
    }

    /// BEGIN ... END, returning the inner statement list.
    fn parse_compound_body(&mut self) -> ParseResult<Vec<Statement>> {
        self.expect_kw(Keyword::Begin, "BEGIN")?;
        let body = self.parse_statement_seq()?;
        self.expect_kw(Keyword::End, "END")?;
        Ok(body)
    }

    /// Semicolon-separated statements; empty statements are permitted.
    fn parse_statement_seq(&mut self) -> ParseResult<Vec<Statement>> {
        let mut body = vec![self.parse_statement()?];
        while self.peek().kind == TokenKind::Semicolon {
            self.bump();
            body.push(self.parse_statement()?);
        }
        Ok(body)
    }

    fn parse_statement(&mut self) -> ParseResult<Statement> {
        let pos = self.peek().pos();
        match &self.peek().kind {
            TokenKind::Ident => {
                let (target, _) = self.parse_ident("variable name")?;
                self.expect(&TokenKind::Assign, "`:=`")?;
                let value = self.parse_expr()?;
                Ok(Statement::Assign { target, value, pos })
            }
            TokenKind::Kw(Keyword::Writeln) => {
                self.bump();
                let mut args = Vec::new();
                if self.peek().kind == TokenKind::LParen {
                    self.bump();
                    if self.peek().kind != TokenKind::RParen {
                        args.push(self.parse_write_arg()?);
                        while self.peek().kind == TokenKind::Comma {
                            self.bump();
                            args.push(self.parse_write_arg()?);
                        }
                    }
                    self.expect(&TokenKind::RParen, "`)`")?;
                }
                Ok(Statement::Writeln { args, pos })
            }
            TokenKind::Kw(Keyword::Readln) => {
                self.bump();
                self.expect(&TokenKind::LParen, "`(`")?;
                let (target, _) = self.parse_ident("variable name")?;
                self.expect(&TokenKind::RParen, "`)`")?;
                Ok(Statement::Readln { target, pos })
            }
            TokenKind::Kw(Keyword::Begin) => {
                let body = self.parse_compound_body()?;
                Ok(Statement::Compound { body, pos })
            }
            TokenKind::Kw(Keyword::While) => {
                let id = self.fresh_construct();
                self.bump();
                let cond = self.parse_expr()?;
                self.expect_kw(Keyword::Do, "DO")?;
                let body = Box::new(self.parse_statement()?);
                Ok(Statement::While { id, cond, body, pos })
            }
            TokenKind::Kw(Keyword::Repeat) => {
                let id = self.fresh_construct();
                self.bump();
                let body = self.parse_statement_seq()?;
                self.expect_kw(Keyword::Until, "UNTIL")?;
                let cond = self.parse_expr()?;
                Ok(Statement::Repeat { id, body, cond, pos })
            }
            TokenKind::Kw(Keyword::For) => {
                let id = self.fresh_construct();
                self.bump();
                let (var, _) = self.parse_ident("loop variable")?;
                self.expect(&TokenKind::Assign, "`:=`")?;
                let from = self.parse_expr()?;
                let downto = match self.peek().kind {
                    TokenKind::Kw(Keyword::To) => false,
                    TokenKind::Kw(Keyword::Downto) => true,
                    _ => return self.error("TO or DOWNTO"),
                };
                self.bump();
                let to = self.parse_expr()?;
                self.expect_kw(Keyword::Do, "DO")?;
                let body = Box::new(self.parse_statement()?);
                Ok(Statement::For { id, downto, var, from, to, body, pos })
            }
            TokenKind::Kw(Keyword::If) => {
                let id = self.fresh_construct();
                self.bump();
                let cond = self.parse_expr()?;
                self.expect_kw(Keyword::Then, "THEN")?;
                let then_branch = Box::new(self.parse_statement()?);
                let else_branch = if self.at_kw(Keyword::Else) {
                    self.bump();
                    Some(Box::new(self.parse_statement()?))
                } else {
                    None
                };
                Ok(Statement::If { id, cond, then_branch, else_branch, pos })
            }
            TokenKind::Kw(Keyword::Case) => {
                let id = self.fresh_construct();
                self.bump();
                let selector = self.parse_expr()?;
                self.expect_kw(Keyword::Of, "OF")?;
                let mut arms = vec![self.parse_case_arm()?];
                while self.peek().kind == TokenKind::Semicolon {
                    self.bump();
                    if self.at_kw(Keyword::Else) || self.at_kw(Keyword::End) {
                        break;
                    }
                    arms.push(self.parse_case_arm()?);
                }
                let else_body = if self.at_kw(Keyword::Else) {
                    self.bump();
                    Some(self.parse_statement_seq()?)
                } else {
                    None
                };
                self.expect_kw(Keyword::End, "END")?;
                Ok(Statement::Case { id, selector, arms, else_body, pos })
            }
            _ => Ok(Statement::Empty { pos }),
        }
    }

    fn parse_write_arg(&mut self) -> ParseResult<WriteArg> {
        // A quoted literal directly followed by `,` or `)` is a string
        // argument; anything else is an expression.
        if let TokenKind::QuotedLiteral(text) = &self.peek().kind {
            let next = &self.tokens[(self.pos + 1).min(self.tokens.len() - 1)].kind;
            if matches!(next, TokenKind::Comma | TokenKind::RParen) {
                let text = text.clone();
                self.bump();
                return Ok(WriteArg::Str(text));
            }
        }
        Ok(WriteArg::Expr(self.parse_expr()?))
    }

    fn parse_case_arm(&mut self) -> ParseResult<CaseArm> {
        let pos = self.peek().pos();
        let mut labels = vec![self.parse_case_label()?];
        while self.peek().kind == TokenKind::Comma {
            self.bump();
            labels.push(self.parse_case_label()?);
        }
        self.expect(&TokenKind::Colon, "`:`")?;
        let body = self.parse_statement()?;
        Ok(CaseArm { labels, body, pos })
    }

    fn parse_case_label(&mut self) -> ParseResult<CaseLabel> {
        match &self.peek().kind {
            TokenKind::IntLiteral(v) => {
                let v = *v;
                self.bump();
                Ok(CaseLabel::Int(v))
            }
            TokenKind::Minus => {
                self.bump();
                if let TokenKind::IntLiteral(v) = self.peek().kind {
                    self.bump();
                    Ok(CaseLabel::Int(-v))
                } else {
                    self.error("integer literal")
                }
            }
            TokenKind::QuotedLiteral(text) if text.chars().count() == 1 => {
                let c = text.chars().next().unwrap();
                self.bump();
                Ok(CaseLabel::Char(c))
            }
            _ => self.error("a case label (integer or char literal)"),
        }
    }

    fn parse_expr(&mut self) -> ParseResult<Expr> {
        self.parse_binary(1)
    }

    fn parse_binary(&mut self, min_prec: u8) -> ParseResult<Expr> {
        if min_prec > 5 {
            return self.parse_unary();
        }
        let mut lhs = self.parse_binary(min_prec + 1)?;
        while let Some(op) = self.peek_binary_op() {
            if op.precedence() != min_prec {
                break;
            }
            let pos = self.peek().pos();
            self.bump();
            let rhs = self.parse_binary(min_prec + 1)?;
            lhs = Expr::Binary {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
                id: self.fresh_expr(),
                pos,
            };
        }
        Ok(lhs)
    }

    fn peek_binary_op(&self) -> Option<BinaryOp> {
        Some(match self.peek().kind {
            TokenKind::Plus => BinaryOp::Add,
            TokenKind::Minus => BinaryOp::Sub,
            TokenKind::Star => BinaryOp::Mul,
            TokenKind::Kw(Keyword::Div) => BinaryOp::Div,
            TokenKind::Kw(Keyword::Mod) => BinaryOp::Mod,
            TokenKind::Eq => BinaryOp::Eq,
            TokenKind::Ne => BinaryOp::Ne,
            TokenKind::Lt => BinaryOp::Lt,
            TokenKind::Le => BinaryOp::Le,
            TokenKind::Gt => BinaryOp::Gt,
            TokenKind::Ge => BinaryOp::Ge,
            TokenKind::Kw(Keyword::And) => BinaryOp::And,
            TokenKind::Kw(Keyword::Or) => BinaryOp::Or,
            _ => return None,
        })
    }

    fn parse_unary(&mut self) -> ParseResult<Expr> {
        let pos = self.peek().pos();
        match self.peek().kind {
            TokenKind::Kw(Keyword::Not) => {
                self.bump();
                let operand = Box::new(self.parse_unary()?);
                Ok(Expr::Unary { op: UnaryOp::Not, operand, id: self.fresh_expr(), pos })
            }
            TokenKind::Minus => {
                self.bump();
                let operand = Box::new(self.parse_unary()?);
                Ok(Expr::Unary { op: UnaryOp::Neg, operand, id: self.fresh_expr(), pos })
            }
            _ => self.parse_primary(),
        }
    }

    fn parse_primary(&mut self) -> ParseResult<Expr> {
        let pos = self.peek().pos();
        match &self.peek().kind {
            TokenKind::IntLiteral(v) => {
                let value = *v;
                self.bump();
                Ok(Expr::IntLit { value, id: self.fresh_expr(), pos })
            }
            TokenKind::Kw(Keyword::True) => {
                self.bump();
                Ok(Expr::BoolLit { value: true, id: self.fresh_expr(), pos })
            }
            TokenKind::Kw(Keyword::False) => {
                self.bump();
                Ok(Expr::BoolLit { value: false, id: self.fresh_expr(), pos })
            }
            TokenKind::QuotedLiteral(text) => {
                let mut chars = text.chars();
                match (chars.next(), chars.next()) {
                    (Some(c), None) => {
                        self.bump();
                        Ok(Expr::CharLit { value: c, id: self.fresh_expr(), pos })
                    }
                    _ => self.error("a char literal of exactly one character"),
                }
            }
            TokenKind::Ident => {
                let tok = self.bump();
                Ok(Expr::Var { name: tok.lexeme.clone(), id: self.fresh_expr(), pos })
            }
            TokenKind::LParen => {
                self.bump();
                let inner = self.parse_expr()?;
                self.expect(&TokenKind::RParen, "`)`")?;
                Ok(inner)
            }
            _ => self.error("an expression"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::tokenize;
    use crate::trace::ConstructKind;

    fn parse_source(source: &str) -> Program {
        parse(&tokenize(source).unwrap()).unwrap()
    }

    fn parse_expr_source(source: &str) -> Expr {
        parse_expression_only(&tokenize(source).unwrap()).unwrap()
    }

    /// Fully parenthesized rendering, used to compare parse shapes.
    fn shape(expr: &Expr) -> String {
        match expr {
            Expr::IntLit { value, .. } => value.to_string(),
            Expr::BoolLit { value, .. } => value.to_string(),
            Expr::CharLit { value, .. } => format!("'{value}'"),
            Expr::Var { name, .. } => name.clone(),
            Expr::Unary { op, operand, .. } => {
                let sym = match op {
                    UnaryOp::Not => "NOT ",
                    UnaryOp::Neg => "-",
                };
                format!("({sym}{})", shape(operand))
            }
            Expr::Binary { op, lhs, rhs, .. } => {
                format!("({} {} {})", shape(lhs), op.symbol(), shape(rhs))
            }
        }
    }

    /// Independent precedence oracle: the top of a span is the rightmost
    /// operator of minimal precedence (left-associativity), recursing on
    /// the two halves.
    fn oracle_shape(operands: &[i64], ops: &[BinaryOp]) -> String {
        assert_eq!(operands.len(), ops.len() + 1);
        if ops.is_empty() {
            return operands[0].to_string();
        }
        let min_prec = ops.iter().map(|o| o.precedence()).min().unwrap();
        let split = ops.iter().rposition(|o| o.precedence() == min_prec).unwrap();
        let left = oracle_shape(&operands[..=split], &ops[..split]);
        let right = oracle_shape(&operands[split + 1..], &ops[split + 1..]);
        format!("({} {} {})", left, ops[split].symbol(), right)
    }

    #[test]
    fn parser_agrees_with_precedence_oracle_on_all_short_expressions() {
        let all_ops = [
            BinaryOp::Add,
            BinaryOp::Sub,
            BinaryOp::Mul,
            BinaryOp::Div,
            BinaryOp::Mod,
            BinaryOp::Eq,
            BinaryOp::Ne,
            BinaryOp::Lt,
            BinaryOp::Le,
            BinaryOp::Gt,
            BinaryOp::Ge,
            BinaryOp::And,
            BinaryOp::Or,
        ];
        let mut cases = 0;
        for n_ops in 1..=3 {
            let mut combo = vec![0usize; n_ops];
            loop {
                let ops: Vec<BinaryOp> = combo.iter().map(|&i| all_ops[i]).collect();
                let operands: Vec<i64> = (1..=n_ops as i64 + 1).collect();
                let mut source = String::new();
                for (i, v) in operands.iter().enumerate() {
                    if i > 0 {
                        source.push_str(&format!(" {} ", ops[i - 1].symbol()));
                    }
                    source.push_str(&v.to_string());
                }
                let parsed = parse_expr_source(&source);
                assert_eq!(
                    shape(&parsed),
                    oracle_shape(&operands, &ops),
                    "mismatch for `{source}`"
                );
                cases += 1;
                // Next combination.
                let mut i = 0;
                loop {
                    combo[i] += 1;
                    if combo[i] < all_ops.len() {
                        break;
                    }
                    combo[i] = 0;
                    i += 1;
                    if i == n_ops {
                        break;
                    }
                }
                if i == n_ops {
                    break;
                }
            }
        }
        assert_eq!(cases, 13 + 13 * 13 + 13 * 13 * 13);
    }

    #[test]
    fn multiplication_binds_tighter_than_addition() {
        assert_eq!(shape(&parse_expr_source("1 + 2 * 3")), "(1 + (2 * 3))");
    }

    #[test]
    fn not_binds_tighter_than_relational() {
        assert_eq!(shape(&parse_expr_source("NOT a = b")), "((NOT a) = b)");
    }

    #[test]
    fn relational_binds_tighter_than_and_and_or() {
        assert_eq!(
            shape(&parse_expr_source("a < b AND c > d OR e = f")),
            "(((a < b) AND (c > d)) OR (e = f))"
        );
    }

    #[test]
    fn parentheses_override_precedence() {
        assert_eq!(shape(&parse_expr_source("(1 + 2) * 3")), "((1 + 2) * 3)");
    }

    const CASE_ELSE_PROGRAM: &str = "\
PROGRAM demo ;
VAR a, b : INTEGER ;
BEGIN
  a := b + 3 ;
  CASE a OF
    1 : Writeln('Found 1') ;
    2 : Writeln('Found 2') ;
    3 : Writeln('Found 3')
  ELSE
    Writeln('Not found')
  END
END .
";

    #[test]
    fn case_with_else_parses_to_three_arms() {
        let program = parse_source(CASE_ELSE_PROGRAM);
        let Statement::Case { arms, else_body, .. } = &program.body[1] else {
            panic!("expected CASE statement");
        };
        assert_eq!(arms.len(), 3);
        assert!(else_body.is_some());
        assert_eq!(
            program.body[1].construct_kind(),
            Some(ConstructKind::CaseElse)
        );
    }

    #[test]
    fn if_without_else_is_plain_if() {
        let program =
            parse_source("PROGRAM p ; VAR a, x : INTEGER ; BEGIN IF a = 0 THEN x := 1 END .");
        assert_eq!(program.body[0].construct_kind(), Some(ConstructKind::If));
    }

    #[test]
    fn construct_ids_are_dense_in_source_order() {
        let program = parse_source(
            "PROGRAM p ; VAR i, x : INTEGER ;
             BEGIN
               WHILE i < 3 DO
                 IF x = 0 THEN x := 1 ;
               FOR i := 1 TO 2 DO x := x + 1
             END .",
        );
        assert_eq!(program.construct_count, 3);
        let Statement::While { id, body, .. } = &program.body[0] else {
            panic!()
        };
        assert_eq!(*id, ConstructId(0));
        let Statement::If { id: if_id, .. } = body.as_ref() else {
            panic!()
        };
        assert_eq!(*if_id, ConstructId(1));
        let Statement::For { id: for_id, .. } = &program.body[1] else {
            panic!()
        };
        assert_eq!(*for_id, ConstructId(2));
    }

    #[test]
    fn syntax_error_carries_expectation_and_position() {
        let err = parse(&tokenize("PROGRAM p BEGIN END .").unwrap()).unwrap_err();
        assert!(err.expected.contains(";"));
        assert_eq!(err.pos, SourcePos { line: 1, column: 11 });
    }

    #[test]
    fn bare_writeln_takes_no_arguments() {
        let program = parse_source("PROGRAM p ; BEGIN Writeln END .");
        let Statement::Writeln { args, .. } = &program.body[0] else {
            panic!()
        };
        assert!(args.is_empty());
    }
}
