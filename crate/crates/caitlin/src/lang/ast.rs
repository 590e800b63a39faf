//! Abstract syntax tree for the mini-Pascal subset.

use std::fmt;

use crate::trace::{ConstructId, ConstructKind, ExprId};

/// 1-based position in the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SourcePos {
    pub line: u32,
    pub column: u32,
}

impl fmt::Display for SourcePos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarType {
    Integer,
    Boolean,
    Char,
}

impl VarType {
    pub fn name(self) -> &'static str {
        match self {
            VarType::Integer => "INTEGER",
            VarType::Boolean => "BOOLEAN",
            VarType::Char => "CHAR",
        }
    }
}

impl fmt::Display for VarType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Declaration {
    pub name: String,
    pub ty: VarType,
    pub pos: SourcePos,
}

/// A parsed program. `construct_count` and `expr_count` record how many
/// ids the parser assigned; construct ids form a bijection onto
/// `0..construct_count`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub name: String,
    pub declarations: Vec<Declaration>,
    pub body: Vec<Statement>,
    pub construct_count: u32,
    pub expr_count: u32,
    /// SHA-256 of the source text; filled in by [`crate::lang::compile`].
    /// Programs built straight from tokens carry a digest of their token
    /// stream instead.
    pub source_digest: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Statement {
    Assign {
        target: String,
        value: Expr,
        pos: SourcePos,
    },
    Writeln {
        args: Vec<WriteArg>,
        pos: SourcePos,
    },
    Readln {
        target: String,
        pos: SourcePos,
    },
    Compound {
        body: Vec<Statement>,
        pos: SourcePos,
    },
    While {
        id: ConstructId,
        cond: Expr,
        body: Box<Statement>,
        pos: SourcePos,
    },
    Repeat {
        id: ConstructId,
        body: Vec<Statement>,
        cond: Expr,
        pos: SourcePos,
    },
    For {
        id: ConstructId,
        downto: bool,
        var: String,
        from: Expr,
        to: Expr,
        body: Box<Statement>,
        pos: SourcePos,
    },
    If {
        id: ConstructId,
        cond: Expr,
        then_branch: Box<Statement>,
        else_branch: Option<Box<Statement>>,
        pos: SourcePos,
    },
    Case {
        id: ConstructId,
        selector: Expr,
        arms: Vec<CaseArm>,
        else_body: Option<Vec<Statement>>,
        pos: SourcePos,
    },
    Empty {
        pos: SourcePos,
    },
}

impl Statement {
    /// The construct kind of this node, if it is one of the eight
    /// auralizable constructs.
    pub fn construct_kind(&self) -> Option<ConstructKind> {
        match self {
            Statement::While { .. } => Some(ConstructKind::While),
            Statement::Repeat { .. } => Some(ConstructKind::Repeat),
            Statement::For { downto: false, .. } => Some(ConstructKind::ForTo),
            Statement::For { downto: true, .. } => Some(ConstructKind::ForDownto),
            Statement::If { else_branch: None, .. } => Some(ConstructKind::If),
            Statement::If { else_branch: Some(_), .. } => Some(ConstructKind::IfElse),
            Statement::Case { else_body: None, .. } => Some(ConstructKind::Case),
            Statement::Case { else_body: Some(_), .. } => Some(ConstructKind::CaseElse),
            _ => None,
        }
    }

    pub fn pos(&self) -> SourcePos {
        match self {
            Statement::Assign { pos, .. }
            | Statement::Writeln { pos, .. }
            | Statement::Readln { pos, .. }
            | Statement::Compound { pos, .. }
            | Statement::While { pos, .. }
            | Statement::Repeat { pos, .. }
            | Statement::For { pos, .. }
            | Statement::If { pos, .. }
            | Statement::Case { pos, .. }
            | Statement::Empty { pos } => *pos,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WriteArg {
    /// A quoted string literal, printable only inside Writeln.
    Str(String),
    Expr(Expr),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseArm {
    pub labels: Vec<CaseLabel>,
    pub body: Statement,
    pub pos: SourcePos,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseLabel {
    Int(i64),
    Char(char),
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CaseLabel::Int(v) => write!(f, "{v}"),
            CaseLabel::Char(c) => write!(f, "'{}'", if *c == '\'' { "''".to_string() } else { c.to_string() }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Not,
    Neg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "DIV",
            BinaryOp::Mod => "MOD",
            BinaryOp::Eq => "=",
            BinaryOp::Ne => "<>",
            BinaryOp::Lt => "<",
            BinaryOp::Le => "<=",
            BinaryOp::Gt => ">",
            BinaryOp::Ge => ">=",
            BinaryOp::And => "AND",
            BinaryOp::Or => "OR",
        }
    }

    pub fn is_relational(self) -> bool {
        matches!(
            self,
            BinaryOp::Eq | BinaryOp::Ne | BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge
        )
    }

    /// Binding strength, loosest first: OR < AND < relational < additive
    /// < multiplicative.
    pub fn precedence(self) -> u8 {
        match self {
            BinaryOp::Or => 1,
            BinaryOp::And => 2,
            _ if self.is_relational() => 3,
            BinaryOp::Add | BinaryOp::Sub => 4,
            _ => 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    IntLit {
        value: i64,
        id: ExprId,
        pos: SourcePos,
    },
    BoolLit {
        value: bool,
        id: ExprId,
        pos: SourcePos,
    },
    CharLit {
        value: char,
        id: ExprId,
        pos: SourcePos,
    },
    Var {
        name: String,
        id: ExprId,
        pos: SourcePos,
    },
    Unary {
        op: UnaryOp,
        operand: Box<Expr>,
        id: ExprId,
        pos: SourcePos,
    },
    Binary {
        op: BinaryOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
        id: ExprId,
        pos: SourcePos,
    },
}

/// A copy of `program` with all source positions and the digest cleared,
/// so two parses of differently formatted but structurally identical
/// sources compare equal.
pub fn normalized(program: &Program) -> Program {
    const P: SourcePos = SourcePos { line: 0, column: 0 };
    fn norm_stmt(stmt: &Statement) -> Statement {
        match stmt {
            Statement::Assign { target, value, .. } => Statement::Assign {
                target: target.clone(),
                value: norm_expr(value),
                pos: P,
            },
            Statement::Writeln { args, .. } => Statement::Writeln {
                args: args
                    .iter()
                    .map(|a| match a {
                        WriteArg::Str(s) => WriteArg::Str(s.clone()),
                        WriteArg::Expr(e) => WriteArg::Expr(norm_expr(e)),
                    })
                    .collect(),
                pos: P,
            },
            Statement::Readln { target, .. } => Statement::Readln {
                target: target.clone(),
                pos: P,
            },
            Statement::Compound { body, .. } => Statement::Compound {
                body: body.iter().map(norm_stmt).collect(),
                pos: P,
            },
            Statement::While { id, cond, body, .. } => Statement::While {
                id: *id,
                cond: norm_expr(cond),
                body: Box::new(norm_stmt(body)),
                pos: P,
            },
            Statement::Repeat { id, body, cond, .. } => Statement::Repeat {
                id: *id,
                body: body.iter().map(norm_stmt).collect(),
                cond: norm_expr(cond),
                pos: P,
            },
            Statement::For { id, downto, var, from, to, body, .. } => Statement::For {
                id: *id,
                downto: *downto,
                var: var.clone(),
                from: norm_expr(from),
                to: norm_expr(to),
                body: Box::new(norm_stmt(body)),
                pos: P,
            },
            Statement::If { id, cond, then_branch, else_branch, .. } => Statement::If {
                id: *id,
                cond: norm_expr(cond),
                then_branch: Box::new(norm_stmt(then_branch)),
                else_branch: else_branch.as_ref().map(|e| Box::new(norm_stmt(e))),
                pos: P,
            },
            Statement::Case { id, selector, arms, else_body, .. } => Statement::Case {
                id: *id,
                selector: norm_expr(selector),
                arms: arms
                    .iter()
                    .map(|arm| CaseArm {
                        labels: arm.labels.clone(),
                        body: norm_stmt(&arm.body),
                        pos: P,
                    })
                    .collect(),
                else_body: else_body
                    .as_ref()
                    .map(|b| b.iter().map(norm_stmt).collect()),
                pos: P,
            },
            Statement::Empty { .. } => Statement::Empty { pos: P },
        }
    }
    fn norm_expr(expr: &Expr) -> Expr {
        match expr {
            Expr::IntLit { value, id, .. } => Expr::IntLit { value: *value, id: *id, pos: P },
            Expr::BoolLit { value, id, .. } => Expr::BoolLit { value: *value, id: *id, pos: P },
            Expr::CharLit { value, id, .. } => Expr::CharLit { value: *value, id: *id, pos: P },
            Expr::Var { name, id, .. } => Expr::Var { name: name.clone(), id: *id, pos: P },
            Expr::Unary { op, operand, id, .. } => Expr::Unary {
                op: *op,
                operand: Box::new(norm_expr(operand)),
                id: *id,
                pos: P,
            },
            Expr::Binary { op, lhs, rhs, id, .. } => Expr::Binary {
                op: *op,
                lhs: Box::new(norm_expr(lhs)),
                rhs: Box::new(norm_expr(rhs)),
                id: *id,
                pos: P,
            },
        }
    }
    Program {
        name: program.name.clone(),
        declarations: program
            .declarations
            .iter()
            .map(|d| Declaration {
                name: d.name.clone(),
                ty: d.ty,
                pos: P,
            })
            .collect(),
        body: program.body.iter().map(norm_stmt).collect(),
        construct_count: program.construct_count,
        expr_count: program.expr_count,
        source_digest: String::new(),
    }
}

impl Expr {
    pub fn id(&self) -> ExprId {
        match self {
            Expr::IntLit { id, .. }
            | Expr::BoolLit { id, .. }
            | Expr::CharLit { id, .. }
            | Expr::Var { id, .. }
            | Expr::Unary { id, .. }
            | Expr::Binary { id, .. } => *id,
        }
    }

    pub fn pos(&self) -> SourcePos {
        match self {
            Expr::IntLit { pos, .. }
            | Expr::BoolLit { pos, .. }
            | Expr::CharLit { pos, .. }
            | Expr::Var { pos, .. }
            | Expr::Unary { pos, .. }
            | Expr::Binary { pos, .. } => *pos,
        }
    }
}
