//! Static checks: declarations, types, case-label discipline and FOR
//! loop-variable protection.

use std::collections::HashMap;
use std::fmt;

use super::ast::*;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub message: String,
    pub pos: SourcePos,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.pos, self.message)
    }
}

struct Checker {
    symbols: HashMap<String, VarType>,
    active_loop_vars: Vec<String>,
    diagnostics: Vec<Diagnostic>,
}

/// Returns all diagnostics for `program`; an empty list means the
/// program is ready to run.
pub fn check(program: &Program) -> Vec<Diagnostic> {
    let mut checker = Checker {
        symbols: HashMap::new(),
        active_loop_vars: Vec::new(),
        diagnostics: Vec::new(),
    };
    for decl in &program.declarations {
        let key = decl.name.to_ascii_lowercase();
        if checker.symbols.insert(key, decl.ty).is_some() {
            checker.report(
                format!("duplicate declaration of `{}`", decl.name),
                decl.pos,
            );
        }
    }
    checker.check_seq(&program.body);
    checker.diagnostics
}

impl Checker {
    fn report(&mut self, message: String, pos: SourcePos) {
        self.diagnostics.push(Diagnostic { message, pos });
    }

    fn lookup(&mut self, name: &str, pos: SourcePos) -> Option<VarType> {
        let ty = self.symbols.get(&name.to_ascii_lowercase()).copied();
        if ty.is_none() {
            self.report(format!("undeclared variable `{name}`"), pos);
        }
        ty
    }

    fn guard_loop_var(&mut self, name: &str, what: &str, pos: SourcePos) {
        if self
            .active_loop_vars
            .iter()
            .any(|v| v.eq_ignore_ascii_case(name))
        {
            self.report(
                format!("{what} of FOR loop variable `{name}` inside its loop body"),
                pos,
            );
        }
    }

    fn check_seq(&mut self, body: &[Statement]) {
        for stmt in body {
            self.check_statement(stmt);
        }
    }

    fn check_statement(&mut self, stmt: &Statement) {
        match stmt {
            Statement::Assign { target, value, pos } => {
                self.guard_loop_var(target, "assignment", *pos);
                let target_ty = self.lookup(target, *pos);
                let value_ty = self.type_of(value);
                if let (Some(t), Some(v)) = (target_ty, value_ty) {
                    if t != v {
                        self.report(
                            format!("cannot assign {v} value to `{target}` of type {t}"),
                            *pos,
                        );
                    }
                }
            }
            Statement::Writeln { args, .. } => {
                for arg in args {
                    if let WriteArg::Expr(expr) = arg {
                        self.type_of(expr);
                    }
                }
            }
            Statement::Readln { target, pos } => {
                self.guard_loop_var(target, "Readln", *pos);
                self.lookup(target, *pos);
            }
            Statement::Compound { body, .. } => self.check_seq(body),
            Statement::While { cond, body, pos, .. } => {
                self.expect_boolean(cond, "WHILE condition", *pos);
                self.check_statement(body);
            }
            Statement::Repeat { body, cond, pos, .. } => {
                self.check_seq(body);
                self.expect_boolean(cond, "UNTIL condition", *pos);
            }
            Statement::For { var, from, to, body, pos, .. } => {
                self.guard_loop_var(var, "reuse", *pos);
                match self.lookup(var, *pos) {
                    Some(VarType::Integer) | None => {}
                    Some(other) => {
                        self.report(
                            format!("FOR loop variable `{var}` must be INTEGER, not {other}"),
                            *pos,
                        );
                    }
                }
                self.expect_integer(from, "FOR start bound");
                self.expect_integer(to, "FOR end bound");
                self.active_loop_vars.push(var.clone());
                self.check_statement(body);
                self.active_loop_vars.pop();
            }
            Statement::If { cond, then_branch, else_branch, pos, .. } => {
                self.expect_boolean(cond, "IF condition", *pos);
                self.check_statement(then_branch);
                if let Some(else_branch) = else_branch {
                    self.check_statement(else_branch);
                }
            }
            Statement::Case { selector, arms, else_body, pos, .. } => {
                let selector_ty = self.type_of(selector);
                match selector_ty {
                    Some(VarType::Integer) | Some(VarType::Char) | None => {}
                    Some(other) => {
                        self.report(
                            format!("CASE selector must be INTEGER or CHAR, not {other}"),
                            *pos,
                        );
                    }
                }
                let mut seen: Vec<CaseLabel> = Vec::new();
                for arm in arms {
                    for label in &arm.labels {
                        let label_ty = match label {
                            CaseLabel::Int(_) => VarType::Integer,
                            CaseLabel::Char(_) => VarType::Char,
                        };
                        if let Some(sel) = selector_ty {
                            if sel != label_ty && sel != VarType::Boolean {
                                self.report(
                                    format!(
                                        "case label {label} has type {label_ty}, selector has type {sel}"
                                    ),
                                    arm.pos,
                                );
                            }
                        }
                        if seen.contains(label) {
                            self.report(format!("duplicate case label {label}"), arm.pos);
                        } else {
                            seen.push(*label);
                        }
                    }
                    self.check_statement(&arm.body);
                }
                if let Some(else_body) = else_body {
                    self.check_seq(else_body);
                }
            }
            Statement::Empty { .. } => {}
        }
    }

    fn expect_boolean(&mut self, expr: &Expr, what: &str, pos: SourcePos) {
        if let Some(ty) = self.type_of(expr) {
            if ty != VarType::Boolean {
                self.report(format!("{what} must be BOOLEAN, not {ty}"), pos);
            }
        }
    }

    fn expect_integer(&mut self, expr: &Expr, what: &str) {
        if let Some(ty) = self.type_of(expr) {
            if ty != VarType::Integer {
                self.report(format!("{what} must be INTEGER, not {ty}"), expr.pos());
            }
        }
    }

    /// Infers the type of `expr`, reporting type errors. `None` means a
    /// diagnostic was already issued somewhere below.
    fn type_of(&mut self, expr: &Expr) -> Option<VarType> {
        match expr {
            Expr::IntLit { .. } => Some(VarType::Integer),
            Expr::BoolLit { .. } => Some(VarType::Boolean),
            Expr::CharLit { .. } => Some(VarType::Char),
            Expr::Var { name, pos, .. } => self.lookup(name, *pos),
            Expr::Unary { op, operand, pos, .. } => {
                let ty = self.type_of(operand)?;
                match op {
                    UnaryOp::Not if ty == VarType::Boolean => Some(VarType::Boolean),
                    UnaryOp::Not => {
                        self.report(format!("NOT requires a BOOLEAN operand, not {ty}"), *pos);
                        None
                    }
                    UnaryOp::Neg if ty == VarType::Integer => Some(VarType::Integer),
                    UnaryOp::Neg => {
                        self.report(format!("unary `-` requires an INTEGER operand, not {ty}"), *pos);
                        None
                    }
                }
            }
            Expr::Binary { op, lhs, rhs, pos, .. } => {
                let lt = self.type_of(lhs);
                let rt = self.type_of(rhs);
                let (lt, rt) = (lt?, rt?);
                match op {
                    BinaryOp::Add | BinaryOp::Sub | BinaryOp::Mul | BinaryOp::Div | BinaryOp::Mod => {
                        if lt == VarType::Integer && rt == VarType::Integer {
                            Some(VarType::Integer)
                        } else {
                            self.report(
                                format!("`{}` requires INTEGER operands, got {lt} and {rt}", op.symbol()),
                                *pos,
                            );
                            None
                        }
                    }
                    BinaryOp::Eq | BinaryOp::Ne => {
                        if lt == rt {
                            Some(VarType::Boolean)
                        } else {
                            self.report(
                                format!("`{}` requires operands of the same type, got {lt} and {rt}", op.symbol()),
                                *pos,
                            );
                            None
                        }
                    }
                    BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge => {
                        if lt == rt && lt != VarType::Boolean {
                            Some(VarType::Boolean)
                        } else {
                            self.report(
                                format!(
                                    "`{}` requires two INTEGER or two CHAR operands, got {lt} and {rt}",
                                    op.symbol()
                                ),
                                *pos,
                            );
                            None
                        }
                    }
                    BinaryOp::And | BinaryOp::Or => {
                        if lt == VarType::Boolean && rt == VarType::Boolean {
                            Some(VarType::Boolean)
                        } else {
                            self.report(
                                format!("`{}` requires BOOLEAN operands, got {lt} and {rt}", op.symbol()),
                                *pos,
                            );
                            None
                        }
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{compile, Program};

    fn checked(source: &str) -> (Program, Vec<Diagnostic>) {
        let program = compile(source).unwrap();
        let diags = check(&program);
        (program, diags)
    }

    #[test]
    fn counting_loop_with_declared_variable_is_clean() {
        let (_, diags) = checked(
            "PROGRAM p ; VAR counter, total : INTEGER ;
             BEGIN
               total := 0 ;
               FOR counter := 1 TO 6 DO total := total + counter
             END .",
        );
        assert_eq!(diags, vec![]);
    }

    #[test]
    fn undeclared_variable_is_reported_by_name() {
        let (_, diags) = checked("PROGRAM p ; VAR a : INTEGER ; BEGIN a := z END .");
        assert_eq!(diags.len(), 1);
        assert!(diags[0].message.contains("`z`"));
    }

    #[test]
    fn duplicate_case_label_is_reported() {
        let (_, diags) = checked(
            "PROGRAM p ; VAR a : INTEGER ;
             BEGIN
               a := 1 ;
               CASE a OF
                 1 : Writeln ;
                 2 : Writeln ;
                 2 : Writeln
               END
             END .",
        );
        assert_eq!(diags.len(), 1);
        assert!(diags[0].message.contains("duplicate case label 2"));
    }

    #[test]
    fn declarations_are_case_insensitive_for_duplicates() {
        let (_, diags) =
            checked("PROGRAM p ; VAR abc : INTEGER ; ABC : CHAR ; BEGIN END .");
        assert_eq!(diags.len(), 1);
        assert!(diags[0].message.contains("duplicate declaration"));
    }

    #[test]
    fn assigning_to_loop_variable_is_an_error() {
        let (_, diags) = checked(
            "PROGRAM p ; VAR i : INTEGER ;
             BEGIN FOR i := 1 TO 3 DO i := i + 1 END .",
        );
        assert_eq!(diags.len(), 1);
        assert!(diags[0].message.contains("loop variable `i`"));
    }

    #[test]
    fn nested_for_reusing_the_loop_variable_is_an_error() {
        let (_, diags) = checked(
            "PROGRAM p ; VAR i, x : INTEGER ;
             BEGIN FOR i := 1 TO 3 DO FOR i := 1 TO 2 DO x := 0 END .",
        );
        assert!(diags.iter().any(|d| d.message.contains("reuse")));
    }

    #[test]
    fn condition_must_be_boolean() {
        let (_, diags) =
            checked("PROGRAM p ; VAR i : INTEGER ; BEGIN WHILE i DO i := 0 END .");
        assert_eq!(diags.len(), 1);
        assert!(diags[0].message.contains("BOOLEAN"));
    }

    #[test]
    fn case_label_type_must_match_selector() {
        let (_, diags) = checked(
            "PROGRAM p ; VAR a : INTEGER ;
             BEGIN a := 1 ; CASE a OF 'x' : Writeln END END .",
        );
        assert_eq!(diags.len(), 1);
        assert!(diags[0].message.contains("selector"));
    }

    #[test]
    fn type_mismatch_in_assignment_is_reported() {
        let (_, diags) =
            checked("PROGRAM p ; VAR a : INTEGER ; BEGIN a := TRUE END .");
        assert_eq!(diags.len(), 1);
        assert!(diags[0].message.contains("BOOLEAN"));
    }
}
