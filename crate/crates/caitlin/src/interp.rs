//! Tree-walking interpreter. Executes a checked [`Program`] against an
//! input text, producing Writeln output and a complete control-flow
//! [`Trace`].
//!
//! Runtime failures and step-limit exhaustion never unwind past [`run`];
//! they are reported in the [`RunResult`] and the trace is truncated at
//! the fault with all open constructs closed, so it stays well nested.

use std::collections::HashMap;
use std::fmt;

use crate::lang::{BinaryOp, CaseLabel, Expr, Program, SourcePos, Statement, UnaryOp, VarType, WriteArg};
use crate::trace::{Trace, TraceBuilder};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    pub step_limit: u64,
    pub subexpr_tracing: bool,
}

impl Default for RunOptions {
    fn default() -> RunOptions {
        RunOptions {
            step_limit: 100_000,
            subexpr_tracing: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunStatus {
    Completed,
    RuntimeError { message: String, pos: SourcePos },
    StepLimitExceeded,
}

impl fmt::Display for RunStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunStatus::Completed => f.write_str("completed"),
            RunStatus::RuntimeError { message, pos } => {
                write!(f, "runtime error at {pos}: {message}")
            }
            RunStatus::StepLimitExceeded => f.write_str("step limit exceeded"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunResult {
    pub output: String,
    pub status: RunStatus,
    pub steps_used: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Value {
    Int(i64),
    Bool(bool),
    Char(char),
}

impl Value {
    fn type_name(&self) -> &'static str {
        match self {
            Value::Int(_) => "INTEGER",
            Value::Bool(_) => "BOOLEAN",
            Value::Char(_) => "CHAR",
        }
    }
}

/// Variable store. Every declared variable has a slot; reading a slot
/// that was never written is a runtime error.
#[derive(Debug, Clone, Default)]
pub struct Env {
    slots: HashMap<String, Option<Value>>,
}

impl Env {
    pub fn for_program(program: &Program) -> Env {
        let mut env = Env::default();
        for decl in &program.declarations {
            env.slots.insert(decl.name.to_ascii_lowercase(), None);
        }
        env
    }

    pub fn set(&mut self, name: &str, value: Value) {
        self.slots.insert(name.to_ascii_lowercase(), Some(value));
    }

    pub fn get(&self, name: &str) -> Option<Value> {
        self.slots.get(&name.to_ascii_lowercase()).copied().flatten()
    }
}

#[derive(Debug)]
struct RuntimeFault {
    message: String,
    pos: SourcePos,
}

enum Abort {
    Fault(RuntimeFault),
    StepLimit,
}

type ExecResult<T> = Result<T, Abort>;

fn fault<T>(message: impl Into<String>, pos: SourcePos) -> ExecResult<T> {
    Err(Abort::Fault(RuntimeFault {
        message: message.into(),
        pos,
    }))
}

/// Executes `program` to completion (or fault / step exhaustion),
/// returning the run outcome and the recorded trace.
///
/// The caller is expected to have run [`crate::lang::check`] first.
pub fn run(program: &Program, input: &str, options: &RunOptions) -> (RunResult, Trace) {
    let mut interp = Interp {
        env: Env::for_program(program),
        input: input.split_whitespace().map(str::to_string).collect(),
        input_pos: 0,
        output: String::new(),
        steps: 0,
        options: *options,
        builder: TraceBuilder::new(&program.name, &program.source_digest),
        declared: program
            .declarations
            .iter()
            .map(|d| (d.name.to_ascii_lowercase(), d.ty))
            .collect(),
    };
    let outcome = interp.exec_seq(&program.body);
    let status = match outcome {
        Ok(()) => RunStatus::Completed,
        Err(Abort::Fault(f)) => RunStatus::RuntimeError {
            message: f.message,
            pos: f.pos,
        },
        Err(Abort::StepLimit) => RunStatus::StepLimitExceeded,
    };
    let trace = match status {
        RunStatus::Completed => interp.builder.finish(),
        _ => interp.builder.abort(),
    };
    (
        RunResult {
            output: interp.output,
            status,
            steps_used: interp.steps,
        },
        trace,
    )
}

/// Evaluates a boolean-typed expression against `env`, emitting one
/// ConditionOutcome event (attributed to the construct currently open in
/// `sink`) and, when `subexpr_tracing` is set, one SubexprOutcome event
/// per evaluated AND/OR operand in evaluation order. Skipped operands of
/// a short-circuited AND/OR emit nothing and are never read.
pub fn evaluate_condition(
    expr: &Expr,
    env: &Env,
    sink: &mut TraceBuilder,
    subexpr_tracing: bool,
) -> Result<bool, String> {
    let mut interp = Interp {
        env: env.clone(),
        input: Vec::new(),
        input_pos: 0,
        output: String::new(),
        steps: 0,
        options: RunOptions {
            step_limit: u64::MAX,
            subexpr_tracing,
        },
        builder: TraceBuilder::new("", ""),
        declared: HashMap::new(),
    };
    std::mem::swap(&mut interp.builder, sink);
    let result = interp.eval_condition(expr);
    std::mem::swap(&mut interp.builder, sink);
    match result {
        Ok(v) => Ok(v),
        Err(Abort::Fault(f)) => Err(format!("{} at {}", f.message, f.pos)),
        Err(Abort::StepLimit) => unreachable!("no step counting in expressions"),
    }
}

struct Interp {
    env: Env,
    input: Vec<String>,
    input_pos: usize,
    output: String,
    steps: u64,
    options: RunOptions,
    builder: TraceBuilder,
    declared: HashMap<String, VarType>,
}

impl Interp {
    fn step(&mut self) -> ExecResult<()> {
        self.steps += 1;
        if self.steps > self.options.step_limit {
            Err(Abort::StepLimit)
        } else {
            Ok(())
        }
    }

    fn exec_seq(&mut self, body: &[Statement]) -> ExecResult<()> {
        for stmt in body {
            self.exec(stmt)?;
        }
        Ok(())
    }

    fn exec(&mut self, stmt: &Statement) -> ExecResult<()> {
        self.step()?;
        match stmt {
            Statement::Assign { target, value, .. } => {
                let value = self.eval(value)?;
                self.env.set(target, value);
                Ok(())
            }
            Statement::Writeln { args, .. } => {
                for arg in args {
                    match arg {
                        WriteArg::Str(text) => self.output.push_str(text),
                        WriteArg::Expr(expr) => {
                            let value = self.eval(expr)?;
                            self.output.push_str(&format_value(value));
                        }
                    }
                }
                self.output.push('\n');
                Ok(())
            }
            Statement::Readln { target, pos } => {
                let token = match self.input.get(self.input_pos) {
                    Some(token) => token.clone(),
                    None => return fault("input exhausted", *pos),
                };
                self.input_pos += 1;
                let ty = self
                    .declared
                    .get(&target.to_ascii_lowercase())
                    .copied()
                    .unwrap_or(VarType::Integer);
                let value = match ty {
                    VarType::Integer => match token.parse::<i64>() {
                        Ok(v) => Value::Int(v),
                        Err(_) => return fault(format!("invalid integer input `{token}`"), *pos),
                    },
                    VarType::Char => {
                        let mut chars = token.chars();
                        match (chars.next(), chars.next()) {
                            (Some(c), None) => Value::Char(c),
                            _ => {
                                return fault(
                                    format!("expected a single character, got `{token}`"),
                                    *pos,
                                )
                            }
                        }
                    }
                    VarType::Boolean => match token.to_ascii_lowercase().as_str() {
                        "true" => Value::Bool(true),
                        "false" => Value::Bool(false),
                        _ => return fault(format!("invalid boolean input `{token}`"), *pos),
                    },
                };
                self.env.set(target, value);
                Ok(())
            }
            Statement::Compound { body, .. } => self.exec_seq(body),
            Statement::While { id, cond, body, .. } => {
                self.builder.enter(*id, stmt.construct_kind().unwrap());
                loop {
                    self.step()?;
                    if !self.eval_condition(cond)? {
                        break;
                    }
                    self.exec(body)?;
                }
                self.builder.exit();
                Ok(())
            }
            Statement::Repeat { id, body, cond, .. } => {
                self.builder.enter(*id, stmt.construct_kind().unwrap());
                loop {
                    self.exec_seq(body)?;
                    self.step()?;
                    if self.eval_condition(cond)? {
                        break;
                    }
                }
                self.builder.exit();
                Ok(())
            }
            Statement::For { id, downto, var, from, to, body, pos } => {
                self.builder.enter(*id, stmt.construct_kind().unwrap());
                // Bounds are evaluated exactly once, on entry.
                let from = self.eval_int(from)?;
                let to = self.eval_int(to)?;
                let count: i64 = if *downto {
                    (from as i128 - to as i128 + 1).max(0) as i64
                } else {
                    (to as i128 - from as i128 + 1).max(0) as i64
                };
                for i in 1..=count {
                    self.step()?;
                    let value = if *downto { from - (i - 1) } else { from + (i - 1) };
                    self.env.set(var, Value::Int(value));
                    self.builder.tick(i as u64, i == count);
                    self.exec(body)?;
                }
                let _ = pos;
                self.builder.exit();
                Ok(())
            }
            Statement::If { id, cond, then_branch, else_branch, .. } => {
                self.builder.enter(*id, stmt.construct_kind().unwrap());
                if self.eval_condition(cond)? {
                    self.exec(then_branch)?;
                } else if let Some(else_branch) = else_branch {
                    self.exec(else_branch)?;
                }
                self.builder.exit();
                Ok(())
            }
            Statement::Case { id, selector, arms, else_body, .. } => {
                self.builder.enter(*id, stmt.construct_kind().unwrap());
                let value = self.eval(selector)?;
                let mut matched = false;
                for (index, arm) in arms.iter().enumerate() {
                    let hit = arm.labels.iter().any(|label| label_matches(label, value));
                    self.builder.arm_test(index as u32, hit);
                    if hit {
                        self.exec(&arm.body)?;
                        matched = true;
                        break;
                    }
                }
                if !matched {
                    if let Some(else_body) = else_body {
                        self.builder.else_path();
                        self.exec_seq(else_body)?;
                    }
                }
                self.builder.exit();
                Ok(())
            }
            Statement::Empty { .. } => Ok(()),
        }
    }

    /// Whole-condition evaluation: one ConditionOutcome event, plus
    /// per-operand SubexprOutcome events when tracing is enabled.
    fn eval_condition(&mut self, expr: &Expr) -> ExecResult<bool> {
        let value = self.eval_bool(expr)?;
        self.builder.condition(value);
        Ok(value)
    }

    /// An operand of AND/OR: evaluated, then reported.
    fn eval_operand(&mut self, expr: &Expr) -> ExecResult<bool> {
        let value = self.eval_bool(expr)?;
        if self.options.subexpr_tracing {
            self.builder.subexpr(expr.id(), value);
        }
        Ok(value)
    }

    fn eval_bool(&mut self, expr: &Expr) -> ExecResult<bool> {
        match self.eval(expr)? {
            Value::Bool(b) => Ok(b),
            other => fault(
                format!("expected BOOLEAN, got {}", other.type_name()),
                expr.pos(),
            ),
        }
    }

    fn eval_int(&mut self, expr: &Expr) -> ExecResult<i64> {
        match self.eval(expr)? {
            Value::Int(v) => Ok(v),
            other => fault(
                format!("expected INTEGER, got {}", other.type_name()),
                expr.pos(),
            ),
        }
    }

    fn eval(&mut self, expr: &Expr) -> ExecResult<Value> {
        match expr {
            Expr::IntLit { value, .. } => Ok(Value::Int(*value)),
            Expr::BoolLit { value, .. } => Ok(Value::Bool(*value)),
            Expr::CharLit { value, .. } => Ok(Value::Char(*value)),
            Expr::Var { name, pos, .. } => match self.env.get(name) {
                Some(value) => Ok(value),
                None => fault(format!("variable `{name}` used before initialization"), *pos),
            },
            Expr::Unary { op, operand, pos, .. } => match op {
                UnaryOp::Not => Ok(Value::Bool(!self.eval_bool(operand)?)),
                UnaryOp::Neg => {
                    let v = self.eval_int(operand)?;
                    match v.checked_neg() {
                        Some(n) => Ok(Value::Int(n)),
                        None => fault("integer overflow", *pos),
                    }
                }
            },
            Expr::Binary { op: BinaryOp::And, lhs, rhs, .. } => {
                // Short-circuiting: a false left operand skips the right
                // operand entirely (no event, no reads).
                let l = self.eval_operand(lhs)?;
                if !l {
                    return Ok(Value::Bool(false));
                }
                let r = self.eval_operand(rhs)?;
                Ok(Value::Bool(r))
            }
            Expr::Binary { op: BinaryOp::Or, lhs, rhs, .. } => {
                let l = self.eval_operand(lhs)?;
                if l {
                    return Ok(Value::Bool(true));
                }
                let r = self.eval_operand(rhs)?;
                Ok(Value::Bool(r))
            }
            Expr::Binary { op, lhs, rhs, pos, .. } => {
                let l = self.eval(lhs)?;
                let r = self.eval(rhs)?;
                self.apply_binary(*op, l, r, *pos)
            }
        }
    }

    fn apply_binary(&mut self, op: BinaryOp, l: Value, r: Value, pos: SourcePos) -> ExecResult<Value> {
        use BinaryOp::*;
        match op {
            Add | Sub | Mul | Div | Mod => {
                let (Value::Int(a), Value::Int(b)) = (l, r) else {
                    return fault("arithmetic on non-integer values", pos);
                };
                let result = match op {
                    Add => a.checked_add(b),
                    Sub => a.checked_sub(b),
                    Mul => a.checked_mul(b),
                    Div => {
                        if b == 0 {
                            return fault("division by zero", pos);
                        }
                        a.checked_div(b)
                    }
                    Mod => {
                        if b == 0 {
                            return fault("division by zero", pos);
                        }
                        a.checked_rem(b)
                    }
                    _ => unreachable!(),
                };
                match result {
                    Some(v) => Ok(Value::Int(v)),
                    None => fault("integer overflow", pos),
                }
            }
            Eq | Ne => {
                let equal = match (l, r) {
                    (Value::Int(a), Value::Int(b)) => a == b,
                    (Value::Bool(a), Value::Bool(b)) => a == b,
                    (Value::Char(a), Value::Char(b)) => a == b,
                    _ => return fault("comparison of values of different types", pos),
                };
                Ok(Value::Bool(if op == Eq { equal } else { !equal }))
            }
            Lt | Le | Gt | Ge => {
                let ordering = match (l, r) {
                    (Value::Int(a), Value::Int(b)) => a.cmp(&b),
                    (Value::Char(a), Value::Char(b)) => a.cmp(&b),
                    _ => return fault("ordering comparison on incompatible values", pos),
                };
                let result = match op {
                    Lt => ordering.is_lt(),
                    Le => ordering.is_le(),
                    Gt => ordering.is_gt(),
                    Ge => ordering.is_ge(),
                    _ => unreachable!(),
                };
                Ok(Value::Bool(result))
            }
            And | Or => unreachable!("handled with short-circuiting"),
        }
    }
}

fn label_matches(label: &CaseLabel, value: Value) -> bool {
    match (label, value) {
        (CaseLabel::Int(l), Value::Int(v)) => *l == v,
        (CaseLabel::Char(l), Value::Char(v)) => *l == v,
        _ => false,
    }
}

fn format_value(value: Value) -> String {
    match value {
        Value::Int(v) => v.to_string(),
        Value::Bool(true) => "TRUE".to_string(),
        Value::Bool(false) => "FALSE".to_string(),
        Value::Char(c) => c.to_string(),
    }
}
