//! Shared test helpers: a seeded random program generator producing
//! well-typed, terminating programs together with matching input text.

#![allow(dead_code)]

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use caitlin::motif::TriadQuality;
use caitlin::trace::{EventData, Trace};

pub struct Generated {
    pub source: String,
    pub input: String,
}

const ASSIGN_TARGETS: [&str; 2] = ["x", "y"];
const WHILE_VARS: [&str; 4] = ["w0", "w1", "w2", "w3"];
const FOR_VARS: [&str; 4] = ["f0", "f1", "f2", "f3"];
const READ_VARS: [&str; 4] = ["r0", "r1", "r2", "r3"];

struct Gen {
    rng: ChaCha8Rng,
    input: Vec<String>,
    while_used: usize,
    for_used: usize,
    read_used: usize,
    initialized: Vec<String>,
}

/// Generates a program exercising random constructs, with input tokens
/// for every Readln it contains. The output always passes static checks
/// and terminates.
pub fn generate_program(seed: u64) -> Generated {
    let mut g = Gen {
        rng: ChaCha8Rng::seed_from_u64(seed),
        input: Vec::new(),
        while_used: 0,
        for_used: 0,
        read_used: 0,
        initialized: vec!["x".to_string(), "y".to_string()],
    };
    let count = g.rng.gen_range(3..=6);
    let mut statements = vec!["x := 1".to_string(), "y := 2".to_string()];
    // Loop variables are assigned by the FOR header only when the loop
    // iterates at least once; seed them so reads after a zero-iteration
    // loop stay defined.
    for var in FOR_VARS {
        statements.push(format!("{var} := 0"));
        g.initialized.push(var.to_string());
    }
    for _ in 0..count {
        statements.push(g.statement(2));
    }
    let mut source = String::from("PROGRAM generated ;\nVAR\n");
    for var in ASSIGN_TARGETS
        .iter()
        .chain(WHILE_VARS.iter())
        .chain(FOR_VARS.iter())
        .chain(READ_VARS.iter())
    {
        source.push_str(&format!("  {var} : INTEGER ;\n"));
    }
    source.push_str("BEGIN\n");
    source.push_str(&statements.join(" ;\n"));
    source.push_str("\nEND .\n");
    Generated {
        source,
        input: g.input.join(" "),
    }
}

impl Gen {
    fn int_atom(&mut self) -> String {
        if !self.initialized.is_empty() && self.rng.gen_bool(0.6) {
            self.initialized.choose(&mut self.rng).unwrap().clone()
        } else {
            self.rng.gen_range(0..7).to_string()
        }
    }

    fn int_expr(&mut self) -> String {
        match self.rng.gen_range(0..4) {
            0 | 1 => self.int_atom(),
            2 => format!("{} + {}", self.int_atom(), self.int_atom()),
            _ => format!("{} - {}", self.int_atom(), self.int_atom()),
        }
    }

    fn comparison(&mut self) -> String {
        let op = ["=", "<>", "<", "<=", ">", ">="]
            .choose(&mut self.rng)
            .unwrap();
        format!("{} {op} {}", self.int_expr(), self.int_expr())
    }

    fn condition(&mut self, depth: u32) -> String {
        if depth == 0 || self.rng.gen_bool(0.5) {
            return self.comparison();
        }
        match self.rng.gen_range(0..3) {
            0 => format!("({}) AND ({})", self.condition(depth - 1), self.condition(depth - 1)),
            1 => format!("({}) OR ({})", self.condition(depth - 1), self.condition(depth - 1)),
            _ => format!("NOT ({})", self.condition(depth - 1)),
        }
    }

    fn simple_statement(&mut self) -> String {
        match self.rng.gen_range(0..4) {
            0 if self.read_used < READ_VARS.len() => {
                let var = READ_VARS[self.read_used];
                self.read_used += 1;
                let token = self.rng.gen_range(0..10).to_string();
                self.input.push(token);
                self.initialized.push(var.to_string());
                format!("Readln({var})")
            }
            1 => {
                let expr = self.int_expr();
                format!("Writeln('v', {expr})")
            }
            _ => {
                let target = *ASSIGN_TARGETS.choose(&mut self.rng).unwrap();
                let expr = self.int_expr();
                format!("{target} := {expr}")
            }
        }
    }

    fn block(&mut self, depth: u32) -> String {
        let count = self.rng.gen_range(1..=2);
        let body: Vec<String> = (0..count).map(|_| self.statement(depth)).collect();
        format!("BEGIN {} END", body.join(" ; "))
    }

    fn statement(&mut self, depth: u32) -> String {
        if depth == 0 {
            return self.simple_statement();
        }
        match self.rng.gen_range(0..10) {
            0 if self.while_used < WHILE_VARS.len() => {
                let counter = WHILE_VARS[self.while_used];
                self.while_used += 1;
                self.initialized.push(counter.to_string());
                let bound = self.rng.gen_range(0..=3);
                let body = self.statement(depth - 1);
                format!(
                    "{counter} := 0 ;\nWHILE {counter} < {bound} DO\nBEGIN {body} ; {counter} := {counter} + 1 END"
                )
            }
            1 if self.while_used < WHILE_VARS.len() => {
                let counter = WHILE_VARS[self.while_used];
                self.while_used += 1;
                self.initialized.push(counter.to_string());
                let bound = self.rng.gen_range(1..=3);
                let body = self.statement(depth - 1);
                format!(
                    "{counter} := 0 ;\nREPEAT {body} ; {counter} := {counter} + 1 UNTIL {counter} >= {bound}"
                )
            }
            2 | 3 if self.for_used < FOR_VARS.len() => {
                let var = FOR_VARS[self.for_used];
                self.for_used += 1;
                let downto = self.rng.gen_bool(0.3);
                let (from, to) = if downto {
                    (self.rng.gen_range(1..=6), self.rng.gen_range(0..=2))
                } else {
                    (self.rng.gen_range(1..=3), self.rng.gen_range(0..=6))
                };
                self.initialized.push(var.to_string());
                let body = self.statement(depth - 1);
                let body = self.block_of(body);
                format!(
                    "FOR {var} := {from} {} {to} DO\n{body}",
                    if downto { "DOWNTO" } else { "TO" }
                )
            }
            4 | 5 => {
                let cond = self.condition(2);
                let then_branch = self.statement(depth - 1);
                if self.rng.gen_bool(0.5) {
                    format!("IF {cond} THEN\n{}", self.block_of(then_branch))
                } else {
                    let else_branch = self.statement(depth - 1);
                    format!(
                        "IF {cond} THEN\n{}\nELSE\n{}",
                        self.block_of(then_branch),
                        self.block_of(else_branch)
                    )
                }
            }
            6 | 7 => {
                let selector = self.int_atom();
                let arm_count = self.rng.gen_range(2..=3);
                let mut labels: Vec<i64> = (0..7).collect();
                labels.shuffle(&mut self.rng);
                let arms: Vec<String> = (0..arm_count)
                    .map(|i| format!("{} : {}", labels[i], self.block(depth - 1)))
                    .collect();
                let else_clause = if self.rng.gen_bool(0.5) {
                    format!("\nELSE {}", self.statement(depth - 1))
                } else {
                    String::new()
                };
                format!("CASE {selector} OF\n{}{else_clause}\nEND", arms.join(" ;\n"))
            }
            8 => self.block(depth - 1),
            _ => self.simple_statement(),
        }
    }

    /// Wraps loop-pattern statements (which contain `;`) so they embed
    /// safely as a single branch.
    fn block_of(&mut self, statement: String) -> String {
        if statement.contains(';') {
            format!("BEGIN {statement} END")
        } else {
            statement
        }
    }
}

/// The triad qualities a default-schema rendering must produce, read off
/// the trace decision points in order: every condition outcome gets a
/// triad of its truth value, a matching CASE arm a major triad, the else
/// path a minor one.
pub fn expected_triad_qualities(trace: &Trace) -> Vec<TriadQuality> {
    trace
        .events
        .iter()
        .filter_map(|e| match e.data {
            EventData::ConditionOutcome { outcome } => Some(if outcome {
                TriadQuality::Major
            } else {
                TriadQuality::Minor
            }),
            EventData::CaseArmTest { outcome: true, .. } => Some(TriadQuality::Major),
            EventData::ElsePathTaken => Some(TriadQuality::Minor),
            _ => None,
        })
        .collect()
}
