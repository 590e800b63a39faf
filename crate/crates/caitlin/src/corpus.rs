//! Seeded-bug harness: mutate programs in controlled ways, render the
//! correct and buggy variants under the same schema, and diff the
//! scores. Control-flow perturbations must be score-visible; pure output
//! text edits must not be.
//!
//! Corpus directory layout, one subdirectory per case:
//!
//! ```text
//! corpus/<case>/correct.pas      the reference program
//! corpus/<case>/bug.pas          the seeded-bug variant
//! corpus/<case>/inputs/<n>.txt   one input text per run
//! corpus/<case>/expect.txt       T or F per input: does the score diverge?
//! corpus/<case>/expected/<n>.out expected Writeln output (optional)
//! corpus/<case>/mutation.txt     the MutationKind of the seeded bug (optional)
//! ```

use std::fmt;
use std::path::Path;

use thiserror::Error;

use crate::interp::{run, RunOptions};
use crate::lang::{
    check, compile, normalized, pretty_print, BinaryOp, CaseLabel, Expr, Program, SourcePos,
    Statement, WriteArg,
};
use crate::motif::{Beats, TriadQuality};
use crate::schema::AuralizationSchema;
use crate::score::{auralize, count_by_kind, extract_triads, Score};
use crate::trace::ExprId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MutationKind {
    FlipRelationalOperator,
    OffByOneLoopBound,
    WrongCaseLabel,
    SwapAndOr,
    DeadElseInjection,
    PureOutputTextChange,
}

impl MutationKind {
    pub const ALL: [MutationKind; 6] = [
        MutationKind::FlipRelationalOperator,
        MutationKind::OffByOneLoopBound,
        MutationKind::WrongCaseLabel,
        MutationKind::SwapAndOr,
        MutationKind::DeadElseInjection,
        MutationKind::PureOutputTextChange,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MutationKind::FlipRelationalOperator => "flipRelationalOperator",
            MutationKind::OffByOneLoopBound => "offByOneLoopBound",
            MutationKind::WrongCaseLabel => "wrongCaseLabel",
            MutationKind::SwapAndOr => "swapAndOr",
            MutationKind::DeadElseInjection => "deadElseInjection",
            MutationKind::PureOutputTextChange => "pureOutputTextChange",
        }
    }

    pub fn from_name(name: &str) -> Option<MutationKind> {
        Self::ALL.iter().copied().find(|k| k.name() == name)
    }
}

impl fmt::Display for MutationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error)]
pub enum MutateError {
    #[error("no site eligible for {0} mutation")]
    NoEligibleSite(MutationKind),
    #[error("mutation produced a program that fails static checks: {0}")]
    ProducedInvalid(String),
}

const PLACEHOLDER_POS: SourcePos = SourcePos { line: 0, column: 0 };

fn placeholder_int(value: i64) -> Expr {
    Expr::IntLit {
        value,
        id: ExprId(u32::MAX),
        pos: PLACEHOLDER_POS,
    }
}

/// Applies exactly one mutation of `kind`, at the eligible site selected
/// by `seed`, and returns the re-parsed (id-normalized) program. The
/// result always passes static checks.
pub fn mutate(program: &Program, kind: MutationKind, seed: u64) -> Result<Program, MutateError> {
    let mut edited = program.clone();
    let sites = count_sites(&edited, kind);
    if sites == 0 {
        return Err(MutateError::NoEligibleSite(kind));
    }
    let target = (seed % sites as u64) as usize;
    let mut state = MutationState {
        kind,
        seed,
        sites,
        next_site: 0,
        target,
        applied: false,
    };
    for stmt in &mut edited.body {
        state.apply_statement(stmt);
    }
    assert!(state.applied, "site counting and application must agree");

    // Re-parse the pretty-printed mutant so ids, counts and the digest
    // are consistent with its own source text.
    let source = pretty_print(&edited);
    let mutant = compile(&source)
        .map_err(|e| MutateError::ProducedInvalid(format!("mutant does not parse: {e}")))?;
    let diagnostics = check(&mutant);
    if !diagnostics.is_empty() {
        return Err(MutateError::ProducedInvalid(
            diagnostics
                .iter()
                .map(|d| d.to_string())
                .collect::<Vec<_>>()
                .join("; "),
        ));
    }
    Ok(mutant)
}

fn count_sites(program: &Program, kind: MutationKind) -> usize {
    let mut count = 0;
    let mut state = MutationState {
        kind,
        seed: 0,
        sites: usize::MAX,
        next_site: 0,
        target: usize::MAX, // never reached: count only
        applied: false,
    };
    for stmt in &mut program.clone().body {
        state.apply_statement(stmt);
    }
    count += state.next_site;
    count
}

struct MutationState {
    kind: MutationKind,
    seed: u64,
    sites: usize,
    next_site: usize,
    target: usize,
    applied: bool,
}

impl MutationState {
    /// Registers one eligible site; true when this is the chosen one.
    fn site(&mut self) -> bool {
        let here = self.next_site == self.target;
        self.next_site += 1;
        if here {
            self.applied = true;
        }
        here
    }

    fn apply_statement(&mut self, stmt: &mut Statement) {
        match self.kind {
            MutationKind::OffByOneLoopBound => {
                if let Statement::For { to, .. } = stmt {
                    if self.site() {
                        let delta: i64 = if (self.seed / self.sites as u64) % 2 == 0 { 1 } else { -1 };
                        let replacement = match &*to {
                            Expr::IntLit { value, .. } => {
                                placeholder_int(value.saturating_add(delta))
                            }
                            other => Expr::Binary {
                                op: if delta > 0 { BinaryOp::Add } else { BinaryOp::Sub },
                                lhs: Box::new((*other).clone()),
                                rhs: Box::new(placeholder_int(1)),
                                id: ExprId(u32::MAX),
                                pos: PLACEHOLDER_POS,
                            },
                        };
                        *to = replacement;
                    }
                }
            }
            MutationKind::WrongCaseLabel => {
                if let Statement::Case { arms, .. } = stmt {
                    let existing: Vec<CaseLabel> =
                        arms.iter().flat_map(|a| a.labels.iter().copied()).collect();
                    for arm_index in 0..arms.len() {
                        for label_index in 0..arms[arm_index].labels.len() {
                            if self.site() {
                                let label = arms[arm_index].labels[label_index];
                                arms[arm_index].labels[label_index] =
                                    fresh_label(label, &existing);
                            }
                        }
                    }
                }
            }
            MutationKind::DeadElseInjection => {
                if let Statement::If { else_branch: else_branch @ None, pos, .. } = stmt {
                    if self.site() {
                        *else_branch = Some(Box::new(Statement::Compound {
                            body: vec![],
                            pos: *pos,
                        }));
                    }
                }
            }
            MutationKind::PureOutputTextChange => {
                if let Statement::Writeln { args, .. } = stmt {
                    for arg in args {
                        if let WriteArg::Str(text) = arg {
                            if self.site() {
                                text.push('X');
                            }
                        }
                    }
                }
            }
            MutationKind::FlipRelationalOperator | MutationKind::SwapAndOr => {
                self.visit_exprs(stmt);
            }
        }
        self.recurse(stmt);
    }

    fn recurse(&mut self, stmt: &mut Statement) {
        match stmt {
            Statement::Compound { body, .. } | Statement::Repeat { body, .. } => {
                for child in body {
                    self.apply_statement(child);
                }
            }
            Statement::While { body, .. } | Statement::For { body, .. } => {
                self.apply_statement(body);
            }
            Statement::If { then_branch, else_branch, .. } => {
                self.apply_statement(then_branch);
                if let Some(else_branch) = else_branch {
                    self.apply_statement(else_branch);
                }
            }
            Statement::Case { arms, else_body, .. } => {
                for arm in arms {
                    self.apply_statement(&mut arm.body);
                }
                if let Some(else_body) = else_body {
                    for child in else_body {
                        self.apply_statement(child);
                    }
                }
            }
            _ => {}
        }
    }

    /// Expression-level sites, in statement order then preorder.
    fn visit_exprs(&mut self, stmt: &mut Statement) {
        let mut exprs: Vec<&mut Expr> = Vec::new();
        match stmt {
            Statement::Assign { value, .. } => exprs.push(value),
            Statement::Writeln { args, .. } => {
                for arg in args {
                    if let WriteArg::Expr(e) = arg {
                        exprs.push(e);
                    }
                }
            }
            Statement::While { cond, .. } | Statement::Repeat { cond, .. } => exprs.push(cond),
            Statement::For { from, to, .. } => {
                exprs.push(from);
                exprs.push(to);
            }
            Statement::If { cond, .. } => exprs.push(cond),
            Statement::Case { selector, .. } => exprs.push(selector),
            _ => {}
        }
        for expr in exprs {
            self.visit_expr(expr);
        }
    }

    fn visit_expr(&mut self, expr: &mut Expr) {
        if let Expr::Binary { op, .. } = expr {
            let eligible = match self.kind {
                MutationKind::FlipRelationalOperator => op.is_relational(),
                MutationKind::SwapAndOr => matches!(op, BinaryOp::And | BinaryOp::Or),
                _ => false,
            };
            if eligible && self.site() {
                *op = match *op {
                    BinaryOp::Lt => BinaryOp::Ge,
                    BinaryOp::Le => BinaryOp::Gt,
                    BinaryOp::Gt => BinaryOp::Le,
                    BinaryOp::Ge => BinaryOp::Lt,
                    BinaryOp::Eq => BinaryOp::Ne,
                    BinaryOp::Ne => BinaryOp::Eq,
                    BinaryOp::And => BinaryOp::Or,
                    BinaryOp::Or => BinaryOp::And,
                    other => other,
                };
            }
        }
        match expr {
            Expr::Unary { operand, .. } => self.visit_expr(operand),
            Expr::Binary { lhs, rhs, .. } => {
                self.visit_expr(lhs);
                self.visit_expr(rhs);
            }
            _ => {}
        }
    }
}

/// A replacement label of the same type, distinct from every existing
/// label in the CASE.
fn fresh_label(label: CaseLabel, existing: &[CaseLabel]) -> CaseLabel {
    match label {
        CaseLabel::Int(v) => {
            let mut candidate = v;
            loop {
                candidate = candidate.wrapping_add(1);
                let fresh = CaseLabel::Int(candidate);
                if !existing.contains(&fresh) {
                    return fresh;
                }
            }
        }
        CaseLabel::Char(c) => {
            let mut candidate = c as u8;
            loop {
                candidate = if candidate >= b'~' { b'!' } else { candidate + 1 };
                // Stay clear of the quote escape.
                if candidate == b'\'' {
                    continue;
                }
                let fresh = CaseLabel::Char(candidate as char);
                if !existing.contains(&fresh) {
                    return fresh;
                }
            }
        }
    }
}

/// Triad at one position in one of the two scores being compared.
pub type TriadAt = (Beats, TriadQuality);

/// Structured difference between two scores rendered under the same
/// schema. Empty iff the scores are identical.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DiffReport {
    pub first_divergence: Option<Beats>,
    /// (event kind, count in a, count in b) where the counts differ.
    pub count_changes: Vec<(&'static str, usize, usize)>,
    /// Pairwise triad differences: same index, different beat or quality.
    pub quality_changes: Vec<(Option<TriadAt>, Option<TriadAt>)>,
}

impl DiffReport {
    pub fn is_empty(&self) -> bool {
        self.first_divergence.is_none()
    }
}

impl fmt::Display for DiffReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Some(beat) = self.first_divergence else {
            return writeln!(f, "scores are identical");
        };
        writeln!(f, "first divergence at beat {beat}")?;
        for (kind, a, b) in &self.count_changes {
            writeln!(f, "  {kind} events: {a} vs {b}")?;
        }
        for (a, b) in &self.quality_changes {
            let fmt_triad = |t: &Option<TriadAt>| match t {
                Some((beat, quality)) => format!("{quality:?} at beat {beat}"),
                None => "none".to_string(),
            };
            writeln!(f, "  triad: {} vs {}", fmt_triad(a), fmt_triad(b))?;
        }
        Ok(())
    }
}

/// Diffs two scores: first diverging beat, per-kind event counts and
/// triad quality changes (the headline major/minor perceptual cue).
pub fn compare_auralizations(a: &Score, b: &Score) -> DiffReport {
    if a == b {
        return DiffReport::default();
    }
    let first_divergence = a
        .events
        .iter()
        .zip(b.events.iter())
        .find(|(x, y)| x != y)
        .map(|(x, y)| x.start.min(y.start))
        .or_else(|| {
            // One score is a prefix of the other.
            let longer = if a.events.len() > b.events.len() { a } else { b };
            longer.events.get(a.events.len().min(b.events.len())).map(|e| e.start)
        })
        .or(Some(Beats::from_integer(0)));

    let (ta, pa, ca, na) = count_by_kind(a);
    let (tb, pb, cb, nb) = count_by_kind(b);
    let mut count_changes = Vec::new();
    for (kind, x, y) in [
        ("tempo", ta, tb),
        ("programChange", pa, pb),
        ("percussion", ca, cb),
        ("note", na, nb),
    ] {
        if x != y {
            count_changes.push((kind, x, y));
        }
    }

    let triads_a = extract_triads(a);
    let triads_b = extract_triads(b);
    let mut quality_changes = Vec::new();
    for i in 0..triads_a.len().max(triads_b.len()) {
        let x = triads_a.get(i).copied();
        let y = triads_b.get(i).copied();
        if x != y {
            quality_changes.push((x, y));
        }
    }

    DiffReport {
        first_divergence,
        count_changes,
        quality_changes,
    }
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("corpus i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("corpus case `{case}`: {message}")]
    BadCase { case: String, message: String },
}

/// One hand-written correct/buggy program pair with its inputs.
#[derive(Debug, Clone)]
pub struct CorpusCase {
    pub name: String,
    pub correct_source: String,
    pub buggy_source: String,
    pub inputs: Vec<String>,
    pub expected_divergence: Vec<bool>,
    pub expected_outputs: Vec<Option<String>>,
    pub mutation: Option<MutationKind>,
}

fn read(path: &Path) -> Result<String, CorpusError> {
    std::fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Loads every case under `dir`, sorted by name.
pub fn load_corpus(dir: &Path) -> Result<Vec<CorpusCase>, CorpusError> {
    let mut cases = Vec::new();
    let entries = std::fs::read_dir(dir).map_err(|source| CorpusError::Io {
        path: dir.display().to_string(),
        source,
    })?;
    let mut case_dirs: Vec<_> = entries
        .filter_map(|e| e.ok())
        .filter(|e| e.path().is_dir())
        .map(|e| e.path())
        .collect();
    case_dirs.sort();
    for case_dir in case_dirs {
        let name = case_dir
            .file_name()
            .unwrap()
            .to_string_lossy()
            .to_string();
        let bad = |message: String| CorpusError::BadCase {
            case: name.clone(),
            message,
        };
        let correct_source = read(&case_dir.join("correct.pas"))?;
        let buggy_source = read(&case_dir.join("bug.pas"))?;

        let inputs_dir = case_dir.join("inputs");
        let mut input_files: Vec<_> = std::fs::read_dir(&inputs_dir)
            .map_err(|source| CorpusError::Io {
                path: inputs_dir.display().to_string(),
                source,
            })?
            .filter_map(|e| e.ok())
            .map(|e| e.path())
            .filter(|p| p.extension().is_some_and(|ext| ext == "txt"))
            .collect();
        input_files.sort();
        if input_files.is_empty() {
            return Err(bad("no inputs".to_string()));
        }
        let mut inputs = Vec::new();
        for file in &input_files {
            inputs.push(read(file)?);
        }

        let expect_text = read(&case_dir.join("expect.txt"))?;
        let expected_divergence: Vec<bool> = expect_text
            .lines()
            .map(|line| match line.trim() {
                "T" => Ok(true),
                "F" => Ok(false),
                other => Err(bad(format!("expect.txt line must be T or F, found `{other}`"))),
            })
            .collect::<Result<_, _>>()?;
        if expected_divergence.len() != inputs.len() {
            return Err(bad(format!(
                "{} inputs but {} expectation lines",
                inputs.len(),
                expected_divergence.len()
            )));
        }

        let mut expected_outputs = Vec::new();
        for file in &input_files {
            let stem = file.file_stem().unwrap().to_string_lossy();
            let out_path = case_dir.join("expected").join(format!("{stem}.out"));
            expected_outputs.push(out_path.exists().then(|| read(&out_path)).transpose()?);
        }

        let mutation_path = case_dir.join("mutation.txt");
        let mutation = if mutation_path.exists() {
            let text = read(&mutation_path)?;
            Some(
                MutationKind::from_name(text.trim())
                    .ok_or_else(|| bad(format!("unknown mutation kind `{}`", text.trim())))?,
            )
        } else {
            None
        };

        cases.push(CorpusCase {
            name,
            correct_source,
            buggy_source,
            inputs,
            expected_divergence,
            expected_outputs,
            mutation,
        });
    }
    Ok(cases)
}

/// Verdict for one (case, input) run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseReport {
    pub case_name: String,
    pub input_index: usize,
    pub expected_divergence: bool,
    pub actual_divergence: bool,
    /// None when the case ships no expected-output file for this input.
    pub output_matches: Option<bool>,
    pub pass: bool,
}

fn compile_checked(name: &str, which: &str, source: &str) -> Result<Program, CorpusError> {
    let program = compile(source).map_err(|e| CorpusError::BadCase {
        case: name.to_string(),
        message: format!("{which} does not compile: {e}"),
    })?;
    let diagnostics = check(&program);
    if !diagnostics.is_empty() {
        return Err(CorpusError::BadCase {
            case: name.to_string(),
            message: format!(
                "{which} fails checks: {}",
                diagnostics
                    .iter()
                    .map(|d| d.to_string())
                    .collect::<Vec<_>>()
                    .join("; ")
            ),
        });
    }
    Ok(program)
}

/// Runs every case input: renders correct and buggy under `schema`,
/// diffs the scores, and verifies divergence flags and expected outputs.
pub fn run_corpus(
    cases: &[CorpusCase],
    schema: &AuralizationSchema,
) -> Result<Vec<CaseReport>, CorpusError> {
    let options = RunOptions::default();
    let mut reports = Vec::new();
    for case in cases {
        let correct = compile_checked(&case.name, "correct.pas", &case.correct_source)?;
        let buggy = compile_checked(&case.name, "bug.pas", &case.buggy_source)?;
        for (index, input) in case.inputs.iter().enumerate() {
            let (correct_result, correct_trace) = run(&correct, input, &options);
            let (_, buggy_trace) = run(&buggy, input, &options);
            let score_a = auralize(&correct_trace, schema).map_err(|e| CorpusError::BadCase {
                case: case.name.clone(),
                message: format!("correct render failed: {e}"),
            })?;
            let score_b = auralize(&buggy_trace, schema).map_err(|e| CorpusError::BadCase {
                case: case.name.clone(),
                message: format!("buggy render failed: {e}"),
            })?;
            let diff = compare_auralizations(&score_a, &score_b);
            let actual_divergence = !diff.is_empty();
            let expected_divergence = case.expected_divergence[index];
            let output_matches = case.expected_outputs[index]
                .as_ref()
                .map(|expected| expected == &correct_result.output);
            let pass = actual_divergence == expected_divergence
                && output_matches != Some(false);
            reports.push(CaseReport {
                case_name: case.name.clone(),
                input_index: index,
                expected_divergence,
                actual_divergence,
                output_matches,
                pass,
            });
        }
    }
    Ok(reports)
}

/// Re-derives a mutant from the case's declared mutation kind and checks
/// it is deterministic and statically valid. The shipped `bug.pas` stays
/// authoritative; this guards the mutation machinery itself.
pub fn verify_mutation(case: &CorpusCase, seed: u64) -> Result<(), CorpusError> {
    let Some(kind) = case.mutation else {
        return Ok(());
    };
    let program = compile_checked(&case.name, "correct.pas", &case.correct_source)?;
    let once = mutate(&program, kind, seed).map_err(|e| CorpusError::BadCase {
        case: case.name.clone(),
        message: format!("mutation failed: {e}"),
    })?;
    let twice = mutate(&program, kind, seed).expect("second application of a working mutation");
    if normalized(&once) != normalized(&twice) {
        return Err(CorpusError::BadCase {
            case: case.name.clone(),
            message: "mutation is not deterministic".to_string(),
        });
    }
    if normalized(&once) == normalized(&program) {
        return Err(CorpusError::BadCase {
            case: case.name.clone(),
            message: "mutation left the program unchanged".to_string(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::default_schema;
    use crate::trace::serialize_trace;

    fn compiled(source: &str) -> Program {
        let program = compile(source).unwrap();
        assert_eq!(check(&program), vec![]);
        program
    }

    #[test]
    fn relational_flip_negates_the_guard() {
        let program = compiled(
            "PROGRAM p ; VAR i : INTEGER ;
             BEGIN i := 0 ; WHILE i < 10 DO i := i + 1 END .",
        );
        let mutant = mutate(&program, MutationKind::FlipRelationalOperator, 0).unwrap();
        let source = pretty_print(&mutant);
        assert!(source.contains("i >= 10"), "{source}");
    }

    #[test]
    fn off_by_one_direction_follows_the_seed() {
        let program = compiled(
            "PROGRAM p ; VAR counter, x : INTEGER ;
             BEGIN x := 0 ; FOR counter := 1 TO 6 DO x := x + 1 END .",
        );
        let up = pretty_print(&mutate(&program, MutationKind::OffByOneLoopBound, 0).unwrap());
        assert!(up.contains("TO 7"), "{up}");
        let down = pretty_print(&mutate(&program, MutationKind::OffByOneLoopBound, 1).unwrap());
        assert!(down.contains("TO 5"), "{down}");
    }

    #[test]
    fn non_literal_bounds_are_wrapped_in_arithmetic() {
        let program = compiled(
            "PROGRAM p ; VAR counter, n, x : INTEGER ;
             BEGIN n := 4 ; x := 0 ; FOR counter := 1 TO n DO x := x + 1 END .",
        );
        let up = pretty_print(&mutate(&program, MutationKind::OffByOneLoopBound, 0).unwrap());
        assert!(up.contains("TO n + 1"), "{up}");
    }

    #[test]
    fn wrong_case_label_avoids_collisions() {
        let program = compiled(
            "PROGRAM p ; VAR a : INTEGER ;
             BEGIN a := 1 ; CASE a OF 1 : Writeln ; 2 : Writeln ; 3 : Writeln END END .",
        );
        let mutant = mutate(&program, MutationKind::WrongCaseLabel, 1).unwrap();
        let source = pretty_print(&mutant);
        // Label 2 becomes 4 (3 is taken).
        assert!(source.contains("4 :"), "{source}");
        assert_eq!(check(&mutant), vec![]);
    }

    #[test]
    fn swap_and_or_flips_the_connective() {
        let program = compiled(
            "PROGRAM p ; VAR a, b : BOOLEAN ;
             BEGIN a := TRUE ; b := FALSE ; IF a AND b THEN Writeln('x') END .",
        );
        let mutant = mutate(&program, MutationKind::SwapAndOr, 0).unwrap();
        assert!(pretty_print(&mutant).contains("a OR b"));
    }

    #[test]
    fn dead_else_injection_changes_the_construct_kind() {
        let program = compiled(
            "PROGRAM p ; VAR x : INTEGER ;
             BEGIN x := 1 ; IF x = 1 THEN Writeln('one') END .",
        );
        let mutant = mutate(&program, MutationKind::DeadElseInjection, 0).unwrap();
        let source = pretty_print(&mutant);
        assert!(source.contains("ELSE"), "{source}");
        // Same output, different trace: the construct kind changed.
        let (out_a, trace_a) = run(&program, "", &RunOptions::default());
        let (out_b, trace_b) = run(&mutant, "", &RunOptions::default());
        assert_eq!(out_a.output, out_b.output);
        assert_ne!(
            trace_a.events[0].construct_kind,
            trace_b.events[0].construct_kind
        );
    }

    #[test]
    fn pure_output_change_preserves_the_trace() {
        let program = compiled(
            "PROGRAM p ; VAR i : INTEGER ;
             BEGIN FOR i := 1 TO 3 DO Writeln('tick') END .",
        );
        let mutant = mutate(&program, MutationKind::PureOutputTextChange, 0).unwrap();
        let (out_a, trace_a) = run(&program, "", &RunOptions::default());
        let (out_b, trace_b) = run(&mutant, "", &RunOptions::default());
        assert_ne!(out_a.output, out_b.output);
        assert_eq!(trace_a.events, trace_b.events);
        let _ = (serialize_trace(&trace_a), serialize_trace(&trace_b));
    }

    #[test]
    fn mutation_is_deterministic_per_seed() {
        let program = compiled(
            "PROGRAM p ; VAR i, x : INTEGER ;
             BEGIN x := 0 ; FOR i := 1 TO 3 DO IF x < 2 THEN x := x + 1 END .",
        );
        for kind in [
            MutationKind::FlipRelationalOperator,
            MutationKind::OffByOneLoopBound,
            MutationKind::DeadElseInjection,
        ] {
            for seed in 0..4 {
                let a = mutate(&program, kind, seed).unwrap();
                let b = mutate(&program, kind, seed).unwrap();
                assert_eq!(normalized(&a), normalized(&b));
            }
        }
    }

    #[test]
    fn missing_sites_are_an_error() {
        let program = compiled("PROGRAM p ; BEGIN Writeln END .");
        assert!(matches!(
            mutate(&program, MutationKind::WrongCaseLabel, 0),
            Err(MutateError::NoEligibleSite(_))
        ));
        assert!(matches!(
            mutate(&program, MutationKind::PureOutputTextChange, 0),
            Err(MutateError::NoEligibleSite(_))
        ));
    }

    const CASE_DEMO: &str = "\
PROGRAM casedemo ;
VAR a, b : INTEGER ;
BEGIN
  Readln(b) ;
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

    fn score_for(source: &str, input: &str) -> Score {
        let program = compiled(source);
        let (_, trace) = run(&program, input, &RunOptions::default());
        auralize(&trace, &default_schema()).unwrap()
    }

    #[test]
    fn identical_scores_diff_empty() {
        let a = score_for(CASE_DEMO, "5");
        let b = score_for(CASE_DEMO, "5");
        let diff = compare_auralizations(&a, &b);
        assert!(diff.is_empty());
        assert_eq!(diff.to_string().trim(), "scores are identical");
    }

    #[test]
    fn match_versus_else_reports_a_mode_difference() {
        let no_match = score_for(CASE_DEMO, "5");
        let match_arm3 = score_for(CASE_DEMO, "0");
        let diff = compare_auralizations(&no_match, &match_arm3);
        assert!(!diff.is_empty());
        assert!(!diff.quality_changes.is_empty());
        let (a, b) = &diff.quality_changes[0];
        assert_eq!(a.map(|(_, q)| q), Some(TriadQuality::Minor));
        assert_eq!(b.map(|(_, q)| q), Some(TriadQuality::Major));
        assert!(diff.first_divergence.is_some());
    }

    #[test]
    fn verify_mutation_accepts_a_declared_case() {
        let case = CorpusCase {
            name: "demo".to_string(),
            correct_source: CASE_DEMO.to_string(),
            buggy_source: CASE_DEMO.to_string(),
            inputs: vec!["5".to_string()],
            expected_divergence: vec![false],
            expected_outputs: vec![None],
            mutation: Some(MutationKind::WrongCaseLabel),
        };
        verify_mutation(&case, 7).unwrap();
    }
}
