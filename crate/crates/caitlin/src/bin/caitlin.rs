//! Command-line entry point.
//!
//! Subcommands: `run` (execute a program and write its auralization),
//! `trace` (execute and write the trace only), `render` (trace file +
//! schema to MIDI, no re-execution), `validate-schema`, and `corpus`
//! (run the seeded-bug harness).
//!
//! Exit codes: 0 success, 1 diagnostics / runtime errors / corpus
//! failures, 2 usage errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use caitlin::corpus::{load_corpus, run_corpus, verify_mutation};
use caitlin::interp::{run, RunOptions, RunStatus};
use caitlin::lang::{check, compile};
use caitlin::midi::encode_smf;
use caitlin::schema::{default_schema, parse_schema, validate_schema, AuralizationSchema};
use caitlin::score::auralize;
use caitlin::trace::{parse_trace, serialize_trace, Trace};

#[derive(Parser)]
#[command(name = "caitlin", version, about = "Program auralization: hear your control flow")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Parser)]
struct ExecutionArgs {
    /// Program source file.
    program: PathBuf,
    /// Input stream as a file path.
    #[arg(long, conflicts_with = "input_text")]
    input: Option<PathBuf>,
    /// Input stream given inline.
    #[arg(long)]
    input_text: Option<String>,
    /// Enable per-operand boolean subexpression events.
    #[arg(long)]
    subexpr: bool,
    /// Interpreter step budget guarding non-terminating loops.
    #[arg(long, default_value_t = 100_000)]
    max_iterations: u64,
}

#[derive(Parser)]
struct SchemaArgs {
    /// Auralization schema file; defaults to the built-in skin.
    #[arg(long)]
    schema: Option<PathBuf>,
    /// Override the schema tempo (beats per minute).
    #[arg(long)]
    tempo: Option<u32>,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a program and write its auralization as a MIDI file.
    Run {
        #[command(flatten)]
        exec: ExecutionArgs,
        #[command(flatten)]
        schema: SchemaArgs,
        /// Output MIDI path; defaults to the program name with `.mid`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the trace to this path.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Execute a program and write its control-flow trace.
    Trace {
        #[command(flatten)]
        exec: ExecutionArgs,
        /// Output trace path; defaults to the program name with `.trace`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a saved trace to MIDI without re-executing the program.
    Render {
        /// Trace file produced by `run --trace` or `trace`.
        trace: PathBuf,
        #[command(flatten)]
        schema: SchemaArgs,
        /// Output MIDI path; defaults to the trace name with `.mid`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a schema file; prints diagnostics, silent when valid.
    ValidateSchema {
        schema: PathBuf,
    },
    /// Run the seeded-bug corpus and print a pass/fail table.
    Corpus {
        /// Corpus directory.
        #[arg(default_value = "corpus")]
        dir: PathBuf,
        #[command(flatten)]
        schema: SchemaArgs,
        /// Write a machine-readable report (`case input expected actual verdict`).
        #[arg(long)]
        report: Option<PathBuf>,
        /// Seed for the mutation self-check.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("{message}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(command: Command) -> Result<(), String> {
    match command {
        Command::Run { exec, schema, out, trace } => {
            let program = load_program(&exec.program)?;
            let (result, recorded) = execute(&program, &exec)?;
            if let Some(trace_path) = trace {
                write_atomic(&trace_path, serialize_trace(&recorded).as_bytes())?;
            }
            let schema = resolve_schema(&schema)?;
            let out = out.unwrap_or_else(|| exec.program.with_extension("mid"));
            write_midi(&recorded, &schema, &out)?;
            print!("{}", result.output);
            finish_run(&result)
        }
        Command::Trace { exec, out } => {
            let program = load_program(&exec.program)?;
            let (result, recorded) = execute(&program, &exec)?;
            let out = out.unwrap_or_else(|| exec.program.with_extension("trace"));
            write_atomic(&out, serialize_trace(&recorded).as_bytes())?;
            print!("{}", result.output);
            finish_run(&result)
        }
        Command::Render { trace, schema, out } => {
            let text = read_file(&trace)?;
            let recorded = parse_trace(&text).map_err(|e| format!("{}: {e}", trace.display()))?;
            let schema = resolve_schema(&schema)?;
            let out = out.unwrap_or_else(|| trace.with_extension("mid"));
            write_midi(&recorded, &schema, &out)
        }
        Command::ValidateSchema { schema } => {
            let text = read_file(&schema)?;
            let parsed = parse_schema(&text).map_err(|e| e.to_string())?;
            let diagnostics = validate_schema(&parsed);
            if diagnostics.is_empty() {
                Ok(())
            } else {
                Err(diagnostics
                    .iter()
                    .map(|d| format!("{}: {d}", schema.display()))
                    .collect::<Vec<_>>()
                    .join("\n"))
            }
        }
        Command::Corpus { dir, schema, report, seed } => {
            let schema = resolve_schema(&schema)?;
            run_corpus_command(&dir, &schema, report.as_deref(), seed)
        }
    }
}

fn read_file(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_program(path: &Path) -> Result<caitlin::lang::Program, String> {
    let source = read_file(path)?;
    let program = compile(&source).map_err(|e| format!("{}: {e}", path.display()))?;
    let diagnostics = check(&program);
    if !diagnostics.is_empty() {
        return Err(diagnostics
            .iter()
            .map(|d| format!("{}: {d}", path.display()))
            .collect::<Vec<_>>()
            .join("\n"));
    }
    Ok(program)
}

fn execute(
    program: &caitlin::lang::Program,
    exec: &ExecutionArgs,
) -> Result<(caitlin::interp::RunResult, Trace), String> {
    let input = match (&exec.input, &exec.input_text) {
        (Some(path), _) => read_file(path)?,
        (None, Some(text)) => text.clone(),
        (None, None) => String::new(),
    };
    let options = RunOptions {
        step_limit: exec.max_iterations,
        subexpr_tracing: exec.subexpr,
    };
    Ok(run(program, &input, &options))
}

/// Runtime errors are reported after artifacts are written; the trace
/// and score of a faulting run are exactly what to listen to.
fn finish_run(result: &caitlin::interp::RunResult) -> Result<(), String> {
    match &result.status {
        RunStatus::Completed => Ok(()),
        status => Err(status.to_string()),
    }
}

fn resolve_schema(args: &SchemaArgs) -> Result<AuralizationSchema, String> {
    let mut schema = match &args.schema {
        Some(path) => {
            let text = read_file(path)?;
            let parsed = parse_schema(&text).map_err(|e| format!("{}: {e}", path.display()))?;
            let diagnostics = validate_schema(&parsed);
            if !diagnostics.is_empty() {
                return Err(diagnostics
                    .iter()
                    .map(|d| format!("{}: {d}", path.display()))
                    .collect::<Vec<_>>()
                    .join("\n"));
            }
            parsed
        }
        None => default_schema(),
    };
    if let Some(tempo) = args.tempo {
        schema.tempo_bpm = tempo;
        let diagnostics = validate_schema(&schema);
        if !diagnostics.is_empty() {
            return Err(format!("--tempo {tempo}: {}", diagnostics[0]));
        }
    }
    Ok(schema)
}

fn write_midi(trace: &Trace, schema: &AuralizationSchema, out: &Path) -> Result<(), String> {
    let score = auralize(trace, schema).map_err(|e| e.to_string())?;
    let bytes = encode_smf(&score).map_err(|e| e.to_string())?;
    write_atomic(out, &bytes)
}

/// Write-temp-then-rename so interrupted runs never leave partial files.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), String> {
    let parent = path.parent().filter(|p| !p.as_os_str().is_empty());
    let dir = parent.unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .map_err(|e| format!("{}: cannot create temp file: {e}", path.display()))?;
    std::io::Write::write_all(&mut tmp, bytes)
        .map_err(|e| format!("{}: {e}", path.display()))?;
    tmp.persist(path)
        .map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(())
}

fn run_corpus_command(
    dir: &Path,
    schema: &AuralizationSchema,
    report_path: Option<&Path>,
    seed: u64,
) -> Result<(), String> {
    let cases = load_corpus(dir).map_err(|e| e.to_string())?;
    if cases.is_empty() {
        return Err(format!("{}: no corpus cases found", dir.display()));
    }
    let reports = run_corpus(&cases, schema).map_err(|e| e.to_string())?;

    println!(
        "{:<24} {:>5}  {:>8}  {:>8}  {:>6}  verdict",
        "case", "input", "expected", "actual", "output"
    );
    let mut failures = 0;
    let mut lines = Vec::new();
    for r in &reports {
        let expected = if r.expected_divergence { "diverge" } else { "same" };
        let actual = if r.actual_divergence { "diverge" } else { "same" };
        let output = match r.output_matches {
            Some(true) => "ok",
            Some(false) => "WRONG",
            None => "-",
        };
        let verdict = if r.pass { "PASS" } else { "FAIL" };
        if !r.pass {
            failures += 1;
        }
        println!(
            "{:<24} {:>5}  {:>8}  {:>8}  {:>6}  {verdict}",
            r.case_name, r.input_index, expected, actual, output
        );
        lines.push(format!(
            "{} {} {} {} {verdict}",
            r.case_name,
            r.input_index,
            if r.expected_divergence { "T" } else { "F" },
            if r.actual_divergence { "T" } else { "F" },
        ));
    }

    let mut mutation_failures = 0;
    for case in &cases {
        if let Err(e) = verify_mutation(case, seed) {
            eprintln!("mutation self-check: {e}");
            mutation_failures += 1;
        }
    }

    if let Some(path) = report_path {
        write_atomic(path, (lines.join("\n") + "\n").as_bytes())?;
    }
    println!(
        "SUMMARY: {}/{} pass, mutation self-checks {}",
        reports.len() - failures,
        reports.len(),
        if mutation_failures == 0 {
            "ok".to_string()
        } else {
            format!("{mutation_failures} failed")
        }
    );
    if failures > 0 || mutation_failures > 0 {
        Err(format!("{} corpus failures", failures + mutation_failures))
    } else {
        Ok(())
    }
}
