//! Control-flow trace: the event vocabulary connecting execution to music.
//!
//! A [`Trace`] is an ordered stream of [`TraceEvent`]s recorded while a
//! program runs. Traces serialize to a line-oriented text format so they
//! can be rendered later (or by other tools) without re-executing the
//! program:
//!
//! ```text
//! CAITLIN-TRACE v1 program=<name> digest=<hex>
//! seq=0 cid=0 kind=FOR_TO ev=ConstructEnter
//! seq=1 cid=0 kind=FOR_TO ev=IterationTick iter=1 final=F
//! ...
//! ```
//!
//! Optional payload fields appear in the fixed order
//! `out`, `iter`, `final`, `arm`, `expr`; lines end in LF.

use std::fmt;

use thiserror::Error;

/// Identifier of a construct node, dense and assigned in source order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConstructId(pub u32);

/// Identifier of an expression node, unique within a program.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExprId(pub u32);

impl fmt::Display for ConstructId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for ExprId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The eight auralizable language constructs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConstructKind {
    While,
    Repeat,
    ForTo,
    ForDownto,
    If,
    IfElse,
    Case,
    CaseElse,
}

/// Motif family a construct belongs to. All iterations share one musical
/// theme, all selections another.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConstructFamily {
    Iteration,
    Selection,
}

impl ConstructKind {
    pub const ALL: [ConstructKind; 8] = [
        ConstructKind::While,
        ConstructKind::Repeat,
        ConstructKind::ForTo,
        ConstructKind::ForDownto,
        ConstructKind::If,
        ConstructKind::IfElse,
        ConstructKind::Case,
        ConstructKind::CaseElse,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ConstructKind::While => "WHILE",
            ConstructKind::Repeat => "REPEAT",
            ConstructKind::ForTo => "FOR_TO",
            ConstructKind::ForDownto => "FOR_DOWNTO",
            ConstructKind::If => "IF",
            ConstructKind::IfElse => "IF_ELSE",
            ConstructKind::Case => "CASE",
            ConstructKind::CaseElse => "CASE_ELSE",
        }
    }

    pub fn from_name(name: &str) -> Option<ConstructKind> {
        Self::ALL.iter().copied().find(|k| k.name() == name)
    }

    pub fn family(self) -> ConstructFamily {
        match self {
            ConstructKind::While
            | ConstructKind::Repeat
            | ConstructKind::ForTo
            | ConstructKind::ForDownto => ConstructFamily::Iteration,
            ConstructKind::If
            | ConstructKind::IfElse
            | ConstructKind::Case
            | ConstructKind::CaseElse => ConstructFamily::Selection,
        }
    }

    /// Index into per-construct tables (timbres, motifs, scales).
    pub fn index(self) -> usize {
        Self::ALL.iter().position(|k| *k == self).unwrap()
    }
}

impl fmt::Display for ConstructKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Event payload; the variant is the event kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventData {
    ConstructEnter,
    ConstructExit,
    ConditionOutcome { outcome: bool },
    SubexprOutcome { outcome: bool, expr: ExprId },
    IterationTick { iteration: u64, is_final: bool },
    CaseArmTest { outcome: bool, arm: u32 },
    ElsePathTaken,
}

impl EventData {
    pub fn kind_name(&self) -> &'static str {
        match self {
            EventData::ConstructEnter => "ConstructEnter",
            EventData::ConstructExit => "ConstructExit",
            EventData::ConditionOutcome { .. } => "ConditionOutcome",
            EventData::SubexprOutcome { .. } => "SubexprOutcome",
            EventData::IterationTick { .. } => "IterationTick",
            EventData::CaseArmTest { .. } => "CaseArmTest",
            EventData::ElsePathTaken => "ElsePathTaken",
        }
    }
}

/// One timestamped control-flow occurrence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceEvent {
    pub seq: u64,
    pub construct_id: ConstructId,
    pub construct_kind: ConstructKind,
    pub data: EventData,
}

/// A complete run-time trace tied to its source text by digest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub program_name: String,
    pub source_digest: String,
    pub events: Vec<TraceEvent>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TraceParseError {
    #[error("line {line}: malformed trace record: {message}")]
    MalformedRecord { line: usize, message: String },
    #[error("line {line}: nesting violation: {message}")]
    NestingViolation { line: usize, message: String },
}

/// Incremental trace construction with enter/exit stack discipline.
///
/// The interpreter drives this; condition, tick and arm events are
/// attributed to the construct currently on top of the stack.
#[derive(Debug)]
pub struct TraceBuilder {
    program_name: String,
    source_digest: String,
    events: Vec<TraceEvent>,
    stack: Vec<(ConstructId, ConstructKind)>,
    next_seq: u64,
}

impl TraceBuilder {
    pub fn new(program_name: &str, source_digest: &str) -> TraceBuilder {
        TraceBuilder {
            program_name: program_name.to_string(),
            source_digest: source_digest.to_string(),
            events: Vec::new(),
            stack: Vec::new(),
            next_seq: 0,
        }
    }

    fn push(&mut self, construct_id: ConstructId, kind: ConstructKind, data: EventData) {
        self.events.push(TraceEvent {
            seq: self.next_seq,
            construct_id,
            construct_kind: kind,
            data,
        });
        self.next_seq += 1;
    }

    fn top(&self) -> (ConstructId, ConstructKind) {
        *self
            .stack
            .last()
            .expect("trace event emitted outside any construct")
    }

    pub fn enter(&mut self, id: ConstructId, kind: ConstructKind) {
        self.stack.push((id, kind));
        self.push(id, kind, EventData::ConstructEnter);
    }

    pub fn exit(&mut self) {
        let (id, kind) = self.stack.pop().expect("exit without matching enter");
        self.push(id, kind, EventData::ConstructExit);
    }

    pub fn condition(&mut self, outcome: bool) {
        let (id, kind) = self.top();
        self.push(id, kind, EventData::ConditionOutcome { outcome });
    }

    pub fn subexpr(&mut self, expr: ExprId, outcome: bool) {
        let (id, kind) = self.top();
        self.push(id, kind, EventData::SubexprOutcome { outcome, expr });
    }

    pub fn tick(&mut self, iteration: u64, is_final: bool) {
        let (id, kind) = self.top();
        self.push(id, kind, EventData::IterationTick { iteration, is_final });
    }

    pub fn arm_test(&mut self, arm: u32, outcome: bool) {
        let (id, kind) = self.top();
        self.push(id, kind, EventData::CaseArmTest { outcome, arm });
    }

    pub fn else_path(&mut self) {
        let (id, kind) = self.top();
        self.push(id, kind, EventData::ElsePathTaken);
    }

    pub fn depth(&self) -> usize {
        self.stack.len()
    }

    /// Finish a normally completed run; panics if constructs are open.
    pub fn finish(self) -> Trace {
        assert!(self.stack.is_empty(), "unclosed constructs at end of run");
        Trace {
            program_name: self.program_name,
            source_digest: self.source_digest,
            events: self.events,
        }
    }

    /// Finish an aborted run (runtime error or step-limit exhaustion),
    /// closing any open constructs so the trace stays well nested.
    pub fn abort(mut self) -> Trace {
        while !self.stack.is_empty() {
            self.exit();
        }
        self.finish()
    }
}

/// Writes a trace in the canonical line format. Lossless; equal traces
/// produce byte-equal text.
pub fn serialize_trace(trace: &Trace) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "CAITLIN-TRACE v1 program={} digest={}\n",
        trace.program_name, trace.source_digest
    ));
    for ev in &trace.events {
        out.push_str(&format!(
            "seq={} cid={} kind={} ev={}",
            ev.seq,
            ev.construct_id,
            ev.construct_kind.name(),
            ev.data.kind_name()
        ));
        match ev.data {
            EventData::ConstructEnter | EventData::ConstructExit | EventData::ElsePathTaken => {}
            EventData::ConditionOutcome { outcome } => {
                out.push_str(&format!(" out={}", flag(outcome)));
            }
            EventData::SubexprOutcome { outcome, expr } => {
                out.push_str(&format!(" out={} expr={}", flag(outcome), expr));
            }
            EventData::IterationTick { iteration, is_final } => {
                out.push_str(&format!(" iter={} final={}", iteration, flag(is_final)));
            }
            EventData::CaseArmTest { outcome, arm } => {
                out.push_str(&format!(" out={} arm={}", flag(outcome), arm));
            }
        }
        out.push('\n');
    }
    out
}

fn flag(b: bool) -> char {
    if b {
        'T'
    } else {
        'F'
    }
}

/// Parses the trace line format; inverse of [`serialize_trace`].
pub fn parse_trace(text: &str) -> Result<Trace, TraceParseError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| TraceParseError::MalformedRecord {
        line: 1,
        message: "empty trace text".to_string(),
    })?;
    let (program_name, source_digest) = parse_header(header)?;

    let mut events = Vec::new();
    let mut stack: Vec<ConstructId> = Vec::new();
    let mut prev_seq: Option<u64> = None;
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.is_empty() {
            return Err(TraceParseError::MalformedRecord {
                line: line_no,
                message: "blank line in event stream".to_string(),
            });
        }
        let ev = parse_event_line(line, line_no)?;
        if let Some(prev) = prev_seq {
            if ev.seq <= prev {
                return Err(TraceParseError::MalformedRecord {
                    line: line_no,
                    message: format!("seq {} not strictly increasing", ev.seq),
                });
            }
        }
        prev_seq = Some(ev.seq);
        match ev.data {
            EventData::ConstructEnter => stack.push(ev.construct_id),
            EventData::ConstructExit => match stack.pop() {
                Some(open) if open == ev.construct_id => {}
                Some(open) => {
                    return Err(TraceParseError::NestingViolation {
                        line: line_no,
                        message: format!("exit of cid={} while cid={} is open", ev.construct_id, open),
                    })
                }
                None => {
                    return Err(TraceParseError::NestingViolation {
                        line: line_no,
                        message: format!("exit of cid={} with no construct open", ev.construct_id),
                    })
                }
            },
            _ => {}
        }
        events.push(ev);
    }
    if let Some(open) = stack.last() {
        return Err(TraceParseError::NestingViolation {
            line: text.lines().count(),
            message: format!("cid={} never exited", open),
        });
    }
    Ok(Trace {
        program_name,
        source_digest,
        events,
    })
}

fn parse_header(header: &str) -> Result<(String, String), TraceParseError> {
    let malformed = |message: String| TraceParseError::MalformedRecord { line: 1, message };
    let rest = header
        .strip_prefix("CAITLIN-TRACE v1 ")
        .ok_or_else(|| malformed("missing CAITLIN-TRACE v1 header".to_string()))?;
    let mut parts = rest.split(' ');
    let program = parts
        .next()
        .and_then(|p| p.strip_prefix("program="))
        .ok_or_else(|| malformed("missing program= field".to_string()))?;
    let digest = parts
        .next()
        .and_then(|p| p.strip_prefix("digest="))
        .ok_or_else(|| malformed("missing digest= field".to_string()))?;
    if parts.next().is_some() {
        return Err(malformed("trailing fields in header".to_string()));
    }
    Ok((program.to_string(), digest.to_string()))
}

fn parse_event_line(line: &str, line_no: usize) -> Result<TraceEvent, TraceParseError> {
    let malformed =
        |message: String| TraceParseError::MalformedRecord { line: line_no, message };
    let mut fields = line.split(' ');
    let seq: u64 = take_field(&mut fields, "seq", line_no)?
        .parse()
        .map_err(|_| malformed("seq is not an integer".to_string()))?;
    let cid: u32 = take_field(&mut fields, "cid", line_no)?
        .parse()
        .map_err(|_| malformed("cid is not an integer".to_string()))?;
    let kind_name = take_field(&mut fields, "kind", line_no)?;
    let kind = ConstructKind::from_name(kind_name)
        .ok_or_else(|| malformed(format!("unknown construct kind `{kind_name}`")))?;
    let ev_name = take_field(&mut fields, "ev", line_no)?.to_string();

    let data = match ev_name.as_str() {
        "ConstructEnter" => EventData::ConstructEnter,
        "ConstructExit" => EventData::ConstructExit,
        "ElsePathTaken" => EventData::ElsePathTaken,
        "ConditionOutcome" => EventData::ConditionOutcome {
            outcome: parse_flag(take_field(&mut fields, "out", line_no)?, line_no)?,
        },
        "SubexprOutcome" => {
            let outcome = parse_flag(take_field(&mut fields, "out", line_no)?, line_no)?;
            let expr: u32 = take_field(&mut fields, "expr", line_no)?
                .parse()
                .map_err(|_| malformed("expr is not an integer".to_string()))?;
            EventData::SubexprOutcome {
                outcome,
                expr: ExprId(expr),
            }
        }
        "IterationTick" => {
            let iteration: u64 = take_field(&mut fields, "iter", line_no)?
                .parse()
                .map_err(|_| malformed("iter is not an integer".to_string()))?;
            let is_final = parse_flag(take_field(&mut fields, "final", line_no)?, line_no)?;
            EventData::IterationTick { iteration, is_final }
        }
        "CaseArmTest" => {
            let outcome = parse_flag(take_field(&mut fields, "out", line_no)?, line_no)?;
            let arm: u32 = take_field(&mut fields, "arm", line_no)?
                .parse()
                .map_err(|_| malformed("arm is not an integer".to_string()))?;
            EventData::CaseArmTest { outcome, arm }
        }
        other => return Err(malformed(format!("unknown event kind `{other}`"))),
    };
    if let Some(extra) = fields.next() {
        return Err(malformed(format!("unexpected trailing field `{extra}`")));
    }
    Ok(TraceEvent {
        seq,
        construct_id: ConstructId(cid),
        construct_kind: kind,
        data,
    })
}

fn take_field<'a>(
    fields: &mut impl Iterator<Item = &'a str>,
    key: &str,
    line_no: usize,
) -> Result<&'a str, TraceParseError> {
    let field = fields.next().ok_or_else(|| TraceParseError::MalformedRecord {
        line: line_no,
        message: format!("missing field `{key}`"),
    })?;
    field
        .strip_prefix(key)
        .and_then(|rest| rest.strip_prefix('='))
        .ok_or_else(|| TraceParseError::MalformedRecord {
            line: line_no,
            message: format!("expected field `{key}=`, found `{field}`"),
        })
}

fn parse_flag(text: &str, line_no: usize) -> Result<bool, TraceParseError> {
    match text {
        "T" => Ok(true),
        "F" => Ok(false),
        other => Err(TraceParseError::MalformedRecord {
            line: line_no,
            message: format!("expected T or F, found `{other}`"),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn empty_trace() -> Trace {
        Trace {
            program_name: "demo".to_string(),
            source_digest: "ab12".to_string(),
            events: Vec::new(),
        }
    }

    #[test]
    fn empty_trace_serializes_to_header_only() {
        let text = serialize_trace(&empty_trace());
        assert_eq!(text, "CAITLIN-TRACE v1 program=demo digest=ab12\n");
        assert_eq!(parse_trace(&text).unwrap(), empty_trace());
    }

    #[test]
    fn for_loop_trace_has_enter_six_ticks_exit() {
        let mut b = TraceBuilder::new("loop", "d");
        b.enter(ConstructId(0), ConstructKind::ForTo);
        for i in 1..=6 {
            b.tick(i, i == 6);
        }
        b.exit();
        let trace = b.finish();
        let text = serialize_trace(&trace);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 9);
        assert_eq!(lines[1], "seq=0 cid=0 kind=FOR_TO ev=ConstructEnter");
        assert_eq!(lines[2], "seq=1 cid=0 kind=FOR_TO ev=IterationTick iter=1 final=F");
        assert_eq!(lines[7], "seq=6 cid=0 kind=FOR_TO ev=IterationTick iter=6 final=T");
        assert_eq!(lines[8], "seq=7 cid=0 kind=FOR_TO ev=ConstructExit");
        assert_eq!(parse_trace(&text).unwrap(), trace);
    }

    #[test]
    fn exit_before_enter_is_a_nesting_violation() {
        let text = "CAITLIN-TRACE v1 program=x digest=y\n\
                    seq=0 cid=0 kind=IF ev=ConstructExit\n";
        match parse_trace(text) {
            Err(TraceParseError::NestingViolation { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected nesting violation, got {other:?}"),
        }
    }

    #[test]
    fn malformed_record_reports_line_number() {
        let text = "CAITLIN-TRACE v1 program=x digest=y\n\
                    seq=0 cid=0 kind=IF ev=ConstructEnter\n\
                    seq=1 cid=0 kind=IF ev=Bogus\n";
        match parse_trace(text) {
            Err(TraceParseError::MalformedRecord { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected malformed record, got {other:?}"),
        }
    }

    #[test]
    fn unexited_construct_is_rejected() {
        let text = "CAITLIN-TRACE v1 program=x digest=y\n\
                    seq=0 cid=0 kind=WHILE ev=ConstructEnter\n";
        assert!(matches!(
            parse_trace(text),
            Err(TraceParseError::NestingViolation { .. })
        ));
    }

    #[test]
    fn abort_closes_open_constructs() {
        let mut b = TraceBuilder::new("p", "d");
        b.enter(ConstructId(0), ConstructKind::While);
        b.condition(true);
        b.enter(ConstructId(1), ConstructKind::If);
        let trace = b.abort();
        let kinds: Vec<&str> = trace.events.iter().map(|e| e.data.kind_name()).collect();
        assert_eq!(
            kinds,
            vec![
                "ConstructEnter",
                "ConditionOutcome",
                "ConstructEnter",
                "ConstructExit",
                "ConstructExit"
            ]
        );
        // Round-trips because abort restored nesting.
        assert_eq!(parse_trace(&serialize_trace(&trace)).unwrap(), trace);
    }

    #[test]
    fn subexpr_and_arm_records_round_trip() {
        let mut b = TraceBuilder::new("p", "d");
        b.enter(ConstructId(2), ConstructKind::CaseElse);
        b.arm_test(0, false);
        b.arm_test(1, true);
        b.else_path();
        b.exit();
        b.enter(ConstructId(3), ConstructKind::If);
        b.subexpr(ExprId(7), true);
        b.condition(false);
        b.exit();
        let trace = b.finish();
        let text = serialize_trace(&trace);
        assert!(text.contains("ev=CaseArmTest out=F arm=0"));
        assert!(text.contains("ev=SubexprOutcome out=T expr=7"));
        assert_eq!(parse_trace(&text).unwrap(), trace);
    }
}
