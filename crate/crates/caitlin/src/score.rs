//! Assembles a [`Trace`] and an [`AuralizationSchema`] into an
//! absolute-time [`Score`].
//!
//! Event grammar per construct: a percussion prefix bar, the entry
//! motif, the construct's inner events laid out sequentially (nested
//! constructs render inline, pushing the parent's exit later), then the
//! exit motif. Iteration constructs close with the suffix percussion;
//! their final tick is doubled by the final-iteration percussion on the
//! same beat. Boolean outcomes become triads: major for true, minor for
//! false (swappable via the schema's `trueMode`); a CASE arm that
//! matches gets its triad on top of the cowbell test, the else path a
//! minor triad, and selection exits are realized in major or minor
//! according to whether the construct matched.

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::motif::{
    beats, build_triad, classify_triad, quantize_to_scale, realize_motif, Beats, Inversion, Mode,
    MotifError, Note, TriadQuality, NOTE_VELOCITY,
};
use crate::schema::{AuralizationSchema, PointOfInterest};
use crate::trace::{ConstructFamily, ConstructKind, EventData, Trace};

/// Channel assignment per construct family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrackPlan {
    pub iteration_channel: u8,
    pub selection_channel: u8,
    pub subexpr_channel: u8,
    pub percussion_channel: u8,
}

impl Default for TrackPlan {
    fn default() -> TrackPlan {
        TrackPlan {
            iteration_channel: 0,
            selection_channel: 1,
            subexpr_channel: 2,
            percussion_channel: 9,
        }
    }
}

impl TrackPlan {
    pub fn channel_for(&self, family: ConstructFamily) -> u8 {
        match family {
            ConstructFamily::Iteration => self.iteration_channel,
            ConstructFamily::Selection => self.selection_channel,
        }
    }
}

pub const PERCUSSION_VELOCITY: u8 = 112;
/// Vibraphone, carrying subexpression outcomes on their own channel.
const SUBEXPR_PROGRAM: u8 = 11;
/// Melodic register: MIDI key of scale degree 1.
const MOTIF_REGISTER: u8 = 60;
/// Triads anchor here, putting the first-inversion mediant at the bass.
const TRIAD_REGISTER: u8 = 64;
/// Subexpression dyads sound above the melodic register.
const SUBEXPR_REGISTER: u8 = 72;
const PERCUSSION_DURATION: (i64, i64) = (1, 4);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScoreEventKind {
    Tempo { bpm: u32 },
    ProgramChange { program: u8 },
    Percussion { key: u8, velocity: u8 },
    Note { pitch: u8, velocity: u8 },
}

impl ScoreEventKind {
    /// Tie-break rank: tempo < programChange < percussion < note.
    fn rank(&self) -> u8 {
        match self {
            ScoreEventKind::Tempo { .. } => 0,
            ScoreEventKind::ProgramChange { .. } => 1,
            ScoreEventKind::Percussion { .. } => 2,
            ScoreEventKind::Note { .. } => 3,
        }
    }

    fn value(&self) -> (u32, u8) {
        match self {
            ScoreEventKind::Tempo { bpm } => (*bpm, 0),
            ScoreEventKind::ProgramChange { program } => (*program as u32, 0),
            ScoreEventKind::Percussion { key, velocity } => (*key as u32, *velocity),
            ScoreEventKind::Note { pitch, velocity } => (*pitch as u32, *velocity),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            ScoreEventKind::Tempo { .. } => "tempo",
            ScoreEventKind::ProgramChange { .. } => "programChange",
            ScoreEventKind::Percussion { .. } => "percussion",
            ScoreEventKind::Note { .. } => "note",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScoreEvent {
    pub channel: u8,
    pub start: Beats,
    pub duration: Beats,
    pub kind: ScoreEventKind,
}

impl ScoreEvent {
    fn sort_key(&self) -> (Beats, u8, u8, (u32, u8), Beats) {
        (self.start, self.channel, self.kind.rank(), self.kind.value(), self.duration)
    }
}

/// Canonically ordered event list plus timing resolution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Score {
    pub ppq: u16,
    pub track_plan: TrackPlan,
    pub events: Vec<ScoreEvent>,
}

pub const DEFAULT_PPQ: u16 = 480;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScoreError {
    #[error("trace event outside any open construct (seq {seq})")]
    EventOutsideConstruct { seq: u64 },
    #[error("motif realization failed: {0}")]
    Motif(#[from] MotifError),
}

#[derive(Debug)]
struct Activation {
    kind: ConstructKind,
    ticks_total: u64,
    matched: Option<bool>,
    elision_emitted: bool,
}

/// Renders `trace` under `schema`. The trace must be well nested (as
/// guaranteed by the interpreter and by [`crate::trace::parse_trace`]);
/// any schema that passes validation renders any such trace.
pub fn auralize(trace: &Trace, schema: &AuralizationSchema) -> Result<Score, ScoreError> {
    // First pass: per-activation iteration counts and match outcomes.
    let mut activations: Vec<Activation> = Vec::new();
    let mut activation_of_enter: Vec<usize> = Vec::new(); // per enter event, in order
    {
        let mut stack: Vec<usize> = Vec::new();
        for event in &trace.events {
            match event.data {
                EventData::ConstructEnter => {
                    activation_of_enter.push(activations.len());
                    stack.push(activations.len());
                    activations.push(Activation {
                        kind: event.construct_kind,
                        ticks_total: 0,
                        matched: None,
                        elision_emitted: false,
                    });
                }
                EventData::ConstructExit => {
                    stack.pop().ok_or(ScoreError::EventOutsideConstruct { seq: event.seq })?;
                }
                other => {
                    let top = *stack
                        .last()
                        .ok_or(ScoreError::EventOutsideConstruct { seq: event.seq })?;
                    let activation = &mut activations[top];
                    match other {
                        EventData::IterationTick { .. } => activation.ticks_total += 1,
                        EventData::ConditionOutcome { outcome } => {
                            activation.matched = Some(outcome);
                        }
                        EventData::CaseArmTest { outcome, .. } => {
                            activation.matched =
                                Some(activation.matched.unwrap_or(false) || outcome);
                        }
                        _ => {}
                    }
                }
            }
        }
    }

    // Second pass: sequential layout.
    let plan = TrackPlan::default();
    let mut events: Vec<ScoreEvent> = Vec::new();
    let mut cursor = beats(0, 1);
    let percussion_duration = beats(PERCUSSION_DURATION.0, PERCUSSION_DURATION.1);
    let hit = |events: &mut Vec<ScoreEvent>, start: Beats, point: PointOfInterest| {
        events.push(ScoreEvent {
            channel: plan.percussion_channel,
            start,
            duration: percussion_duration,
            kind: ScoreEventKind::Percussion {
                key: schema.percussion(point),
                velocity: PERCUSSION_VELOCITY,
            },
        });
    };
    let push_notes = |events: &mut Vec<ScoreEvent>, channel: u8, notes: &[Note]| {
        for note in notes {
            events.push(ScoreEvent {
                channel,
                start: note.start,
                duration: note.duration,
                kind: ScoreEventKind::Note {
                    pitch: note.pitch,
                    velocity: note.velocity,
                },
            });
        }
    };
    let triad_notes = |quality: TriadQuality, start: Beats, duration: Beats| -> Vec<ScoreEvent> {
        let pitches = build_triad(0, quality, Inversion::First, TRIAD_REGISTER)
            .expect("triad register is always in range");
        pitches
            .into_iter()
            .map(|pitch| ScoreEvent {
                channel: 0, // caller overrides
                start,
                duration,
                kind: ScoreEventKind::Note {
                    pitch,
                    velocity: NOTE_VELOCITY,
                },
            })
            .collect()
    };

    events.push(ScoreEvent {
        channel: 0,
        start: cursor,
        duration: beats(0, 1),
        kind: ScoreEventKind::Tempo { bpm: schema.tempo_bpm },
    });
    if trace
        .events
        .iter()
        .any(|e| matches!(e.data, EventData::SubexprOutcome { .. }))
    {
        events.push(ScoreEvent {
            channel: plan.subexpr_channel,
            start: cursor,
            duration: beats(0, 1),
            kind: ScoreEventKind::ProgramChange { program: SUBEXPR_PROGRAM },
        });
    }

    let mut enter_index = 0usize;
    let mut stack: Vec<usize> = Vec::new();
    for event in &trace.events {
        match event.data {
            EventData::ConstructEnter => {
                let activation_index = activation_of_enter[enter_index];
                enter_index += 1;
                stack.push(activation_index);
                let kind = event.construct_kind;
                let channel = plan.channel_for(kind.family());
                events.push(ScoreEvent {
                    channel,
                    start: cursor,
                    duration: beats(0, 1),
                    kind: ScoreEventKind::ProgramChange { program: schema.timbre(kind) },
                });
                let prefix = match kind.family() {
                    ConstructFamily::Iteration => PointOfInterest::IterationPrefix,
                    ConstructFamily::Selection => PointOfInterest::SelectionPrefix,
                };
                hit(&mut events, cursor, prefix);
                cursor += schema.durations.prefix;
                let motifs = schema.motifs(kind);
                let notes = realize_motif(
                    &motifs.entry,
                    &schema.scale_for(kind),
                    Mode::Major,
                    MOTIF_REGISTER,
                    cursor,
                )?;
                push_notes(&mut events, channel, &notes);
                cursor += motifs.entry.total_beats();
            }
            EventData::ConstructExit => {
                let activation_index = stack.pop().expect("validated in the first pass");
                let activation = &activations[activation_index];
                let kind = activation.kind;
                let channel = plan.channel_for(kind.family());
                let mode = match kind.family() {
                    ConstructFamily::Iteration => Mode::Major,
                    ConstructFamily::Selection => match activation.matched {
                        Some(outcome) => schema.mode_for(outcome),
                        None => Mode::Major,
                    },
                };
                let motifs = schema.motifs(kind);
                let notes = realize_motif(
                    &motifs.exit,
                    &schema.scale_for(kind),
                    mode,
                    MOTIF_REGISTER,
                    cursor,
                )?;
                push_notes(&mut events, channel, &notes);
                if kind.family() == ConstructFamily::Iteration {
                    let total = motifs.exit.total_beats();
                    let offset = if total > beats(1, 1) {
                        total - beats(1, 1)
                    } else {
                        beats(0, 1)
                    };
                    hit(&mut events, cursor + offset, PointOfInterest::IterationSuffix);
                }
                cursor += motifs.exit.total_beats();
            }
            EventData::IterationTick { iteration, is_final } => {
                let activation_index = *stack
                    .last()
                    .ok_or(ScoreError::EventOutsideConstruct { seq: event.seq })?;
                let activation = &mut activations[activation_index];
                let cap = schema.iteration_cap as u64;
                if iteration > cap && !is_final {
                    // Elide: one marker stands in for the hidden run.
                    if !activation.elision_emitted {
                        activation.elision_emitted = true;
                        hit(&mut events, cursor, PointOfInterest::Elision);
                        cursor += schema.durations.elision;
                    }
                    continue;
                }
                let kind = activation.kind;
                let channel = plan.channel_for(kind.family());
                let total = activation.ticks_total.max(1);
                let pitch = if total == 1 {
                    MOTIF_REGISTER
                } else {
                    // Clamp defensively so hand-built traces stay renderable.
                    let value = iteration.clamp(1, total) as i64;
                    quantize_to_scale(value, 1, total as i64, &schema.scale_for(kind), MOTIF_REGISTER)?
                };
                events.push(ScoreEvent {
                    channel,
                    start: cursor,
                    duration: schema.durations.iteration_tick,
                    kind: ScoreEventKind::Note { pitch, velocity: NOTE_VELOCITY },
                });
                if is_final {
                    hit(&mut events, cursor, PointOfInterest::FinalIteration);
                }
                cursor += schema.durations.iteration_tick;
            }
            EventData::ConditionOutcome { outcome } => {
                let activation_index = *stack
                    .last()
                    .ok_or(ScoreError::EventOutsideConstruct { seq: event.seq })?;
                let kind = activations[activation_index].kind;
                let channel = plan.channel_for(kind.family());
                let mut triad = triad_notes(
                    schema.quality_for(outcome),
                    cursor,
                    schema.durations.condition_outcome,
                );
                for note in &mut triad {
                    note.channel = channel;
                }
                events.extend(triad);
                cursor += schema.durations.condition_outcome;
            }
            EventData::CaseArmTest { outcome, .. } => {
                if stack.is_empty() {
                    return Err(ScoreError::EventOutsideConstruct { seq: event.seq });
                }
                hit(&mut events, cursor, PointOfInterest::CaseTest);
                if outcome {
                    // The match chord sounds on top of the cowbell test.
                    let mut triad = triad_notes(
                        schema.quality_for(true),
                        cursor,
                        schema.durations.case_test,
                    );
                    for note in &mut triad {
                        note.channel = plan.selection_channel;
                    }
                    events.extend(triad);
                }
                cursor += schema.durations.case_test;
            }
            EventData::ElsePathTaken => {
                if stack.is_empty() {
                    return Err(ScoreError::EventOutsideConstruct { seq: event.seq });
                }
                let mut triad = triad_notes(
                    schema.quality_for(false),
                    cursor,
                    schema.durations.else_path,
                );
                for note in &mut triad {
                    note.channel = plan.selection_channel;
                }
                events.extend(triad);
                cursor += schema.durations.else_path;
            }
            EventData::SubexprOutcome { outcome, .. } => {
                if stack.is_empty() {
                    return Err(ScoreError::EventOutsideConstruct { seq: event.seq });
                }
                let interval = match schema.quality_for(outcome) {
                    TriadQuality::Major => 4,
                    TriadQuality::Minor => 3,
                };
                for pitch in [SUBEXPR_REGISTER, SUBEXPR_REGISTER + interval] {
                    events.push(ScoreEvent {
                        channel: plan.subexpr_channel,
                        start: cursor,
                        duration: schema.durations.subexpr,
                        kind: ScoreEventKind::Note { pitch, velocity: NOTE_VELOCITY },
                    });
                }
                cursor += schema.durations.subexpr;
            }
        }
    }

    events.sort_by_key(|e| e.sort_key());
    Ok(Score {
        ppq: DEFAULT_PPQ,
        track_plan: plan,
        events,
    })
}

/// Content hash over the canonical event list; equal scores have equal
/// digests.
pub fn score_digest(score: &Score) -> String {
    let mut hasher = Sha256::new();
    hasher.update(canonical_text(score).as_bytes());
    hasher.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn canonical_text(score: &Score) -> String {
    let mut out = format!("ppq={}\n", score.ppq);
    for event in &score.events {
        out.push_str(&format!(
            "ch={} start={}/{} dur={}/{} {:?}\n",
            event.channel,
            event.start.numer(),
            event.start.denom(),
            event.duration.numer(),
            event.duration.denom(),
            event.kind,
        ));
    }
    out
}

/// Simultaneous three-note groups on one channel, classified by quality.
/// Motif lines and iteration notes are strictly melodic, so every
/// decision-point chord shows up here.
pub fn extract_triads(score: &Score) -> Vec<(Beats, TriadQuality)> {
    let mut triads = Vec::new();
    let mut i = 0;
    let notes: Vec<&ScoreEvent> = score
        .events
        .iter()
        .filter(|e| matches!(e.kind, ScoreEventKind::Note { .. }))
        .collect();
    while i < notes.len() {
        let mut j = i + 1;
        while j < notes.len()
            && notes[j].start == notes[i].start
            && notes[j].channel == notes[i].channel
        {
            j += 1;
        }
        if j - i == 3 {
            let pitches: crate::motif::PitchSet = notes[i..j]
                .iter()
                .map(|e| match e.kind {
                    ScoreEventKind::Note { pitch, .. } => pitch,
                    _ => unreachable!(),
                })
                .collect();
            if let Some(quality) = classify_triad(&pitches) {
                triads.push((notes[i].start, quality));
            }
        }
        i = j;
    }
    triads
}

/// Event counts per kind: (tempo, programChange, percussion, note).
pub fn count_by_kind(score: &Score) -> (usize, usize, usize, usize) {
    let mut counts = (0, 0, 0, 0);
    for event in &score.events {
        match event.kind {
            ScoreEventKind::Tempo { .. } => counts.0 += 1,
            ScoreEventKind::ProgramChange { .. } => counts.1 += 1,
            ScoreEventKind::Percussion { .. } => counts.2 += 1,
            ScoreEventKind::Note { .. } => counts.3 += 1,
        }
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interp::{run, RunOptions};
    use crate::lang::{check, compile};
    use crate::schema::default_schema;

    fn trace_for(source: &str, input: &str) -> Trace {
        let program = compile(source).unwrap();
        assert_eq!(check(&program), vec![]);
        let (result, trace) = run(&program, input, &RunOptions::default());
        assert_eq!(result.status, crate::interp::RunStatus::Completed);
        trace
    }

    const FOR_SIX: &str = "PROGRAM loopdemo ; VAR counter, total : INTEGER ;
         BEGIN total := 0 ; FOR counter := 1 TO 6 DO total := total + counter END .";

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

    fn percussion_hits(score: &Score, key: u8) -> Vec<Beats> {
        score
            .events
            .iter()
            .filter_map(|e| match e.kind {
                ScoreEventKind::Percussion { key: k, .. } if k == key => Some(e.start),
                _ => None,
            })
            .collect()
    }

    #[test]
    fn counting_loop_renders_the_documented_structure() {
        let schema = default_schema();
        let score = auralize(&trace_for(FOR_SIX, ""), &schema).unwrap();

        let prefix = percussion_hits(&score, schema.percussion(PointOfInterest::IterationPrefix));
        assert_eq!(prefix.len(), 1);
        let finals = percussion_hits(&score, schema.percussion(PointOfInterest::FinalIteration));
        assert_eq!(finals.len(), 1);
        let suffix = percussion_hits(&score, schema.percussion(PointOfInterest::IterationSuffix));
        assert_eq!(suffix.len(), 1);

        let entry_len = schema.motifs(ConstructKind::ForTo).entry.notes.len();
        let exit_len = schema.motifs(ConstructKind::ForTo).exit.notes.len();
        let melodic: Vec<&ScoreEvent> = score
            .events
            .iter()
            .filter(|e| e.channel == 0 && matches!(e.kind, ScoreEventKind::Note { .. }))
            .collect();
        assert_eq!(melodic.len(), entry_len + 6 + exit_len);

        // The final-iteration percussion coincides with the sixth tick.
        let ticks: Vec<&ScoreEvent> = melodic
            .iter()
            .skip(entry_len)
            .take(6)
            .copied()
            .collect();
        assert_eq!(finals[0], ticks[5].start);
        // Rising contour.
        for pair in ticks.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let (ScoreEventKind::Note { pitch: pa, .. }, ScoreEventKind::Note { pitch: pb, .. }) =
                (a.kind, b.kind)
            else {
                panic!()
            };
            assert!(pb >= pa);
        }
        // Suffix is the last percussion event.
        let last_percussion = score
            .events
            .iter()
            .filter(|e| matches!(e.kind, ScoreEventKind::Percussion { .. }))
            .map(|e| e.start)
            .max()
            .unwrap();
        assert_eq!(suffix[0], last_percussion);
    }

    #[test]
    fn case_with_no_match_renders_one_minor_triad_and_minor_exit() {
        let schema = default_schema();
        let score = auralize(&trace_for(CASE_DEMO, "5"), &schema).unwrap();
        let cowbells = percussion_hits(&score, schema.percussion(PointOfInterest::CaseTest));
        assert_eq!(cowbells.len(), 3);
        let triads = extract_triads(&score);
        assert_eq!(
            triads.iter().filter(|(_, q)| *q == TriadQuality::Minor).count(),
            1
        );
        assert_eq!(
            triads.iter().filter(|(_, q)| *q == TriadQuality::Major).count(),
            0
        );
        // The else triad lands after the last cowbell, not on it.
        assert!(triads[0].0 > cowbells[2]);
        // Exit motif in minor: flat mediant present, natural absent, in
        // the notes after the triad.
        let exit_pcs: Vec<u8> = score
            .events
            .iter()
            .filter(|e| e.channel == 1 && e.start > triads[0].0)
            .filter_map(|e| match e.kind {
                ScoreEventKind::Note { pitch, .. } => Some(pitch % 12),
                _ => None,
            })
            .collect();
        assert!(exit_pcs.contains(&3), "minor mediant expected: {exit_pcs:?}");
        assert!(!exit_pcs.contains(&4), "major mediant unexpected: {exit_pcs:?}");
    }

    #[test]
    fn case_matching_the_third_arm_renders_a_major_triad_on_the_test() {
        let schema = default_schema();
        let score = auralize(&trace_for(CASE_DEMO, "0"), &schema).unwrap();
        let cowbells = percussion_hits(&score, schema.percussion(PointOfInterest::CaseTest));
        assert_eq!(cowbells.len(), 3);
        let triads = extract_triads(&score);
        assert_eq!(triads.len(), 1);
        assert_eq!(triads[0].1, TriadQuality::Major);
        // Coincident with the third cowbell.
        assert_eq!(triads[0].0, cowbells[2]);
        // Exit motif in major.
        let exit_pcs: Vec<u8> = score
            .events
            .iter()
            .filter(|e| e.channel == 1 && e.start > triads[0].0 + beats(1, 1))
            .filter_map(|e| match e.kind {
                ScoreEventKind::Note { pitch, .. } => Some(pitch % 12),
                _ => None,
            })
            .collect();
        assert!(exit_pcs.contains(&4), "major mediant expected: {exit_pcs:?}");
        assert!(!exit_pcs.contains(&3), "minor mediant unexpected: {exit_pcs:?}");
    }

    #[test]
    fn condition_outcomes_render_matching_triad_qualities() {
        let trace = trace_for(
            "PROGRAM p ; VAR i : INTEGER ;
             BEGIN i := 0 ; WHILE i < 2 DO i := i + 1 ;
             IF i = 2 THEN Writeln('two') END .",
            "",
        );
        let score = auralize(&trace, &default_schema()).unwrap();
        let qualities: Vec<TriadQuality> = extract_triads(&score).into_iter().map(|(_, q)| q).collect();
        // WHILE: true, true, false; IF: true.
        assert_eq!(
            qualities,
            vec![
                TriadQuality::Major,
                TriadQuality::Major,
                TriadQuality::Minor,
                TriadQuality::Major
            ]
        );
    }

    #[test]
    fn timeline_is_monotone_with_one_initial_tempo_event() {
        let score = auralize(&trace_for(CASE_DEMO, "0"), &default_schema()).unwrap();
        assert_eq!(
            score
                .events
                .iter()
                .filter(|e| matches!(e.kind, ScoreEventKind::Tempo { .. }))
                .count(),
            1
        );
        assert_eq!(score.events[0].kind, ScoreEventKind::Tempo { bpm: 120 });
        for pair in score.events.windows(2) {
            assert!(pair[0].start <= pair[1].start);
        }
        for event in &score.events {
            match event.kind {
                ScoreEventKind::Percussion { .. } => assert_eq!(event.channel, 9),
                ScoreEventKind::Note { .. } => assert_ne!(event.channel, 9),
                _ => {}
            }
        }
    }

    #[test]
    fn tempo_override_changes_only_the_tempo_event() {
        let trace = trace_for(FOR_SIX, "");
        let slow = auralize(&trace, &default_schema()).unwrap();
        let mut schema = default_schema();
        schema.tempo_bpm = 90;
        let fast = auralize(&trace, &schema).unwrap();
        assert_eq!(slow.events.len(), fast.events.len());
        for (a, b) in slow.events.iter().zip(fast.events.iter()) {
            match (a.kind, b.kind) {
                (ScoreEventKind::Tempo { bpm: x }, ScoreEventKind::Tempo { bpm: y }) => {
                    assert_eq!((x, y), (120, 90));
                }
                (ka, kb) => {
                    assert_eq!(ka, kb);
                    assert_eq!(a.start, b.start);
                }
            }
        }
    }

    #[test]
    fn long_loops_elide_to_a_marker_plus_final_tick() {
        let schema = default_schema();
        let trace = trace_for(
            "PROGRAM p ; VAR i, x : INTEGER ;
             BEGIN x := 0 ; FOR i := 1 TO 100 DO x := x + 1 END .",
            "",
        );
        let score = auralize(&trace, &schema).unwrap();
        let notes_on_ch0 = score
            .events
            .iter()
            .filter(|e| e.channel == 0 && matches!(e.kind, ScoreEventKind::Note { .. }))
            .count();
        let entry_len = schema.motifs(ConstructKind::ForTo).entry.notes.len();
        let exit_len = schema.motifs(ConstructKind::ForTo).exit.notes.len();
        // 64 capped ticks plus the final one.
        assert_eq!(notes_on_ch0, entry_len + 64 + 1 + exit_len);
        let elisions = percussion_hits(&score, schema.percussion(PointOfInterest::Elision));
        assert_eq!(elisions.len(), 1);
    }

    #[test]
    fn digests_distinguish_flow_not_formatting() {
        let schema = default_schema();
        let a = auralize(&trace_for(CASE_DEMO, "5"), &schema).unwrap();
        let b = auralize(&trace_for(CASE_DEMO, "5"), &schema).unwrap();
        let c = auralize(&trace_for(CASE_DEMO, "0"), &schema).unwrap();
        assert_eq!(score_digest(&a), score_digest(&b));
        assert_ne!(score_digest(&a), score_digest(&c));
    }

    #[test]
    fn subexpr_events_render_dyads_on_their_own_channel() {
        let program = compile(
            "PROGRAM p ; VAR a, b : BOOLEAN ;
             BEGIN a := TRUE ; b := FALSE ;
             IF a AND b THEN Writeln('x') END .",
        )
        .unwrap();
        let (_, trace) = run(
            &program,
            "",
            &RunOptions { step_limit: 1000, subexpr_tracing: true },
        );
        let score = auralize(&trace, &default_schema()).unwrap();
        let ch2_notes: Vec<u8> = score
            .events
            .iter()
            .filter(|e| e.channel == 2)
            .filter_map(|e| match e.kind {
                ScoreEventKind::Note { pitch, .. } => Some(pitch),
                _ => None,
            })
            .collect();
        // true operand: major third; false operand: minor third.
        assert_eq!(ch2_notes, vec![72, 76, 72, 75]);
        assert!(score
            .events
            .iter()
            .any(|e| e.channel == 2 && matches!(e.kind, ScoreEventKind::ProgramChange { .. })));
    }
}
