//! Auralization schemas: the file-defined presentation skin binding
//! constructs to timbres, motifs, scales, percussion and tempo.
//!
//! A schema document is line-oriented `section.key = value` text with
//! `#` comments. Every field omitted from a document inherits from the
//! default schema, so an empty document *is* the default schema. The
//! sections:
//!
//! ```text
//! general.tempo = 120                     # beats per minute, 20..=300
//! general.trueMode = major                # rendering of boolean true
//! general.gm1Fallback = false             # tambourine for jingle bell
//! general.iterationCap = 64               # long loops elide past this
//! timbre.WHILE = 48                       # General MIDI program 0..=127
//! percussion.caseTest = 56                # GM percussion key 27..=87
//! scale.FOR_TO = tenNoteBlues             # FOR loops only
//! durations.iterationTick = 1/2           # beats per event kind
//! motif.WHILE.entry = 1:0:1/2, 3:0:1/2, ...   # degree:octave:duration
//! ```
//!
//! Rests in motif lists use `r` in the degree position.

use std::fmt;

use thiserror::Error;

use crate::motif::{
    beats, beats_text, parse_beats, Beats, Mode, MotifNote, MotifSpec, Scale, ScaleKind,
    TriadQuality, FAMILY_SIGNATURE_LEN,
};
use crate::trace::{ConstructFamily, ConstructKind};

/// Structural moments marked by unpitched percussion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PointOfInterest {
    /// Open triangle bar prefixed to every iteration construct.
    IterationPrefix,
    /// Mute triangle hit terminating every iteration construct.
    IterationSuffix,
    /// Cowbell hit per CASE arm test.
    CaseTest,
    /// Jingle bell doubling the final loop iteration.
    FinalIteration,
    /// Claves bar prefixed to every selection construct.
    SelectionPrefix,
    /// Side stick marking elided iterations of long loops.
    Elision,
}

impl PointOfInterest {
    pub const ALL: [PointOfInterest; 6] = [
        PointOfInterest::IterationPrefix,
        PointOfInterest::IterationSuffix,
        PointOfInterest::CaseTest,
        PointOfInterest::FinalIteration,
        PointOfInterest::SelectionPrefix,
        PointOfInterest::Elision,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PointOfInterest::IterationPrefix => "iterationPrefix",
            PointOfInterest::IterationSuffix => "iterationSuffix",
            PointOfInterest::CaseTest => "caseTest",
            PointOfInterest::FinalIteration => "finalIteration",
            PointOfInterest::SelectionPrefix => "selectionPrefix",
            PointOfInterest::Elision => "elision",
        }
    }

    pub fn from_name(name: &str) -> Option<PointOfInterest> {
        Self::ALL.iter().copied().find(|p| p.name() == name)
    }

    fn index(self) -> usize {
        Self::ALL.iter().position(|p| *p == self).unwrap()
    }
}

/// Beats allotted to each rendered event kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EventDurations {
    /// The percussion bar before a construct's entry motif.
    pub prefix: Beats,
    pub iteration_tick: Beats,
    pub condition_outcome: Beats,
    pub case_test: Beats,
    pub else_path: Beats,
    pub subexpr: Beats,
    pub elision: Beats,
}

impl EventDurations {
    fn all(&self) -> [(&'static str, Beats); 7] {
        [
            ("prefix", self.prefix),
            ("iterationTick", self.iteration_tick),
            ("conditionOutcome", self.condition_outcome),
            ("caseTest", self.case_test),
            ("elsePath", self.else_path),
            ("subexpr", self.subexpr),
            ("elision", self.elision),
        ]
    }
}

/// Entry and exit motif for one construct.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructMotifs {
    pub entry: MotifSpec,
    pub exit: MotifSpec,
}

/// A complete presentation skin. Per-construct tables are total by
/// construction; validation checks value ranges and the motif framework
/// constraints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuralizationSchema {
    pub name: String,
    pub tempo_bpm: u32,
    /// Which triad quality renders boolean true; false gets the other.
    pub true_mode: Mode,
    /// Use tambourine (GM level 1) instead of jingle bell for the final
    /// iteration, unless a key is set explicitly.
    pub gm1_fallback: bool,
    /// Iterations beyond this count are elided to a single marker.
    pub iteration_cap: u32,
    scales: [ScaleKind; 8],
    timbres: [u8; 8],
    percussion: [u8; 6],
    motifs: [ConstructMotifs; 8],
    pub durations: EventDurations,
}

impl AuralizationSchema {
    pub fn scale_for(&self, kind: ConstructKind) -> Scale {
        Scale::new(self.scales[kind.index()], 0)
    }

    pub fn scale_kind(&self, kind: ConstructKind) -> ScaleKind {
        self.scales[kind.index()]
    }

    pub fn set_scale(&mut self, kind: ConstructKind, scale: ScaleKind) {
        self.scales[kind.index()] = scale;
    }

    pub fn timbre(&self, kind: ConstructKind) -> u8 {
        self.timbres[kind.index()]
    }

    pub fn set_timbre(&mut self, kind: ConstructKind, program: u8) {
        self.timbres[kind.index()] = program;
    }

    pub fn percussion(&self, point: PointOfInterest) -> u8 {
        self.percussion[point.index()]
    }

    pub fn set_percussion(&mut self, point: PointOfInterest, key: u8) {
        self.percussion[point.index()] = key;
    }

    pub fn motifs(&self, kind: ConstructKind) -> &ConstructMotifs {
        &self.motifs[kind.index()]
    }

    pub fn set_motif(&mut self, kind: ConstructKind, entry: bool, spec: MotifSpec) {
        if entry {
            self.motifs[kind.index()].entry = spec;
        } else {
            self.motifs[kind.index()].exit = spec;
        }
    }

    /// Triad quality for a boolean outcome under this schema's rule.
    pub fn quality_for(&self, outcome: bool) -> TriadQuality {
        let true_quality = match self.true_mode {
            Mode::Major => TriadQuality::Major,
            Mode::Minor => TriadQuality::Minor,
        };
        if outcome {
            true_quality
        } else {
            match true_quality {
                TriadQuality::Major => TriadQuality::Minor,
                TriadQuality::Minor => TriadQuality::Major,
            }
        }
    }

    /// Realization mode for a boolean outcome (exit motifs).
    pub fn mode_for(&self, outcome: bool) -> Mode {
        match (self.true_mode, outcome) {
            (Mode::Major, true) | (Mode::Minor, false) => Mode::Major,
            _ => Mode::Minor,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

#[derive(Debug, Error)]
pub enum SchemaError {
    #[error("schema parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("schema failed validation: {}", .0.iter().map(|d| d.message.as_str()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Diagnostic>),
}

fn sig_iteration() -> Vec<MotifNote> {
    vec![
        MotifNote::note(1, 0, beats(1, 2)),
        MotifNote::note(3, 0, beats(1, 2)),
        MotifNote::note(5, 0, beats(1, 2)),
    ]
}

fn sig_selection() -> Vec<MotifNote> {
    vec![
        MotifNote::note(5, 0, beats(1, 2)),
        MotifNote::note(3, 0, beats(1, 2)),
        MotifNote::note(1, 0, beats(1, 2)),
    ]
}

fn motif(kind: ConstructKind, tail: &[(u8, i8, i64, i64)]) -> MotifSpec {
    let mut notes = match kind.family() {
        ConstructFamily::Iteration => sig_iteration(),
        ConstructFamily::Selection => sig_selection(),
    };
    for &(degree, octave, num, den) in tail {
        notes.push(MotifNote::note(degree, octave, beats(num, den)));
    }
    MotifSpec {
        family: kind.family(),
        construct: kind,
        notes,
    }
}

fn default_motifs(kind: ConstructKind) -> ConstructMotifs {
    use ConstructKind::*;
    // Entry motifs span five beats (a bar plus a downbeat), exits span
    // eight (two bars); every motif opens with its family signature.
    let entry_tail: &[(u8, i8, i64, i64)] = match kind {
        While => &[(7, 0, 1, 2), (1, 1, 1, 2), (7, 0, 1, 2), (5, 0, 1, 2), (3, 0, 1, 2), (1, 0, 1, 1)],
        Repeat => &[(6, 0, 1, 2), (7, 0, 1, 2), (1, 1, 1, 1), (5, 0, 1, 2), (6, 0, 1, 1)],
        ForTo => &[
            (4, 0, 1, 4), (5, 0, 1, 4), (6, 0, 1, 4), (7, 0, 1, 4),
            (1, 1, 1, 2), (2, 1, 1, 4), (1, 1, 1, 4), (7, 0, 1, 2), (5, 0, 1, 2), (3, 0, 1, 2),
        ],
        ForDownto => &[
            (7, 0, 1, 4), (6, 0, 1, 4), (5, 0, 1, 4), (4, 0, 1, 4),
            (3, 0, 1, 2), (2, 0, 1, 4), (3, 0, 1, 4), (2, 0, 1, 2), (1, 0, 1, 1),
        ],
        If => &[(4, 0, 1, 2), (2, 0, 1, 2), (5, 0, 1, 2), (4, 0, 1, 1), (5, 0, 1, 1)],
        IfElse => &[(4, 0, 1, 2), (2, 0, 1, 2), (7, -1, 1, 2), (2, 0, 1, 1), (5, 0, 1, 1)],
        Case => &[(6, 0, 1, 2), (4, 0, 1, 2), (2, 0, 1, 2), (4, 0, 1, 2), (5, 0, 3, 2)],
        CaseElse => &[(1, 1, 1, 2), (6, 0, 1, 2), (7, 0, 1, 2), (5, 0, 1, 2), (5, 0, 3, 2)],
    };
    let exit_tail: &[(u8, i8, i64, i64)] = match kind {
        While => &[
            (6, 0, 1, 2), (5, 0, 1, 2), (4, 0, 1, 2), (5, 0, 1, 2), (3, 0, 1, 2),
            (4, 0, 1, 2), (2, 0, 1, 2), (3, 0, 1, 2), (2, 0, 1, 2), (1, 0, 2, 1),
        ],
        Repeat => &[
            (6, 0, 1, 2), (7, 0, 1, 2), (6, 0, 1, 2), (5, 0, 1, 2), (6, 0, 1, 2),
            (4, 0, 1, 2), (5, 0, 1, 2), (3, 0, 1, 2), (2, 0, 1, 2), (1, 0, 2, 1),
        ],
        ForTo => &[
            (4, 0, 1, 4), (5, 0, 1, 4), (6, 0, 1, 4), (7, 0, 1, 4), (1, 1, 1, 2), (7, 0, 1, 2),
            (6, 0, 1, 4), (5, 0, 1, 4), (4, 0, 1, 4), (3, 0, 1, 4),
            (2, 0, 1, 2), (3, 0, 1, 2), (2, 0, 1, 2), (1, 0, 2, 1),
        ],
        ForDownto => &[
            (7, 0, 1, 4), (6, 0, 1, 4), (5, 0, 1, 4), (4, 0, 1, 4), (5, 0, 1, 2), (3, 0, 1, 2),
            (4, 0, 1, 4), (3, 0, 1, 4), (2, 0, 1, 4), (1, 0, 1, 4),
            (3, 0, 1, 2), (2, 0, 1, 2), (7, -1, 1, 2), (1, 0, 2, 1),
        ],
        If => &[
            (2, 0, 1, 2), (1, 0, 1, 2), (2, 0, 1, 2), (3, 0, 1, 2), (2, 0, 1, 2),
            (7, -1, 1, 2), (1, 0, 1, 2), (2, 0, 1, 2), (7, -1, 1, 2), (1, 0, 2, 1),
        ],
        IfElse => &[
            (4, 0, 1, 2), (3, 0, 1, 2), (2, 0, 1, 2), (3, 0, 1, 2), (1, 0, 1, 2),
            (2, 0, 1, 2), (7, -1, 1, 2), (2, 0, 1, 2), (7, -1, 1, 2), (1, 0, 2, 1),
        ],
        Case => &[
            (6, 0, 1, 2), (5, 0, 1, 2), (4, 0, 1, 2), (3, 0, 1, 2), (4, 0, 1, 2),
            (2, 0, 1, 2), (3, 0, 1, 2), (2, 0, 1, 2), (7, -1, 1, 2), (1, 0, 2, 1),
        ],
        CaseElse => &[
            (1, 1, 1, 2), (7, 0, 1, 2), (6, 0, 1, 2), (5, 0, 1, 2), (4, 0, 1, 2),
            (3, 0, 1, 2), (2, 0, 1, 2), (3, 0, 1, 2), (2, 0, 1, 2), (1, 0, 2, 1),
        ],
    };
    ConstructMotifs {
        entry: motif(kind, entry_tail),
        exit: motif(kind, exit_tail),
    }
}

/// Jingle bell; outside GM level 1, hence the fallback flag.
const FINAL_ITERATION_KEY: u8 = 83;
/// Tambourine, the GM level 1 stand-in for the jingle bell.
const FINAL_ITERATION_GM1_KEY: u8 = 54;

fn base_schema(gm1_fallback: bool) -> AuralizationSchema {
    let final_iteration = if gm1_fallback {
        FINAL_ITERATION_GM1_KEY
    } else {
        FINAL_ITERATION_KEY
    };
    AuralizationSchema {
        name: "CAITLIN classic".to_string(),
        tempo_bpm: 120,
        true_mode: Mode::Major,
        gm1_fallback,
        iteration_cap: 64,
        scales: [ScaleKind::Major; 8],
        timbres: [
            48, // WHILE: string ensemble
            49, // REPEAT: slow strings
            73, // FOR_TO: flute
            71, // FOR_DOWNTO: clarinet
            0,  // IF: acoustic grand
            4,  // IF_ELSE: electric piano
            24, // CASE: nylon guitar
            26, // CASE_ELSE: jazz guitar
        ],
        percussion: [
            81, // iterationPrefix: open triangle
            80, // iterationSuffix: mute triangle
            56, // caseTest: cowbell
            final_iteration,
            75, // selectionPrefix: claves
            37, // elision: side stick
        ],
        motifs: [
            default_motifs(ConstructKind::While),
            default_motifs(ConstructKind::Repeat),
            default_motifs(ConstructKind::ForTo),
            default_motifs(ConstructKind::ForDownto),
            default_motifs(ConstructKind::If),
            default_motifs(ConstructKind::IfElse),
            default_motifs(ConstructKind::Case),
            default_motifs(ConstructKind::CaseElse),
        ],
        durations: EventDurations {
            prefix: beats(4, 1),
            iteration_tick: beats(1, 2),
            condition_outcome: beats(1, 1),
            case_test: beats(1, 1),
            else_path: beats(1, 1),
            subexpr: beats(1, 4),
            elision: beats(1, 2),
        },
    }
}

/// The fixed "CAITLIN classic" skin.
pub fn default_schema() -> AuralizationSchema {
    base_schema(false)
}

/// Parses a schema document without validating; omitted fields inherit
/// from the default schema.
pub fn parse_schema(text: &str) -> Result<AuralizationSchema, SchemaError> {
    let mut entries: Vec<(usize, String, String)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(SchemaError::Parse {
                line: line_no,
                message: "expected `section.key = value`".to_string(),
            });
        };
        entries.push((line_no, key.trim().to_string(), value.trim().to_string()));
    }

    // The GM fallback flag shapes the percussion defaults, so resolve it
    // before applying anything else.
    let mut gm1_fallback = false;
    for (line_no, key, value) in &entries {
        if key == "general.gm1Fallback" {
            gm1_fallback = parse_bool(value).ok_or_else(|| SchemaError::Parse {
                line: *line_no,
                message: format!("expected true or false, found `{value}`"),
            })?;
        }
    }
    let mut schema = base_schema(gm1_fallback);
    for (line_no, key, value) in entries {
        apply_entry(&mut schema, &key, &value)
            .map_err(|message| SchemaError::Parse { line: line_no, message })?;
    }
    Ok(schema)
}

/// Parse and validate in one step; the loaded schema is ready to render.
pub fn load_schema(text: &str) -> Result<AuralizationSchema, SchemaError> {
    let schema = parse_schema(text)?;
    let diagnostics = validate_schema(&schema);
    if diagnostics.is_empty() {
        Ok(schema)
    } else {
        Err(SchemaError::Invalid(diagnostics))
    }
}

fn parse_bool(text: &str) -> Option<bool> {
    match text {
        "true" => Some(true),
        "false" => Some(false),
        _ => None,
    }
}

fn apply_entry(schema: &mut AuralizationSchema, key: &str, value: &str) -> Result<(), String> {
    let parts: Vec<&str> = key.split('.').collect();
    match parts.as_slice() {
        ["general", "name"] => schema.name = value.to_string(),
        ["general", "tempo"] => {
            schema.tempo_bpm = value
                .parse()
                .map_err(|_| format!("invalid tempo `{value}`"))?;
        }
        ["general", "trueMode"] => {
            schema.true_mode =
                Mode::from_name(value).ok_or_else(|| format!("unknown mode `{value}`"))?;
        }
        ["general", "gm1Fallback"] => {
            // Already consumed in the pre-pass; accept silently.
            parse_bool(value).ok_or_else(|| format!("expected true or false, found `{value}`"))?;
        }
        ["general", "iterationCap"] => {
            schema.iteration_cap = value
                .parse()
                .map_err(|_| format!("invalid iteration cap `{value}`"))?;
        }
        ["timbre", kind] => {
            let kind = construct_kind(kind)?;
            let program: u8 = value
                .parse()
                .map_err(|_| format!("invalid program number `{value}`"))?;
            schema.set_timbre(kind, program);
        }
        ["percussion", point] => {
            let point = PointOfInterest::from_name(point)
                .ok_or_else(|| format!("unknown point of interest `{point}`"))?;
            let key: u8 = value
                .parse()
                .map_err(|_| format!("invalid percussion key `{value}`"))?;
            schema.set_percussion(point, key);
        }
        ["scale", kind] => {
            let kind = construct_kind(kind)?;
            let scale = ScaleKind::from_name(value)
                .ok_or_else(|| format!("unknown scale `{value}`"))?;
            schema.set_scale(kind, scale);
        }
        ["durations", which] => {
            let parsed =
                parse_beats(value).ok_or_else(|| format!("invalid duration `{value}`"))?;
            let d = &mut schema.durations;
            match *which {
                "prefix" => d.prefix = parsed,
                "iterationTick" => d.iteration_tick = parsed,
                "conditionOutcome" => d.condition_outcome = parsed,
                "caseTest" => d.case_test = parsed,
                "elsePath" => d.else_path = parsed,
                "subexpr" => d.subexpr = parsed,
                "elision" => d.elision = parsed,
                other => return Err(format!("unknown duration key `{other}`")),
            }
        }
        ["motif", kind, slot] => {
            let kind = construct_kind(kind)?;
            let entry = match *slot {
                "entry" => true,
                "exit" => false,
                other => return Err(format!("unknown motif slot `{other}`")),
            };
            let notes = parse_note_list(value)?;
            schema.set_motif(
                kind,
                entry,
                MotifSpec {
                    family: kind.family(),
                    construct: kind,
                    notes,
                },
            );
        }
        _ => return Err(format!("unknown key `{key}`")),
    }
    Ok(())
}

fn construct_kind(name: &str) -> Result<ConstructKind, String> {
    ConstructKind::from_name(name).ok_or_else(|| format!("unknown construct `{name}`"))
}

fn parse_note_list(value: &str) -> Result<Vec<MotifNote>, String> {
    let mut notes = Vec::new();
    for item in value.split(',') {
        let item = item.trim();
        let fields: Vec<&str> = item.split(':').collect();
        let [degree, octave, duration] = fields.as_slice() else {
            return Err(format!("expected degree:octave:duration, found `{item}`"));
        };
        let duration =
            parse_beats(duration).ok_or_else(|| format!("invalid duration in `{item}`"))?;
        if *degree == "r" {
            notes.push(MotifNote::rest(duration));
            continue;
        }
        let degree: u8 = degree
            .parse()
            .map_err(|_| format!("invalid degree in `{item}`"))?;
        let octave: i8 = octave
            .parse()
            .map_err(|_| format!("invalid octave in `{item}`"))?;
        notes.push(MotifNote::note(degree, octave, duration));
    }
    Ok(notes)
}

fn note_list_text(notes: &[MotifNote]) -> String {
    notes
        .iter()
        .map(|n| {
            if n.is_rest {
                format!("r:0:{}", beats_text(n.duration))
            } else {
                format!("{}:{}:{}", n.degree, n.octave_offset, beats_text(n.duration))
            }
        })
        .collect::<Vec<_>>()
        .join(", ")
}

/// Canonical writer; [`parse_schema`] of the output reproduces the
/// schema exactly.
pub fn save_schema(schema: &AuralizationSchema) -> String {
    let mut out = String::new();
    out.push_str(&format!("general.name = {}\n", schema.name));
    out.push_str(&format!("general.tempo = {}\n", schema.tempo_bpm));
    out.push_str(&format!("general.trueMode = {}\n", schema.true_mode.name()));
    out.push_str(&format!("general.gm1Fallback = {}\n", schema.gm1_fallback));
    out.push_str(&format!("general.iterationCap = {}\n", schema.iteration_cap));
    for kind in ConstructKind::ALL {
        out.push_str(&format!("timbre.{} = {}\n", kind.name(), schema.timbre(kind)));
    }
    for point in PointOfInterest::ALL {
        out.push_str(&format!(
            "percussion.{} = {}\n",
            point.name(),
            schema.percussion(point)
        ));
    }
    for kind in ConstructKind::ALL {
        out.push_str(&format!(
            "scale.{} = {}\n",
            kind.name(),
            schema.scale_kind(kind).name()
        ));
    }
    for (key, value) in schema.durations.all() {
        out.push_str(&format!("durations.{} = {}\n", key, beats_text(value)));
    }
    for kind in ConstructKind::ALL {
        let motifs = schema.motifs(kind);
        out.push_str(&format!(
            "motif.{}.entry = {}\n",
            kind.name(),
            note_list_text(&motifs.entry.notes)
        ));
        out.push_str(&format!(
            "motif.{}.exit = {}\n",
            kind.name(),
            note_list_text(&motifs.exit.notes)
        ));
    }
    out
}

/// Checks every schema invariant; an empty result means any valid trace
/// renders without errors.
pub fn validate_schema(schema: &AuralizationSchema) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let mut report = |message: String| diags.push(Diagnostic { message });

    if !(20..=300).contains(&schema.tempo_bpm) {
        report(format!("tempo {} outside 20..=300", schema.tempo_bpm));
    }
    if schema.iteration_cap == 0 {
        report("iteration cap must be at least 1".to_string());
    }
    for point in PointOfInterest::ALL {
        let key = schema.percussion(point);
        if !(27..=87).contains(&key) {
            report(format!("percussion key {key} for {} outside 27..=87", point.name()));
        }
    }
    for kind in ConstructKind::ALL {
        if schema.timbre(kind) > 127 {
            report(format!(
                "timbre {} for {} outside 0..=127",
                schema.timbre(kind),
                kind.name()
            ));
        }
        let allows_scale_choice =
            matches!(kind, ConstructKind::ForTo | ConstructKind::ForDownto);
        if !allows_scale_choice && schema.scale_kind(kind) != ScaleKind::Major {
            report(format!(
                "scale selection is only permitted for FOR loops, not {}",
                kind.name()
            ));
        }
    }
    for (key, value) in schema.durations.all() {
        if value <= beats(0, 1) {
            report(format!("duration {key} must be positive"));
        }
    }

    for kind in ConstructKind::ALL {
        let motifs = schema.motifs(kind);
        for (slot, spec) in [("entry", &motifs.entry), ("exit", &motifs.exit)] {
            if spec.notes.len() < FAMILY_SIGNATURE_LEN {
                report(format!(
                    "motif.{}.{slot} is shorter than the {FAMILY_SIGNATURE_LEN}-note family signature",
                    kind.name()
                ));
            }
            if spec.family != kind.family() {
                report(format!("motif.{}.{slot} declares the wrong family", kind.name()));
            }
            for note in &spec.notes {
                if note.duration <= beats(0, 1) {
                    report(format!("motif.{}.{slot} has a non-positive duration", kind.name()));
                }
            }
            // Dry-run realization over both modes at the default register.
            let scale = schema.scale_for(kind);
            for mode in [Mode::Major, Mode::Minor] {
                if let Err(e) =
                    crate::motif::realize_motif(spec, &scale, mode, 60, beats(0, 1))
                {
                    report(format!("motif.{}.{slot} does not realize: {e}", kind.name()));
                }
            }
        }
    }

    // Family-prefix property: every motif in a family opens with the
    // family signature, and the two signatures differ.
    for family in [ConstructFamily::Iteration, ConstructFamily::Selection] {
        let members: Vec<(ConstructKind, &MotifSpec, &str)> = ConstructKind::ALL
            .iter()
            .filter(|k| k.family() == family)
            .flat_map(|k| {
                let m = schema.motifs(*k);
                [(*k, &m.entry, "entry"), (*k, &m.exit, "exit")]
            })
            .collect();
        let reference = members[0].1.signature();
        for (kind, spec, slot) in &members[1..] {
            if spec.signature() != reference {
                report(format!(
                    "motif.{}.{slot} breaks the {} family signature",
                    kind.name(),
                    match family {
                        ConstructFamily::Iteration => "iteration",
                        ConstructFamily::Selection => "selection",
                    }
                ));
            }
        }
    }
    let iteration_sig = schema.motifs(ConstructKind::While).entry.signature();
    let selection_sig = schema.motifs(ConstructKind::If).entry.signature();
    if iteration_sig == selection_sig {
        report("iteration and selection family signatures must differ".to_string());
    }

    diags
}
