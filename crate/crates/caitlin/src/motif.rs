//! Music-theory core: scales, mode-agnostic motif specifications and
//! their realization to pitched notes, triad construction and mediant
//! flattening, equal-temperament frequencies, and tonal quantization of
//! integer values.
//!
//! A motif is written as scale degrees so the same melody can be
//! realized major (boolean true), minor (boolean false) or onto an
//! alternative scale such as the ten-note blues.

use std::collections::BTreeSet;

use num::rational::Ratio;
use thiserror::Error;

use crate::trace::{ConstructFamily, ConstructKind};

/// Musical time in quarter-note beats, exact.
pub type Beats = Ratio<i64>;

/// Convenience constructor for a `num/den` beat value.
pub fn beats(num: i64, den: i64) -> Beats {
    Ratio::new(num, den)
}

/// Formats beats as `n` or `n/d`, the schema-file syntax.
pub fn beats_text(b: Beats) -> String {
    if *b.denom() == 1 {
        b.numer().to_string()
    } else {
        format!("{}/{}", b.numer(), b.denom())
    }
}

/// Parses the `n` / `n/d` beat syntax.
pub fn parse_beats(text: &str) -> Option<Beats> {
    match text.split_once('/') {
        Some((n, d)) => {
            let n: i64 = n.trim().parse().ok()?;
            let d: i64 = d.trim().parse().ok()?;
            if d == 0 {
                None
            } else {
                Some(Ratio::new(n, d))
            }
        }
        None => {
            let n: i64 = text.trim().parse().ok()?;
            Some(Ratio::from_integer(n))
        }
    }
}

const MAJOR_OFFSETS: [u8; 7] = [0, 2, 4, 5, 7, 9, 11];
const NATURAL_MINOR_OFFSETS: [u8; 7] = [0, 2, 3, 5, 7, 8, 10];
/// Major scale plus the flat third, flat fifth and flat seventh blue notes.
const TEN_NOTE_BLUES_OFFSETS: [u8; 10] = [0, 2, 3, 4, 5, 6, 7, 9, 10, 11];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScaleKind {
    Major,
    NaturalMinor,
    TenNoteBlues,
}

impl ScaleKind {
    pub fn name(self) -> &'static str {
        match self {
            ScaleKind::Major => "major",
            ScaleKind::NaturalMinor => "naturalMinor",
            ScaleKind::TenNoteBlues => "tenNoteBlues",
        }
    }

    pub fn from_name(name: &str) -> Option<ScaleKind> {
        match name {
            "major" => Some(ScaleKind::Major),
            "naturalMinor" => Some(ScaleKind::NaturalMinor),
            "tenNoteBlues" => Some(ScaleKind::TenNoteBlues),
            _ => None,
        }
    }

    pub fn offsets(self) -> &'static [u8] {
        match self {
            ScaleKind::Major => &MAJOR_OFFSETS,
            ScaleKind::NaturalMinor => &NATURAL_MINOR_OFFSETS,
            ScaleKind::TenNoteBlues => &TEN_NOTE_BLUES_OFFSETS,
        }
    }
}

/// A scale anchored at a tonic pitch class (0 = C .. 11 = B).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Scale {
    pub kind: ScaleKind,
    pub tonic: u8,
}

impl Scale {
    pub fn new(kind: ScaleKind, tonic: u8) -> Scale {
        assert!(tonic < 12, "tonic is a pitch class 0..=11");
        Scale { kind, tonic }
    }

    pub fn len(&self) -> usize {
        self.kind.offsets().len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Absolute pitch classes of the scale members.
    pub fn pitch_classes(&self) -> BTreeSet<u8> {
        self.kind
            .offsets()
            .iter()
            .map(|off| (self.tonic + off) % 12)
            .collect()
    }
}

/// Realization mode. Minor substitutes the natural-minor pitch classes
/// over the same tonic, flattening degrees 3, 6 and 7.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Major,
    Minor,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Major => "major",
            Mode::Minor => "minor",
        }
    }

    pub fn from_name(name: &str) -> Option<Mode> {
        match name {
            "major" => Some(Mode::Major),
            "minor" => Some(Mode::Minor),
            _ => None,
        }
    }
}

/// One entry of a motif: a scale degree (1-based), an octave shift, a
/// duration, or a rest occupying the same duration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MotifNote {
    pub degree: u8,
    pub octave_offset: i8,
    pub duration: Beats,
    pub is_rest: bool,
}

impl MotifNote {
    pub fn note(degree: u8, octave_offset: i8, duration: Beats) -> MotifNote {
        MotifNote {
            degree,
            octave_offset,
            duration,
            is_rest: false,
        }
    }

    pub fn rest(duration: Beats) -> MotifNote {
        MotifNote {
            degree: 1,
            octave_offset: 0,
            duration,
            is_rest: true,
        }
    }
}

/// A mode-agnostic melody owned by one construct.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MotifSpec {
    pub family: ConstructFamily,
    pub construct: ConstructKind,
    pub notes: Vec<MotifNote>,
}

impl MotifSpec {
    pub fn total_beats(&self) -> Beats {
        self.notes
            .iter()
            .map(|n| n.duration)
            .fold(Beats::from_integer(0), |a, b| a + b)
    }

    /// The family signature: the leading (degree, duration) pairs shared
    /// by every motif in a family.
    pub fn signature(&self) -> Vec<(u8, Beats)> {
        self.notes
            .iter()
            .take(FAMILY_SIGNATURE_LEN)
            .map(|n| (n.degree, n.duration))
            .collect()
    }
}

/// Number of leading notes that make up a family signature.
pub const FAMILY_SIGNATURE_LEN: usize = 3;

/// A pitched note with absolute timing, ready for the score.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Note {
    pub pitch: u8,
    pub velocity: u8,
    pub start: Beats,
    pub duration: Beats,
}

/// An unordered set of MIDI keys, used for chords.
pub type PitchSet = BTreeSet<u8>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MotifError {
    #[error("degree {degree} out of range for a {size}-note scale")]
    DegreeOutOfRange { degree: u8, size: usize },
    #[error("realized pitch {pitch} outside the MIDI range 0..=127")]
    PitchOutOfRange { pitch: i32 },
    #[error("pitch set is not a major triad")]
    NotAMajorTriad,
    #[error("value {value} outside bounds {lo}..={hi}")]
    ValueOutOfBounds { value: i64, lo: i64, hi: i64 },
    #[error("bounds {lo}..={hi} are not a proper range")]
    InvalidBounds { lo: i64, hi: i64 },
}

/// Fixed melodic velocity; percussion is handled by the score layer.
pub const NOTE_VELOCITY: u8 = 96;

/// Maps a motif through `scale` in the given mode, anchored at
/// `register` (the MIDI key of degree 1, octave 0). Note start times
/// accumulate the written durations beginning at `start`.
pub fn realize_motif(
    spec: &MotifSpec,
    scale: &Scale,
    mode: Mode,
    register: u8,
    start: Beats,
) -> Result<Vec<Note>, MotifError> {
    let offsets = match mode {
        Mode::Major => scale.kind.offsets(),
        Mode::Minor => &NATURAL_MINOR_OFFSETS[..],
    };
    let mut notes = Vec::new();
    let mut cursor = start;
    for entry in &spec.notes {
        if !entry.is_rest {
            let degree = entry.degree as usize;
            if degree == 0 || degree > offsets.len() {
                return Err(MotifError::DegreeOutOfRange {
                    degree: entry.degree,
                    size: offsets.len(),
                });
            }
            let pitch = register as i32
                + entry.octave_offset as i32 * 12
                + offsets[degree - 1] as i32;
            if !(0..=127).contains(&pitch) {
                return Err(MotifError::PitchOutOfRange { pitch });
            }
            notes.push(Note {
                pitch: pitch as u8,
                velocity: NOTE_VELOCITY,
                start: cursor,
                duration: entry.duration,
            });
        }
        cursor += entry.duration;
    }
    Ok(notes)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TriadQuality {
    Major,
    Minor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Inversion {
    Root,
    First,
    Second,
}

impl Inversion {
    pub const ALL: [Inversion; 3] = [Inversion::Root, Inversion::First, Inversion::Second];
}

/// The MIDI key nearest `register` whose pitch class is `pc`; ties at
/// the tritone resolve upward.
fn nearest_key(register: u8, pc: u8) -> i32 {
    let mut diff = (pc as i32 - register as i32).rem_euclid(12);
    if diff > 6 {
        diff -= 12;
    }
    register as i32 + diff
}

/// Builds a triad voicing. The tonic is anchored near `register`; the
/// inversion rotates members upward so first inversion places the
/// mediant lowest and second inversion the fifth.
pub fn build_triad(
    tonic_pc: u8,
    quality: TriadQuality,
    inversion: Inversion,
    register: u8,
) -> Result<PitchSet, MotifError> {
    let third = match quality {
        TriadQuality::Major => 4,
        TriadQuality::Minor => 3,
    };
    let intervals: [i32; 3] = match inversion {
        Inversion::Root => [0, third, 7],
        Inversion::First => [third, 7, 12],
        Inversion::Second => [7, 12, 12 + third],
    };
    let tonic_key = nearest_key(register, tonic_pc % 12);
    let mut set = PitchSet::new();
    for interval in intervals {
        let pitch = tonic_key + interval;
        if !(0..=127).contains(&pitch) {
            return Err(MotifError::PitchOutOfRange { pitch });
        }
        set.insert(pitch as u8);
    }
    Ok(set)
}

/// Lowers the mediant of a major triad by one semitone, producing the
/// parallel minor triad in the same inversion.
pub fn flatten_mediant(triad: &PitchSet) -> Result<PitchSet, MotifError> {
    let keys: Vec<u8> = triad.iter().copied().collect();
    if keys.len() != 3 {
        return Err(MotifError::NotAMajorTriad);
    }
    let (a, b, c) = (keys[0], keys[1], keys[2]);
    let mediant = match (b - a, c - b) {
        (4, 3) => b, // root position: tonic, mediant, fifth
        (3, 5) => a, // first inversion: mediant at the bottom
        (5, 4) => c, // second inversion: mediant on top
        _ => return Err(MotifError::NotAMajorTriad),
    };
    Ok(keys
        .into_iter()
        .map(|k| if k == mediant { k - 1 } else { k })
        .collect())
}

/// Classifies a three-note pitch set as a major or minor triad in any
/// inversion, if it is one.
pub fn classify_triad(pitches: &PitchSet) -> Option<TriadQuality> {
    if pitches.len() != 3 {
        return None;
    }
    let pcs: BTreeSet<u8> = pitches.iter().map(|p| p % 12).collect();
    if pcs.len() != 3 {
        return None;
    }
    for &root in &pcs {
        let has = |interval: u8| pcs.contains(&((root + interval) % 12));
        if has(4) && has(7) {
            return Some(TriadQuality::Major);
        }
        if has(3) && has(7) {
            return Some(TriadQuality::Minor);
        }
    }
    None
}

/// Equal temperament, A4 (key 69) = 440 Hz.
pub fn pitch_to_frequency(pitch: u8) -> f64 {
    440.0 * ((pitch as f64 - 69.0) / 12.0).exp2()
}

/// Affine-maps `value` in `[lo, hi]` onto two octaves of scale members
/// starting at `register`, snapping to the nearest member (half-up).
/// Monotone non-decreasing in `value`.
pub fn quantize_to_scale(
    value: i64,
    lo: i64,
    hi: i64,
    scale: &Scale,
    register: u8,
) -> Result<u8, MotifError> {
    if lo >= hi {
        return Err(MotifError::InvalidBounds { lo, hi });
    }
    if value < lo || value > hi {
        return Err(MotifError::ValueOutOfBounds { value, lo, hi });
    }
    let offsets = scale.kind.offsets();
    let members: Vec<i32> = (0..2)
        .flat_map(|oct| {
            offsets
                .iter()
                .map(move |off| register as i32 + oct * 12 + *off as i32)
        })
        .collect();
    let last = (members.len() - 1) as i128;
    let span = (hi - lo) as i128;
    let offset = (value - lo) as i128;
    // Round half-up in exact integer arithmetic.
    let index = ((offset * last * 2 + span) / (2 * span)) as usize;
    let pitch = members[index];
    if !(0..=127).contains(&pitch) {
        return Err(MotifError::PitchOutOfRange { pitch });
    }
    Ok(pitch as u8)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c_major() -> Scale {
        Scale::new(ScaleKind::Major, 0)
    }

    #[test]
    fn tonic_triad_degrees_realize_in_both_modes() {
        let spec = MotifSpec {
            family: ConstructFamily::Iteration,
            construct: ConstructKind::ForTo,
            notes: vec![
                MotifNote::note(1, 0, beats(1, 1)),
                MotifNote::note(3, 0, beats(1, 1)),
                MotifNote::note(5, 0, beats(1, 1)),
            ],
        };
        let major = realize_motif(&spec, &c_major(), Mode::Major, 60, beats(0, 1)).unwrap();
        assert_eq!(major.iter().map(|n| n.pitch).collect::<Vec<_>>(), vec![60, 64, 67]);
        assert_eq!(
            major.iter().map(|n| n.start).collect::<Vec<_>>(),
            vec![beats(0, 1), beats(1, 1), beats(2, 1)]
        );
        let minor = realize_motif(&spec, &c_major(), Mode::Minor, 60, beats(0, 1)).unwrap();
        assert_eq!(minor.iter().map(|n| n.pitch).collect::<Vec<_>>(), vec![60, 63, 67]);
    }

    #[test]
    fn rests_advance_time_without_sounding() {
        let spec = MotifSpec {
            family: ConstructFamily::Selection,
            construct: ConstructKind::If,
            notes: vec![
                MotifNote::note(1, 0, beats(1, 2)),
                MotifNote::rest(beats(1, 2)),
                MotifNote::note(5, 0, beats(1, 2)),
            ],
        };
        let notes = realize_motif(&spec, &c_major(), Mode::Major, 60, beats(0, 1)).unwrap();
        assert_eq!(notes.len(), 2);
        assert_eq!(notes[1].start, beats(1, 1));
        assert_eq!(spec.total_beats(), beats(3, 2));
    }

    #[test]
    fn degree_out_of_range_is_an_error() {
        let spec = MotifSpec {
            family: ConstructFamily::Iteration,
            construct: ConstructKind::While,
            notes: vec![MotifNote::note(8, 0, beats(1, 1))],
        };
        assert_eq!(
            realize_motif(&spec, &c_major(), Mode::Major, 60, beats(0, 1)),
            Err(MotifError::DegreeOutOfRange { degree: 8, size: 7 })
        );
    }

    #[test]
    fn c_major_first_inversion_has_the_mediant_at_the_bottom() {
        let triad = build_triad(0, TriadQuality::Major, Inversion::First, 64).unwrap();
        assert_eq!(triad, PitchSet::from([64, 67, 72]));
    }

    #[test]
    fn c_minor_first_inversion_flattens_the_bass() {
        let triad = build_triad(0, TriadQuality::Minor, Inversion::First, 64).unwrap();
        assert_eq!(triad, PitchSet::from([63, 67, 72]));
    }

    #[test]
    fn a_minor_root_position() {
        let triad = build_triad(9, TriadQuality::Minor, Inversion::Root, 57).unwrap();
        assert_eq!(triad, PitchSet::from([57, 60, 64]));
    }

    #[test]
    fn flatten_mediant_on_the_first_inversion_example() {
        let flattened = flatten_mediant(&PitchSet::from([64, 67, 72])).unwrap();
        assert_eq!(flattened, PitchSet::from([63, 67, 72]));
    }

    #[test]
    fn flatten_mediant_on_root_position() {
        let flattened = flatten_mediant(&PitchSet::from([60, 64, 67])).unwrap();
        assert_eq!(flattened, PitchSet::from([60, 63, 67]));
    }

    #[test]
    fn flatten_mediant_rejects_non_major_input() {
        assert_eq!(
            flatten_mediant(&PitchSet::from([60, 63, 67])),
            Err(MotifError::NotAMajorTriad)
        );
        assert_eq!(
            flatten_mediant(&PitchSet::from([60, 61])),
            Err(MotifError::NotAMajorTriad)
        );
    }

    #[test]
    fn flattening_any_major_triad_yields_the_parallel_minor() {
        // Brute-force cross-check over all 12 tonics and 3 inversions.
        for tonic in 0..12u8 {
            for inversion in Inversion::ALL {
                for register in [48, 60, 72] {
                    let major =
                        build_triad(tonic, TriadQuality::Major, inversion, register).unwrap();
                    let minor =
                        build_triad(tonic, TriadQuality::Minor, inversion, register).unwrap();
                    assert_eq!(
                        flatten_mediant(&major).unwrap(),
                        minor,
                        "tonic {tonic} {inversion:?} register {register}"
                    );
                }
            }
        }
    }

    #[test]
    fn classify_triad_identifies_quality_in_any_inversion() {
        for tonic in 0..12u8 {
            for inversion in Inversion::ALL {
                let major = build_triad(tonic, TriadQuality::Major, inversion, 60).unwrap();
                assert_eq!(classify_triad(&major), Some(TriadQuality::Major));
                let minor = build_triad(tonic, TriadQuality::Minor, inversion, 60).unwrap();
                assert_eq!(classify_triad(&minor), Some(TriadQuality::Minor));
            }
        }
        assert_eq!(classify_triad(&PitchSet::from([60, 61, 62])), None);
    }

    #[test]
    fn reference_pitch_is_440() {
        assert!((pitch_to_frequency(69) - 440.0).abs() < 1e-9);
    }

    #[test]
    fn mediant_shift_matches_the_quoted_frequencies() {
        let e4 = pitch_to_frequency(64);
        let e_flat4 = pitch_to_frequency(63);
        assert!((e4 - 329.63).abs() < 0.05, "E4 = {e4}");
        assert!((e_flat4 - 311.13).abs() < 0.05, "Eb4 = {e_flat4}");
        let shift_percent = (1.0 - e_flat4 / e4) * 100.0;
        assert!((shift_percent - 5.6).abs() < 0.5, "shift = {shift_percent}%");
    }

    #[test]
    fn frequency_is_strictly_increasing_and_doubles_per_octave() {
        for pitch in 0..127u8 {
            assert!(pitch_to_frequency(pitch + 1) > pitch_to_frequency(pitch));
        }
        for pitch in 0..=115u8 {
            let ratio = pitch_to_frequency(pitch + 12) / pitch_to_frequency(pitch);
            assert!((ratio - 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn quantize_maps_bounds_to_the_span_ends() {
        let scale = c_major();
        assert_eq!(quantize_to_scale(1, 1, 6, &scale, 60).unwrap(), 60);
        assert_eq!(quantize_to_scale(6, 1, 6, &scale, 60).unwrap(), 60 + 12 + 11);
    }

    #[test]
    fn quantize_is_monotone_and_stays_on_the_scale() {
        // Exhaustive scan over small ranges against the membership and
        // monotonicity requirements.
        for scale_kind in [ScaleKind::Major, ScaleKind::NaturalMinor, ScaleKind::TenNoteBlues] {
            for tonic in [0u8, 5] {
                let scale = Scale::new(scale_kind, tonic);
                let register = 60 + tonic;
                let classes = scale.pitch_classes();
                for (lo, hi) in [(0i64, 1), (1, 6), (-5, 5), (0, 100)] {
                    let mut prev = None;
                    for value in lo..=hi {
                        let pitch = quantize_to_scale(value, lo, hi, &scale, register).unwrap();
                        assert!(classes.contains(&(pitch % 12)), "pitch {pitch} off scale");
                        if let Some(prev) = prev {
                            assert!(pitch >= prev, "not monotone at {value}");
                        }
                        prev = Some(pitch);
                    }
                }
            }
        }
    }

    #[test]
    fn quantize_rejects_bad_bounds() {
        let scale = c_major();
        assert!(matches!(
            quantize_to_scale(0, 3, 3, &scale, 60),
            Err(MotifError::InvalidBounds { .. })
        ));
        assert!(matches!(
            quantize_to_scale(9, 1, 6, &scale, 60),
            Err(MotifError::ValueOutOfBounds { .. })
        ));
    }

    #[test]
    fn beat_text_round_trips() {
        for b in [beats(1, 1), beats(1, 2), beats(3, 4), beats(8, 1), beats(5, 8)] {
            assert_eq!(parse_beats(&beats_text(b)).unwrap(), b);
        }
        assert_eq!(parse_beats("2"), Some(beats(2, 1)));
        assert_eq!(parse_beats("x"), None);
        assert_eq!(parse_beats("1/0"), None);
    }
}
