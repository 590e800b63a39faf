//! Standard MIDI File encoding of a [`Score`], plus an independent
//! decoder used for round-trip verification.
//!
//! Output is format 1: track 0 carries the tempo meta event, then one
//! track per used channel. NoteOff is written explicitly (no
//! NoteOn-velocity-0 shorthand) and the encoder never uses running
//! status, so files are byte-stable and diffable; the decoder accepts
//! both shorthands.

use thiserror::Error;

use crate::score::{Score, ScoreEventKind};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MidiError {
    #[error("value {0} does not fit a variable-length quantity")]
    VarlenOutOfRange(u64),
    #[error("event at tick {0} beyond the encodable delta range")]
    TickOutOfRange(u64),
    #[error("score has no tempo event")]
    MissingTempo,
    #[error("malformed chunk: {0}")]
    MalformedChunk(String),
    #[error("truncated file")]
    TruncatedFile,
}

/// Encodes a delta time or meta length as an SMF variable-length
/// quantity: 1–4 bytes, seven payload bits each, high bit set on all but
/// the last byte.
pub fn encode_varlen(value: u32) -> Result<Vec<u8>, MidiError> {
    if value >= 1 << 28 {
        return Err(MidiError::VarlenOutOfRange(value as u64));
    }
    let mut bytes = vec![(value & 0x7f) as u8];
    let mut rest = value >> 7;
    while rest != 0 {
        bytes.push((rest & 0x7f) as u8 | 0x80);
        rest >>= 7;
    }
    bytes.reverse();
    Ok(bytes)
}

/// Decodes a variable-length quantity, returning the value and the
/// number of bytes consumed.
pub fn decode_varlen(bytes: &[u8]) -> Result<(u32, usize), MidiError> {
    let mut value: u32 = 0;
    for (i, byte) in bytes.iter().enumerate() {
        if i == 4 {
            return Err(MidiError::MalformedChunk(
                "variable-length quantity longer than 4 bytes".to_string(),
            ));
        }
        value = (value << 7) | (byte & 0x7f) as u32;
        if byte & 0x80 == 0 {
            return Ok((value, i + 1));
        }
    }
    Err(MidiError::TruncatedFile)
}

/// Beat position to absolute tick, rounded half-up.
fn to_ticks(beats: crate::motif::Beats, ppq: u16) -> u64 {
    let n = *beats.numer() as i128 * ppq as i128;
    let d = *beats.denom() as i128;
    ((n * 2 + d) / (2 * d)).max(0) as u64
}

fn tempo_micros(bpm: u32) -> u32 {
    ((60_000_000u64 + bpm as u64 / 2) / bpm as u64) as u32
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum TrackEventKind {
    // Variant order is the same-tick ordering: offs before program
    // changes before ons, so re-struck keys never cancel themselves.
    NoteOff { key: u8, velocity: u8 },
    ProgramChange { program: u8 },
    NoteOn { key: u8, velocity: u8 },
}

/// Serializes `score` as a format-1 SMF. Deterministic: equal scores
/// yield byte-equal files.
pub fn encode_smf(score: &Score) -> Result<Vec<u8>, MidiError> {
    let ppq = score.ppq;
    let bpm = score
        .events
        .iter()
        .find_map(|e| match e.kind {
            ScoreEventKind::Tempo { bpm } => Some(bpm),
            _ => None,
        })
        .ok_or(MidiError::MissingTempo)?;

    let mut channels: Vec<u8> = score
        .events
        .iter()
        .filter(|e| !matches!(e.kind, ScoreEventKind::Tempo { .. }))
        .map(|e| e.channel)
        .collect();
    channels.sort_unstable();
    channels.dedup();

    let mut tracks: Vec<Vec<u8>> = Vec::new();

    // Track 0: tempo only.
    let mut tempo_track = Vec::new();
    tempo_track.extend(encode_varlen(0)?);
    let micros = tempo_micros(bpm);
    tempo_track.extend([0xff, 0x51, 0x03]);
    tempo_track.extend(&micros.to_be_bytes()[1..]);
    end_track(&mut tempo_track);
    tracks.push(tempo_track);

    for channel in channels {
        let mut timed: Vec<(u64, TrackEventKind)> = Vec::new();
        for event in score.events.iter().filter(|e| e.channel == channel) {
            let start = to_ticks(event.start, ppq);
            match event.kind {
                ScoreEventKind::Tempo { .. } => {}
                ScoreEventKind::ProgramChange { program } => {
                    timed.push((start, TrackEventKind::ProgramChange { program }));
                }
                ScoreEventKind::Percussion { key, velocity }
                | ScoreEventKind::Note { pitch: key, velocity } => {
                    // A zero-length note would cancel itself; keep at
                    // least one tick.
                    let end = to_ticks(event.start + event.duration, ppq).max(start + 1);
                    timed.push((start, TrackEventKind::NoteOn { key, velocity }));
                    timed.push((end, TrackEventKind::NoteOff { key, velocity: 64 }));
                }
            }
        }
        timed.sort();
        let mut track = Vec::new();
        let mut previous_tick = 0u64;
        for (tick, kind) in timed {
            let delta = tick - previous_tick;
            if delta >= 1 << 28 {
                return Err(MidiError::TickOutOfRange(tick));
            }
            track.extend(encode_varlen(delta as u32)?);
            match kind {
                TrackEventKind::NoteOff { key, velocity } => {
                    track.extend([0x80 | channel, key, velocity]);
                }
                TrackEventKind::ProgramChange { program } => {
                    track.extend([0xc0 | channel, program]);
                }
                TrackEventKind::NoteOn { key, velocity } => {
                    track.extend([0x90 | channel, key, velocity]);
                }
            }
            previous_tick = tick;
        }
        end_track(&mut track);
        tracks.push(track);
    }

    let mut out = Vec::new();
    out.extend(b"MThd");
    out.extend(6u32.to_be_bytes());
    out.extend(1u16.to_be_bytes());
    out.extend((tracks.len() as u16).to_be_bytes());
    out.extend(ppq.to_be_bytes());
    for track in tracks {
        out.extend(b"MTrk");
        out.extend((track.len() as u32).to_be_bytes());
        out.extend(track);
    }
    Ok(out)
}

fn end_track(track: &mut Vec<u8>) {
    track.extend([0x00, 0xff, 0x2f, 0x00]);
}

/// One decoded timed event; ticks are absolute within the track.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RawEventKind {
    NoteOn { channel: u8, key: u8, velocity: u8 },
    NoteOff { channel: u8, key: u8, velocity: u8 },
    ProgramChange { channel: u8, program: u8 },
    SetTempo { micros_per_quarter: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RawEvent {
    pub tick: u64,
    pub kind: RawEventKind,
}

/// Decoded file header and events of all tracks, flattened.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodedSmf {
    pub format: u16,
    pub track_count: u16,
    pub division: u16,
    pub events: Vec<RawEvent>,
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], MidiError> {
        if self.pos + n > self.bytes.len() {
            return Err(MidiError::TruncatedFile);
        }
        let slice = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(slice)
    }

    fn byte(&mut self) -> Result<u8, MidiError> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16, MidiError> {
        Ok(u16::from_be_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32, MidiError> {
        Ok(u32::from_be_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn varlen(&mut self) -> Result<u32, MidiError> {
        let (value, used) = decode_varlen(&self.bytes[self.pos..])?;
        self.pos += used;
        Ok(value)
    }
}

/// Parses SMF bytes back to timed events. Supports running status and
/// NoteOn-velocity-0 as NoteOff; skips events the encoder never writes.
pub fn decode_smf(bytes: &[u8]) -> Result<DecodedSmf, MidiError> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(4)? != b"MThd" {
        return Err(MidiError::MalformedChunk("missing MThd magic".to_string()));
    }
    let header_len = r.u32()?;
    if header_len != 6 {
        return Err(MidiError::MalformedChunk(format!(
            "header length {header_len}, expected 6"
        )));
    }
    let format = r.u16()?;
    let track_count = r.u16()?;
    let division = r.u16()?;
    if division & 0x8000 != 0 {
        return Err(MidiError::MalformedChunk(
            "SMPTE divisions not supported".to_string(),
        ));
    }

    let mut events = Vec::new();
    for _ in 0..track_count {
        if r.take(4)? != b"MTrk" {
            return Err(MidiError::MalformedChunk("missing MTrk magic".to_string()));
        }
        let length = r.u32()? as usize;
        let track_end = r.pos + length;
        if track_end > bytes.len() {
            return Err(MidiError::TruncatedFile);
        }
        let mut tick: u64 = 0;
        let mut running_status: Option<u8> = None;
        let mut ended = false;
        while r.pos < track_end {
            tick += r.varlen()? as u64;
            let mut status = r.byte()?;
            if status < 0x80 {
                // Running status: data byte of the previous message.
                status = running_status.ok_or_else(|| {
                    MidiError::MalformedChunk("data byte with no running status".to_string())
                })?;
                r.pos -= 1;
            }
            match status {
                0xff => {
                    running_status = None;
                    let meta_type = r.byte()?;
                    let len = r.varlen()? as usize;
                    let data = r.take(len)?;
                    match meta_type {
                        0x51 => {
                            if data.len() != 3 {
                                return Err(MidiError::MalformedChunk(
                                    "set-tempo length must be 3".to_string(),
                                ));
                            }
                            let micros = u32::from_be_bytes([0, data[0], data[1], data[2]]);
                            events.push(RawEvent {
                                tick,
                                kind: RawEventKind::SetTempo { micros_per_quarter: micros },
                            });
                        }
                        0x2f => {
                            ended = true;
                            break;
                        }
                        _ => {}
                    }
                }
                0xf0 | 0xf7 => {
                    running_status = None;
                    let len = r.varlen()? as usize;
                    r.take(len)?;
                }
                _ => {
                    running_status = Some(status);
                    let channel = status & 0x0f;
                    match status & 0xf0 {
                        0x80 => {
                            let key = r.byte()?;
                            let velocity = r.byte()?;
                            events.push(RawEvent {
                                tick,
                                kind: RawEventKind::NoteOff { channel, key, velocity },
                            });
                        }
                        0x90 => {
                            let key = r.byte()?;
                            let velocity = r.byte()?;
                            let kind = if velocity == 0 {
                                RawEventKind::NoteOff { channel, key, velocity }
                            } else {
                                RawEventKind::NoteOn { channel, key, velocity }
                            };
                            events.push(RawEvent { tick, kind });
                        }
                        0xc0 => {
                            let program = r.byte()?;
                            events.push(RawEvent {
                                tick,
                                kind: RawEventKind::ProgramChange { channel, program },
                            });
                        }
                        0xa0 | 0xb0 | 0xe0 => {
                            r.take(2)?;
                        }
                        0xd0 => {
                            r.take(1)?;
                        }
                        other => {
                            return Err(MidiError::MalformedChunk(format!(
                                "unexpected status byte {other:#04x}"
                            )));
                        }
                    }
                }
            }
        }
        if !ended {
            return Err(MidiError::MalformedChunk(
                "track missing end-of-track meta event".to_string(),
            ));
        }
        r.pos = track_end;
    }
    Ok(DecodedSmf {
        format,
        track_count,
        division,
        events,
    })
}

/// The multiset used for round-trip comparisons: every decoded event,
/// sorted.
pub fn event_multiset(decoded: &DecodedSmf) -> Vec<RawEvent> {
    let mut events = decoded.events.clone();
    events.sort();
    events
}

/// The multiset an encoded `score` must decode to.
pub fn expected_multiset(score: &Score) -> Vec<RawEvent> {
    let ppq = score.ppq;
    let mut events = Vec::new();
    for event in &score.events {
        let tick = to_ticks(event.start, ppq);
        match event.kind {
            ScoreEventKind::Tempo { bpm } => events.push(RawEvent {
                tick,
                kind: RawEventKind::SetTempo {
                    micros_per_quarter: tempo_micros(bpm),
                },
            }),
            ScoreEventKind::ProgramChange { program } => events.push(RawEvent {
                tick,
                kind: RawEventKind::ProgramChange {
                    channel: event.channel,
                    program,
                },
            }),
            ScoreEventKind::Percussion { key, velocity }
            | ScoreEventKind::Note { pitch: key, velocity } => {
                let end = to_ticks(event.start + event.duration, ppq).max(tick + 1);
                events.push(RawEvent {
                    tick,
                    kind: RawEventKind::NoteOn {
                        channel: event.channel,
                        key,
                        velocity,
                    },
                });
                events.push(RawEvent {
                    tick: end,
                    kind: RawEventKind::NoteOff {
                        channel: event.channel,
                        key,
                        velocity: 64,
                    },
                });
            }
        }
    }
    events.sort();
    events
}
