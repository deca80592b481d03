//! Standard MIDI File reading (formats 0 and 1) and writing (format 0).

use std::collections::{HashMap, VecDeque};

use super::{NoteEvent, Score, TimeSignature};
use crate::{Error, Result};

const PERCUSSION_CHANNEL: u8 = 9;
const EXPORT_VELOCITY: u8 = 80;
const EXPORT_TEMPO_USEC: u32 = 500_000;

/// Diagnostics collected while parsing.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MidiReport {
    pub tracks: usize,
    /// Note-ons that never received a matching note-off.
    pub dangling_notes: usize,
    /// Note-offs with no sounding note to close.
    pub stray_note_offs: usize,
    pub zero_length_notes: usize,
    pub percussion_notes: usize,
}

fn midi_err(msg: impl Into<String>) -> Error {
    Error::Midi(msg.into())
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    fn remaining(&self) -> usize {
        self.bytes.len() - self.pos
    }

    fn is_empty(&self) -> bool {
        self.remaining() == 0
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if n > self.remaining() {
            return Err(midi_err(format!(
                "truncated data: need {n} bytes at offset {}, {} left",
                self.pos,
                self.remaining()
            )));
        }
        let out = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn u32(&mut self) -> Result<u32> {
        let b = self.take(4)?;
        Ok(u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
    }

    fn vlq(&mut self) -> Result<u32> {
        let (value, used) = read_vlq(&self.bytes[self.pos..])?;
        self.pos += used;
        Ok(value)
    }

    fn data_byte(&mut self) -> Result<u8> {
        let b = self.u8()?;
        if b & 0x80 != 0 {
            return Err(midi_err(format!("status byte 0x{b:02X} where data expected")));
        }
        Ok(b)
    }
}

/// Decodes a variable-length quantity, returning the value and the number of
/// bytes consumed. At most four bytes are accepted.
pub fn read_vlq(bytes: &[u8]) -> Result<(u32, usize)> {
    let mut value = 0u32;
    for (i, &b) in bytes.iter().take(4).enumerate() {
        value = (value << 7) | u32::from(b & 0x7F);
        if b & 0x80 == 0 {
            return Ok((value, i + 1));
        }
    }
    if bytes.len() < 4 {
        Err(midi_err("truncated variable-length quantity"))
    } else {
        Err(midi_err("variable-length quantity longer than four bytes"))
    }
}

/// Appends the variable-length encoding of `value` (at most 0x0FFFFFFF).
pub fn write_vlq(value: u32, out: &mut Vec<u8>) {
    debug_assert!(value <= 0x0FFF_FFFF);
    let mut groups = [0u8; 4];
    let mut n = 0;
    let mut v = value;
    loop {
        groups[n] = (v & 0x7F) as u8;
        n += 1;
        v >>= 7;
        if v == 0 {
            break;
        }
    }
    for i in (0..n).rev() {
        out.push(groups[i] | if i > 0 { 0x80 } else { 0 });
    }
}

pub fn parse_midi(bytes: &[u8]) -> Result<Score> {
    parse_midi_with_report(bytes).map(|(score, _)| score)
}

/// Parses an SMF, merging all tracks into one score.
///
/// Note-ons pair with note-offs (or velocity-0 note-ons) first-in first-out
/// per channel and pitch within a track. Percussion (channel 10) is dropped.
/// Dangling note-ons and zero-length notes are dropped and counted.
pub fn parse_midi_with_report(bytes: &[u8]) -> Result<(Score, MidiReport)> {
    let mut cur = Cursor::new(bytes);
    if cur.take(4).map_err(|_| midi_err("file too short"))? != b"MThd" {
        return Err(midi_err("bad header magic"));
    }
    let header_len = cur.u32()? as usize;
    if header_len < 6 {
        return Err(midi_err(format!("header length {header_len} < 6")));
    }
    let header = cur.take(header_len)?;
    let format = u16::from_be_bytes([header[0], header[1]]);
    let track_count = u16::from_be_bytes([header[2], header[3]]) as usize;
    let division = u16::from_be_bytes([header[4], header[5]]);
    if format > 1 {
        return Err(midi_err(format!("unsupported SMF format {format}")));
    }
    if division & 0x8000 != 0 {
        return Err(midi_err("SMPTE time division is not supported"));
    }
    if division == 0 {
        return Err(midi_err("zero ticks per quarter note"));
    }

    let mut report = MidiReport::default();
    let mut notes = Vec::new();
    let mut signatures = Vec::new();
    let mut length = 0u64;
    while report.tracks < track_count && !cur.is_empty() {
        let kind = cur.take(4)?;
        let len = cur.u32()? as usize;
        let body = cur.take(len)?;
        if kind != b"MTrk" {
            continue;
        }
        report.tracks += 1;
        let end = parse_track(body, &mut notes, &mut signatures, &mut report)?;
        length = length.max(end);
    }
    if report.tracks < track_count {
        return Err(midi_err(format!(
            "header announces {track_count} tracks, found {}",
            report.tracks
        )));
    }

    signatures.sort_by_key(|s: &TimeSignature| s.tick);
    let mut score = Score::new(notes, u32::from(division))?.with_length(length);
    score.time_signatures = signatures;
    Ok((score, report))
}

/// Parses one track body; returns the track's end tick.
fn parse_track(
    body: &[u8],
    notes: &mut Vec<NoteEvent>,
    signatures: &mut Vec<TimeSignature>,
    report: &mut MidiReport,
) -> Result<u64> {
    let mut cur = Cursor::new(body);
    let mut tick = 0u64;
    let mut running: Option<u8> = None;
    let mut open: HashMap<(u8, u8), VecDeque<u64>> = HashMap::new();

    while !cur.is_empty() {
        tick += u64::from(cur.vlq()?);
        let first = cur.peek().ok_or_else(|| midi_err("event missing after delta time"))?;
        let status = if first & 0x80 != 0 {
            cur.pos += 1;
            first
        } else {
            running.ok_or_else(|| midi_err("data byte without running status"))?
        };

        match status {
            0xFF => {
                let kind = cur.u8()?;
                let len = cur.vlq()? as usize;
                let data = cur.take(len)?;
                match kind {
                    0x2F => break,
                    0x58 => {
                        if data.len() < 2 {
                            return Err(midi_err("short time-signature event"));
                        }
                        if data[1] > 15 {
                            return Err(midi_err("time-signature denominator out of range"));
                        }
                        signatures.push(TimeSignature {
                            tick,
                            numerator: data[0],
                            denominator: 1u16 << data[1],
                        });
                    }
                    _ => {}
                }
            }
            0xF0 | 0xF7 => {
                let len = cur.vlq()? as usize;
                cur.take(len)?;
            }
            0x80..=0xEF => {
                running = Some(status);
                let channel = status & 0x0F;
                match status & 0xF0 {
                    0x80 | 0x90 => {
                        let pitch = cur.data_byte()?;
                        let velocity = cur.data_byte()?;
                        let key = (channel, pitch);
                        if status & 0xF0 == 0x90 && velocity > 0 {
                            open.entry(key).or_default().push_back(tick);
                        } else if let Some(onset) = open.get_mut(&key).and_then(VecDeque::pop_front) {
                            if channel == PERCUSSION_CHANNEL {
                                report.percussion_notes += 1;
                            } else if tick == onset {
                                report.zero_length_notes += 1;
                            } else {
                                notes.push(NoteEvent {
                                    onset,
                                    pitch,
                                    duration: tick - onset,
                                });
                            }
                        } else {
                            report.stray_note_offs += 1;
                        }
                    }
                    0xA0 | 0xB0 | 0xE0 => {
                        cur.data_byte()?;
                        cur.data_byte()?;
                    }
                    _ => {
                        cur.data_byte()?;
                    }
                }
            }
            other => return Err(midi_err(format!("unexpected status byte 0x{other:02X}"))),
        }
    }
    report.dangling_notes += open.values().map(VecDeque::len).sum::<usize>();
    Ok(tick)
}

/// Writes a format-0 SMF: tempo 120 BPM, 4/4, then the notes at velocity 80.
///
/// Overlapping notes of the same pitch are spread over separate channels so
/// that FIFO pairing on re-read restores them exactly.
pub fn write_midi(score: &Score) -> Result<Vec<u8>> {
    let tpq = u16::try_from(score.ticks_per_quarter)
        .ok()
        .filter(|&t| t > 0 && t <= 0x7FFF)
        .ok_or_else(|| midi_err(format!("ticks_per_quarter {} not encodable", score.ticks_per_quarter)))?;

    // (tick, is_on, pitch, channel); offs sort before ons at the same tick.
    let mut events: Vec<(u64, bool, u8, u8)> = Vec::with_capacity(score.notes.len() * 2);
    let mut busy: HashMap<(u8, u8), u64> = HashMap::new();
    let channels: Vec<u8> = (0u8..16).filter(|&c| c != PERCUSSION_CHANNEL).collect();
    let mut notes = score.notes.clone();
    notes.sort_unstable();
    for note in &notes {
        if note.pitch > 127 || note.duration == 0 {
            return Err(midi_err(format!("invalid note {note:?}")));
        }
        let channel = channels
            .iter()
            .copied()
            .find(|&c| busy.get(&(note.pitch, c)).is_none_or(|&until| until <= note.onset))
            .unwrap_or_else(|| {
                *channels
                    .iter()
                    .min_by_key(|&&c| busy.get(&(note.pitch, c)).copied().unwrap_or(0))
                    .expect("channel list is nonempty")
            });
        busy.insert((note.pitch, channel), note.end());
        events.push((note.onset, true, note.pitch, channel));
        events.push((note.end(), false, note.pitch, channel));
    }
    events.sort_unstable();

    let mut track = Vec::new();
    // tempo
    track.extend_from_slice(&[0x00, 0xFF, 0x51, 0x03]);
    track.extend_from_slice(&EXPORT_TEMPO_USEC.to_be_bytes()[1..]);
    // 4/4, 24 clocks per click, 8 32nds per quarter
    track.extend_from_slice(&[0x00, 0xFF, 0x58, 0x04, 0x04, 0x02, 0x18, 0x08]);
    let mut last = 0u64;
    for (tick, is_on, pitch, channel) in events {
        write_delta(tick - last, &mut track)?;
        last = tick;
        if is_on {
            track.extend_from_slice(&[0x90 | channel, pitch, EXPORT_VELOCITY]);
        } else {
            track.extend_from_slice(&[0x80 | channel, pitch, 0]);
        }
    }
    write_delta(score.length_ticks.saturating_sub(last), &mut track)?;
    track.extend_from_slice(&[0xFF, 0x2F, 0x00]);

    let mut out = Vec::with_capacity(track.len() + 22);
    out.extend_from_slice(b"MThd");
    out.extend_from_slice(&6u32.to_be_bytes());
    out.extend_from_slice(&0u16.to_be_bytes());
    out.extend_from_slice(&1u16.to_be_bytes());
    out.extend_from_slice(&tpq.to_be_bytes());
    out.extend_from_slice(b"MTrk");
    out.extend_from_slice(&(track.len() as u32).to_be_bytes());
    out.extend_from_slice(&track);
    Ok(out)
}

fn write_delta(delta: u64, out: &mut Vec<u8>) -> Result<()> {
    let delta = u32::try_from(delta)
        .ok()
        .filter(|&d| d <= 0x0FFF_FFFF)
        .ok_or_else(|| midi_err(format!("delta time {delta} exceeds 0x0FFFFFFF")))?;
    write_vlq(delta, out);
    Ok(())
}
