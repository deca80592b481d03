//! Note-event scores and the binary formats they travel in: Standard MIDI
//! Files, IDX image archives (MNIST) and binary PGM.

mod idx;
mod midi;
pub(crate) mod pgm;

pub use idx::{parse_idx, write_idx};
pub use midi::{parse_midi, parse_midi_with_report, read_vlq, write_midi, write_vlq, MidiReport};
pub use pgm::{read_pgm, write_pgm};

use crate::{Error, Result};

/// A sounding note: MIDI pitch, onset and duration in ticks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NoteEvent {
    pub onset: u64,
    pub pitch: u8,
    pub duration: u64,
}

impl NoteEvent {
    pub fn new(pitch: u8, onset: u64, duration: u64) -> Result<Self> {
        if pitch > 127 {
            return Err(Error::InvalidArgument(format!("pitch {pitch} outside 0-127")));
        }
        if duration == 0 {
            return Err(Error::InvalidArgument("note duration must be at least one tick".into()));
        }
        Ok(Self {
            onset,
            pitch,
            duration,
        })
    }

    pub fn end(&self) -> u64 {
        self.onset + self.duration
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimeSignature {
    pub tick: u64,
    pub numerator: u8,
    pub denominator: u16,
}

impl TimeSignature {
    pub fn is_common_time(&self) -> bool {
        self.numerator == 4 && self.denominator == 4
    }
}

/// Notes sorted by `(onset, pitch, duration)`, with the tick resolution,
/// every time-signature event, and the total length in ticks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Score {
    pub notes: Vec<NoteEvent>,
    pub ticks_per_quarter: u32,
    pub time_signatures: Vec<TimeSignature>,
    pub length_ticks: u64,
}

impl Score {
    /// Sorts `notes`; the length is the latest note end.
    pub fn new(mut notes: Vec<NoteEvent>, ticks_per_quarter: u32) -> Result<Self> {
        if ticks_per_quarter == 0 {
            return Err(Error::InvalidArgument("ticks_per_quarter must be positive".into()));
        }
        notes.sort_unstable();
        let length_ticks = notes.iter().map(NoteEvent::end).max().unwrap_or(0);
        Ok(Self {
            notes,
            ticks_per_quarter,
            time_signatures: Vec::new(),
            length_ticks,
        })
    }

    pub fn with_length(mut self, length_ticks: u64) -> Self {
        self.length_ticks = self.length_ticks.max(length_ticks);
        self
    }

    pub fn with_time_signature(mut self, sig: TimeSignature) -> Self {
        self.time_signatures.push(sig);
        self
    }

    pub fn is_common_time(&self) -> bool {
        is_common_time(self)
    }
}

/// True when every time signature is 4/4. A file without any time-signature
/// event counts as 4/4.
pub fn is_common_time(score: &Score) -> bool {
    score.time_signatures.iter().all(TimeSignature::is_common_time)
}

/// An 8-bit grayscale image, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if pixels.len() != width * height {
            return Err(Error::DimensionMismatch {
                expected: width * height,
                found: pixels.len(),
            });
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.pixels[row * self.width + col]
    }
}
