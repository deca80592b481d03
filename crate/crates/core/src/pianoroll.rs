//! Binary piano-roll images.
//!
//! A roll has 72 pitch rows, B6 (MIDI 95) at row 0 down to C1 (MIDI 24) at
//! row 71, and one column per 1/24 of a quarter note. A 4/4 measure is 96
//! columns; a training window is two measures, 72 × 192 = 13,824 cells.
//! Cells are stored row-major, which is also the flattening order used for
//! the visible layer.

use std::fmt;

use crate::rbm::BinaryVec;
use crate::score_io::pgm::netpbm_header;
use crate::score_io::{GrayImage, NoteEvent, Score};
use crate::{Error, Result, VisibleState};

pub const PITCH_ROWS: usize = 72;
pub const HIGHEST_PITCH: u8 = 95;
pub const LOWEST_PITCH: u8 = 24;
pub const COLUMNS_PER_QUARTER: u64 = 24;
pub const MEASURE_COLUMNS: usize = 96;
pub const WINDOW_COLUMNS: usize = 2 * MEASURE_COLUMNS;
/// Visible units of a two-measure window.
pub const WINDOW_UNITS: usize = PITCH_ROWS * WINDOW_COLUMNS;
/// Default transpositions: up to 6 semitones up and 5 down.
pub const DEFAULT_SHIFTS: [i32; 11] = [-5, -4, -3, -2, -1, 1, 2, 3, 4, 5, 6];
pub const DEFAULT_BINARIZE_THRESHOLD: u8 = 128;

/// Row of `pitch`, or `None` outside C1..=B6.
pub fn pitch_row(pitch: u8) -> Option<usize> {
    (LOWEST_PITCH..=HIGHEST_PITCH)
        .contains(&pitch)
        .then(|| usize::from(HIGHEST_PITCH - pitch))
}

pub fn row_pitch(row: usize) -> u8 {
    assert!(row < PITCH_ROWS, "row {row} out of range");
    HIGHEST_PITCH - row as u8
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PianoRoll {
    width: usize,
    cells: Vec<u8>,
}

impl fmt::Debug for PianoRoll {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PianoRoll")
            .field("width", &self.width)
            .field("ones", &self.count_ones())
            .finish()
    }
}

impl PianoRoll {
    pub fn empty(width: usize) -> Self {
        Self {
            width,
            cells: vec![0; PITCH_ROWS * width],
        }
    }

    pub fn empty_window() -> Self {
        Self::empty(WINDOW_COLUMNS)
    }

    /// Wraps row-major cells; the length must be `72 × width`.
    pub fn from_cells(width: usize, cells: Vec<u8>) -> Result<Self> {
        if cells.len() != PITCH_ROWS * width {
            return Err(Error::DimensionMismatch {
                expected: PITCH_ROWS * width,
                found: cells.len(),
            });
        }
        if let Some((index, &value)) = cells.iter().enumerate().find(|(_, &c)| c > 1) {
            return Err(Error::NonBinaryState { index, value });
        }
        Ok(Self { width, cells })
    }

    /// Interprets a 13,824-unit visible state as a window.
    pub fn from_visible(v: &VisibleState) -> Result<Self> {
        Self::from_cells(WINDOW_COLUMNS, v.as_slice().to_vec())
    }

    pub fn to_visible(&self) -> Result<VisibleState> {
        self.check_window()?;
        Ok(BinaryVec::from_raw(self.cells.clone()))
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn measures(&self) -> usize {
        self.width / MEASURE_COLUMNS
    }

    pub fn is_window(&self) -> bool {
        self.width == WINDOW_COLUMNS
    }

    pub fn check_window(&self) -> Result<()> {
        if !self.is_window() {
            return Err(Error::DimensionMismatch {
                expected: WINDOW_COLUMNS,
                found: self.width,
            });
        }
        Ok(())
    }

    pub fn cells(&self) -> &[u8] {
        &self.cells
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.cells[row * self.width + col] == 1
    }

    pub fn set(&mut self, row: usize, col: usize, on: bool) {
        self.cells[row * self.width + col] = u8::from(on);
    }

    pub fn count_ones(&self) -> usize {
        self.cells.iter().filter(|&&c| c == 1).count()
    }

    pub fn row(&self, row: usize) -> &[u8] {
        &self.cells[row * self.width..(row + 1) * self.width]
    }

    /// Columns `start..end` as a new roll.
    pub fn columns(&self, start: usize, end: usize) -> PianoRoll {
        assert!(start <= end && end <= self.width);
        let mut out = PianoRoll::empty(end - start);
        for r in 0..PITCH_ROWS {
            out.cells[r * out.width..(r + 1) * out.width].copy_from_slice(&self.row(r)[start..end]);
        }
        out
    }

    /// Horizontal concatenation.
    pub fn concat(&self, other: &PianoRoll) -> PianoRoll {
        let width = self.width + other.width;
        let mut cells = Vec::with_capacity(PITCH_ROWS * width);
        for r in 0..PITCH_ROWS {
            cells.extend_from_slice(self.row(r));
            cells.extend_from_slice(other.row(r));
        }
        PianoRoll { width, cells }
    }

    /// `(row, col)` of every set cell, row-major.
    pub fn active_cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == 1)
            .map(|(i, _)| (i / self.width, i % self.width))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RasterReport {
    /// Notes outside C1..=B6, dropped rather than clipped.
    pub dropped_out_of_range: usize,
}

/// Tick → column with round-half-up.
fn tick_to_column(tick: u64, ticks_per_quarter: u64) -> usize {
    ((2 * tick * COLUMNS_PER_QUARTER + ticks_per_quarter) / (2 * ticks_per_quarter)) as usize
}

pub fn rasterize(score: &Score) -> Result<PianoRoll> {
    rasterize_with_report(score).map(|(roll, _)| roll)
}

/// Rasterizes a 4/4 score into a full-length strip whose width is a multiple
/// of 96. Each note covers at least one column; overlapping notes OR.
pub fn rasterize_with_report(score: &Score) -> Result<(PianoRoll, RasterReport)> {
    if !score.is_common_time() {
        return Err(Error::NotCommonTime);
    }
    let tpq = u64::from(score.ticks_per_quarter);
    if tpq == 0 {
        return Err(Error::InvalidArgument("ticks_per_quarter must be positive".into()));
    }
    let mut report = RasterReport::default();
    let mut spans = Vec::with_capacity(score.notes.len());
    let mut extent = (score.length_ticks * COLUMNS_PER_QUARTER).div_ceil(tpq) as usize;
    for note in &score.notes {
        let Some(row) = pitch_row(note.pitch) else {
            report.dropped_out_of_range += 1;
            continue;
        };
        let start = tick_to_column(note.onset, tpq);
        let end = tick_to_column(note.end(), tpq).max(start + 1);
        extent = extent.max(end);
        spans.push((row, start, end));
    }
    let width = extent.div_ceil(MEASURE_COLUMNS) * MEASURE_COLUMNS;
    let mut roll = PianoRoll::empty(width);
    for (row, start, end) in spans {
        roll.cells[row * width + start..row * width + end].fill(1);
    }
    Ok((roll, report))
}

/// Splits a strip into consecutive non-overlapping two-measure windows. A
/// trailing single measure is dropped.
pub fn segment(strip: &PianoRoll) -> Result<Vec<PianoRoll>> {
    if strip.width % MEASURE_COLUMNS != 0 {
        return Err(Error::InvalidArgument(format!(
            "strip width {} is not a whole number of measures",
            strip.width
        )));
    }
    Ok((0..strip.width / WINDOW_COLUMNS)
        .map(|w| strip.columns(w * WINDOW_COLUMNS, (w + 1) * WINDOW_COLUMNS))
        .collect())
}

/// Shifts every note by `semitones` (positive = higher pitch = toward row 0).
/// Returns `None` if any note would leave the 72-row range.
pub fn transpose_roll(window: &PianoRoll, semitones: i32) -> Option<PianoRoll> {
    if semitones.unsigned_abs() as usize >= PITCH_ROWS {
        return (window.count_ones() == 0).then(|| window.clone());
    }
    let mut out = PianoRoll::empty(window.width);
    for (row, col) in window.active_cells() {
        let target = row as i64 - i64::from(semitones);
        if !(0..PITCH_ROWS as i64).contains(&target) {
            return None;
        }
        out.set(target as usize, col, true);
    }
    Some(out)
}

/// Where a dataset window came from.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WindowSource {
    pub source: String,
    /// First measure of the window within its source strip.
    pub measure: usize,
    /// Transposition in semitones relative to the source.
    pub shift: i32,
}

/// Shape-identical two-measure windows with per-window provenance.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RollDataset {
    windows: Vec<PianoRoll>,
    provenance: Vec<WindowSource>,
}

impl RollDataset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, window: PianoRoll, source: WindowSource) -> Result<()> {
        window.check_window()?;
        self.windows.push(window);
        self.provenance.push(source);
        Ok(())
    }

    /// Rasterizes and segments one score.
    pub fn from_score(source: &str, score: &Score) -> Result<(Self, RasterReport)> {
        let (strip, report) = rasterize_with_report(score)?;
        let mut out = Self::new();
        for (i, window) in segment(&strip)?.into_iter().enumerate() {
            out.push(
                window,
                WindowSource {
                    source: source.to_string(),
                    measure: 2 * i,
                    shift: 0,
                },
            )?;
        }
        Ok((out, report))
    }

    pub fn extend(&mut self, other: RollDataset) {
        self.windows.extend(other.windows);
        self.provenance.extend(other.provenance);
    }

    pub fn len(&self) -> usize {
        self.windows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.windows.is_empty()
    }

    pub fn windows(&self) -> &[PianoRoll] {
        &self.windows
    }

    pub fn provenance(&self) -> &[WindowSource] {
        &self.provenance
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PianoRoll, &WindowSource)> {
        self.windows.iter().zip(&self.provenance)
    }

    /// Flattened windows, ready for training.
    pub fn visible_states(&self) -> Vec<VisibleState> {
        self.windows
            .iter()
            .map(|w| BinaryVec::from_raw(w.cells.clone()))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AugmentReport {
    pub rejected: usize,
}

pub fn augment(dataset: &RollDataset, shifts: &[i32]) -> RollDataset {
    augment_with_report(dataset, shifts).0
}

/// Each window followed by its transpositions in `shifts` order; shifts that
/// push a note out of range are skipped. A zero shift is ignored since the
/// original is always kept.
pub fn augment_with_report(dataset: &RollDataset, shifts: &[i32]) -> (RollDataset, AugmentReport) {
    let mut out = RollDataset::new();
    let mut report = AugmentReport::default();
    for (window, source) in dataset.iter() {
        out.windows.push(window.clone());
        out.provenance.push(source.clone());
        for &s in shifts.iter().filter(|&&s| s != 0) {
            match transpose_roll(window, s) {
                Some(t) => {
                    out.windows.push(t);
                    out.provenance.push(WindowSource {
                        shift: source.shift + s,
                        ..source.clone()
                    });
                }
                None => report.rejected += 1,
            }
        }
    }
    (out, report)
}

/// Nearest-neighbour resize to 72 × 192, then `pixel >= threshold → 1`.
pub fn resize_binary(img: &GrayImage, threshold: u8) -> Result<PianoRoll> {
    let (h, w) = (img.height(), img.width());
    if h == 0 || w == 0 {
        return Err(Error::InvalidArgument("cannot resize an empty image".into()));
    }
    let mut out = PianoRoll::empty_window();
    for r in 0..PITCH_ROWS {
        let sr = r * h / PITCH_ROWS;
        for c in 0..WINDOW_COLUMNS {
            let sc = c * w / WINDOW_COLUMNS;
            if img.get(sr, sc) >= threshold {
                out.set(r, c, true);
            }
        }
    }
    Ok(out)
}

/// Every maximal horizontal run of set cells becomes one note at 24 ticks per
/// quarter (one tick per column). Abutting notes of the same pitch merge.
pub fn roll_to_score(roll: &PianoRoll) -> Score {
    let mut notes = Vec::new();
    for r in 0..PITCH_ROWS {
        let row = roll.row(r);
        let mut c = 0;
        while c < row.len() {
            if row[c] == 1 {
                let start = c;
                while c < row.len() && row[c] == 1 {
                    c += 1;
                }
                notes.push(NoteEvent {
                    onset: start as u64,
                    pitch: row_pitch(r),
                    duration: (c - start) as u64,
                });
            } else {
                c += 1;
            }
        }
    }
    Score::new(notes, COLUMNS_PER_QUARTER as u32)
        .expect("positive resolution")
        .with_length(roll.width as u64)
}

/// Reads a binary (P4) PBM. Height must be 72 and width a whole number of
/// measures; bit 1 is a sounding cell.
pub fn read_pbm(bytes: &[u8]) -> Result<PianoRoll> {
    match bytes.get(..2) {
        Some(b"P4") => {}
        Some(b"P1") => return Err(Error::Pbm("unsupported PBM variant".into())),
        _ => return Err(Error::Pbm("wrong magic".into())),
    }
    let (fields, start) = netpbm_header(bytes, 2).map_err(Error::Pbm)?;
    let (width, height) = (fields[0], fields[1]);
    if height != PITCH_ROWS || width == 0 || width % MEASURE_COLUMNS != 0 {
        return Err(Error::Pbm(format!("wrong dimensions {width}x{height}")));
    }
    let stride = width.div_ceil(8);
    let raster = bytes
        .get(start..start + stride * height)
        .ok_or_else(|| Error::Pbm("truncated raster".into()))?;
    let mut roll = PianoRoll::empty(width);
    for (r, line) in raster.chunks_exact(stride).enumerate() {
        for c in 0..width {
            if line[c / 8] & (0x80 >> (c % 8)) != 0 {
                roll.set(r, c, true);
            }
        }
    }
    Ok(roll)
}

pub fn write_pbm(roll: &PianoRoll) -> Vec<u8> {
    let stride = roll.width.div_ceil(8);
    let mut out = format!("P4\n{} {}\n", roll.width, PITCH_ROWS).into_bytes();
    let header = out.len();
    out.resize(header + stride * PITCH_ROWS, 0);
    for (r, c) in roll.active_cells() {
        out[header + r * stride + c / 8] |= 0x80 >> (c % 8);
    }
    out
}
