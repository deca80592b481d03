//! Synthetic inputs for experiments and tests when no real corpus is at
//! hand: two-measure 4/4 pieces built from scale runs over triads, digit-like
//! 28 × 28 glyphs standing in for MNIST, and white-noise windows.

use crate::pianoroll::{rasterize, segment, PianoRoll, WINDOW_COLUMNS};
use crate::score_io::{GrayImage, NoteEvent, Score};
use crate::Rng;

const TPQ: u64 = 480;
const MAJOR_STEPS: [u8; 7] = [0, 2, 4, 5, 7, 9, 11];
const PROGRESSIONS: [[usize; 4]; 6] = [
    [0, 3, 4, 0],
    [0, 5, 3, 4],
    [5, 3, 0, 4],
    [0, 4, 5, 3],
    [0, 1, 4, 0],
    [3, 4, 2, 5],
];

fn below(rng: &mut Rng, n: usize) -> usize {
    ((rng.uniform() * n as f64) as usize).min(n - 1)
}

/// MIDI pitch of scale `degree` (may exceed 6) above `tonic`.
fn degree_pitch(tonic: u8, degree: usize) -> u8 {
    tonic + 12 * (degree / 7) as u8 + MAJOR_STEPS[degree % 7]
}

/// A two-measure major-key piece: an eighth-note one-octave scale, up then
/// down or down then up, over four half-note triads.
pub fn corpus_piece(rng: &mut Rng) -> Score {
    let key = below(rng, 12) as u8;
    let melody_tonic = 60 + key; // C4..B4
    let bass_tonic = 48 + key;
    let mut notes = Vec::with_capacity(28);

    let ascending_first = rng.uniform() < 0.5;
    for i in 0..16u64 {
        let step = if i < 8 { i } else { 15 - i } as usize;
        let degree = if ascending_first { step } else { 7 - step };
        notes.push(NoteEvent::new(degree_pitch(melody_tonic, degree), i * TPQ / 2, TPQ / 2).expect("valid note"));
    }

    let progression = PROGRESSIONS[below(rng, PROGRESSIONS.len())];
    for (i, &root) in progression.iter().enumerate() {
        for third in [0, 2, 4] {
            let pitch = degree_pitch(bass_tonic, root + third);
            notes.push(NoteEvent::new(pitch, i as u64 * 2 * TPQ, 2 * TPQ).expect("valid note"));
        }
    }
    Score::new(notes, TPQ as u32).expect("positive resolution").with_length(8 * TPQ)
}

pub fn corpus(seed: u64, pieces: usize) -> Vec<Score> {
    let mut rng = Rng::new(seed);
    (0..pieces).map(|_| corpus_piece(&mut rng)).collect()
}

/// One window per synthetic piece.
pub fn corpus_windows(seed: u64, pieces: usize) -> Vec<PianoRoll> {
    corpus(seed, pieces)
        .iter()
        .flat_map(|s| segment(&rasterize(s).expect("synthetic pieces are 4/4")).expect("whole measures"))
        .collect()
}

/// Each cell on with probability one half.
pub fn noise_window(rng: &mut Rng) -> PianoRoll {
    let mut w = PianoRoll::empty(WINDOW_COLUMNS);
    for r in 0..crate::pianoroll::PITCH_ROWS {
        for c in 0..WINDOW_COLUMNS {
            if rng.uniform() < 0.5 {
                w.set(r, c, true);
            }
        }
    }
    w
}

fn ellipse(cx: f64, cy: f64, rx: f64, ry: f64) -> Vec<(f64, f64)> {
    (0..=24)
        .map(|k| {
            let a = k as f64 / 24.0 * std::f64::consts::TAU;
            (cx + rx * a.cos(), cy + ry * a.sin())
        })
        .collect()
}

fn digit_strokes(digit: u8) -> Vec<Vec<(f64, f64)>> {
    match digit % 10 {
        0 => vec![ellipse(0.5, 0.5, 0.26, 0.37)],
        1 => vec![vec![(0.38, 0.26), (0.55, 0.12), (0.55, 0.88)]],
        2 => vec![vec![
            (0.25, 0.3),
            (0.35, 0.15),
            (0.6, 0.12),
            (0.72, 0.28),
            (0.68, 0.45),
            (0.25, 0.88),
            (0.78, 0.88),
        ]],
        3 => vec![vec![
            (0.25, 0.15),
            (0.7, 0.15),
            (0.45, 0.45),
            (0.7, 0.6),
            (0.65, 0.82),
            (0.45, 0.9),
            (0.25, 0.82),
        ]],
        4 => vec![vec![(0.6, 0.88), (0.6, 0.12), (0.22, 0.62), (0.8, 0.62)]],
        5 => vec![vec![
            (0.75, 0.12),
            (0.3, 0.12),
            (0.28, 0.45),
            (0.55, 0.42),
            (0.72, 0.58),
            (0.7, 0.8),
            (0.5, 0.9),
            (0.25, 0.82),
        ]],
        6 => vec![vec![(0.68, 0.12), (0.4, 0.35), (0.3, 0.65)], ellipse(0.5, 0.68, 0.2, 0.2)],
        7 => vec![vec![(0.22, 0.12), (0.78, 0.12), (0.42, 0.9)]],
        8 => vec![ellipse(0.5, 0.3, 0.17, 0.17), ellipse(0.5, 0.68, 0.21, 0.21)],
        _ => vec![ellipse(0.5, 0.32, 0.2, 0.2), vec![(0.7, 0.35), (0.6, 0.9)]],
    }
}

fn segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
    };
    let (qx, qy) = (a.0 + t * dx, a.1 + t * dy);
    ((p.0 - qx).powi(2) + (p.1 - qy).powi(2)).sqrt()
}

/// A hand-drawn-looking 28 × 28 glyph of `digit` with random placement,
/// scale and stroke width.
pub fn digit_image(digit: u8, rng: &mut Rng) -> GrayImage {
    const SIZE: usize = 28;
    let scale = 20.0 * (0.9 + 0.2 * rng.uniform());
    let ox = 14.0 + 3.0 * (rng.uniform() - 0.5);
    let oy = 14.0 + 3.0 * (rng.uniform() - 0.5);
    let width = 1.3 + 0.8 * rng.uniform();
    let strokes: Vec<Vec<(f64, f64)>> = digit_strokes(digit)
        .into_iter()
        .map(|s| {
            s.into_iter()
                .map(|(x, y)| (ox + (x - 0.5) * scale, oy + (y - 0.5) * scale))
                .collect()
        })
        .collect();
    let mut pixels = vec![0u8; SIZE * SIZE];
    for r in 0..SIZE {
        for c in 0..SIZE {
            let p = (c as f64 + 0.5, r as f64 + 0.5);
            let d = strokes
                .iter()
                .flat_map(|s| s.windows(2).map(move |w| segment_distance(p, w[0], w[1])))
                .fold(f64::INFINITY, f64::min);
            let value = (1.0 - (d - width).max(0.0)).clamp(0.0, 1.0);
            pixels[r * SIZE + c] = (value * 255.0).round() as u8;
        }
    }
    GrayImage::new(SIZE, SIZE, pixels).expect("square image")
}

/// `count` glyphs cycling through the digits, like an MNIST image file.
pub fn digit_images(seed: u64, count: usize) -> Vec<GrayImage> {
    let mut rng = Rng::new(seed);
    (0..count).map(|i| digit_image((i % 10) as u8, &mut rng)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pianoroll::WINDOW_UNITS;

    #[test]
    fn pieces_fill_one_window() {
        let windows = corpus_windows(3, 20);
        assert_eq!(windows.len(), 20);
        for w in &windows {
            assert!(w.is_window());
            let ones = w.count_ones();
            assert!((500..=800).contains(&ones), "{ones}");
        }
    }

    #[test]
    fn corpus_is_seeded() {
        assert_eq!(corpus(5, 4), corpus(5, 4));
        assert_ne!(corpus(5, 4), corpus(6, 4));
    }

    #[test]
    fn digits_have_ink() {
        let mut rng = Rng::new(1);
        for d in 0..10 {
            let im = digit_image(d, &mut rng);
            let ink = im.pixels().iter().filter(|&&p| p >= 128).count();
            assert!((30..400).contains(&ink), "digit {d}: {ink}");
        }
    }

    #[test]
    fn noise_is_about_half() {
        let w = noise_window(&mut Rng::new(2));
        let frac = w.count_ones() as f64 / WINDOW_UNITS as f64;
        assert!((frac - 0.5).abs() < 0.02);
    }
}
