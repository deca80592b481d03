//! Note-budgeted composition.
//!
//! A window grows from silence: at step `t` the hidden layer is sampled from
//! the current visible state, the expected visible state is computed from
//! that sample, and the `t + 1` most probable cells become the next visible
//! state. Cells may switch off between steps; only the count is fixed.
//!
//! Extension clamps the left measure to the previous window's right measure
//! and runs the same procedure on the right measure only. Chaining
//! extensions produces pieces of arbitrary length.

use std::cmp::Ordering;

use crate::pianoroll::{PianoRoll, MEASURE_COLUMNS, PITCH_ROWS, WINDOW_COLUMNS, WINDOW_UNITS};
use crate::rbm::{sample_unchecked, BinaryVec};
use crate::{Error, RbmParams, Result, Rng};

pub const DEFAULT_INITIAL_BUDGET: usize = 1000;
pub const DEFAULT_EXTENSION_BUDGET: usize = 500;
pub const DEFAULT_EXTENSIONS: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComposeConfig {
    /// Set cells in the first two measures.
    pub initial_budget: usize,
    /// Set cells in each appended measure.
    pub extension_budget: usize,
    pub extensions: usize,
    pub seed: u64,
    /// Hidden draws averaged per step; 1 is a single draw.
    pub hidden_samples: usize,
}

impl Default for ComposeConfig {
    fn default() -> Self {
        Self {
            initial_budget: DEFAULT_INITIAL_BUDGET,
            extension_budget: DEFAULT_EXTENSION_BUDGET,
            extensions: DEFAULT_EXTENSIONS,
            seed: 0,
            hidden_samples: 1,
        }
    }
}

impl ComposeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.initial_budget > WINDOW_UNITS {
            return Err(Error::InvalidArgument(format!(
                "initial budget {} exceeds {WINDOW_UNITS} cells",
                self.initial_budget
            )));
        }
        if self.extension_budget > WINDOW_UNITS / 2 {
            return Err(Error::InvalidArgument(format!(
                "extension budget {} exceeds {} cells",
                self.extension_budget,
                WINDOW_UNITS / 2
            )));
        }
        if self.hidden_samples == 0 {
            return Err(Error::InvalidArgument("hidden_samples must be at least 1".into()));
        }
        Ok(())
    }
}

/// Indices of the `k` largest scores among `candidates`; ties go to the
/// lower index.
fn top_k(scores: &[f64], candidates: &[usize], k: usize) -> Vec<usize> {
    let mut idx = candidates.to_vec();
    if k == 0 {
        return Vec::new();
    }
    let by_score = |a: &usize, b: &usize| {
        scores[*b]
            .partial_cmp(&scores[*a])
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(b))
    };
    if k < idx.len() {
        idx.select_nth_unstable_by(k - 1, by_score);
        idx.truncate(k);
    }
    idx
}

/// Expected visible state given `samples` hidden draws from `p(h | v)`.
/// Returns the first draw alongside the (averaged) expectation.
fn expected_visible(params: &RbmParams, v: &[u8], samples: usize, rng: &mut Rng) -> (BinaryVec, Vec<f64>) {
    let ph = params.hidden_probs(v);
    let first = sample_unchecked(&ph, rng);
    let mut u = params.visible_probs(first.as_slice());
    if samples > 1 {
        for _ in 1..samples {
            let h = sample_unchecked(&ph, rng);
            for (a, b) in u.iter_mut().zip(params.visible_probs(h.as_slice())) {
                *a += b;
            }
        }
        u.iter_mut().for_each(|x| *x /= samples as f64);
    }
    (first, u)
}

/// The shared budgeted-growth loop. Cells outside `mutable` stay as in
/// `base`; after step `t` exactly `t + 1` mutable cells are set. `observe`
/// sees `(t, v_t, h_t)` before the update at every step.
pub fn grow_visible(
    params: &RbmParams,
    base: &BinaryVec,
    mutable: &[usize],
    budget: usize,
    hidden_samples: usize,
    rng: &mut Rng,
    mut observe: impl FnMut(usize, &BinaryVec, &BinaryVec),
) -> Result<BinaryVec> {
    params.check_visible(base)?;
    if budget > mutable.len() {
        return Err(Error::InvalidArgument(format!(
            "budget {budget} exceeds {} mutable units",
            mutable.len()
        )));
    }
    if hidden_samples == 0 {
        return Err(Error::InvalidArgument("hidden_samples must be at least 1".into()));
    }
    if let Some(&bad) = mutable.iter().find(|&&i| i >= base.len()) {
        return Err(Error::InvalidArgument(format!("mutable index {bad} out of range")));
    }
    let mut v = base.clone();
    for &i in mutable {
        v.set(i, false);
    }
    let cleared = v.clone();
    for t in 0..budget {
        let (h, u) = expected_visible(params, v.as_slice(), hidden_samples, rng);
        observe(t, &v, &h);
        v = cleared.clone();
        for i in top_k(&u, mutable, t + 1) {
            v.set(i, true);
        }
    }
    Ok(v)
}

fn check_window_model(params: &RbmParams) -> Result<()> {
    if params.visible_units() != WINDOW_UNITS {
        return Err(Error::DimensionMismatch {
            expected: WINDOW_UNITS,
            found: params.visible_units(),
        });
    }
    Ok(())
}

/// Grows a two-measure window with exactly `budget` set cells.
pub fn compose_window(params: &RbmParams, budget: usize, rng: &mut Rng) -> Result<PianoRoll> {
    compose_window_observed(params, budget, 1, rng, |_, _, _| {})
}

pub fn compose_window_observed(
    params: &RbmParams,
    budget: usize,
    hidden_samples: usize,
    rng: &mut Rng,
    observe: impl FnMut(usize, &BinaryVec, &BinaryVec),
) -> Result<PianoRoll> {
    check_window_model(params)?;
    let all: Vec<usize> = (0..WINDOW_UNITS).collect();
    let v = grow_visible(
        params,
        &BinaryVec::zeros(WINDOW_UNITS),
        &all,
        budget,
        hidden_samples,
        rng,
        observe,
    )?;
    PianoRoll::from_visible(&v)
}

/// Flat indices of the right measure of a window.
pub fn right_half_indices() -> Vec<usize> {
    (0..PITCH_ROWS)
        .flat_map(|r| (MEASURE_COLUMNS..WINDOW_COLUMNS).map(move |c| r * WINDOW_COLUMNS + c))
        .collect()
}

/// `[prev_right ∥ silence]`, the starting point of an extension.
pub fn clamped_start(prev: &PianoRoll) -> Result<PianoRoll> {
    prev.check_window()?;
    Ok(prev
        .columns(MEASURE_COLUMNS, WINDOW_COLUMNS)
        .concat(&PianoRoll::empty(MEASURE_COLUMNS)))
}

/// Shifts `prev` left by one measure and fills the new right measure with
/// exactly `budget` cells, keeping the left measure fixed.
pub fn extend_window(params: &RbmParams, prev: &PianoRoll, budget: usize, rng: &mut Rng) -> Result<PianoRoll> {
    extend_window_observed(params, prev, budget, 1, rng, |_, _, _| {})
}

pub fn extend_window_observed(
    params: &RbmParams,
    prev: &PianoRoll,
    budget: usize,
    hidden_samples: usize,
    rng: &mut Rng,
    observe: impl FnMut(usize, &BinaryVec, &BinaryVec),
) -> Result<PianoRoll> {
    check_window_model(params)?;
    let start = clamped_start(prev)?.to_visible()?;
    let v = grow_visible(
        params,
        &start,
        &right_half_indices(),
        budget,
        hidden_samples,
        rng,
        observe,
    )?;
    PianoRoll::from_visible(&v)
}

/// Composes `2 + extensions` measures: one grown window, then one new
/// measure per extension.
pub fn compose_piece(params: &RbmParams, config: &ComposeConfig) -> Result<PianoRoll> {
    config.validate()?;
    let mut rng = Rng::new(config.seed);
    let mut window = compose_window_observed(
        params,
        config.initial_budget,
        config.hidden_samples,
        &mut rng,
        |_, _, _| {},
    )?;
    let mut strip = window.clone();
    for _ in 0..config.extensions {
        window = extend_window_observed(
            params,
            &window,
            config.extension_budget,
            config.hidden_samples,
            &mut rng,
            |_, _, _| {},
        )?;
        strip = strip.concat(&window.columns(MEASURE_COLUMNS, WINDOW_COLUMNS));
    }
    Ok(strip)
}
