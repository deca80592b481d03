//! Contrastive-divergence training, plus exact gradient and exact KL
//! divergence for models small enough to enumerate.

use std::time::Instant;

use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::rbm::{sample_unchecked, BinaryVec, ENUMERATION_LIMIT};
use crate::{Error, RbmParams, Result, Rng, VisibleState};

/// A gradient estimate (ΔW, Δb, Δc). Ascending it decreases the KL
/// divergence between the data and the model.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientTriple {
    pub weights: Vec<f64>,
    pub visible_bias: Vec<f64>,
    pub hidden_bias: Vec<f64>,
}

impl GradientTriple {
    pub fn zeros(visible: usize, hidden: usize) -> Self {
        Self {
            weights: vec![0.0; visible * hidden],
            visible_bias: vec![0.0; visible],
            hidden_bias: vec![0.0; hidden],
        }
    }

    fn iter(&self) -> impl Iterator<Item = &f64> {
        self.weights
            .iter()
            .chain(&self.visible_bias)
            .chain(&self.hidden_bias)
    }

    pub fn dot(&self, other: &GradientTriple) -> f64 {
        self.iter().zip(other.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn cosine_similarity(&self, other: &GradientTriple) -> f64 {
        self.dot(other) / (self.norm() * other.norm())
    }

    pub fn is_finite(&self) -> bool {
        self.iter().all(|x| x.is_finite())
    }

    /// `self += scale * other`.
    pub fn add_scaled(&mut self, other: &GradientTriple, scale: f64) {
        for (a, b) in self.weights.iter_mut().zip(&other.weights) {
            *a += scale * b;
        }
        for (a, b) in self.visible_bias.iter_mut().zip(&other.visible_bias) {
            *a += scale * b;
        }
        for (a, b) in self.hidden_bias.iter_mut().zip(&other.hidden_bias) {
            *a += scale * b;
        }
    }

    fn check_shape(&self, params: &RbmParams) -> Result<()> {
        let (d, p) = (params.visible_units(), params.hidden_units());
        for (expected, found) in [
            (d * p, self.weights.len()),
            (d, self.visible_bias.len()),
            (p, self.hidden_bias.len()),
        ] {
            if expected != found {
                return Err(Error::DimensionMismatch { expected, found });
            }
        }
        Ok(())
    }
}

/// Applies `θ ← θ + learning_rate · gradient`.
pub fn apply_gradient(params: &mut RbmParams, gradient: &GradientTriple, learning_rate: f64) -> Result<()> {
    gradient.check_shape(params)?;
    let (w, b, c) = params.parts_mut();
    w.par_iter_mut()
        .zip(gradient.weights.par_iter())
        .for_each(|(x, g)| *x += learning_rate * g);
    for (x, g) in b.iter_mut().zip(&gradient.visible_bias) {
        *x += learning_rate * g;
    }
    for (x, g) in c.iter_mut().zip(&gradient.hidden_bias) {
        *x += learning_rate * g;
    }
    if w.iter().chain(b.iter()).chain(c.iter()).any(|x| !x.is_finite()) {
        return Err(Error::Degenerate("parameter update produced a non-finite value".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub hidden_units: usize,
    pub cd_steps: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub weight_init_stddev: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            hidden_units: 1000,
            cd_steps: 1,
            learning_rate: 0.01,
            epochs: 50,
            batch_size: 64,
            seed: 0,
            weight_init_stddev: 0.01,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidArgument(msg.into()));
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate must be positive");
        }
        if self.batch_size == 0 {
            return bad("batch_size must be at least 1");
        }
        if self.cd_steps == 0 {
            return bad("cd_steps must be at least 1");
        }
        if self.hidden_units == 0 {
            return bad("hidden_units must be at least 1");
        }
        if !(self.weight_init_stddev >= 0.0 && self.weight_init_stddev.is_finite()) {
            return bad("weight_init_stddev must be nonnegative");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    /// Mean fraction of pixels where the one-step thresholded reconstruction
    /// disagrees with the training item.
    pub reconstruction_error: f64,
    /// Mean free energy of the monitor batch after the epoch.
    pub monitor_free_energy: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainReport {
    pub epochs: Vec<EpochRecord>,
}

struct ChainStats {
    hidden_data: Vec<f64>,
    visible_model: BinaryVec,
    hidden_model: Vec<f64>,
    mismatched: usize,
}

fn run_chain(params: &RbmParams, v: &[u8], k: usize, mut rng: Rng) -> ChainStats {
    let hidden_data = params.hidden_probs(v);
    let mut h = sample_unchecked(&hidden_data, &mut rng);
    let mut mismatched = 0;
    let mut visible_model = BinaryVec::zeros(v.len());
    let mut hidden_model = Vec::new();
    for step in 0..k {
        let pv = params.visible_probs(h.as_slice());
        if step == 0 {
            mismatched = pv
                .iter()
                .zip(v)
                .filter(|(p, &x)| u8::from(**p >= 0.5) != x)
                .count();
        }
        visible_model = sample_unchecked(&pv, &mut rng);
        hidden_model = params.hidden_probs(visible_model.as_slice());
        if step + 1 < k {
            h = sample_unchecked(&hidden_model, &mut rng);
        }
    }
    ChainStats {
        hidden_data,
        visible_model,
        hidden_model,
        mismatched,
    }
}

fn check_batch(params: &RbmParams, batch: &[VisibleState]) -> Result<()> {
    if batch.is_empty() {
        return Err(Error::EmptyBatch);
    }
    batch.iter().try_for_each(|v| params.check_visible(v))
}

/// CD-k gradient estimate, returning the mean reconstruction mismatch too.
fn cd_gradient_with_error(
    params: &RbmParams,
    batch: &[VisibleState],
    k: usize,
    rng: &mut Rng,
) -> Result<(GradientTriple, f64)> {
    check_batch(params, batch)?;
    if k == 0 {
        return Err(Error::InvalidArgument("CD needs k >= 1".into()));
    }
    let (d, p) = (params.visible_units(), params.hidden_units());
    let rngs: Vec<Rng> = batch.iter().map(|_| rng.fork()).collect();
    let stats: Vec<ChainStats> = batch
        .par_iter()
        .zip(rngs)
        .map(|(v, r)| run_chain(params, v.as_slice(), k, r))
        .collect();

    let n = batch.len() as f64;
    let mut grad = GradientTriple::zeros(d, p);
    grad.weights
        .par_chunks_mut(p)
        .enumerate()
        .for_each(|(i, row)| {
            for (v, s) in batch.iter().zip(&stats) {
                if v.as_slice()[i] == 1 {
                    row.iter_mut().zip(&s.hidden_data).for_each(|(g, x)| *g += x);
                }
                if s.visible_model.as_slice()[i] == 1 {
                    row.iter_mut().zip(&s.hidden_model).for_each(|(g, x)| *g -= x);
                }
            }
            row.iter_mut().for_each(|g| *g /= n);
        });
    for (v, s) in batch.iter().zip(&stats) {
        for (g, (&a, &b)) in grad
            .visible_bias
            .iter_mut()
            .zip(v.as_slice().iter().zip(s.visible_model.as_slice()))
        {
            *g += f64::from(a) - f64::from(b);
        }
        for (g, (a, b)) in grad
            .hidden_bias
            .iter_mut()
            .zip(s.hidden_data.iter().zip(&s.hidden_model))
        {
            *g += a - b;
        }
    }
    grad.visible_bias.iter_mut().for_each(|g| *g /= n);
    grad.hidden_bias.iter_mut().for_each(|g| *g /= n);

    let mismatch = stats.iter().map(|s| s.mismatched).sum::<usize>() as f64 / (n * d as f64);
    Ok((grad, mismatch))
}

/// CD-k gradient estimate over a minibatch.
///
/// The positive phase uses `p(h|v)` at the data; the negative phase runs a
/// k-step Gibbs chain from each item with sampled states and uses `p(h|v')`
/// at the chain's final visible sample. Items use forked generators so the
/// result does not depend on thread scheduling.
pub fn cd_gradient(params: &RbmParams, batch: &[VisibleState], k: usize, rng: &mut Rng) -> Result<GradientTriple> {
    cd_gradient_with_error(params, batch, k, rng).map(|(g, _)| g)
}

fn check_enumerable(params: &RbmParams) -> Result<()> {
    if params.visible_units() + params.hidden_units() > ENUMERATION_LIMIT {
        return Err(Error::TooLargeForEnumeration {
            visible: params.visible_units(),
            hidden: params.hidden_units(),
            limit: ENUMERATION_LIMIT,
        });
    }
    Ok(())
}

/// Adds `weight · (v p(h|v)ᵀ, v, p(h|v))` into `acc`.
fn accumulate_statistics(params: &RbmParams, v: &[u8], weight: f64, acc: &mut GradientTriple) {
    let p = params.hidden_units();
    let ph = params.hidden_probs(v);
    for (i, &bit) in v.iter().enumerate() {
        if bit == 1 {
            acc.visible_bias[i] += weight;
            for (g, x) in acc.weights[i * p..(i + 1) * p].iter_mut().zip(&ph) {
                *g += weight * x;
            }
        }
    }
    for (g, x) in acc.hidden_bias.iter_mut().zip(&ph) {
        *g += weight * x;
    }
}

/// Exact KL gradient: data expectation minus the model expectation under
/// the enumerated visible distribution.
pub fn exact_gradient(params: &RbmParams, data: &[VisibleState]) -> Result<GradientTriple> {
    check_enumerable(params)?;
    check_batch(params, data)?;
    let (d, p) = (params.visible_units(), params.hidden_units());
    let mut positive = GradientTriple::zeros(d, p);
    let w = 1.0 / data.len() as f64;
    for v in data {
        accumulate_statistics(params, v.as_slice(), w, &mut positive);
    }
    let mut negative = GradientTriple::zeros(d, p);
    for (vi, prob) in params.exact_visible_distribution()?.into_iter().enumerate() {
        let v = BinaryVec::from_index(vi as u64, d);
        accumulate_statistics(params, v.as_slice(), prob, &mut negative);
    }
    positive.add_scaled(&negative, -1.0);
    Ok(positive)
}

/// `KL[q ‖ p]` with q the empirical distribution of `data`.
pub fn exact_kl(params: &RbmParams, data: &[VisibleState]) -> Result<f64> {
    check_enumerable(params)?;
    check_batch(params, data)?;
    let log_z = params.log_partition()?;
    let mut counts: std::collections::BTreeMap<&[u8], usize> = Default::default();
    for v in data {
        *counts.entry(v.as_slice()).or_default() += 1;
    }
    let n = data.len() as f64;
    let kl = counts
        .into_iter()
        .map(|(v, c)| {
            let q = c as f64 / n;
            let log_p = -params.free_energy_unchecked(v) - log_z;
            q * (q.ln() - log_p)
        })
        .sum::<f64>();
    Ok(kl.max(0.0))
}

fn check_dataset(dataset: &[VisibleState]) -> Result<usize> {
    let first = dataset.first().ok_or(Error::EmptyBatch)?;
    let d = first.len();
    if let Some(bad) = dataset.iter().find(|v| v.len() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: bad.len(),
        });
    }
    Ok(d)
}

/// Trains a fresh model: W ~ Normal(0, σ²), b = c = 0, then CD-k epochs.
pub fn train(dataset: &[VisibleState], config: &TrainConfig) -> Result<(RbmParams, TrainReport)> {
    config.validate()?;
    let d = check_dataset(dataset)?;
    let mut init_rng = Rng::with_stream(config.seed, 0);
    let params = RbmParams::random(d, config.hidden_units, config.weight_init_stddev, &mut init_rng)?;
    train_from(params, dataset, None, config, |_| {})
}

/// Continues training `params`. `monitor` is the held-out batch whose mean
/// free energy is reported each epoch; without one the first batch of the
/// training data is used. `on_epoch` sees every record as it completes.
pub fn train_from(
    mut params: RbmParams,
    dataset: &[VisibleState],
    monitor: Option<&[VisibleState]>,
    config: &TrainConfig,
    mut on_epoch: impl FnMut(&EpochRecord),
) -> Result<(RbmParams, TrainReport)> {
    config.validate()?;
    let d = check_dataset(dataset)?;
    if d != params.visible_units() {
        return Err(Error::DimensionMismatch {
            expected: params.visible_units(),
            found: d,
        });
    }
    if config.hidden_units != params.hidden_units() {
        return Err(Error::DimensionMismatch {
            expected: params.hidden_units(),
            found: config.hidden_units,
        });
    }
    let monitor = match monitor {
        Some(m) => {
            check_batch(&params, m)?;
            m
        }
        None => &dataset[..config.batch_size.min(dataset.len())],
    };

    let mut rng = Rng::with_stream(config.seed, 1);
    let mut order: Vec<usize> = (0..dataset.len()).collect();
    let mut report = TrainReport::default();
    for epoch in 0..config.epochs {
        let start = Instant::now();
        order.shuffle(&mut rng);
        let mut mismatch_sum = 0.0;
        for chunk in order.chunks(config.batch_size) {
            let batch: Vec<VisibleState> = chunk.iter().map(|&i| dataset[i].clone()).collect();
            let (grad, mismatch) = cd_gradient_with_error(&params, &batch, config.cd_steps, &mut rng)?;
            apply_gradient(&mut params, &grad, config.learning_rate)?;
            mismatch_sum += mismatch * chunk.len() as f64;
        }
        let monitor_free_energy = monitor
            .iter()
            .map(|v| params.free_energy_unchecked(v.as_slice()))
            .sum::<f64>()
            / monitor.len() as f64;
        let record = EpochRecord {
            epoch,
            reconstruction_error: mismatch_sum / dataset.len() as f64,
            monitor_free_energy,
            seconds: start.elapsed().as_secs_f64(),
        };
        on_epoch(&record);
        report.epochs.push(record);
    }
    Ok((params, report))
}

/// Runs `k` Gibbs sweeps from `v`; the last visible layer is the thresholded
/// mean `p(v|h) ≥ 0.5 → 1` (an exact 0.5 counts as on).
pub fn reconstruct(params: &RbmParams, v: &VisibleState, k: usize, rng: &mut Rng) -> Result<VisibleState> {
    params.check_visible(v)?;
    if k == 0 {
        return Err(Error::InvalidArgument("reconstruction needs k >= 1".into()));
    }
    let mut state = v.clone();
    for step in 0..k {
        let h = sample_unchecked(&params.hidden_probs(state.as_slice()), rng);
        let pv = params.visible_probs(h.as_slice());
        state = if step + 1 == k {
            BinaryVec::threshold(&pv)
        } else {
            sample_unchecked(&pv, rng)
        };
    }
    Ok(state)
}
