//! Post-training analysis: energy statistics for input images, energy traces
//! during composition, hidden-layer embeddings, t-SNE projection and the
//! scale-tone overlap of transpositions.

mod tsne;

pub use tsne::{
    conditional_affinities, joint_affinities, tsne, tsne_with, ConditionalAffinities, TsneConfig, TsneOutput,
};

use std::fmt::Write as _;

use crate::composer::compose_window_observed;
use crate::pianoroll::PianoRoll;
use crate::rbm::sample_unchecked;
use crate::{Error, RbmParams, Result, Rng};

/// Independent hidden draws per image in the energy protocol.
pub const DEFAULT_ENERGY_SAMPLES: usize = 10;

/// Pitch classes of the major scale.
pub const MAJOR_SCALE: [i64; 7] = [0, 2, 4, 5, 7, 9, 11];

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyReport {
    pub label: String,
    pub mean_energy: f64,
    /// Sample standard deviation (n − 1 denominator).
    pub stddev: f64,
    pub samples: usize,
}

impl EnergyReport {
    pub fn labeled(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }
}

pub fn mean_and_stddev(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.max(0.0).sqrt())
}

/// Feeds the flattened window to the visible layer, draws `h ~ p(h|v)`
/// `samples` times and summarizes `E(v, h)`.
pub fn energy_protocol(params: &RbmParams, window: &PianoRoll, samples: usize, rng: &mut Rng) -> Result<EnergyReport> {
    if samples < 2 {
        return Err(Error::InvalidArgument("energy protocol needs at least 2 samples".into()));
    }
    let v = window.to_visible()?;
    params.check_visible(&v)?;
    let ph = params.hidden_probs(v.as_slice());
    let energies: Vec<f64> = (0..samples)
        .map(|_| {
            let h = sample_unchecked(&ph, rng);
            params.energy_unchecked(v.as_slice(), h.as_slice())
        })
        .collect();
    let (mean_energy, stddev) = mean_and_stddev(&energies);
    Ok(EnergyReport {
        label: String::new(),
        mean_energy,
        stddev,
        samples,
    })
}

/// Energy `E(v_t, h_t)` of the composition state after each of the `budget`
/// steps; entry `t - 1` belongs to the state with `t` set cells.
pub fn energy_trace(params: &RbmParams, budget: usize, rng: &mut Rng) -> Result<Vec<f64>> {
    let mut trace = Vec::with_capacity(budget);
    let last = compose_window_observed(params, budget, 1, rng, |t, v, h| {
        if t > 0 {
            trace.push(params.energy_unchecked(v.as_slice(), h.as_slice()));
        }
    })?;
    if budget > 0 {
        let v = last.to_visible()?;
        let h = sample_unchecked(&params.hidden_probs(v.as_slice()), rng);
        trace.push(params.energy_unchecked(v.as_slice(), h.as_slice()));
    }
    Ok(trace)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EmbeddingMode {
    /// `p(h | v)`, deterministic.
    #[default]
    Probabilities,
    /// One binary draw `h ~ p(h | v)`.
    Sampled,
}

pub fn hidden_embedding(params: &RbmParams, window: &PianoRoll, mode: EmbeddingMode, rng: &mut Rng) -> Result<Vec<f64>> {
    let v = window.to_visible()?;
    let probs = params.hidden_conditional(&v)?;
    Ok(match mode {
        EmbeddingMode::Probabilities => probs,
        EmbeddingMode::Sampled => sample_unchecked(&probs, rng).to_f64(),
    })
}

pub fn cosine_similarity(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (na * nb)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingItem {
    pub label: String,
    pub activation: Vec<f64>,
    pub projection: Option<[f64; 2]>,
}

/// Labeled hidden activations, optionally with their 2-D projections.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EmbeddingSet {
    pub items: Vec<EmbeddingItem>,
}

impl EmbeddingSet {
    pub fn push(&mut self, label: impl Into<String>, activation: Vec<f64>) -> Result<()> {
        if let Some(first) = self.items.first() {
            if first.activation.len() != activation.len() {
                return Err(Error::DimensionMismatch {
                    expected: first.activation.len(),
                    found: activation.len(),
                });
            }
        }
        self.items.push(EmbeddingItem {
            label: label.into(),
            activation,
            projection: None,
        });
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Runs t-SNE over the activations and stores the projections.
    pub fn project(&mut self, config: &TsneConfig) -> Result<TsneOutput> {
        let points: Vec<Vec<f64>> = self.items.iter().map(|it| it.activation.clone()).collect();
        let out = tsne_with(&points, config)?;
        for (item, y) in self.items.iter_mut().zip(&out.embedding) {
            item.projection = Some(*y);
        }
        Ok(out)
    }

    /// Tab-separated `label, a_1, ..., a_P` rows.
    pub fn activations_tsv(&self) -> String {
        let mut out = String::new();
        for item in &self.items {
            out.push_str(&item.label);
            for a in &item.activation {
                write!(out, "\t{a}").expect("write to string");
            }
            out.push('\n');
        }
        out
    }

    /// Tab-separated `label, x, y` rows with a header line.
    pub fn projections_tsv(&self) -> String {
        let mut out = String::from("label\tx\ty\n");
        for item in &self.items {
            if let Some([x, y]) = item.projection {
                writeln!(out, "{}\t{x}\t{y}", item.label).expect("write to string");
            }
        }
        out
    }
}

/// Pitch classes shared by the major scale and its transposition by `shift`
/// semitones.
pub fn scale_overlap(shift: i64) -> usize {
    MAJOR_SCALE
        .iter()
        .filter(|&&pc| MAJOR_SCALE.contains(&(pc + shift).rem_euclid(12)))
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pianoroll::WINDOW_UNITS;

    #[test]
    fn scale_overlap_values() {
        assert_eq!(scale_overlap(0), 7);
        assert_eq!(scale_overlap(1), 2);
        assert_eq!(scale_overlap(-1), 2);
        assert_eq!(scale_overlap(2), 5);
        assert_eq!(scale_overlap(-2), 5);
        assert_eq!(scale_overlap(7), 6);
        for s in -30..30 {
            assert_eq!(scale_overlap(s), scale_overlap(-s));
            assert_eq!(scale_overlap(s), scale_overlap(s.rem_euclid(12)));
        }
    }

    #[test]
    fn energy_protocol_zero_params() {
        let params = RbmParams::zeros(WINDOW_UNITS, 5).unwrap();
        let r = energy_protocol(&params, &PianoRoll::empty_window(), 10, &mut Rng::new(0)).unwrap();
        assert_eq!(r.mean_energy, 0.0);
        assert_eq!(r.stddev, 0.0);
        assert_eq!(r.samples, DEFAULT_ENERGY_SAMPLES);
        assert!(energy_protocol(&params, &PianoRoll::empty_window(), 1, &mut Rng::new(0)).is_err());
        assert!(energy_protocol(&params, &PianoRoll::empty(96), 3, &mut Rng::new(0)).is_err());
    }

    #[test]
    fn energy_protocol_deterministic_conditionals() {
        // Saturated hidden biases: h is fixed, so every draw gives the same energy.
        let mut params = RbmParams::zeros(WINDOW_UNITS, 2).unwrap();
        params.parts_mut().2.copy_from_slice(&[900.0, -900.0]);
        params.parts_mut().1[0] = 0.25;
        let mut w = PianoRoll::empty_window();
        w.set(0, 0, true);
        let r = energy_protocol(&params, &w, 5, &mut Rng::new(1)).unwrap();
        assert_eq!(r.mean_energy, -0.25 - 900.0);
        assert_eq!(r.stddev, 0.0);
    }

    #[test]
    fn energy_trace_length() {
        let params = RbmParams::random(WINDOW_UNITS, 3, 0.1, &mut Rng::new(2)).unwrap();
        assert_eq!(energy_trace(&params, 1, &mut Rng::new(0)).unwrap().len(), 1);
        assert_eq!(energy_trace(&params, 25, &mut Rng::new(0)).unwrap().len(), 25);
        assert!(energy_trace(&params, 0, &mut Rng::new(0)).unwrap().is_empty());
    }

    #[test]
    fn embeddings() {
        let params = RbmParams::zeros(WINDOW_UNITS, 4).unwrap();
        let w = PianoRoll::empty_window();
        let e = hidden_embedding(&params, &w, EmbeddingMode::Probabilities, &mut Rng::new(0)).unwrap();
        assert_eq!(e, vec![0.5; 4]);
        let s = hidden_embedding(&params, &w, EmbeddingMode::Sampled, &mut Rng::new(0)).unwrap();
        assert!(s.iter().all(|&x| x == 0.0 || x == 1.0));
    }

    #[test]
    fn embedding_set_export() {
        let mut set = EmbeddingSet::default();
        set.push("a", vec![0.0, 1.0]).unwrap();
        set.push("b", vec![1.0, 0.0]).unwrap();
        set.push("c", vec![1.0, 1.0]).unwrap();
        assert!(set.push("d", vec![1.0]).is_err());
        assert_eq!(set.activations_tsv(), "a\t0\t1\nb\t1\t0\nc\t1\t1\n");
        set.project(&TsneConfig {
            perplexity: 1.5,
            iterations: 50,
            ..TsneConfig::default()
        })
        .unwrap();
        let tsv = set.projections_tsv();
        assert_eq!(tsv.lines().count(), 4);
        assert!(tsv.lines().nth(1).unwrap().starts_with("a\t"));
    }
}
