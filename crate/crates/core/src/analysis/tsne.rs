//! Exact t-SNE: per-point Gaussian bandwidths matched to a target
//! perplexity, symmetrized affinities, Student-t output kernel, and gradient
//! descent with momentum, per-parameter gains and early exaggeration.

use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::{Error, Result, Rng};

#[derive(Debug, Clone, PartialEq)]
pub struct TsneConfig {
    pub perplexity: f64,
    pub iterations: usize,
    pub seed: u64,
    pub learning_rate: f64,
    pub early_exaggeration: f64,
    /// Iterations run with exaggerated affinities and the initial momentum.
    pub exaggeration_iterations: usize,
    pub initial_momentum: f64,
    pub final_momentum: f64,
    /// Tolerance on the achieved perplexity of each bandwidth search.
    pub perplexity_tolerance: f64,
}

impl Default for TsneConfig {
    fn default() -> Self {
        Self {
            perplexity: 30.0,
            iterations: 1000,
            seed: 0,
            learning_rate: 200.0,
            early_exaggeration: 12.0,
            exaggeration_iterations: 250,
            initial_momentum: 0.5,
            final_momentum: 0.8,
            perplexity_tolerance: 1e-5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TsneOutput {
    pub embedding: Vec<[f64; 2]>,
    /// `(iteration, KL(P‖Q))`, sampled every 50 iterations and at the end.
    pub kl_trace: Vec<(usize, f64)>,
}

/// Row-stochastic conditional affinities `p(j|i)` (n × n, zero diagonal) and
/// the perplexity each row achieved.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalAffinities {
    pub n: usize,
    pub probabilities: Vec<f64>,
    pub achieved_perplexity: Vec<f64>,
}

fn squared_distances(points: &[Vec<f64>]) -> Vec<f64> {
    let n = points.len();
    let mut d = vec![0.0; n * n];
    d.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
        for (j, out) in row.iter_mut().enumerate() {
            *out = points[i]
                .iter()
                .zip(&points[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
        }
    });
    d
}

fn check_points(points: &[Vec<f64>], perplexity: f64) -> Result<()> {
    let n = points.len();
    if n < 3 {
        return Err(Error::InvalidArgument(format!("t-SNE needs at least 3 points, got {n}")));
    }
    if !(perplexity > 0.0 && perplexity < n as f64) {
        return Err(Error::InvalidArgument(format!(
            "perplexity {perplexity} must lie in (0, {n})"
        )));
    }
    let dim = points[0].len();
    if let Some(bad) = points.iter().find(|p| p.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: bad.len(),
        });
    }
    if points.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("points must be finite".into()));
    }
    if points.iter().all(|p| p == &points[0]) {
        return Err(Error::Degenerate("all input points are identical".into()));
    }
    Ok(())
}

/// Entropy (nats) and normalized row for precision `beta` over shifted
/// squared distances.
fn row_entropy(dist: &[f64], i: usize, beta: f64, row: &mut [f64]) -> f64 {
    let mut sum = 0.0;
    for (j, (p, &d)) in row.iter_mut().zip(dist).enumerate() {
        *p = if j == i { 0.0 } else { (-beta * d).exp() };
        sum += *p;
    }
    let mut weighted = 0.0;
    for (p, &d) in row.iter_mut().zip(dist) {
        *p /= sum;
        weighted += *p * d;
    }
    sum.ln() + beta * weighted
}

/// Binary search for each point's precision so that the conditional
/// distribution has the requested perplexity.
pub fn conditional_affinities(points: &[Vec<f64>], perplexity: f64, tolerance: f64) -> Result<ConditionalAffinities> {
    check_points(points, perplexity)?;
    let n = points.len();
    let dist = squared_distances(points);
    let target = perplexity.ln();
    let mut probabilities = vec![0.0; n * n];
    let mut achieved = vec![0.0; n];
    probabilities
        .par_chunks_mut(n)
        .zip(achieved.par_iter_mut())
        .enumerate()
        .for_each(|(i, (row, perp))| {
            // Shift by the nearest neighbour so one term is exp(0).
            let min = (0..n)
                .filter(|&j| j != i)
                .map(|j| dist[i * n + j])
                .fold(f64::INFINITY, f64::min);
            let shifted: Vec<f64> = dist[i * n..(i + 1) * n].iter().map(|d| (d - min).max(0.0)).collect();
            // All neighbours equidistant: every precision gives the same row.
            let scale = shifted.iter().copied().fold(0.0, f64::max);
            let (mut lo, mut hi) = (0.0f64, f64::INFINITY);
            let mut beta = if scale > 0.0 { 1.0 / scale } else { 1.0 };
            let mut h = row_entropy(&shifted, i, beta, row);
            for _ in 0..500 {
                if scale == 0.0 || (h.exp() - perplexity).abs() < tolerance {
                    break;
                }
                if h > target {
                    lo = beta;
                    beta = if hi.is_finite() { 0.5 * (lo + hi) } else { beta * 2.0 };
                } else {
                    hi = beta;
                    beta = 0.5 * (lo + hi);
                }
                h = row_entropy(&shifted, i, beta, row);
            }
            *perp = h.exp();
        });
    Ok(ConditionalAffinities {
        n,
        probabilities,
        achieved_perplexity: achieved,
    })
}

/// Symmetrized joint affinities `P = (P_cond + P_condᵀ) / 2n`.
pub fn joint_affinities(conditional: &ConditionalAffinities) -> Vec<f64> {
    let n = conditional.n;
    let p = &conditional.probabilities;
    let mut joint = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            joint[i * n + j] = (p[i * n + j] + p[j * n + i]) / (2.0 * n as f64);
        }
    }
    joint
}

fn kl_divergence(p: &[f64], y: &[[f64; 2]]) -> f64 {
    let n = y.len();
    let mut num = vec![0.0; n * n];
    let mut z = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let dx = y[i][0] - y[j][0];
                let dy = y[i][1] - y[j][1];
                num[i * n + j] = 1.0 / (1.0 + dx * dx + dy * dy);
                z += num[i * n + j];
            }
        }
    }
    p.iter()
        .zip(&num)
        .filter(|(&pij, _)| pij > 0.0)
        .map(|(&pij, &q)| pij * (pij / (q / z).max(f64::MIN_POSITIVE)).ln())
        .sum()
}

pub fn tsne(points: &[Vec<f64>], perplexity: f64, iterations: usize, seed: u64) -> Result<Vec<[f64; 2]>> {
    let config = TsneConfig {
        perplexity,
        iterations,
        seed,
        ..TsneConfig::default()
    };
    tsne_with(points, &config).map(|out| out.embedding)
}

pub fn tsne_with(points: &[Vec<f64>], config: &TsneConfig) -> Result<TsneOutput> {
    let conditional = conditional_affinities(points, config.perplexity, config.perplexity_tolerance)?;
    let p = joint_affinities(&conditional);
    let n = points.len();

    let mut rng = Rng::new(config.seed);
    let init = Normal::new(0.0, 1e-4).expect("valid normal");
    let mut y: Vec<[f64; 2]> = (0..n).map(|_| [init.sample(&mut rng), init.sample(&mut rng)]).collect();
    let mut update = vec![[0.0; 2]; n];
    let mut gains = vec![[1.0f64; 2]; n];
    let mut kl_trace = Vec::new();

    for iter in 0..config.iterations {
        let exaggerate = iter < config.exaggeration_iterations;
        let scale = if exaggerate { config.early_exaggeration } else { 1.0 };
        let momentum = if exaggerate {
            config.initial_momentum
        } else {
            config.final_momentum
        };

        // Student-t numerators and their normalizer.
        let num: Vec<f64> = (0..n * n)
            .into_par_iter()
            .map(|k| {
                let (i, j) = (k / n, k % n);
                if i == j {
                    return 0.0;
                }
                let dx = y[i][0] - y[j][0];
                let dy = y[i][1] - y[j][1];
                1.0 / (1.0 + dx * dx + dy * dy)
            })
            .collect();
        let z: f64 = num.iter().sum();
        let grad: Vec<[f64; 2]> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut g = [0.0; 2];
                for j in 0..n {
                    let w = (scale * p[i * n + j] - num[i * n + j] / z) * num[i * n + j];
                    g[0] += 4.0 * w * (y[i][0] - y[j][0]);
                    g[1] += 4.0 * w * (y[i][1] - y[j][1]);
                }
                g
            })
            .collect();

        for i in 0..n {
            for d in 0..2 {
                let same_sign = (grad[i][d] > 0.0) == (update[i][d] > 0.0);
                gains[i][d] = if same_sign {
                    (gains[i][d] * 0.8).max(0.01)
                } else {
                    gains[i][d] + 0.2
                };
                update[i][d] = momentum * update[i][d] - config.learning_rate * gains[i][d] * grad[i][d];
                y[i][d] += update[i][d];
            }
        }
        let mean = y.iter().fold([0.0; 2], |m, p| [m[0] + p[0], m[1] + p[1]]);
        for p in &mut y {
            p[0] -= mean[0] / n as f64;
            p[1] -= mean[1] / n as f64;
        }
        if (iter + 1) % 50 == 0 || iter + 1 == config.iterations {
            kl_trace.push((iter + 1, kl_divergence(&p, &y)));
        }
    }
    if y.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::Degenerate("t-SNE diverged".into()));
    }
    Ok(TsneOutput {
        embedding: y,
        kl_trace,
    })
}
