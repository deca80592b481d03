//! Independent reference computations shared by the integration tests.
//! Everything here is written from the definitions with plain loops and
//! does not call into the library's own enumeration code.

#![allow(dead_code)]

use pianorbm::{BinaryVec, RbmParams, Rng};

pub fn bits(index: usize, len: usize) -> Vec<f64> {
    (0..len).map(|i| ((index >> i) & 1) as f64).collect()
}

pub fn energy(params: &RbmParams, v: &[f64], h: &[f64]) -> f64 {
    let (d, p) = (params.visible_units(), params.hidden_units());
    let mut e = 0.0;
    for i in 0..d {
        for j in 0..p {
            e -= v[i] * params.weight(i, j) * h[j];
        }
        e -= params.visible_bias()[i] * v[i];
    }
    for j in 0..p {
        e -= params.hidden_bias()[j] * h[j];
    }
    e
}

/// Joint Boltzmann weights `exp(-E(v, h))`, normalized, indexed `[v][h]`.
pub fn joint(params: &RbmParams) -> Vec<Vec<f64>> {
    let (d, p) = (params.visible_units(), params.hidden_units());
    let energies: Vec<Vec<f64>> = (0..1usize << d)
        .map(|a| (0..1usize << p).map(|b| energy(params, &bits(a, d), &bits(b, p))).collect())
        .collect();
    let lowest = energies.iter().flatten().copied().fold(f64::INFINITY, f64::min);
    let mut weights: Vec<Vec<f64>> = energies
        .iter()
        .map(|row| row.iter().map(|e| (lowest - e).exp()).collect())
        .collect();
    let z: f64 = weights.iter().flatten().sum();
    for row in &mut weights {
        for w in row.iter_mut() {
            *w /= z;
        }
    }
    weights
}

pub fn visible_marginals(params: &RbmParams) -> Vec<f64> {
    joint(params).iter().map(|row| row.iter().sum()).collect()
}

pub fn state_index(v: &[u8]) -> usize {
    v.iter().enumerate().map(|(i, &b)| (b as usize) << i).sum()
}

/// KL(data || model) over visible states.
pub fn kl(params: &RbmParams, data: &[BinaryVec]) -> f64 {
    let model = visible_marginals(params);
    let mut empirical = vec![0.0; model.len()];
    for v in data {
        empirical[state_index(v.as_slice())] += 1.0 / data.len() as f64;
    }
    empirical
        .iter()
        .zip(&model)
        .filter(|(q, _)| **q > 0.0)
        .map(|(q, m)| q * (q / m).ln())
        .sum()
}

/// `<v h>_data - <v h>_model` etc., flattened as weights, visible bias,
/// hidden bias.
pub fn log_likelihood_gradient(params: &RbmParams, data: &[BinaryVec]) -> Vec<f64> {
    let (d, p) = (params.visible_units(), params.hidden_units());
    let sigmoid = |x: f64| 1.0 / (1.0 + (-x).exp());
    let hidden_mean = |v: &[f64]| -> Vec<f64> {
        (0..p)
            .map(|j| sigmoid(params.hidden_bias()[j] + (0..d).map(|i| v[i] * params.weight(i, j)).sum::<f64>()))
            .collect()
    };
    let stats = |v: &[f64], h: &[f64], weight: f64, out: &mut [f64]| {
        for i in 0..d {
            for j in 0..p {
                out[i * p + j] += weight * v[i] * h[j];
            }
            out[d * p + i] += weight * v[i];
        }
        for j in 0..p {
            out[d * p + d + j] += weight * h[j];
        }
    };
    let mut positive = vec![0.0; d * p + d + p];
    for v in data {
        let v = v.to_f64();
        stats(&v, &hidden_mean(&v), 1.0 / data.len() as f64, &mut positive);
    }
    let mut negative = vec![0.0; d * p + d + p];
    for (a, row) in joint(params).iter().enumerate() {
        for (b, &w) in row.iter().enumerate() {
            stats(&bits(a, d), &bits(b, p), w, &mut negative);
        }
    }
    positive.iter().zip(&negative).map(|(x, y)| x - y).collect()
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (na * nb)
}

/// A model with weights and biases spread over [-scale, scale].
pub fn tiny_model(seed: u64, d: usize, p: usize, scale: f64) -> RbmParams {
    let mut rng = Rng::new(seed);
    let mut draw = |n: usize| -> Vec<f64> { (0..n).map(|_| scale * (2.0 * rng.uniform() - 1.0)).collect() };
    let w = draw(d * p);
    let b = draw(d);
    let c = draw(p);
    RbmParams::new(d, p, w, b, c).unwrap()
}

pub fn random_patterns(seed: u64, count: usize, d: usize) -> Vec<BinaryVec> {
    let mut rng = Rng::new(seed);
    (0..count)
        .map(|_| BinaryVec::new((0..d).map(|_| u8::from(rng.uniform() < 0.5)).collect()).unwrap())
        .collect()
}

/// Mean silhouette coefficient with Euclidean distances.
pub fn silhouette(points: &[[f64; 2]], labels: &[usize]) -> f64 {
    let dist = |a: &[f64; 2], b: &[f64; 2]| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
    let clusters = labels.iter().max().map_or(0, |m| m + 1);
    let mut total = 0.0;
    for (i, p) in points.iter().enumerate() {
        let mut sums = vec![0.0; clusters];
        let mut counts = vec![0usize; clusters];
        for (j, q) in points.iter().enumerate() {
            if i != j {
                sums[labels[j]] += dist(p, q);
                counts[labels[j]] += 1;
            }
        }
        let own = labels[i];
        if counts[own] == 0 {
            continue;
        }
        let a = sums[own] / counts[own] as f64;
        let b = (0..clusters)
            .filter(|&c| c != own && counts[c] > 0)
            .map(|c| sums[c] / counts[c] as f64)
            .fold(f64::INFINITY, f64::min);
        total += (b - a) / a.max(b);
    }
    total / points.len() as f64
}

/// Pixel F1 of `predicted` against `target`; two empty images score 1.
pub fn pixel_f1(target: &[u8], predicted: &[u8]) -> f64 {
    let hits = target.iter().zip(predicted).filter(|(t, p)| **t == 1 && **p == 1).count() as f64;
    let t = target.iter().filter(|&&x| x == 1).count() as f64;
    let p = predicted.iter().filter(|&&x| x == 1).count() as f64;
    if t + p == 0.0 {
        1.0
    } else {
        2.0 * hits / (t + p)
    }
}

/// Three isotropic Gaussian clusters in `dim` dimensions whose centres are
/// pairwise `separation` standard deviations apart.
pub fn gaussian_clusters(seed: u64, per_cluster: usize, dim: usize, separation: f64) -> (Vec<Vec<f64>>, Vec<usize>) {
    use rand_distr::{Distribution, StandardNormal};
    let mut rng = Rng::new(seed);
    let offset = separation / 2f64.sqrt();
    let mut points = Vec::new();
    let mut labels = Vec::new();
    for c in 0..3 {
        for _ in 0..per_cluster {
            let mut x: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
            x[c] += offset;
            points.push(x);
            labels.push(c);
        }
    }
    (points, labels)
}
