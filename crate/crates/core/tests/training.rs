mod common;

use common::{cosine, kl, log_likelihood_gradient, random_patterns, tiny_model};
use pianorbm::trainer::{apply_gradient, cd_gradient, exact_gradient, exact_kl, reconstruct, train, GradientTriple, TrainConfig};
use pianorbm::{BinaryVec, RbmParams, Rng};

fn flat(g: &GradientTriple) -> Vec<f64> {
    g.weights.iter().chain(&g.visible_bias).chain(&g.hidden_bias).copied().collect()
}

fn mean_cd(params: &RbmParams, data: &[BinaryVec], k: usize, seeds: u64) -> Vec<f64> {
    let mut total = GradientTriple::zeros(params.visible_units(), params.hidden_units());
    for seed in 0..seeds {
        let g = cd_gradient(params, data, k, &mut Rng::new(seed)).unwrap();
        total.add_scaled(&g, 1.0 / seeds as f64);
    }
    flat(&total)
}

#[test]
fn exact_routines_match_reference() {
    for seed in 0..5 {
        let params = tiny_model(seed, 5, 3, 1.0);
        let data = random_patterns(seed + 50, 3, 5);
        let library = flat(&exact_gradient(&params, &data).unwrap());
        let reference = log_likelihood_gradient(&params, &data);
        for (a, b) in library.iter().zip(&reference) {
            assert!((a - b).abs() < 1e-10);
        }
        assert!((exact_kl(&params, &data).unwrap() - kl(&params, &data)).abs() < 1e-10);
    }
}

#[test]
fn cd_gradient_approaches_exact_gradient() {
    let params = tiny_model(3, 6, 3, 0.5);
    let data = random_patterns(77, 2, 6);
    let exact = log_likelihood_gradient(&params, &data);
    let sims: Vec<f64> = [1, 5, 20].iter().map(|&k| cosine(&mean_cd(&params, &data, k, 10_000), &exact)).collect();
    assert!(sims[1] > 0.9, "{sims:?}");
    assert!(sims[0] <= sims[1] && sims[1] <= sims[2] + 1e-3, "{sims:?}");
}

#[test]
fn exact_gradient_ascent_decreases_kl_every_step() {
    let mut params = tiny_model(8, 6, 3, 0.5);
    let data = random_patterns(9, 2, 6);
    let mut previous = kl(&params, &data);
    for step in 0..500 {
        let g = exact_gradient(&params, &data).unwrap();
        apply_gradient(&mut params, &g, 0.05).unwrap();
        let current = kl(&params, &data);
        assert!(current < previous, "step {step}: {current} >= {previous}");
        previous = current;
    }
}

/// Eight 8 × 8 images: four horizontal and four vertical two-pixel bars.
fn bar_patterns() -> Vec<BinaryVec> {
    let mut out = Vec::new();
    for k in 0..4 {
        let mut rows = vec![0u8; 64];
        let mut cols = vec![0u8; 64];
        for r in 0..8 {
            for c in 0..8 {
                if r / 2 == k {
                    rows[r * 8 + c] = 1;
                }
                if c / 2 == k {
                    cols[r * 8 + c] = 1;
                }
            }
        }
        out.push(BinaryVec::new(rows).unwrap());
        out.push(BinaryVec::new(cols).unwrap());
    }
    out
}

fn toy_config(seed: u64) -> TrainConfig {
    TrainConfig {
        hidden_units: 16,
        cd_steps: 1,
        learning_rate: 0.05,
        epochs: 200,
        batch_size: 4,
        seed,
        weight_init_stddev: 0.01,
    }
}

#[test]
fn toy_patterns_are_learned() {
    let data: Vec<BinaryVec> = bar_patterns().into_iter().cycle().take(64).collect();
    let (params, report) = train(&data, &toy_config(1)).unwrap();
    let last = report.epochs.last().unwrap();
    assert!(last.reconstruction_error < 0.05, "{}", last.reconstruction_error);
    let first = report.epochs.first().unwrap();
    assert!(last.monitor_free_energy < first.monitor_free_energy);
    assert_eq!(params.visible_units(), 64);
}

#[test]
fn training_is_deterministic() {
    let data = bar_patterns();
    let config = TrainConfig {
        epochs: 5,
        ..toy_config(42)
    };
    let (a, _) = train(&data, &config).unwrap();
    let (b, _) = train(&data, &config).unwrap();
    assert_eq!(a, b);
    let (c, _) = train(&data, &TrainConfig { seed: 43, ..config }).unwrap();
    assert_ne!(a, c);
}

#[test]
fn single_pattern_is_reconstructed_exactly() {
    let pattern = bar_patterns().swap_remove(3);
    let data = vec![pattern.clone(); 16];
    let (params, _) = train(&data, &toy_config(7)).unwrap();
    let mut rng = Rng::new(0);
    for k in [1, 5] {
        assert_eq!(reconstruct(&params, &pattern, k, &mut rng).unwrap(), pattern);
    }
}
