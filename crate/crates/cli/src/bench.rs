//! Training-time benchmark: one CD-1 epoch over binarized 28 × 28 images
//! per (hidden units, threads) configuration.

use std::path::Path;
use std::time::Instant;

use pianorbm::score_io::{parse_idx, GrayImage};
use pianorbm::synth::digit_images;
use pianorbm::trainer::{train, TrainConfig};
use pianorbm::BinaryVec;

use crate::error::{CliError, CliResult};

pub const MNIST_TRAIN_IMAGES: usize = 60_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchRow {
    pub hidden_units: usize,
    pub threads: usize,
    pub seconds_per_epoch: f64,
}

pub fn binarize(image: &GrayImage, threshold: u8) -> BinaryVec {
    BinaryVec::new(image.pixels().iter().map(|&p| u8::from(p >= threshold)).collect()).expect("bits are 0 or 1")
}

/// Where the benchmark images came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BenchSource {
    Idx(String),
    /// Generated digit glyphs of MNIST's shape.
    StandIn,
}

/// Images from `idx` when given and present, else `limit` generated
/// stand-ins (the MNIST training-set size when `limit` is `None`).
pub fn bench_images(idx: Option<&Path>, limit: Option<usize>, seed: u64) -> CliResult<(Vec<BinaryVec>, BenchSource)> {
    match idx.filter(|p| p.exists()) {
        Some(path) => {
            let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
            let images = parse_idx(&bytes).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
            let take = limit.unwrap_or(images.len()).min(images.len());
            if take == 0 {
                return Err(CliError::Data(format!("{}: no images", path.display())));
            }
            Ok((
                images[..take].iter().map(|im| binarize(im, 128)).collect(),
                BenchSource::Idx(path.display().to_string()),
            ))
        }
        None => {
            let count = limit.unwrap_or(MNIST_TRAIN_IMAGES).max(1);
            Ok((
                digit_images(seed, count).iter().map(|im| binarize(im, 128)).collect(),
                BenchSource::StandIn,
            ))
        }
    }
}

/// Times one training epoch for every (hidden units, threads) pair, in
/// that nesting order.
pub fn run_bench(data: &[BinaryVec], hidden_counts: &[usize], threads: &[usize], base: &TrainConfig) -> CliResult<Vec<BenchRow>> {
    let mut rows = Vec::new();
    for &hidden_units in hidden_counts {
        for &t in threads {
            if t == 0 {
                return Err(CliError::Usage("thread count must be at least 1".into()));
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| CliError::Internal(format!("thread pool: {e}")))?;
            let config = TrainConfig {
                hidden_units,
                epochs: 1,
                ..base.clone()
            };
            let start = Instant::now();
            pool.install(|| train(data, &config))?;
            rows.push(BenchRow {
                hidden_units,
                threads: t,
                seconds_per_epoch: start.elapsed().as_secs_f64(),
            });
        }
    }
    Ok(rows)
}
