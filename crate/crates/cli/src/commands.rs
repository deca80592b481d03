//! The subcommands, as library functions returning a printable summary.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use pianorbm::analysis::{energy_protocol, hidden_embedding, EmbeddingMode, EmbeddingSet, TsneConfig};
use pianorbm::composer::{compose_piece, ComposeConfig};
use pianorbm::pianoroll::{augment_with_report, roll_to_score, write_pbm};
use pianorbm::score_io::{parse_midi_with_report, write_midi};
use pianorbm::trainer::{reconstruct, train, train_from, TrainConfig};
use pianorbm::{RollDataset, Rng};
use serde_json::{json, Value};

use crate::bench::{bench_images, run_bench, BenchSource};
use crate::checkpoint;
use crate::error::{CliError, CliResult};
use crate::inputs::load_windows;
use crate::manifest::{format_manifest, load_dataset, ManifestEntry};

/// What a command reports: human-readable text, the same facts as JSON, and
/// non-fatal warnings.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub json: Value,
    pub warnings: Vec<String>,
}

impl Outcome {
    fn new(text: String, json: Value) -> Self {
        Self {
            text,
            json,
            warnings: Vec::new(),
        }
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    std::fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

fn is_midi(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("mid") || e.eq_ignore_ascii_case("midi"))
}

/// MIDI files → 4/4 filter → windows → transpositions → PBM files and a
/// manifest. Windows go to `windows/` beside the manifest.
pub fn ingest(midi_dir: &Path, manifest: &Path, shifts: &[i32]) -> CliResult<Outcome> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(midi_dir)
        .map_err(|e| CliError::io(midi_dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && is_midi(p))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(CliError::Data(format!("{}: no MIDI files", midi_dir.display())));
    }

    let mut warnings = Vec::new();
    let mut dataset = RollDataset::new();
    let (mut accepted, mut not_common_time, mut unreadable, mut dropped_notes) = (0usize, 0usize, 0usize, 0usize);
    for path in &files {
        let name = path.file_name().expect("read_dir entries have names").to_string_lossy().into_owned();
        let parsed = std::fs::read(path)
            .map_err(|e| e.to_string())
            .and_then(|bytes| parse_midi_with_report(&bytes).map_err(|e| e.to_string()));
        let (score, _) = match parsed {
            Ok(s) => s,
            Err(e) => {
                warnings.push(format!("skipping {name}: {e}"));
                unreadable += 1;
                continue;
            }
        };
        if !score.is_common_time() {
            warnings.push(format!("skipping {name}: not in 4/4"));
            not_common_time += 1;
            continue;
        }
        let (windows, report) = RollDataset::from_score(&name, &score)?;
        dropped_notes += report.dropped_out_of_range;
        accepted += 1;
        dataset.extend(windows);
    }
    if dataset.is_empty() {
        return Err(CliError::Data(if accepted == 0 && not_common_time > 0 {
            "no 4/4 input".to_string()
        } else {
            "no windows produced".to_string()
        }));
    }
    let originals = dataset.len();
    let (augmented, aug_report) = augment_with_report(&dataset, shifts);

    let base = manifest.parent().unwrap_or(Path::new(""));
    let mut entries = Vec::with_capacity(augmented.len());
    for (i, (window, source)) in augmented.iter().enumerate() {
        let relative = PathBuf::from("windows").join(format!("{i:06}.pbm"));
        write_file(&base.join(&relative), &write_pbm(window))?;
        entries.push(ManifestEntry {
            path: relative,
            source: source.clone(),
        });
    }
    write_file(manifest, format_manifest(&entries).as_bytes())?;

    let text = format!(
        "files accepted {accepted}, rejected {} ({not_common_time} not 4/4, {unreadable} unreadable)\n\
         windows {} ({originals} original, {} transposed), rejected transpositions {}\n\
         notes outside C1-B6 dropped {dropped_notes}\n",
        not_common_time + unreadable,
        augmented.len(),
        augmented.len() - originals,
        aug_report.rejected,
    );
    let json = json!({
        "command": "ingest",
        "manifest": manifest.display().to_string(),
        "files_accepted": accepted,
        "files_rejected": not_common_time + unreadable,
        "files_not_common_time": not_common_time,
        "files_unreadable": unreadable,
        "windows": augmented.len(),
        "original_windows": originals,
        "rejected_transpositions": aug_report.rejected,
        "dropped_notes": dropped_notes,
    });
    Ok(Outcome { text, json, warnings })
}

pub const REPORT_HEADER: &str = "epoch\treconstruction_error\tmonitor_free_energy\tseconds";

/// Trains on the manifest's windows and writes the checkpoint and a
/// per-epoch report. With `resume`, training continues from an existing
/// checkpoint (whose hidden-unit count wins).
pub fn train_cmd(
    manifest: &Path,
    checkpoint_path: &Path,
    report_path: &Path,
    config: &TrainConfig,
    resume: bool,
) -> CliResult<Outcome> {
    let dataset = load_dataset(manifest)?;
    if dataset.is_empty() {
        return Err(CliError::Data(format!("{}: manifest lists no windows", manifest.display())));
    }
    let data = dataset.visible_states();
    let resumed = resume && checkpoint_path.exists();
    let (params, report, config) = if resumed {
        let start = checkpoint::load(checkpoint_path)?;
        let config = TrainConfig {
            hidden_units: start.hidden_units(),
            ..config.clone()
        };
        let (p, r) = train_from(start, &data, None, &config, |_| {})?;
        (p, r, config)
    } else {
        let (p, r) = train(&data, config)?;
        (p, r, config.clone())
    };
    checkpoint::save(checkpoint_path, &params)?;

    let mut tsv = format!("{REPORT_HEADER}\n");
    for e in &report.epochs {
        writeln!(tsv, "{}\t{}\t{}\t{}", e.epoch, e.reconstruction_error, e.monitor_free_energy, e.seconds)
            .expect("write to string");
    }
    write_file(report_path, tsv.as_bytes())?;

    let last = report.epochs.last();
    let mut text = format!(
        "trained D = {}, P = {} on {} windows for {} epochs{}\n",
        params.visible_units(),
        params.hidden_units(),
        data.len(),
        config.epochs,
        if resumed { " (resumed)" } else { "" }
    );
    if let Some(e) = last {
        writeln!(
            text,
            "final reconstruction error {:.5}, monitor free energy {:.3}",
            e.reconstruction_error, e.monitor_free_energy
        )
        .expect("write to string");
    }
    let json = json!({
        "command": "train",
        "checkpoint": checkpoint_path.display().to_string(),
        "report": report_path.display().to_string(),
        "windows": data.len(),
        "visible_units": params.visible_units(),
        "hidden_units": params.hidden_units(),
        "epochs": config.epochs,
        "resumed": resumed,
        "final_reconstruction_error": last.map(|e| e.reconstruction_error),
        "final_monitor_free_energy": last.map(|e| e.monitor_free_energy),
        "seconds": report.epochs.iter().map(|e| e.seconds).sum::<f64>(),
    });
    Ok(Outcome::new(text, json))
}

/// Writes `<prefix>.pbm` and `<prefix>.mid`.
pub fn compose_cmd(checkpoint_path: &Path, config: &ComposeConfig, out_prefix: &Path) -> CliResult<Outcome> {
    let params = checkpoint::load(checkpoint_path)?;
    let strip = compose_piece(&params, config)?;
    let score = roll_to_score(&strip);
    let midi = write_midi(&score)?;
    let pbm_path = out_prefix.with_extension("pbm");
    let midi_path = out_prefix.with_extension("mid");
    write_file(&pbm_path, &write_pbm(&strip))?;
    write_file(&midi_path, &midi)?;
    let text = format!(
        "{} measures, {} set cells, {} notes\nwrote {} and {}\n",
        strip.measures(),
        strip.count_ones(),
        score.notes.len(),
        pbm_path.display(),
        midi_path.display()
    );
    let json = json!({
        "command": "compose",
        "pbm": pbm_path.display().to_string(),
        "midi": midi_path.display().to_string(),
        "width": strip.width(),
        "measures": strip.measures(),
        "set_cells": strip.count_ones(),
        "notes": score.notes.len(),
        "seed": config.seed,
    });
    Ok(Outcome::new(text, json))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PixelScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Precision, recall and F1 of `predicted` against `target`. With no set
/// cells anywhere every score is 1; otherwise an empty side scores 0.
pub fn pixel_scores(target: &[u8], predicted: &[u8]) -> PixelScores {
    let hits = target.iter().zip(predicted).filter(|(t, p)| **t == 1 && **p == 1).count() as f64;
    let t = target.iter().filter(|&&x| x == 1).count() as f64;
    let p = predicted.iter().filter(|&&x| x == 1).count() as f64;
    if t + p == 0.0 {
        return PixelScores {
            precision: 1.0,
            recall: 1.0,
            f1: 1.0,
        };
    }
    let ratio = |num: f64, den: f64| if den == 0.0 { 0.0 } else { num / den };
    PixelScores {
        precision: ratio(hits, p),
        recall: ratio(hits, t),
        f1: 2.0 * hits / (t + p),
    }
}

pub struct ReconstructArgs<'a> {
    pub checkpoint: &'a Path,
    pub input: &'a Path,
    pub k: usize,
    pub out: &'a Path,
    pub seed: u64,
    pub index: usize,
    pub threshold: u8,
}

pub fn reconstruct_cmd(args: &ReconstructArgs) -> CliResult<Outcome> {
    if args.k == 0 {
        return Err(CliError::Usage("k must be at least 1".into()));
    }
    let params = checkpoint::load(args.checkpoint)?;
    let mut inputs = load_windows(args.input, args.index + 1, args.threshold)?;
    if args.index >= inputs.len() {
        return Err(CliError::Data(format!(
            "{}: image {} requested, {} available",
            args.input.display(),
            args.index,
            inputs.len()
        )));
    }
    let item = inputs.swap_remove(args.index);
    let v = item.window.to_visible()?;
    let out = reconstruct(&params, &v, args.k, &mut Rng::new(args.seed))?;
    let roll = pianorbm::PianoRoll::from_visible(&out)?;
    write_file(args.out, &write_pbm(&roll))?;
    let s = pixel_scores(v.as_slice(), out.as_slice());
    let text = format!(
        "{}: precision {:.4} recall {:.4} F1 {:.4}\nwrote {}\n",
        item.label,
        s.precision,
        s.recall,
        s.f1,
        args.out.display()
    );
    let json = json!({
        "command": "reconstruct",
        "input": item.label,
        "output": args.out.display().to_string(),
        "k": args.k,
        "precision": s.precision,
        "recall": s.recall,
        "f1": s.f1,
    });
    Ok(Outcome::new(text, json))
}

pub const ENERGY_HEADER: &str = "label\tmean\tstddev";

/// Energy table over every window in `inputs`, lowest mean first.
pub fn energy_cmd(
    checkpoint_path: &Path,
    inputs: &[PathBuf],
    samples: usize,
    seed: u64,
    idx_limit: usize,
    threshold: u8,
) -> CliResult<Outcome> {
    if inputs.is_empty() {
        return Err(CliError::Usage("no input images".into()));
    }
    let params = checkpoint::load(checkpoint_path)?;
    let mut rng = Rng::new(seed);
    let mut rows = Vec::new();
    for path in inputs {
        for item in load_windows(path, idx_limit, threshold)? {
            let report = energy_protocol(&params, &item.window, samples, &mut rng)?;
            rows.push((item.label, report.mean_energy, report.stddev));
        }
    }
    rows.sort_by(|a, b| a.1.total_cmp(&b.1));
    let mut text = format!("{ENERGY_HEADER}\n");
    for (label, mean, std) in &rows {
        writeln!(text, "{label}\t{mean}\t{std}").expect("write to string");
    }
    let json = json!({
        "command": "energy",
        "samples": samples,
        "rows": rows.iter().map(|(l, m, s)| json!({"label": l, "mean": m, "stddev": s})).collect::<Vec<_>>(),
    });
    Ok(Outcome::new(text, json))
}

pub struct EmbedArgs<'a> {
    pub checkpoint: &'a Path,
    pub manifest: &'a Path,
    pub out: &'a Path,
    pub activations: Option<&'a Path>,
    pub tsne: TsneConfig,
    pub mode: EmbeddingMode,
}

/// Label used for a manifest window in embedding exports.
pub fn window_label(source: &pianorbm::pianoroll::WindowSource) -> String {
    format!("{}:{}:{:+}", source.source, source.measure, source.shift)
}

pub fn embed_cmd(args: &EmbedArgs) -> CliResult<Outcome> {
    let params = checkpoint::load(args.checkpoint)?;
    let dataset = load_dataset(args.manifest)?;
    if dataset.len() < 3 {
        return Err(CliError::Data(format!(
            "embedding needs at least 3 windows, manifest has {}",
            dataset.len()
        )));
    }
    let mut rng = Rng::new(args.tsne.seed);
    let mut set = EmbeddingSet::default();
    for (window, source) in dataset.iter() {
        set.push(window_label(source), hidden_embedding(&params, window, args.mode, &mut rng)?)?;
    }
    let output = set.project(&args.tsne)?;
    write_file(args.out, set.projections_tsv().as_bytes())?;
    if let Some(path) = args.activations {
        write_file(path, set.activations_tsv().as_bytes())?;
    }
    let final_kl = output.kl_trace.last().map(|&(_, kl)| kl);
    let text = format!(
        "projected {} windows (perplexity {}, {} iterations); final KL {}\nwrote {}\n",
        set.len(),
        args.tsne.perplexity,
        args.tsne.iterations,
        final_kl.map_or("n/a".to_string(), |k| format!("{k:.4}")),
        args.out.display()
    );
    let json = json!({
        "command": "embed",
        "points": set.len(),
        "output": args.out.display().to_string(),
        "perplexity": args.tsne.perplexity,
        "iterations": args.tsne.iterations,
        "seed": args.tsne.seed,
        "final_kl": final_kl,
    });
    Ok(Outcome::new(text, json))
}

pub const BENCH_HEADER: &str = "hidden_units\tthreads\tseconds_per_epoch";

pub struct BenchArgs<'a> {
    pub idx: Option<&'a Path>,
    pub hidden_counts: &'a [usize],
    pub threads: &'a [usize],
    pub images: Option<usize>,
    pub config: TrainConfig,
}

pub fn bench_cmd(args: &BenchArgs) -> CliResult<Outcome> {
    if args.hidden_counts.is_empty() || args.threads.is_empty() {
        return Err(CliError::Usage("need at least one hidden-unit count and thread count".into()));
    }
    let (data, source) = bench_images(args.idx, args.images, args.config.seed)?;
    let rows = run_bench(&data, args.hidden_counts, args.threads, &args.config)?;
    let source_name = match &source {
        BenchSource::Idx(p) => p.clone(),
        BenchSource::StandIn => "generated stand-in".to_string(),
    };
    let mut text = format!("# {} images of 28x28 from {source_name}\n{BENCH_HEADER}\n", data.len());
    for r in &rows {
        writeln!(text, "{}\t{}\t{:.4}", r.hidden_units, r.threads, r.seconds_per_epoch).expect("write to string");
    }
    let mut warnings = Vec::new();
    if source == BenchSource::StandIn {
        warnings.push("MNIST IDX file not found; timing generated images of the same shape".to_string());
    }
    let json = json!({
        "command": "bench",
        "images": data.len(),
        "source": source_name,
        "rows": rows.iter().map(|r| json!({
            "hidden_units": r.hidden_units,
            "threads": r.threads,
            "seconds_per_epoch": r.seconds_per_epoch,
        })).collect::<Vec<_>>(),
    });
    Ok(Outcome { text, json, warnings })
}
