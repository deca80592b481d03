use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pianorbm::analysis::{EmbeddingMode, TsneConfig};
use pianorbm::pianoroll::{DEFAULT_BINARIZE_THRESHOLD, DEFAULT_SHIFTS};
use pianorbm::trainer::TrainConfig;
use pianorbm_cli::commands::{self, BenchArgs, EmbedArgs, Outcome, ReconstructArgs};
use pianorbm_cli::config::{RunConfig, CONFIG_ENV};
use pianorbm_cli::{CliError, CliResult};

#[derive(Parser)]
#[command(name = "pianorbm", version, about = "Train, compose with and analyse an RBM over piano-roll windows")]
struct Cli {
    /// Print a JSON summary instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Run configuration file (`key = value` lines).
    #[arg(long, global = true, env = CONFIG_ENV)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Turn a directory of MIDI files into PBM windows and a manifest.
    Ingest {
        midi_dir: PathBuf,
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Transpositions in semitones.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_values_t = DEFAULT_SHIFTS)]
        shifts: Vec<i32>,
        /// Keep only the untransposed windows.
        #[arg(long, conflicts_with = "shifts")]
        no_augment: bool,
    },
    /// Train a model with CD-k.
    Train {
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Per-epoch report; defaults to the checkpoint path with `.tsv`.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Continue from the checkpoint if it exists.
        #[arg(long)]
        resume: bool,
        #[command(flatten)]
        train: TrainFlags,
    },
    /// Compose a piece and write it as PBM and MIDI.
    Compose {
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long)]
        out_prefix: Option<PathBuf>,
        #[arg(long)]
        initial_budget: Option<usize>,
        #[arg(long)]
        extension_budget: Option<usize>,
        #[arg(long)]
        extensions: Option<usize>,
        #[arg(long)]
        hidden_samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Reconstruct a PBM window or a PGM/IDX image by Gibbs sampling.
    Reconstruct {
        input: PathBuf,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(short, long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        k: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Image index within an IDX file.
        #[arg(long, default_value_t = 0)]
        index: usize,
        #[arg(long, default_value_t = DEFAULT_BINARIZE_THRESHOLD)]
        threshold: u8,
    },
    /// Tabulate energies of input windows, lowest first.
    Energy {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long, default_value_t = pianorbm::analysis::DEFAULT_ENERGY_SAMPLES as u64, value_parser = clap::value_parser!(u64).range(2..))]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Images taken from each IDX file.
        #[arg(long, default_value_t = 10)]
        idx_limit: usize,
        #[arg(long, default_value_t = DEFAULT_BINARIZE_THRESHOLD)]
        threshold: u8,
    },
    /// Project hidden activations of manifest windows with t-SNE.
    Embed {
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Also write the raw activations.
        #[arg(long)]
        activations: Option<PathBuf>,
        #[arg(long, default_value_t = 30.0)]
        perplexity: f64,
        #[arg(long, default_value_t = 1000)]
        iterations: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Use one binary hidden sample instead of probabilities.
        #[arg(long)]
        sampled: bool,
    },
    /// Time one training epoch per hidden-unit count and thread count.
    Bench {
        /// MNIST training images (IDX); generated stand-ins if absent.
        #[arg(long)]
        idx: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', default_values_t = [64usize, 256, 1024])]
        hidden: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = [1usize])]
        threads: Vec<usize>,
        /// Use only the first N images.
        #[arg(long)]
        images: Option<usize>,
        #[arg(long)]
        batch_size: Option<usize>,
        #[arg(long)]
        learning_rate: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Args)]
struct TrainFlags {
    #[arg(long)]
    hidden_units: Option<usize>,
    #[arg(long)]
    cd_steps: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    weight_init_stddev: Option<f64>,
}

impl TrainFlags {
    fn apply(&self, cfg: &mut TrainConfig) {
        macro_rules! set {
            ($($f:ident),*) => { $(if let Some(x) = self.$f { cfg.$f = x; })* };
        }
        set!(hidden_units, cd_steps, learning_rate, epochs, batch_size, seed, weight_init_stddev);
    }
}

fn required(flag: Option<PathBuf>, fallback: &Option<PathBuf>, name: &str) -> CliResult<PathBuf> {
    flag.or_else(|| fallback.clone())
        .ok_or_else(|| CliError::Usage(format!("--{name} is required (or set `{}` in the config)", name.replace('-', "_"))))
}

fn run(cli: Cli) -> CliResult<Outcome> {
    let cfg = RunConfig::resolve(cli.config.as_deref())?;
    match cli.command {
        Command::Ingest {
            midi_dir,
            manifest,
            shifts,
            no_augment,
        } => {
            let manifest = required(manifest, &cfg.manifest, "manifest")?;
            let shifts = if no_augment { Vec::new() } else { shifts };
            commands::ingest(&midi_dir, &manifest, &shifts)
        }
        Command::Train {
            manifest,
            checkpoint,
            report,
            resume,
            train,
        } => {
            let manifest = required(manifest, &cfg.manifest, "manifest")?;
            let checkpoint = required(checkpoint, &cfg.checkpoint, "checkpoint")?;
            let report = report
                .or(cfg.report.clone())
                .unwrap_or_else(|| checkpoint.with_extension("tsv"));
            let mut tc = cfg.train.clone();
            train.apply(&mut tc);
            commands::train_cmd(&manifest, &checkpoint, &report, &tc, resume)
        }
        Command::Compose {
            checkpoint,
            out_prefix,
            initial_budget,
            extension_budget,
            extensions,
            hidden_samples,
            seed,
        } => {
            let checkpoint = required(checkpoint, &cfg.checkpoint, "checkpoint")?;
            let out_prefix = required(out_prefix, &cfg.out_prefix, "out-prefix")?;
            let mut cc = cfg.compose.clone();
            cc.initial_budget = initial_budget.unwrap_or(cc.initial_budget);
            cc.extension_budget = extension_budget.unwrap_or(cc.extension_budget);
            cc.extensions = extensions.unwrap_or(cc.extensions);
            cc.hidden_samples = hidden_samples.unwrap_or(cc.hidden_samples);
            cc.seed = seed.unwrap_or(cc.seed);
            commands::compose_cmd(&checkpoint, &cc, &out_prefix)
        }
        Command::Reconstruct {
            input,
            checkpoint,
            out,
            k,
            seed,
            index,
            threshold,
        } => {
            let checkpoint = required(checkpoint, &cfg.checkpoint, "checkpoint")?;
            commands::reconstruct_cmd(&ReconstructArgs {
                checkpoint: &checkpoint,
                input: &input,
                k: k as usize,
                out: &out,
                seed,
                index,
                threshold,
            })
        }
        Command::Energy {
            inputs,
            checkpoint,
            samples,
            seed,
            idx_limit,
            threshold,
        } => {
            let checkpoint = required(checkpoint, &cfg.checkpoint, "checkpoint")?;
            commands::energy_cmd(&checkpoint, &inputs, samples as usize, seed, idx_limit, threshold)
        }
        Command::Embed {
            checkpoint,
            manifest,
            out,
            activations,
            perplexity,
            iterations,
            seed,
            sampled,
        } => {
            let checkpoint = required(checkpoint, &cfg.checkpoint, "checkpoint")?;
            let manifest = required(manifest, &cfg.manifest, "manifest")?;
            commands::embed_cmd(&EmbedArgs {
                checkpoint: &checkpoint,
                manifest: &manifest,
                out: &out,
                activations: activations.as_deref(),
                tsne: TsneConfig {
                    perplexity,
                    iterations,
                    seed,
                    ..TsneConfig::default()
                },
                mode: if sampled {
                    EmbeddingMode::Sampled
                } else {
                    EmbeddingMode::Probabilities
                },
            })
        }
        Command::Bench {
            idx,
            hidden,
            threads,
            images,
            batch_size,
            learning_rate,
            seed,
        } => {
            let mut config = TrainConfig::default();
            config.batch_size = batch_size.unwrap_or(config.batch_size);
            config.learning_rate = learning_rate.unwrap_or(config.learning_rate);
            config.seed = seed.unwrap_or(cfg.train.seed);
            commands::bench_cmd(&BenchArgs {
                idx: idx.as_deref().or(Some(Path::new("train-images-idx3-ubyte"))),
                hidden_counts: &hidden,
                threads: &threads,
                images,
                config,
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let json = cli.json;
    match run(cli) {
        Ok(outcome) => {
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            if json {
                println!("{}", outcome.json);
            } else {
                print!("{}", outcome.text);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            if json {
                println!("{}", serde_json::json!({"error": e.to_string(), "exit_code": e.exit_code()}));
            }
            ExitCode::from(e.exit_code())
        }
    }
}
