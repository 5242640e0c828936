//! Command-line front end. Each subcommand resolves a [`RunConfig`] from an
//! optional TOML file plus flag overrides, validates it completely, runs, and
//! only then writes its artifacts and a `manifest.toml` into `--out`.

mod commands;
mod config;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{cmd_ablate, cmd_cost, cmd_generate, cmd_noise_sweep, cmd_pretrain, cmd_train};
pub use config::RunConfig;

use crate::circuits::Scheme;
use crate::error::Result;

#[derive(Debug, Parser)]
#[command(
    name = "iqgan",
    version,
    about = "Quantum GAN simulator and training toolkit"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pretrain encoder scales to separate class ensembles.
    Pretrain(CommonArgs),
    /// Train a generator on the target class subset.
    Train(CommonArgs),
    /// Decode images from saved encoder, generator and PCA artifacts.
    Generate(CommonArgs),
    /// Print the closed-form hardware cost of a GAN scheme.
    Cost {
        #[arg(value_parser = parse_scheme)]
        scheme: Scheme,
        n: usize,
        b: usize,
        #[arg(long)]
        csv: bool,
    },
    /// Compare generator ansatz kinds over several seeds.
    Ablate(CommonArgs),
    /// Evaluate trained generators under flip noise for several input sizes.
    NoiseSweep(CommonArgs),
}

fn parse_scheme(s: &str) -> std::result::Result<Scheme, String> {
    s.parse().map_err(|e: crate::Error| e.to_string())
}

fn parse_class(s: &str) -> std::result::Result<u8, String> {
    match s.parse::<u8>() {
        Ok(c) if c <= 9 => Ok(c),
        _ => Err(format!("`{s}` is not a digit class 0-9")),
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// TOML config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// RNG seed (at most i64::MAX).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory, created when the run succeeds.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Input size: PCA features and qubits per register.
    #[arg(long)]
    pub n: Option<usize>,
    /// Generator blocks.
    #[arg(long)]
    pub blocks: Option<usize>,
    /// cnot, iswap, crx, crot or none.
    #[arg(long)]
    pub ansatz: Option<String>,
    /// Angle encoder kind.
    #[arg(long, value_parser = ["trainable", "fixed"])]
    pub encoder: Option<String>,
    /// Keep encoder scales fixed during GAN training.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub freeze_encoder: Option<bool>,
    /// Finite-shot SWAP-test estimation; exact when absent.
    #[arg(long)]
    pub shots: Option<u64>,
    /// Bit-flip probability per touched qubit and layer.
    #[arg(long)]
    pub p_bit: Option<f64>,
    /// Phase-flip probability per touched qubit and layer.
    #[arg(long)]
    pub p_phase: Option<f64>,
    /// Monte Carlo trajectories for noisy evaluation.
    #[arg(long)]
    pub trajectories: Option<usize>,

    /// IDX image file.
    #[arg(long)]
    pub images: Option<PathBuf>,
    /// IDX label file.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Target classes, comma separated.
    #[arg(long, value_delimiter = ',', value_parser = parse_class)]
    pub classes: Option<Vec<u8>>,
    /// Classes separated by encoder pretraining; pretrains before training when set.
    #[arg(long, value_delimiter = ',', value_parser = parse_class)]
    pub pretrain_classes: Option<Vec<u8>>,
    /// Classes the PCA is fitted on (default: all).
    #[arg(long, value_delimiter = ',', value_parser = parse_class)]
    pub pca_classes: Option<Vec<u8>>,
    /// Keep at most this many samples per class, in file order.
    #[arg(long)]
    pub max_per_class: Option<usize>,
    /// Training epochs.
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Initial ADAM learning rate.
    #[arg(long)]
    pub lr: Option<f64>,
    /// Mini-batch size.
    #[arg(long)]
    pub batch_size: Option<usize>,
    /// Cosine annealing period in epochs.
    #[arg(long)]
    pub t_max: Option<usize>,
    /// Train with unit encoder scales instead of pretrained ones.
    #[arg(long)]
    pub allow_unpretrained: bool,
    /// Encoder artifact (encoder.txt).
    #[arg(long)]
    pub theta_s: Option<PathBuf>,
    /// Generator artifact (generator.txt).
    #[arg(long)]
    pub theta_g: Option<PathBuf>,
    /// PCA artifact (pca.txt).
    #[arg(long)]
    pub pca: Option<PathBuf>,
    /// Previous output directory supplying unset artifact paths.
    #[arg(long)]
    pub run: Option<PathBuf>,
    /// Ansatz kinds compared by `ablate`.
    #[arg(long, value_delimiter = ',')]
    pub ablation_ansatz: Option<Vec<String>>,
    /// Seeds per ansatz for `ablate`.
    #[arg(long, value_delimiter = ',')]
    pub ablation_seeds: Option<Vec<u64>>,
    /// Input sizes for `noise-sweep`, strictly ascending.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    /// Target samples averaged per size in `noise-sweep`.
    #[arg(long)]
    pub eval_samples: Option<usize>,
    /// Number of generated images (finite-shot mode).
    #[arg(long)]
    pub count: Option<usize>,
    /// Also write PNG copies of image grids.
    #[arg(long)]
    pub png: bool,
    /// Record per-epoch wall time (metrics are then not reproducible).
    #[arg(long)]
    pub wall_time: bool,
}

impl CommonArgs {
    /// Config file (or defaults) with every given flag applied on top.
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        macro_rules! set {
            ($($field:ident => $target:ident),* $(,)?) => {
                $(if let Some(v) = &self.$field { c.$target = v.clone(); })*
            };
        }
        set!(
            seed => seed, out => out, n => n, blocks => blocks, ansatz => ansatz, encoder => encoder,
            freeze_encoder => freeze_encoder, p_bit => p_bit, p_phase => p_phase,
            trajectories => trajectories, classes => classes, pretrain_classes => pretrain_classes,
            pca_classes => pca_classes, epochs => epochs, lr => lr, batch_size => batch_size, t_max => t_max,
            ablation_ansatz => ablation_ansatz, ablation_seeds => ablation_seeds, sizes => sweep_sizes,
            eval_samples => eval_samples, count => count,
        );
        macro_rules! set_opt {
            ($($field:ident),* $(,)?) => {
                $(if self.$field.is_some() { c.$field = self.$field.clone(); })*
            };
        }
        set_opt!(
            shots,
            images,
            labels,
            max_per_class,
            theta_s,
            theta_g,
            pca,
            run
        );
        c.allow_unpretrained |= self.allow_unpretrained;
        c.png |= self.png;
        c.wall_time |= self.wall_time;
        Ok(c)
    }
}

/// Runs one parsed invocation, returning text for stdout.
pub fn run(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Cost { scheme, n, b, csv } => cmd_cost(*scheme, *n, *b, *csv),
        Command::Pretrain(a) => cmd_pretrain(&a.resolve()?).map(|_| String::new()),
        Command::Train(a) => cmd_train(&a.resolve()?).map(|_| String::new()),
        Command::Generate(a) => cmd_generate(&a.resolve()?).map(|_| String::new()),
        Command::Ablate(a) => cmd_ablate(&a.resolve()?).map(|_| String::new()),
        Command::NoiseSweep(a) => cmd_noise_sweep(&a.resolve()?).map(|_| String::new()),
    }
}
