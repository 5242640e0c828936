use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::circuits::{Ansatz, EncoderMode};
use crate::error::{Error, Result};
use crate::noise::NoiseSpec;
use crate::training::{PretrainConfig, SweepConfig, TrainConfig};

/// Everything a command can be configured with. Loaded from a TOML file,
/// then overridden by flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub out: PathBuf,
    pub images: Option<PathBuf>,
    pub labels: Option<PathBuf>,
    /// Target subset for GAN training.
    pub classes: Vec<u8>,
    /// Classes separated by encoder pretraining.
    pub pretrain_classes: Vec<u8>,
    /// Classes the PCA is fitted on; empty means every sample in the file.
    pub pca_classes: Vec<u8>,
    /// Per-class cap, taking samples in file order.
    pub max_per_class: Option<usize>,

    pub n: usize,
    pub blocks: usize,
    pub ansatz: String,
    pub encoder: String,
    pub freeze_encoder: bool,
    pub allow_unpretrained: bool,
    pub lr: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub t_max: usize,
    pub init_scale: f64,
    pub shots: Option<u64>,
    pub p_bit: f64,
    pub p_phase: f64,
    pub trajectories: usize,
    pub wall_time: bool,

    pub pretrain_lr: f64,
    pub pretrain_steps: usize,
    pub pretrain_samples: Option<usize>,

    pub theta_s: Option<PathBuf>,
    pub theta_g: Option<PathBuf>,
    pub pca: Option<PathBuf>,
    /// Directory of a previous run; supplies any unset artifact path.
    pub run: Option<PathBuf>,

    pub ablation_ansatz: Vec<String>,
    pub ablation_seeds: Vec<u64>,
    pub sweep_sizes: Vec<usize>,
    pub eval_samples: usize,

    pub count: usize,
    pub png: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let t = TrainConfig::default();
        let p = PretrainConfig::default();
        Self {
            seed: 0,
            out: PathBuf::from("iqgan-run"),
            images: None,
            labels: None,
            classes: vec![0],
            pretrain_classes: Vec::new(),
            pca_classes: Vec::new(),
            max_per_class: None,
            n: t.n,
            blocks: t.blocks,
            ansatz: t.ansatz.name().into(),
            encoder: t.encoder.to_string(),
            freeze_encoder: t.freeze_encoder,
            allow_unpretrained: t.allow_unpretrained,
            lr: t.lr,
            batch_size: t.batch_size,
            epochs: t.epochs,
            t_max: t.t_max,
            init_scale: t.init_scale,
            shots: None,
            p_bit: 0.0,
            p_phase: 0.0,
            trajectories: 1000,
            wall_time: false,
            pretrain_lr: p.lr,
            pretrain_steps: p.steps,
            pretrain_samples: p.max_per_class,
            theta_s: None,
            theta_g: None,
            pca: None,
            run: None,
            ablation_ansatz: vec!["none".into(), "cnot".into()],
            ablation_seeds: vec![0, 1, 2],
            sweep_sizes: vec![2, 4, 6, 8],
            eval_samples: 4,
            count: 8,
            png: false,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("config file: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("RunConfig serializes to TOML")
    }

    pub fn ansatz(&self) -> Result<Ansatz> {
        self.ansatz
            .parse()
            .map_err(|e: Error| Error::Config(e.to_string()))
    }

    pub fn encoder_mode(&self) -> Result<EncoderMode> {
        self.encoder
            .parse()
            .map_err(|e: Error| Error::Config(e.to_string()))
    }

    pub fn noise(&self) -> Result<NoiseSpec> {
        NoiseSpec::new(self.p_bit, self.p_phase).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn train_config(&self) -> Result<TrainConfig> {
        let cfg = TrainConfig {
            lr: self.lr,
            batch_size: self.batch_size,
            epochs: self.epochs,
            t_max: self.t_max,
            seed: self.seed,
            n: self.n,
            blocks: self.blocks,
            ansatz: self.ansatz()?,
            encoder: self.encoder_mode()?,
            freeze_encoder: self.freeze_encoder,
            shots: self.shots,
            noise: self.noise()?,
            init_scale: self.init_scale,
            allow_unpretrained: self.allow_unpretrained,
            record_wall_time: self.wall_time,
        };
        cfg.validate().map_err(as_config)?;
        Ok(cfg)
    }

    pub fn pretrain_config(&self) -> Result<PretrainConfig> {
        let cfg = PretrainConfig {
            lr: self.pretrain_lr,
            steps: self.pretrain_steps,
            max_per_class: self.pretrain_samples,
            seed: self.seed,
            ..PretrainConfig::default()
        };
        cfg.validate().map_err(as_config)?;
        Ok(cfg)
    }

    pub fn sweep_config(&self) -> Result<SweepConfig> {
        let cfg = SweepConfig {
            sizes: self.sweep_sizes.clone(),
            noise: self.noise()?,
            trajectories: self.trajectories,
            eval_samples: self.eval_samples,
        };
        cfg.validate().map_err(as_config)?;
        Ok(cfg)
    }

    pub fn ablation_ansatz(&self) -> Result<Vec<Ansatz>> {
        self.ablation_ansatz
            .iter()
            .map(|a| a.parse().map_err(|e: Error| Error::Config(e.to_string())))
            .collect()
    }

    /// Image and label files, which must exist.
    pub fn data_paths(&self) -> Result<(PathBuf, PathBuf)> {
        let images = self
            .images
            .clone()
            .ok_or_else(|| Error::Config("no image file given (`images`)".into()))?;
        let labels = self
            .labels
            .clone()
            .ok_or_else(|| Error::Config("no label file given (`labels`)".into()))?;
        require_file(&images, "image file")?;
        require_file(&labels, "label file")?;
        Ok((images, labels))
    }

    pub fn check_classes(list: &[u8], what: &str) -> Result<()> {
        if let Some(c) = list.iter().find(|&&c| c > 9) {
            return Err(Error::Config(format!(
                "{what} contains {c}; labels are digits 0-9"
            )));
        }
        let mut sorted = list.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != list.len() {
            return Err(Error::Config(format!("{what} lists a class twice")));
        }
        Ok(())
    }

    /// Artifact path from an explicit setting, else `<run>/<file>`.
    pub fn artifact(&self, explicit: &Option<PathBuf>, file: &str) -> Option<PathBuf> {
        explicit
            .clone()
            .or_else(|| self.run.as_ref().map(|r| r.join(file)))
    }

    /// The output directory is usable: absent (creatable) or a directory.
    pub fn check_out(&self) -> Result<()> {
        if self.seed > i64::MAX as u64 {
            return Err(Error::Config(format!(
                "seed {} exceeds {}",
                self.seed,
                i64::MAX
            )));
        }
        if self.out.as_os_str().is_empty() {
            return Err(Error::Config("output directory is empty".into()));
        }
        if self.out.exists() && !self.out.is_dir() {
            return Err(Error::Config(format!(
                "output path {} is not a directory",
                self.out.display()
            )));
        }
        let mut ancestor = self.out.parent();
        while let Some(p) = ancestor {
            if p.as_os_str().is_empty() || p.is_dir() {
                break;
            }
            if p.exists() {
                return Err(Error::Config(format!("{} is not a directory", p.display())));
            }
            ancestor = p.parent();
        }
        Ok(())
    }
}

pub fn require_file(path: &Path, what: &str) -> Result<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "{what} {} does not exist",
            path.display()
        )))
    }
}

/// Argument problems surfaced while validating a config are config errors.
pub fn as_config(e: Error) -> Error {
    match e {
        Error::InvalidArgument(msg) => Error::Config(msg),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_toml() {
        let c = RunConfig::default();
        assert_eq!(RunConfig::from_toml(&c.to_toml()).unwrap(), c);
        let t = c.train_config().unwrap();
        assert_eq!((t.lr, t.batch_size, t.epochs, t.t_max), (0.001, 32, 30, 30));
    }

    #[test]
    fn partial_file_keeps_defaults() {
        let c = RunConfig::from_toml("n = 3\nansatz = \"crx\"\nclasses = [4]\n").unwrap();
        assert_eq!(c.n, 3);
        assert_eq!(c.ansatz().unwrap(), Ansatz::Crx);
        assert_eq!(c.epochs, 30);
    }

    #[test]
    fn bad_values_are_config_errors() {
        assert!(matches!(
            RunConfig::from_toml("bogus = 1"),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            RunConfig::from_toml("n = \"two\""),
            Err(Error::Config(_))
        ));
        let c = RunConfig {
            ansatz: "ring".into(),
            ..RunConfig::default()
        };
        assert!(matches!(c.train_config(), Err(Error::Config(_))));
        let c = RunConfig {
            p_bit: 2.0,
            ..RunConfig::default()
        };
        assert!(matches!(c.train_config(), Err(Error::Config(_))));
        let c = RunConfig {
            trajectories: 0,
            ..RunConfig::default()
        };
        assert!(matches!(c.sweep_config(), Err(Error::Config(_))));
        assert!(RunConfig::check_classes(&[1, 1], "classes").is_err());
        assert!(RunConfig::check_classes(&[10], "classes").is_err());
        assert!(matches!(
            RunConfig::default().data_paths(),
            Err(Error::Config(_))
        ));
    }
}
