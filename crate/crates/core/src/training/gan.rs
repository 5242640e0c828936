use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::autodiff::{
    adam_step, cosine_anneal_lr, gan_loss, param_shift_grad, AdamState, GradTarget, LossContext,
    Shots,
};
use crate::circuits::{generator_param_count, Ansatz, EncoderMode, EncoderParams, GeneratorParams};
use crate::error::{invalid, Error, Result};
use crate::noise::NoiseSpec;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub lr: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub t_max: usize,
    pub seed: u64,
    pub n: usize,
    pub blocks: usize,
    pub ansatz: Ansatz,
    pub encoder: EncoderMode,
    pub freeze_encoder: bool,
    /// `None` evaluates the loss exactly.
    pub shots: Option<u64>,
    /// Used by the noise sweep evaluation; training itself is noiseless.
    pub noise: NoiseSpec,
    /// θg starts uniform in [−init_scale, init_scale].
    pub init_scale: f64,
    /// Permits a trainable encoder whose scales were never pretrained.
    pub allow_unpretrained: bool,
    /// Measure epoch wall time; off keeps metrics byte-reproducible.
    pub record_wall_time: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            lr: 0.001,
            batch_size: 32,
            epochs: 30,
            t_max: 30,
            seed: 0,
            n: 2,
            blocks: 1,
            ansatz: Ansatz::NoEntangler,
            encoder: EncoderMode::Trainable,
            freeze_encoder: true,
            shots: None,
            noise: NoiseSpec::none(),
            init_scale: 0.1,
            allow_unpretrained: false,
            record_wall_time: false,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return Err(invalid(format!("lr must be positive, got {}", self.lr)));
        }
        if self.batch_size == 0 || self.epochs == 0 || self.t_max == 0 {
            return Err(invalid("batch_size, epochs and t_max must be positive"));
        }
        if self.n == 0 || self.blocks == 0 {
            return Err(invalid("n and blocks must be at least 1"));
        }
        if self.shots == Some(0) {
            return Err(invalid("shots must be at least 1"));
        }
        if !(self.init_scale >= 0.0 && self.init_scale.is_finite()) {
            return Err(invalid(format!(
                "init_scale must be non-negative, got {}",
                self.init_scale
            )));
        }
        self.noise.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainRecord {
    /// 1-based.
    pub epoch: usize,
    pub loss: f64,
    pub fidelity: f64,
    pub lr: f64,
    pub wall_ms: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub generator: GeneratorParams,
    pub encoder: EncoderParams,
    pub records: Vec<TrainRecord>,
}

impl TrainOutcome {
    pub fn final_fidelity(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.fidelity)
    }
}

/// Seeded uniform start in [−scale, scale].
pub fn init_generator(
    ansatz: Ansatz,
    n: usize,
    blocks: usize,
    scale: f64,
    rng: &mut impl Rng,
) -> Result<GeneratorParams> {
    let theta = (0..generator_param_count(ansatz, n, blocks))
        .map(|_| rng.random_range(-1.0..=1.0) * scale)
        .collect();
    GeneratorParams::new(ansatz, n, blocks, theta)
}

/// Minimizes the fidelity loss over θg (and θs when unfrozen) with ADAM,
/// one step per minibatch, learning rate annealed per epoch.
pub fn train_gan(
    dataset: &[Vec<f64>],
    encoder: &EncoderParams,
    cfg: &TrainConfig,
) -> Result<TrainOutcome> {
    cfg.validate()?;
    if dataset.is_empty() {
        return Err(invalid("training dataset is empty"));
    }
    if encoder.n() != cfg.n {
        return Err(Error::DimensionMismatch {
            expected: cfg.n,
            found: encoder.n(),
        });
    }
    if encoder.mode != cfg.encoder {
        return Err(invalid(format!(
            "encoder is {} but the config asks for {}",
            encoder.mode, cfg.encoder
        )));
    }
    for x in dataset {
        crate::error::check_len(cfg.n, x.len())?;
    }
    if encoder.mode == EncoderMode::Trainable && !encoder.pretrained && !cfg.allow_unpretrained {
        return Err(Error::Config(
            "trainable encoder scales are not pretrained; run pretraining first or allow unpretrained scales".into(),
        ));
    }
    let train_encoder = encoder.mode == EncoderMode::Trainable && !cfg.freeze_encoder;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut generator = init_generator(cfg.ansatz, cfg.n, cfg.blocks, cfg.init_scale, &mut rng)?;
    let mut encoder = encoder.clone();
    let mut adam_g = AdamState::new(generator.theta_g.len(), cfg.lr);
    let mut adam_s = AdamState::new(cfg.n, cfg.lr);
    let mut order: Vec<usize> = (0..dataset.len()).collect();
    let mut records = Vec::with_capacity(cfg.epochs);
    let mut step = 0u64;

    for epoch in 0..cfg.epochs {
        let started = Instant::now();
        let lr = cosine_anneal_lr(epoch.min(cfg.t_max), cfg.lr, cfg.t_max)?;
        order.shuffle(&mut rng);
        for chunk in order.chunks(cfg.batch_size) {
            let batch: Vec<Vec<f64>> = chunk.iter().map(|&i| dataset[i].clone()).collect();
            let mut ctx = LossContext::new(&batch, encoder.clone(), generator.clone());
            ctx.shots = cfg.shots.map(|shots| Shots {
                shots,
                seed: cfg.seed.wrapping_add(step),
            });
            let g = param_shift_grad(&ctx, GradTarget::Generator)?;
            if train_encoder {
                let s = param_shift_grad(&ctx, GradTarget::Encoder)?;
                if !s.singular.is_empty() {
                    log::warn!(
                        "encoder chain factor clamped on coordinates {:?}",
                        s.singular
                    );
                }
                adam_step(&mut adam_s, &mut encoder.theta_s, &s.values, lr)?;
            }
            adam_step(&mut adam_g, &mut generator.theta_g, &g.values, lr)?;
            step += 1;
        }
        let mut ctx = LossContext::new(dataset, encoder.clone(), generator.clone());
        ctx.shots = cfg.shots.map(|shots| Shots {
            shots,
            seed: cfg.seed ^ 0xE0C4_0000_0000_0000 ^ epoch as u64,
        });
        let loss = gan_loss(&ctx)?;
        if !loss.is_finite() {
            return Err(Error::Numeric(format!(
                "loss is {loss} after epoch {}",
                epoch + 1
            )));
        }
        let wall_ms = if cfg.record_wall_time {
            started.elapsed().as_millis() as u64
        } else {
            0
        };
        let record = TrainRecord {
            epoch: epoch + 1,
            loss,
            fidelity: 1.0 - loss,
            lr,
            wall_ms,
        };
        log::info!(
            "epoch {:>3} loss {:.6} fidelity {:.6} lr {:.3e}",
            record.epoch,
            loss,
            record.fidelity,
            lr
        );
        records.push(record);
    }
    Ok(TrainOutcome {
        generator,
        encoder,
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(n: usize) -> TrainConfig {
        TrainConfig {
            n,
            allow_unpretrained: true,
            ..TrainConfig::default()
        }
    }

    #[test]
    fn single_target_converges() {
        let data = vec![vec![0.6]; 32];
        let cfg = TrainConfig {
            lr: 0.05,
            ..quick(1)
        };
        let out = train_gan(&data, &EncoderParams::unit(1), &cfg).unwrap();
        assert_eq!(out.records.len(), 30);
        assert!(out.final_fidelity() >= 0.99, "{}", out.final_fidelity());
    }

    #[test]
    fn records_are_consistent_and_reproducible() {
        let data: Vec<Vec<f64>> = (0..40)
            .map(|i| vec![0.3 + 0.005 * i as f64, -0.2])
            .collect();
        let cfg = TrainConfig {
            epochs: 3,
            t_max: 3,
            ..quick(2)
        };
        let a = train_gan(&data, &EncoderParams::unit(2), &cfg).unwrap();
        let b = train_gan(&data, &EncoderParams::unit(2), &cfg).unwrap();
        assert_eq!(a, b);
        for (i, r) in a.records.iter().enumerate() {
            assert_eq!(r.epoch, i + 1);
            assert!((r.loss + r.fidelity - 1.0).abs() < 1e-12);
            assert_eq!(r.wall_ms, 0);
        }
        assert_eq!(a.records[0].lr, 0.001);
    }

    #[test]
    fn unpretrained_trainable_encoder_refused() {
        let data = vec![vec![0.1, 0.2]];
        let cfg = TrainConfig {
            allow_unpretrained: false,
            ..quick(2)
        };
        assert!(matches!(
            train_gan(&data, &EncoderParams::unit(2), &cfg),
            Err(Error::Config(_))
        ));
        let pre = EncoderParams::unit(2).mark_pretrained();
        assert!(train_gan(
            &data,
            &pre,
            &TrainConfig {
                epochs: 1,
                ..cfg.clone()
            }
        )
        .is_ok());
        let fixed = TrainConfig {
            encoder: EncoderMode::Fixed,
            epochs: 1,
            ..cfg
        };
        assert!(train_gan(&data, &EncoderParams::fixed(2), &fixed).is_ok());
    }

    #[test]
    fn bad_inputs_rejected() {
        let cfg = quick(2);
        assert!(train_gan(&[], &EncoderParams::unit(2), &cfg).is_err());
        assert!(train_gan(&[vec![0.1]], &EncoderParams::unit(2), &cfg).is_err());
        assert!(train_gan(
            &[vec![0.1, 0.2]],
            &EncoderParams::unit(2),
            &TrainConfig { lr: 0.0, ..cfg }
        )
        .is_err());
    }

    #[test]
    fn unfrozen_encoder_moves() {
        let data: Vec<Vec<f64>> = (0..16).map(|i| vec![0.2 + 0.02 * i as f64]).collect();
        let cfg = TrainConfig {
            freeze_encoder: false,
            epochs: 2,
            t_max: 2,
            lr: 0.01,
            ..quick(1)
        };
        let out = train_gan(&data, &EncoderParams::unit(1), &cfg).unwrap();
        assert_ne!(out.encoder.theta_s, vec![1.0]);
    }
}
