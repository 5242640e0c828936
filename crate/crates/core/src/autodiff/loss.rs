use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::circuits::{build_generator, encode_state, EncoderParams, GeneratorParams};
use crate::error::{invalid, Error, Result};
use crate::qsim::{fidelity, StateVector};

/// Finite-shot SWAP-test estimation settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shots {
    pub shots: u64,
    pub seed: u64,
}

/// Everything the fidelity loss depends on.
#[derive(Debug, Clone)]
pub struct LossContext<'a> {
    pub batch: &'a [Vec<f64>],
    pub encoder: EncoderParams,
    pub generator: GeneratorParams,
    /// `None` evaluates exact expectation values.
    pub shots: Option<Shots>,
}

impl<'a> LossContext<'a> {
    pub fn new(batch: &'a [Vec<f64>], encoder: EncoderParams, generator: GeneratorParams) -> Self {
        Self {
            batch,
            encoder,
            generator,
            shots: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.batch.is_empty() {
            return Err(invalid("loss batch is empty"));
        }
        let n = self.generator.n;
        if self.encoder.n() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: self.encoder.n(),
            });
        }
        for x in self.batch {
            crate::error::check_len(n, x.len())?;
        }
        if let Some(s) = self.shots {
            if s.shots == 0 {
                return Err(invalid("shots must be at least 1"));
            }
        }
        Ok(())
    }

    pub fn target_states(&self) -> Result<Vec<StateVector>> {
        self.batch
            .iter()
            .map(|x| encode_state(x, &self.encoder))
            .collect()
    }

    pub fn generator_state(&self) -> Result<StateVector> {
        build_generator(&self.generator)?.run(None)
    }

    /// Batch-mean loss for precomputed targets and generator output.
    /// `tag` decorrelates the shot noise of distinct evaluations.
    pub(crate) fn loss_from_states(
        &self,
        targets: &[StateVector],
        generated: &StateVector,
        tag: u64,
    ) -> Result<f64> {
        let mut total = 0.0;
        for (i, t) in targets.iter().enumerate() {
            let f = fidelity(t, generated)?;
            let f = match self.shots {
                None => f,
                Some(s) => estimate_fidelity_from_shots(f, s, tag, i as u64)?,
            };
            total += 1.0 - f;
        }
        Ok(total / targets.len() as f64)
    }
}

/// Draws the ancilla zero-count of a SWAP test with `P0 = (1 + F)/2` and
/// inverts it to `F̂ = 2·k/shots − 1`, clamped to [0, 1].
fn estimate_fidelity_from_shots(f: f64, shots: Shots, tag: u64, sample: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(shots.seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    rng.set_stream(sample);
    let p0 = ((1.0 + f) / 2.0).clamp(0.0, 1.0);
    let dist = Binomial::new(shots.shots, p0).map_err(|e| Error::Numeric(e.to_string()))?;
    let k = dist.sample(&mut rng) as f64;
    Ok((2.0 * k / shots.shots as f64 - 1.0).clamp(0.0, 1.0))
}

/// Mean over the batch of `1 − |⟨ψ_enc(x)|ψ_gen⟩|²`.
pub fn gan_loss(ctx: &LossContext<'_>) -> Result<f64> {
    ctx.validate()?;
    let targets = ctx.target_states()?;
    let generated = ctx.generator_state()?;
    ctx.loss_from_states(&targets, &generated, 0)
}

/// Per-sample fidelities against the generator output (exact).
pub fn batch_fidelities(ctx: &LossContext<'_>) -> Result<Vec<f64>> {
    ctx.validate()?;
    let generated = ctx.generator_state()?;
    ctx.target_states()?
        .iter()
        .map(|t| fidelity(t, &generated))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::Ansatz;
    use std::f64::consts::PI;

    #[test]
    fn matching_generator_gives_zero_loss() {
        // x = sin(0.6) encodes to RY(0.6); generator RY(0.6) RZ(0) reproduces it.
        let batch = vec![vec![0.6f64.sin()]];
        let gen = GeneratorParams::new(Ansatz::NoEntangler, 1, 1, vec![0.6, 0.0]).unwrap();
        let ctx = LossContext::new(&batch, EncoderParams::unit(1), gen);
        assert!(gan_loss(&ctx).unwrap().abs() < 1e-15);
    }

    #[test]
    fn orthogonal_pair_gives_unit_loss() {
        let batch = vec![vec![0.0]];
        let gen = GeneratorParams::new(Ansatz::NoEntangler, 1, 1, vec![PI, 0.0]).unwrap();
        let ctx = LossContext::new(&batch, EncoderParams::unit(1), gen);
        assert!((gan_loss(&ctx).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn loss_is_one_minus_fidelity() {
        // choose the generator angle so the single-item fidelity is 0.927
        let angle = 2.0 * 0.927f64.sqrt().acos();
        let batch = vec![vec![0.0]];
        let gen = GeneratorParams::new(Ansatz::NoEntangler, 1, 1, vec![angle, 0.0]).unwrap();
        let ctx = LossContext::new(&batch, EncoderParams::unit(1), gen);
        assert!((gan_loss(&ctx).unwrap() - 0.073).abs() < 1e-12);
    }

    #[test]
    fn empty_batch_and_dimension_errors() {
        let gen = GeneratorParams::zeros(Ansatz::Cnot, 2, 1).unwrap();
        let empty: Vec<Vec<f64>> = vec![];
        assert!(gan_loss(&LossContext::new(
            &empty,
            EncoderParams::unit(2),
            gen.clone()
        ))
        .is_err());
        let batch = vec![vec![0.1]];
        assert!(gan_loss(&LossContext::new(&batch, EncoderParams::unit(2), gen)).is_err());
    }

    #[test]
    fn finite_shot_loss_is_close_and_reproducible() {
        let batch = vec![vec![0.3, -0.2], vec![0.5, 0.1]];
        let gen =
            GeneratorParams::new(Ansatz::NoEntangler, 2, 1, vec![0.2, 0.1, -0.1, 0.3]).unwrap();
        let mut ctx = LossContext::new(&batch, EncoderParams::unit(2), gen);
        let exact = gan_loss(&ctx).unwrap();
        ctx.shots = Some(Shots {
            shots: 200_000,
            seed: 4,
        });
        let noisy = gan_loss(&ctx).unwrap();
        assert_eq!(noisy, gan_loss(&ctx).unwrap());
        // per-sample σ(F̂) = 2·sqrt(P0(1−P0)/shots) < 2.3e-3
        assert!((noisy - exact).abs() < 5e-3);
    }
}
