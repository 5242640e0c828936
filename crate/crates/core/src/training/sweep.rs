use super::gan::{train_gan, TrainConfig};
use crate::circuits::{
    assemble_gan_circuit, build_encoder, build_generator, EncoderMode, EncoderParams,
    GeneratorParams,
};
use crate::data::fit_pca;
use crate::error::{invalid, Result};
use crate::noise::{estimate_over_trajectories, run_noisy, NoiseSpec, NoisyEstimate};
use crate::qsim::qubit_zero_probability;

/// Trajectory counts below this give standard errors too coarse for a trend.
pub const MIN_SWEEP_TRAJECTORIES: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub sizes: Vec<usize>,
    pub noise: NoiseSpec,
    pub trajectories: usize,
    /// Leading samples of each projected set used for the noisy evaluation.
    pub eval_samples: usize,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() {
            return Err(invalid("noise sweep needs at least one input size"));
        }
        if self.sizes.contains(&0) {
            return Err(invalid("noise sweep sizes must be at least 1"));
        }
        if self.sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid(format!(
                "noise sweep sizes must be strictly ascending, got {:?}",
                self.sizes
            )));
        }
        if self.trajectories < MIN_SWEEP_TRAJECTORIES {
            return Err(invalid(format!(
                "noise sweep needs at least {MIN_SWEEP_TRAJECTORIES} trajectories, got {}",
                self.trajectories
            )));
        }
        if self.eval_samples == 0 {
            return Err(invalid("eval_samples must be at least 1"));
        }
        self.noise.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub n: usize,
    pub fidelity: f64,
    pub std_err: f64,
    /// Exact fidelity of the trained generator on the same evaluation samples.
    pub noiseless_fidelity: f64,
}

impl SweepRow {
    pub fn csv_row(&self) -> String {
        format!("{},{},{}", self.n, self.fidelity, self.std_err)
    }
}

pub const SWEEP_HEADER: &str = "n,fidelity,stderr";

/// Fidelity read off the ancilla of the full SWAP-test circuit under flip
/// noise. Each trajectory contributes `2·P0 − 1`, an unbiased (unclamped)
/// estimate.
pub fn noisy_swap_fidelity(
    x: &[f64],
    encoder: &EncoderParams,
    generator: &GeneratorParams,
    noise: &NoiseSpec,
    trajectories: usize,
    seed: u64,
) -> Result<NoisyEstimate> {
    let circuit = assemble_gan_circuit(&build_encoder(x, encoder)?, &build_generator(generator)?)?;
    estimate_over_trajectories(trajectories, seed, |rng| {
        let state = run_noisy(&circuit, None, noise, rng)?;
        Ok(2.0 * qubit_zero_probability(&state, 0)? - 1.0)
    })
}

/// For each input size: PCA to `n` features fitted on `reference`, noiseless
/// training on the projected `target` images, then a noisy SWAP-test
/// evaluation averaged over the leading target samples.
pub fn noise_sweep(
    reference: &[Vec<f64>],
    target: &[Vec<f64>],
    sweep: &SweepConfig,
    cfg: &TrainConfig,
) -> Result<Vec<SweepRow>> {
    sweep.validate()?;
    cfg.validate()?;
    if target.is_empty() {
        return Err(invalid("noise sweep target set is empty"));
    }
    let mut rows = Vec::with_capacity(sweep.sizes.len());
    for &n in &sweep.sizes {
        let pca = fit_pca(reference, n)?;
        let coords = target
            .iter()
            .map(|p| pca.project(p))
            .collect::<Result<Vec<_>>>()?;
        let encoder = match cfg.encoder {
            EncoderMode::Trainable => EncoderParams::unit(n),
            EncoderMode::Fixed => EncoderParams::fixed(n),
        };
        let run = TrainConfig {
            n,
            allow_unpretrained: true,
            ..cfg.clone()
        };
        let outcome = train_gan(&coords, &encoder, &run)?;
        let eval = &coords[..sweep.eval_samples.min(coords.len())];
        let generated = build_generator(&outcome.generator)?.run(None)?;
        let (mut mean, mut var, mut exact) = (0.0, 0.0, 0.0);
        for (i, x) in eval.iter().enumerate() {
            let seed = cfg.seed ^ ((n as u64) << 48) ^ ((i as u64) << 32);
            let est = noisy_swap_fidelity(
                x,
                &encoder,
                &outcome.generator,
                &sweep.noise,
                sweep.trajectories,
                seed,
            )?;
            mean += est.mean;
            var += est.std_err * est.std_err;
            exact +=
                crate::qsim::fidelity(&crate::circuits::encode_state(x, &encoder)?, &generated)?;
        }
        let m = eval.len() as f64;
        let row = SweepRow {
            n,
            fidelity: mean / m,
            std_err: var.sqrt() / m,
            noiseless_fidelity: exact / m,
        };
        log::info!(
            "sweep n={n} fidelity {:.6} ± {:.6} (noiseless {:.6})",
            row.fidelity,
            row.std_err,
            row.noiseless_fidelity
        );
        rows.push(row);
    }
    Ok(rows)
}
