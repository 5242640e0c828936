use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::ensemble::{build_ensemble, hs_distance};
use crate::autodiff::{adam_step, AdamState};
use crate::circuits::{EncoderMode, EncoderParams};
use crate::error::{invalid, Error, Result};
use crate::noise::MAX_DENSITY_QUBITS;

#[derive(Debug, Clone, PartialEq)]
pub struct PretrainConfig {
    pub lr: f64,
    pub steps: usize,
    /// Central-difference step on θs.
    pub fd_step: f64,
    /// Per-class subsample drawn once before optimization; `None` keeps all.
    pub max_per_class: Option<usize>,
    pub seed: u64,
}

impl Default for PretrainConfig {
    fn default() -> Self {
        Self {
            lr: 0.01,
            steps: 100,
            fd_step: 1e-5,
            max_per_class: Some(64),
            seed: 0,
        }
    }
}

impl PretrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return Err(invalid(format!(
                "pretrain lr must be positive, got {}",
                self.lr
            )));
        }
        if !(self.fd_step > 0.0 && self.fd_step.is_finite()) {
            return Err(invalid(format!(
                "pretrain fd_step must be positive, got {}",
                self.fd_step
            )));
        }
        if self.max_per_class == Some(0) {
            return Err(invalid("max_per_class must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PretrainResult {
    /// Best scales seen, marked pretrained.
    pub encoder: EncoderParams,
    /// Objective at the start and after every step.
    pub trace: Vec<f64>,
    pub initial_objective: f64,
    pub final_objective: f64,
}

/// `Σ_{i<j} Tr[(σ_i − σ_j)²]` over the class ensembles.
pub fn separation_objective(classes: &[Vec<Vec<f64>>], params: &EncoderParams) -> Result<f64> {
    let ensembles = classes
        .iter()
        .map(|c| build_ensemble(c, params))
        .collect::<Result<Vec<_>>>()?;
    let mut total = 0.0;
    for i in 0..ensembles.len() {
        for j in i + 1..ensembles.len() {
            total += hs_distance(&ensembles[i], &ensembles[j])?;
        }
    }
    Ok(total)
}

/// Gradient ascent of [`separation_objective`] over θs with ADAM. Returns
/// the best scales visited, so the final objective never drops below the
/// initial one.
pub fn pretrain_encoder(
    classes: &[Vec<Vec<f64>>],
    init: &EncoderParams,
    cfg: &PretrainConfig,
) -> Result<PretrainResult> {
    cfg.validate()?;
    if init.mode != EncoderMode::Trainable {
        return Err(invalid("only the trainable encoder can be pretrained"));
    }
    if classes.len() < 2 {
        return Err(invalid(format!(
            "pretraining needs at least 2 classes, got {}",
            classes.len()
        )));
    }
    let n = init.n();
    if n > MAX_DENSITY_QUBITS {
        return Err(invalid(format!(
            "pretraining supports n ≤ {MAX_DENSITY_QUBITS}, got {n}"
        )));
    }
    for c in classes {
        if c.is_empty() {
            return Err(invalid("pretraining class has no samples"));
        }
        for x in c {
            crate::error::check_len(n, x.len())?;
        }
    }
    let first = &classes[0][0];
    if classes.iter().flatten().all(|x| x == first) {
        return Err(Error::Degenerate(
            "all pretraining samples are identical".into(),
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let subsets: Vec<Vec<Vec<f64>>> = classes
        .iter()
        .map(|c| match cfg.max_per_class {
            Some(m) if m < c.len() => {
                let mut idx = sample(&mut rng, c.len(), m).into_vec();
                idx.sort_unstable();
                idx.into_iter().map(|i| c[i].clone()).collect()
            }
            _ => c.clone(),
        })
        .collect();

    let objective = |theta: &[f64]| -> Result<f64> {
        let p = EncoderParams {
            theta_s: theta.to_vec(),
            ..init.clone()
        };
        separation_objective(&subsets, &p)
    };

    let mut theta = init.theta_s.clone();
    let initial = objective(&theta)?;
    let mut best = (initial, theta.clone());
    let mut trace = Vec::with_capacity(cfg.steps + 1);
    trace.push(initial);
    let mut adam = AdamState::new(n, cfg.lr);
    for step in 0..cfg.steps {
        let mut neg_grad = vec![0.0; n];
        for i in 0..n {
            let mut probe = theta.clone();
            probe[i] = theta[i] + cfg.fd_step;
            let up = objective(&probe)?;
            probe[i] = theta[i] - cfg.fd_step;
            let down = objective(&probe)?;
            neg_grad[i] = -(up - down) / (2.0 * cfg.fd_step);
        }
        adam_step(&mut adam, &mut theta, &neg_grad, cfg.lr)?;
        let value = objective(&theta)?;
        if !value.is_finite() {
            return Err(Error::Numeric(format!(
                "separation objective is {value} at step {step}"
            )));
        }
        log::debug!("pretrain step {} objective {value:.6}", step + 1);
        trace.push(value);
        if value > best.0 + 1e-12 {
            best = (value, theta.clone());
        }
    }
    let encoder = EncoderParams::trainable(best.1)?.mark_pretrained();
    Ok(PretrainResult {
        encoder,
        trace,
        initial_objective: initial,
        final_objective: best.0,
    })
}
