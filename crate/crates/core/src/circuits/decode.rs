use std::f64::consts::PI;

use super::encoder::{EncoderMode, EncoderParams};
use crate::data::PcaModel;
use crate::error::{invalid, Result};
use crate::qsim::{
    qubit_zero_probability, sample_measurements, x_expectation, Gate, MeasurementCounts,
    StateVector,
};

/// Inverts the encoding map qubit by qubit from measured marginals.
///
/// Trainable mode: with `p` the zero-probability and `α = 2·arccos(√p)`,
/// `x̂ = ±sin(α)/θs`, clamped to [−1, 1]. The sign is read from ⟨X⟩ on the
/// same qubit since `p` alone cannot distinguish `RY(α)` from `RY(−α)`.
/// Fixed mode: `x̂ = 2α/π − 1`.
pub fn decode_features(state: &StateVector, params: &EncoderParams) -> Result<Vec<f64>> {
    let probs: Vec<f64> = (0..params.n())
        .map(|q| qubit_zero_probability(state, q))
        .collect::<Result<_>>()?;
    let signs: Vec<f64> = (0..params.n())
        .map(|q| x_expectation(state, q).map(|x| if x < 0.0 { -1.0 } else { 1.0 }))
        .collect::<Result<_>>()?;
    decode_from_marginals(&probs, &signs, params)
}

/// Same chain as [`decode_features`] starting from per-qubit zero
/// probabilities and X-basis signs (±1), e.g. estimated from finite shots.
pub fn decode_from_marginals(
    probs: &[f64],
    signs: &[f64],
    params: &EncoderParams,
) -> Result<Vec<f64>> {
    crate::error::check_len(params.n(), probs.len())?;
    crate::error::check_len(params.n(), signs.len())?;
    if params.mode == EncoderMode::Trainable {
        if let Some(i) = params.theta_s.iter().position(|&t| t == 0.0) {
            return Err(invalid(format!(
                "encoder scale θs[{i}] is zero; encoding is not invertible"
            )));
        }
    }
    Ok(probs
        .iter()
        .zip(signs)
        .zip(&params.theta_s)
        .map(|((&p, &sign), &scale)| {
            let alpha = 2.0 * p.clamp(0.0, 1.0).sqrt().acos();
            match params.mode {
                EncoderMode::Trainable => (sign * alpha.sin() / scale).clamp(-1.0, 1.0),
                EncoderMode::Fixed => (2.0 * alpha / PI - 1.0).clamp(-1.0, 1.0),
            }
        })
        .collect())
}

/// Decoded features mapped back to image space through inverse PCA.
pub fn decode_generated(
    state: &StateVector,
    params: &EncoderParams,
    pca: &PcaModel,
) -> Result<Vec<f64>> {
    let features = decode_features(state, params)?;
    pca.reconstruct(&features)
}

/// Finite-shot variant of [`decode_generated`]: `shots` Z-basis samples
/// estimate the zero-probabilities and `shots` X-basis samples the signs.
pub fn decode_sampled(
    state: &StateVector,
    params: &EncoderParams,
    pca: &PcaModel,
    shots: u64,
    seed: u64,
) -> Result<Vec<f64>> {
    let n = params.n();
    crate::error::check_len(n, state.num_qubits())?;
    let zero_freq = |counts: &MeasurementCounts| -> Vec<f64> {
        (0..n)
            .map(|q| {
                let zeros: u64 = counts
                    .counts
                    .iter()
                    .filter(|(bits, _)| bits.as_bytes()[q] == b'0')
                    .map(|(_, c)| c)
                    .sum();
                zeros as f64 / counts.shots as f64
            })
            .collect()
    };
    let probs = zero_freq(&sample_measurements(state, shots, seed)?);
    let mut rotated = state.clone();
    for q in 0..n {
        rotated.apply(&Gate::h(q))?;
    }
    let signs = zero_freq(&sample_measurements(
        &rotated,
        shots,
        seed ^ 0x5851_F42D_4C95_7F2D,
    )?)
    .into_iter()
    .map(|p_plus| if p_plus < 0.5 { -1.0 } else { 1.0 })
    .collect::<Vec<_>>();
    pca.reconstruct(&decode_from_marginals(&probs, &signs, params)?)
}
