use crate::circuits::{encode_state, EncoderParams};
use crate::error::{invalid, Error, Result};
use crate::noise::DensityMatrix;

/// Uniform mixture of the encoded states of one class.
pub fn build_ensemble(samples: &[Vec<f64>], params: &EncoderParams) -> Result<DensityMatrix> {
    if samples.is_empty() {
        return Err(invalid("cannot build an ensemble from an empty class"));
    }
    let states = samples
        .iter()
        .map(|x| encode_state(x, params))
        .collect::<Result<Vec<_>>>()?;
    DensityMatrix::mixture(&states)
}

/// Hilbert–Schmidt distance `Tr[(ρ − σ)²]`.
pub fn hs_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: sigma.dim(),
        });
    }
    // (ρ − σ) is Hermitian, so Tr[(ρ − σ)²] = Σ |Δ_ij|².
    let diff = rho.entries() - sigma.entries();
    Ok(diff.iter().map(|z| z.norm_sqr()).sum())
}
