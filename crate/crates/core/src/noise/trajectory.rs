use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::NoiseSpec;
use crate::error::{invalid, Result};
use crate::qsim::{fidelity, Circuit, StateVector};

/// Mean of a per-trajectory observable with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoisyEstimate {
    pub mean: f64,
    pub std_err: f64,
    pub trajectories: usize,
}

/// Independent generator for trajectory `index` under `seed`.
pub fn trajectory_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Samples one flip pattern on `qubits`: X with probability `p_bit`, then Z
/// with probability `p_phase`, independently per qubit. Two uniforms are
/// drawn per qubit regardless of outcome.
pub fn apply_flip_trajectory<R: Rng + ?Sized>(
    state: &mut StateVector,
    spec: &NoiseSpec,
    qubits: &[usize],
    rng: &mut R,
) -> Result<()> {
    for &q in qubits {
        let flip_bit = rng.random::<f64>() < spec.p_bit;
        let flip_phase = rng.random::<f64>() < spec.p_phase;
        if flip_bit {
            state.apply_x(q)?;
        }
        if flip_phase {
            state.apply_z(q)?;
        }
    }
    Ok(())
}

/// Runs `circuit` layer by layer, inserting flip errors after each layer on
/// the qubits that layer touched.
pub fn run_noisy<R: Rng + ?Sized>(
    circuit: &Circuit,
    initial: Option<&StateVector>,
    spec: &NoiseSpec,
    rng: &mut R,
) -> Result<StateVector> {
    let mut state = match initial {
        Some(s) => {
            crate::error::check_len(circuit.num_qubits(), s.num_qubits())?;
            s.clone()
        }
        None => StateVector::zero(circuit.num_qubits())?,
    };
    if spec.is_noiseless() {
        for g in circuit.gates() {
            state.apply(g)?;
        }
        return Ok(state);
    }
    let mut touched = Vec::with_capacity(circuit.num_qubits());
    for layer in circuit.layers() {
        touched.clear();
        for &gi in &layer {
            let g = &circuit.gates()[gi];
            state.apply(g)?;
            touched.extend_from_slice(g.targets());
        }
        touched.sort_unstable();
        apply_flip_trajectory(&mut state, spec, &touched, rng)?;
    }
    Ok(state)
}

/// Averages `observable` over `trajectories` independent runs. Per-trajectory
/// seeds derive from `seed`; the summation order is fixed so the result does
/// not depend on scheduling.
pub fn estimate_over_trajectories<F>(
    trajectories: usize,
    seed: u64,
    observable: F,
) -> Result<NoisyEstimate>
where
    F: Fn(&mut ChaCha8Rng) -> Result<f64> + Sync,
{
    if trajectories == 0 {
        return Err(invalid("trajectories must be at least 1"));
    }
    let values: Vec<f64> = (0..trajectories as u64)
        .into_par_iter()
        .map(|t| observable(&mut trajectory_rng(seed, t)))
        .collect::<Result<_>>()?;
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std_err = if values.len() > 1 {
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    Ok(NoisyEstimate {
        mean,
        std_err,
        trajectories,
    })
}

/// Mean fidelity between noisy runs of `circuit` (from |0…0⟩) and `reference`.
pub fn noisy_fidelity(
    circuit: &Circuit,
    reference: &StateVector,
    spec: &NoiseSpec,
    trajectories: usize,
    seed: u64,
) -> Result<NoisyEstimate> {
    spec.validate()?;
    crate::error::check_len(circuit.num_qubits(), reference.num_qubits())?;
    estimate_over_trajectories(trajectories, seed, |rng| {
        let out = run_noisy(circuit, None, spec, rng)?;
        fidelity(&out, reference)
    })
}
