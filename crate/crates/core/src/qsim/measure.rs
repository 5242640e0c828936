use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::state::StateVector;
use crate::error::{invalid, Result};

/// Marginal probability of reading 0 on `qubit`.
pub fn qubit_zero_probability(state: &StateVector, qubit: usize) -> Result<f64> {
    state.check_qubit(qubit)?;
    let b = state.bit(qubit);
    let p: f64 = state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(s, _)| s & b == 0)
        .map(|(_, a)| a.norm_sqr())
        .sum();
    Ok(p.clamp(0.0, 1.0))
}

/// ⟨X⟩ on `qubit`, i.e. 2·Re Σ conj(a_s0)·a_s1 over pairs differing on that qubit.
pub fn x_expectation(state: &StateVector, qubit: usize) -> Result<f64> {
    state.check_qubit(qubit)?;
    let b = state.bit(qubit);
    let amps = state.amplitudes();
    let mut acc = 0.0;
    for s in (0..amps.len()).filter(|s| s & b == 0) {
        acc += (amps[s].conj() * amps[s | b]).re;
    }
    Ok(2.0 * acc)
}

/// Finite-shot computational-basis measurement outcomes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasurementCounts {
    pub shots: u64,
    /// Bitstrings with qubit 0 leftmost.
    pub counts: BTreeMap<String, u64>,
}

impl MeasurementCounts {
    pub fn get(&self, bitstring: &str) -> u64 {
        self.counts.get(bitstring).copied().unwrap_or(0)
    }
}

pub fn sample_measurements(
    state: &StateVector,
    shots: u64,
    seed: u64,
) -> Result<MeasurementCounts> {
    if shots == 0 {
        return Err(invalid("shots must be at least 1"));
    }
    let mut cumulative = Vec::with_capacity(state.dim());
    let mut total = 0.0;
    for p in state.probabilities() {
        total += p;
        cumulative.push(total);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = vec![0u64; state.dim()];
    for _ in 0..shots {
        let r = rng.random::<f64>() * total;
        let idx = cumulative.partition_point(|&c| c <= r).min(state.dim() - 1);
        hits[idx] += 1;
    }
    let n = state.num_qubits();
    let counts = hits
        .into_iter()
        .enumerate()
        .filter(|(_, c)| *c > 0)
        .map(|(idx, c)| (format!("{idx:0n$b}"), c))
        .collect();
    Ok(MeasurementCounts { shots, counts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::{apply_gate, Gate};
    use std::f64::consts::PI;

    #[test]
    fn zero_probability_examples() {
        let zero = StateVector::zero(1).unwrap();
        assert_eq!(qubit_zero_probability(&zero, 0).unwrap(), 1.0);
        let plus = apply_gate(&zero, &Gate::h(0)).unwrap();
        assert!((qubit_zero_probability(&plus, 0).unwrap() - 0.5).abs() < 1e-15);
        let r = apply_gate(&zero, &Gate::ry(PI / 3.0, 0)).unwrap();
        assert!((qubit_zero_probability(&r, 0).unwrap() - 0.75).abs() < 1e-15);
        assert!(qubit_zero_probability(&zero, 1).is_err());
    }

    #[test]
    fn x_expectation_of_ry_is_sine() {
        let s = apply_gate(&StateVector::zero(2).unwrap(), &Gate::ry(-0.8, 1)).unwrap();
        assert!((x_expectation(&s, 1).unwrap() - (-0.8f64).sin()).abs() < 1e-14);
        assert!(x_expectation(&s, 0).unwrap().abs() < 1e-15);
    }

    #[test]
    fn deterministic_basis_state_sampling() {
        let one = StateVector::basis(1, 1).unwrap();
        let counts = sample_measurements(&one, 100, 7).unwrap();
        assert_eq!(counts.get("1"), 100);
        assert_eq!(counts.counts.len(), 1);
        assert!(sample_measurements(&one, 0, 7).is_err());
    }

    #[test]
    fn bell_state_sampling_is_binomial() {
        let mut bell = StateVector::zero(2).unwrap();
        bell.apply(&Gate::h(0)).unwrap();
        bell.apply(&Gate::cnot(0, 1)).unwrap();
        let counts = sample_measurements(&bell, 10_000, 42).unwrap();
        assert_eq!(counts.get("00") + counts.get("11"), 10_000);
        // σ = sqrt(10⁴ · 0.25) = 50
        for key in ["00", "11"] {
            assert!((counts.get(key) as f64 - 5000.0).abs() < 5.0 * 50.0);
        }
        assert_eq!(counts, sample_measurements(&bell, 10_000, 42).unwrap());
    }
}
