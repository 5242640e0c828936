use num_complex::Complex64;

use super::gate::{gate_matrix, Gate, GateKind};
use crate::error::{invalid, Error, Result};

/// Pure state of `num_qubits` qubits. Qubit 0 is the most significant bit of
/// the basis-state index.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// |0…0⟩ on `num_qubits` qubits.
    pub fn zero(num_qubits: usize) -> Result<Self> {
        Self::basis(num_qubits, 0)
    }

    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        if num_qubits == 0 || num_qubits > 30 {
            return Err(invalid(format!("unsupported register size {num_qubits}")));
        }
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(invalid(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    /// Wraps explicit amplitudes; the length must be a power of two and the
    /// vector normalized within 1e-10.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let dim = amplitudes.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(invalid(format!(
                "amplitude count {dim} is not a power of two ≥ 2"
            )));
        }
        let state = Self {
            num_qubits: dim.trailing_zeros() as usize,
            amplitudes,
        };
        let norm = state.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::Numeric(format!("state norm {norm} differs from 1")));
        }
        Ok(state)
    }

    /// Tensor product `self ⊗ other`; `self` occupies the leading qubits.
    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let mut amplitudes = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            amplitudes.extend(other.amplitudes.iter().map(|b| a * b));
        }
        StateVector {
            num_qubits: self.num_qubits + other.num_qubits,
            amplitudes,
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    #[inline]
    pub(crate) fn bit(&self, qubit: usize) -> usize {
        1 << (self.num_qubits - 1 - qubit)
    }

    pub(crate) fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit < self.num_qubits {
            Ok(())
        } else {
            Err(Error::QubitOutOfRange {
                index: qubit,
                num_qubits: self.num_qubits,
            })
        }
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits,
                found: other.num_qubits,
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Applies `gate` in place.
    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        for &t in gate.targets() {
            self.check_qubit(t)?;
        }
        match gate.kind() {
            GateKind::Cnot => {
                let (c, t) = (self.bit(gate.targets()[0]), self.bit(gate.targets()[1]));
                for s in 0..self.dim() {
                    if s & c != 0 && s & t == 0 {
                        self.amplitudes.swap(s, s | t);
                    }
                }
            }
            GateKind::Cswap => {
                let c = self.bit(gate.targets()[0]);
                let (a, b) = (self.bit(gate.targets()[1]), self.bit(gate.targets()[2]));
                for s in 0..self.dim() {
                    if s & c != 0 && s & a != 0 && s & b == 0 {
                        self.amplitudes.swap(s, (s & !a) | b);
                    }
                }
            }
            _ if gate.targets().len() == 1 => {
                let m = gate_matrix(gate);
                let m = [m.get(0, 0), m.get(0, 1), m.get(1, 0), m.get(1, 1)];
                self.apply_single(gate.targets()[0], m);
            }
            _ => self.apply_dense(gate),
        }
        Ok(())
    }

    fn apply_single(&mut self, qubit: usize, m: [Complex64; 4]) {
        let step = self.bit(qubit);
        let dim = self.dim();
        let mut base = 0;
        while base < dim {
            for s in base..base + step {
                let a0 = self.amplitudes[s];
                let a1 = self.amplitudes[s + step];
                self.amplitudes[s] = m[0] * a0 + m[1] * a1;
                self.amplitudes[s + step] = m[2] * a0 + m[3] * a1;
            }
            base += 2 * step;
        }
    }

    fn apply_dense(&mut self, gate: &Gate) {
        let m = gate_matrix(gate);
        let k = gate.targets().len();
        let local = 1usize << k;
        let bits: Vec<usize> = gate.targets().iter().map(|&t| self.bit(t)).collect();
        let offsets: Vec<usize> = (0..local)
            .map(|l| {
                bits.iter()
                    .enumerate()
                    .filter(|(j, _)| (l >> (k - 1 - j)) & 1 == 1)
                    .map(|(_, b)| b)
                    .sum()
            })
            .collect();
        let mask: usize = bits.iter().sum();
        let mut scratch = vec![Complex64::new(0.0, 0.0); local];
        for s in (0..self.dim()).filter(|s| s & mask == 0) {
            for (l, off) in offsets.iter().enumerate() {
                scratch[l] = self.amplitudes[s | off];
            }
            for (row, off) in offsets.iter().enumerate() {
                let coeffs = &m.as_slice()[row * local..(row + 1) * local];
                self.amplitudes[s | off] = coeffs.iter().zip(&scratch).map(|(c, a)| c * a).sum();
            }
        }
    }

    /// Pauli X on one qubit.
    pub fn apply_x(&mut self, qubit: usize) -> Result<()> {
        self.check_qubit(qubit)?;
        let b = self.bit(qubit);
        for s in 0..self.dim() {
            if s & b == 0 {
                self.amplitudes.swap(s, s | b);
            }
        }
        Ok(())
    }

    /// Pauli Z on one qubit.
    pub fn apply_z(&mut self, qubit: usize) -> Result<()> {
        self.check_qubit(qubit)?;
        let b = self.bit(qubit);
        for (s, a) in self.amplitudes.iter_mut().enumerate() {
            if s & b != 0 {
                *a = -*a;
            }
        }
        Ok(())
    }
}

/// Functional form of [`StateVector::apply`].
pub fn apply_gate(state: &StateVector, gate: &Gate) -> Result<StateVector> {
    let mut out = state.clone();
    out.apply(gate)?;
    Ok(out)
}

/// Squared overlap |⟨a|b⟩|², clamped to [0, 1] against rounding.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr().clamp(0.0, 1.0))
}
