use nalgebra::DMatrix;
use num_complex::Complex64;

use super::NoiseSpec;
use crate::error::{invalid, Error, Result};
use crate::qsim::{gate_matrix, Circuit, Gate, StateVector};

/// Largest register handled by the density-matrix routines.
pub const MAX_DENSITY_QUBITS: usize = 4;

/// Mixed state on at most [`MAX_DENSITY_QUBITS`] qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    num_qubits: usize,
    entries: DMatrix<Complex64>,
}

fn check_size(num_qubits: usize) -> Result<()> {
    if num_qubits == 0 || num_qubits > MAX_DENSITY_QUBITS {
        return Err(invalid(format!(
            "density matrices support 1..={MAX_DENSITY_QUBITS} qubits, got {num_qubits}"
        )));
    }
    Ok(())
}

impl DensityMatrix {
    /// |ψ⟩⟨ψ|.
    pub fn from_pure(state: &StateVector) -> Result<Self> {
        check_size(state.num_qubits())?;
        let dim = state.dim();
        let a = state.amplitudes();
        let entries = DMatrix::from_fn(dim, dim, |i, j| a[i] * a[j].conj());
        Ok(Self {
            num_qubits: state.num_qubits(),
            entries,
        })
    }

    /// Uniform mixture of pure states.
    pub fn mixture(states: &[StateVector]) -> Result<Self> {
        let first = states
            .first()
            .ok_or_else(|| invalid("cannot mix an empty set of states"))?;
        let mut acc = Self::from_pure(first)?;
        for s in &states[1..] {
            crate::error::check_len(acc.num_qubits, s.num_qubits())?;
            acc.entries += Self::from_pure(s)?.entries;
        }
        acc.entries /= Complex64::new(states.len() as f64, 0.0);
        Ok(acc)
    }

    pub fn from_entries(num_qubits: usize, entries: DMatrix<Complex64>) -> Result<Self> {
        check_size(num_qubits)?;
        let dim = 1 << num_qubits;
        if entries.nrows() != dim || entries.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: entries.nrows(),
            });
        }
        Ok(Self {
            num_qubits,
            entries,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[(row, col)]
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    pub fn purity(&self) -> f64 {
        (&self.entries * &self.entries).trace().re
    }

    /// Max-abs deviation from Hermiticity.
    pub fn hermiticity_error(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                worst = worst.max((self.entries[(i, j)] - self.entries[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.entries + self.entries.adjoint()) * Complex64::new(0.5, 0.0);
        herm.symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Checks Hermiticity, unit trace and positive semidefiniteness.
    pub fn validate(&self) -> Result<()> {
        let herm = self.hermiticity_error();
        if herm > 1e-10 {
            return Err(Error::Numeric(format!(
                "density matrix not Hermitian (error {herm:e})"
            )));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
            return Err(Error::Numeric(format!(
                "density matrix trace {tr} differs from 1"
            )));
        }
        let min = self.min_eigenvalue();
        if min < -1e-9 {
            return Err(Error::Numeric(format!(
                "density matrix has negative eigenvalue {min:e}"
            )));
        }
        Ok(())
    }

    /// ⟨ψ|ρ|ψ⟩.
    pub fn fidelity_with_pure(&self, state: &StateVector) -> Result<f64> {
        crate::error::check_len(self.num_qubits, state.num_qubits())?;
        let a = state.amplitudes();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                acc += a[i].conj() * self.entries[(i, j)] * a[j];
            }
        }
        Ok(acc.re)
    }

    fn bit(&self, qubit: usize) -> usize {
        1 << (self.num_qubits - 1 - qubit)
    }

    /// Full-register unitary of `gate`, assembled entry by entry from the
    /// gate matrix (independent of the statevector kernel).
    fn embed(&self, gate: &Gate) -> Result<DMatrix<Complex64>> {
        for &t in gate.targets() {
            if t >= self.num_qubits {
                return Err(Error::QubitOutOfRange {
                    index: t,
                    num_qubits: self.num_qubits,
                });
            }
        }
        let m = gate_matrix(gate);
        let bits: Vec<usize> = gate.targets().iter().map(|&t| self.bit(t)).collect();
        let mask: usize = bits.iter().sum();
        let local = |idx: usize| {
            bits.iter()
                .fold(0usize, |acc, b| (acc << 1) | usize::from(idx & b != 0))
        };
        let dim = self.dim();
        Ok(DMatrix::from_fn(dim, dim, |i, j| {
            if i & !mask == j & !mask {
                m.get(local(i), local(j))
            } else {
                Complex64::new(0.0, 0.0)
            }
        }))
    }

    pub fn apply_unitary(&mut self, gate: &Gate) -> Result<()> {
        let u = self.embed(gate)?;
        self.entries = &u * &self.entries * u.adjoint();
        Ok(())
    }

    /// ρ → (1−p)ρ + p·XρX on `qubit`.
    pub fn apply_bit_flip(&mut self, qubit: usize, p: f64) {
        let b = self.bit(qubit);
        let flipped = DMatrix::from_fn(self.dim(), self.dim(), |i, j| self.entries[(i ^ b, j ^ b)]);
        self.entries =
            &self.entries * Complex64::new(1.0 - p, 0.0) + flipped * Complex64::new(p, 0.0);
    }

    /// ρ → (1−p)ρ + p·ZρZ on `qubit`.
    pub fn apply_phase_flip(&mut self, qubit: usize, p: f64) {
        let b = self.bit(qubit);
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                if ((i & b) != 0) != ((j & b) != 0) {
                    self.entries[(i, j)] *= 1.0 - 2.0 * p;
                }
            }
        }
    }
}

/// Exact evolution of |0…0⟩⟨0…0| through `circuit` with the same layer-wise
/// error insertion as the trajectory simulator.
pub fn density_evolve(circuit: &Circuit, spec: &NoiseSpec) -> Result<DensityMatrix> {
    spec.validate()?;
    check_size(circuit.num_qubits())?;
    let mut rho = DensityMatrix::from_pure(&StateVector::zero(circuit.num_qubits())?)?;
    for layer in circuit.layers() {
        let mut touched = Vec::new();
        for &gi in &layer {
            let g = &circuit.gates()[gi];
            rho.apply_unitary(g)?;
            touched.extend_from_slice(g.targets());
        }
        touched.sort_unstable();
        for q in touched {
            rho.apply_bit_flip(q, spec.p_bit);
            rho.apply_phase_flip(q, spec.p_phase);
        }
    }
    Ok(rho)
}

/// Reduced state of `keep` (in the listed order) after tracing out the rest.
pub fn reduced_density(state: &StateVector, keep: &[usize]) -> Result<DensityMatrix> {
    check_size(keep.len())?;
    for &q in keep {
        state.check_qubit(q)?;
    }
    let n = state.num_qubits();
    let bits: Vec<usize> = keep.iter().map(|&q| 1 << (n - 1 - q)).collect();
    let mask: usize = bits.iter().sum();
    let local = |idx: usize| {
        bits.iter()
            .fold(0usize, |acc, b| (acc << 1) | usize::from(idx & b != 0))
    };
    let dim = 1 << keep.len();
    let a = state.amplitudes();
    let mut entries = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    for i in 0..a.len() {
        for j in 0..a.len() {
            if i & !mask == j & !mask {
                entries[(local(i), local(j))] += a[i] * a[j].conj();
            }
        }
    }
    DensityMatrix::from_entries(keep.len(), entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_noise_gives_projector_on_output() {
        let mut c = Circuit::new(2);
        c.push(Gate::h(0))
            .unwrap()
            .push(Gate::iswap(0, 1))
            .unwrap()
            .push(Gate::crot(0.1, 0.7, -0.4, 1, 0))
            .unwrap();
        let rho = density_evolve(&c, &NoiseSpec::none()).unwrap();
        let psi = c.run(None).unwrap();
        let expected = DensityMatrix::from_pure(&psi).unwrap();
        assert!((rho.entries() - expected.entries()).norm() < 1e-12);
        assert!((rho.purity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn full_dephasing_of_plus_state() {
        let mut c = Circuit::new(1);
        c.push(Gate::h(0)).unwrap();
        let rho = density_evolve(&c, &NoiseSpec::new(0.0, 0.5).unwrap()).unwrap();
        for (i, j, v) in [(0, 0, 0.5), (1, 1, 0.5), (0, 1, 0.0), (1, 0, 0.0)] {
            assert!((rho.get(i, j) - Complex64::new(v, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn bit_flip_on_ground_state() {
        let mut c = Circuit::new(1);
        c.push(Gate::ry(0.0, 0)).unwrap();
        let rho = density_evolve(&c, &NoiseSpec::new(0.1, 0.0).unwrap()).unwrap();
        assert!((rho.get(0, 0).re - 0.9).abs() < 1e-15);
        assert!((rho.get(1, 1).re - 0.1).abs() < 1e-15);
        rho.validate().unwrap();
    }

    #[test]
    fn noisy_evolution_stays_physical() {
        let mut c = Circuit::new(3);
        c.push(Gate::h(0))
            .unwrap()
            .push(Gate::rx(0.8, 1))
            .unwrap()
            .push(Gate::cswap(0, 1, 2))
            .unwrap();
        c.push(Gate::crx(1.9, 2, 0))
            .unwrap()
            .push(Gate::h(0))
            .unwrap();
        let rho = density_evolve(&c, &NoiseSpec::new(0.13, 0.27).unwrap()).unwrap();
        rho.validate().unwrap();
    }

    #[test]
    fn too_many_qubits_rejected() {
        let c = Circuit::new(5);
        assert!(density_evolve(&c, &NoiseSpec::none()).is_err());
    }

    #[test]
    fn reduced_state_of_product_is_pure() {
        let mut c = Circuit::new(3);
        c.push(Gate::ry(0.4, 0))
            .unwrap()
            .push(Gate::ry(1.4, 2))
            .unwrap()
            .push(Gate::rz(0.2, 2))
            .unwrap();
        let s = c.run(None).unwrap();
        assert!((reduced_density(&s, &[0, 2]).unwrap().purity() - 1.0).abs() < 1e-12);
        let mut bell = Circuit::new(2);
        bell.push(Gate::h(0))
            .unwrap()
            .push(Gate::cnot(0, 1))
            .unwrap();
        let s = bell.run(None).unwrap();
        assert!((reduced_density(&s, &[1]).unwrap().purity() - 0.5).abs() < 1e-12);
    }
}
