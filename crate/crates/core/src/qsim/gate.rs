use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    H,
    Rx,
    Ry,
    Rz,
    Cnot,
    Iswap,
    Crx,
    Crot,
    Cswap,
}

impl GateKind {
    pub const ALL: [GateKind; 9] = [
        GateKind::H,
        GateKind::Rx,
        GateKind::Ry,
        GateKind::Rz,
        GateKind::Cnot,
        GateKind::Iswap,
        GateKind::Crx,
        GateKind::Crot,
        GateKind::Cswap,
    ];

    pub fn arity(self) -> usize {
        match self {
            GateKind::H | GateKind::Rx | GateKind::Ry | GateKind::Rz => 1,
            GateKind::Cnot | GateKind::Iswap | GateKind::Crx | GateKind::Crot => 2,
            GateKind::Cswap => 3,
        }
    }

    pub fn num_params(self) -> usize {
        match self {
            GateKind::Rx | GateKind::Ry | GateKind::Rz | GateKind::Crx => 1,
            GateKind::Crot => 3,
            GateKind::H | GateKind::Cnot | GateKind::Iswap | GateKind::Cswap => 0,
        }
    }

    /// Whether every angle of this gate enters through a controlled rotation,
    /// whose generator has eigenvalues {0, ±1/2}.
    pub fn is_controlled_rotation(self) -> bool {
        matches!(self, GateKind::Crx | GateKind::Crot)
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::Rx => "RX",
            GateKind::Ry => "RY",
            GateKind::Rz => "RZ",
            GateKind::Cnot => "CNOT",
            GateKind::Iswap => "ISWAP",
            GateKind::Crx => "CRX",
            GateKind::Crot => "CROT",
            GateKind::Cswap => "CSWAP",
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A gate instance: kind, rotation angles and target qubits (controls first).
#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    kind: GateKind,
    params: Vec<f64>,
    targets: Vec<usize>,
}

impl Gate {
    /// Builds a gate after checking arity, parameter count and distinct targets.
    pub fn new(kind: GateKind, params: Vec<f64>, targets: Vec<usize>) -> Result<Self> {
        if targets.len() != kind.arity() {
            return Err(Error::InvalidGate(format!(
                "{kind} acts on {} qubit(s), got {} target(s)",
                kind.arity(),
                targets.len()
            )));
        }
        if params.len() != kind.num_params() {
            return Err(Error::InvalidGate(format!(
                "{kind} takes {} angle(s), got {}",
                kind.num_params(),
                params.len()
            )));
        }
        if let Some(bad) = params.iter().find(|p| !p.is_finite()) {
            return Err(Error::InvalidGate(format!(
                "{kind} angle {bad} is not finite"
            )));
        }
        for (i, t) in targets.iter().enumerate() {
            if targets[..i].contains(t) {
                return Err(Error::DuplicateTarget(*t));
            }
        }
        Ok(Self {
            kind,
            params,
            targets,
        })
    }

    fn unchecked(kind: GateKind, params: Vec<f64>, targets: Vec<usize>) -> Self {
        Self::new(kind, params, targets).expect("gate constructor arguments are well-formed")
    }

    pub fn h(q: usize) -> Self {
        Self::unchecked(GateKind::H, vec![], vec![q])
    }
    pub fn rx(theta: f64, q: usize) -> Self {
        Self::unchecked(GateKind::Rx, vec![theta], vec![q])
    }
    pub fn ry(theta: f64, q: usize) -> Self {
        Self::unchecked(GateKind::Ry, vec![theta], vec![q])
    }
    pub fn rz(theta: f64, q: usize) -> Self {
        Self::unchecked(GateKind::Rz, vec![theta], vec![q])
    }
    pub fn cnot(control: usize, target: usize) -> Self {
        Self::unchecked(GateKind::Cnot, vec![], vec![control, target])
    }
    pub fn iswap(a: usize, b: usize) -> Self {
        Self::unchecked(GateKind::Iswap, vec![], vec![a, b])
    }
    pub fn crx(theta: f64, control: usize, target: usize) -> Self {
        Self::unchecked(GateKind::Crx, vec![theta], vec![control, target])
    }
    pub fn crot(phi: f64, theta: f64, omega: f64, control: usize, target: usize) -> Self {
        Self::unchecked(
            GateKind::Crot,
            vec![phi, theta, omega],
            vec![control, target],
        )
    }
    pub fn cswap(control: usize, a: usize, b: usize) -> Self {
        Self::unchecked(GateKind::Cswap, vec![], vec![control, a, b])
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    /// Replaces one angle in place. Panics if `index` is not a valid angle slot.
    pub(crate) fn set_param(&mut self, index: usize, value: f64) {
        self.params[index] = value;
    }

    /// Same gate acting on targets shifted by `offset`.
    pub fn offset(&self, offset: usize) -> Self {
        Self {
            kind: self.kind,
            params: self.params.clone(),
            targets: self.targets.iter().map(|t| t + offset).collect(),
        }
    }

    pub fn matrix(&self) -> GateMatrix {
        gate_matrix(self)
    }
}

/// Dense row-major square complex matrix of a k-qubit gate.
#[derive(Debug, Clone, PartialEq)]
pub struct GateMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl GateMatrix {
    fn from_rows<const D: usize>(rows: [[Complex64; D]; D]) -> Self {
        Self {
            dim: D,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    fn controlled(u: [[Complex64; 2]; 2]) -> Self {
        Self::from_rows([
            [ONE, ZERO, ZERO, ZERO],
            [ZERO, ONE, ZERO, ZERO],
            [ZERO, ZERO, u[0][0], u[0][1]],
            [ZERO, ZERO, u[1][0], u[1][1]],
        ])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    /// Max-abs deviation of U†U from the identity.
    pub fn unitarity_error(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let mut acc = ZERO;
                for k in 0..d {
                    acc += self.get(k, i).conj() * self.get(k, j);
                }
                let expected = if i == j { ONE } else { ZERO };
                worst = worst.max((acc - expected).norm());
            }
        }
        worst
    }
}

fn rx(theta: f64) -> [[Complex64; 2]; 2] {
    let (s, c) = (theta / 2.0).sin_cos();
    [[c.into(), -I * s], [-I * s, c.into()]]
}

fn ry(theta: f64) -> [[Complex64; 2]; 2] {
    let (s, c) = (theta / 2.0).sin_cos();
    [[c.into(), (-s).into()], [s.into(), c.into()]]
}

fn rz(theta: f64) -> [[Complex64; 2]; 2] {
    [
        [Complex64::from_polar(1.0, -theta / 2.0), ZERO],
        [ZERO, Complex64::from_polar(1.0, theta / 2.0)],
    ]
}

fn matmul2(a: [[Complex64; 2]; 2], b: [[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
    let mut out = [[ZERO; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// Unitary of a gate on its own targets, first target = most significant bit.
///
/// Rotations are `exp(-iθP/2)`; `CROT(φ, θ, ω)` applies `RZ(ω)·RY(θ)·RZ(φ)` to
/// the target when the control is set.
pub fn gate_matrix(gate: &Gate) -> GateMatrix {
    let p = &gate.params;
    match gate.kind {
        GateKind::H => {
            let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            GateMatrix::from_rows([[h, h], [h, -h]])
        }
        GateKind::Rx => GateMatrix::from_rows(rx(p[0])),
        GateKind::Ry => GateMatrix::from_rows(ry(p[0])),
        GateKind::Rz => GateMatrix::from_rows(rz(p[0])),
        GateKind::Cnot => GateMatrix::controlled([[ZERO, ONE], [ONE, ZERO]]),
        GateKind::Iswap => GateMatrix::from_rows([
            [ONE, ZERO, ZERO, ZERO],
            [ZERO, ZERO, I, ZERO],
            [ZERO, I, ZERO, ZERO],
            [ZERO, ZERO, ZERO, ONE],
        ]),
        GateKind::Crx => GateMatrix::controlled(rx(p[0])),
        GateKind::Crot => GateMatrix::controlled(matmul2(rz(p[2]), matmul2(ry(p[1]), rz(p[0])))),
        GateKind::Cswap => {
            let mut data = vec![ZERO; 64];
            for col in 0..8usize {
                let row = match col {
                    0b101 => 0b110,
                    0b110 => 0b101,
                    other => other,
                };
                data[row * 8 + col] = ONE;
            }
            GateMatrix { dim: 8, data }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn ry_zero_is_identity() {
        let m = gate_matrix(&Gate::ry(0.0, 0));
        assert!(close(m.get(0, 0), ONE) && close(m.get(1, 1), ONE));
        assert!(close(m.get(0, 1), ZERO) && close(m.get(1, 0), ZERO));
    }

    #[test]
    fn cnot_swaps_10_and_11() {
        let m = gate_matrix(&Gate::cnot(0, 1));
        for (col, row) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
            assert!(close(m.get(row, col), ONE));
        }
    }

    #[test]
    fn iswap_maps_01_to_i_10() {
        let m = gate_matrix(&Gate::iswap(0, 1));
        // column |01> = index 1, row |10> = index 2
        assert!(close(m.get(2, 1), I));
        for row in [0, 1, 3] {
            assert!(close(m.get(row, 1), ZERO));
        }
    }

    #[test]
    fn crot_reduces_to_crx_like_when_only_theta() {
        // CROT(0, θ, 0) = controlled RY(θ)
        let m = gate_matrix(&Gate::crot(0.0, 0.7, 0.0, 0, 1));
        let r = ry(0.7);
        assert!(close(m.get(2, 2), r[0][0]) && close(m.get(3, 2), r[1][0]));
        assert!(close(m.get(0, 0), ONE));
    }

    #[test]
    fn all_kinds_unitary() {
        let gates = [
            Gate::h(0),
            Gate::rx(1.3, 0),
            Gate::ry(-2.1, 0),
            Gate::rz(PI / 3.0, 0),
            Gate::cnot(0, 1),
            Gate::iswap(0, 1),
            Gate::crx(0.4, 0, 1),
            Gate::crot(0.3, -1.2, 2.5, 0, 1),
            Gate::cswap(0, 1, 2),
        ];
        for g in &gates {
            assert!(g.matrix().unitarity_error() < 1e-12, "{}", g.kind());
        }
    }

    #[test]
    fn malformed_gates_rejected() {
        assert!(matches!(
            Gate::new(GateKind::Cnot, vec![], vec![0]),
            Err(Error::InvalidGate(_))
        ));
        assert!(matches!(
            Gate::new(GateKind::Ry, vec![], vec![0]),
            Err(Error::InvalidGate(_))
        ));
        assert!(matches!(
            Gate::new(GateKind::Crot, vec![1.0], vec![0, 1]),
            Err(Error::InvalidGate(_))
        ));
        assert!(matches!(
            Gate::new(GateKind::Cswap, vec![], vec![0, 1, 1]),
            Err(Error::DuplicateTarget(1))
        ));
        assert!(Gate::new(GateKind::Rz, vec![f64::NAN], vec![0]).is_err());
    }
}
