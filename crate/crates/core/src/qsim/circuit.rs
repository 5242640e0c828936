use std::fmt::Write as _;

use super::gate::{Gate, GateKind};
use super::state::StateVector;
use crate::error::{Error, Result};

/// Location of a trainable angle inside a circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParamSlot {
    pub gate: usize,
    pub angle: usize,
}

/// Ordered gate program on a fixed register. Angles are either bound
/// constants or trainable slots; slots are indexed in insertion order.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    num_qubits: usize,
    gates: Vec<Gate>,
    slots: Vec<ParamSlot>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Self {
            num_qubits,
            gates: Vec::new(),
            slots: Vec::new(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn slots(&self) -> &[ParamSlot] {
        &self.slots
    }

    pub fn num_params(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    fn check_targets(&self, gate: &Gate) -> Result<()> {
        for &t in gate.targets() {
            if t >= self.num_qubits {
                return Err(Error::QubitOutOfRange {
                    index: t,
                    num_qubits: self.num_qubits,
                });
            }
        }
        Ok(())
    }

    /// Appends a gate whose angles are constants.
    pub fn push(&mut self, gate: Gate) -> Result<&mut Self> {
        self.check_targets(&gate)?;
        self.gates.push(gate);
        Ok(self)
    }

    /// Appends a gate and registers all of its angles as trainable slots.
    pub fn push_trainable(&mut self, gate: Gate) -> Result<&mut Self> {
        self.check_targets(&gate)?;
        let g = self.gates.len();
        self.slots
            .extend((0..gate.params().len()).map(|angle| ParamSlot { gate: g, angle }));
        self.gates.push(gate);
        Ok(self)
    }

    /// Appends every gate of `other`, shifting its qubits by `offset`. Slots of
    /// `other` follow the existing slots.
    pub fn append(&mut self, other: &Circuit, offset: usize) -> Result<&mut Self> {
        if other.num_qubits + offset > self.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits,
                found: other.num_qubits + offset,
            });
        }
        let base = self.gates.len();
        self.gates
            .extend(other.gates.iter().map(|g| g.offset(offset)));
        self.slots.extend(other.slots.iter().map(|s| ParamSlot {
            gate: s.gate + base,
            angle: s.angle,
        }));
        Ok(self)
    }

    /// Current values of the trainable slots.
    pub fn param_values(&self) -> Vec<f64> {
        self.slots
            .iter()
            .map(|s| self.gates[s.gate].params()[s.angle])
            .collect()
    }

    /// Copy with every slot rebound to `values`.
    pub fn bind(&self, values: &[f64]) -> Result<Circuit> {
        crate::error::check_len(self.slots.len(), values.len())?;
        let mut out = self.clone();
        for (slot, &v) in self.slots.iter().zip(values) {
            out.gates[slot.gate].set_param(slot.angle, v);
        }
        Ok(out)
    }

    /// Copy with one slot moved by `delta`.
    pub fn shifted(&self, slot: usize, delta: f64) -> Circuit {
        let s = self.slots[slot];
        let mut out = self.clone();
        let v = out.gates[s.gate].params()[s.angle];
        out.gates[s.gate].set_param(s.angle, v + delta);
        out
    }

    pub fn slot_gate_kind(&self, slot: usize) -> GateKind {
        self.gates[self.slots[slot].gate].kind()
    }

    /// (one-qubit gates, multi-qubit gates). CSWAP counts as a two-qubit-class gate.
    pub fn gate_counts(&self) -> (usize, usize) {
        let one = self.gates.iter().filter(|g| g.targets().len() == 1).count();
        (one, self.gates.len() - one)
    }

    /// Greedy as-soon-as-possible layering: each layer is a maximal set of
    /// gates acting on disjoint qubits, respecting program order per qubit.
    pub fn layers(&self) -> Vec<Vec<usize>> {
        let mut depth = vec![0usize; self.num_qubits];
        let mut layers: Vec<Vec<usize>> = Vec::new();
        for (i, g) in self.gates.iter().enumerate() {
            let level = g.targets().iter().map(|&t| depth[t]).max().unwrap_or(0);
            if layers.len() <= level {
                layers.push(Vec::new());
            }
            layers[level].push(i);
            for &t in g.targets() {
                depth[t] = level + 1;
            }
        }
        layers
    }

    /// Runs the program from `initial`, or from |0…0⟩ when `None`.
    pub fn run(&self, initial: Option<&StateVector>) -> Result<StateVector> {
        let mut state = match initial {
            Some(s) if s.num_qubits() != self.num_qubits => {
                return Err(Error::DimensionMismatch {
                    expected: self.num_qubits,
                    found: s.num_qubits(),
                })
            }
            Some(s) => s.clone(),
            None => StateVector::zero(self.num_qubits)?,
        };
        for g in &self.gates {
            state.apply(g)?;
        }
        Ok(state)
    }

    /// One line per gate: name, targets, angles to 9 significant digits.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for g in &self.gates {
            out.push_str(g.kind().name());
            for t in g.targets() {
                let _ = write!(out, " {t}");
            }
            for p in g.params() {
                let _ = write!(out, " {p:.8e}");
            }
            out.push('\n');
        }
        out
    }
}

pub fn run_circuit(circuit: &Circuit, initial: Option<&StateVector>) -> Result<StateVector> {
    circuit.run(initial)
}
