//! Dense statevector simulation of the gate set used by the encoder,
//! generator and SWAP-test circuits.

mod circuit;
mod gate;
mod measure;
mod state;

pub use circuit::{run_circuit, Circuit, ParamSlot};
pub use gate::{gate_matrix, Gate, GateKind, GateMatrix};
pub use measure::{qubit_zero_probability, sample_measurements, x_expectation, MeasurementCounts};
pub use state::{apply_gate, fidelity, StateVector};
