//! Circuit builders: trainable/fixed angle encoder, generator ansatz family,
//! SWAP-test discriminator, resource-cost model and the decode path from
//! generator marginals back to images.

mod cost;
mod decode;
mod encoder;
mod generator;

pub use cost::{hardware_cost, CostReport, Scheme};
pub use decode::{decode_features, decode_from_marginals, decode_generated, decode_sampled};
pub use encoder::{
    build_encoder, encode_state, encoder_angles, encoder_from_angles, EncoderMode, EncoderParams,
};
pub use generator::{build_generator, generator_param_count, Ansatz, GeneratorParams};
pub use swap_test::{assemble_gan_circuit, build_swap_test, swap_test_p0};

use crate::error::Result;

/// Resource counts of an assembled GAN circuit (encoder + generator + SWAP test).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CircuitCost {
    pub qubits: usize,
    pub one_qubit_gates: usize,
    pub two_qubit_gates: usize,
    pub parameters: usize,
}

pub fn gan_circuit_cost(generator: &GeneratorParams) -> Result<CircuitCost> {
    let n = generator.n;
    let encoder = build_encoder(&vec![0.0; n], &EncoderParams::unit(n))?;
    let circuit = assemble_gan_circuit(&encoder, &build_generator(generator)?)?;
    let (one, two) = circuit.gate_counts();
    Ok(CircuitCost {
        qubits: circuit.num_qubits(),
        one_qubit_gates: one,
        two_qubit_gates: two,
        parameters: circuit.num_params(),
    })
}
