//! Bit-flip and phase-flip noise, simulated by Monte Carlo trajectories on
//! pure states, with an exact density-matrix route for small registers.

mod density;
mod trajectory;

pub use density::{density_evolve, reduced_density, DensityMatrix, MAX_DENSITY_QUBITS};
pub use trajectory::{
    apply_flip_trajectory, estimate_over_trajectories, noisy_fidelity, run_noisy, trajectory_rng,
    NoisyEstimate,
};

use crate::error::{invalid, Result};

/// Error rates of the two flip channels. Errors act after every circuit
/// layer on each qubit touched by that layer: X with probability `p_bit`,
/// then Z with probability `p_phase`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct NoiseSpec {
    pub p_bit: f64,
    pub p_phase: f64,
}

impl NoiseSpec {
    pub fn new(p_bit: f64, p_phase: f64) -> Result<Self> {
        let spec = Self { p_bit, p_phase };
        spec.validate()?;
        Ok(spec)
    }

    pub fn none() -> Self {
        Self {
            p_bit: 0.0,
            p_phase: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("p_bit", self.p_bit), ("p_phase", self.p_phase)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(invalid(format!("{name} = {p} is not a probability")));
            }
        }
        Ok(())
    }

    pub fn is_noiseless(&self) -> bool {
        self.p_bit == 0.0 && self.p_phase == 0.0
    }
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self::none()
    }
}
