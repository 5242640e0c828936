//! Exact statevector simulation and training for quantum GANs built from a
//! trainable arcsin angle encoder, a compact variational generator and a
//! SWAP-test fidelity discriminator.
//!
//! Module map:
//!
//! * [`qsim`]: dense statevector simulator, gate set, fidelity, sampling.
//! * [`noise`]: bit-flip / phase-flip channels (trajectories + density oracle).
//! * [`circuits`]: encoder, generator ansatz family, SWAP test, cost model, decoding.
//! * [`autodiff`]: fidelity loss, parameter-shift gradients, ADAM, cosine schedule.
//! * [`data`]: MNIST IDX loading and PCA.
//! * [`training`]: encoder pretraining, GAN training, ablation and noise sweeps.
//! * [`artifacts`]: on-disk formats for parameters, metrics and images.
//! * [`cli`]: the `iqgan` command-line front end.

pub mod artifacts;
pub mod autodiff;
pub mod circuits;
pub mod cli;
pub mod data;
pub mod error;
pub mod noise;
pub mod qsim;
pub mod training;

pub use error::{Error, ErrorCategory, Result};
