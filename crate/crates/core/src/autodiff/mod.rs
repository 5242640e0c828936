//! Fidelity loss, parameter-shift gradients (with a finite-difference
//! oracle), ADAM and cosine-annealed learning rates.

mod adam;
mod gradient;
mod loss;
mod schedule;

pub use adam::{adam_step, AdamState};
pub use gradient::{finite_diff_grad, param_shift_grad, GradTarget, Gradient, CHAIN_FACTOR_LIMIT};
pub use loss::{batch_fidelities, gan_loss, LossContext, Shots};
pub use schedule::cosine_anneal_lr;
