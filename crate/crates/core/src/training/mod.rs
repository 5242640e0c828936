//! Two-step IQGAN training (encoder pretraining, then GAN training) and the
//! ablation and noise-sweep experiment drivers.

mod ablation;
mod ensemble;
mod gan;
mod pretrain;
mod sweep;

pub use ablation::{ablation_run, AblationRow, ABLATION_HEADER};
pub use ensemble::{build_ensemble, hs_distance};
pub use gan::{init_generator, train_gan, TrainConfig, TrainOutcome, TrainRecord};
pub use pretrain::{pretrain_encoder, separation_objective, PretrainConfig, PretrainResult};
pub use sweep::{
    noise_sweep, noisy_swap_fidelity, SweepConfig, SweepRow, MIN_SWEEP_TRAJECTORIES, SWEEP_HEADER,
};
