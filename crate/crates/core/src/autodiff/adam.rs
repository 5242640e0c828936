use crate::error::{invalid, Result};

/// ADAM optimizer state for one parameter vector.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub step: u64,
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub base_lr: f64,
}

impl AdamState {
    pub fn new(len: usize, base_lr: f64) -> Self {
        Self {
            step: 0,
            m: vec![0.0; len],
            v: vec![0.0; len],
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            base_lr,
        }
    }
}

/// One bias-corrected ADAM update of `params` (minimization) at rate `lr`.
pub fn adam_step(state: &mut AdamState, params: &mut [f64], grads: &[f64], lr: f64) -> Result<()> {
    if params.len() != grads.len() || params.len() != state.m.len() {
        return Err(invalid(format!(
            "ADAM length mismatch: {} params, {} grads, state {}",
            params.len(),
            grads.len(),
            state.m.len()
        )));
    }
    state.step += 1;
    let t = state.step as i32;
    let bc1 = 1.0 - state.beta1.powi(t);
    let bc2 = 1.0 - state.beta2.powi(t);
    for (((p, g), m), v) in params
        .iter_mut()
        .zip(grads)
        .zip(&mut state.m)
        .zip(&mut state.v)
    {
        *m = state.beta1 * *m + (1.0 - state.beta1) * g;
        *v = state.beta2 * *v + (1.0 - state.beta2) * g * g;
        let m_hat = *m / bc1;
        let v_hat = *v / bc2;
        *p -= lr * m_hat / (v_hat.sqrt() + state.eps);
    }
    Ok(())
}
