use std::f64::consts::{FRAC_PI_2, SQRT_2};

use super::loss::{gan_loss, LossContext};
use crate::circuits::{build_generator, encoder_angles, encoder_from_angles, EncoderMode};
use crate::error::{invalid, Result};
use crate::qsim::StateVector;

/// Largest magnitude allowed for the arcsin chain factor `x/√(1 − (x·θs)²)`.
pub const CHAIN_FACTOR_LIMIT: f64 = 1e6;
const SINGULAR_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GradTarget {
    Generator,
    Encoder,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    pub values: Vec<f64>,
    /// Encoder coordinates whose chain factor hit [`CHAIN_FACTOR_LIMIT`].
    pub singular: Vec<usize>,
}

/// Exact gradient by parameter shifts.
///
/// Plain rotations use `[L(θ+π/2) − L(θ−π/2)]/2`. Angles of controlled
/// rotations (CRX, CROT) have generator spectrum {0, ±1/2}, for which the
/// two-term rule is biased; they use the four-term rule with shifts π/2 and
/// 3π/2. Encoder scales are differentiated through the rotation angle
/// `α = arcsin(x·θs)` and the chain factor `x/√(1 − (x·θs)²)`.
pub fn param_shift_grad(ctx: &LossContext<'_>, which: GradTarget) -> Result<Gradient> {
    ctx.validate()?;
    match which {
        GradTarget::Generator => generator_grad(ctx),
        GradTarget::Encoder => encoder_grad(ctx),
    }
}

fn generator_grad(ctx: &LossContext<'_>) -> Result<Gradient> {
    let targets = ctx.target_states()?;
    let circuit = build_generator(&ctx.generator)?;
    let mut tag = 1u64;
    let mut eval = |slot: usize, delta: f64| -> Result<f64> {
        tag += 1;
        let state = circuit.shifted(slot, delta).run(None)?;
        ctx.loss_from_states(&targets, &state, tag)
    };
    let c_plus = (SQRT_2 + 1.0) / (4.0 * SQRT_2);
    let c_minus = (SQRT_2 - 1.0) / (4.0 * SQRT_2);
    let mut values = Vec::with_capacity(circuit.num_params());
    for slot in 0..circuit.num_params() {
        let near = eval(slot, FRAC_PI_2)? - eval(slot, -FRAC_PI_2)?;
        let g = if circuit.slot_gate_kind(slot).is_controlled_rotation() {
            let far = eval(slot, 3.0 * FRAC_PI_2)? - eval(slot, -3.0 * FRAC_PI_2)?;
            c_plus * near - c_minus * far
        } else {
            near / 2.0
        };
        values.push(g);
    }
    Ok(Gradient {
        values,
        singular: Vec::new(),
    })
}

fn encoder_grad(ctx: &LossContext<'_>) -> Result<Gradient> {
    if ctx.encoder.mode != EncoderMode::Trainable {
        return Err(invalid("the fixed encoder has no trainable parameters"));
    }
    let generated = ctx.generator_state()?;
    let n = ctx.encoder.n();
    let m = ctx.batch.len() as f64;
    let mut values = vec![0.0; n];
    let mut singular = vec![false; n];
    let mut tag = 1u64 << 32;
    for x in ctx.batch {
        let (angles, _) = encoder_angles(x, &ctx.encoder)?;
        for i in 0..n {
            let mut shifted = |delta: f64| -> Result<f64> {
                tag += 1;
                let mut a = angles.clone();
                a[i] += delta;
                let target: StateVector = encoder_from_angles(&a)?.run(None)?;
                ctx.loss_from_states(std::slice::from_ref(&target), &generated, tag)
            };
            let d_alpha = (shifted(FRAC_PI_2)? - shifted(-FRAC_PI_2)?) / 2.0;
            let u = x[i] * ctx.encoder.theta_s[i];
            let mut factor = if u.abs() < 1.0 - SINGULAR_MARGIN {
                x[i] / (1.0 - u * u).sqrt()
            } else {
                singular[i] = true;
                x[i].signum() * CHAIN_FACTOR_LIMIT
            };
            if factor.abs() > CHAIN_FACTOR_LIMIT {
                singular[i] = true;
                factor = factor.signum() * CHAIN_FACTOR_LIMIT;
            }
            values[i] += d_alpha * factor / m;
        }
    }
    let singular: Vec<usize> = singular
        .iter()
        .enumerate()
        .filter(|(_, s)| **s)
        .map(|(i, _)| i)
        .collect();
    if !singular.is_empty() {
        log::debug!("encoder gradient chain factor clamped on feature(s) {singular:?}");
    }
    Ok(Gradient { values, singular })
}

/// Central differences of [`gan_loss`] with step `h`.
pub fn finite_diff_grad(ctx: &LossContext<'_>, which: GradTarget, h: f64) -> Result<Vec<f64>> {
    if h.is_nan() || h <= 0.0 {
        return Err(invalid(format!(
            "finite-difference step must be positive, got {h}"
        )));
    }
    ctx.validate()?;
    let mut probe = ctx.clone();
    let len = match which {
        GradTarget::Generator => ctx.generator.theta_g.len(),
        GradTarget::Encoder => ctx.encoder.theta_s.len(),
    };
    let mut out = Vec::with_capacity(len);
    for k in 0..len {
        let mut at = |delta: f64| -> Result<f64> {
            match which {
                GradTarget::Generator => {
                    probe.generator.theta_g[k] = ctx.generator.theta_g[k] + delta;
                    let l = gan_loss(&probe);
                    probe.generator.theta_g[k] = ctx.generator.theta_g[k];
                    l
                }
                GradTarget::Encoder => {
                    probe.encoder.theta_s[k] = ctx.encoder.theta_s[k] + delta;
                    let l = gan_loss(&probe);
                    probe.encoder.theta_s[k] = ctx.encoder.theta_s[k];
                    l
                }
            }
        };
        out.push((at(h)? - at(-h)?) / (2.0 * h));
    }
    Ok(out)
}
