use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::qsim::{Circuit, Gate, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum EncoderMode {
    /// `RY(arcsin(x_i · θs_i))` with learnable per-feature scales.
    #[default]
    Trainable,
    /// `RY(π·(x_i + 1)/2)`, inputs in [−1, 1] mapped onto [0, π].
    Fixed,
}

impl fmt::Display for EncoderMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EncoderMode::Trainable => "trainable",
            EncoderMode::Fixed => "fixed",
        })
    }
}

impl FromStr for EncoderMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "trainable" | "te" => Ok(EncoderMode::Trainable),
            "fixed" | "fe" => Ok(EncoderMode::Fixed),
            other => Err(invalid(format!("unknown encoder mode `{other}`"))),
        }
    }
}

/// Encoder configuration: mode plus one scale per input feature.
#[derive(Debug, Clone, PartialEq)]
pub struct EncoderParams {
    pub mode: EncoderMode,
    pub theta_s: Vec<f64>,
    /// Set once the scales come out of ensemble pretraining.
    pub pretrained: bool,
}

impl EncoderParams {
    pub fn trainable(theta_s: Vec<f64>) -> Result<Self> {
        if theta_s.is_empty() {
            return Err(invalid("encoder needs at least one feature"));
        }
        if let Some(bad) = theta_s.iter().find(|t| !t.is_finite()) {
            return Err(invalid(format!("encoder scale {bad} is not finite")));
        }
        Ok(Self {
            mode: EncoderMode::Trainable,
            theta_s,
            pretrained: false,
        })
    }

    /// All-ones scales: the plain arcsin encoding.
    pub fn unit(n: usize) -> Self {
        Self {
            mode: EncoderMode::Trainable,
            theta_s: vec![1.0; n],
            pretrained: false,
        }
    }

    pub fn fixed(n: usize) -> Self {
        Self {
            mode: EncoderMode::Fixed,
            theta_s: vec![1.0; n],
            pretrained: false,
        }
    }

    pub fn n(&self) -> usize {
        self.theta_s.len()
    }

    pub fn mark_pretrained(mut self) -> Self {
        self.pretrained = true;
        self
    }
}

/// Rotation angles for input `x`. In trainable mode the arcsin argument is
/// clamped to [−1, 1]; the number of clamped features is returned alongside.
pub fn encoder_angles(x: &[f64], params: &EncoderParams) -> Result<(Vec<f64>, usize)> {
    crate::error::check_len(params.n(), x.len())?;
    let mut clamped = 0;
    let angles = match params.mode {
        EncoderMode::Trainable => x
            .iter()
            .zip(&params.theta_s)
            .map(|(xi, ti)| {
                let u = xi * ti;
                if u.abs() > 1.0 {
                    clamped += 1;
                }
                u.clamp(-1.0, 1.0).asin()
            })
            .collect(),
        EncoderMode::Fixed => x
            .iter()
            .map(|xi| {
                if xi.abs() > 1.0 {
                    clamped += 1;
                }
                PI * (xi.clamp(-1.0, 1.0) + 1.0) / 2.0
            })
            .collect(),
    };
    Ok((angles, clamped))
}

/// One RY per qubit with the given angles; no trainable slots.
pub fn encoder_from_angles(angles: &[f64]) -> Result<Circuit> {
    if angles.is_empty() {
        return Err(invalid("encoder needs at least one qubit"));
    }
    let mut c = Circuit::new(angles.len());
    for (q, &a) in angles.iter().enumerate() {
        c.push(Gate::ry(a, q))?;
    }
    Ok(c)
}

pub fn build_encoder(x: &[f64], params: &EncoderParams) -> Result<Circuit> {
    let (angles, clamped) = encoder_angles(x, params)?;
    if clamped > 0 {
        log::debug!("encoder input clamped on {clamped} feature(s)");
    }
    encoder_from_angles(&angles)
}

/// Product state produced by the encoder for `x`.
pub fn encode_state(x: &[f64], params: &EncoderParams) -> Result<StateVector> {
    build_encoder(x, params)?.run(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::qubit_zero_probability;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn zero_input_gives_ground_state() {
        let s = encode_state(&[0.0, 0.0, 0.0], &EncoderParams::unit(3)).unwrap();
        assert_eq!(s, StateVector::zero(3).unwrap());
    }

    #[test]
    fn unit_product_gives_half_turn() {
        let (angles, clamped) =
            encoder_angles(&[0.5], &EncoderParams::trainable(vec![2.0]).unwrap()).unwrap();
        assert!((angles[0] - FRAC_PI_2).abs() < 1e-15);
        assert_eq!(clamped, 0);
    }

    #[test]
    fn half_input_probability() {
        let s = encode_state(&[0.5], &EncoderParams::unit(1)).unwrap();
        let expected = (PI / 12.0).cos().powi(2);
        assert!((qubit_zero_probability(&s, 0).unwrap() - expected).abs() < 1e-15);
        assert!((expected - 0.93301).abs() < 1e-5);
    }

    #[test]
    fn encoder_gate_counts() {
        let c = build_encoder(&[0.1, -0.2, 0.3, 0.9], &EncoderParams::unit(4)).unwrap();
        assert_eq!(c.gate_counts(), (4, 0));
        assert_eq!(c.num_params(), 0);
    }

    #[test]
    fn out_of_domain_product_is_clamped() {
        let (angles, clamped) =
            encoder_angles(&[0.9], &EncoderParams::trainable(vec![3.0]).unwrap()).unwrap();
        assert_eq!(clamped, 1);
        assert_eq!(angles[0], FRAC_PI_2);
    }

    #[test]
    fn fixed_encoder_maps_onto_zero_pi() {
        let (angles, _) = encoder_angles(&[-1.0, 0.0, 1.0], &EncoderParams::fixed(3)).unwrap();
        assert_eq!(angles, vec![0.0, FRAC_PI_2, PI]);
    }

    #[test]
    fn length_mismatch() {
        assert!(build_encoder(&[0.1, 0.2], &EncoderParams::unit(3)).is_err());
    }
}
