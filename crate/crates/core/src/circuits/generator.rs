use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::qsim::{Circuit, Gate};

/// Two-qubit coupling used between neighbouring generator qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ansatz {
    Cnot,
    Iswap,
    Crx,
    Crot,
    NoEntangler,
}

impl Ansatz {
    pub const ALL: [Ansatz; 5] = [
        Ansatz::Cnot,
        Ansatz::Iswap,
        Ansatz::Crx,
        Ansatz::Crot,
        Ansatz::NoEntangler,
    ];

    pub fn params_per_entangler(self) -> usize {
        match self {
            Ansatz::Crx => 1,
            Ansatz::Crot => 3,
            Ansatz::Cnot | Ansatz::Iswap | Ansatz::NoEntangler => 0,
        }
    }

    pub fn has_entangler(self) -> bool {
        self != Ansatz::NoEntangler
    }

    pub fn name(self) -> &'static str {
        match self {
            Ansatz::Cnot => "cnot",
            Ansatz::Iswap => "iswap",
            Ansatz::Crx => "crx",
            Ansatz::Crot => "crot",
            Ansatz::NoEntangler => "none",
        }
    }

    fn entangler(self, angles: &[f64], control: usize, target: usize) -> Option<Gate> {
        match self {
            Ansatz::Cnot => Some(Gate::cnot(control, target)),
            Ansatz::Iswap => Some(Gate::iswap(control, target)),
            Ansatz::Crx => Some(Gate::crx(angles[0], control, target)),
            Ansatz::Crot => Some(Gate::crot(angles[0], angles[1], angles[2], control, target)),
            Ansatz::NoEntangler => None,
        }
    }
}

impl fmt::Display for Ansatz {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Ansatz {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "cnot" => Ok(Ansatz::Cnot),
            "iswap" => Ok(Ansatz::Iswap),
            "crx" => Ok(Ansatz::Crx),
            "crot" => Ok(Ansatz::Crot),
            "none" | "noentangler" | "wo2qgate" => Ok(Ansatz::NoEntangler),
            other => Err(invalid(format!("unknown ansatz `{other}`"))),
        }
    }
}

/// Number of generator angles for `n` qubits and `blocks` blocks.
pub fn generator_param_count(ansatz: Ansatz, n: usize, blocks: usize) -> usize {
    let per_block = 2 * n + ansatz.params_per_entangler() * n.saturating_sub(1);
    per_block * blocks
}

/// Generator angles in gate order: for each block, `RY, RZ` per qubit, then
/// the entangler angles of that block.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorParams {
    pub ansatz: Ansatz,
    pub n: usize,
    pub blocks: usize,
    pub theta_g: Vec<f64>,
}

impl GeneratorParams {
    pub fn new(ansatz: Ansatz, n: usize, blocks: usize, theta_g: Vec<f64>) -> Result<Self> {
        if n == 0 || blocks == 0 {
            return Err(invalid(format!(
                "generator needs n ≥ 1 and b ≥ 1 (got n={n}, b={blocks})"
            )));
        }
        let expected = generator_param_count(ansatz, n, blocks);
        if theta_g.len() != expected {
            return Err(invalid(format!(
                "{ansatz} generator with n={n}, b={blocks} takes {expected} angles, got {}",
                theta_g.len()
            )));
        }
        if let Some(bad) = theta_g.iter().find(|t| !t.is_finite()) {
            return Err(invalid(format!("generator angle {bad} is not finite")));
        }
        Ok(Self {
            ansatz,
            n,
            blocks,
            theta_g,
        })
    }

    pub fn zeros(ansatz: Ansatz, n: usize, blocks: usize) -> Result<Self> {
        Self::new(
            ansatz,
            n,
            blocks,
            vec![0.0; generator_param_count(ansatz, n, blocks)],
        )
    }

    pub fn with_theta(&self, theta_g: Vec<f64>) -> Result<Self> {
        Self::new(self.ansatz, self.n, self.blocks, theta_g)
    }
}

/// Builds the generator; every angle becomes a trainable slot whose index
/// matches its position in `theta_g`.
pub fn build_generator(params: &GeneratorParams) -> Result<Circuit> {
    let GeneratorParams {
        ansatz,
        n,
        blocks,
        ref theta_g,
    } = *params;
    crate::error::check_len(generator_param_count(ansatz, n, blocks), theta_g.len())?;
    let mut c = Circuit::new(n);
    let mut next = theta_g.iter().copied();
    let mut take = |k: usize| -> Vec<f64> { next.by_ref().take(k).collect() };
    for _ in 0..blocks {
        for q in 0..n {
            let a = take(2);
            c.push_trainable(Gate::ry(a[0], q))?;
            c.push_trainable(Gate::rz(a[1], q))?;
        }
        for q in 0..n.saturating_sub(1) {
            let angles = take(ansatz.params_per_entangler());
            if let Some(g) = ansatz.entangler(&angles, q, q + 1) {
                if g.params().is_empty() {
                    c.push(g)?;
                } else {
                    c.push_trainable(g)?;
                }
            }
        }
    }
    Ok(c)
}
