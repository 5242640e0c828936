use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Qugan21,
    EqGan,
    Iqgan,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Qugan21, Scheme::EqGan, Scheme::Iqgan];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Qugan21 => "QuGAN21",
            Scheme::EqGan => "EQ-GAN",
            Scheme::Iqgan => "IQGAN",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "qugan21" | "qugan" => Ok(Scheme::Qugan21),
            "eqgan" => Ok(Scheme::EqGan),
            "iqgan" => Ok(Scheme::Iqgan),
            other => Err(invalid(format!(
                "unknown scheme `{other}` (expected iqgan, qugan21 or eqgan)"
            ))),
        }
    }
}

/// Qubit, gate and parameter totals of a GAN scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CostReport {
    pub scheme: Scheme,
    pub qubits: usize,
    pub one_qubit_gates: usize,
    pub two_qubit_gates: usize,
    pub parameters: usize,
}

impl CostReport {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{}",
            self.qubits, self.one_qubit_gates, self.two_qubit_gates, self.parameters
        )
    }
}

/// Closed-form resource counts for input size `n` and `b` generator blocks.
pub fn hardware_cost(scheme: Scheme, n: usize, b: usize) -> Result<CostReport> {
    if n == 0 || b == 0 {
        return Err(invalid(format!(
            "cost model needs n ≥ 1 and b ≥ 1 (got n={n}, b={b})"
        )));
    }
    let (one, two, params) = match scheme {
        Scheme::Qugan21 => (n * b + 1, 4 * n * b, 5 * n * b),
        Scheme::EqGan => (2 * n * b + n + 2, (b + 1) * n, 2 * n * b),
        Scheme::Iqgan => (2 * n * b + n + 2, n, 2 * n * b),
    };
    Ok(CostReport {
        scheme,
        qubits: 2 * n + 1,
        one_qubit_gates: one,
        two_qubit_gates: two,
        parameters: params,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_rows() {
        assert_eq!(
            hardware_cost(Scheme::Iqgan, 2, 1).unwrap().csv_row(),
            "5,8,2,4"
        );
        assert_eq!(
            hardware_cost(Scheme::Qugan21, 2, 1).unwrap().csv_row(),
            "5,3,8,10"
        );
        assert_eq!(
            hardware_cost(Scheme::EqGan, 2, 1).unwrap().csv_row(),
            "5,8,4,4"
        );
    }

    #[test]
    fn rejects_zero_sizes_and_unknown_schemes() {
        assert!(hardware_cost(Scheme::Iqgan, 0, 1).is_err());
        assert!(hardware_cost(Scheme::Iqgan, 1, 0).is_err());
        assert!("qgan".parse::<Scheme>().is_err());
        assert_eq!("EQ-GAN".parse::<Scheme>().unwrap(), Scheme::EqGan);
    }
}
