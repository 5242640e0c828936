use rayon::prelude::*;

use super::gan::{train_gan, TrainConfig};
use crate::circuits::{
    gan_circuit_cost, generator_param_count, Ansatz, CircuitCost, EncoderParams, GeneratorParams,
};
use crate::error::{invalid, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct AblationRow {
    pub ansatz: Ansatz,
    pub mean_fidelity: f64,
    /// Sample standard deviation over seeds.
    pub stddev: f64,
    pub finals: Vec<f64>,
    pub cost: CircuitCost,
}

impl AblationRow {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.ansatz.name(),
            self.mean_fidelity,
            self.stddev,
            self.cost.one_qubit_gates,
            self.cost.two_qubit_gates,
            self.cost.parameters
        )
    }
}

pub const ABLATION_HEADER: &str = "ansatz,mean_fidelity,stddev,1qg,2qg,params";

/// Trains every ansatz on the same data under every seed and reports the
/// spread of final fidelities with the circuit resource counts.
pub fn ablation_run(
    dataset: &[Vec<f64>],
    encoder: &EncoderParams,
    cfg: &TrainConfig,
    ansatzes: &[Ansatz],
    seeds: &[u64],
) -> Result<Vec<AblationRow>> {
    let mut distinct = ansatzes.to_vec();
    distinct.sort_by_key(|a| a.name());
    distinct.dedup();
    if distinct.len() < 2 || distinct.len() != ansatzes.len() {
        return Err(invalid("ablation needs at least 2 distinct ansatz kinds"));
    }
    if seeds.len() < 3 {
        return Err(invalid(format!(
            "ablation needs at least 3 seeds, got {}",
            seeds.len()
        )));
    }
    cfg.validate()?;
    ansatzes
        .iter()
        .map(|&ansatz| {
            let finals = seeds
                .par_iter()
                .map(|&seed| {
                    let run = TrainConfig {
                        ansatz,
                        seed,
                        ..cfg.clone()
                    };
                    train_gan(dataset, encoder, &run).map(|o| o.final_fidelity())
                })
                .collect::<Result<Vec<f64>>>()?;
            let m = finals.len() as f64;
            let mean = finals.iter().sum::<f64>() / m;
            let var = finals.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / (m - 1.0);
            let params = vec![0.0; generator_param_count(ansatz, cfg.n, cfg.blocks)];
            let cost = gan_circuit_cost(&GeneratorParams::new(ansatz, cfg.n, cfg.blocks, params)?)?;
            Ok(AblationRow {
                ansatz,
                mean_fidelity: mean,
                stddev: var.sqrt(),
                finals,
                cost,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contract_errors() {
        let data = vec![vec![0.1, 0.2]];
        let cfg = TrainConfig {
            n: 2,
            allow_unpretrained: true,
            epochs: 1,
            ..TrainConfig::default()
        };
        let enc = EncoderParams::unit(2);
        assert!(ablation_run(&data, &enc, &cfg, &[Ansatz::Cnot], &[0, 1, 2]).is_err());
        assert!(
            ablation_run(&data, &enc, &cfg, &[Ansatz::Cnot, Ansatz::Cnot], &[0, 1, 2]).is_err()
        );
        assert!(ablation_run(
            &data,
            &enc,
            &cfg,
            &[Ansatz::Cnot, Ansatz::NoEntangler],
            &[0, 1]
        )
        .is_err());
    }

    #[test]
    fn rows_follow_input_order() {
        let data: Vec<Vec<f64>> = (0..8).map(|i| vec![0.1 * i as f64 - 0.3, 0.2]).collect();
        let cfg = TrainConfig {
            n: 2,
            allow_unpretrained: true,
            epochs: 2,
            t_max: 2,
            ..TrainConfig::default()
        };
        let rows = ablation_run(
            &data,
            &EncoderParams::unit(2),
            &cfg,
            &[Ansatz::NoEntangler, Ansatz::Cnot],
            &[0, 1, 2],
        )
        .unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].ansatz, Ansatz::NoEntangler);
        assert_eq!(rows[0].cost.two_qubit_gates, 2);
        assert_eq!(rows[0].finals.len(), 3);
        assert_eq!(rows[1].cost.two_qubit_gates, 3);
    }
}
