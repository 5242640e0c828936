use std::f64::consts::PI;

use crate::error::{invalid, Result};

/// `lr0 · (1 + cos(π·epoch/t_max)) / 2`, reaching zero at `epoch = t_max`.
pub fn cosine_anneal_lr(epoch: usize, lr0: f64, t_max: usize) -> Result<f64> {
    if t_max == 0 {
        return Err(invalid("t_max must be positive"));
    }
    if epoch > t_max {
        return Err(invalid(format!("epoch {epoch} exceeds t_max {t_max}")));
    }
    Ok(lr0 * (1.0 + (PI * epoch as f64 / t_max as f64).cos()) / 2.0)
}
