//! The single on/off detector no-go: its dual-form inequality can never be
//! violated, so nonclassicality of photocounting statistics cannot be tested
//! with one on/off detector alone.

use serde::{Deserialize, Serialize};

/// Proof record of the no-go sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NoGoRecord {
    /// Analytic bound max{λ(0), λ(1)}.
    pub rhs: f64,
    /// Largest lhs found on the probability simplex sweep.
    pub max_lhs: f64,
    pub sweep_points: usize,
    /// max_lhs ≤ rhs within 1e−12.
    pub certified: bool,
}

/// Sweeps lhs = λ(0)·𝒫(0) + λ(1)·𝒫(1) over the probability simplex at the
/// given resolution and certifies it never exceeds max{λ(0), λ(1)}.
pub fn onoff_no_violation_check(lambda0: f64, lambda1: f64, resolution: f64) -> NoGoRecord {
    let rhs = lambda0.max(lambda1);
    let steps = (1.0 / resolution).round() as usize;
    let mut max_lhs = f64::NEG_INFINITY;
    for i in 0..=steps {
        let p0 = i as f64 / steps as f64;
        let lhs = lambda0 * p0 + lambda1 * (1.0 - p0);
        if lhs > max_lhs {
            max_lhs = lhs;
        }
    }
    NoGoRecord {
        rhs,
        max_lhs,
        sweep_points: steps + 1,
        certified: max_lhs <= rhs + 1e-12,
    }
}
