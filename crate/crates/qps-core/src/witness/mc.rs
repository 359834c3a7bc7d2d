//! Monte Carlo estimation of the witness left-hand side from sampled
//! (outcome, setting) records, with seeded reproducible samplers for the
//! catalog states.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use super::{TestFunction, WitnessError};
use crate::kernel::Complex;
use crate::povm::{self, Outcome, PovmModel, Setting};
use crate::states::{CountingDetector, QuantumState};

#[derive(Debug, Clone)]
pub struct McEstimate {
    /// Per-setting sample means of λ summed over settings (equal weights).
    pub estimate: f64,
    /// √(Σ_a var_a / M_a) across the per-setting groups.
    pub std_error: f64,
    /// Settings in encounter order with their sample counts.
    pub groups: Vec<(Setting, usize)>,
}

/// Sample-mean estimator E(λ|a) ≈ (1/M) Σᵢ λ(Aᵢ, a), grouped by setting and
/// summed with equal weights.
pub fn mc_lhs(
    samples: &[(Outcome, Setting)],
    lambda: &TestFunction,
) -> Result<McEstimate, WitnessError> {
    if samples.is_empty() {
        return Err(WitnessError::Precondition(
            "monte-carlo estimator needs at least one sample".into(),
        ));
    }
    let mut groups: Vec<(Setting, Vec<f64>)> = Vec::new();
    for (outcome, setting) in samples {
        let value = lambda.eval(outcome, setting)?;
        match groups.iter_mut().find(|(s, _)| s == setting) {
            Some((_, vals)) => vals.push(value),
            None => groups.push((*setting, vec![value])),
        }
    }
    let mut estimate = 0.0;
    let mut variance = 0.0;
    for (setting, vals) in &groups {
        let m = vals.len();
        if m < 2 {
            return Err(WitnessError::Precondition(format!(
                "setting group {setting:?} has {m} sample(s); need at least 2 for a standard error"
            )));
        }
        let mean = vals.iter().sum::<f64>() / m as f64;
        let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (m - 1) as f64;
        estimate += mean;
        variance += var / m as f64;
    }
    Ok(McEstimate {
        estimate,
        std_error: variance.sqrt(),
        groups: groups.into_iter().map(|(s, v)| (s, v.len())).collect(),
    })
}

fn draw_from_table(table: &[f64], rng: &mut ChaCha12Rng) -> u32 {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (n, p) in table.iter().enumerate() {
        acc += p.max(0.0);
        if u < acc {
            return n as u32;
        }
    }
    (table.len() - 1) as u32
}

/// Seeded photocount samples from the exact outcome table; identical seeds
/// give identical sample sequences.
pub fn sample_photocounts(
    state: &QuantumState,
    detector: &CountingDetector,
    m: usize,
    seed: u64,
) -> Result<Vec<(Outcome, Setting)>, WitnessError> {
    let table = state.photocount_dist(detector)?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    Ok((0..m)
        .map(|_| (Outcome::Count(draw_from_table(&table, &mut rng)), Setting::None))
        .collect())
}

/// Seeded UHD click/no-click samples, `m_per_setting` draws for each
/// displacement in order.
pub fn sample_uhd(
    state: &QuantumState,
    displacements: &[Complex],
    m_per_setting: usize,
    seed: u64,
) -> Result<Vec<(Outcome, Setting)>, WitnessError> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(displacements.len() * m_per_setting);
    let model = PovmModel::Uhd {
        displacements: displacements.to_vec(),
    };
    for gamma in displacements {
        let setting = Setting::Displacement(*gamma);
        let p0 = povm::born_probability(state, &model, &Outcome::Count(0), &setting)?;
        for _ in 0..m_per_setting {
            let n = if rng.random::<f64>() < p0 { 0 } else { 1 };
            out.push((Outcome::Count(n), setting));
        }
    }
    Ok(out)
}
