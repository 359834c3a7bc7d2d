//! Eight-port homodyne (heterodyne) closed forms for the attenuated
//! single-photon state: the overlap ∫d²α₀ Q(α₀)P(α₀; s') on the left and the
//! piecewise supremum of P(α; s'−s−1) on the right.
//!
//! With λ(α₀) = P(α₀; s') the response expectation collapses by the ordering
//! convolution to E(λ|α; s) = P(α; s'−s−1), so the inequality is a necessary
//! condition for positive semi-definiteness of P(α; s).

use super::{EvalMethod, WitnessError, WitnessReport};
use crate::kernel::Complex;
use crate::states::QuantumState;

const PI: f64 = std::f64::consts::PI;

/// η when `state` and `reference` are the same attenuated single photon.
pub(crate) fn own_density_eta(state: &QuantumState, reference: &QuantumState) -> Option<f64> {
    if state != reference {
        return None;
    }
    own_density_kind(reference)
}

pub(crate) fn own_density_kind(reference: &QuantumState) -> Option<f64> {
    match reference {
        QuantumState::Fock { n: 1 } => Some(1.0),
        QuantumState::AttenuatedFock { n: 1, eta } => Some(*eta),
        _ => None,
    }
}

fn check_prefactors(eta: f64, s_prime: f64) -> Result<(), WitnessError> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(WitnessError::Precondition(format!(
            "eta = {eta} outside [0, 1]"
        )));
    }
    if s_prime >= 3.0 {
        return Err(WitnessError::Precondition(format!(
            "s' = {s_prime} >= 3 makes the lhs denominators non-positive"
        )));
    }
    if (s_prime - 1.0).abs() < 1e-12 {
        return Err(WitnessError::Precondition(
            "s' = 1 is singular in the 1/(1 - s') terms".into(),
        ));
    }
    Ok(())
}

/// ∫ d²α₀ Q(α₀) P(α₀; s') for the attenuated single photon.
pub fn lhs_closed(eta: f64, s_prime: f64) -> Result<f64, WitnessError> {
    check_prefactors(eta, s_prime)?;
    let t1 = 16.0 * eta * eta / (PI * (3.0 - s_prime).powi(3));
    let t2 = 2.0 / (PI * (3.0 - s_prime).powi(2))
        * (4.0 * eta * (1.0 - eta) / (1.0 - s_prime) + eta * (1.0 - 2.0 * eta - s_prime));
    let t3 = 2.0 * (1.0 - eta) * (1.0 - 2.0 * eta - s_prime)
        / (PI * (1.0 - s_prime) * (3.0 - s_prime));
    Ok(t1 + t2 + t3)
}

/// sup_α P(α; s'−s−1) for the attenuated single photon, piecewise in s with
/// branch point s = 4η − 2 + s'. Returns the supremum and its (radial)
/// argmax representative on the positive real axis.
pub fn rhs_closed(eta: f64, s: f64, s_prime: f64) -> Result<(f64, Vec<Complex>), WitnessError> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(WitnessError::Precondition(format!(
            "eta = {eta} outside [0, 1]"
        )));
    }
    let b = 2.0 + s - s_prime; // = 1 - (s'−s−1)
    if b <= 0.0 {
        return Err(WitnessError::Precondition(format!(
            "s' - s - 1 = {} is not a regular ordering (need s' - s - 1 < 1)",
            s_prime - s - 1.0
        )));
    }
    let branch_point = 4.0 * eta - 2.0 + s_prime;
    let interior = 2.0 / (PI * b * b)
        * 2.0
        * eta
        * (-(4.0 * eta - 2.0 + s_prime - s) / (2.0 * eta)).exp();
    let boundary = 2.0 / (PI * b * b) * (2.0 - 2.0 * eta + s - s_prime);
    if (s - branch_point).abs() < 1e-12 && eta > 0.0 {
        debug_assert!((interior - boundary).abs() < 1e-10 * interior.abs().max(1e-300));
    }
    if eta > 0.0 && s <= branch_point {
        let u_star = b * (4.0 * eta - b) / (4.0 * eta);
        Ok((interior, vec![Complex::new(u_star.sqrt(), 0.0)]))
    } else {
        Ok((boundary, vec![Complex::new(0.0, 0.0)]))
    }
}

/// Full closed-form witness report for the attenuated single photon probed
/// by its own s'-parameterized distribution under EPHD at ordering s.
pub fn witness_closed(eta: f64, s: f64, s_prime: f64) -> Result<WitnessReport, WitnessError> {
    let lhs = lhs_closed(eta, s_prime)?;
    let (rhs, argmax) = rhs_closed(eta, s, s_prime)?;
    let branch_point = 4.0 * eta - 2.0 + s_prime;
    let diagnostics = vec![
        format!("ephd closed form: eta = {eta}, s = {s}, s' = {s_prime}"),
        format!(
            "rhs branch: {} (branch point s = {branch_point})",
            if eta > 0.0 && s <= branch_point {
                "interior maximum"
            } else {
                "maximum at the origin"
            }
        ),
        "argmax is phase-degenerate: the supremum is attained on the circle |α| = argmax".into(),
    ];
    Ok(WitnessReport::assemble(
        lhs,
        rhs,
        argmax,
        EvalMethod::ClosedForm,
        diagnostics,
    ))
}
