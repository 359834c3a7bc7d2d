//! Gaussian smoothing between quasiprobability orderings.

use super::quad::gauss_hermite;
use super::{Complex, KernelError, QuadResult};

/// Smooths a phase-space function from ordering `s_from` down to `s_to`:
///
///   P(α; s_to) = 2/(π(s_from−s_to)) ∫ d²γ f(γ) exp(−2|α−γ|²/(s_from−s_to))
///
/// evaluated by tensor Gauss-Hermite quadrature centered at α. The degenerate
/// case `s_to == s_from` is rejected; callers short-circuit to `f(α)`.
pub fn gaussian_convolve<F: Fn(Complex) -> f64>(
    f: F,
    s_from: f64,
    s_to: f64,
    alpha: Complex,
    tol: f64,
) -> Result<QuadResult, KernelError> {
    if !(s_to < s_from) {
        return Err(KernelError::DegenerateConvolution(s_to, s_from));
    }
    // substitute γ = α + σ t, σ = sqrt((s_from - s_to)/2); prefactor becomes 1/π
    let sigma = (0.5 * (s_from - s_to)).sqrt();
    let eval = |order: usize| -> f64 {
        let rule = gauss_hermite(order);
        let mut acc = 0.0;
        for (tx, wx) in rule.nodes.iter().zip(&rule.weights) {
            let mut row = 0.0;
            for (ty, wy) in rule.nodes.iter().zip(&rule.weights) {
                row += wy * f(alpha + Complex::new(sigma * tx, sigma * ty));
            }
            acc += wx * row;
        }
        acc / std::f64::consts::PI
    };
    let mut prev = f64::NAN;
    let mut best = (f64::NAN, f64::INFINITY);
    for order in [24usize, 48, 96] {
        let value = eval(order);
        if prev.is_finite() {
            let err = (value - prev).abs();
            if err < best.1 {
                best = (value, err);
            }
            if err <= tol {
                return Ok(QuadResult {
                    value,
                    error_estimate: err,
                });
            }
        }
        prev = value;
    }
    Err(KernelError::ToleranceNotMet {
        value: best.0,
        requested: tol,
        achieved: best.1,
    })
}
