//! Numerical kernel: special functions, deterministic quadrature, the
//! Gaussian ordering convolution and supremum search over the complex plane.
//!
//! Everything here is pure and deterministic for fixed inputs; grid scans may
//! run in parallel but reduce to the same result regardless of thread count.

mod convolve;
mod hermite;
mod quad;
mod supremum;

pub use convolve::gaussian_convolve;
pub use hermite::hermite;
pub use quad::{
    gauss_hermite, quadrature_1d, quadrature_2d, quadrature_2d_with_center, Domain1D, QuadResult,
};
pub use supremum::{supremum_over_plane, supremum_radial, Supremum};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Field amplitudes, characteristic arguments and displacements all live on
/// the complex plane.
pub type Complex = num_complex::Complex64;

#[derive(Debug, Error)]
pub enum KernelError {
    #[error("ordering parameter {0} outside [-1, 1]")]
    OrderingOutOfRange(f64),
    #[error("degenerate convolution: s_to = {0} must be strictly below s_from = {1}; evaluate the function directly instead")]
    DegenerateConvolution(f64, f64),
    #[error("quadrature tolerance {requested:e} not met: value {value:e}, achieved error estimate {achieved:e}")]
    ToleranceNotMet {
        value: f64,
        requested: f64,
        achieved: f64,
    },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

/// Cahill-Glauber ordering parameter, validated to the physical range
/// s ∈ [-1, 1] (Q function at -1, Wigner at 0, Glauber-Sudarshan P at +1).
///
/// Internal evaluations of smoothed distributions may use raw orderings below
/// -1 (e.g. `s' - s - 1` in the eight-port witness); those call sites take
/// plain `f64`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OrderingParam(f64);

impl OrderingParam {
    pub fn new(s: f64) -> Result<Self, KernelError> {
        if !(s >= -1.0 && s <= 1.0) {
            return Err(KernelError::OrderingOutOfRange(s));
        }
        Ok(Self(s))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Controls supremum searches and quadrature domains.
///
/// The defaults (radius 6, 121 points per axis, tolerance 1e-8) comfortably
/// cover every catalog state with mean photon number ≲ 4; all features of the
/// reproduced scenarios sit well inside |α| ≤ 3.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridSpec {
    pub radius: f64,
    pub points_per_axis: usize,
    pub refinement_iterations: usize,
    pub refinement_tolerance: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            radius: 6.0,
            points_per_axis: 121,
            refinement_iterations: 60,
            refinement_tolerance: 1e-8,
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<(), KernelError> {
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(KernelError::InvalidGrid(format!(
                "radius must be finite and positive, got {}",
                self.radius
            )));
        }
        if self.points_per_axis < 2 {
            return Err(KernelError::InvalidGrid(format!(
                "need at least 2 points per axis, got {}",
                self.points_per_axis
            )));
        }
        if !(self.refinement_tolerance > 0.0) {
            return Err(KernelError::InvalidGrid(format!(
                "refinement tolerance must be positive, got {}",
                self.refinement_tolerance
            )));
        }
        Ok(())
    }
}
