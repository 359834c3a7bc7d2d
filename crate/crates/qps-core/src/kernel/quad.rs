//! Deterministic quadrature: Gauss-Hermite and composite Gauss-Legendre
//! rules with order/panel escalation and explicit error estimates.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use once_cell::sync::Lazy;

use super::{Complex, KernelError};

/// Nodes and weights of an n-point rule.
///
/// `weights` are the plain Gauss-Hermite weights for ∫ e^{-x²} h(x) dx;
/// `total_weights` fold the e^{x²} factor back in, so ∫ f(x) dx ≈ Σ wᵢ f(xᵢ)
/// for integrands with their own Gaussian decay. The total weights are
/// computed through Hermite *functions* (polynomial times e^{-x²/2}), which
/// stay bounded, so no overflow occurs even at high order.
#[derive(Debug, Clone)]
pub struct GaussHermiteRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub total_weights: Vec<f64>,
}

fn hermite_function_pair(n: usize, x: f64) -> (f64, f64) {
    // Returns (q_n(x), q_{n-1}(x)) for the orthonormal Hermite functions
    // q_k = p_k e^{-x²/2}, p_k orthonormal wrt e^{-x²}.
    let mut q_prev = 0.0f64;
    let mut q = std::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp();
    for k in 1..=n {
        let kf = k as f64;
        let q_next = x * (2.0 / kf).sqrt() * q - ((kf - 1.0) / kf).sqrt() * q_prev;
        q_prev = q;
        q = q_next;
    }
    (q, q_prev)
}

fn compute_gauss_hermite(n: usize) -> GaussHermiteRule {
    assert!(n >= 2);
    let m = (n + 1) / 2;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let mut total = vec![0.0; n];
    let nf = n as f64;
    let mut z = 0.0f64;
    for i in 0..m {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * nodes[0],
            3 => 1.91 * z - 0.91 * nodes[1],
            _ => 2.0 * z - nodes[i - 2],
        };
        for _ in 0..200 {
            let (q, q_prev) = hermite_function_pair(n, z);
            let dq = (2.0 * nf).sqrt() * q_prev - z * q;
            let dz = q / dq;
            z -= dz;
            if dz.abs() < 1e-15 * (1.0 + z.abs()) {
                break;
            }
        }
        let (_, q_prev) = hermite_function_pair(n, z);
        nodes[i] = z;
        total[i] = 1.0 / (nf * q_prev * q_prev);
        weights[i] = total[i] * (-z * z).exp();
        nodes[n - 1 - i] = -z;
        total[n - 1 - i] = total[i];
        weights[n - 1 - i] = weights[i];
    }
    if n % 2 == 1 {
        nodes[m - 1] = 0.0;
        let (_, q_prev) = hermite_function_pair(n, 0.0);
        total[m - 1] = 1.0 / (nf * q_prev * q_prev);
        weights[m - 1] = total[m - 1];
    }
    GaussHermiteRule {
        nodes,
        weights,
        total_weights: total,
    }
}

fn compute_gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    // Nodes/weights on [-1, 1].
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = (n + 1) / 2;
    let nf = n as f64;
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..200 {
            let mut p1 = 1.0f64;
            let mut p2 = 0.0f64;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j as f64 + 1.0) * z * p2 - j as f64 * p3) / (j as f64 + 1.0);
            }
            pp = nf * (z * p1 - p2) / (z * z - 1.0);
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        weights[n - 1 - i] = weights[i];
    }
    (nodes, weights)
}

static GH_CACHE: Lazy<Mutex<HashMap<usize, Arc<GaussHermiteRule>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));
static GL_CACHE: Lazy<Mutex<HashMap<usize, Arc<(Vec<f64>, Vec<f64>)>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// Cached n-point Gauss-Hermite rule.
pub fn gauss_hermite(n: usize) -> Arc<GaussHermiteRule> {
    let mut cache = GH_CACHE.lock().unwrap();
    cache
        .entry(n)
        .or_insert_with(|| Arc::new(compute_gauss_hermite(n)))
        .clone()
}

fn gauss_legendre(n: usize) -> Arc<(Vec<f64>, Vec<f64>)> {
    let mut cache = GL_CACHE.lock().unwrap();
    cache
        .entry(n)
        .or_insert_with(|| Arc::new(compute_gauss_legendre(n)))
        .clone()
}

/// Integration domain for [`quadrature_1d`].
#[derive(Debug, Clone, Copy)]
pub enum Domain1D {
    Interval { lo: f64, hi: f64 },
    /// Whole real line; the integrand is expected to decay at least like
    /// exp(-((x-center)/scale)²) so Gauss-Hermite applies after rescaling.
    RealLine { center: f64, scale: f64 },
    /// [0, ∞) with integrand decay ~ exp(-decay·x).
    HalfLine { decay: f64 },
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
}

fn composite_legendre<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, panels: usize) -> f64 {
    let rule = gauss_legendre(20);
    let (nodes, weights) = rule.as_ref();
    let h = (hi - lo) / panels as f64;
    let mut acc = 0.0;
    for p in 0..panels {
        let a = lo + p as f64 * h;
        let mid = a + 0.5 * h;
        let half = 0.5 * h;
        let mut s = 0.0;
        for (t, w) in nodes.iter().zip(weights) {
            s += w * f(mid + half * t);
        }
        acc += s * half;
    }
    acc
}

/// Deterministic 1-D quadrature with an escalating rule; errors are estimated
/// by comparing consecutive refinements. Fails (with the achieved estimate)
/// when the requested tolerance cannot be met.
pub fn quadrature_1d<F: Fn(f64) -> f64>(
    f: F,
    domain: Domain1D,
    tol: f64,
) -> Result<QuadResult, KernelError> {
    match domain {
        Domain1D::RealLine { center, scale } => {
            let mut prev = f64::NAN;
            let mut best = (f64::NAN, f64::INFINITY);
            for order in [32usize, 64, 96, 128, 160] {
                let rule = gauss_hermite(order);
                let mut s = 0.0;
                for (t, w) in rule.nodes.iter().zip(&rule.total_weights) {
                    s += w * f(center + scale * t);
                }
                let value = scale * s;
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
        Domain1D::Interval { lo, hi } => {
            let mut prev = f64::NAN;
            let mut best = (f64::NAN, f64::INFINITY);
            for panels in [2usize, 4, 8, 16, 32, 64] {
                let value = composite_legendre(&f, lo, hi, panels);
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
        Domain1D::HalfLine { decay } => {
            let decay = decay.max(1e-3);
            let hi = 45.0 / decay;
            quadrature_1d(f, Domain1D::Interval { lo: 0.0, hi }, tol)
        }
    }
}

fn tensor_legendre<F: Fn(Complex) -> f64>(
    f: &F,
    center: Complex,
    radius: f64,
    panels: usize,
) -> f64 {
    let rule = gauss_legendre(16);
    let (nodes, weights) = rule.as_ref();
    let h = 2.0 * radius / panels as f64;
    let half = 0.5 * h;
    // 1-D panel nodes/weights, then tensor product
    let mut xs = Vec::with_capacity(panels * nodes.len());
    let mut ws = Vec::with_capacity(panels * nodes.len());
    for p in 0..panels {
        let mid = -radius + (p as f64 + 0.5) * h;
        for (t, w) in nodes.iter().zip(weights) {
            xs.push(mid + half * t);
            ws.push(w * half);
        }
    }
    let mut acc = 0.0;
    for (x, wx) in xs.iter().zip(&ws) {
        let mut row = 0.0;
        for (y, wy) in xs.iter().zip(&ws) {
            row += wy * f(center + Complex::new(*x, *y));
        }
        acc += wx * row;
    }
    acc
}

/// 2-D quadrature of a phase-space function over the square |Re|,|Im| ≤
/// radius centered at the origin.
pub fn quadrature_2d<F: Fn(Complex) -> f64>(
    f: F,
    radius: f64,
    tol: f64,
) -> Result<QuadResult, KernelError> {
    quadrature_2d_with_center(f, Complex::new(0.0, 0.0), radius, tol)
}

/// Same as [`quadrature_2d`] but centered at `center` (for displaced states).
pub fn quadrature_2d_with_center<F: Fn(Complex) -> f64>(
    f: F,
    center: Complex,
    radius: f64,
    tol: f64,
) -> Result<QuadResult, KernelError> {
    let mut prev = f64::NAN;
    let mut best = (f64::NAN, f64::INFINITY);
    for panels in [4usize, 8, 16, 32, 64] {
        let value = tensor_legendre(&f, center, radius, panels);
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
