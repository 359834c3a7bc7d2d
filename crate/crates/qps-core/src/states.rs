//! Closed catalog of quantum states with exact s-parameterized
//! quasiprobabilities, characteristic functions, photocount distributions and
//! quadrature distributions.
//!
//! Detection efficiency η is attributed to the states (an attenuated state is
//! a catalog entry), never to the POVM symbols; the appendix-style
//! alternative of folding η into the POVM is kept only as an internal
//! equivalence check in `povm`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kernel::Complex;

pub const DEFAULT_PNR_NMAX: usize = 64;

/// Mass a truncated counting table may miss before it is rejected.
pub const TAIL_MASS_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum StateError {
    #[error("invalid state parameter: {0}")]
    InvalidParameter(String),
    #[error("singular representation: s = {requested} requested for {state}, largest regular s is {max_regular_s} (exclusive)")]
    SingularRepresentation {
        requested: f64,
        max_regular_s: f64,
        state: String,
    },
    #[error("quadrature distribution not available for {0}; supported kinds are vacuum, coherent, fock and attenuated-fock")]
    UnsupportedQuadrature(String),
    #[error("photocount distribution truncated at n_max={n_max} misses mass {missing:e} (> {TAIL_MASS_TOL:e}); increase n_max")]
    TailMass { n_max: usize, missing: f64 },
}

pub(crate) mod complex_serde {
    use super::Complex;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Parts {
        re: f64,
        im: f64,
    }

    pub fn serialize<S: Serializer>(c: &Complex, s: S) -> Result<S::Ok, S::Error> {
        Parts { re: c.re, im: c.im }.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex, D::Error> {
        let p = Parts::deserialize(d)?;
        Ok(Complex::new(p.re, p.im))
    }
}

pub(crate) mod complex_vec_serde {
    use super::Complex;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Parts {
        re: f64,
        im: f64,
    }

    pub fn serialize<S: Serializer>(v: &[Complex], s: S) -> Result<S::Ok, S::Error> {
        let parts: Vec<Parts> = v.iter().map(|c| Parts { re: c.re, im: c.im }).collect();
        parts.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex>, D::Error> {
        let parts = Vec::<Parts>::deserialize(d)?;
        Ok(parts.into_iter().map(|p| Complex::new(p.re, p.im)).collect())
    }
}

/// Catalog of states appearing in the reproduced scenarios. Loss is part of
/// the state: `AttenuatedFock`, `SqueezedVacuum` and `EvenCat` carry their
/// efficiency η directly, a lossy coherent state is `Coherent` with amplitude
/// √η·α₀.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "kebab-case")]
pub enum QuantumState {
    Vacuum,
    Coherent {
        #[serde(with = "complex_serde")]
        alpha0: Complex,
    },
    Fock {
        n: u32,
    },
    AttenuatedFock {
        n: u32,
        eta: f64,
    },
    SqueezedVacuum {
        r: f64,
        eta: f64,
    },
    EvenCat {
        #[serde(with = "complex_serde")]
        alpha0: Complex,
        eta: f64,
    },
}

const PI: f64 = std::f64::consts::PI;

fn laguerre(n: u32, z: f64) -> f64 {
    match n {
        0 => 1.0,
        1 => 1.0 - z,
        _ => {
            let mut prev = 1.0;
            let mut cur = 1.0 - z;
            for k in 1..n {
                let kf = k as f64;
                let next = ((2.0 * kf + 1.0 - z) * cur - kf * prev) / (kf + 1.0);
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Quasiprobability of the Fock state |n⟩ at ordering s (regular for s < 1).
fn fock_quasiprob(n: u32, u: f64, s: f64) -> f64 {
    if (1.0 + s).abs() < 1e-12 {
        // Q function: u^n e^{-u} / (π n!)
        let mut ln = -u + (n as f64) * u.max(1e-300).ln();
        if u == 0.0 {
            return if n == 0 { 1.0 / PI } else { 0.0 };
        }
        for k in 1..=n {
            ln -= (k as f64).ln();
        }
        return ln.exp() / PI;
    }
    let t = (1.0 + s) / (1.0 - s);
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    2.0 / (PI * (1.0 - s))
        * sign
        * t.powi(n as i32)
        * laguerre(n, 4.0 * u / (1.0 - s * s))
        * (-2.0 * u / (1.0 - s)).exp()
}

pub(crate) fn fock_quasiprob_pub(n: u32, u: f64, s: f64) -> f64 {
    fock_quasiprob(n, u, s)
}

/// ⟨γ₂|γ₁⟩ for coherent states.
fn coherent_overlap(gamma1: Complex, gamma2: Complex) -> Complex {
    (gamma2.conj() * gamma1 - 0.5 * (gamma1.norm_sqr() + gamma2.norm_sqr())).exp()
}

impl QuantumState {
    pub fn validate(&self) -> Result<(), StateError> {
        let eta_ok = |eta: f64| (0.0..=1.0).contains(&eta);
        match self {
            QuantumState::Vacuum | QuantumState::Fock { .. } => Ok(()),
            QuantumState::Coherent { alpha0 } => {
                if alpha0.re.is_finite() && alpha0.im.is_finite() {
                    Ok(())
                } else {
                    Err(StateError::InvalidParameter("non-finite amplitude".into()))
                }
            }
            QuantumState::AttenuatedFock { eta, .. } => {
                if eta_ok(*eta) {
                    Ok(())
                } else {
                    Err(StateError::InvalidParameter(format!(
                        "eta = {eta} outside [0, 1]"
                    )))
                }
            }
            QuantumState::SqueezedVacuum { r, eta } => {
                if *r < 0.0 {
                    Err(StateError::InvalidParameter(format!(
                        "squeezing r = {r} must be >= 0"
                    )))
                } else if !eta_ok(*eta) {
                    Err(StateError::InvalidParameter(format!(
                        "eta = {eta} outside [0, 1]"
                    )))
                } else {
                    Ok(())
                }
            }
            QuantumState::EvenCat { alpha0, eta } => {
                if !(alpha0.re.is_finite() && alpha0.im.is_finite()) {
                    Err(StateError::InvalidParameter("non-finite amplitude".into()))
                } else if !eta_ok(*eta) {
                    Err(StateError::InvalidParameter(format!(
                        "eta = {eta} outside [0, 1]"
                    )))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// The state before attenuation (η stripped).
    pub fn lossless(&self) -> QuantumState {
        match self {
            QuantumState::AttenuatedFock { n, .. } => QuantumState::Fock { n: *n },
            QuantumState::SqueezedVacuum { r, .. } => QuantumState::SqueezedVacuum { r: *r, eta: 1.0 },
            QuantumState::EvenCat { alpha0, .. } => QuantumState::EvenCat {
                alpha0: *alpha0,
                eta: 1.0,
            },
            other => other.clone(),
        }
    }

    /// Efficiency carried by the state (1 where the catalog entry has none).
    pub fn eta(&self) -> f64 {
        match self {
            QuantumState::AttenuatedFock { eta, .. }
            | QuantumState::SqueezedVacuum { eta, .. }
            | QuantumState::EvenCat { eta, .. } => *eta,
            _ => 1.0,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            QuantumState::Vacuum => "vacuum",
            QuantumState::Coherent { .. } => "coherent",
            QuantumState::Fock { .. } => "fock",
            QuantumState::AttenuatedFock { .. } => "attenuated-fock",
            QuantumState::SqueezedVacuum { .. } => "squeezed-vacuum",
            QuantumState::EvenCat { .. } => "even-cat",
        }
    }

    /// Exclusive upper bound of the orderings where the quasiprobability is a
    /// regular function. All Fock-like states are regular up to (not
    /// including) s = 1; squeezed vacuum saturates earlier in its squeezed
    /// direction.
    pub fn max_regular_s(&self) -> f64 {
        match self {
            QuantumState::SqueezedVacuum { r, eta } => eta * (-2.0 * r).exp() + 1.0 - eta,
            _ => 1.0,
        }
    }

    /// s-parameterized quasiprobability P(α; s). Orderings at or above
    /// [`Self::max_regular_s`] are rejected with a diagnostic naming the
    /// bound; orderings below -1 are admitted (they arise as smoothed
    /// kernels, e.g. s' - s - 1 in the eight-port witness).
    pub fn quasiprob(&self, alpha: Complex, s: f64) -> Result<f64, StateError> {
        self.validate()?;
        let bound = self.max_regular_s();
        if !(s < bound) {
            return Err(StateError::SingularRepresentation {
                requested: s,
                max_regular_s: bound,
                state: self.kind_name().into(),
            });
        }
        let u = alpha.norm_sqr();
        Ok(match self {
            QuantumState::Vacuum => 2.0 / (PI * (1.0 - s)) * (-2.0 * u / (1.0 - s)).exp(),
            QuantumState::Coherent { alpha0 } => {
                let d = (alpha - alpha0).norm_sqr();
                2.0 / (PI * (1.0 - s)) * (-2.0 * d / (1.0 - s)).exp()
            }
            QuantumState::Fock { n } => fock_quasiprob(*n, u, s),
            QuantumState::AttenuatedFock { n, eta } => {
                let mut acc = 0.0;
                for m in 0..=*n {
                    acc += binomial(*n, m)
                        * eta.powi(m as i32)
                        * (1.0 - eta).powi((*n - m) as i32)
                        * fock_quasiprob(m, u, s);
                }
                acc
            }
            QuantumState::SqueezedVacuum { r, eta } => {
                let a = eta * (2.0 * r).exp() + 1.0 - eta - s;
                let b = eta * (-2.0 * r).exp() + 1.0 - eta - s;
                2.0 / (PI * (a * b).sqrt())
                    * (-2.0 * alpha.re * alpha.re / b - 2.0 * alpha.im * alpha.im / a).exp()
            }
            QuantumState::EvenCat { alpha0, eta } => {
                let u0 = alpha0.norm_sqr();
                let norm_sq = 1.0 / (2.0 * (1.0 + (-2.0 * u0).exp()));
                let se = eta.sqrt();
                let c = 2.0 / (1.0 - s);
                let mut acc = Complex::new(0.0, 0.0);
                for (su, sv) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                    // loss maps |uα₀⟩⟨vα₀| -> f_uv |√η uα₀⟩⟨√η vα₀|
                    let f_uv = ((1.0 - eta) * (su * sv - 1.0) * u0).exp();
                    let g1 = se * su * alpha0;
                    let g2 = se * sv * alpha0;
                    let dyad = coherent_overlap(g1, g2)
                        * (-c * (g2.conj() - alpha.conj()) * (g1 - alpha)).exp();
                    acc += f_uv * dyad;
                }
                debug_assert!(acc.im.abs() < 1e-10 * acc.re.abs().max(1.0));
                2.0 / (PI * (1.0 - s)) * norm_sq * acc.re
            }
        })
    }

    /// Cahill-Glauber characteristic function C(β; s); C(β; 0) of the lossy
    /// state is the lossless one at √η·β times the vacuum factor
    /// exp(-(1-η)|β|²/2), and general s multiplies exp(s|β|²/2).
    pub fn char_fn(&self, beta: Complex, s: f64) -> Complex {
        let eta = self.eta();
        let b = eta.sqrt() * beta;
        let pre: Complex = match self {
            QuantumState::Vacuum => Complex::new((-0.5 * b.norm_sqr()).exp(), 0.0),
            QuantumState::Coherent { alpha0 } => {
                ((b * alpha0.conj() - b.conj() * alpha0) - 0.5 * b.norm_sqr()).exp()
            }
            QuantumState::Fock { n } | QuantumState::AttenuatedFock { n, .. } => Complex::new(
                (-0.5 * b.norm_sqr()).exp() * laguerre(*n, b.norm_sqr()),
                0.0,
            ),
            QuantumState::SqueezedVacuum { r, .. } => Complex::new(
                (-0.5 * (2.0 * r).exp() * b.re * b.re - 0.5 * (-2.0 * r).exp() * b.im * b.im)
                    .exp(),
                0.0,
            ),
            QuantumState::EvenCat { alpha0, .. } => {
                let u0 = alpha0.norm_sqr();
                let norm_sq = 1.0 / (2.0 * (1.0 + (-2.0 * u0).exp()));
                let mut acc = Complex::new(0.0, 0.0);
                for (su, sv) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                    let g1 = su * alpha0;
                    let g2 = sv * alpha0;
                    // <γ₂|D(β)|γ₁> = <γ₂|γ₁+β> e^{(β γ̄₁ - β̄ γ₁)/2}
                    let v = coherent_overlap(g1 + b, g2)
                        * (0.5 * (b * g1.conj() - b.conj() * g1)).exp();
                    acc += v;
                }
                norm_sq * acc
            }
        };
        pre * Complex::new(
            ((s - (1.0 - eta)) * 0.5 * beta.norm_sqr()).exp(),
            0.0,
        )
    }

    /// Photon-number distribution after loss, truncated at `n_max` inclusive.
    pub fn photon_number_dist(&self, n_max: usize) -> Result<Vec<f64>, StateError> {
        self.validate()?;
        let eta = self.eta();
        // pre-loss distribution, extended far enough that the lossy tail check
        // is meaningful
        let pre_len = 4 * n_max + 64;
        let mut pre = vec![0.0f64; pre_len];
        match self {
            QuantumState::Vacuum => pre[0] = 1.0,
            QuantumState::Coherent { alpha0 } => {
                let u0 = alpha0.norm_sqr();
                let mut p = (-u0).exp();
                for (k, slot) in pre.iter_mut().enumerate() {
                    *slot = p;
                    p *= u0 / (k + 1) as f64;
                }
            }
            QuantumState::Fock { n } | QuantumState::AttenuatedFock { n, .. } => {
                if (*n as usize) < pre_len {
                    pre[*n as usize] = 1.0;
                }
            }
            QuantumState::SqueezedVacuum { r, .. } => {
                let t2 = r.tanh() * r.tanh();
                let mut p = 1.0 / r.cosh();
                let mut m = 0usize;
                while 2 * m < pre_len {
                    pre[2 * m] = p;
                    // p_{2(m+1)} / p_{2m} = tanh²r (2m+1)(2m+2)/(4 (m+1)²)
                    let mf = m as f64;
                    p *= t2 * (2.0 * mf + 1.0) * (2.0 * mf + 2.0) / (4.0 * (mf + 1.0) * (mf + 1.0));
                    m += 1;
                }
            }
            QuantumState::EvenCat { alpha0, .. } => {
                let u0 = alpha0.norm_sqr();
                let norm = 2.0 * (-u0).exp() / (1.0 + (-2.0 * u0).exp());
                let mut term = norm; // n = 0
                for n in (0..pre_len).step_by(2) {
                    pre[n] = term;
                    let nf = n as f64;
                    term *= u0 * u0 / ((nf + 1.0) * (nf + 2.0));
                }
            }
        }
        // binomial loss channel
        let mut post = vec![0.0f64; n_max + 1];
        for (m, pm) in pre.iter().enumerate() {
            if *pm == 0.0 {
                continue;
            }
            let kmax = m.min(n_max);
            for k in 0..=kmax {
                post[k] += pm
                    * binomial(m as u32, k as u32)
                    * eta.powi(k as i32)
                    * (1.0 - eta).powi((m - k) as i32);
            }
        }
        let missing = 1.0 - post.iter().sum::<f64>();
        if missing > TAIL_MASS_TOL {
            return Err(StateError::TailMass { n_max, missing });
        }
        Ok(post)
    }

    /// Normally-ordered generating function ⟨Φ|:e^{-c n̂}:|Φ⟩ of the pre-loss
    /// state; attenuation enters as c → η·c. This is the engine behind the
    /// closed-form click statistics.
    pub fn ordered_exp_gen(&self, c: f64) -> Result<f64, StateError> {
        self.validate()?;
        Ok(match self {
            QuantumState::Vacuum => 1.0,
            QuantumState::Coherent { alpha0 } => (-c * alpha0.norm_sqr()).exp(),
            QuantumState::Fock { n } | QuantumState::AttenuatedFock { n, .. } => {
                (1.0 - c).powi(*n as i32)
            }
            QuantumState::SqueezedVacuum { r, .. } => {
                let arg = 1.0 + c * (2.0 - c) * r.sinh() * r.sinh();
                if arg <= 0.0 {
                    return Err(StateError::InvalidParameter(format!(
                        "generating function diverges at c = {c} for squeezed vacuum r = {r}"
                    )));
                }
                1.0 / arg.sqrt()
            }
            QuantumState::EvenCat { alpha0, .. } => {
                let u0 = alpha0.norm_sqr();
                ((1.0 - c) * u0).cosh() / u0.cosh()
            }
        })
    }

    /// Quadrature distribution at phase φ. Supported for the phase-invariant
    /// Fock catalog entries and for coherent/vacuum states.
    pub fn quadrature_dist(&self, x: f64, phi: f64) -> Result<f64, StateError> {
        self.validate()?;
        fn fock_density(n: u32, x: f64) -> f64 {
            let h = crate::kernel::hermite(n, x);
            let mut norm = PI.sqrt();
            for k in 1..=n {
                norm *= 2.0 * k as f64;
            }
            h * h * (-x * x).exp() / norm
        }
        match self {
            QuantumState::Vacuum => Ok((-x * x).exp() / PI.sqrt()),
            QuantumState::Coherent { alpha0 } => {
                let x0 = std::f64::consts::SQRT_2 * (alpha0 * Complex::new(0.0, -phi).exp()).re;
                Ok((-(x - x0) * (x - x0)).exp() / PI.sqrt())
            }
            QuantumState::Fock { n } => Ok(fock_density(*n, x)),
            QuantumState::AttenuatedFock { n, eta } => {
                let mut acc = 0.0;
                for m in 0..=*n {
                    acc += binomial(*n, m)
                        * eta.powi(m as i32)
                        * (1.0 - eta).powi((*n - m) as i32)
                        * fock_density(m, x);
                }
                Ok(acc)
            }
            other => Err(StateError::UnsupportedQuadrature(other.kind_name().into())),
        }
    }
}

/// Counting measurement structure used by [`QuantumState::photocount_dist`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountingDetector {
    /// Ideal photon-number resolution, table truncated at `n_max` inclusive.
    Pnr { n_max: usize },
    /// Array of N on/off detectors; the outcome is the number of clicks.
    Click { detectors: u32 },
    OnOff,
}

impl QuantumState {
    /// Outcome probability table for a counting detector, from the exact
    /// finite-sum closed forms (clicks) or the lossy photon-number
    /// distribution (PNR).
    pub fn photocount_dist(&self, det: &CountingDetector) -> Result<Vec<f64>, StateError> {
        match det {
            CountingDetector::Pnr { n_max } => self.photon_number_dist(*n_max),
            CountingDetector::OnOff => self.photocount_dist(&CountingDetector::Click {
                detectors: 1,
            }),
            CountingDetector::Click { detectors } => {
                let n_det = *detectors;
                let eta = self.eta();
                let mut table = Vec::with_capacity(n_det as usize + 1);
                for n in 0..=n_det {
                    let mut acc = 0.0;
                    for k in 0..=n {
                        let c = eta * (n_det - k) as f64 / n_det as f64;
                        let sign = if (n - k) % 2 == 0 { 1.0 } else { -1.0 };
                        acc += binomial(n, k) * sign * self.ordered_exp_gen(c)?;
                    }
                    table.push(binomial(n_det, n) * acc);
                }
                Ok(table)
            }
        }
    }
}
