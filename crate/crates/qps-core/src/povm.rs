//! s-parameterized POVM symbols for the five measurement schemes and their
//! Born-rule evaluation routes.
//!
//! A scheme's symbol Π(A|a; α; −s) is non-negative for every outcome exactly
//! when s ≥ s_th: photocounting (PNR, click arrays, on/off) and unbalanced
//! homodyne have s_th = 1, balanced homodyne s_th = 0, eight-port homodyne
//! s_th = −1. Symbols are normalized so that summing (or integrating) over
//! outcomes gives 1 pointwise in α, which makes the Born rule hold against
//! quasiprobabilities normalized to unit total mass.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kernel::{self, Complex, KernelError};
use crate::states::{complex_serde, CountingDetector, QuantumState, StateError, DEFAULT_PNR_NMAX};

const PI: f64 = std::f64::consts::PI;

#[derive(Debug, Error)]
pub enum PovmError {
    #[error("outcome {outcome} out of range for {scheme}")]
    OutcomeOutOfRange { scheme: &'static str, outcome: String },
    #[error("{scheme} symbol not representable at ordering -s with s = {s}: {reason}")]
    OrderingUnsupported {
        scheme: &'static str,
        s: f64,
        reason: String,
    },
    #[error("efficiency eta = 0 is singular in the click characteristic function")]
    ZeroEfficiency,
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("outcome/setting does not match scheme: {0}")]
    DomainMismatch(String),
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// Measurement outcome: a count, a quadrature value, or a complex amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Count(u32),
    Quadrature(f64),
    Amplitude(#[serde(with = "complex_serde")] Complex),
}

/// Device setting: none (single-setting schemes), a coherent displacement
/// (UHD), or a local-oscillator phase (BHD).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Setting {
    None,
    Displacement(#[serde(with = "complex_serde")] Complex),
    Phase(f64),
}

/// Outcome and setting domains of a scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeSettingDomain {
    pub outcomes: OutcomeDomain,
    pub settings: Vec<Setting>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum OutcomeDomain {
    /// Counts 0..=max.
    Counts { max: u32 },
    /// Counts without an intrinsic bound (PNR); truncated at n_max in practice.
    UnboundedCounts { n_max: u32 },
    RealLine,
    Plane,
}

/// Measurement scheme. BHD and EPHD carry the ordering s at which the witness
/// operates; counting schemes and UHD only admit s = s_th = 1.
#[derive(Debug, Clone, PartialEq)]
pub enum PovmModel {
    Pnr,
    Click { detectors: u32 },
    OnOff,
    Uhd { displacements: Vec<Complex> },
    Bhd { phases: Vec<f64>, s: f64 },
    Ephd { s: f64 },
}

impl PovmModel {
    pub fn scheme_name(&self) -> &'static str {
        match self {
            PovmModel::Pnr => "pnr",
            PovmModel::Click { .. } => "click",
            PovmModel::OnOff => "on-off",
            PovmModel::Uhd { .. } => "uhd",
            PovmModel::Bhd { .. } => "bhd",
            PovmModel::Ephd { .. } => "ephd",
        }
    }

    /// Threshold ordering: smallest s with all symbols non-negative.
    pub fn s_th(&self) -> f64 {
        match self {
            PovmModel::Pnr | PovmModel::Click { .. } | PovmModel::OnOff | PovmModel::Uhd { .. } => {
                1.0
            }
            PovmModel::Bhd { .. } => 0.0,
            PovmModel::Ephd { .. } => -1.0,
        }
    }

    /// Ordering at which the model evaluates by default.
    pub fn default_s(&self) -> f64 {
        match self {
            PovmModel::Bhd { s, .. } | PovmModel::Ephd { s } => *s,
            _ => self.s_th(),
        }
    }

    pub fn validate(&self) -> Result<(), PovmError> {
        match self {
            PovmModel::Click { detectors } if *detectors < 1 => Err(PovmError::InvalidModel(
                "click array needs at least one detector".into(),
            )),
            PovmModel::Uhd { displacements } if displacements.is_empty() => Err(
                PovmError::InvalidModel("uhd needs at least one displacement setting".into()),
            ),
            PovmModel::Bhd { phases, s } => {
                if phases.is_empty() {
                    return Err(PovmError::InvalidModel("bhd needs at least one phase".into()));
                }
                if phases.iter().any(|p| !(0.0..PI).contains(p)) {
                    return Err(PovmError::InvalidModel(
                        "bhd phases must lie in [0, pi)".into(),
                    ));
                }
                if !(0.0..=1.0).contains(s) {
                    return Err(PovmError::InvalidModel(format!(
                        "bhd ordering s = {s} outside [0, 1]"
                    )));
                }
                Ok(())
            }
            PovmModel::Ephd { s } => {
                if !(-1.0..=1.0).contains(s) {
                    return Err(PovmError::InvalidModel(format!(
                        "ephd ordering s = {s} outside [-1, 1]"
                    )));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Evenly spaced BHD phases φ_k = πk/K.
    pub fn bhd_equispaced(k: u32, s: f64) -> Self {
        PovmModel::Bhd {
            phases: (0..k).map(|i| PI * i as f64 / k as f64).collect(),
            s,
        }
    }

    pub fn settings(&self) -> Vec<Setting> {
        match self {
            PovmModel::Pnr | PovmModel::Click { .. } | PovmModel::OnOff | PovmModel::Ephd { .. } => {
                vec![Setting::None]
            }
            PovmModel::Uhd { displacements } => displacements
                .iter()
                .map(|g| Setting::Displacement(*g))
                .collect(),
            PovmModel::Bhd { phases, .. } => phases.iter().map(|p| Setting::Phase(*p)).collect(),
        }
    }

    pub fn domain(&self) -> OutcomeSettingDomain {
        let outcomes = match self {
            PovmModel::Pnr => OutcomeDomain::UnboundedCounts {
                n_max: DEFAULT_PNR_NMAX as u32,
            },
            PovmModel::Click { detectors } => OutcomeDomain::Counts { max: *detectors },
            PovmModel::OnOff | PovmModel::Uhd { .. } => OutcomeDomain::Counts { max: 1 },
            PovmModel::Bhd { .. } => OutcomeDomain::RealLine,
            PovmModel::Ephd { .. } => OutcomeDomain::Plane,
        };
        OutcomeSettingDomain {
            outcomes,
            settings: self.settings(),
        }
    }

    /// Counting-detector view for schemes with photocount statistics.
    pub fn counting(&self) -> Option<CountingDetector> {
        match self {
            PovmModel::Pnr => Some(CountingDetector::Pnr {
                n_max: DEFAULT_PNR_NMAX,
            }),
            PovmModel::Click { detectors } => Some(CountingDetector::Click {
                detectors: *detectors,
            }),
            PovmModel::OnOff => Some(CountingDetector::OnOff),
            _ => None,
        }
    }
}

// JSON wire format: {scheme, params, s}
#[derive(Serialize, Deserialize)]
struct PovmJson {
    scheme: String,
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    params: serde_json::Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    s: Option<f64>,
}

impl Serialize for PovmModel {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde_json::json;
        let (scheme, params, s) = match self {
            PovmModel::Pnr => ("pnr", serde_json::Value::Null, None),
            PovmModel::Click { detectors } => ("click", json!({ "detectors": detectors }), None),
            PovmModel::OnOff => ("on-off", serde_json::Value::Null, None),
            PovmModel::Uhd { displacements } => {
                let gs: Vec<_> = displacements
                    .iter()
                    .map(|g| json!({ "re": g.re, "im": g.im }))
                    .collect();
                ("uhd", json!({ "displacements": gs }), None)
            }
            PovmModel::Bhd { phases, s } => ("bhd", json!({ "phases": phases }), Some(*s)),
            PovmModel::Ephd { s } => ("ephd", serde_json::Value::Null, Some(*s)),
        };
        PovmJson {
            scheme: scheme.to_string(),
            params,
            s,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PovmModel {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = PovmJson::deserialize(deserializer)?;
        let model = match raw.scheme.as_str() {
            "pnr" => PovmModel::Pnr,
            "on-off" => PovmModel::OnOff,
            "click" => {
                let detectors = raw.params["detectors"]
                    .as_u64()
                    .ok_or_else(|| D::Error::custom("click params need `detectors`"))?;
                PovmModel::Click {
                    detectors: detectors as u32,
                }
            }
            "uhd" => {
                let gs = raw.params["displacements"]
                    .as_array()
                    .ok_or_else(|| D::Error::custom("uhd params need `displacements`"))?;
                let displacements = gs
                    .iter()
                    .map(|v| {
                        Ok(Complex::new(
                            v["re"].as_f64().ok_or_else(|| D::Error::custom("bad re"))?,
                            v["im"].as_f64().ok_or_else(|| D::Error::custom("bad im"))?,
                        ))
                    })
                    .collect::<Result<Vec<_>, D::Error>>()?;
                PovmModel::Uhd { displacements }
            }
            "bhd" => {
                let phases = raw.params["phases"]
                    .as_array()
                    .ok_or_else(|| D::Error::custom("bhd params need `phases`"))?
                    .iter()
                    .map(|v| v.as_f64().ok_or_else(|| D::Error::custom("bad phase")))
                    .collect::<Result<Vec<_>, D::Error>>()?;
                PovmModel::Bhd {
                    phases,
                    s: raw.s.unwrap_or(0.0),
                }
            }
            "ephd" => PovmModel::Ephd {
                s: raw.s.unwrap_or(-1.0),
            },
            other => return Err(D::Error::custom(format!("unknown scheme `{other}`"))),
        };
        model.validate().map_err(D::Error::custom)?;
        Ok(model)
    }
}

// ---------------------------------------------------------------------------
// Symbols
// ---------------------------------------------------------------------------

fn ln_factorial(n: u32) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

/// Ideal PNR symbol at the threshold ordering (−s = −1): Poissonian
/// |α|^{2n} e^{−|α|²} / n!.
pub fn pnr_symbol(n: u32, alpha: Complex) -> f64 {
    let u = alpha.norm_sqr();
    if u == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    ((n as f64) * u.ln() - u - ln_factorial(n)).exp()
}

/// PNR symbol at a general ordering σ = −s (requires σ < 1, i.e. s > −1);
/// this is the s-parameterized quasiprobability of the Fock projector scaled
/// to partition-of-unity normalization.
pub fn pnr_symbol_at(n: u32, alpha: Complex, sigma: f64) -> Result<f64, PovmError> {
    if !(sigma < 1.0) {
        return Err(PovmError::OrderingUnsupported {
            scheme: "pnr",
            s: -sigma,
            reason: "symbol ordering must satisfy -s < 1".into(),
        });
    }
    Ok(PI * crate::states::fock_quasiprob_pub(n, alpha.norm_sqr(), sigma))
}

/// Click-array symbol at the threshold ordering: the beam is split into N
/// modes, each watched by an on/off detector.
pub fn click_symbol(n: u32, detectors: u32, alpha: Complex) -> Result<f64, PovmError> {
    if n > detectors {
        return Err(PovmError::OutcomeOutOfRange {
            scheme: "click",
            outcome: format!("{n} clicks from {detectors} detectors"),
        });
    }
    let u = alpha.norm_sqr();
    let nf = detectors as f64;
    let p = 1.0 - (-u / nf).exp();
    Ok(binom(detectors, n) * p.powi(n as i32) * (-u * (nf - n as f64) / nf).exp())
}

fn binom(n: u32, k: u32) -> f64 {
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

/// Click-array symbol at a general ordering σ = −s (σ < 1), from the
/// characteristic-function representation: a finite alternating sum of
/// Gaussians.
pub fn click_symbol_at(
    n: u32,
    detectors: u32,
    alpha: Complex,
    sigma: f64,
) -> Result<f64, PovmError> {
    if n > detectors {
        return Err(PovmError::OutcomeOutOfRange {
            scheme: "click",
            outcome: format!("{n} clicks from {detectors} detectors"),
        });
    }
    if !(sigma < 1.0) {
        return Err(PovmError::OrderingUnsupported {
            scheme: "click",
            s: -sigma,
            reason: "symbol ordering must satisfy -s < 1".into(),
        });
    }
    let u = alpha.norm_sqr();
    let nf = detectors as f64;
    let mut acc = 0.0;
    for k in 0..=n {
        let kf = k as f64;
        let sign = if (n - k) % 2 == 0 { 1.0 } else { -1.0 };
        if k == detectors {
            // the k = N term is the identity operator :e^{0·n̂}:, whose
            // symbol is 1 at every ordering
            acc += binom(n, k) * sign;
            continue;
        }
        let a_k = (nf + kf) / (2.0 * (nf - kf)) - 0.5 * sigma;
        acc += binom(n, k) * sign * nf / ((nf - kf) * a_k) * (-u / a_k).exp();
    }
    Ok(binom(detectors, n) * acc)
}

/// Characteristic function of the click symbol with efficiency η folded into
/// the POVM (the appendix-side convention, used as an internal equivalence
/// route): finite alternating sum, ordering factor e^{s|β|²/2}.
///
/// For the saturated outcome n = N the k = N term is a unit-weight delta at
/// β = 0 (the identity operator); it is omitted from the pointwise value and
/// Born integrals add C(0; s) = 1 for it, as [`click_born_via_char`] does.
pub fn click_char(n: u32, detectors: u32, beta: Complex, s: f64, eta: f64) -> Result<f64, PovmError> {
    if n > detectors {
        return Err(PovmError::OutcomeOutOfRange {
            scheme: "click",
            outcome: format!("{n} clicks from {detectors} detectors"),
        });
    }
    if eta <= 0.0 {
        return Err(PovmError::ZeroEfficiency);
    }
    let b2 = beta.norm_sqr();
    let nf = detectors as f64;
    let mut acc = 0.0;
    for k in 0..=n.min(detectors.saturating_sub(1)) {
        let kf = k as f64;
        let sign = if (n - k) % 2 == 0 { 1.0 } else { -1.0 };
        acc += binom(n, k)
            * sign
            * nf
            / (PI * eta * (nf - kf))
            * (-b2 * ((2.0 - eta) * nf + eta * kf) / (2.0 * eta * (nf - kf))).exp();
    }
    Ok(binom(detectors, n) * acc * (0.5 * s * b2).exp())
}

/// Born rule through the characteristic representation,
/// 𝒫(n) = ∫ d²β Π_C(n|β; −s) C(β; s), with η inside the POVM characteristic
/// function and the pre-loss state's C(β; s). Equivalent to attributing the
/// loss to the state; kept as the internal equivalence route.
pub fn click_born_via_char(
    state: &QuantumState,
    n: u32,
    detectors: u32,
    s: f64,
    radius: f64,
    tol: f64,
) -> Result<f64, PovmError> {
    let eta = state.eta();
    if eta <= 0.0 {
        return Err(PovmError::ZeroEfficiency);
    }
    let lossless = state.lossless();
    let f = move |beta: Complex| {
        let pic = click_char(n, detectors, beta, -s, eta).unwrap_or(0.0);
        pic * lossless.char_fn(beta, s).re
    };
    let mut value = crate::kernel::quadrature_2d(f, radius, tol)?.value;
    if n == detectors {
        // delta term of the saturated outcome integrates C(0; s) = 1
        value += 1.0;
    }
    Ok(value)
}

/// UHD symbol at the threshold ordering: displaced on/off detection,
/// n ∈ {0, 1}.
pub fn uhd_symbol(n: u32, gamma: Complex, alpha: Complex) -> Result<f64, PovmError> {
    if n > 1 {
        return Err(PovmError::OutcomeOutOfRange {
            scheme: "uhd",
            outcome: format!("count {n}"),
        });
    }
    let d = (alpha - gamma).norm_sqr();
    Ok(if n == 0 {
        (-d).exp()
    } else {
        1.0 - (-d).exp()
    })
}

/// UHD symbol at a general ordering σ = −s (σ < 1).
pub fn uhd_symbol_at(n: u32, gamma: Complex, alpha: Complex, sigma: f64) -> Result<f64, PovmError> {
    if n > 1 {
        return Err(PovmError::OutcomeOutOfRange {
            scheme: "uhd",
            outcome: format!("count {n}"),
        });
    }
    if !(sigma < 1.0) {
        return Err(PovmError::OrderingUnsupported {
            scheme: "uhd",
            s: -sigma,
            reason: "symbol ordering must satisfy -s < 1".into(),
        });
    }
    let d = (alpha - gamma).norm_sqr();
    let p0 = 2.0 / (1.0 - sigma) * (-2.0 * d / (1.0 - sigma)).exp();
    Ok(if n == 0 { p0 } else { 1.0 - p0 })
}

/// BHD symbol Π(x|φ; α; −s) for s > 0 (a Gaussian of variance s/2 around the
/// rotated quadrature mean). The s = 0 delta kernel is never evaluated
/// pointwise; witnesses route through the integrated closed forms.
pub fn bhd_symbol(x: f64, phi: f64, alpha: Complex, s: f64) -> Result<f64, PovmError> {
    if !(s > 0.0) {
        return Err(PovmError::OrderingUnsupported {
            scheme: "bhd",
            s,
            reason: "pointwise symbol needs s > 0; use the integrated closed forms at s = 0".into(),
        });
    }
    let x0 = std::f64::consts::SQRT_2 * (alpha * Complex::new(0.0, -phi).exp()).re;
    Ok((-(x - x0) * (x - x0) / s).exp() / (PI * s).sqrt())
}

/// EPHD symbol Π(α₀|α; −s) for s ∈ (−1, 1]. At s = −1 the kernel degenerates
/// to a delta; callers use the identity 𝒫(α₀) = Q(α₀) instead.
pub fn ephd_symbol(alpha0: Complex, alpha: Complex, s: f64) -> Result<f64, PovmError> {
    if s <= -1.0 {
        return Err(PovmError::OrderingUnsupported {
            scheme: "ephd",
            s,
            reason: "delta limit; use P(alpha0) = Q(alpha0) directly".into(),
        });
    }
    let d = (alpha0 - alpha).norm_sqr();
    Ok(2.0 / (PI * (1.0 + s)) * (-2.0 * d / (1.0 + s)).exp())
}

// ---------------------------------------------------------------------------
// Born rule
// ---------------------------------------------------------------------------

/// Outcome probability (or density, for continuous outcomes) via the route
/// each scheme declares preferred: exact finite sums for counting schemes,
/// closed overlaps for UHD/EPHD, quadrature-distribution closed forms for BHD
/// at s = 0 and Gaussian smoothing at s > 0.
pub fn born_probability(
    state: &QuantumState,
    model: &PovmModel,
    outcome: &Outcome,
    setting: &Setting,
) -> Result<f64, PovmError> {
    model.validate()?;
    match (model, outcome, setting) {
        (PovmModel::Pnr | PovmModel::Click { .. } | PovmModel::OnOff, Outcome::Count(n), Setting::None) => {
            let det = model.counting().expect("counting scheme");
            let table = state.photocount_dist(&det)?;
            table
                .get(*n as usize)
                .copied()
                .ok_or_else(|| PovmError::OutcomeOutOfRange {
                    scheme: model.scheme_name(),
                    outcome: format!("count {n}"),
                })
        }
        (PovmModel::Uhd { .. }, Outcome::Count(n), Setting::Displacement(gamma)) => {
            if *n > 1 {
                return Err(PovmError::OutcomeOutOfRange {
                    scheme: "uhd",
                    outcome: format!("count {n}"),
                });
            }
            // no-click probability is the displaced vacuum overlap π·Q(γ)
            let p0 = PI * state.quasiprob(*gamma, -1.0)?;
            Ok(if *n == 0 { p0 } else { 1.0 - p0 })
        }
        (PovmModel::Bhd { s, .. }, Outcome::Quadrature(x), Setting::Phase(phi)) => {
            if *s == 0.0 {
                Ok(state.quadrature_dist(*x, *phi)?)
            } else {
                // Gaussian smoothing of the quadrature distribution
                let x = *x;
                let phi = *phi;
                let s = *s;
                let st = state.clone();
                let f = move |y: f64| {
                    st.quadrature_dist(y, phi).unwrap_or(0.0) * (-(x - y) * (x - y) / s).exp()
                        / (PI * s).sqrt()
                };
                let r = kernel::quadrature_1d(
                    f,
                    kernel::Domain1D::RealLine {
                        center: x,
                        scale: (1.0 + s).sqrt(),
                    },
                    1e-9,
                )?;
                Ok(r.value)
            }
        }
        (PovmModel::Ephd { .. }, Outcome::Amplitude(a0), Setting::None) => {
            Ok(state.quasiprob(*a0, -1.0)?)
        }
        _ => Err(PovmError::DomainMismatch(format!(
            "{:?} / {:?} under {}",
            outcome,
            setting,
            model.scheme_name()
        ))),
    }
}

/// Direct phase-space Born route ∫ d²α Π(A|a; α; −s) P(α; s): the
/// representation-independence check. Requires −s and s to both be regular.
pub fn born_probability_quadrature(
    state: &QuantumState,
    model: &PovmModel,
    outcome: &Outcome,
    setting: &Setting,
    s: f64,
    radius: f64,
    tol: f64,
) -> Result<f64, PovmError> {
    model.validate()?;
    if !(s < state.max_regular_s()) {
        return Err(PovmError::State(StateError::SingularRepresentation {
            requested: s,
            max_regular_s: state.max_regular_s(),
            state: state.kind_name().into(),
        }));
    }
    let sigma = -s;
    let symbol: Box<dyn Fn(Complex) -> Result<f64, PovmError>> = match (model, outcome, setting) {
        (PovmModel::Pnr, Outcome::Count(n), Setting::None) => {
            let n = *n;
            Box::new(move |a| pnr_symbol_at(n, a, sigma))
        }
        (PovmModel::Click { detectors }, Outcome::Count(n), Setting::None) => {
            let (n, d) = (*n, *detectors);
            Box::new(move |a| click_symbol_at(n, d, a, sigma))
        }
        (PovmModel::OnOff, Outcome::Count(n), Setting::None) => {
            let n = *n;
            Box::new(move |a| click_symbol_at(n, 1, a, sigma))
        }
        (PovmModel::Uhd { .. }, Outcome::Count(n), Setting::Displacement(g)) => {
            let (n, g) = (*n, *g);
            Box::new(move |a| uhd_symbol_at(n, g, a, sigma))
        }
        (PovmModel::Bhd { .. }, Outcome::Quadrature(x), Setting::Phase(phi)) => {
            let (x, phi) = (*x, *phi);
            Box::new(move |a| bhd_symbol(x, phi, a, s))
        }
        (PovmModel::Ephd { .. }, Outcome::Amplitude(a0), Setting::None) => {
            let a0 = *a0;
            Box::new(move |a| ephd_symbol(a0, a, s))
        }
        _ => {
            return Err(PovmError::DomainMismatch(format!(
                "{:?} / {:?} under {}",
                outcome,
                setting,
                model.scheme_name()
            )))
        }
    };
    // probe the symbol once so unsupported orderings surface as their own error
    symbol(Complex::new(0.1, 0.1))?;
    let st = state.clone();
    let f = move |a: Complex| symbol(a).unwrap_or(0.0) * st.quasiprob(a, s).unwrap_or(0.0);
    let r = kernel::quadrature_2d(f, radius, tol)?;
    Ok(r.value)
}
