//! Dual-form witness evaluation: left-hand expectations against measured
//! statistics, right-hand suprema over the phase-space response, and the
//! verdict
//!
//!   Σ_a E(λ|a)  ≤  sup_α Σ_a E(λ|a; α; s).
//!
//! A violation (lhs exceeding rhs beyond [`VIOLATION_TOL`]) certifies that no
//! non-negative phase-space density at ordering s reproduces the statistics,
//! i.e. the state is nonclassical. Settings enter the sums with equal weight.

pub mod bhd;
pub mod ephd;
pub mod mc;
pub mod onoff;

pub use mc::{mc_lhs, sample_photocounts, sample_uhd, McEstimate};
pub use onoff::{onoff_no_violation_check, NoGoRecord};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kernel::{self, Complex, GridSpec, KernelError};
use crate::povm::{self, Outcome, PovmError, PovmModel, Setting};
use crate::states::{complex_vec_serde, QuantumState, StateError};

/// Numeric slack between lhs and rhs before a violation is declared.
pub const VIOLATION_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum WitnessError {
    #[error("test function does not match the scheme's outcome/setting domain: {0}")]
    DomainMismatch(String),
    #[error("left-hand side diverges for t = {t}: squeezed-vacuum series requires t < {t_critical}")]
    Divergent { t: f64, t_critical: f64 },
    #[error("{scheme} has threshold ordering s_th = {s_th}; no non-negative symbol representation at s = {s}")]
    OrderingBelowThreshold {
        scheme: &'static str,
        s: f64,
        s_th: f64,
    },
    #[error("closed-form integrity failure: {0}")]
    FormulaIntegrity(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("tabulated test function has no entry for {0}")]
    MissingEntry(String),
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Povm(#[from] PovmError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// Entry of a tabulated test function; matched exactly against the evaluated
/// outcome/setting pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabEntry {
    pub outcome: Outcome,
    pub setting: Setting,
    pub value: f64,
}

/// Test function λ(A, a) defining a witness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", content = "params", rename_all = "kebab-case")]
pub enum TestFunction {
    /// λ(n) = (−t)^n e^{−g n²}, t ≥ −1, g ≥ 0 (photocounting schemes).
    PhotocountExp { t: f64, g: f64 },
    /// λ(x, φ) = quadrature distribution of a reference state (BHD).
    QuadratureDensity { reference: QuantumState },
    /// λ(α₀) = P(α₀; s') of a reference state (EPHD).
    PhaseSpaceDensity { s_prime: f64, reference: QuantumState },
    /// Explicit table over (outcome, setting) pairs.
    Tabulated { entries: Vec<TabEntry> },
}

impl TestFunction {
    pub fn validate(&self) -> Result<(), WitnessError> {
        match self {
            TestFunction::PhotocountExp { t, g } => {
                if *t < -1.0 {
                    return Err(WitnessError::Precondition(format!(
                        "photocount-exp needs t >= -1, got {t}"
                    )));
                }
                if *g < 0.0 {
                    return Err(WitnessError::Precondition(format!(
                        "photocount-exp needs g >= 0, got {g}"
                    )));
                }
                Ok(())
            }
            TestFunction::Tabulated { entries } => {
                if entries.iter().any(|e| !e.value.is_finite()) {
                    return Err(WitnessError::Precondition(
                        "tabulated values must be finite".into(),
                    ));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// λ(A, a).
    pub fn eval(&self, outcome: &Outcome, setting: &Setting) -> Result<f64, WitnessError> {
        match self {
            TestFunction::PhotocountExp { t, g } => match outcome {
                Outcome::Count(n) => Ok(photocount_lambda(*t, *g, *n)),
                other => Err(WitnessError::DomainMismatch(format!(
                    "photocount-exp expects counts, got {other:?}"
                ))),
            },
            TestFunction::QuadratureDensity { reference } => match (outcome, setting) {
                (Outcome::Quadrature(x), Setting::Phase(phi)) => {
                    Ok(reference.quadrature_dist(*x, *phi)?)
                }
                (Outcome::Quadrature(x), Setting::None) => Ok(reference.quadrature_dist(*x, 0.0)?),
                other => Err(WitnessError::DomainMismatch(format!(
                    "quadrature-density expects (x, phase), got {other:?}"
                ))),
            },
            TestFunction::PhaseSpaceDensity { s_prime, reference } => match outcome {
                Outcome::Amplitude(a0) => Ok(reference.quasiprob(*a0, *s_prime)?),
                other => Err(WitnessError::DomainMismatch(format!(
                    "phase-space-density expects amplitudes, got {other:?}"
                ))),
            },
            TestFunction::Tabulated { entries } => entries
                .iter()
                .find(|e| e.outcome == *outcome && e.setting == *setting)
                .map(|e| e.value)
                .ok_or_else(|| WitnessError::MissingEntry(format!("{outcome:?} / {setting:?}"))),
        }
    }
}

/// Stable (−t)^n e^{−g n²}.
pub(crate) fn photocount_lambda(t: f64, g: f64, n: u32) -> f64 {
    if n == 0 {
        return 1.0;
    }
    if t == 0.0 {
        return 0.0;
    }
    let base = -t;
    let sign = if base < 0.0 && n % 2 == 1 { -1.0 } else { 1.0 };
    let nf = n as f64;
    sign * (nf * base.abs().ln() - g * nf * nf).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvalMethod {
    ClosedForm,
    Quadrature,
    MonteCarlo,
}

/// Result of a witness evaluation. `violated` is `lhs > rhs + tolerance`;
/// `relative_violation` is the sign-carrying normalized gap (lhs − rhs)/|rhs|
/// (only its sign and zero crossings are specification-grade).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessReport {
    pub lhs: f64,
    pub rhs: f64,
    pub violated: bool,
    pub relative_violation: f64,
    #[serde(with = "complex_vec_serde")]
    pub argmax: Vec<Complex>,
    pub method: EvalMethod,
    pub diagnostics: Vec<String>,
}

impl WitnessReport {
    pub(crate) fn assemble(
        lhs: f64,
        rhs: f64,
        argmax: Vec<Complex>,
        method: EvalMethod,
        diagnostics: Vec<String>,
    ) -> Self {
        let violated = lhs > rhs + VIOLATION_TOL;
        let relative_violation = (lhs - rhs) / rhs.abs();
        WitnessReport {
            lhs,
            rhs,
            violated,
            relative_violation,
            argmax,
            method,
            diagnostics,
        }
    }
}

/// Right-hand bound together with where it was attained.
#[derive(Debug, Clone)]
pub struct RhsBound {
    pub value: f64,
    pub argmax: Vec<Complex>,
    pub on_boundary: bool,
    pub method: EvalMethod,
}

// ---------------------------------------------------------------------------
// Left-hand side: Σ_a Σ_A λ(A, a) P(A|a)
// ---------------------------------------------------------------------------

/// Critical t above which the squeezed-vacuum photocount-exp series diverges.
pub fn svs_divergence_threshold(r: f64, eta: f64) -> f64 {
    (1.0 + 1.0 / r.tanh() - eta) / eta
}

fn lhs_counting(
    state: &QuantumState,
    model: &PovmModel,
    lambda: &TestFunction,
) -> Result<(f64, EvalMethod), WitnessError> {
    match model {
        PovmModel::Pnr => {
            let (t, g) = match lambda {
                TestFunction::PhotocountExp { t, g } => (*t, *g),
                other => {
                    return Err(WitnessError::DomainMismatch(format!(
                        "pnr lhs expects photocount-exp, got {other:?}"
                    )))
                }
            };
            let eta = state.eta();
            if g == 0.0 {
                // generating-function closed forms; Σ (−t)^n P(n) = <:e^{-η(1+t)n̂}:>
                if let QuantumState::SqueezedVacuum { r, eta } = state {
                    let t_critical = svs_divergence_threshold(*r, *eta);
                    if t >= t_critical {
                        return Err(WitnessError::Divergent { t, t_critical });
                    }
                }
                let c = eta * (1.0 + t);
                let v = state.ordered_exp_gen(c)?;
                Ok((v, EvalMethod::ClosedForm))
            } else {
                let table = state.photon_number_dist(192)?;
                let v: f64 = table
                    .iter()
                    .enumerate()
                    .map(|(n, p)| photocount_lambda(t, g, n as u32) * p)
                    .sum();
                Ok((v, EvalMethod::ClosedForm))
            }
        }
        PovmModel::Click { .. } | PovmModel::OnOff => {
            let det = model.counting().expect("counting scheme");
            let table = state.photocount_dist(&det)?;
            let mut acc = 0.0;
            for (n, p) in table.iter().enumerate() {
                acc += lambda.eval(&Outcome::Count(n as u32), &Setting::None)? * p;
            }
            Ok((acc, EvalMethod::ClosedForm))
        }
        _ => unreachable!("lhs_counting called for non-counting scheme"),
    }
}

/// Expectation Σ_a E(λ|a) from the state's exact statistics, using closed
/// forms where the scheme provides them.
pub fn lhs_expectation(
    state: &QuantumState,
    model: &PovmModel,
    lambda: &TestFunction,
) -> Result<(f64, EvalMethod), WitnessError> {
    model.validate()?;
    lambda.validate()?;
    match model {
        PovmModel::Pnr | PovmModel::Click { .. } | PovmModel::OnOff => {
            lhs_counting(state, model, lambda)
        }
        PovmModel::Uhd { displacements } => {
            let mut acc = 0.0;
            for gamma in displacements {
                let setting = Setting::Displacement(*gamma);
                for n in 0..=1u32 {
                    let l = lambda.eval(&Outcome::Count(n), &setting)?;
                    if l != 0.0 {
                        acc += l
                            * povm::born_probability(state, model, &Outcome::Count(n), &setting)?;
                    }
                }
            }
            Ok((acc, EvalMethod::ClosedForm))
        }
        PovmModel::Bhd { phases, .. } => {
            let reference = match lambda {
                TestFunction::QuadratureDensity { reference } => reference,
                other => {
                    return Err(WitnessError::DomainMismatch(format!(
                        "bhd lhs expects quadrature-density, got {other:?}"
                    )))
                }
            };
            let k = phases.len() as u32;
            // own-density witness on a Fock-like state: exact double-sum
            let closed = match (state, reference) {
                (QuantumState::Fock { n }, QuantumState::Fock { n: m }) if n == m => {
                    Some(bhd::lhs_closed(*n, 1.0, k)?)
                }
                (
                    QuantumState::AttenuatedFock { n, eta },
                    QuantumState::AttenuatedFock { n: m, eta: eta2 },
                ) if n == m && eta == eta2 => Some(bhd::lhs_closed(*n, *eta, k)?),
                _ => None,
            };
            if let Some(v) = closed {
                return Ok((v, EvalMethod::ClosedForm));
            }
            let mut acc = 0.0;
            for phi in phases {
                let st = state.clone();
                let rf = reference.clone();
                let phi = *phi;
                let f = move |x: f64| {
                    rf.quadrature_dist(x, phi).unwrap_or(0.0)
                        * st.quadrature_dist(x, phi).unwrap_or(0.0)
                };
                // probe support errors once, then integrate
                reference.quadrature_dist(0.0, phi)?;
                state.quadrature_dist(0.0, phi)?;
                acc += kernel::quadrature_1d(
                    f,
                    kernel::Domain1D::RealLine {
                        center: 0.0,
                        scale: 1.0,
                    },
                    1e-10,
                )?
                .value;
            }
            Ok((acc, EvalMethod::Quadrature))
        }
        PovmModel::Ephd { .. } => {
            let (s_prime, reference) = match lambda {
                TestFunction::PhaseSpaceDensity { s_prime, reference } => (*s_prime, reference),
                other => {
                    return Err(WitnessError::DomainMismatch(format!(
                        "ephd lhs expects phase-space-density, got {other:?}"
                    )))
                }
            };
            if let Some(eta) = ephd::own_density_eta(state, reference) {
                return Ok((ephd::lhs_closed(eta, s_prime)?, EvalMethod::ClosedForm));
            }
            // generic route: ∫ d²α₀ Q(α₀) P_ref(α₀; s')
            reference.quasiprob(Complex::new(0.3, 0.1), s_prime)?;
            let st = state.clone();
            let rf = reference.clone();
            let f = move |a0: Complex| {
                st.quasiprob(a0, -1.0).unwrap_or(0.0) * rf.quasiprob(a0, s_prime).unwrap_or(0.0)
            };
            let v = kernel::quadrature_2d(f, 8.0, 1e-9)?;
            Ok((v.value, EvalMethod::Quadrature))
        }
    }
}

// ---------------------------------------------------------------------------
// Right-hand side: sup_α Σ_a E(λ|a; α; s)
// ---------------------------------------------------------------------------

fn poisson_log(n: u32, u: f64) -> f64 {
    if u == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let mut lnf = 0.0;
    for k in 1..=n {
        lnf += (k as f64).ln();
    }
    ((n as f64) * u.ln() - u - lnf).exp()
}

/// sup over α of the response expectation, with closed-form shortcuts where
/// the scheme admits them. Requires s ≥ s_th so the symbols are non-negative
/// and the bound is sound.
pub fn rhs_bound(
    model: &PovmModel,
    lambda: &TestFunction,
    s: f64,
    grid: &GridSpec,
) -> Result<RhsBound, WitnessError> {
    model.validate()?;
    lambda.validate()?;
    grid.validate()?;
    let s_th = model.s_th();
    if s < s_th - 1e-12 {
        return Err(WitnessError::OrderingBelowThreshold {
            scheme: model.scheme_name(),
            s,
            s_th,
        });
    }
    match model {
        PovmModel::Pnr => {
            let (t, g) = match lambda {
                TestFunction::PhotocountExp { t, g } => (*t, *g),
                other => {
                    return Err(WitnessError::DomainMismatch(format!(
                        "pnr rhs expects photocount-exp, got {other:?}"
                    )))
                }
            };
            if g == 0.0 {
                // Σ λ(n) Π_Q(n|α) = e^{-|α|²(1+t)}, supremum 1 at the origin
                return Ok(RhsBound {
                    value: 1.0,
                    argmax: vec![Complex::new(0.0, 0.0)],
                    on_boundary: false,
                    method: EvalMethod::ClosedForm,
                });
            }
            // phase-invariant numeric supremum over u = |α|²
            let n_cut = 256u32;
            let e = move |u: f64| -> f64 {
                (0..=n_cut)
                    .map(|n| photocount_lambda(t, g, n) * poisson_log(n, u))
                    .sum()
            };
            let sup = kernel::supremum_radial(|r| e(r * r), grid)?;
            Ok(RhsBound {
                value: sup.value,
                argmax: sup.argmax,
                on_boundary: sup.on_boundary,
                method: EvalMethod::Quadrature,
            })
        }
        PovmModel::Click { detectors } => {
            let d = *detectors;
            let lambdas: Vec<f64> = (0..=d)
                .map(|n| lambda.eval(&Outcome::Count(n), &Setting::None))
                .collect::<Result<_, _>>()?;
            let e = move |r: f64| -> f64 {
                let a = Complex::new(r, 0.0);
                lambdas
                    .iter()
                    .enumerate()
                    .map(|(n, l)| l * povm::click_symbol(n as u32, d, a).unwrap())
                    .sum()
            };
            let sup = kernel::supremum_radial(e, grid)?;
            Ok(RhsBound {
                value: sup.value,
                argmax: sup.argmax,
                on_boundary: sup.on_boundary,
                method: EvalMethod::Quadrature,
            })
        }
        PovmModel::OnOff => {
            let l0 = lambda.eval(&Outcome::Count(0), &Setting::None)?;
            let l1 = lambda.eval(&Outcome::Count(1), &Setting::None)?;
            // λ(0) e^{-u} + λ(1)(1 - e^{-u}) is monotone in u
            let (value, argmax, on_boundary) = if l0 >= l1 {
                (l0, vec![Complex::new(0.0, 0.0)], false)
            } else {
                (l1, vec![], true)
            };
            Ok(RhsBound {
                value,
                argmax,
                on_boundary,
                method: EvalMethod::ClosedForm,
            })
        }
        PovmModel::Uhd { displacements } => {
            let mut terms = Vec::new();
            for gamma in displacements {
                let setting = Setting::Displacement(*gamma);
                let l0 = lambda.eval(&Outcome::Count(0), &setting)?;
                let l1 = lambda.eval(&Outcome::Count(1), &setting)?;
                terms.push((*gamma, l0, l1));
            }
            let sigma = -s;
            let e = move |a: Complex| -> f64 {
                terms
                    .iter()
                    .map(|(g, l0, l1)| {
                        let p0 = povm::uhd_symbol_at(0, *g, a, sigma).unwrap();
                        l0 * p0 + l1 * (1.0 - p0)
                    })
                    .sum()
            };
            let sup = kernel::supremum_over_plane(e, grid)?;
            Ok(RhsBound {
                value: sup.value,
                argmax: sup.argmax,
                on_boundary: sup.on_boundary,
                method: EvalMethod::Quadrature,
            })
        }
        PovmModel::Bhd { phases, .. } => {
            let reference = match lambda {
                TestFunction::QuadratureDensity { reference } => reference,
                other => {
                    return Err(WitnessError::DomainMismatch(format!(
                        "bhd rhs expects quadrature-density, got {other:?}"
                    )))
                }
            };
            let (n, eta) = match reference {
                QuantumState::Fock { n } => (*n, 1.0),
                QuantumState::AttenuatedFock { n, eta } => (*n, *eta),
                QuantumState::Vacuum => (0, 1.0),
                other => {
                    return Err(WitnessError::DomainMismatch(format!(
                        "bhd rhs supports Fock-family quadrature densities, got {}",
                        other.kind_name()
                    )))
                }
            };
            bhd::validate_kernel()?;
            let phases = phases.clone();
            let weights: Vec<f64> = (0..=n)
                .map(|m| bhd::binom(n, m) * eta.powi(m as i32) * (1.0 - eta).powi((n - m) as i32))
                .collect();
            let e = move |a: Complex| -> f64 {
                phases
                    .iter()
                    .map(|phi| {
                        weights
                            .iter()
                            .enumerate()
                            .map(|(m, w)| w * bhd::kernel_raw(m as u32, bhd::x0(a, *phi), s))
                            .sum::<f64>()
                    })
                    .sum()
            };
            let sup = kernel::supremum_over_plane(e, grid)?;
            Ok(RhsBound {
                value: sup.value,
                argmax: sup.argmax,
                on_boundary: sup.on_boundary,
                method: EvalMethod::Quadrature,
            })
        }
        PovmModel::Ephd { .. } => {
            let (s_prime, reference) = match lambda {
                TestFunction::PhaseSpaceDensity { s_prime, reference } => (*s_prime, reference),
                other => {
                    return Err(WitnessError::DomainMismatch(format!(
                        "ephd rhs expects phase-space-density, got {other:?}"
                    )))
                }
            };
            // E(λ|α; s) = P_ref(α; s' − s − 1)
            if let Some(eta) = ephd::own_density_kind(reference) {
                let (value, argmax) = ephd::rhs_closed(eta, s, s_prime)?;
                return Ok(RhsBound {
                    value,
                    argmax,
                    on_boundary: false,
                    method: EvalMethod::ClosedForm,
                });
            }
            let sigma = s_prime - s - 1.0;
            reference.quasiprob(Complex::new(0.2, 0.1), sigma)?;
            let rf = reference.clone();
            let sup = kernel::supremum_over_plane(
                move |a: Complex| rf.quasiprob(a, sigma).unwrap_or(f64::NEG_INFINITY),
                grid,
            )?;
            Ok(RhsBound {
                value: sup.value,
                argmax: sup.argmax,
                on_boundary: sup.on_boundary,
                method: EvalMethod::Quadrature,
            })
        }
    }
}

/// Full witness evaluation at ordering s.
pub fn evaluate_witness(
    state: &QuantumState,
    model: &PovmModel,
    lambda: &TestFunction,
    s: f64,
    grid: &GridSpec,
) -> Result<WitnessReport, WitnessError> {
    let (lhs, lhs_method) = lhs_expectation(state, model, lambda)?;
    let rhs = rhs_bound(model, lambda, s, grid)?;
    let mut diagnostics = vec![
        format!("lhs method: {:?}", lhs_method),
        format!("rhs method: {:?}", rhs.method),
        format!("ordering s = {s}, threshold s_th = {}", model.s_th()),
    ];
    if rhs.on_boundary {
        diagnostics.push("warning: rhs supremum on the grid boundary; increase radius".into());
    }
    let method = if lhs_method == EvalMethod::ClosedForm && rhs.method == EvalMethod::ClosedForm {
        EvalMethod::ClosedForm
    } else {
        EvalMethod::Quadrature
    };
    Ok(WitnessReport::assemble(
        lhs,
        rhs.value,
        rhs.argmax,
        method,
        diagnostics,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn uhd_paper_lambda(gammas: &[Complex]) -> TestFunction {
        let mut entries = Vec::new();
        for (i, g) in gammas.iter().enumerate() {
            let v0 = if i == 1 { -2.0 } else { 1.0 };
            entries.push(TabEntry {
                outcome: Outcome::Count(0),
                setting: Setting::Displacement(*g),
                value: v0,
            });
            entries.push(TabEntry {
                outcome: Outcome::Count(1),
                setting: Setting::Displacement(*g),
                value: 0.0,
            });
        }
        TestFunction::Tabulated { entries }
    }

    #[test]
    fn svs_pnr_closed_form_matches_printed_expression() {
        // 1/sqrt(1 - [(1-η-tη)² - 1] sinh² r)
        let (r, eta, t) = (0.7f64, 0.6f64, 2.0f64);
        let st = QuantumState::SqueezedVacuum { r, eta };
        let (lhs, m) = lhs_expectation(
            &st,
            &PovmModel::Pnr,
            &TestFunction::PhotocountExp { t, g: 0.0 },
        )
        .unwrap();
        let q = 1.0 - eta - t * eta;
        let expect = 1.0 / (1.0 - (q * q - 1.0) * r.sinh() * r.sinh()).sqrt();
        assert!((lhs - expect).abs() < 1e-14);
        assert_eq!(m, EvalMethod::ClosedForm);
    }

    #[test]
    fn cat_pnr_closed_form_matches_printed_expression() {
        let (a0, eta, t) = (1.0f64, 0.6f64, 3.0f64);
        let st = QuantumState::EvenCat {
            alpha0: c(a0, 0.0),
            eta,
        };
        let (lhs, _) = lhs_expectation(
            &st,
            &PovmModel::Pnr,
            &TestFunction::PhotocountExp { t, g: 0.0 },
        )
        .unwrap();
        let expect = ((1.0 - eta - t * eta) * a0 * a0).cosh() / (a0 * a0).cosh();
        assert!((lhs - expect).abs() < 1e-14);
    }

    #[test]
    fn svs_divergence_guard_carries_critical_t() {
        let st = QuantumState::SqueezedVacuum { r: 0.7, eta: 0.6 };
        let t_crit = svs_divergence_threshold(0.7, 0.6);
        match lhs_expectation(
            &st,
            &PovmModel::Pnr,
            &TestFunction::PhotocountExp {
                t: t_crit + 0.01,
                g: 0.0,
            },
        ) {
            Err(WitnessError::Divergent { t_critical, .. }) => {
                assert!((t_critical - t_crit).abs() < 1e-12)
            }
            other => panic!("expected divergence, got {other:?}"),
        }
        assert!(lhs_expectation(
            &st,
            &PovmModel::Pnr,
            &TestFunction::PhotocountExp {
                t: t_crit - 0.01,
                g: 0.0
            },
        )
        .is_ok());
    }

    #[test]
    fn pnr_rhs_is_one_at_origin() {
        let b = rhs_bound(
            &PovmModel::Pnr,
            &TestFunction::PhotocountExp { t: 3.0, g: 0.0 },
            1.0,
            &GridSpec::default(),
        )
        .unwrap();
        assert_eq!(b.value, 1.0);
        assert_eq!(b.argmax, vec![c(0.0, 0.0)]);
    }

    #[test]
    fn click_rhs_with_paper_lambda_is_one() {
        let b = rhs_bound(
            &PovmModel::Click { detectors: 10 },
            &TestFunction::PhotocountExp { t: 7.0, g: 0.2 },
            1.0,
            &GridSpec::default(),
        )
        .unwrap();
        assert!((b.value - 1.0).abs() < 1e-9, "rhs {}", b.value);
        assert!(b.argmax[0].norm() < 1e-4);
    }

    #[test]
    fn rhs_below_threshold_is_rejected() {
        let r = rhs_bound(
            &PovmModel::Pnr,
            &TestFunction::PhotocountExp { t: 3.0, g: 0.0 },
            0.5,
            &GridSpec::default(),
        );
        assert!(matches!(
            r,
            Err(WitnessError::OrderingBelowThreshold { s_th, .. }) if s_th == 1.0
        ));
    }

    #[test]
    fn uhd_witness_reproduces_violation() {
        let gammas = [c(-0.1, 0.0), c(0.0, 0.0), c(0.1, 0.0)];
        let st = QuantumState::AttenuatedFock { n: 1, eta: 0.75 };
        let model = PovmModel::Uhd {
            displacements: gammas.to_vec(),
        };
        let lambda = uhd_paper_lambda(&gammas);
        let grid = GridSpec {
            radius: 5.0,
            ..GridSpec::default()
        };
        let report = evaluate_witness(&st, &model, &lambda, 1.0, &grid).unwrap();
        assert!((report.lhs - 0.0099).abs() < 2e-4, "lhs {}", report.lhs);
        assert!((report.rhs - 0.0089).abs() < 2e-4, "rhs {}", report.rhs);
        assert!(report.violated);
        assert_eq!(report.argmax.len(), 2);
        assert!((report.argmax[1].re - 1.2268).abs() < 0.05);
    }

    #[test]
    fn vacuum_is_never_flagged() {
        let report = evaluate_witness(
            &QuantumState::Vacuum,
            &PovmModel::Pnr,
            &TestFunction::PhotocountExp { t: 3.0, g: 0.0 },
            1.0,
            &GridSpec::default(),
        )
        .unwrap();
        assert!(!report.violated);
        assert!((report.lhs - 1.0).abs() < 1e-12);
        assert_eq!(report.rhs, 1.0);
    }

    #[test]
    fn lambda_eval_is_stable_for_large_n() {
        // (−7)^n e^{−n²/5} must not overflow on long tails
        let v = photocount_lambda(7.0, 0.2, 200);
        assert_eq!(v, 0.0);
        let v = photocount_lambda(7.0, 0.2, 10);
        let expect = 7.0f64.powi(10) * (-20.0f64).exp();
        assert!((v - expect).abs() < 1e-9 * expect.abs());
    }

    #[test]
    fn report_round_trips_through_json() {
        let report = WitnessReport::assemble(
            1.2,
            1.0,
            vec![c(0.5, -0.25)],
            EvalMethod::ClosedForm,
            vec!["note".into()],
        );
        let js = serde_json::to_string(&report).unwrap();
        let back: WitnessReport = serde_json::from_str(&js).unwrap();
        assert_eq!(back.lhs, report.lhs);
        assert!(back.violated);
        assert_eq!(back.argmax[0], c(0.5, -0.25));
        assert!((back.relative_violation - 0.2).abs() < 1e-12);
    }
}
