//! Phase-space classical-simulation witnesses for quantum-optical measurements.
//!
//! A quantum measurement admits a *phase-space classical simulation* when its
//! outcome statistics can be written as an average of non-negative POVM
//! symbols over a non-negative quasiprobability density. The dual form of that
//! feasibility problem is a family of Bell-like inequalities: find a test
//! function `λ(A, a)` whose measured expectation exceeds the supremum of its
//! phase-space expectation and you have certified that no such simulation —
//! and hence no non-negative density at that ordering — exists.
//!
//! The crate is organized along the moving parts of that argument:
//!
//! - [`kernel`] — special functions, deterministic quadrature, the Gaussian
//!   ordering convolution, and multistart supremum search over the plane.
//! - [`states`] — a closed catalog of states (vacuum, coherent, Fock,
//!   attenuated Fock, squeezed vacuum, even cat) with exact quasiprobability,
//!   characteristic-function, photocount and quadrature distributions.
//!   Detection efficiency η is attributed to states, not detectors.
//! - [`povm`] — s-parameterized POVM symbols for photon-number-resolving,
//!   click-array, on/off, unbalanced, balanced and eight-port homodyne
//!   detection, each with its threshold ordering `s_th`, plus Born-rule
//!   evaluation routes.
//! - [`witness`] — left-hand expectations, right-hand suprema, Monte Carlo
//!   estimation and the closed-form special cases for each detection scheme.
//! - [`lp`] — finite marginal problems (incidence matrices, CHSH) and
//!   discretized phase-space feasibility, with a deterministic dense simplex
//!   that produces dual certificates, i.e. optimal test functions.

pub mod kernel;
pub mod lp;
pub mod povm;
pub mod states;
pub mod witness;

pub use kernel::{Complex, GridSpec, OrderingParam, Supremum};
pub use povm::{Outcome, PovmModel, Setting};
pub use states::QuantumState;
pub use witness::{TestFunction, WitnessReport};
