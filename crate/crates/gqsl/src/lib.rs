//! Quantum speeds and quantum-speed-limit times for Gaussian states.
//!
//! The crate works with continuous-variable Gaussian states described by a
//! mean vector `u` and a second-moment matrix `Sigma = tr(rho {dz, dz^T})`,
//! ordered as `z = (q_1, p_1, ..., q_n, p_n)`. On top of that representation
//! it provides:
//!
//! * [`symplectic`]: the symplectic form, quadratic generators, and exact
//!   propagators `S = exp(Omega G t)`.
//! * [`states`]: constructors and validity checks for vacuum, squeezed,
//!   thermal, and displaced states.
//! * [`metric`]: relative-purity fidelity, the associated angle, and its
//!   second-order expansion.
//! * [`speed`]: instantaneous speeds for unitary and open Gaussian dynamics,
//!   including the closed forms for single-mode generators and the
//!   unitary/nonunitary split of the covariance term.
//! * [`dynamics`]: exact unitary evolution, fixed-step integration of open
//!   dynamics, quantum-Brownian-motion parameter maps, speed-limit times,
//!   and the geodesic bound check.
//! * [`oracle`]: independent verification routes (phase-space quadrature,
//!   finite differences) used by the self-test suites.

// Guards shaped like `!(x > 0.0)` are used throughout instead of `x <= 0.0`:
// the negated form also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
mod error;
pub(crate) mod linalg;
pub mod metric;
pub mod oracle;
pub mod speed;
pub mod states;
pub mod symplectic;

pub use error::{Error, Result};
