//! Relative-purity fidelity between Gaussian states and the associated
//! angle.
//!
//! For states `(Sigma_1, u_1)` and `(Sigma_2, u_2)` at equal `hbar`,
//!
//! ```text
//! F = (det Sigma_1 det Sigma_2)^{1/4} / det((Sigma_1 + Sigma_2)/2)^{1/2}
//!     * exp(-du^T (Sigma_1 + Sigma_2)^{-1} du)
//! ```
//!
//! which equals `tr(rho_1 rho_2) / sqrt(tr rho_1^2 tr rho_2^2)`. It is 1
//! exactly on identical states and coincides with Uhlmann fidelity when at
//! least one state is pure. The angle `Theta = 2 arccos sqrt(F)` is the
//! distance whose instantaneous speed the [`crate::speed`] module computes.

use nalgebra::{DMatrix, DVector};

use crate::states::GaussianState;
use crate::{linalg, Error, Result};

/// A fidelity together with its angle `Theta = 2 arccos sqrt(F)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityValue {
    f: f64,
    theta: f64,
}

impl FidelityValue {
    /// The fidelity, clamped into `[0, 1]`.
    pub fn fidelity(&self) -> f64 {
        self.f
    }

    /// `Theta = 2 arccos sqrt(F)`, in `[0, pi]`.
    pub fn angle(&self) -> f64 {
        self.theta
    }
}

/// `2 arccos sqrt(f)` with the argument clamped into `[0, 1]`, so roundoff
/// just above 1 or below 0 cannot produce NaN.
pub fn bures_angle(f: f64) -> f64 {
    2.0 * f.clamp(0.0, 1.0).sqrt().acos()
}

/// Fidelity and angle between two states of equal mode count and `hbar`.
pub fn fidelity(a: &GaussianState, b: &GaussianState) -> Result<FidelityValue> {
    if a.modes() != b.modes() {
        return Err(Error::InvalidArgument(format!(
            "mode counts differ: {} vs {}",
            a.modes(),
            b.modes()
        )));
    }
    if a.hbar() != b.hbar() {
        return Err(Error::InvalidArgument(format!(
            "hbar differs: {} vs {}; rescale one state first",
            a.hbar(),
            b.hbar()
        )));
    }
    let chol_a = linalg::spd_cholesky(a.covariance(), "first covariance")?;
    let chol_b = linalg::spd_cholesky(b.covariance(), "second covariance")?;
    let mid = (a.covariance() + b.covariance()) * 0.5;
    let chol_mid = linalg::spd_cholesky(&mid, "covariance midpoint")?;

    let du = b.mean() - a.mean();
    // du^T (Sigma_1 + Sigma_2)^{-1} du = du^T mid^{-1} du / 2.
    let quad = 0.5 * linalg::inv_quadratic_form(&chol_mid, &du);
    let ln_f = 0.25 * (linalg::ln_det(&chol_a) + linalg::ln_det(&chol_b))
        - 0.5 * linalg::ln_det(&chol_mid)
        - quad;
    let f = ln_f.exp().clamp(0.0, 1.0);
    Ok(FidelityValue { f, theta: bures_angle(f) })
}

/// The angle `Theta = 2 arccos sqrt(F)` between two states.
pub fn distance_theta(a: &GaussianState, b: &GaussianState) -> Result<f64> {
    Ok(fidelity(a, b)?.angle())
}

/// Second-order fidelity between `(Sigma, u)` and
/// `(Sigma + dSigma, u + du)`:
///
/// ```text
/// F = 1 - tr((Sigma^{-1} dSigma)^2) / 16 - du^T Sigma^{-1} du / 2
/// ```
///
/// accurate to third order in the perturbation.
pub fn differential_fidelity(
    sigma: &DMatrix<f64>,
    d_sigma: &DMatrix<f64>,
    du: &DVector<f64>,
) -> Result<f64> {
    if sigma.nrows() != sigma.ncols()
        || d_sigma.shape() != sigma.shape()
        || du.len() != sigma.nrows()
    {
        return Err(Error::InvalidArgument(
            "perturbation shapes must match the covariance matrix".into(),
        ));
    }
    let chol = linalg::spd_cholesky(sigma, "covariance matrix")?;
    let ratio = chol.solve(d_sigma);
    let tr2 = (&ratio * &ratio).trace();
    Ok(1.0 - tr2 / 16.0 - 0.5 * linalg::inv_quadratic_form(&chol, du))
}
