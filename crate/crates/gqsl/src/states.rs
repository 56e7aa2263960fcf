//! Gaussian state representation and constructors.
//!
//! A state is `(Sigma, u, hbar)` with second moments
//! `Sigma = tr(rho {dz, dz^T})` and means `u = tr(rho z)`, `dz = z - u`.
//! Under this convention the vacuum has `Sigma = hbar I`, physical states
//! satisfy `Sigma + i hbar Omega >= 0`, and purity is
//! `1 / sqrt(det(Sigma / hbar))`. Planck's constant is carried per state so
//! classical limits can be taken by scaling it.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::linalg;
use crate::symplectic::{omega, symplectic_eigenvalues};
use crate::{Error, Result};

/// Relative Frobenius tolerance on `||Sigma - Sigma^T||`.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Least admissible eigenvalue of `Sigma + i hbar Omega`.
pub const PHYSICALITY_TOL: f64 = -1e-10;

/// Largest admissible purity.
pub const PURITY_TOL: f64 = 1e-10;

/// When `coth(beta omega / 2)` is within `1e-15` of 1 it is clamped to 1,
/// making large-`beta` thermal states exactly pure.
const THERMAL_CLAMP: f64 = 1e-15;

/// Per-mode squeezing magnitudes and angles.
#[derive(Debug, Clone, PartialEq)]
pub struct SqueezeSpec {
    r: Vec<f64>,
    theta: Vec<f64>,
}

impl SqueezeSpec {
    /// Requires equal lengths, at least one mode, and `r_k >= 0`.
    pub fn new(r: Vec<f64>, theta: Vec<f64>) -> Result<Self> {
        if r.is_empty() || r.len() != theta.len() {
            return Err(Error::InvalidArgument(format!(
                "squeezing spec needs matching nonempty r/theta lists, got {} and {}",
                r.len(),
                theta.len()
            )));
        }
        if let Some(bad) = r.iter().find(|&&rk| !(rk >= 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "squeezing magnitudes must be nonnegative, got {bad}"
            )));
        }
        Ok(Self { r, theta })
    }

    /// One mode, magnitude `r` at angle `theta`.
    pub fn single(r: f64, theta: f64) -> Result<Self> {
        Self::new(vec![r], vec![theta])
    }

    pub fn modes(&self) -> usize {
        self.r.len()
    }

    pub fn r(&self) -> &[f64] {
        &self.r
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    /// The block-diagonal rotation `O = diag(R(theta_1), ..., R(theta_n))`.
    pub fn rotation(&self) -> DMatrix<f64> {
        let n = self.modes();
        let mut o = DMatrix::zeros(2 * n, 2 * n);
        for (k, th) in self.theta.iter().enumerate() {
            let (s, c) = th.sin_cos();
            o[(2 * k, 2 * k)] = c;
            o[(2 * k, 2 * k + 1)] = s;
            o[(2 * k + 1, 2 * k)] = -s;
            o[(2 * k + 1, 2 * k + 1)] = c;
        }
        o
    }

    /// The diagonal `D = diag(e^{r_1}, e^{-r_1}, ..., e^{r_n}, e^{-r_n})`.
    pub fn stretch(&self) -> DVector<f64> {
        let n = self.modes();
        let mut d = DVector::zeros(2 * n);
        for (k, rk) in self.r.iter().enumerate() {
            d[2 * k] = rk.exp();
            d[2 * k + 1] = (-rk).exp();
        }
        d
    }
}

/// Outcome of the state validity checks, reporting the first violated
/// invariant.
#[derive(Debug, Clone, PartialEq)]
pub enum ValidationReport {
    Ok,
    /// `||Sigma - Sigma^T||_F` relative to `1 + ||Sigma||_F`.
    NotSymmetric {
        defect: f64,
    },
    /// Smallest eigenvalue of `Sigma + i hbar Omega`.
    Unphysical {
        min_eigenvalue: f64,
    },
    /// Purity above 1 beyond tolerance.
    PurityExceeded {
        purity: f64,
    },
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        matches!(self, ValidationReport::Ok)
    }
}

/// Checks a candidate covariance matrix: symmetry, then physicality
/// `Sigma + i hbar Omega >= -1e-10`, then purity `<= 1 + 1e-10`.
///
/// The physicality tolerance is absolute so that pure states, which sit on
/// the boundary, are not rejected for roundoff.
pub fn check_covariance(sigma: &DMatrix<f64>, hbar: f64) -> ValidationReport {
    let defect = linalg::asymmetry(sigma) / (1.0 + sigma.norm());
    if defect > SYMMETRY_TOL {
        return ValidationReport::NotSymmetric { defect };
    }
    let n = sigma.nrows() / 2;
    let min_eig = linalg::min_physicality_eigenvalue(sigma, &omega(n), hbar);
    if min_eig < PHYSICALITY_TOL {
        return ValidationReport::Unphysical { min_eigenvalue: min_eig };
    }
    match purity_of(sigma, hbar) {
        Ok(p) if p <= 1.0 + PURITY_TOL => ValidationReport::Ok,
        Ok(p) => ValidationReport::PurityExceeded { purity: p },
        // Physicality passed but the determinant is numerically zero or
        // negative: surface it as an unphysical matrix.
        Err(_) => ValidationReport::Unphysical { min_eigenvalue: min_eig },
    }
}

fn purity_of(sigma: &DMatrix<f64>, hbar: f64) -> Result<f64> {
    let n = sigma.nrows() / 2;
    let chol = linalg::spd_cholesky(&linalg::symmetrize(sigma), "covariance matrix")?;
    let ln_purity = n as f64 * hbar.ln() - 0.5 * linalg::ln_det(&chol);
    Ok(ln_purity.exp())
}

/// A Gaussian state `(Sigma, u, hbar)`. Instances are valid by
/// construction; [`GaussianState::validate`] re-checks the invariants.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    hbar: f64,
    sigma: DMatrix<f64>,
    u: DVector<f64>,
}

impl GaussianState {
    /// The n-mode vacuum: `Sigma = hbar I`, `u = 0`.
    pub fn vacuum(n: usize, hbar: f64) -> Result<Self> {
        check_scales(n, hbar)?;
        Ok(Self {
            hbar,
            sigma: DMatrix::from_diagonal_element(2 * n, 2 * n, hbar),
            u: DVector::zeros(2 * n),
        })
    }

    /// Pure squeezed state `Sigma = hbar O D O^T` with `O` the block
    /// rotation and `D` the per-mode stretch of `spec`; `u = 0`.
    pub fn pure_squeezed(spec: &SqueezeSpec, hbar: f64) -> Result<Self> {
        check_scales(spec.modes(), hbar)?;
        let o = spec.rotation();
        let sigma = &o * DMatrix::from_diagonal(&(spec.stretch() * hbar)) * o.transpose();
        Ok(Self { hbar, sigma: linalg::symmetrize(&sigma), u: DVector::zeros(2 * spec.modes()) })
    }

    /// Squeezed thermal single-mode state
    /// `Sigma = hbar coth(beta_s omega / 2) O D O^T`, `u = 0`.
    ///
    /// `beta_s = inf` is allowed; occupations with
    /// `coth - 1 <= 1e-15` are clamped to 1, so cold states are exactly
    /// pure.
    pub fn thermal_squeezed(
        beta_s: f64,
        omega: f64,
        spec: &SqueezeSpec,
        hbar: f64,
    ) -> Result<Self> {
        if spec.modes() != 1 {
            return Err(Error::InvalidArgument(format!(
                "thermal construction is single-mode, got n = {}",
                spec.modes()
            )));
        }
        check_scales(1, hbar)?;
        if !(beta_s > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "inverse temperature must be positive, got {beta_s}"
            )));
        }
        if !(omega > 0.0) {
            return Err(Error::InvalidArgument(format!("frequency must be positive, got {omega}")));
        }
        let eta = thermal_occupation(beta_s, omega);
        let mut state = Self::pure_squeezed(spec, hbar)?;
        state.sigma *= eta;
        Ok(state)
    }

    /// Wraps externally supplied moments, validating them.
    pub fn from_parts(sigma: DMatrix<f64>, u: DVector<f64>, hbar: f64) -> Result<Self> {
        if sigma.nrows() != sigma.ncols() || sigma.nrows() == 0 || !sigma.nrows().is_multiple_of(2)
        {
            return Err(Error::InvalidArgument(format!(
                "covariance matrix must be square with even dimension, got {}x{}",
                sigma.nrows(),
                sigma.ncols()
            )));
        }
        if u.len() != sigma.nrows() {
            return Err(Error::InvalidArgument(format!(
                "mean vector length {} does not match covariance dimension {}",
                u.len(),
                sigma.nrows()
            )));
        }
        if !(hbar > 0.0) {
            return Err(Error::InvalidArgument(format!("hbar must be positive, got {hbar}")));
        }
        match check_covariance(&sigma, hbar) {
            ValidationReport::Ok => Ok(Self { hbar, sigma: linalg::symmetrize(&sigma), u }),
            report => Err(Error::InvalidState(format!("{report:?}"))),
        }
    }

    /// The same state with its mean shifted by `delta`; `Sigma` (and hence
    /// purity) is untouched.
    pub fn displace(&self, delta: &DVector<f64>) -> Result<Self> {
        if delta.len() != self.u.len() {
            return Err(Error::InvalidArgument(format!(
                "displacement length {} does not match state dimension {}",
                delta.len(),
                self.u.len()
            )));
        }
        Ok(Self { hbar: self.hbar, sigma: self.sigma.clone(), u: &self.u + delta })
    }

    /// `1 / sqrt(det(Sigma / hbar))`, in `(0, 1]` for physical states.
    pub fn purity(&self) -> f64 {
        purity_of(&self.sigma, self.hbar).expect("valid state has SPD covariance")
    }

    /// Re-checks symmetry, physicality, and purity.
    pub fn validate(&self) -> ValidationReport {
        check_covariance(&self.sigma, self.hbar)
    }

    /// Symplectic spectrum of the state, descending.
    pub fn symplectic_spectrum(&self) -> Result<Vec<f64>> {
        symplectic_eigenvalues(&self.sigma, self.hbar)
    }

    /// Whether every symplectic eigenvalue is within `tol` of 1.
    pub fn is_pure(&self, tol: f64) -> Result<bool> {
        Ok(self.symplectic_spectrum()?.iter().all(|nu| (nu - 1.0).abs() <= tol))
    }

    pub fn modes(&self) -> usize {
        self.sigma.nrows() / 2
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.sigma
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.u
    }
}

/// `coth(beta omega / 2)` with the near-1 clamp applied.
pub fn thermal_occupation(beta: f64, omega: f64) -> f64 {
    let eta = 1.0 / (0.5 * beta * omega).tanh();
    if eta - 1.0 <= THERMAL_CLAMP {
        1.0
    } else {
        eta
    }
}

fn check_scales(n: usize, hbar: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("state needs at least one mode".into()));
    }
    if !(hbar > 0.0) {
        return Err(Error::InvalidArgument(format!("hbar must be positive, got {hbar}")));
    }
    Ok(())
}

/// JSON description of an input state.
///
/// `r` and `theta` default to zero per mode and `u` to the origin;
/// `beta_s` (with `omega`) selects the squeezed thermal constructor, which
/// is single-mode. `hbar` defaults to 1. Unknown keys are rejected.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateDescriptor {
    pub n: usize,
    #[serde(default = "default_hbar")]
    pub hbar: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<Vec<f64>>,
}

fn default_hbar() -> f64 {
    1.0
}

impl StateDescriptor {
    /// Builds the described state.
    pub fn build(&self) -> Result<GaussianState> {
        let n = self.n;
        let r = self.r.clone().unwrap_or_else(|| vec![0.0; n]);
        let theta = self.theta.clone().unwrap_or_else(|| vec![0.0; n]);
        if r.len() != n || theta.len() != n {
            return Err(Error::InvalidArgument(format!(
                "r/theta lists must have one entry per mode (n = {n})"
            )));
        }
        let spec = SqueezeSpec::new(r, theta)?;
        let state = match (self.beta_s, self.omega) {
            (Some(beta_s), Some(omega)) => {
                GaussianState::thermal_squeezed(beta_s, omega, &spec, self.hbar)?
            }
            (Some(_), None) => return Err(Error::InvalidArgument("beta_s requires omega".into())),
            (None, Some(_)) => {
                return Err(Error::InvalidArgument("omega is only meaningful with beta_s".into()))
            }
            (None, None) => GaussianState::pure_squeezed(&spec, self.hbar)?,
        };
        match &self.u {
            None => Ok(state),
            Some(u) => {
                if u.len() != 2 * n {
                    return Err(Error::InvalidArgument(format!(
                        "mean vector must have length 2n = {}, got {}",
                        2 * n,
                        u.len()
                    )));
                }
                state.displace(&DVector::from_vec(u.clone()))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn vacuum_is_hbar_identity_with_zero_mean() {
        for hbar in [1.0, 0.5] {
            let v = GaussianState::vacuum(1, hbar).unwrap();
            assert_relative_eq!(
                (v.covariance() - DMatrix::from_diagonal_element(2, 2, hbar)).norm(),
                0.0,
                epsilon = 1e-15
            );
            assert_eq!(v.mean(), &DVector::zeros(2));
            assert_relative_eq!(v.purity(), 1.0, epsilon = 1e-12);
        }
        let v3 = GaussianState::vacuum(3, 2.0).unwrap();
        assert_relative_eq!(v3.purity(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn bad_scales_are_rejected() {
        assert!(GaussianState::vacuum(0, 1.0).is_err());
        assert!(GaussianState::vacuum(1, 0.0).is_err());
        assert!(GaussianState::vacuum(1, -1.0).is_err());
    }

    #[test]
    fn unsqueezed_state_is_the_vacuum() {
        let spec = SqueezeSpec::single(0.0, 0.3).unwrap();
        let s = GaussianState::pure_squeezed(&spec, 1.0).unwrap();
        assert_relative_eq!(
            (s.covariance() - DMatrix::identity(2, 2)).norm(),
            0.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn squeezed_variances_are_exponential_in_r() {
        let spec = SqueezeSpec::single(1.0, 0.0).unwrap();
        let s = GaussianState::pure_squeezed(&spec, 1.0).unwrap();
        assert_relative_eq!(s.covariance()[(0, 0)], 1.0f64.exp(), epsilon = 1e-12);
        assert_relative_eq!(s.covariance()[(1, 1)], (-1.0f64).exp(), epsilon = 1e-12);
        assert_relative_eq!(s.covariance()[(0, 1)], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn squeezed_states_are_pure() {
        let spec = SqueezeSpec::new(vec![0.5, 2.0], vec![0.2, -1.0]).unwrap();
        let s = GaussianState::pure_squeezed(&spec, 0.7).unwrap();
        for nu in s.symplectic_spectrum().unwrap() {
            assert_relative_eq!(nu, 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn negative_squeezing_magnitude_is_rejected() {
        assert!(SqueezeSpec::single(-0.1, 0.0).is_err());
    }

    #[test]
    fn thermal_occupation_at_unit_scales() {
        // coth(1/2), frozen from an independent evaluation.
        let spec = SqueezeSpec::single(0.0, 0.0).unwrap();
        let s = GaussianState::thermal_squeezed(1.0, 1.0, &spec, 1.0).unwrap();
        assert_relative_eq!(s.covariance()[(0, 0)], 2.163953413738653, epsilon = 1e-12);
        assert_relative_eq!(s.purity(), 0.462117157260010, epsilon = 1e-12);
    }

    #[test]
    fn cold_thermal_state_is_clamped_to_pure() {
        let spec = SqueezeSpec::single(0.4, 0.1).unwrap();
        let cold = GaussianState::thermal_squeezed(100.0, 1.0, &spec, 1.0).unwrap();
        let pure = GaussianState::pure_squeezed(&spec, 1.0).unwrap();
        assert_eq!(cold.covariance(), pure.covariance());
        assert!(GaussianState::thermal_squeezed(f64::INFINITY, 1.0, &spec, 1.0).is_ok());
    }

    #[test]
    fn thermal_rejects_bad_parameters() {
        let spec = SqueezeSpec::single(0.0, 0.0).unwrap();
        assert!(GaussianState::thermal_squeezed(0.0, 1.0, &spec, 1.0).is_err());
        assert!(GaussianState::thermal_squeezed(1.0, -1.0, &spec, 1.0).is_err());
        let two = SqueezeSpec::new(vec![0.0, 0.0], vec![0.0, 0.0]).unwrap();
        assert!(GaussianState::thermal_squeezed(1.0, 1.0, &two, 1.0).is_err());
    }

    #[test]
    fn displacement_shifts_means_only() {
        let v = GaussianState::vacuum(1, 1.0).unwrap();
        let d = DVector::from_vec(vec![1.0, -2.0]);
        let moved = v.displace(&d).unwrap();
        assert_eq!(moved.mean(), &d);
        assert_eq!(moved.covariance(), v.covariance());
        assert_relative_eq!(moved.purity(), 1.0, epsilon = 1e-12);
        let twice = moved.displace(&d).unwrap();
        assert_eq!(twice.mean(), &(2.0 * &d));
        assert!(v.displace(&DVector::zeros(4)).is_err());
    }

    #[test]
    fn purity_of_two_mode_thermal_product() {
        let sigma = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 2.0, 3.0, 3.0]));
        let s = GaussianState::from_parts(sigma, DVector::zeros(4), 1.0).unwrap();
        assert_relative_eq!(s.purity(), 1.0 / 6.0, epsilon = 1e-12);
    }

    #[test]
    fn purity_is_invariant_under_hbar_rescaling() {
        let spec = SqueezeSpec::single(0.8, 0.5).unwrap();
        let a = GaussianState::thermal_squeezed(2.0, 1.0, &spec, 1.0).unwrap();
        let b = GaussianState::thermal_squeezed(2.0, 1.0, &spec, 0.25).unwrap();
        assert_relative_eq!(a.purity(), b.purity(), epsilon = 1e-12);
    }

    #[test]
    fn validation_reports_first_violation() {
        let v = GaussianState::vacuum(1, 1.0).unwrap();
        assert!(v.validate().is_ok());

        // Half-vacuum variances: min eigenvalue of Sigma + i Omega is -1/2.
        let tight = DMatrix::from_diagonal_element(2, 2, 0.5);
        match check_covariance(&tight, 1.0) {
            ValidationReport::Unphysical { min_eigenvalue } => {
                assert_relative_eq!(min_eigenvalue, -0.5, epsilon = 1e-12)
            }
            other => panic!("expected physicality violation, got {other:?}"),
        }

        let lopsided = DMatrix::from_row_slice(2, 2, &[1.0, 0.1, -0.1, 1.0]);
        assert!(matches!(check_covariance(&lopsided, 1.0), ValidationReport::NotSymmetric { .. }));
    }

    #[test]
    fn from_parts_rejects_invalid_states() {
        let tight = DMatrix::from_diagonal_element(2, 2, 0.5);
        assert!(matches!(
            GaussianState::from_parts(tight, DVector::zeros(2), 1.0),
            Err(Error::InvalidState(_))
        ));
        let odd = DMatrix::identity(3, 3);
        assert!(matches!(
            GaussianState::from_parts(odd, DVector::zeros(3), 1.0),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn verdicts_are_hbar_covariant() {
        // Scaling (Sigma, hbar) -> (c Sigma, c hbar) preserves clear
        // verdicts on both sides of the boundary.
        for c in [0.5, 1.0, 4.0] {
            let good = DMatrix::from_diagonal_element(2, 2, 1.5 * c);
            assert!(check_covariance(&good, c).is_ok());
            let bad = DMatrix::from_diagonal_element(2, 2, 0.5 * c);
            assert!(matches!(check_covariance(&bad, c), ValidationReport::Unphysical { .. }));
        }
    }

    #[test]
    fn descriptor_builds_each_family() {
        let pure: StateDescriptor =
            serde_json::from_str(r#"{"n": 1, "r": [0.5], "theta": [0.1]}"#).unwrap();
        assert!(pure.build().unwrap().is_pure(1e-8).unwrap());

        let thermal: StateDescriptor = serde_json::from_str(
            r#"{"n": 1, "hbar": 0.5, "r": [0.2], "theta": [0.0], "beta_s": 1.0, "omega": 1.0}"#,
        )
        .unwrap();
        assert!(!thermal.build().unwrap().is_pure(1e-8).unwrap());

        let displaced: StateDescriptor =
            serde_json::from_str(r#"{"n": 2, "u": [1.0, 0.0, 0.0, -1.0]}"#).unwrap();
        assert_eq!(displaced.build().unwrap().mean()[0], 1.0);

        let unknown = serde_json::from_str::<StateDescriptor>(r#"{"n": 1, "sigma": []}"#);
        assert!(unknown.is_err());

        let thermal_multimode: StateDescriptor =
            serde_json::from_str(r#"{"n": 2, "beta_s": 1.0, "omega": 1.0}"#).unwrap();
        assert!(thermal_multimode.build().is_err());
    }

    proptest! {
        #[test]
        fn constructors_always_produce_valid_states(
            r in 0.0..3.0f64,
            theta in -3.2..3.2f64,
            hbar in 0.1..10.0f64,
            beta in 0.05..50.0f64,
        ) {
            let spec = SqueezeSpec::single(r, theta).unwrap();
            let pure = GaussianState::pure_squeezed(&spec, hbar).unwrap();
            prop_assert!(pure.validate().is_ok());
            prop_assert!(pure.is_pure(1e-8).unwrap());

            let thermal = GaussianState::thermal_squeezed(beta, 1.0, &spec, hbar).unwrap();
            prop_assert!(thermal.validate().is_ok());
            let expected = (0.5 * beta).tanh();
            prop_assert!((thermal.purity() - expected).abs() <= 1e-12 * (1.0 + expected));
        }
    }
}
