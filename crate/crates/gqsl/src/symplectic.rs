//! Symplectic structure: the form `Omega`, quadratic generators, and the
//! exact propagators they generate.
//!
//! Phase-space coordinates are ordered `z = (q_1, p_1, ..., q_n, p_n)`, so
//! `Omega` is block-diagonal with `[[0, 1], [-1, 0]]` per mode. A quadratic
//! Hamiltonian `H = z^T G z / 2` moves first moments with the drift matrix
//! `A = Omega G` and covariances with `S(t) = exp(A t)`.

use nalgebra::DMatrix;

use crate::linalg;
use crate::{Error, Result};

/// Relative symmetry tolerance for generator matrices.
const SYMMETRY_TOL: f64 = 1e-12;

/// Acceptance threshold on `||S Omega S^T - Omega||_F` for matrices claimed
/// symplectic.
const SYMPLECTIC_DEFECT_TOL: f64 = 1e-8;

/// Tighter threshold required of freshly computed propagators.
const PROPAGATOR_DEFECT_TOL: f64 = 1e-10;

/// Relative tolerance for identifying the two moduli of a conjugate
/// eigenvalue pair.
const PAIRING_TOL: f64 = 1e-8;

/// The symplectic form on `n` modes: `2n x 2n`, block-diagonal with
/// `[[0, 1], [-1, 0]]` per mode.
pub fn omega(n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        m[(2 * k, 2 * k + 1)] = 1.0;
        m[(2 * k + 1, 2 * k)] = -1.0;
    }
    m
}

/// Whether `||S Omega S^T - Omega||_F <= tol`. The matrix must be square
/// with even dimension.
pub fn is_symplectic(s: &DMatrix<f64>, tol: f64) -> Result<bool> {
    let n = even_modes(s, "symplectic candidate")?;
    let om = omega(n);
    Ok((s * &om * s.transpose() - &om).norm() <= tol)
}

/// Symplectic spectrum of a covariance matrix: the `n` distinct moduli of
/// the eigenvalues of `Omega Sigma / hbar`, sorted in descending order.
///
/// Each modulus appears twice in the raw spectrum; the pair is averaged.
/// A physical state has every entry `>= 1`, with equality on pure modes.
pub fn symplectic_eigenvalues(sigma: &DMatrix<f64>, hbar: f64) -> Result<Vec<f64>> {
    let n = even_modes(sigma, "covariance matrix")?;
    if hbar <= 0.0 {
        return Err(Error::InvalidArgument(format!("hbar must be positive, got {hbar}")));
    }
    if linalg::asymmetry(sigma) > SYMMETRY_TOL * (1.0 + sigma.norm()) {
        return Err(Error::InvalidState("covariance matrix is not symmetric".into()));
    }
    linalg::spd_cholesky(sigma, "covariance matrix")
        .map_err(|_| Error::InvalidState("covariance matrix is not positive-definite".into()))?;

    let m = omega(n) * sigma / hbar;
    let mut moduli: Vec<f64> = m.complex_eigenvalues().iter().map(|c| c.norm()).collect();
    moduli.sort_by(|a, b| b.total_cmp(a));

    let mut nu = Vec::with_capacity(n);
    for pair in moduli.chunks_exact(2) {
        let scale = pair[0].max(1.0);
        if (pair[0] - pair[1]).abs() > PAIRING_TOL * scale {
            return Err(Error::NumericalFailure(format!(
                "eigenvalue moduli failed to pair: {} vs {}",
                pair[0], pair[1]
            )));
        }
        nu.push(0.5 * (pair[0] + pair[1]));
    }
    Ok(nu)
}

/// A symmetric generator matrix `G` for the quadratic Hamiltonian
/// `H = z^T G z / 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticGenerator {
    g: DMatrix<f64>,
}

impl QuadraticGenerator {
    /// Wraps a generator matrix; it must be square with even dimension and
    /// symmetric to relative Frobenius tolerance `1e-12`.
    pub fn new(g: DMatrix<f64>) -> Result<Self> {
        even_modes(&g, "generator")?;
        if linalg::asymmetry(&g) > SYMMETRY_TOL * (1.0 + g.norm()) {
            return Err(Error::InvalidArgument("generator matrix is not symmetric".into()));
        }
        Ok(Self { g: linalg::symmetrize(&g) })
    }

    /// The general single-mode generator
    /// `G = g0 I + gS (sin(2 phi) diag(1, -1) + cos(2 phi) [[0, 1], [1, 0]])`,
    /// equal to `g0 I + gS R(phi) [[0, 1], [1, 0]] R(phi)^T`. The angle only
    /// enters through `2 phi`, so `phi` is meaningful mod pi.
    pub fn single_mode(g0: f64, g_s: f64, phi: f64) -> Self {
        let (s, c) = (2.0 * phi).sin_cos();
        let g = DMatrix::from_row_slice(2, 2, &[g0 + g_s * s, g_s * c, g_s * c, g0 - g_s * s]);
        Self { g }
    }

    /// The isotropic generator `omega I`, a bare harmonic oscillator on
    /// every mode.
    pub fn harmonic(n: usize, omega: f64) -> Self {
        Self { g: DMatrix::from_diagonal_element(2 * n, 2 * n, omega) }
    }

    /// Decomposes a single-mode generator into `(g0, gS, phi)` with
    /// `gS >= 0` and `phi` in `[0, pi)`. For an isotropic generator
    /// (`gS = 0`) the angle is reported as `0`.
    pub fn single_mode_components(&self) -> Result<(f64, f64, f64)> {
        if self.modes() != 1 {
            return Err(Error::Precondition(format!(
                "single-mode decomposition needs n = 1, got n = {}",
                self.modes()
            )));
        }
        let g0 = 0.5 * (self.g[(0, 0)] + self.g[(1, 1)]);
        let a = 0.5 * (self.g[(0, 0)] - self.g[(1, 1)]);
        let b = self.g[(0, 1)];
        let g_s = a.hypot(b);
        let phi =
            if g_s == 0.0 { 0.0 } else { (0.5 * a.atan2(b)).rem_euclid(std::f64::consts::PI) };
        Ok((g0, g_s, phi))
    }

    /// Number of modes.
    pub fn modes(&self) -> usize {
        self.g.nrows() / 2
    }

    /// The generator matrix `G`.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.g
    }

    /// The drift matrix `A = Omega G` of the Hamiltonian flow.
    pub fn drift(&self) -> DMatrix<f64> {
        omega(self.modes()) * &self.g
    }
}

/// A matrix verified to preserve the symplectic form.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMatrix {
    s: DMatrix<f64>,
    defect: f64,
}

impl SymplecticMatrix {
    /// Accepts a matrix whose symplectic defect `||S Omega S^T - Omega||_F`
    /// is at most `1e-8` (which also pins `det S = 1`).
    pub fn new(s: DMatrix<f64>) -> Result<Self> {
        let n = even_modes(&s, "symplectic candidate")?;
        let om = omega(n);
        let defect = (&s * &om * s.transpose() - &om).norm();
        if defect > SYMPLECTIC_DEFECT_TOL {
            return Err(Error::InvalidArgument(format!(
                "matrix is not symplectic: defect {defect:e}"
            )));
        }
        let det = s.determinant();
        if (det - 1.0).abs() > SYMPLECTIC_DEFECT_TOL * (1.0 + s.norm_squared()) {
            return Err(Error::InvalidArgument(format!("matrix is not symplectic: det = {det}")));
        }
        Ok(Self { s, defect })
    }

    /// Number of modes.
    pub fn modes(&self) -> usize {
        self.s.nrows() / 2
    }

    /// The matrix itself.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.s
    }

    /// `||S Omega S^T - Omega||_F` measured at construction.
    pub fn defect(&self) -> f64 {
        self.defect
    }
}

/// The exact propagator `S(t) = exp(Omega G t)` of a quadratic Hamiltonian.
///
/// Fails if the numerically computed exponential misses the symplectic
/// group by more than `1e-10` in Frobenius norm; in practice that bounds
/// `||Omega G t||` to moderate values.
pub fn propagator(generator: &QuadraticGenerator, t: f64) -> Result<SymplecticMatrix> {
    let s = (generator.drift() * t).exp();
    let n = generator.modes();
    let om = omega(n);
    let defect = (&s * &om * s.transpose() - &om).norm();
    if defect > PROPAGATOR_DEFECT_TOL {
        return Err(Error::NumericalFailure(format!(
            "propagator defect {defect:e} exceeds {PROPAGATOR_DEFECT_TOL:e} at t = {t}"
        )));
    }
    Ok(SymplecticMatrix { s, defect })
}

/// Dimension check shared by the constructors: square, even, nonzero.
fn even_modes(m: &DMatrix<f64>, what: &str) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::InvalidArgument(format!(
            "{what} must be square, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.nrows() == 0 || !m.nrows().is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "{what} must have even positive dimension, got {}",
            m.nrows()
        )));
    }
    Ok(m.nrows() / 2)
}
