//! Independent verification routes and seeded sample generators.
//!
//! Nothing here reuses the closed forms it is meant to check: fidelity is
//! re-derived by quadrature of Wigner-function overlaps, and speeds by
//! finite differences of fidelity along a trajectory. The self-test command
//! and the test suites both run against these.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::states::GaussianState;
use crate::symplectic::{propagator, QuadraticGenerator};
use crate::{linalg, Error, Result};

/// Quadrature grid for the phase-space overlap integrals.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    /// Points per axis; the refinement check doubles this.
    pub points: usize,
    /// Half-width of the integration box in per-axis standard deviations.
    pub half_width_sigmas: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { points: 512, half_width_sigmas: 8.0 }
    }
}

/// Fidelity of two single-mode states from first principles: trapezoid
/// quadrature of Wigner overlaps, `F = I_12 / sqrt(I_11 I_22)` with
/// `I_ab = integral of N(z; u_a, Sigma_a/2) N(z; u_b, Sigma_b/2)`.
///
/// The box covers `half_width_sigmas` standard deviations of both states on
/// each axis. The integral is repeated on a doubled grid; if the result
/// moves by more than `1e-6` the grid is too coarse and a precision failure
/// is returned.
pub fn phase_space_fidelity(a: &GaussianState, b: &GaussianState, grid: GridSpec) -> Result<f64> {
    if a.modes() != 1 || b.modes() != 1 {
        return Err(Error::Precondition("phase-space oracle is single-mode".into()));
    }
    if grid.points < 8 {
        return Err(Error::InvalidArgument("oracle grid needs at least 8 points".into()));
    }
    let coarse = overlap_fidelity(a, b, grid.points, grid.half_width_sigmas)?;
    let fine = overlap_fidelity(a, b, 2 * grid.points, grid.half_width_sigmas)?;
    if (fine - coarse).abs() > 1e-6 {
        return Err(Error::PrecisionFailure(format!(
            "oracle grid too coarse: fidelity moved by {:e} on refinement",
            (fine - coarse).abs()
        )));
    }
    Ok(fine)
}

fn overlap_fidelity(a: &GaussianState, b: &GaussianState, m: usize, w: f64) -> Result<f64> {
    let wa = WignerDensity::new(a)?;
    let wb = WignerDensity::new(b)?;

    let mut lo = [0.0f64; 2];
    let mut hi = [0.0f64; 2];
    for axis in 0..2 {
        let (la, ha) = wa.axis_range(axis, w);
        let (lb, hb) = wb.axis_range(axis, w);
        lo[axis] = la.min(lb);
        hi[axis] = ha.max(hb);
    }
    let hq = (hi[0] - lo[0]) / (m - 1) as f64;
    let hp = (hi[1] - lo[1]) / (m - 1) as f64;

    let mut i11 = 0.0;
    let mut i22 = 0.0;
    let mut i12 = 0.0;
    for iq in 0..m {
        let q = lo[0] + iq as f64 * hq;
        let wq = trapezoid_weight(iq, m);
        for ip in 0..m {
            let p = lo[1] + ip as f64 * hp;
            let weight = wq * trapezoid_weight(ip, m);
            let fa = wa.density(q, p);
            let fb = wb.density(q, p);
            i11 += weight * fa * fa;
            i22 += weight * fb * fb;
            i12 += weight * fa * fb;
        }
    }
    // The common factor hq * hp cancels in the ratio.
    if i11 <= 0.0 || i22 <= 0.0 {
        return Err(Error::NumericalFailure("overlap quadrature degenerated".into()));
    }
    Ok(i12 / (i11 * i22).sqrt())
}

fn trapezoid_weight(i: usize, m: usize) -> f64 {
    if i == 0 || i + 1 == m {
        0.5
    } else {
        1.0
    }
}

/// Bivariate normal density with covariance `Sigma / 2`.
struct WignerDensity {
    mean: [f64; 2],
    inv: [[f64; 2]; 2],
    norm: f64,
    sig: [f64; 2],
}

impl WignerDensity {
    fn new(state: &GaussianState) -> Result<Self> {
        let v: DMatrix<f64> = state.covariance() * 0.5;
        let det = v[(0, 0)] * v[(1, 1)] - v[(0, 1)] * v[(1, 0)];
        if det <= 0.0 {
            return Err(Error::NumericalFailure("Wigner covariance is singular".into()));
        }
        let inv = [[v[(1, 1)] / det, -v[(0, 1)] / det], [-v[(1, 0)] / det, v[(0, 0)] / det]];
        Ok(Self {
            mean: [state.mean()[0], state.mean()[1]],
            inv,
            norm: 1.0 / (2.0 * std::f64::consts::PI * det.sqrt()),
            sig: [v[(0, 0)].sqrt(), v[(1, 1)].sqrt()],
        })
    }

    fn axis_range(&self, axis: usize, w: f64) -> (f64, f64) {
        (self.mean[axis] - w * self.sig[axis], self.mean[axis] + w * self.sig[axis])
    }

    fn density(&self, q: f64, p: f64) -> f64 {
        let dq = q - self.mean[0];
        let dp = p - self.mean[1];
        let quad = self.inv[0][0] * dq * dq
            + (self.inv[0][1] + self.inv[1][0]) * dq * dp
            + self.inv[1][1] * dp * dp;
        self.norm * (-0.5 * quad).exp()
    }
}

/// Squared speed at time `t` by Richardson-extrapolated finite differences
/// of the fidelity: with `g(h) = (1 - F(rho_t, rho_{t+h})) / h^2` at
/// `h = 1e-4` and `h/2`, returns `2 g(h/2) - g(h)`.
///
/// `state_at` must produce the exact state of the trajectory at a given
/// time through a route independent of the algebraic speed formulas.
pub fn finite_difference_speed_squared(
    state_at: impl Fn(f64) -> Result<GaussianState>,
    t: f64,
) -> Result<f64> {
    let h = 1e-4;
    let base = state_at(t)?;
    let g = |step: f64| -> Result<f64> {
        let next = state_at(t + step)?;
        let f = crate::metric::fidelity(&base, &next)?;
        Ok((1.0 - f.fidelity()) / (step * step))
    };
    Ok(2.0 * g(0.5 * h)? - g(h)?)
}

/// Random symmetric generator with entries in `(-scale, scale)`.
pub fn random_generator(rng: &mut impl Rng, n: usize, scale: f64) -> QuadraticGenerator {
    let g = DMatrix::from_fn(2 * n, 2 * n, |_, _| rng.gen_range(-scale..scale));
    QuadraticGenerator::new(linalg::symmetrize(&g)).expect("symmetrized matrix is a generator")
}

/// Random displaced mixed state `Sigma = hbar S K S^T`, with `S` a random
/// symplectic matrix, symplectic spectrum drawn from `nu_range`, and means
/// in `(-1.5, 1.5)`.
pub fn random_state(
    rng: &mut impl Rng,
    n: usize,
    hbar: f64,
    nu_range: (f64, f64),
) -> GaussianState {
    let s = propagator(&random_generator(rng, n, 0.6), 1.0)
        .expect("moderate generators exponentiate cleanly");
    let mut diag = DVector::zeros(2 * n);
    for k in 0..n {
        let nu = rng.gen_range(nu_range.0..=nu_range.1);
        diag[2 * k] = nu;
        diag[2 * k + 1] = nu;
    }
    let sigma = hbar * s.matrix() * DMatrix::from_diagonal(&diag) * s.matrix().transpose();
    let u = DVector::from_fn(2 * n, |_, _| rng.gen_range(-1.5..1.5));
    GaussianState::from_parts(linalg::symmetrize(&sigma), u, hbar)
        .expect("constructed moments are physical")
}

/// Random displaced pure state (unit symplectic spectrum).
pub fn random_pure_state(rng: &mut impl Rng, n: usize, hbar: f64) -> GaussianState {
    random_state(rng, n, hbar, (1.0, 1.0))
}
