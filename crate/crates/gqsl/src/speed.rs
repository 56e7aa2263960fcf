//! Closed-form evaluators for the instantaneous speed of Gaussian states.
//!
//! The speed `V` is the time derivative of the angle
//! `Theta = 2 arccos sqrt(F)` along an evolution, so `1 - F(rho_t,
//! rho_{t+dt}) = V^2 dt^2 + O(dt^3)`. This module evaluates `V^2` in closed
//! form for
//!
//! - arbitrary states under a quadratic Hamiltonian ([`speed_unitary`]),
//!   with specialized forms for pure states ([`speed_unitary_pure`]), the
//!   isotropic harmonic generator ([`speed_harmonic`], `O(n)` work), and a
//!   single squeezed mode ([`speed_single_mode`]);
//! - open Gaussian dynamics ([`speed_open`]), split for one mode into a
//!   unitary part and a dissipative correction ([`speed_open_split`]) with
//!   its high-temperature limit ([`chi_nu_high_temp`]);
//!
//! plus the analytic extrema of the single-mode speed over the squeezing
//! orientation ([`single_mode_extrema`]) and the reduction of a large
//! register to an equivalent single mode ([`large_n_equivalents`]).
//!
//! Every evaluator is a pure function; sweeps may call them from parallel
//! workers freely.

use nalgebra::{DMatrix, DVector};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::dynamics::OpenDynamics;
use crate::states::{GaussianState, SqueezeSpec};
use crate::symplectic::QuadraticGenerator;
use crate::{linalg, Error, Result};

/// States whose symplectic eigenvalues sit within this distance of 1 count
/// as pure for [`speed_unitary_pure`].
pub const PURITY_SPECTRUM_TOL: f64 = 1e-8;

/// Relative agreement demanded between the trace formula and the
/// unitary-plus-dissipative split inside [`speed_open`].
pub const SPLIT_CONSISTENCY_TOL: f64 = 1e-10;

/// A squared speed broken into its covariance and mean-motion parts.
///
/// `v2_total = v2_cov + v2_mean` by construction. For dynamics where the
/// single-mode split applies, `v2_unitary + chi_nu = v2_cov`; the split
/// fields are `None` for open dynamics with more than one mode, where no
/// such decomposition is defined. `tau_q = 1/sqrt(v2_total)` is the
/// characteristic time, infinite for a stationary instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedReport {
    /// Squared speed, `v2_cov + v2_mean`.
    pub v2_total: f64,
    /// Contribution of the changing covariance matrix.
    pub v2_cov: f64,
    /// Contribution of the moving mean vector.
    pub v2_mean: f64,
    /// Unitary part of `v2_cov`; `None` when the split is undefined.
    pub v2_unitary: Option<f64>,
    /// Dissipative correction to `v2_cov` (may be negative); `None` when
    /// the split is undefined.
    pub chi_nu: Option<f64>,
    /// `1/sqrt(v2_total)`, infinite when the state is instantaneously
    /// stationary.
    pub tau_q: f64,
}

impl SpeedReport {
    fn assemble(v2_cov: f64, v2_mean: f64, split: Option<(f64, f64)>) -> Self {
        let v2_total = v2_cov + v2_mean;
        let tau_q = if v2_total > 0.0 { 1.0 / v2_total.sqrt() } else { f64::INFINITY };
        let (v2_unitary, chi_nu) = match split {
            Some((u, chi)) => (Some(u), Some(chi)),
            None => (None, None),
        };
        SpeedReport { v2_total, v2_cov, v2_mean, v2_unitary, chi_nu, tau_q }
    }
}

impl Serialize for SpeedReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let fields =
            4 + usize::from(self.v2_unitary.is_some()) + usize::from(self.chi_nu.is_some());
        let mut out = serializer.serialize_struct("SpeedReport", fields)?;
        out.serialize_field("v2_total", &self.v2_total)?;
        out.serialize_field("v2_cov", &self.v2_cov)?;
        out.serialize_field("v2_mean", &self.v2_mean)?;
        match &self.v2_unitary {
            Some(v) => out.serialize_field("v2_unitary", v)?,
            None => out.skip_field("v2_unitary")?,
        }
        match &self.chi_nu {
            Some(v) => out.serialize_field("chi_nu", v)?,
            None => out.skip_field("chi_nu")?,
        }
        if self.tau_q.is_infinite() {
            out.serialize_field("tau_q", "inf")?;
        } else {
            out.serialize_field("tau_q", &self.tau_q)?;
        }
        out.end()
    }
}

/// Clamps a mathematically nonnegative squared speed whose evaluation may
/// go slightly negative through cancellation. Anything beyond roundoff
/// (relative to `scale`, the magnitude of the cancelled terms) is a genuine
/// evaluation failure.
fn nonnegative_speed(value: f64, scale: f64, what: &str) -> Result<f64> {
    if value >= 0.0 {
        Ok(value)
    } else if value >= -1e-9 * scale {
        Ok(0.0)
    } else {
        Err(Error::NumericalFailure(format!(
            "{what} evaluated to {value:.6e}, negative beyond roundoff"
        )))
    }
}

fn check_dimensions(state: &GaussianState, generator: &QuadraticGenerator) -> Result<()> {
    if state.modes() != generator.modes() {
        return Err(Error::InvalidArgument(format!(
            "state has {} modes but generator has {}",
            state.modes(),
            generator.modes()
        )));
    }
    Ok(())
}

/// Squared speed of an arbitrary (mixed, multimode) state under the
/// quadratic Hamiltonian with generator `G`:
///
/// ```text
/// V^2 = (1/8)[tr(Sigma^{-1} A Sigma A^T) + tr((Omega G)^2)]
///     + (1/2) u^T A^T Sigma^{-1} A u,        A = Omega G.
/// ```
///
/// The first bracket fills `v2_cov`, the mean term fills `v2_mean`.
pub fn speed_unitary(state: &GaussianState, generator: &QuadraticGenerator) -> Result<SpeedReport> {
    check_dimensions(state, generator)?;
    let sigma = state.covariance();
    let chol = linalg::spd_cholesky(sigma, "covariance matrix")?;
    let a = generator.drift();
    let asa = &a * sigma * a.transpose();
    let t1 = chol.solve(&asa).trace();
    let t2 = (&a * &a).trace();
    let v2_cov = nonnegative_speed(
        (t1 + t2) / 8.0,
        (t1.abs() + t2.abs()) / 8.0 + 1.0,
        "unitary covariance speed",
    )?;
    let au = &a * state.mean();
    let v2_mean = (0.5 * linalg::inv_quadratic_form(&chol, &au)).max(0.0);
    Ok(SpeedReport::assemble(v2_cov, v2_mean, Some((v2_cov, 0.0))))
}

/// Squared speed of a pure state under the generator `G`:
///
/// ```text
/// V^2 = (1/8 hbar^2)[tr((G Sigma)^2) + hbar^2 tr((Omega G)^2)]
///     + (1/2 hbar^2) u^T G Sigma G u.
/// ```
///
/// Agrees with [`speed_unitary`] whenever the state is pure; a mixed state
/// (any symplectic eigenvalue off 1 by more than [`PURITY_SPECTRUM_TOL`])
/// is rejected.
pub fn speed_unitary_pure(
    state: &GaussianState,
    generator: &QuadraticGenerator,
) -> Result<SpeedReport> {
    check_dimensions(state, generator)?;
    let deviation =
        state.symplectic_spectrum()?.iter().map(|nu| (nu - 1.0).abs()).fold(0.0f64, f64::max);
    if deviation > PURITY_SPECTRUM_TOL {
        return Err(Error::Precondition(format!(
            "pure-state speed formula needs a pure state: max |nu - 1| = {deviation:.6e}"
        )));
    }
    let hbar = state.hbar();
    let sigma = state.covariance();
    let gs = generator.matrix() * sigma;
    let t1 = (&gs * &gs).trace() / (hbar * hbar);
    let a = generator.drift();
    let t2 = (&a * &a).trace();
    let v2_cov = nonnegative_speed(
        (t1 + t2) / 8.0,
        (t1.abs() + t2.abs()) / 8.0 + 1.0,
        "pure-state covariance speed",
    )?;
    let gu = generator.matrix() * state.mean();
    let v2_mean = (gu.dot(&(sigma * &gu)) / (2.0 * hbar * hbar)).max(0.0);
    Ok(SpeedReport::assemble(v2_cov, v2_mean, Some((v2_cov, 0.0))))
}

/// Squared speed of a pure squeezed register driven by the isotropic
/// harmonic generator `G = omega I`, in `O(n)` arithmetic:
///
/// ```text
/// V^2 = (omega^2/8)(tr D^2 - 2n) + (omega^2/2 hbar) v^T D v
/// ```
///
/// with `D = diag(e^{r_k}, e^{-r_k})` the squeezing stretch and `v` the
/// mean vector rotated into the squeezing frame (`u = O v` for the state's
/// rotation `O`). The trace term reduces to `(omega^2/2) sum_k
/// sinh^2 r_k`, which is how it is evaluated here.
pub fn speed_harmonic(
    spec: &SqueezeSpec,
    v: &DVector<f64>,
    omega: f64,
    hbar: f64,
) -> Result<SpeedReport> {
    if !(omega > 0.0) || !(hbar > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "omega and hbar must be positive, got omega = {omega}, hbar = {hbar}"
        )));
    }
    let n = spec.r().len();
    if v.len() != 2 * n {
        return Err(Error::InvalidArgument(format!(
            "rotated means have length {} but the register has {n} modes",
            v.len()
        )));
    }
    let mut stretch_sum = 0.0;
    let mut mean_sum = 0.0;
    for (k, &r) in spec.r().iter().enumerate() {
        stretch_sum += r.sinh().powi(2);
        mean_sum += r.exp() * v[2 * k] * v[2 * k] + (-r).exp() * v[2 * k + 1] * v[2 * k + 1];
    }
    let v2_cov = 0.5 * omega * omega * stretch_sum;
    let v2_mean = omega * omega / (2.0 * hbar) * mean_sum;
    Ok(SpeedReport::assemble(v2_cov, v2_mean, Some((v2_cov, 0.0))))
}

/// Squared speed of a pure single-mode squeezed state (parameter `r`,
/// centered) under the generator with components `(g0, gS)` at relative
/// orientation `delta = theta - phi`:
///
/// ```text
/// V^2 = (1/2)[(g0 sinh r - gS sin(2 delta) cosh r)^2
///             + gS^2 cos^2(2 delta)].
/// ```
///
/// Independent of `hbar` and of an overall thermal factor in the
/// covariance, so it also gives the covariance speed of the
/// thermal-squeezed state with the same `r` and `theta`.
pub fn speed_single_mode(r: f64, delta: f64, g0: f64, g_s: f64) -> f64 {
    let stretch = g0 * r.sinh() - g_s * (2.0 * delta).sin() * r.cosh();
    let shear = g_s * (2.0 * delta).cos();
    0.5 * (stretch * stretch + shear * shear)
}

/// Stationary points of [`speed_single_mode`] in the orientation `delta`,
/// for fixed squeezing `r >= 0` and generator weights `g0, gS >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtremaReport {
    /// Stationary orientations in `[0, pi)`, sorted ascending. Always
    /// contains `pi/4` and `3 pi/4`; on the degenerate branch two further
    /// minima appear at `sin(2 delta) = (g0/gS) coth r`.
    pub delta_critical: Vec<f64>,
    /// Largest squared speed, `(g0 sinh r + gS cosh r)^2 / 2`, attained at
    /// `delta = 3 pi/4`.
    pub v2_max: f64,
    /// Smallest squared speed over all orientations.
    pub v2_min: f64,
    /// Whether `g0 <= gS tanh r`, the regime with the extra pair of minima
    /// where the minimum value `(gS^2 - g0^2)/2` no longer depends on `r`.
    pub branch: bool,
}

/// Analytic extrema of the single-mode squared speed over the orientation
/// `delta`, on the domain `r >= 0`, `g0 >= 0`, `gS >= 0` (the speed at
/// `-g0` or `-gS` equals the speed at reflected orientations, so
/// nonnegative weights lose no generality).
///
/// A generator with `g0 = gS = 0` generates no motion at all and is
/// rejected as degenerate.
pub fn single_mode_extrema(r: f64, g0: f64, g_s: f64) -> Result<ExtremaReport> {
    if r < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "squeezing parameter must be nonnegative, got {r}"
        )));
    }
    if g0 < 0.0 || g_s < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "generator weights must be nonnegative, got g0 = {g0}, gS = {g_s}"
        )));
    }
    if g0 == 0.0 && g_s == 0.0 {
        return Err(Error::InvalidArgument(
            "degenerate generator: g0 = gS = 0 produces no motion".into(),
        ));
    }
    let branch = g0 <= g_s * r.tanh();
    let mut delta_critical = vec![std::f64::consts::FRAC_PI_4, 3.0 * std::f64::consts::FRAC_PI_4];
    if branch {
        // sin(2 delta_c) = (g0/gS) coth r; branch membership keeps the
        // argument in [0, 1]. g0 = 0 makes it 0 for every r, including the
        // otherwise indeterminate r = 0.
        let s = if g0 == 0.0 { 0.0 } else { g0 / (g_s * r.tanh()) };
        let half = s.min(1.0).asin() / 2.0;
        delta_critical.push(half);
        delta_critical.push(std::f64::consts::FRAC_PI_2 - half);
    }
    delta_critical.sort_by(|a, b| a.total_cmp(b));
    delta_critical.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);
    let v2_max = 0.5 * (g0 * r.sinh() + g_s * r.cosh()).powi(2);
    let v2_min = if branch {
        0.5 * (g_s * g_s - g0 * g0)
    } else {
        0.5 * (g0 * r.sinh() - g_s * r.cosh()).powi(2)
    };
    Ok(ExtremaReport { delta_critical, v2_max, v2_min, branch })
}

/// Squared speed of a state evolving under open Gaussian dynamics, from the
/// trace formula
///
/// ```text
/// v2_cov  = (1/16) tr((Sigma^{-1} dSigma/dt)^2),
/// v2_mean = (1/2) (du/dt)^T Sigma^{-1} (du/dt),
/// ```
///
/// with `dSigma/dt = B Sigma + Sigma B^T + D` and `du/dt = B u`. For one
/// mode in the isotropic-rate form the report also carries the
/// unitary/dissipative split of `v2_cov` (see [`speed_open_split`]), after
/// checking both routes agree to [`SPLIT_CONSISTENCY_TOL`].
pub fn speed_open(state: &GaussianState, dynamics: &OpenDynamics) -> Result<SpeedReport> {
    if state.modes() != dynamics.modes() {
        return Err(Error::InvalidArgument(format!(
            "state has {} modes but the dynamics have {}",
            state.modes(),
            dynamics.modes()
        )));
    }
    let sigma = state.covariance();
    let chol = linalg::spd_cholesky(sigma, "covariance matrix")?;
    let sigma_dot =
        dynamics.drift() * sigma + sigma * dynamics.drift().transpose() + dynamics.diffusion();
    let ratio = chol.solve(&sigma_dot);
    let trace = (&ratio * &ratio).trace();
    let v2_cov = nonnegative_speed(trace / 16.0, trace.abs() / 16.0 + 1.0, "covariance speed")?;
    let u_dot = dynamics.drift() * state.mean();
    let v2_mean = (0.5 * linalg::inv_quadratic_form(&chol, &u_dot)).max(0.0);

    let split = if state.modes() == 1 && dynamics.isotropic_form().is_some() {
        let (v2_unitary, chi_nu) = speed_open_split(state, dynamics)?;
        let scale = 1.0 + v2_cov.abs() + v2_unitary.abs() + chi_nu.abs();
        let gap = (v2_unitary + chi_nu - v2_cov).abs();
        if gap > SPLIT_CONSISTENCY_TOL * scale {
            return Err(Error::NumericalFailure(format!(
                "unitary/dissipative split disagrees with the trace formula by {gap:.6e}"
            )));
        }
        Some((v2_unitary, chi_nu))
    } else {
        None
    };
    Ok(SpeedReport::assemble(v2_cov, v2_mean, split))
}

/// Single-mode decomposition of the open covariance speed into a unitary
/// part and a dissipative correction:
///
/// ```text
/// v2_unitary = (1/8)[tr((G Sigma)^2)/eta^2 + tr((Omega G)^2)],
/// chi_nu     = (g^2/8)[1 - tr(Sigma^{-1} M) + tr((Sigma^{-1} M)^2)/2]
///            + (g/8 eta^2) tr(Sigma (G M Omega - Omega M G)),
/// ```
///
/// with `eta^2 = det Sigma`. Their sum equals the trace-formula `v2_cov`
/// identically. Defined only for one mode and for dynamics carrying the
/// isotropic-rate form `(G, g, M)`.
pub fn speed_open_split(state: &GaussianState, dynamics: &OpenDynamics) -> Result<(f64, f64)> {
    if state.modes() != 1 || dynamics.modes() != 1 {
        return Err(Error::Precondition(
            "the unitary/dissipative split is defined for a single mode only".into(),
        ));
    }
    let form = dynamics.isotropic_form().ok_or_else(|| {
        Error::Precondition(
            "dynamics do not decompose into generator, isotropic rate, and shape".into(),
        )
    })?;
    let sigma = state.covariance();
    let g_mat = form.generator.matrix();
    let eta_sq = sigma[(0, 0)] * sigma[(1, 1)] - sigma[(0, 1)] * sigma[(1, 0)];
    if !(eta_sq > 0.0) {
        return Err(Error::NumericalFailure(format!(
            "covariance determinant {eta_sq:.6e} is not positive"
        )));
    }
    let gs = g_mat * sigma;
    let a = form.generator.drift();
    let v2_unitary = ((&gs * &gs).trace() / eta_sq + (&a * &a).trace()) / 8.0;

    let g = form.dissipation_rate;
    let chol = linalg::spd_cholesky(sigma, "covariance matrix")?;
    let ratio = chol.solve(&form.shape);
    let tr1 = ratio.trace();
    let tr2 = (&ratio * &ratio).trace();
    let omega = crate::symplectic::omega(1);
    let commutator = g_mat * &form.shape * &omega - &omega * &form.shape * g_mat;
    let chi_nu =
        g * g / 8.0 * (1.0 - tr1 + 0.5 * tr2) + g / (8.0 * eta_sq) * (sigma * commutator).trace();
    Ok((v2_unitary, chi_nu))
}

/// High-temperature limit of the dissipative correction `chi_nu`: with
/// `Sigma = eta O D O^T` (`det D = 1`, `eta = sqrt(det Sigma)`),
///
/// ```text
/// chi_nu ~ (g^2/8)[1 - (1/eta) tr(O D^{-1} O^T M)]
///        + (g/8 eta) tr(O D O^T (G M Omega - Omega M G)),
/// ```
///
/// dropping the `O(eta^{-2})` term `(g^2/16) tr((Sigma^{-1} M)^2)` of the
/// exact expression.
pub fn chi_nu_high_temp(state: &GaussianState, dynamics: &OpenDynamics) -> Result<f64> {
    if state.modes() != 1 || dynamics.modes() != 1 {
        return Err(Error::Precondition(
            "the high-temperature correction is defined for a single mode only".into(),
        ));
    }
    let form = dynamics.isotropic_form().ok_or_else(|| {
        Error::Precondition(
            "dynamics do not decompose into generator, isotropic rate, and shape".into(),
        )
    })?;
    let sigma = state.covariance();
    let eta_sq = sigma[(0, 0)] * sigma[(1, 1)] - sigma[(0, 1)] * sigma[(1, 0)];
    if !(eta_sq > 0.0) {
        return Err(Error::NumericalFailure(format!(
            "covariance determinant {eta_sq:.6e} is not positive"
        )));
    }
    let eta = eta_sq.sqrt();
    // O D O^T = Sigma / eta and O D^{-1} O^T = (Sigma / eta)^{-1} = eta
    // Sigma^{-1}; for a 2x2 symmetric matrix the inverse is the adjugate
    // over the determinant.
    let unit = sigma / eta;
    let unit_inv =
        DMatrix::from_row_slice(2, 2, &[unit[(1, 1)], -unit[(0, 1)], -unit[(1, 0)], unit[(0, 0)]]);
    let g = form.dissipation_rate;
    let g_mat = form.generator.matrix();
    let omega = crate::symplectic::omega(1);
    let commutator = g_mat * &form.shape * &omega - &omega * &form.shape * g_mat;
    Ok(g * g / 8.0 * (1.0 - (&unit_inv * &form.shape).trace() / eta)
        + g / (8.0 * eta) * (&unit * commutator).trace())
}

/// Equivalent single-mode description of an `n`-mode squeezed register.
#[derive(Debug, Clone, PartialEq)]
pub struct LargeNEquivalence {
    /// Squeezing of the equivalent mode, `sinh^2 r = sum_k sinh^2 r_k`.
    pub r_equivalent: f64,
    /// Effective Planck constant `hbar / (n cosh r_equivalent)`, which is
    /// `hbar / n` for an unsqueezed register.
    pub hbar_eff: f64,
    /// Position component of the emulated displacement.
    pub q_displacement: f64,
    /// Momentum component of the emulated displacement.
    pub p_displacement: f64,
}

/// Maps an `n`-mode squeezed register with per-mode rotated-frame means
/// onto the single squeezed mode whose evolution it emulates:
///
/// ```text
/// sinh^2 r = sum_k sinh^2 r_k,
/// <q> = (e^{-r}/n) sum_k e^{ r_k} <q_k>^2,
/// <p> = (e^{ r}/n) sum_k e^{-r_k} <p_k>^2,
/// hbar_eff = hbar / (n cosh r),
/// ```
///
/// so growing the register plays the role of a large squeezing (or a small
/// effective `hbar`). `r_equivalent >= max_k r_k` always, and for small
/// uniform squeezing `r_equivalent ~ sqrt(n) r`.
pub fn large_n_equivalents(
    spec: &SqueezeSpec,
    means: &DVector<f64>,
    hbar: f64,
    n: usize,
) -> Result<LargeNEquivalence> {
    if n != spec.r().len() {
        return Err(Error::InvalidArgument(format!(
            "declared {n} modes but the squeeze specification has {}",
            spec.r().len()
        )));
    }
    if means.len() != 2 * n {
        return Err(Error::InvalidArgument(format!(
            "means have length {} but the register has {n} modes",
            means.len()
        )));
    }
    if !(hbar > 0.0) {
        return Err(Error::InvalidArgument(format!("hbar must be positive, got {hbar}")));
    }
    let r_equivalent = spec.r().iter().map(|r| r.sinh().powi(2)).sum::<f64>().sqrt().asinh();
    let mut q_sum = 0.0;
    let mut p_sum = 0.0;
    for (k, &r) in spec.r().iter().enumerate() {
        q_sum += r.exp() * means[2 * k] * means[2 * k];
        p_sum += (-r).exp() * means[2 * k + 1] * means[2 * k + 1];
    }
    let n_f = n as f64;
    Ok(LargeNEquivalence {
        r_equivalent,
        hbar_eff: hbar / (n_f * r_equivalent.cosh()),
        q_displacement: (-r_equivalent).exp() / n_f * q_sum,
        p_displacement: r_equivalent.exp() / n_f * p_sum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{qbm_dynamics, QbmParams};
    use crate::oracle;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn json(report: &SpeedReport) -> String {
        serde_json::to_string(report).unwrap()
    }

    #[test]
    fn vacuum_under_rotation_does_not_move() {
        let state = GaussianState::vacuum(2, 1.0).unwrap();
        let generator = QuadraticGenerator::harmonic(2, 1.3);
        for report in [
            speed_unitary(&state, &generator).unwrap(),
            speed_unitary_pure(&state, &generator).unwrap(),
        ] {
            assert_relative_eq!(report.v2_total, 0.0, epsilon = 1e-14);
            assert!(report.tau_q.is_infinite());
        }
    }

    #[test]
    fn squeezed_state_under_isotropic_generator() {
        let spec = SqueezeSpec::single(1.0, 0.0).unwrap();
        let state = GaussianState::pure_squeezed(&spec, 1.0).unwrap();
        let generator = QuadraticGenerator::single_mode(1.0, 0.0, 0.0);
        let report = speed_unitary(&state, &generator).unwrap();
        assert_relative_eq!(report.v2_total, 0.6905489227709077, epsilon = 1e-12);
        assert_relative_eq!(
            report.v2_total,
            speed_single_mode(1.0, 0.4, 1.0, 0.0),
            epsilon = 1e-12
        );
    }

    #[test]
    fn coherent_state_speed_scales_inversely_with_hbar() {
        for hbar in [0.25, 1.0, 4.0] {
            let state = GaussianState::vacuum(1, hbar)
                .unwrap()
                .displace(&DVector::from_vec(vec![0.7, -0.4]))
                .unwrap();
            let omega = 1.8;
            let generator = QuadraticGenerator::harmonic(1, omega);
            let expected = omega * omega * (0.7f64 * 0.7 + 0.4 * 0.4) / (2.0 * hbar);
            let report = speed_unitary(&state, &generator).unwrap();
            assert_relative_eq!(report.v2_total, expected, epsilon = 1e-12);
            assert_relative_eq!(report.v2_cov, 0.0, epsilon = 1e-14);
            let spec = SqueezeSpec::single(0.0, 0.0).unwrap();
            let harmonic = speed_harmonic(&spec, state.mean(), omega, hbar).unwrap();
            assert_relative_eq!(harmonic.v2_total, expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn pure_formula_agrees_with_general_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..50 {
            let n = rng.gen_range(1..=3);
            let state = oracle::random_pure_state(&mut rng, n, 1.0);
            let generator = oracle::random_generator(&mut rng, n, 1.0);
            let general = speed_unitary(&state, &generator).unwrap();
            let pure = speed_unitary_pure(&state, &generator).unwrap();
            assert_relative_eq!(general.v2_total, pure.v2_total, epsilon = 1e-10);
            assert_relative_eq!(general.v2_cov, pure.v2_cov, epsilon = 1e-10);
            assert_relative_eq!(general.v2_mean, pure.v2_mean, epsilon = 1e-10);
        }
    }

    #[test]
    fn pure_formula_rejects_mixed_states() {
        let spec = SqueezeSpec::single(0.3, 0.0).unwrap();
        let state = GaussianState::thermal_squeezed(1.0, 1.0, &spec, 1.0).unwrap();
        let generator = QuadraticGenerator::harmonic(1, 1.0);
        match speed_unitary_pure(&state, &generator) {
            Err(Error::Precondition(message)) => assert!(message.contains("nu")),
            other => panic!("expected a precondition error, got {other:?}"),
        }
    }

    #[test]
    fn harmonic_form_matches_general_formula_on_multimode_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for _ in 0..25 {
            let n = rng.gen_range(1..=4);
            let r: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.2)).collect();
            let theta: Vec<f64> =
                (0..n).map(|_| rng.gen_range(0.0..std::f64::consts::PI)).collect();
            let spec = SqueezeSpec::new(r.clone(), theta.clone()).unwrap();
            let v = DVector::from_fn(2 * n, |_, _| rng.gen_range(-1.5..1.5));
            let omega = rng.gen_range(0.5..2.0);
            let hbar = rng.gen_range(0.5..2.0);
            let state = GaussianState::pure_squeezed(&spec, hbar)
                .unwrap()
                .displace(&(spec.rotation() * &v))
                .unwrap();
            let generator = QuadraticGenerator::harmonic(n, omega);
            let general = speed_unitary(&state, &generator).unwrap();
            let fast = speed_harmonic(&spec, &v, omega, hbar).unwrap();
            assert_relative_eq!(general.v2_total, fast.v2_total, epsilon = 1e-10);
            assert_relative_eq!(general.v2_cov, fast.v2_cov, epsilon = 1e-10);
        }
    }

    #[test]
    fn harmonic_speed_of_one_squeezed_mode() {
        let spec = SqueezeSpec::single(1.0, 0.0).unwrap();
        let report = speed_harmonic(&spec, &DVector::zeros(2), 2.0, 1.0).unwrap();
        assert_relative_eq!(report.v2_total, 2.762195691083631, epsilon = 1e-12);
    }

    #[test]
    fn harmonic_rejects_bad_arguments() {
        let spec = SqueezeSpec::single(0.1, 0.0).unwrap();
        assert!(speed_harmonic(&spec, &DVector::zeros(2), -1.0, 1.0).is_err());
        assert!(speed_harmonic(&spec, &DVector::zeros(2), 1.0, 0.0).is_err());
        assert!(speed_harmonic(&spec, &DVector::zeros(4), 1.0, 1.0).is_err());
    }

    #[test]
    fn single_mode_closed_form_special_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..20 {
            let delta = rng.gen_range(0.0..std::f64::consts::PI);
            let g0 = rng.gen_range(0.0..2.0);
            let g_s = rng.gen_range(0.0..2.0);
            // No squeezing: only the shear weight moves the state.
            assert_relative_eq!(
                speed_single_mode(0.0, delta, g0, g_s),
                0.5 * g_s * g_s,
                epsilon = 1e-12
            );
            // No shear: the orientation is irrelevant.
            let r = rng.gen_range(0.0..2.0);
            assert_relative_eq!(
                speed_single_mode(r, delta, g0, 0.0),
                0.5 * g0 * g0 * r.sinh().powi(2),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn single_mode_peak_value_at_balanced_weights() {
        let r = 0.35f64;
        let g0 = r.tanh();
        let v2 = speed_single_mode(r, 3.0 * std::f64::consts::FRAC_PI_4, g0, 1.0);
        assert_relative_eq!(v2, 0.6985947522171609, epsilon = 1e-12);
        assert_relative_eq!(v2, (g0 * g0 + 1.0) * (2.0 * r).cosh() / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn single_mode_form_matches_general_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        for _ in 0..40 {
            let r = rng.gen_range(0.0..2.0);
            let theta = rng.gen_range(0.0..std::f64::consts::PI);
            let phi = rng.gen_range(0.0..std::f64::consts::PI);
            let g0 = rng.gen_range(0.0..1.5);
            let g_s = rng.gen_range(0.0..1.5);
            let hbar = rng.gen_range(0.5..2.0);
            let spec = SqueezeSpec::single(r, theta).unwrap();
            let state = if rng.gen_bool(0.5) {
                GaussianState::pure_squeezed(&spec, hbar).unwrap()
            } else {
                GaussianState::thermal_squeezed(rng.gen_range(0.5..3.0), 1.0, &spec, hbar).unwrap()
            };
            let generator = QuadraticGenerator::single_mode(g0, g_s, phi);
            let general = speed_unitary(&state, &generator).unwrap();
            let closed = speed_single_mode(r, theta - phi, g0, g_s);
            assert_relative_eq!(general.v2_cov, closed, epsilon = 1e-10);
        }
    }

    #[test]
    fn extrema_on_the_rigid_branch() {
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        let report = single_mode_extrema(2.0, inv_sqrt2, inv_sqrt2).unwrap();
        assert!(!report.branch);
        assert_relative_eq!(report.v2_max, 13.649537508286059, epsilon = 1e-12);
        assert_relative_eq!(report.v2_min, 0.004578909722183545, epsilon = 1e-12);
        assert_eq!(report.delta_critical.len(), 2);
        assert_relative_eq!(
            speed_single_mode(2.0, std::f64::consts::FRAC_PI_4, inv_sqrt2, inv_sqrt2),
            report.v2_min,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            speed_single_mode(2.0, 3.0 * std::f64::consts::FRAC_PI_4, inv_sqrt2, inv_sqrt2),
            report.v2_max,
            epsilon = 1e-12
        );
    }

    #[test]
    fn extrema_on_the_degenerate_branch() {
        let report = single_mode_extrema(1.0, 0.0, 1.0).unwrap();
        assert!(report.branch);
        assert_relative_eq!(report.v2_min, 0.5, epsilon = 1e-14);
        assert_eq!(report.delta_critical.len(), 4);
        assert_relative_eq!(report.delta_critical[0], 0.0, epsilon = 1e-14);
        assert_relative_eq!(report.delta_critical[2], std::f64::consts::FRAC_PI_2, epsilon = 1e-14);
        // The extra minima sit at sin(2 delta) = 0 for every r.
        let other = single_mode_extrema(2.5, 0.0, 1.0).unwrap();
        assert_relative_eq!(other.v2_min, 0.5, epsilon = 1e-14);
        assert_relative_eq!(other.delta_critical[0], 0.0, epsilon = 1e-14);
    }

    #[test]
    fn minimum_vanishes_when_shear_balances_squeeze() {
        // gS/g0 = tanh r lets the two terms of the speed cancel at
        // delta = pi/4.
        let r = 0.8f64;
        let g0 = 1.3;
        let g_s = g0 * r.tanh();
        let report = single_mode_extrema(r, g0, g_s).unwrap();
        assert!(!report.branch);
        assert!(report.v2_min.abs() <= 1e-14);
        assert!(speed_single_mode(r, std::f64::consts::FRAC_PI_4, g0, g_s).abs() <= 1e-14);
    }

    #[test]
    fn extrema_boundary_between_branches_is_continuous() {
        let r = 0.9f64;
        let g_s = 1.1;
        let g0 = g_s * r.tanh();
        let on = single_mode_extrema(r, g0, g_s).unwrap();
        let off = single_mode_extrema(r, g0 * (1.0 + 1e-9), g_s).unwrap();
        assert!(on.branch);
        assert!(!off.branch);
        assert_relative_eq!(on.v2_min, off.v2_min, epsilon = 1e-7);
        assert_relative_eq!(
            on.v2_max,
            (g0 * g0 + g_s * g_s) * (2.0 * r).cosh() / 2.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn extrema_reject_degenerate_and_negative_inputs() {
        assert!(matches!(single_mode_extrema(1.0, 0.0, 0.0), Err(Error::InvalidArgument(_))));
        assert!(single_mode_extrema(-0.1, 1.0, 1.0).is_err());
        assert!(single_mode_extrema(1.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn open_speed_with_zero_rate_reduces_to_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(35);
        for _ in 0..20 {
            let n = rng.gen_range(1..=2);
            let state = oracle::random_state(&mut rng, n, 1.0, (1.0, 2.0));
            let generator = oracle::random_generator(&mut rng, n, 1.0);
            let dynamics =
                OpenDynamics::new(&generator, 0.0, &DMatrix::zeros(2 * n, 2 * n)).unwrap();
            let open = speed_open(&state, &dynamics).unwrap();
            let unitary = speed_unitary(&state, &generator).unwrap();
            assert_relative_eq!(open.v2_total, unitary.v2_total, epsilon = 1e-12);
            assert_relative_eq!(open.v2_cov, unitary.v2_cov, epsilon = 1e-12);
            if n == 1 {
                assert_relative_eq!(open.v2_unitary.unwrap(), open.v2_cov, epsilon = 1e-10);
                assert_relative_eq!(open.chi_nu.unwrap(), 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn stationary_state_has_zero_speed() {
        // Sigma = eta I with G = omega I and M = Sigma is a fixed point:
        // the rotation leaves Sigma invariant and damping balances
        // diffusion.
        let spec = SqueezeSpec::single(0.0, 0.0).unwrap();
        let state = GaussianState::thermal_squeezed(0.7, 1.0, &spec, 1.0).unwrap();
        let generator = QuadraticGenerator::harmonic(1, 1.4);
        let dynamics = OpenDynamics::new(&generator, 0.9, state.covariance()).unwrap();
        let report = speed_open(&state, &dynamics).unwrap();
        assert_relative_eq!(report.v2_total, 0.0, epsilon = 1e-13);
        assert!(report.tau_q.is_infinite());
    }

    #[test]
    fn split_sums_to_the_trace_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(36);
        for _ in 0..40 {
            let state = oracle::random_state(&mut rng, 1, 1.0, (1.0, 3.0));
            let generator = oracle::random_generator(&mut rng, 1, 1.0);
            let shape = {
                let raw = DMatrix::from_fn(2, 2, |_, _| rng.gen_range(-1.0..1.0f64));
                crate::linalg::symmetrize(&(&raw * raw.transpose()))
            };
            let rate = rng.gen_range(0.0..2.0);
            let dynamics = OpenDynamics::new(&generator, rate, &shape).unwrap();
            let report = speed_open(&state, &dynamics).unwrap();
            let (v2_unitary, chi_nu) = speed_open_split(&state, &dynamics).unwrap();
            let scale = 1.0 + report.v2_cov.abs() + v2_unitary.abs() + chi_nu.abs();
            assert!((v2_unitary + chi_nu - report.v2_cov).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn split_requires_a_single_mode() {
        let state = GaussianState::vacuum(2, 1.0).unwrap();
        let generator = QuadraticGenerator::harmonic(2, 1.0);
        let dynamics = OpenDynamics::new(&generator, 0.5, &DMatrix::identity(4, 4)).unwrap();
        assert!(matches!(speed_open_split(&state, &dynamics), Err(Error::Precondition(_))));
        let report = speed_open(&state, &dynamics).unwrap();
        assert!(report.v2_unitary.is_none());
        assert!(report.chi_nu.is_none());
    }

    #[test]
    fn thermal_state_unitary_part_vanishes_under_harmonic_drive() {
        let spec = SqueezeSpec::single(0.0, 0.0).unwrap();
        let generator = QuadraticGenerator::harmonic(1, 1.3);
        let shape = DMatrix::from_row_slice(2, 2, &[2.0, 0.3, 0.3, 1.5]);
        let dynamics = OpenDynamics::new(&generator, 0.8, &shape).unwrap();
        for beta_s in [0.2, 1.0, 5.0] {
            let state = GaussianState::thermal_squeezed(beta_s, 1.3, &spec, 1.0).unwrap();
            let (v2_unitary, _) = speed_open_split(&state, &dynamics).unwrap();
            assert!(v2_unitary.abs() <= 1e-12, "got {v2_unitary}");
        }
    }

    #[test]
    fn dissipative_correction_approaches_its_plateau() {
        // Sigma^{-1} M -> 0 leaves chi_nu -> g^2/8.
        let eta = 1e8;
        let state =
            GaussianState::from_parts(DMatrix::identity(2, 2) * eta, DVector::zeros(2), 1.0)
                .unwrap();
        let generator = QuadraticGenerator::single_mode(0.7, 0.4, 0.3);
        let shape = DMatrix::from_row_slice(2, 2, &[1.1, 0.2, 0.2, 0.9]);
        let rate = 1.6;
        let dynamics = OpenDynamics::new(&generator, rate, &shape).unwrap();
        let state_ref = state;
        let (_, chi_nu) = speed_open_split(&state_ref, &dynamics).unwrap();
        assert_relative_eq!(chi_nu, rate * rate / 8.0, epsilon = 1e-6);
        let high = chi_nu_high_temp(&state_ref, &dynamics).unwrap();
        assert_relative_eq!(high, rate * rate / 8.0, epsilon = 1e-6);
    }

    #[test]
    fn high_temp_form_drops_exactly_the_second_order_term() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..25 {
            let state = oracle::random_state(&mut rng, 1, 1.0, (1.5, 4.0));
            let generator = oracle::random_generator(&mut rng, 1, 1.0);
            let shape = {
                let raw = DMatrix::from_fn(2, 2, |_, _| rng.gen_range(-1.0..1.0f64));
                crate::linalg::symmetrize(&(&raw * raw.transpose()))
            };
            let rate = rng.gen_range(0.1..2.0);
            let dynamics = OpenDynamics::new(&generator, rate, &shape).unwrap();
            let (_, exact) = speed_open_split(&state, &dynamics).unwrap();
            let high = chi_nu_high_temp(&state, &dynamics).unwrap();
            let chol = crate::linalg::spd_cholesky(state.covariance(), "sigma").unwrap();
            let ratio = chol.solve(&shape);
            let dropped = rate * rate / 16.0 * (&ratio * &ratio).trace();
            assert_relative_eq!(exact - high, dropped, epsilon = 1e-12, max_relative = 1e-10);
        }
    }

    #[test]
    fn high_temp_error_shrinks_quadratically_with_temperature() {
        let generator = QuadraticGenerator::single_mode(0.6, 0.9, 0.4);
        let shape = DMatrix::from_row_slice(2, 2, &[1.4, -0.2, -0.2, 1.1]);
        let dynamics = OpenDynamics::new(&generator, 1.2, &shape).unwrap();
        let error_at = |eta: f64| -> f64 {
            let state = GaussianState::from_parts(
                DMatrix::from_row_slice(2, 2, &[1.3 * eta, 0.2 * eta, 0.2 * eta, 0.8 * eta]),
                DVector::zeros(2),
                1.0,
            )
            .unwrap();
            let (_, exact) = speed_open_split(&state, &dynamics).unwrap();
            (exact - chi_nu_high_temp(&state, &dynamics).unwrap()).abs()
        };
        let (e1, e2) = (error_at(50.0), error_at(100.0));
        assert!(e1 / e2 >= 3.5, "expected quadratic decay, got ratio {}", e1 / e2);
    }

    #[test]
    fn high_temp_form_reproduces_the_thermal_closed_form() {
        // For a thermal state under the damped-oscillator dynamics with
        // omega = gamma, the high-temperature correction collapses to
        // (gamma^2/2)(1 - x) with x = tanh(beta_S omega / 2) / beta_B.
        let omega = 1.0;
        let gamma = 1.0;
        let beta_b = 0.1;
        let params = QbmParams::new(omega, gamma, beta_b).unwrap();
        let dynamics = qbm_dynamics(&params).unwrap();
        let spec = SqueezeSpec::single(0.0, 0.0).unwrap();
        for beta_s in [0.3, 1.0, 2.5] {
            let state = GaussianState::thermal_squeezed(beta_s, omega, &spec, 1.0).unwrap();
            let x = (0.5 * beta_s * omega).tanh() / beta_b;
            let expected = 0.5 * gamma * gamma * (1.0 - x);
            let high = chi_nu_high_temp(&state, &dynamics).unwrap();
            assert_relative_eq!(high, expected, epsilon = 1e-12, max_relative = 1e-12);
        }
    }

    #[test]
    fn closed_forms_match_the_fidelity_derivative() {
        // Independent certificate: V^2 from the closed forms equals the
        // curvature of the fidelity between nearby states on the actual
        // evolution.
        let spec = SqueezeSpec::single(0.6, 0.3).unwrap();
        let state = GaussianState::pure_squeezed(&spec, 1.0)
            .unwrap()
            .displace(&DVector::from_vec(vec![0.5, -0.2]))
            .unwrap();
        let generator = QuadraticGenerator::single_mode(0.8, 1.1, 0.9);
        let closed = speed_unitary(&state, &generator).unwrap().v2_total;
        let fd = oracle::finite_difference_speed_squared(
            |t| {
                let s = crate::symplectic::propagator(&generator, t)?;
                GaussianState::from_parts(
                    s.matrix() * state.covariance() * s.matrix().transpose(),
                    s.matrix() * state.mean(),
                    state.hbar(),
                )
            },
            0.0,
        )
        .unwrap();
        assert_relative_eq!(closed, fd, max_relative = 1e-6);
    }

    #[test]
    fn large_register_maps_onto_one_squeezed_mode() {
        let n = 100;
        let spec = SqueezeSpec::new(vec![0.1; n], vec![0.0; n]).unwrap();
        let means = DVector::zeros(2 * n);
        let map = large_n_equivalents(&spec, &means, 1.0, n).unwrap();
        assert_relative_eq!(map.r_equivalent, 0.8825521963165199, epsilon = 1e-12);
        assert_relative_eq!(map.hbar_eff, 0.007065174768107601, epsilon = 1e-12);
        assert!(map.r_equivalent >= 0.1);
    }

    #[test]
    fn equivalent_squeezing_grows_as_root_n_when_small() {
        let n = 100;
        let r = 1e-3;
        let spec = SqueezeSpec::new(vec![r; n], vec![0.0; n]).unwrap();
        let map = large_n_equivalents(&spec, &DVector::zeros(2 * n), 1.0, n).unwrap();
        assert_relative_eq!(map.r_equivalent, (n as f64).sqrt() * r, max_relative = 1e-4);
    }

    #[test]
    fn unsqueezed_register_rescales_hbar_by_the_mode_count() {
        let n = 8;
        let spec = SqueezeSpec::new(vec![0.0; n], vec![0.0; n]).unwrap();
        let map = large_n_equivalents(&spec, &DVector::zeros(2 * n), 2.0, n).unwrap();
        assert_relative_eq!(map.r_equivalent, 0.0, epsilon = 1e-15);
        assert_relative_eq!(map.hbar_eff, 2.0 / n as f64, epsilon = 1e-15);
    }

    #[test]
    fn single_mode_register_maps_to_itself() {
        let spec = SqueezeSpec::single(0.7, 0.2).unwrap();
        let means = DVector::from_vec(vec![0.3, -0.4]);
        let map = large_n_equivalents(&spec, &means, 1.0, 1).unwrap();
        assert_relative_eq!(map.r_equivalent, 0.7, epsilon = 1e-14);
        assert_relative_eq!(map.hbar_eff, 1.0 / 0.7f64.cosh(), epsilon = 1e-14);
    }

    #[test]
    fn equivalence_map_rejects_mismatched_lengths() {
        let spec = SqueezeSpec::single(0.1, 0.0).unwrap();
        assert!(large_n_equivalents(&spec, &DVector::zeros(2), 1.0, 2).is_err());
        assert!(large_n_equivalents(&spec, &DVector::zeros(4), 1.0, 1).is_err());
        assert!(large_n_equivalents(&spec, &DVector::zeros(2), 0.0, 1).is_err());
    }

    #[test]
    fn report_serializes_with_fixed_field_set() {
        let report = SpeedReport::assemble(0.25, 0.5, Some((0.25, 0.0)));
        assert_eq!(
            json(&report),
            "{\"v2_total\":0.75,\"v2_cov\":0.25,\"v2_mean\":0.5,\
             \"v2_unitary\":0.25,\"chi_nu\":0.0,\"tau_q\":1.1547005383792517}"
        );
    }

    #[test]
    fn stationary_report_serializes_infinite_time_as_string() {
        let report = SpeedReport::assemble(0.0, 0.0, None);
        assert_eq!(
            json(&report),
            "{\"v2_total\":0.0,\"v2_cov\":0.0,\"v2_mean\":0.0,\"tau_q\":\"inf\"}"
        );
    }
}
