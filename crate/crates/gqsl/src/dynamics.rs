//! Time evolution of Gaussian states: unitary propagation, open Gaussian
//! (Lindblad-type) dynamics with the damped-oscillator specialization,
//! trajectory recording, the path-length bound, and the speed-limit times.
//!
//! Open dynamics drive the first two moments through the linear system
//!
//! ```text
//! dSigma/dt = B Sigma + Sigma B^T + D,      du/dt = B u,
//! ```
//!
//! with drift `B = Omega(G + F)` (`F` antisymmetric) and diffusion
//! `D >= 0`. The single-mode damped form uses `F = (g/2) Omega`, i.e.
//! `B = Omega G - (g/2) I` and `D = g M` for a dissipation rate `g` and a
//! symmetric shape matrix `M`. The symbol `g` here is always the
//! dissipation rate; the single-mode Hamiltonian weights keep their own
//! names `g0` and `gS` (overall scale `g0^2 + gS^2`).

use nalgebra::{DMatrix, DVector};

use crate::metric;
use crate::speed::{speed_open, SpeedReport};
use crate::states::GaussianState;
use crate::symplectic::{self, QuadraticGenerator};
use crate::{linalg, Error, Result};

/// Complete positivity is declared when the Lindblad test matrix has no
/// eigenvalue below this (negated) tolerance.
pub const CP_TOL: f64 = 1e-10;

/// Accumulated step-halving error allowed per unit of integrated time.
pub const ERROR_BUDGET_PER_UNIT_TIME: f64 = 1e-8;

/// Slack below which the path-length bound counts as violated.
pub const BOUND_SLACK_TOL: f64 = 1e-8;

/// Bisection tolerance (in time) for the second speed-limit time.
pub const TAU2_TIME_TOL: f64 = 1e-10;

/// The damped parametrization `(G, g, M)` of an open dynamics:
/// `B = Omega G - (g/2) I`, `D = g M`.
#[derive(Debug, Clone)]
pub struct IsotropicForm {
    /// Hamiltonian generator.
    pub generator: QuadraticGenerator,
    /// Isotropic dissipation rate `g >= 0`.
    pub dissipation_rate: f64,
    /// Symmetric diffusion shape `M = D / g`.
    pub shape: DMatrix<f64>,
}

/// Generator of an open Gaussian evolution, stored as drift and diffusion,
/// with the damped `(G, g, M)` form kept alongside whenever it exists.
#[derive(Debug, Clone)]
pub struct OpenDynamics {
    n: usize,
    drift: DMatrix<f64>,
    diffusion: DMatrix<f64>,
    form: Option<IsotropicForm>,
}

impl OpenDynamics {
    /// Builds the damped form: drift `Omega G - (g/2) I`, diffusion `g M`.
    ///
    /// `M` must be symmetric (within the covariance symmetry tolerance) and
    /// the rate nonnegative. `M` is *not* required to satisfy the complete
    /// positivity condition `det M >= 1` (single mode): physically printed
    /// models violate it, so CP status is reported by [`Self::cp_defect`]
    /// instead of enforced here.
    pub fn new(
        generator: &QuadraticGenerator,
        dissipation_rate: f64,
        shape: &DMatrix<f64>,
    ) -> Result<Self> {
        if !(dissipation_rate >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "dissipation rate must be nonnegative, got {dissipation_rate}"
            )));
        }
        let n = generator.modes();
        if shape.nrows() != 2 * n || shape.ncols() != 2 * n {
            return Err(Error::InvalidArgument(format!(
                "shape matrix is {}x{}, expected {}x{}",
                shape.nrows(),
                shape.ncols(),
                2 * n,
                2 * n
            )));
        }
        let defect = linalg::asymmetry(shape);
        if defect > crate::states::SYMMETRY_TOL * (1.0 + shape.norm()) {
            return Err(Error::InvalidArgument(format!(
                "shape matrix is not symmetric: defect {defect:.6e}"
            )));
        }
        let shape = linalg::symmetrize(shape);
        let drift =
            generator.drift() - DMatrix::<f64>::identity(2 * n, 2 * n) * (dissipation_rate / 2.0);
        let diffusion = &shape * dissipation_rate;
        Ok(OpenDynamics {
            n,
            drift,
            diffusion,
            form: Some(IsotropicForm { generator: generator.clone(), dissipation_rate, shape }),
        })
    }

    /// Builds dynamics from a raw drift and symmetric diffusion matrix.
    ///
    /// For one mode the damped `(G, g, M)` form is recovered whenever it
    /// exists (the antisymmetric part of `Omega^T B` is proportional to
    /// `Omega` there, so only a negative recovered rate, or zero rate with
    /// nonzero diffusion, leaves the form undefined).
    pub fn from_drift_diffusion(drift: DMatrix<f64>, diffusion: DMatrix<f64>) -> Result<Self> {
        let d = drift.nrows();
        if drift.ncols() != d || d == 0 || !d.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "drift must be square with even dimension, got {}x{}",
                drift.nrows(),
                drift.ncols()
            )));
        }
        if diffusion.shape() != (d, d) {
            return Err(Error::InvalidArgument(format!(
                "diffusion is {}x{}, expected {d}x{d}",
                diffusion.nrows(),
                diffusion.ncols()
            )));
        }
        let defect = linalg::asymmetry(&diffusion);
        if defect > crate::states::SYMMETRY_TOL * (1.0 + diffusion.norm()) {
            return Err(Error::InvalidArgument(format!(
                "diffusion matrix is not symmetric: defect {defect:.6e}"
            )));
        }
        let diffusion = linalg::symmetrize(&diffusion);
        let n = d / 2;
        let form = if n == 1 {
            let omega = symplectic::omega(1);
            let p = omega.transpose() * &drift;
            // Omega^T B = G + (g/2) Omega, so the symmetric part is G and
            // the antisymmetric part fixes the rate.
            let rate = p[(0, 1)] - p[(1, 0)];
            let generator = QuadraticGenerator::new(linalg::symmetrize(&p))?;
            if rate > 0.0 {
                Some(IsotropicForm { generator, dissipation_rate: rate, shape: &diffusion / rate })
            } else if rate >= -1e-14 && diffusion.norm() <= 1e-14 {
                Some(IsotropicForm {
                    generator,
                    dissipation_rate: 0.0,
                    shape: DMatrix::zeros(2, 2),
                })
            } else {
                None
            }
        } else {
            None
        };
        Ok(OpenDynamics { n, drift, diffusion, form })
    }

    /// Number of modes the dynamics act on.
    pub fn modes(&self) -> usize {
        self.n
    }

    /// Drift matrix `B`.
    pub fn drift(&self) -> &DMatrix<f64> {
        &self.drift
    }

    /// Diffusion matrix `D`.
    pub fn diffusion(&self) -> &DMatrix<f64> {
        &self.diffusion
    }

    /// The damped `(G, g, M)` form, when it exists.
    pub fn isotropic_form(&self) -> Option<&IsotropicForm> {
        self.form.as_ref()
    }

    /// Smallest eigenvalue of the Lindblad test matrix
    /// `D + i Omega B_a Omega^T`, `B_a = Omega^T B - B^T Omega`. The
    /// evolution is a completely positive Gaussian channel iff this is
    /// nonnegative; for one damped mode that reduces to `det M >= 1`.
    pub fn cp_defect(&self) -> f64 {
        let omega = symplectic::omega(self.n);
        let c = &self.drift * omega.transpose() - &omega * self.drift.transpose();
        linalg::min_hermitian_eigenvalue(&self.diffusion, &c)
    }

    /// Whether [`Self::cp_defect`] clears `-`[`CP_TOL`].
    pub fn is_completely_positive(&self) -> bool {
        self.cp_defect() >= -CP_TOL
    }
}

/// Parameters of the damped-oscillator (quantum Brownian motion) model in
/// its high-temperature form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QbmParams {
    omega: f64,
    gamma: f64,
    beta_b: f64,
}

impl QbmParams {
    /// Oscillator frequency, damping rate, and inverse bath temperature,
    /// all strictly positive.
    pub fn new(omega: f64, gamma: f64, beta_b: f64) -> Result<Self> {
        if !(omega > 0.0) || !(gamma > 0.0) || !(beta_b > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "all parameters must be positive, got omega = {omega}, gamma = {gamma}, \
                 beta_B = {beta_b}"
            )));
        }
        Ok(QbmParams { omega, gamma, beta_b })
    }

    /// Oscillator frequency.
    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Damping rate.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Inverse bath temperature.
    pub fn beta_b(&self) -> f64 {
        self.beta_b
    }

    /// Normal diffusion coefficient
    /// `Delta = gamma/beta_B + 12 gamma (omega^2 - gamma^2)/beta_B`,
    /// implemented exactly as printed in its source. (Both terms carry
    /// 1/beta_B; standard treatments differ here — see the project notes.)
    pub fn delta(&self) -> f64 {
        self.gamma / self.beta_b
            + 12.0 * self.gamma * (self.omega * self.omega - self.gamma * self.gamma) / self.beta_b
    }

    /// Anomalous diffusion coefficient `Pi = -gamma beta_B / 12`.
    pub fn pi_coefficient(&self) -> f64 {
        -self.gamma * self.beta_b / 12.0
    }

    /// Diffusion shape `M = (1/gamma) [[Delta, -Pi/2], [-Pi/2, 0]]`. Its
    /// determinant is `-Pi^2/(4 gamma^2) < 0`, so this model never passes
    /// the generic complete-positivity test at finite bath temperature.
    pub fn shape(&self) -> DMatrix<f64> {
        let delta = self.delta();
        let off = -self.pi_coefficient() / 2.0;
        DMatrix::from_row_slice(2, 2, &[delta, off, off, 0.0]) / self.gamma
    }

    /// Dissipation rate `g = 2 gamma`.
    pub fn dissipation_rate(&self) -> f64 {
        2.0 * self.gamma
    }
}

/// Maps the damped-oscillator parameters onto [`OpenDynamics`] with
/// `G = omega I`, `g = 2 gamma`, and the printed shape matrix. Callers
/// wanting to surface the (always failing) complete-positivity status of
/// this model should consult [`OpenDynamics::cp_defect`] on the result.
pub fn qbm_dynamics(params: &QbmParams) -> Result<OpenDynamics> {
    let generator = QuadraticGenerator::harmonic(1, params.omega());
    OpenDynamics::new(&generator, params.dissipation_rate(), &params.shape())
}

/// Closed-form squared covariance speed of the thermal (unsqueezed) state
/// with inverse temperature `beta_S` under the damped-oscillator dynamics:
///
/// ```text
/// V^2 = (gamma^2/2)(1 - x + x^2/2),    x = tanh(beta_S omega/2) / beta_B,
/// ```
///
/// the leading behaviour at small `beta_B`. At `beta_S -> 0` it plateaus
/// at `gamma^2/2`; at fixed `beta_S` it grows as `1/beta_B^2`.
pub fn qbm_speed_closed_form(beta_s: f64, beta_b: f64, omega: f64, gamma: f64) -> f64 {
    let x = (0.5 * beta_s * omega).tanh() / beta_b;
    0.5 * gamma * gamma * (1.0 - x + 0.5 * x * x)
}

/// Evolves a state for time `t` under the quadratic Hamiltonian with
/// generator `G`: `Sigma -> S Sigma S^T`, `u -> S u` with
/// `S = exp(Omega G t)`. Purity is preserved.
pub fn evolve_unitary(
    state: &GaussianState,
    generator: &QuadraticGenerator,
    t: f64,
) -> Result<GaussianState> {
    if state.modes() != generator.modes() {
        return Err(Error::InvalidArgument(format!(
            "state has {} modes but generator has {}",
            state.modes(),
            generator.modes()
        )));
    }
    let s = symplectic::propagator(generator, t)?;
    GaussianState::from_parts(
        s.matrix() * state.covariance() * s.matrix().transpose(),
        s.matrix() * state.mean(),
        state.hbar(),
    )
}

/// A time-ordered record of an open evolution: states, speeds, the angle
/// to the initial state, and the accumulated path length `2 ∫ V dt`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<GaussianState>,
    speeds: Vec<SpeedReport>,
    purity: Vec<f64>,
    theta_from_start: Vec<f64>,
    path_length: Vec<f64>,
}

impl Trajectory {
    /// Sample times, uniformly spaced from 0.
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// State at each sample time.
    pub fn states(&self) -> &[GaussianState] {
        &self.states
    }

    /// Instantaneous speed report at each sample time.
    pub fn speeds(&self) -> &[SpeedReport] {
        &self.speeds
    }

    /// Purity at each sample time.
    pub fn purity(&self) -> &[f64] {
        &self.purity
    }

    /// Angle `Theta(rho_0, rho_t)` at each sample time.
    pub fn theta_from_start(&self) -> &[f64] {
        &self.theta_from_start
    }

    /// Cumulative path length `2 ∫_0^t V dt'` at each sample time
    /// (composite Simpson on the sample grid).
    pub fn path_length(&self) -> &[f64] {
        &self.path_length
    }

    /// Number of samples (at least one; the initial state is always
    /// recorded).
    pub fn len(&self) -> usize {
        self.times.len()
    }

    /// True only for a trajectory stripped of samples, which this module
    /// never produces.
    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Renders the trajectory as CSV with 17-significant-digit floats,
    /// header `t,purity,v2_total,v2_cov,v2_mean,theta_from_start,
    /// path_length`.
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("t,purity,v2_total,v2_cov,v2_mean,theta_from_start,path_length\n");
        for i in 0..self.len() {
            let row = [
                self.times[i],
                self.purity[i],
                self.speeds[i].v2_total,
                self.speeds[i].v2_cov,
                self.speeds[i].v2_mean,
                self.theta_from_start[i],
                self.path_length[i],
            ];
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

fn moment_derivatives(
    dynamics: &OpenDynamics,
    sigma: &DMatrix<f64>,
    u: &DVector<f64>,
) -> (DMatrix<f64>, DVector<f64>) {
    (
        dynamics.drift() * sigma + sigma * dynamics.drift().transpose() + dynamics.diffusion(),
        dynamics.drift() * u,
    )
}

fn rk4_step(
    dynamics: &OpenDynamics,
    sigma: &DMatrix<f64>,
    u: &DVector<f64>,
    h: f64,
) -> (DMatrix<f64>, DVector<f64>) {
    let (k1s, k1u) = moment_derivatives(dynamics, sigma, u);
    let (k2s, k2u) =
        moment_derivatives(dynamics, &(sigma + &k1s * (h / 2.0)), &(u + &k1u * (h / 2.0)));
    let (k3s, k3u) =
        moment_derivatives(dynamics, &(sigma + &k2s * (h / 2.0)), &(u + &k2u * (h / 2.0)));
    let (k4s, k4u) = moment_derivatives(dynamics, &(sigma + &k3s * h), &(u + &k3u * h));
    (
        sigma + (k1s + k2s * 2.0 + k3s * 2.0 + k4s) * (h / 6.0),
        u + (k1u + k2u * 2.0 + k3u * 2.0 + k4u) * (h / 6.0),
    )
}

/// Integrates the open dynamics from `state` over `[0, t]` with a
/// classical fixed-step fourth-order scheme, sampling every `dt` (the step
/// is rounded so an integer number of steps lands exactly on `t`).
///
/// After each step the covariance is symmetrized and the state validated;
/// a physicality violation, or a step-halving error estimate above
/// [`ERROR_BUDGET_PER_UNIT_TIME`], aborts with the failure time. The
/// recorded samples are the full-step results; the half-step solution only
/// feeds the error estimate.
pub fn evolve_open(
    state: &GaussianState,
    dynamics: &OpenDynamics,
    t: f64,
    dt: f64,
) -> Result<Trajectory> {
    if state.modes() != dynamics.modes() {
        return Err(Error::InvalidArgument(format!(
            "state has {} modes but the dynamics have {}",
            state.modes(),
            dynamics.modes()
        )));
    }
    if !(dt > 0.0) || !(t >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need dt > 0 and t >= 0, got dt = {dt}, t = {t}"
        )));
    }
    let steps = ((t / dt).round() as usize).max(usize::from(t > 0.0));
    let h = if steps > 0 { t / steps as f64 } else { 0.0 };

    let mut states = Vec::with_capacity(steps + 1);
    let mut speeds = Vec::with_capacity(steps + 1);
    let mut purity = Vec::with_capacity(steps + 1);
    let mut theta_from_start = Vec::with_capacity(steps + 1);
    speeds.push(speed_open(state, dynamics)?);
    purity.push(state.purity());
    theta_from_start.push(0.0);
    states.push(state.clone());

    let mut sigma = state.covariance().clone_owned();
    let mut u = state.mean().clone_owned();
    let mut error_accumulated = 0.0;
    for step in 0..steps {
        let (full_sigma, full_u) = rk4_step(dynamics, &sigma, &u, h);
        let (mid_sigma, mid_u) = rk4_step(dynamics, &sigma, &u, h / 2.0);
        let (halved_sigma, halved_u) = rk4_step(dynamics, &mid_sigma, &mid_u, h / 2.0);
        error_accumulated +=
            ((&full_sigma - halved_sigma).norm() + (&full_u - halved_u).norm()) / 15.0;
        let elapsed = (step + 1) as f64 * h;
        if error_accumulated > ERROR_BUDGET_PER_UNIT_TIME * elapsed {
            return Err(Error::IntegrationFailure {
                t: elapsed,
                message: format!(
                    "step-halving error estimate {error_accumulated:.6e} exceeds the budget \
                     {:.6e}; reduce dt",
                    ERROR_BUDGET_PER_UNIT_TIME * elapsed
                ),
            });
        }
        sigma = linalg::symmetrize(&full_sigma);
        u = full_u;
        let sample = GaussianState::from_parts(sigma.clone(), u.clone(), state.hbar()).map_err(
            |source| Error::IntegrationFailure {
                t: elapsed,
                message: format!("state left the physical set: {source}"),
            },
        )?;
        speeds.push(speed_open(&sample, dynamics)?);
        purity.push(sample.purity());
        theta_from_start.push(metric::fidelity(state, &sample)?.angle());
        states.push(sample);
    }

    let doubled: Vec<f64> = speeds.iter().map(|r| 2.0 * r.v2_total.sqrt()).collect();
    let path_length = linalg::cumulative_simpson(&doubled, h);
    let times = (0..=steps).map(|i| i as f64 * h).collect();
    Ok(Trajectory { times, states, speeds, purity, theta_from_start, path_length })
}

/// Evolves the open dynamics to time `t` in one shot through the exact
/// solution of the affine moment equations (matrix exponential of the
/// augmented vectorized system). Serves as an integrator-independent
/// cross-check for [`evolve_open`].
pub fn evolve_open_exact(
    state: &GaussianState,
    dynamics: &OpenDynamics,
    t: f64,
) -> Result<GaussianState> {
    if state.modes() != dynamics.modes() {
        return Err(Error::InvalidArgument(format!(
            "state has {} modes but the dynamics have {}",
            state.modes(),
            dynamics.modes()
        )));
    }
    let d = 2 * state.modes();
    let eye = DMatrix::<f64>::identity(d, d);
    let lift = eye.kronecker(dynamics.drift()) + dynamics.drift().kronecker(&eye);
    let mut augmented = DMatrix::<f64>::zeros(d * d + 1, d * d + 1);
    augmented.view_mut((0, 0), (d * d, d * d)).copy_from(&lift);
    for (i, value) in dynamics.diffusion().iter().enumerate() {
        augmented[(i, d * d)] = *value;
    }
    let propagated = (augmented * t).exp();
    let mut sigma_vec = DVector::<f64>::zeros(d * d);
    for (i, value) in state.covariance().iter().enumerate() {
        sigma_vec[i] = *value;
    }
    let block = propagated.view((0, 0), (d * d, d * d));
    let inhomogeneous = propagated.view((0, d * d), (d * d, 1));
    let evolved_vec = block * sigma_vec + inhomogeneous;
    let sigma = DMatrix::from_column_slice(d, d, evolved_vec.as_slice());
    let u = (dynamics.drift() * t).exp() * state.mean();
    GaussianState::from_parts(linalg::symmetrize(&sigma), u, state.hbar())
}

/// The three speed-limit times for a trajectory at a chosen endpoint.
///
/// All three are built from the half-angle `theta = arccos sqrt(F)` =
/// `Theta/2`, whose growth rate along the path is the speed `V`; with it,
/// `tau_1 <= t` and `tau_2 <= t` are the path-length bound rearranged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QslTimes {
    /// Characteristic time `1/V` at the start of the trajectory.
    pub tau_q: f64,
    /// `theta(rho_0, rho_t) · t / ∫_0^t V dt'`.
    pub tau_1: f64,
    /// Smallest `s` with `∫_0^s V dt' = theta(rho_0, rho_t)`.
    pub tau_2: f64,
}

/// Evaluates the speed-limit times at the trajectory sample nearest to
/// `t` (which must lie inside the sampled range).
///
/// `tau_2` is found by bisection on the piecewise-linear interpolant of
/// the cumulative Simpson speed integral, which is monotone, to
/// [`TAU2_TIME_TOL`] in time; ties resolve to the smallest root.
pub fn qsl_times(trajectory: &Trajectory, t: f64) -> Result<QslTimes> {
    let times = trajectory.times();
    let t_end = *times.last().expect("trajectories always hold samples");
    let h = if times.len() > 1 { times[1] - times[0] } else { 0.0 };
    if !(0.0..=t_end + 0.5 * h).contains(&t) {
        return Err(Error::InvalidArgument(format!(
            "t = {t} lies outside the sampled range [0, {t_end}]"
        )));
    }
    let index = if h > 0.0 { ((t / h).round() as usize).min(times.len() - 1) } else { 0 };
    let t_snap = times[index];
    let theta_half = 0.5 * trajectory.theta_from_start()[index];
    let tau_q = trajectory.speeds()[0].tau_q;

    let integral = |i: usize| trajectory.path_length()[i] / 2.0;
    let total = integral(index);
    if total <= f64::EPSILON * index as f64 {
        if theta_half > 1e-12 {
            return Err(Error::InconsistentTrajectory(format!(
                "state moved by half-angle {theta_half:.6e} while the recorded speed integral \
                 vanished"
            )));
        }
        return Ok(QslTimes { tau_q, tau_1: 0.0, tau_2: 0.0 });
    }
    let tau_1 = theta_half * t_snap / total;

    let excess = theta_half - total;
    if excess > 0.5 * BOUND_SLACK_TOL {
        return Err(Error::BoundViolation { t: t_snap, excess: 2.0 * excess });
    }
    let tau_2 = if excess >= 0.0 {
        t_snap
    } else {
        let cumulative = |s: f64| -> f64 {
            let clamped = s.clamp(0.0, t_snap);
            let cell = ((clamped / h).floor() as usize).min(index.saturating_sub(1));
            let frac = (clamped - times[cell]) / h;
            integral(cell) + frac * (integral(cell + 1) - integral(cell))
        };
        linalg::bisect_first_true(|s| cumulative(s) >= theta_half, 0.0, t_snap, TAU2_TIME_TOL)
    };
    Ok(QslTimes { tau_q, tau_1, tau_2 })
}

/// Slack of the path-length bound `Theta(rho_0, rho_t) <= 2 ∫_0^t V dt'`
/// over a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    /// Largest slack `2∫V - Theta` over the samples.
    pub max_slack: f64,
    /// Time at which the largest slack occurs.
    pub max_slack_time: f64,
    /// Smallest slack over the samples (at least `-`[`BOUND_SLACK_TOL`]).
    pub min_slack: f64,
    /// Time at which the smallest slack occurs.
    pub min_slack_time: f64,
}

/// Checks the path-length bound at every sample of a trajectory (at least
/// three samples required) and reports the extremal slacks. A sample whose
/// angle exceeds the path length by more than [`BOUND_SLACK_TOL`] is a
/// genuine violation — evidence of a defect in the fidelity or speed
/// evaluation — and fails with its location.
pub fn check_bound(trajectory: &Trajectory) -> Result<BoundReport> {
    if trajectory.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "bound checking needs at least 3 samples, got {}",
            trajectory.len()
        )));
    }
    let mut report = BoundReport {
        max_slack: f64::NEG_INFINITY,
        max_slack_time: 0.0,
        min_slack: f64::INFINITY,
        min_slack_time: 0.0,
    };
    for i in 0..trajectory.len() {
        let slack = trajectory.path_length()[i] - trajectory.theta_from_start()[i];
        let time = trajectory.times()[i];
        if slack < -BOUND_SLACK_TOL {
            return Err(Error::BoundViolation { t: time, excess: -slack });
        }
        if slack > report.max_slack {
            report.max_slack = slack;
            report.max_slack_time = time;
        }
        if slack < report.min_slack {
            report.min_slack = slack;
            report.min_slack_time = time;
        }
    }
    Ok(report)
}
