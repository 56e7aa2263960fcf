//! Built-in verification battery. Every check compares an implementation
//! route against an independent one — a phase-space integral, a
//! finite-difference derivative of the fidelity, or an algebraic identity
//! — on seeded random draws, so a run is deterministic and a failure is
//! reproducible.

use gqsl::dynamics::{
    self, check_bound, evolve_open, evolve_open_exact, evolve_unitary, qbm_dynamics, qsl_times,
    OpenDynamics, QbmParams,
};
use gqsl::oracle::{self, GridSpec};
use gqsl::speed::{
    speed_harmonic, speed_open, speed_open_split, speed_single_mode, speed_unitary,
    speed_unitary_pure,
};
use gqsl::states::{GaussianState, SqueezeSpec};
use gqsl::symplectic::QuadraticGenerator;
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

const FIDELITY_ORACLE_TOL: f64 = 1e-6;
const SPEED_FD_TOL: f64 = 1e-5;
const IDENTITY_TOL: f64 = 1e-10;
const SPEED_FLOOR: f64 = 1e-2;

struct Table {
    lines: Vec<String>,
    checks: usize,
    failures: usize,
}

impl Table {
    fn new() -> Self {
        Table { lines: Vec::new(), checks: 0, failures: 0 }
    }

    fn record(&mut self, name: &str, outcome: Result<String, String>) {
        self.checks += 1;
        match outcome {
            Ok(detail) => self.lines.push(format!("[ ok ] {name} - {detail}")),
            Err(reason) => {
                self.failures += 1;
                self.lines.push(format!("[FAIL] {name} - {reason}"));
            }
        }
    }

    fn finish(mut self) -> (String, bool) {
        let ok = self.failures == 0;
        self.lines.push(if ok {
            format!("selftest: {} checks, all passed", self.checks)
        } else {
            format!("selftest: {} checks, {} FAILED", self.checks, self.failures)
        });
        (self.lines.join("\n") + "\n", ok)
    }
}

fn describe(err: gqsl::Error) -> String {
    format!("aborted: {err}")
}

/// Runs every check and renders the report. `oracle_grid` overrides the
/// phase-space quadrature resolution (default 512 points per axis); a grid
/// too coarse to stabilize the integral fails the fidelity check.
pub fn run_selftest(oracle_grid: Option<usize>) -> (String, bool) {
    let mut table = Table::new();
    table.record("fidelity-oracle", fidelity_against_phase_space(oracle_grid));
    table.record("speed-fd-unitary", fd_unitary_mixed());
    table.record("speed-fd-pure", fd_pure_single_mode());
    table.record("speed-fd-open", fd_damped_oscillator());
    table.record("closed-forms", closed_form_equivalences());
    table.record("split-identity", unitary_dissipative_split());
    table.record("bound-unitary", bound_unitary_trajectory());
    table.record("bound-open", bound_damped_trajectory());
    table.finish()
}

/// Closed-form fidelity versus direct numerical overlap of the two Wigner
/// functions on a grid.
fn fidelity_against_phase_space(oracle_grid: Option<usize>) -> Result<String, String> {
    let points = oracle_grid.unwrap_or(512);
    let mut rng = ChaCha8Rng::seed_from_u64(71);
    let mut worst = 0.0f64;
    for _ in 0..4 {
        let a = oracle::random_state(&mut rng, 1, 1.0, (1.05, 1.5));
        let b = oracle::random_state(&mut rng, 1, 1.0, (1.05, 1.5));
        let closed = gqsl::metric::fidelity(&a, &b).map_err(describe)?.fidelity();
        let grid = GridSpec { points, half_width_sigmas: 8.0 };
        let numeric = oracle::phase_space_fidelity(&a, &b, grid).map_err(describe)?;
        worst = worst.max((closed - numeric).abs());
    }
    if worst <= FIDELITY_ORACLE_TOL {
        Ok(format!("4 random single-mode pairs, max |dF| = {worst:.2e}"))
    } else {
        Err(format!("phase-space overlap deviates by {worst:.2e} > {FIDELITY_ORACLE_TOL:.0e}"))
    }
}

fn relative_gap(formula: f64, fd: f64) -> f64 {
    (formula - fd).abs() / formula.max(1.0e-300)
}

fn fd_report(worst: f64, trials: usize, what: &str) -> Result<String, String> {
    if worst <= SPEED_FD_TOL {
        Ok(format!("{trials} {what}, max rel gap = {worst:.2e}"))
    } else {
        Err(format!("finite-difference gap {worst:.2e} > {SPEED_FD_TOL:.0e} on {what}"))
    }
}

/// General mixed-state speed formula versus the fidelity derivative along
/// the exact propagated flow, two modes.
fn fd_unitary_mixed() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(72);
    let mut worst = 0.0f64;
    for _ in 0..3 {
        let (state, generator, v2) = loop {
            let state = oracle::random_state(&mut rng, 2, 1.0, (1.05, 1.6));
            let generator = oracle::random_generator(&mut rng, 2, 0.8);
            let v2 = speed_unitary(&state, &generator).map_err(describe)?.v2_total;
            if v2 >= SPEED_FLOOR {
                break (state, generator, v2);
            }
        };
        let fd =
            oracle::finite_difference_speed_squared(|t| evolve_unitary(&state, &generator, t), 0.0)
                .map_err(describe)?;
        worst = worst.max(relative_gap(v2, fd));
    }
    fd_report(worst, 3, "random two-mode mixed flows")
}

/// Pure-state formula versus the fidelity derivative, one squeezed mode.
fn fd_pure_single_mode() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(73);
    let mut worst = 0.0f64;
    for _ in 0..3 {
        let (state, generator, v2) = loop {
            let r = rng.gen_range(0.2..1.0);
            let theta = rng.gen_range(0.0..PI);
            let spec = SqueezeSpec::single(r, theta).map_err(describe)?;
            let state = GaussianState::pure_squeezed(&spec, 1.0).map_err(describe)?;
            let generator = QuadraticGenerator::single_mode(
                rng.gen_range(0.3..1.2),
                rng.gen_range(0.3..1.2),
                rng.gen_range(0.0..PI),
            );
            let v2 = speed_unitary_pure(&state, &generator).map_err(describe)?.v2_total;
            if v2 >= SPEED_FLOOR {
                break (state, generator, v2);
            }
        };
        let fd =
            oracle::finite_difference_speed_squared(|t| evolve_unitary(&state, &generator, t), 0.0)
                .map_err(describe)?;
        worst = worst.max(relative_gap(v2, fd));
    }
    fd_report(worst, 3, "random squeezed pure flows")
}

/// Open-dynamics trace formula versus the fidelity derivative along the
/// exactly integrated damped-oscillator flow.
fn fd_damped_oscillator() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(74);
    let mut worst = 0.0f64;
    for _ in 0..3 {
        let beta_s = rng.gen_range(0.5..2.0);
        let r = rng.gen_range(0.0..0.3);
        // Equal oscillator and damping rates keep the relaxation slow
        // enough for the fixed differencing step to resolve.
        let gamma = rng.gen_range(0.7..1.3);
        let beta_b = rng.gen_range(0.05..0.3);
        let spec = SqueezeSpec::single(r, 0.0).map_err(describe)?;
        let state = GaussianState::thermal_squeezed(beta_s, gamma, &spec, 1.0).map_err(describe)?;
        let params = QbmParams::new(gamma, gamma, beta_b).map_err(describe)?;
        let dynamics = qbm_dynamics(&params).map_err(describe)?;
        let v2 = speed_open(&state, &dynamics).map_err(describe)?.v2_total;
        if v2 < SPEED_FLOOR {
            return Err(format!("draw produced a near-stationary flow (v2 = {v2:.3e})"));
        }
        let fd = oracle::finite_difference_speed_squared(
            |t| evolve_open_exact(&state, &dynamics, t),
            0.0,
        )
        .map_err(describe)?;
        worst = worst.max(relative_gap(v2, fd));
    }
    fd_report(worst, 3, "random damped-oscillator flows")
}

/// The pure-state, harmonic-register, and single-mode shortcuts all agree
/// with the general formula on their domains.
fn closed_form_equivalences() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(75);
    let mut worst = 0.0f64;
    for _ in 0..30 {
        // Pure shortcut, two modes.
        let state = oracle::random_pure_state(&mut rng, 2, 1.0);
        let generator = oracle::random_generator(&mut rng, 2, 0.8);
        let general = speed_unitary(&state, &generator).map_err(describe)?.v2_total;
        let pure = speed_unitary_pure(&state, &generator).map_err(describe)?.v2_total;
        worst = worst.max((general - pure).abs() / general.max(1.0));

        // Harmonic-register shortcut, three modes.
        let n = 3;
        let r: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..0.8)).collect();
        let theta: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..PI)).collect();
        let spec = SqueezeSpec::new(r, theta).map_err(describe)?;
        let v = DVector::from_fn(2 * n, |_, _| rng.gen_range(-1.0..1.0));
        let u = spec.rotation() * &v;
        let state = GaussianState::pure_squeezed(&spec, 1.0)
            .and_then(|s| s.displace(&u))
            .map_err(describe)?;
        let omega = rng.gen_range(0.5..1.5);
        let generator = QuadraticGenerator::harmonic(n, omega);
        let general = speed_unitary(&state, &generator).map_err(describe)?.v2_total;
        let fast = speed_harmonic(&spec, &v, omega, 1.0).map_err(describe)?.v2_total;
        worst = worst.max((general - fast).abs() / general.max(1.0));

        // Single-mode closed form.
        let r = rng.gen_range(0.0..1.5);
        let theta = rng.gen_range(0.0..PI);
        let phi = rng.gen_range(0.0..PI);
        let (g0, g_s) = (rng.gen_range(0.0..1.5), rng.gen_range(0.0..1.5));
        let spec = SqueezeSpec::single(r, theta).map_err(describe)?;
        let state = GaussianState::pure_squeezed(&spec, 1.0).map_err(describe)?;
        let generator = QuadraticGenerator::single_mode(g0, g_s, phi);
        let general = speed_unitary(&state, &generator).map_err(describe)?.v2_total;
        let closed = speed_single_mode(r, theta - phi, g0, g_s);
        worst = worst.max((general - closed).abs() / general.max(1.0));
    }
    if worst <= IDENTITY_TOL {
        Ok(format!("30 draws x 3 shortcut routes, max rel gap = {worst:.2e}"))
    } else {
        Err(format!("a shortcut deviates from the general formula by {worst:.2e}"))
    }
}

/// For one damped mode the covariance speed splits exactly into a unitary
/// part plus a dissipative correction.
fn unitary_dissipative_split() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(76);
    let mut worst = 0.0f64;
    for _ in 0..30 {
        let state = oracle::random_state(&mut rng, 1, 1.0, (1.1, 2.0));
        let generator = oracle::random_generator(&mut rng, 1, 1.0);
        let rate = rng.gen_range(0.2..1.5);
        let m00 = rng.gen_range(0.8..2.5);
        let m11 = rng.gen_range(0.8..2.5);
        let m01 = rng.gen_range(-0.5..0.5);
        let shape = nalgebra::dmatrix![m00, m01; m01, m11];
        let dynamics = OpenDynamics::new(&generator, rate, &shape).map_err(describe)?;
        let total = speed_open(&state, &dynamics).map_err(describe)?.v2_cov;
        let (v2_unitary, chi_nu) = speed_open_split(&state, &dynamics).map_err(describe)?;
        worst = worst.max((v2_unitary + chi_nu - total).abs() / total.max(1.0));
    }
    if worst <= IDENTITY_TOL {
        Ok(format!("30 random damped modes, max rel gap = {worst:.2e}"))
    } else {
        Err(format!("split parts miss the trace formula by {worst:.2e}"))
    }
}

fn bound_holds(trajectory: &dynamics::Trajectory, horizon: f64) -> Result<String, String> {
    let report = check_bound(trajectory).map_err(describe)?;
    let times = qsl_times(trajectory, horizon).map_err(describe)?;
    let slack = 1e-9;
    if times.tau_1 > horizon + slack || times.tau_2 > horizon + slack {
        return Err(format!(
            "limit times exceed the horizon: tau_1 = {:.6}, tau_2 = {:.6}, t = {horizon}",
            times.tau_1, times.tau_2
        ));
    }
    Ok(format!(
        "min slack {:.2e} at t = {:.3}; tau_1 = {:.4}, tau_2 = {:.4} <= t = {horizon}",
        report.min_slack, report.min_slack_time, times.tau_1, times.tau_2
    ))
}

/// Path length versus displacement along a squeezed unitary flow.
fn bound_unitary_trajectory() -> Result<String, String> {
    let spec = SqueezeSpec::single(0.5, 0.0).map_err(describe)?;
    let state = GaussianState::pure_squeezed(&spec, 1.0).map_err(describe)?;
    let generator = QuadraticGenerator::single_mode(0.3, 1.0, 0.6);
    let quiet = nalgebra::DMatrix::zeros(2, 2);
    let dynamics = OpenDynamics::new(&generator, 0.0, &quiet).map_err(describe)?;
    let trajectory = evolve_open(&state, &dynamics, 2.0, 1e-3).map_err(describe)?;
    bound_holds(&trajectory, 2.0)
}

/// Path length versus displacement along a thermalizing damped flow.
fn bound_damped_trajectory() -> Result<String, String> {
    let spec = SqueezeSpec::single(0.2, 0.0).map_err(describe)?;
    let state = GaussianState::thermal_squeezed(1.0, 1.0, &spec, 1.0).map_err(describe)?;
    let params = QbmParams::new(1.0, 1.0, 0.1).map_err(describe)?;
    let dynamics = qbm_dynamics(&params).map_err(describe)?;
    let trajectory = evolve_open(&state, &dynamics, 2.0, 1e-3).map_err(describe)?;
    bound_holds(&trajectory, 2.0)
}
