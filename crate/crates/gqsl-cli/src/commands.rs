//! The six subcommands. Each returns the fully rendered artifact so the
//! binary's only side effects are the final write and stderr warnings —
//! identical configurations produce byte-identical output.

use gqsl::dynamics::{self, OpenDynamics, QbmParams};
use gqsl::speed::{self, speed_open, speed_unitary};
use gqsl::states::GaussianState;
use gqsl::symplectic::QuadraticGenerator;
use nalgebra::DVector;
use rayon::prelude::*;
use std::f64::consts::PI;

use crate::config::{
    signed_squeeze, CaseSpec, ConfiguredDynamics, ScenarioConfig, SweepScale, SweepSpec,
};
use crate::output::{fmt_float, CsvDocument};
use crate::CliError;

/// Default angle-grid intervals for `fig2` (the acceptance grid puts
/// 3π/4 exactly on a node).
pub const DEFAULT_SAMPLES: usize = 256;

/// Prints a stderr warning when the dynamics are not a completely
/// positive channel (for one damped mode: shape determinant below one).
/// The artifact on stdout is unaffected.
fn warn_if_not_cp(dynamics: &OpenDynamics) {
    if !dynamics.is_completely_positive() {
        let detail = match dynamics.isotropic_form() {
            Some(form) if dynamics.modes() == 1 => {
                let m = &form.shape;
                let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
                format!("det M = {det:.3e} < 1")
            }
            _ => format!("test-matrix eigenvalue {:.3e} < 0", dynamics.cp_defect()),
        };
        eprintln!(
            "warning: dynamics are not a completely positive channel ({detail}); \
             high-temperature model, results are still well defined"
        );
    }
}

/// Instantaneous speed of the configured state under the configured
/// dynamics, as a one-line JSON report.
pub fn cmd_speed(config: &ScenarioConfig) -> Result<String, CliError> {
    let state = config.build_state()?;
    let report = match config.build_dynamics()? {
        ConfiguredDynamics::Unitary(generator) => speed_unitary(&state, &generator)?,
        ConfiguredDynamics::Open(dynamics) => {
            warn_if_not_cp(&dynamics);
            speed_open(&state, &dynamics)?
        }
    };
    let json = serde_json::to_string(&report)
        .map_err(|e| CliError::Numerical(format!("report serialization: {e}")))?;
    Ok(format!("{json}\n"))
}

fn default_cases(r: f64) -> Vec<CaseSpec> {
    let th = r.tanh();
    vec![
        CaseSpec { g0: th, g_s: 1.0 },
        CaseSpec { g0: 1.0, g_s: th },
        CaseSpec { g0: 1.0, g_s: 1.0 },
        CaseSpec { g0: 1.0, g_s: 0.0 },
    ]
}

/// Normalized single-mode speed profiles `V²(δ)/V²_max` over
/// `δ ∈ [0, π]`, one column per generator case.
pub fn cmd_fig2(config: &ScenarioConfig, hash: &str) -> Result<String, CliError> {
    let r = match &config.r {
        Some(value) => value.as_scalar()?,
        None => 0.35,
    };
    let samples = config.samples.unwrap_or(DEFAULT_SAMPLES);
    if samples < 32 {
        return Err(CliError::Config(format!("fig2 needs at least 32 samples, got {samples}")));
    }
    let cases = match &config.cases {
        Some(cases) => cases.clone(),
        None => default_cases(r),
    };
    if cases.is_empty() {
        return Err(CliError::Config("fig2 needs at least one case".into()));
    }
    let norms: Vec<f64> = cases
        .iter()
        .map(|case| Ok(speed::single_mode_extrema(r, case.g0, case.g_s)?.v2_max))
        .collect::<Result<_, CliError>>()?;

    let rows: Vec<Vec<f64>> = (0..=samples)
        .into_par_iter()
        .map(|j| {
            let delta = j as f64 * PI / samples as f64;
            let mut row = Vec::with_capacity(cases.len() + 1);
            row.push(delta);
            for (case, norm) in cases.iter().zip(&norms) {
                let v2 = speed::speed_single_mode(r, delta, case.g0, case.g_s);
                row.push(if *norm > 0.0 { v2 / norm } else { 0.0 });
            }
            row
        })
        .collect();

    let mut doc = CsvDocument::new("fig2", hash);
    doc.comment(&format!("r={}", fmt_float(r)));
    for (k, case) in cases.iter().enumerate() {
        doc.comment(&format!(
            "case{}: g0={} gS={}",
            k + 1,
            fmt_float(case.g0),
            fmt_float(case.g_s)
        ));
    }
    let mut columns = vec!["delta".to_string()];
    columns.extend((1..=cases.len()).map(|k| format!("case{k}")));
    doc.header(&columns);
    for row in rows {
        doc.row(&row);
    }
    Ok(doc.finish())
}

fn fig3_defaults(mode: &str) -> Result<(SweepSpec, f64), CliError> {
    match mode {
        "system-sweep" => Ok((
            SweepSpec {
                param: "beta_s".into(),
                from: 1e-2,
                to: 10.0,
                points: 60,
                scale: SweepScale::Log,
            },
            10.0,
        )),
        "bath-sweep" => Ok((
            SweepSpec {
                param: "beta_b".into(),
                from: 1e-3,
                to: 0.3,
                points: 60,
                scale: SweepScale::Log,
            },
            1.0,
        )),
        other => Err(CliError::Config(format!(
            "fig3 mode must be system-sweep or bath-sweep, got \"{other}\""
        ))),
    }
}

/// Speed-limit time `τ = 1/V_cov` of squeezed thermal states under the
/// damped-oscillator dynamics, swept over the system or bath temperature.
pub fn cmd_fig3(config: &ScenarioConfig, hash: &str) -> Result<String, CliError> {
    let mode = config
        .mode
        .as_deref()
        .ok_or_else(|| CliError::Config("fig3 needs --mode system-sweep|bath-sweep".into()))?;
    let (default_sweep, default_fixed) = fig3_defaults(mode)?;
    let sweep = config.sweep.clone().unwrap_or(default_sweep.clone());
    if sweep.param != default_sweep.param {
        return Err(CliError::Config(format!(
            "fig3 {mode} sweeps \"{}\", config sweeps \"{}\"",
            default_sweep.param, sweep.param
        )));
    }
    let mut grid = sweep.grid()?;
    if let Some(points) = config.samples {
        grid = SweepSpec { points, ..sweep }.grid()?;
    }
    if grid.iter().any(|beta| *beta <= 0.0) {
        return Err(CliError::Config("fig3 needs positive inverse temperatures".into()));
    }
    let fixed = config.fixed.unwrap_or(default_fixed);
    if fixed <= 0.0 {
        return Err(CliError::Config(format!(
            "fixed inverse temperature must be positive, got {fixed}"
        )));
    }
    let gamma = config.gamma.unwrap_or(1.0);
    let omega = config.omega.unwrap_or(1.0);
    let r_values = config.r.as_ref().map(|r| r.as_list()).unwrap_or(vec![0.0, 0.1, -0.1]);
    if r_values.is_empty() {
        return Err(CliError::Config("fig3 needs at least one r value".into()));
    }

    let split = |beta: f64| -> (f64, f64) {
        match mode {
            "system-sweep" => (beta, fixed),
            _ => (fixed, beta),
        }
    };
    let tau = |r: f64, beta: f64| -> Result<f64, CliError> {
        let (beta_s, beta_b) = split(beta);
        let spec = signed_squeeze(r, 0.0)?;
        let state = GaussianState::thermal_squeezed(beta_s, omega, &spec, 1.0)?;
        let params = QbmParams::new(omega, gamma, beta_b)?;
        let dynamics = dynamics::qbm_dynamics(&params)?;
        let report = speed_open(&state, &dynamics)?;
        Ok(1.0 / report.v2_cov.sqrt())
    };

    // One representative warning; the CP status of this model does not
    // depend on the swept temperature's sign of det M.
    let (_, beta_b0) = split(grid[0]);
    warn_if_not_cp(&dynamics::qbm_dynamics(&QbmParams::new(omega, gamma, beta_b0)?)?);

    let rows: Vec<Vec<f64>> = grid
        .par_iter()
        .map(|beta| {
            let mut row = Vec::with_capacity(r_values.len() + 1);
            row.push(*beta);
            for r in &r_values {
                row.push(tau(*r, *beta)?);
            }
            Ok(row)
        })
        .collect::<Result<_, CliError>>()?;

    let mut doc = CsvDocument::new("fig3", hash);
    doc.comment(&format!(
        "mode={mode} fixed={} gamma={} omega={}",
        fmt_float(fixed),
        fmt_float(gamma),
        fmt_float(omega)
    ));
    let mut columns = vec!["beta".to_string()];
    columns.extend(r_values.iter().map(|r| format!("tau_r={r}")));
    doc.header(&columns);
    for row in rows {
        doc.row(&row);
    }
    Ok(doc.finish())
}

fn scaling_defaults(limit: &str) -> Result<SweepSpec, CliError> {
    match limit {
        "hbar" => Ok(SweepSpec {
            param: "hbar".into(),
            from: 1e-3,
            to: 1.0,
            points: 25,
            scale: SweepScale::Log,
        }),
        "squeezing" => Ok(SweepSpec {
            param: "squeezing".into(),
            from: 0.1,
            to: 4.0,
            points: 25,
            scale: SweepScale::Linear,
        }),
        "modes" => Ok(SweepSpec {
            param: "modes".into(),
            from: 2.0,
            to: 256.0,
            points: 8,
            scale: SweepScale::Log,
        }),
        other => Err(CliError::Config(format!(
            "scaling limit must be hbar, squeezing, or modes, got \"{other}\""
        ))),
    }
}

fn squeezing_weights(r: f64) -> (f64, f64) {
    let th = r.tanh();
    let c = 1.0 / (1.0 + th * th).sqrt();
    (th * c, c)
}

/// `param,v2_total` sweeps exposing the asymptotic growth laws: speed
/// versus Planck constant (slope −1), squeezing (`V² = cosh 2r / 2` at
/// the optimal angle with unit-norm weights), and mode count (slope +1).
pub fn cmd_scaling(config: &ScenarioConfig, hash: &str) -> Result<String, CliError> {
    let limit = config.limit.as_deref().ok_or_else(|| {
        CliError::Config("scaling needs a limit: hbar, squeezing, or modes".into())
    })?;
    let default_sweep = scaling_defaults(limit)?;
    let mut sweep = config.sweep.clone().unwrap_or(default_sweep.clone());
    if sweep.param != default_sweep.param {
        return Err(CliError::Config(format!(
            "scaling {limit} expects sweep param \"{}\", got \"{}\"",
            default_sweep.param, sweep.param
        )));
    }
    if let Some(points) = config.samples {
        sweep.points = points;
    }
    let grid = sweep.grid()?;

    let v2_at = |param: f64| -> Result<f64, CliError> {
        match limit {
            "hbar" => {
                let state = GaussianState::vacuum(1, param)?
                    .displace(&DVector::from_vec(vec![1.0, 0.0]))?;
                let generator = QuadraticGenerator::harmonic(1, 1.0);
                Ok(speed_unitary(&state, &generator)?.v2_total)
            }
            "squeezing" => {
                let spec = signed_squeeze(param, 3.0 * PI / 4.0)?;
                let state = GaussianState::pure_squeezed(&spec, 1.0)?;
                let (g0, g_s) = squeezing_weights(param);
                let generator = QuadraticGenerator::single_mode(g0, g_s, 0.0);
                Ok(speed_unitary(&state, &generator)?.v2_total)
            }
            _ => {
                let n = param.round().max(1.0) as usize;
                let spec = gqsl::states::SqueezeSpec::new(vec![0.1; n], vec![0.0; n])?;
                let mut v = DVector::zeros(2 * n);
                for k in 0..n {
                    v[2 * k] = 1.0;
                }
                Ok(speed::speed_harmonic(&spec, &v, 1.0, 1.0)?.v2_total)
            }
        }
    };

    let rows: Vec<Vec<f64>> = grid
        .par_iter()
        .map(|param| {
            let p = if limit == "modes" { param.round().max(1.0) } else { *param };
            Ok(vec![p, v2_at(*param)?])
        })
        .collect::<Result<_, CliError>>()?;

    let mut doc = CsvDocument::new("scaling", hash);
    doc.comment(&format!("limit={limit}"));
    doc.header(&["param".to_string(), "v2_total".to_string()]);
    for row in rows {
        doc.row(&row);
    }
    Ok(doc.finish())
}

/// Integrates the configured dynamics and dumps the trajectory — speeds,
/// purity, angle from the start, accumulated path length — with the
/// speed-limit times for the full horizon in a comment line.
pub fn cmd_evolve(config: &ScenarioConfig, hash: &str) -> Result<String, CliError> {
    let state = config.build_state()?;
    let t = config.t.ok_or_else(|| CliError::Config("evolve needs \"t\" (horizon)".into()))?;
    if !(t > 0.0) {
        return Err(CliError::Config(format!("horizon must be positive, got {t}")));
    }
    let dt = config.dt.unwrap_or(1e-3);
    if !(dt > 0.0) {
        return Err(CliError::Config(format!("dt must be positive, got {dt}")));
    }
    let dynamics = match config.build_dynamics()? {
        ConfiguredDynamics::Unitary(generator) => OpenDynamics::new(
            &generator,
            0.0,
            &nalgebra::DMatrix::zeros(2 * generator.modes(), 2 * generator.modes()),
        )?,
        ConfiguredDynamics::Open(dynamics) => {
            warn_if_not_cp(&dynamics);
            dynamics
        }
    };
    let trajectory = dynamics::evolve_open(&state, &dynamics, t, dt)?;
    let times = dynamics::qsl_times(&trajectory, t)?;

    let mut doc = CsvDocument::new("evolve", hash);
    doc.comment(&format!(
        "qsl tau_q={} tau_1={} tau_2={}",
        fmt_float(times.tau_q),
        fmt_float(times.tau_1),
        fmt_float(times.tau_2)
    ));
    doc.push_raw(&trajectory.to_csv());
    Ok(doc.finish())
}
