//! Scenario configuration: the JSON document accepted by every
//! subcommand, flag merging (flags win over the file), construction of
//! library objects from the validated document, and the canonical hash
//! stamped into CSV provenance lines.

use gqsl::dynamics::{qbm_dynamics, OpenDynamics, QbmParams};
use gqsl::states::{GaussianState, SqueezeSpec, StateDescriptor};
use gqsl::symplectic::QuadraticGenerator;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

/// A quadratic generator, either by its single-mode weights or as a full
/// symmetric matrix (row-major, any mode count).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GeneratorSpec {
    /// `{"g0": …, "gS": …, "phi": …}` (phi defaults to 0).
    Components(GeneratorComponents),
    /// `[[…], …]`: the matrix itself.
    Matrix(Vec<Vec<f64>>),
}

/// Single-mode generator weights: number-preserving `g0`, squeezing `gS`
/// at angle `phi`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorComponents {
    pub g0: f64,
    #[serde(rename = "gS")]
    pub g_s: f64,
    #[serde(default)]
    pub phi: f64,
}

impl GeneratorSpec {
    pub fn build(&self) -> Result<QuadraticGenerator, CliError> {
        match self {
            GeneratorSpec::Components(c) => Ok(QuadraticGenerator::single_mode(c.g0, c.g_s, c.phi)),
            GeneratorSpec::Matrix(rows) => {
                let g = matrix_from_rows(rows, "generator")?;
                QuadraticGenerator::new(g).map_err(CliError::config)
            }
        }
    }
}

/// Damped open dynamics `{g, M}`: isotropic dissipation rate and the
/// symmetric diffusion shape matrix. Pairs with a `generator`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpenSpec {
    pub g: f64,
    #[serde(rename = "M")]
    pub shape: Vec<Vec<f64>>,
}

/// Damped-oscillator bath parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QbmSpec {
    pub omega: f64,
    pub gamma: f64,
    #[serde(rename = "beta_B")]
    pub beta_b: f64,
}

/// One fig2 case: generator weights swept over the relative angle.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseSpec {
    pub g0: f64,
    #[serde(rename = "gS")]
    pub g_s: f64,
}

/// Sweep grid description.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub param: String,
    pub from: f64,
    pub to: f64,
    pub points: usize,
    pub scale: SweepScale,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepScale {
    Linear,
    Log,
}

impl SweepSpec {
    /// The grid points, ordered from `from` to `to`.
    pub fn grid(&self) -> Result<Vec<f64>, CliError> {
        if self.points < 2 {
            return Err(CliError::Config(format!(
                "sweep needs at least 2 points, got {}",
                self.points
            )));
        }
        if self.scale == SweepScale::Log && (self.from <= 0.0 || self.to <= 0.0) {
            return Err(CliError::Config(format!(
                "log sweeps need positive endpoints, got [{}, {}]",
                self.from, self.to
            )));
        }
        let m = (self.points - 1) as f64;
        Ok((0..self.points)
            .map(|i| {
                if i == 0 {
                    return self.from;
                }
                if i == self.points - 1 {
                    return self.to;
                }
                let s = i as f64 / m;
                match self.scale {
                    SweepScale::Linear => self.from + s * (self.to - self.from),
                    SweepScale::Log => (self.from.ln() + s * (self.to.ln() - self.from.ln())).exp(),
                }
            })
            .collect())
    }
}

/// A number or a list of numbers, for parameters that some commands read
/// as a scalar (fig2's `r`) and others as a list (fig3's `r`).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarOrList {
    Scalar(f64),
    List(Vec<f64>),
}

impl ScalarOrList {
    pub fn as_scalar(&self) -> Result<f64, CliError> {
        match self {
            ScalarOrList::Scalar(v) => Ok(*v),
            ScalarOrList::List(l) if l.len() == 1 => Ok(l[0]),
            ScalarOrList::List(l) => Err(CliError::Config(format!(
                "expected a single r value, got a list of {}",
                l.len()
            ))),
        }
    }

    pub fn as_list(&self) -> Vec<f64> {
        match self {
            ScalarOrList::Scalar(v) => vec![*v],
            ScalarOrList::List(l) => l.clone(),
        }
    }
}

/// The scenario document. All keys are optional; each subcommand
/// validates the subset it needs. Unknown keys are rejected.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<StateDescriptor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub open: Option<OpenSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qbm: Option<QbmSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<ScalarOrList>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cases: Option<Vec<CaseSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
}

impl ScenarioConfig {
    /// Parses a JSON document, rejecting unknown keys.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))
    }

    /// Reads and parses a config file.
    pub fn from_file(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// First 16 hex characters of the SHA-256 of the canonical (sorted-key,
    /// compact) JSON form. Stamped into provenance lines so identical
    /// effective configurations yield identical artifacts.
    pub fn canonical_hash(&self) -> String {
        let value = serde_json::to_value(self).expect("config serializes");
        let canonical = value.to_string();
        let digest = Sha256::digest(canonical.as_bytes());
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        hex[..16].to_string()
    }

    /// The configured state (required).
    pub fn build_state(&self) -> Result<GaussianState, CliError> {
        let descriptor =
            self.state.as_ref().ok_or_else(|| CliError::Config("missing \"state\"".into()))?;
        descriptor.build().map_err(CliError::config)
    }

    /// The configured dynamics: `generator` alone means unitary motion,
    /// `generator` + `open` the damped form, `qbm` the damped-oscillator
    /// model (self-contained; combining it with the others is rejected).
    pub fn build_dynamics(&self) -> Result<ConfiguredDynamics, CliError> {
        match (&self.generator, &self.open, &self.qbm) {
            (_, _, Some(_)) if self.generator.is_some() || self.open.is_some() => Err(
                CliError::Config("\"qbm\" is self-contained; drop \"generator\"/\"open\"".into()),
            ),
            (_, _, Some(qbm)) => {
                let params =
                    QbmParams::new(qbm.omega, qbm.gamma, qbm.beta_b).map_err(CliError::config)?;
                let dynamics = qbm_dynamics(&params).map_err(CliError::config)?;
                Ok(ConfiguredDynamics::Open(dynamics))
            }
            (Some(gen), Some(open), None) => {
                let generator = gen.build()?;
                let shape = matrix_from_rows(&open.shape, "open.M")?;
                let dynamics =
                    OpenDynamics::new(&generator, open.g, &shape).map_err(CliError::config)?;
                Ok(ConfiguredDynamics::Open(dynamics))
            }
            (Some(gen), None, None) => Ok(ConfiguredDynamics::Unitary(gen.build()?)),
            (None, Some(_), None) => Err(CliError::Config(
                "\"open\" needs a \"generator\" for its Hamiltonian part".into(),
            )),
            (None, None, None) => Err(CliError::Config(
                "missing dynamics: provide \"generator\", \"generator\"+\"open\", or \"qbm\""
                    .into(),
            )),
        }
    }
}

/// What the config's dynamics section described.
pub enum ConfiguredDynamics {
    Unitary(QuadraticGenerator),
    Open(OpenDynamics),
}

/// Builds a squeezing spec for a signed magnitude: negative `r` squeezes
/// the conjugate quadrature, i.e. maps to `(|r|, theta + pi/2)`.
pub fn signed_squeeze(r: f64, theta: f64) -> Result<SqueezeSpec, CliError> {
    let spec = if r < 0.0 {
        SqueezeSpec::single(-r, theta + std::f64::consts::FRAC_PI_2)
    } else {
        SqueezeSpec::single(r, theta)
    };
    spec.map_err(CliError::config)
}

fn matrix_from_rows(rows: &[Vec<f64>], what: &str) -> Result<DMatrix<f64>, CliError> {
    let d = rows.len();
    if d == 0 || rows.iter().any(|row| row.len() != d) {
        return Err(CliError::Config(format!("{what} must be a nonempty square matrix")));
    }
    Ok(DMatrix::from_fn(d, d, |i, j| rows[i][j]))
}
