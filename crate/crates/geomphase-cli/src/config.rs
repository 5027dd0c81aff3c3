//! Experiment configuration: a human-editable key-value file with nested
//! tables (TOML) or the same structure as JSON.

use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug)]
pub enum ConfigError {
    Parse(String),
    Invalid(String),
    Io(String),
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConfigError::Parse(m) => write!(f, "config parse error: {m}"),
            ConfigError::Invalid(m) => write!(f, "invalid config: {m}"),
            ConfigError::Io(m) => write!(f, "config io error: {m}"),
        }
    }
}

impl std::error::Error for ConfigError {}

/// Top-level experiment configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    /// Master seed for stochastic experiments.
    #[serde(default)]
    pub seed: u64,
    /// Output directory name (resolved under the output root).
    #[serde(default)]
    pub output: Option<String>,
    pub params: Params,
}

/// Model-specific parameter tables (exactly one per experiment kind).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    // ---- spin-berry / spin-echo ----
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thetas: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub branch: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_rot: Option<f64>,

    // ---- jc ----
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deltas: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pump: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_periods: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples_per_period: Option<usize>,

    // ---- bipartite ----
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l_tilde: Option<f64>,
    /// Mirror distance over qubit separation; omit for free space.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_over_l: Option<f64>,
    /// Dipole axis "x", "y" or "z".
    #[serde(skip_serializing_if = "Option::is_none")]
    pub polarization: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_samples: Option<usize>,

    // ---- sliding atom ----
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega0_tilde: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_tilde: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub material: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub atom: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v_values: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu2_over_d3: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_hat: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vartheta0: Option<f64>,

    // ---- friction ----
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda2_g2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub force_points: Option<Vec<FrictionPoint>>,

    // ---- trajectories ----
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_z: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_traj: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_bins: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_theta: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_bounds: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_bounds: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrictionPoint {
    pub omega: f64,
    pub omega_mat: f64,
    pub d: f64,
    pub v: f64,
}

impl Default for Params {
    fn default() -> Self {
        serde_json::from_str("{}").unwrap()
    }
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| ConfigError::Io(format!("{}: {e}", path.display())))?;
        let is_json = path.extension().map(|e| e == "json").unwrap_or(false);
        Self::from_str(&text, is_json)
    }

    pub fn from_str(text: &str, json: bool) -> Result<Self, ConfigError> {
        if json {
            serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
        } else {
            toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
        }
    }
}

// Required-field accessors with field-path error messages.
macro_rules! require {
    ($self:ident, $field:ident) => {
        $self
            .params
            .$field
            .clone()
            .ok_or_else(|| ConfigError::Invalid(format!("params.{} is required", stringify!($field))))
    };
}

impl ExperimentConfig {
    pub fn req_f64(&self, field: &str) -> Result<f64, ConfigError> {
        let v = match field {
            "omega_rot" => self.params.omega_rot,
            "delta" => self.params.delta,
            "gamma" => self.params.gamma,
            "pump" => self.params.pump,
            "n_periods" => self.params.n_periods,
            "gamma0" => self.params.gamma0,
            "l_tilde" => self.params.l_tilde,
            "theta" => self.params.theta,
            "t_max" => self.params.t_max,
            "omega0_tilde" => self.params.omega0_tilde,
            "gamma_tilde" => self.params.gamma_tilde,
            "v" => self.params.v,
            "mu2_over_d3" => self.params.mu2_over_d3,
            "vartheta0" => self.params.vartheta0,
            "lambda2_g2" => self.params.lambda2_g2,
            "gamma_z" => self.params.gamma_z,
            _ => None,
        };
        v.ok_or_else(|| ConfigError::Invalid(format!("params.{field} is required")))
    }

    pub fn thetas(&self) -> Result<Vec<f64>, ConfigError> {
        require!(self, thetas)
    }

    pub fn deltas(&self) -> Result<Vec<f64>, ConfigError> {
        require!(self, deltas)
    }

    pub fn v_values(&self) -> Result<Vec<f64>, ConfigError> {
        require!(self, v_values)
    }

    pub fn force_points(&self) -> Result<Vec<FrictionPoint>, ConfigError> {
        require!(self, force_points)
    }

    pub fn n_traj(&self) -> Result<usize, ConfigError> {
        let n = self
            .params
            .n_traj
            .ok_or_else(|| ConfigError::Invalid("params.n_traj is required".into()))?;
        if n < 100 {
            return Err(ConfigError::Invalid(format!(
                "params.n_traj must be at least 100 (got {n})"
            )));
        }
        Ok(n)
    }
}
