//! Experiment configuration.
//!
//! JSON, UTF-8, unknown keys rejected. Axes and plane indices are 1-based here
//! and converted to the 0-based library API in [`ExperimentConfig::frame`].

use std::fmt;
use std::path::{Path, PathBuf};

use krein_lab::clifford::SignatureSplit;
use krein_lab::lattice::{FrameField, TorusLattice, MAX_OPERATOR_DIM};
use serde::{Deserialize, Serialize};

/// `"auto"` or a positive number.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "AutoRepr", into = "AutoRepr")]
pub enum AutoOr {
    #[default]
    Auto,
    Value(f64),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum AutoRepr {
    Number(f64),
    Text(String),
}

impl TryFrom<AutoRepr> for AutoOr {
    type Error = String;

    fn try_from(r: AutoRepr) -> Result<Self, String> {
        match r {
            AutoRepr::Number(v) => Ok(AutoOr::Value(v)),
            AutoRepr::Text(s) if s == "auto" => Ok(AutoOr::Auto),
            AutoRepr::Text(s) => Err(format!("expected \"auto\" or a number, got {s:?}")),
        }
    }
}

impl From<AutoOr> for AutoRepr {
    fn from(a: AutoOr) -> Self {
        match a {
            AutoOr::Auto => AutoRepr::Text("auto".into()),
            AutoOr::Value(v) => AutoRepr::Number(v),
        }
    }
}

impl AutoOr {
    pub fn value(self) -> Option<f64> {
        match self {
            AutoOr::Auto => None,
            AutoOr::Value(v) => Some(v),
        }
    }
}

impl std::str::FromStr for AutoOr {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            return Ok(AutoOr::Auto);
        }
        s.parse::<f64>()
            .map(AutoOr::Value)
            .map_err(|_| format!("expected \"auto\" or a number, got {s:?}"))
    }
}

fn default_grid_count() -> usize {
    11
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n: usize,
    pub n1: usize,
    #[serde(rename = "N_list")]
    pub n_list: Vec<usize>,
    pub alpha: f64,
    /// 1-based axis the rotation angle depends on.
    pub dep_axis: usize,
    /// 1-based rotation plane; `null` keeps the coordinate frame.
    pub rot_plane: Option<[usize; 2]>,
    pub seed: u64,
    #[serde(default)]
    pub lambda0: AutoOr,
    #[serde(default = "default_grid_count")]
    pub grid_count: usize,
    /// Imaginary part of the fixed resolvent point `μ`.
    #[serde(default)]
    pub mu: AutoOr,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub emit_matrices: bool,
}

/// A config problem, always tied to a key.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config key `{}`: {}", self.key, self.message)
    }
}

impl std::error::Error for ConfigError {}

fn bad(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError {
        key: key.to_string(),
        message: message.into(),
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            let msg = inner.to_string();
            // unknown and missing keys name themselves in the message
            let key = if path == "." {
                extract_backticked(&msg).unwrap_or_else(|| "<root>".into())
            } else {
                path
            };
            bad(&key, msg)
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, crate::CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| crate::CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text).map_err(|error| crate::CliError::Config {
            path: path.to_path_buf(),
            error,
        })
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n == 0 {
            return Err(bad("n", "must be at least 1"));
        }
        if self.n1 > self.n {
            return Err(bad("n1", format!("must not exceed n = {}", self.n)));
        }
        if self.n_list.is_empty() {
            return Err(bad("N_list", "must not be empty"));
        }
        if !self.n_list.windows(2).all(|w| w[0] < w[1]) {
            return Err(bad("N_list", "must be strictly ascending"));
        }
        for &points in &self.n_list {
            let lat = TorusLattice::new(self.n, points).map_err(|e| bad("N_list", e.to_string()))?;
            let dim = lat.sites() * (1usize << (self.n / 2));
            if dim > MAX_OPERATOR_DIM {
                return Err(bad(
                    "N_list",
                    format!("N = {points} gives operator dimension {dim}, above the cap of {MAX_OPERATOR_DIM}"),
                ));
            }
        }
        if !self.alpha.is_finite() {
            return Err(bad("alpha", "must be finite"));
        }
        if self.dep_axis == 0 || self.dep_axis > self.n {
            return Err(bad("dep_axis", format!("must lie in 1..={}", self.n)));
        }
        if let Some([p, q]) = self.rot_plane {
            if !(1 <= p && p <= self.n1 && self.n1 < q && q <= self.n) {
                return Err(bad(
                    "rot_plane",
                    format!(
                        "[{p}, {q}] must satisfy 1 <= p <= n1 < q <= n (n1 = {}, n = {})",
                        self.n1, self.n
                    ),
                ));
            }
        }
        if self.grid_count < 4 {
            return Err(bad("grid_count", "must be at least 4"));
        }
        for (key, v) in [("lambda0", self.lambda0), ("mu", self.mu)] {
            if let AutoOr::Value(x) = v {
                if !(x.is_finite() && x > 0.0) {
                    return Err(bad(key, "must be \"auto\" or a positive finite number"));
                }
            }
        }
        Ok(())
    }

    pub fn split(&self) -> SignatureSplit {
        SignatureSplit::new(self.n1, self.n - self.n1)
    }

    pub fn frame(&self) -> Result<FrameField, ConfigError> {
        match self.rot_plane {
            None => Ok(FrameField::constant(self.split())),
            Some([p, q]) => FrameField::rotating(self.split(), (p - 1, q - 1), self.dep_axis - 1, self.alpha)
                .map_err(|e| bad("rot_plane", e.to_string())),
        }
    }

    /// Whether the frame actually varies over the torus.
    pub fn is_rotating(&self) -> bool {
        self.rot_plane.is_some() && self.alpha != 0.0
    }
}

fn extract_backticked(msg: &str) -> Option<String> {
    let start = msg.find('`')? + 1;
    let len = msg[start..].find('`')?;
    Some(msg[start..start + len].to_string())
}
