use std::f64::consts::FRAC_PI_4;
use std::path::Path;

use lamlab::algebra::Vector2;
use lamlab::energy::SlipSystem;
use serde::Deserialize;

use crate::CliError;

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum SlipConfig {
    Theta { theta: f64 },
    Vectors { v1: [f64; 2], v2: [f64; 2] },
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub manifold: f64,
    pub laminate: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            manifold: 1e-9,
            laminate: 1e-9,
        }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct Grid {
    pub range: f64,
    pub n: usize,
}

impl Default for Grid {
    fn default() -> Self {
        Self { range: 3.0, n: 61 }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct OracleConfig {
    pub n_dirs: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { n_dirs: 720 }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub slip: SlipConfig,
    pub lambda: f64,
    pub tolerances: Tolerances,
    pub grid: Grid,
    pub oracle: OracleConfig,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            slip: SlipConfig::Theta { theta: FRAC_PI_4 },
            lambda: 0.5,
            tolerances: Tolerances::default(),
            grid: Grid::default(),
            oracle: OracleConfig::default(),
        }
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
    }

    pub fn slip_system(&self) -> Result<SlipSystem, CliError> {
        let s = match self.slip {
            SlipConfig::Theta { theta } => SlipSystem::from_theta(theta, self.lambda),
            SlipConfig::Vectors { v1, v2 } => SlipSystem::from_vectors(
                Vector2::new(v1[0], v1[1]),
                Vector2::new(v2[0], v2[1]),
                self.lambda,
            ),
        };
        s.map_err(|e| CliError::Usage(e.to_string()))
    }
}
