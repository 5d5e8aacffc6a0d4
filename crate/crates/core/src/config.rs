//! TOML run configuration for the `solve` command.
//!
//! ```toml
//! alpha = -0.25
//! delta = 0.5
//! lambda2 = 0.0
//!
//! [psi]
//! coeffs = [0.0, 0.0, 0.0, 0.0, 1.0]
//!
//! [grids]
//! line_n = 401
//!
//! [tolerances]
//! pde = 1e-2
//! ```
//!
//! `trace1`, `trace2`, `grids` and `tolerances` are optional; missing grid
//! sizes and tolerances take their defaults. Unknown keys are rejected.

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::functions::Polynomial;
use crate::pipeline::{BoundaryData, GridConfig, Tolerances};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Coeffs {
    coeffs: Vec<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridsFile {
    line_n: Option<usize>,
    omega1_nx: Option<usize>,
    omega1_ny: Option<usize>,
    omega2_n: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct TolerancesFile {
    ac: Option<f64>,
    gluing: Option<f64>,
    relation14: Option<f64>,
    pde: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    alpha: f64,
    delta: f64,
    lambda2: f64,
    psi: Coeffs,
    trace1: Option<Coeffs>,
    trace2: Option<Coeffs>,
    #[serde(default)]
    grids: GridsFile,
    #[serde(default)]
    tolerances: TolerancesFile,
}

/// A fully resolved run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub alpha: f64,
    pub delta: f64,
    pub lambda2: f64,
    pub data: BoundaryData,
    pub grids: GridConfig,
    pub tolerances: Tolerances,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: ConfigFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let g = GridConfig::default();
        let t = Tolerances::default();
        let poly = |c: Option<Coeffs>| c.map(|c| Polynomial::new(c.coeffs)).unwrap_or_default();
        let tolerances = Tolerances {
            ac: file.tolerances.ac.unwrap_or(t.ac),
            gluing: file.tolerances.gluing.unwrap_or(t.gluing),
            relation14: file.tolerances.relation14.unwrap_or(t.relation14),
            pde: file.tolerances.pde.unwrap_or(t.pde),
        };
        for (name, v) in [
            ("ac", tolerances.ac),
            ("gluing", tolerances.gluing),
            ("relation14", tolerances.relation14),
            ("pde", tolerances.pde),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!(
                    "tolerances.{name} must be positive, got {v}"
                )));
            }
        }
        Ok(Self {
            alpha: file.alpha,
            delta: file.delta,
            lambda2: file.lambda2,
            data: BoundaryData {
                psi: Polynomial::new(file.psi.coeffs),
                trace1: poly(file.trace1),
                trace2: poly(file.trace2),
            },
            grids: GridConfig {
                line_n: file.grids.line_n.unwrap_or(g.line_n),
                omega1_nx: file.grids.omega1_nx.unwrap_or(g.omega1_nx),
                omega1_ny: file.grids.omega1_ny.unwrap_or(g.omega1_ny),
                omega2_n: file.grids.omega2_n.unwrap_or(g.omega2_n),
            },
            tolerances,
        })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }
}
