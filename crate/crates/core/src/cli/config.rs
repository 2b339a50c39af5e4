//! Run configuration: everything needed to reproduce a solve or a check.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{make_log_grid, RadialGrid, DEFAULT_POINTS, DEFAULT_R_MAX, DEFAULT_R_MIN};
use crate::slater_condon::HamiltonianParams;
use crate::solver::{SolveMode, SolveOptions, Symmetry};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub mode: SolveMode,
    pub symmetry: Symmetry,
    /// Nuclear charge.
    #[serde(rename = "Z")]
    pub z: f64,
    pub n_points: usize,
    pub r_min: f64,
    pub r_max: f64,
    /// Perturbed starts from the ³P₁ minimizer in the symmetry-breaking check.
    pub starts: usize,
    pub output_dir: PathBuf,
    pub solver: SolveOptions,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            mode: SolveMode::SpPd,
            symmetry: Symmetry::TripletP1,
            z: 4.0,
            n_points: DEFAULT_POINTS,
            r_min: DEFAULT_R_MIN,
            r_max: DEFAULT_R_MAX,
            starts: 5,
            output_dir: PathBuf::from("out"),
            solver: SolveOptions::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.params()?;
        self.grid()?;
        self.solver.validate()?;
        if self.starts == 0 {
            return Err(Error::Config("starts must be at least 1".into()));
        }
        Ok(())
    }

    pub fn params(&self) -> Result<HamiltonianParams> {
        HamiltonianParams::new(self.z)
    }

    pub fn grid(&self) -> Result<Arc<RadialGrid>> {
        make_log_grid(self.n_points, self.r_min, self.r_max).map(Arc::new)
    }

    /// The same run with another mode and symmetry.
    pub fn for_solve(&self, mode: SolveMode, symmetry: Symmetry) -> Self {
        Self {
            mode,
            symmetry,
            ..self.clone()
        }
    }
}
