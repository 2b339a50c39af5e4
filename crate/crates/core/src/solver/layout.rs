//! Reduced parametrizations: which radial slots share an orbital variable and
//! which subspace of mixing vectors is allowed.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::angular::{JjConfig, Sector, Shells};
use crate::energy::{config_matrices, sector_direction, MCState, MixingVector, Mode};
use crate::error::{Error, Result};
use crate::grid::{RadialGrid, RadialOrbital};
use crate::slater_condon::HamiltonianParams;
use crate::trial::SLOT_ELL;

/// Shell content requested from the solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SolveMode {
    #[serde(rename = "sp")]
    Sp,
    #[serde(rename = "sp+pd")]
    SpPd,
    /// The `1s² 2p 3d` configurations alone.
    #[serde(rename = "pd")]
    Pd,
}

impl SolveMode {
    pub fn name(self) -> &'static str {
        match self {
            SolveMode::Sp => "sp",
            SolveMode::SpPd => "sp+pd",
            SolveMode::Pd => "pd",
        }
    }
}

impl fmt::Display for SolveMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolveMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sp" => Ok(SolveMode::Sp),
            "sp+pd" => Ok(SolveMode::SpPd),
            "pd" => Ok(SolveMode::Pd),
            _ => Err(Error::UnknownLabel(format!("mode {s}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Symmetry {
    #[serde(rename = "1P1")]
    SingletP1,
    #[serde(rename = "3P1")]
    TripletP1,
    #[serde(rename = "3D1")]
    TripletD1,
    /// No symmetry imposed beyond J = 1.
    J1,
}

impl Symmetry {
    pub fn name(self) -> &'static str {
        match self {
            Symmetry::SingletP1 => "1P1",
            Symmetry::TripletP1 => "3P1",
            Symmetry::TripletD1 => "3D1",
            Symmetry::J1 => "J1",
        }
    }

    pub fn sector(self) -> Option<Sector> {
        match self {
            Symmetry::SingletP1 => Some(Sector::SingletP),
            Symmetry::TripletP1 => Some(Sector::TripletP),
            Symmetry::TripletD1 => Some(Sector::TripletD),
            Symmetry::J1 => None,
        }
    }
}

impl fmt::Display for Symmetry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Symmetry {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1P1" => Ok(Symmetry::SingletP1),
            "3P1" => Ok(Symmetry::TripletP1),
            "3D1" => Ok(Symmetry::TripletD1),
            "J1" => Ok(Symmetry::J1),
            _ => Err(Error::UnknownLabel(format!("symmetry {s}"))),
        }
    }
}

/// Map from orbital variables to slots and from reduced to full mixing.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    pub mode: Mode,
    /// Slots carried by each orbital variable; variable 0 is `R₀`, 1 is `R₁`.
    pub groups: Vec<Vec<usize>>,
    /// Orthonormal columns spanning the allowed mixing vectors.
    pub basis: DMatrix<f64>,
}

impl Layout {
    /// Every slot and every mixing coefficient free.
    pub fn full(mode: Mode) -> Self {
        let n = mode.n_configs();
        Self {
            mode,
            groups: (0..mode.n_orbitals()).map(|s| vec![s]).collect(),
            basis: DMatrix::identity(n, n),
        }
    }

    /// The symmetry-restricted family: equal radials on equal-`ℓ` slot pairs
    /// and mixing inside the term's own LS directions.
    pub fn symmetric(solve_mode: SolveMode, symmetry: Symmetry) -> Result<Self> {
        let Some(sector) = symmetry.sector() else {
            return Self::relaxed(solve_mode);
        };
        let shells: &[Shells] = match (solve_mode, sector) {
            (SolveMode::Pd, Sector::TripletD) => &[Shells::Pd],
            (SolveMode::Pd, _) => {
                return Err(Error::Parameter(format!("{symmetry} is not solved in pd mode")));
            }
            (_, Sector::TripletD) => {
                return Err(Error::Parameter("3D1 requires mode pd".into()));
            }
            (SolveMode::Sp, _) => &[Shells::Sp],
            (SolveMode::SpPd, _) => &[Shells::Sp, Shells::Pd],
        };
        let mode = match solve_mode {
            SolveMode::Sp => Mode::Sp,
            _ => Mode::SpPd,
        };
        let n = mode.n_configs();
        let columns: Vec<DVector<f64>> = shells
            .iter()
            .map(|s| DVector::from_column_slice(&sector_direction(sector, *s)[..n]))
            .collect();
        let groups = match mode {
            Mode::Sp => vec![vec![0], vec![1], vec![2, 3]],
            Mode::SpPd => vec![vec![0], vec![1], vec![2, 3], vec![4, 5]],
        };
        Ok(Self {
            mode,
            groups,
            basis: DMatrix::from_columns(&columns),
        })
    }

    pub fn relaxed(solve_mode: SolveMode) -> Result<Self> {
        match solve_mode {
            SolveMode::Sp => Ok(Self::full(Mode::Sp)),
            SolveMode::SpPd => Ok(Self::full(Mode::SpPd)),
            SolveMode::Pd => Err(Error::Parameter("J1 is solved in sp or sp+pd mode".into())),
        }
    }

    pub fn n_vars(&self) -> usize {
        self.groups.len()
    }

    pub fn ell(&self, var: usize) -> u8 {
        SLOT_ELL[self.groups[var][0]]
    }

    /// Orbital variables read off a full orbital set (first slot of each group).
    pub fn variables_of(&self, orbitals: &[RadialOrbital]) -> Vec<Vec<f64>> {
        self.groups.iter().map(|g| orbitals[g[0]].values.clone()).collect()
    }

    pub fn orbitals_of(&self, vars: &[Vec<f64>]) -> Vec<RadialOrbital> {
        let mut out = vec![RadialOrbital::zeros(0, 0); self.mode.n_orbitals()];
        for (v, group) in vars.iter().zip(&self.groups) {
            for &slot in group {
                out[slot] = RadialOrbital::new(SLOT_ELL[slot], v.clone());
            }
        }
        out
    }

    /// Lowest eigenpair of the Hamiltonian restricted to the mixing subspace,
    /// returned as the full mixing vector.
    pub fn optimal_mixing(
        &self,
        orbitals: &[RadialOrbital],
        params: HamiltonianParams,
        grid: &RadialGrid,
    ) -> (f64, Vec<f64>) {
        let h = config_matrices(orbitals, self.mode.n_configs(), params, grid).hamiltonian();
        let reduced = self.basis.transpose() * &h * &self.basis;
        let eig = SymmetricEigen::new(reduced);
        let (i, e) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |(bi, be), (i, &e)| if e < be { (i, e) } else { (bi, be) });
        let y = eig.eigenvectors.column(i).into_owned();
        let x = &self.basis * y;
        (e, x.iter().copied().collect())
    }

    pub fn state(
        &self,
        vars: &[Vec<f64>],
        mixing: Vec<f64>,
        grid: &Arc<RadialGrid>,
        params: HamiltonianParams,
    ) -> Result<MCState> {
        MCState::new(self.mode, self.orbitals_of(vars), MixingVector::new(mixing)?, grid.clone(), params)
    }

    /// Which configurations change sign when variable `var` is negated.
    pub fn sign_pattern(&self, var: usize) -> Vec<bool> {
        JjConfig::ALL
            .iter()
            .take(self.mode.n_configs())
            .map(|cfg| {
                let s = cfg.default_slots();
                let uses = [s.low as usize, s.high as usize]
                    .iter()
                    .filter(|slot| self.groups[var].contains(slot))
                    .count();
                uses % 2 == 1
            })
            .collect()
    }
}

/// Sign convention for reporting: each orbital positive where it first
/// becomes appreciable, then the first nonzero mixing coefficient positive.
pub fn fix_gauge(layout: &Layout, vars: &mut [Vec<f64>], mixing: &mut [f64]) {
    for k in 0..vars.len() {
        let v = &vars[k];
        let peak = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let lead = v.iter().find(|x| x.abs() > 1e-3 * peak).copied().unwrap_or(0.0);
        if lead < 0.0 {
            vars[k].iter_mut().for_each(|x| *x = -*x);
            for (c, flip) in mixing.iter_mut().zip(layout.sign_pattern(k)) {
                if flip {
                    *c = -*c;
                }
            }
        }
    }
    if let Some(first) = mixing.iter().find(|c| c.abs() > 1e-12).copied() {
        if first < 0.0 {
            mixing.iter_mut().for_each(|c| *c = -*c);
        }
    }
    // no negative zeros in reports
    mixing.iter_mut().for_each(|c| *c += 0.0);
}
