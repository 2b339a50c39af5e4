//! Constrained minimization of the radial energy, in symmetry-restricted and
//! relaxed (J = 1) parametrizations, and the fixed-orbital CI problem.

mod layout;
mod optimize;
mod precond;

use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::angular::{classify_symmetry, orbital_relation, OrbitalEqualities, Sector, Shells, SymmetryClass, ORBITAL_TOL};
use crate::energy::{
    config_matrices, energy_gradient, sector_direction, total_energy, EnergyReport, MCState, MixingVector, Mode,
};
use crate::error::{Error, Result};
use crate::grid::{inner_values, RadialGrid, RadialOrbital};
use crate::slater_condon::HamiltonianParams;
use crate::trial::{hydrogenic, orthogonalize, random_perturbation};

pub use layout::{fix_gauge, Layout, SolveMode, Symmetry};
pub use optimize::projected_residual;
pub use precond::Preconditioner;

use optimize::{project_variables, Problem};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveOptions {
    pub max_iter: usize,
    /// Energy change below which a stalled line search still counts as converged.
    pub energy_tol: f64,
    /// Dual norm `√(rᵀ(K + M)⁻¹r)` of the projected gradient at which iteration stops.
    pub gradient_tol: f64,
    /// Mass shift `σ` of the `(K + σ M)` preconditioner.
    pub shift: f64,
    /// Sufficient-decrease constant of the line search.
    pub armijo: f64,
    pub initial_step: f64,
    pub max_step: f64,
    pub max_backtracks: usize,
    pub seed: u64,
    /// Size of the random orbital perturbation added to relaxed starts.
    pub perturbation: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            max_iter: 3000,
            energy_tol: 1e-9,
            gradient_tol: 1e-7,
            shift: 1.0,
            armijo: 1e-4,
            initial_step: 0.5,
            max_step: 8.0,
            max_backtracks: 40,
            seed: 0,
            perturbation: 0.0,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("energy_tol", self.energy_tol),
            ("gradient_tol", self.gradient_tol),
            ("shift", self.shift),
            ("armijo", self.armijo),
            ("initial_step", self.initial_step),
            ("max_step", self.max_step),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Parameter(format!("{name} must be positive, got {v}")));
            }
        }
        if self.armijo >= 0.5 {
            return Err(Error::Parameter("armijo must be below 0.5".into()));
        }
        if !(self.perturbation >= 0.0) {
            return Err(Error::Parameter("perturbation must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iteration: usize,
    pub energy: f64,
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub solve_mode: SolveMode,
    pub symmetry: Symmetry,
    pub state: MCState,
    pub report: EnergyReport,
    pub trace: Vec<TraceRow>,
    pub classification: SymmetryClass,
    pub converged: bool,
    /// Dual-norm projected gradient of the restricted problem at the returned point.
    pub residual: f64,
}

impl Solution {
    pub fn energy(&self) -> f64 {
        self.report.total_hartree
    }

    pub fn iterations(&self) -> usize {
        self.trace.last().map_or(0, |r| r.iteration)
    }

    pub fn into_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NoConvergence {
                iterations: self.iterations(),
                energy: self.energy(),
                residual: self.residual,
            })
        }
    }
}

/// Hydrogenic start: `1s` screened by 0.3, the outer shells by 2.
pub fn initial_orbitals(z: f64, grid: &RadialGrid) -> Vec<RadialOrbital> {
    let inner = (z - 0.3).max(0.5);
    let outer = (z - 2.0).max(0.5);
    let r0 = hydrogenic(1, 0, inner, grid);
    let r1 = orthogonalize(hydrogenic(2, 0, outer, grid), &r0, grid);
    let p = hydrogenic(2, 1, outer, grid);
    let d = hydrogenic(3, 2, outer, grid);
    vec![r0, r1, p.clone(), p, d.clone(), d]
}

/// Normalizes `R₀`, projects `R₁` off `R₀` and normalizes it, normalizes the
/// remaining orbitals and the mixing vector.
pub fn project_constraints(state: &MCState) -> Result<MCState> {
    let mut vars: Vec<Vec<f64>> = state.orbitals.iter().map(|o| o.values.clone()).collect();
    project_variables(&mut vars, &state.grid)?;
    let orbitals = vars
        .into_iter()
        .zip(&state.orbitals)
        .map(|(v, o)| RadialOrbital::new(o.ell, v))
        .collect();
    MCState::new(state.mode, orbitals, state.mixing.normalized()?, state.grid.clone(), state.params)
}

pub fn orbital_equalities(state: &MCState) -> OrbitalEqualities {
    let g = &state.grid;
    let o = &state.orbitals;
    OrbitalEqualities {
        r2_r3: orbital_relation(&o[2].values, &o[3].values, g, ORBITAL_TOL),
        r4_r5: if o.len() > 5 {
            orbital_relation(&o[4].values, &o[5].values, g, ORBITAL_TOL)
        } else {
            None
        },
    }
}

pub fn classify_state(state: &MCState) -> SymmetryClass {
    classify_symmetry(state.coeffs(), orbital_equalities(state))
}

/// Projected gradient norm over every orbital and mixing coefficient, with
/// the mixing part `2(Hx − Ex)`.
pub fn full_residual(state: &MCState) -> f64 {
    let layout = Layout::full(state.mode);
    let vars = layout.variables_of(&state.orbitals);
    let g = energy_gradient(state);
    let orbital = projected_residual(&vars, &g.orbitals, &state.grid);
    let x = state.coeffs();
    let e: f64 = x.iter().zip(&g.mixing).map(|(a, b)| a * b).sum::<f64>() / 2.0;
    let mixing: f64 = x.iter().zip(&g.mixing).map(|(a, b)| (b - 2.0 * e * a).powi(2)).sum();
    (orbital * orbital + mixing).sqrt()
}

fn finish(
    layout: &Layout,
    solve_mode: SolveMode,
    symmetry: Symmetry,
    outcome: optimize::Outcome,
    grid: &Arc<RadialGrid>,
    params: HamiltonianParams,
) -> Result<Solution> {
    let mut vars = outcome.point.vars;
    let mut mixing = outcome.point.mixing;
    fix_gauge(layout, &mut vars, &mut mixing);
    let state = layout.state(&vars, mixing, grid, params)?;
    let report = total_energy(&state)?;
    let classification = classify_state(&state);
    Ok(Solution {
        solve_mode,
        symmetry,
        state,
        report,
        trace: outcome.trace,
        classification,
        converged: outcome.converged,
        residual: outcome.residual,
    })
}

fn run(
    layout: &Layout,
    vars: Vec<Vec<f64>>,
    params: HamiltonianParams,
    grid: &Arc<RadialGrid>,
    opts: &SolveOptions,
) -> Result<optimize::Outcome> {
    opts.validate()?;
    let precond = Preconditioner::new(grid, opts.shift);
    let unit;
    let metric = if opts.shift == 1.0 {
        &precond
    } else {
        unit = Preconditioner::new(grid, 1.0);
        &unit
    };
    let problem = Problem {
        layout,
        params,
        grid,
        precond: &precond,
        metric,
    };
    problem.minimize(vars, opts)
}

/// Minimum over the symmetry-restricted family: paired equal-`ℓ` slots share
/// one radial function and the mixing stays in the term's LS directions.
/// A run that exhausts `max_iter` returns with `converged == false`.
pub fn minimize_symmetric(
    solve_mode: SolveMode,
    symmetry: Symmetry,
    params: HamiltonianParams,
    grid: &Arc<RadialGrid>,
    opts: &SolveOptions,
) -> Result<Solution> {
    if symmetry == Symmetry::J1 {
        return Err(Error::Parameter("use minimize_j1 for the relaxed problem".into()));
    }
    let layout = Layout::symmetric(solve_mode, symmetry)?;
    let start = initial_orbitals(params.z, grid);
    let vars = layout.variables_of(&start);
    let outcome = run(&layout, vars, params, grid, opts)?;
    finish(&layout, solve_mode, symmetry, outcome, grid, params)
}

/// Minimum over every radial function and mixing coefficient. Without an
/// initial state the hydrogenic start is used, perturbed by
/// `opts.perturbation` with `opts.seed`.
pub fn minimize_j1(
    solve_mode: SolveMode,
    params: HamiltonianParams,
    grid: &Arc<RadialGrid>,
    opts: &SolveOptions,
    init: Option<&MCState>,
) -> Result<Solution> {
    let layout = Layout::relaxed(solve_mode)?;
    let mut vars = match init {
        Some(state) => {
            if state.mode != layout.mode {
                return Err(Error::Parameter(format!(
                    "initial state is {} but the solve is {}",
                    state.mode.name(),
                    layout.mode.name()
                )));
            }
            layout.variables_of(&state.orbitals)
        }
        None => layout.variables_of(&initial_orbitals(params.z, grid)),
    };
    if opts.perturbation > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        for (k, v) in vars.iter_mut().enumerate() {
            let delta = random_perturbation(layout.ell(k), &mut rng, grid);
            v.iter_mut().zip(&delta).for_each(|(a, b)| *a += opts.perturbation * b);
        }
    }
    let outcome = run(&layout, vars, params, grid, opts)?;
    finish(&layout, solve_mode, Symmetry::J1, outcome, grid, params)
}

/// Displaces `R₃` by `size` along a seeded random direction orthogonal to
/// `R₂`, the variation along which a ³P₁ point is not stationary.
pub fn perturb_r3(state: &MCState, size: f64, seed: u64) -> Result<MCState> {
    let g = &state.grid;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut delta = random_perturbation(1, &mut rng, g);
    let r2 = &state.orbitals[2].values;
    let s = inner_values(&delta, r2, g) / inner_values(r2, r2, g);
    delta.iter_mut().zip(r2).for_each(|(a, b)| *a -= s * b);
    let n = inner_values(&delta, &delta, g).sqrt();
    let mut orbitals = state.orbitals.clone();
    orbitals[3]
        .values
        .iter_mut()
        .zip(&delta)
        .for_each(|(a, b)| *a += size * b / n);
    let moved = MCState::new(state.mode, orbitals, state.mixing.clone(), g.clone(), state.params)?;
    project_constraints(&moved)
}

#[derive(Debug, Clone)]
pub struct MultiStart {
    pub best: Solution,
    pub energies: Vec<f64>,
    /// Final energies differ by more than `1e-6`.
    pub multi_basin: bool,
}

/// Relaxed sp+pd runs from the ³P₁ minimizer with `R₃` perturbed, one per seed.
pub fn symmetry_breaking_runs(
    triplet: &Solution,
    seeds: &[u64],
    params: HamiltonianParams,
    grid: &Arc<RadialGrid>,
    opts: &SolveOptions,
) -> Result<MultiStart> {
    if triplet.state.mode != Mode::SpPd {
        return Err(Error::Parameter("symmetry breaking starts from an sp+pd state".into()));
    }
    let mut best: Option<Solution> = None;
    let mut energies = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        let start = perturb_r3(&triplet.state, 1e-2, seed)?;
        let sol = minimize_j1(SolveMode::SpPd, params, grid, opts, Some(&start))?;
        energies.push(sol.energy());
        if best.as_ref().map_or(true, |b| sol.energy() < b.energy()) {
            best = Some(sol);
        }
    }
    let best = best.ok_or_else(|| Error::Parameter("no seeds given".into()))?;
    let lo = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = energies.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(MultiStart {
        best,
        energies,
        multi_basin: hi - lo > 1e-6,
    })
}

/// Eigenvalues of the five-configuration Hamiltonian at orbitals with
/// `R₃ = R₂` and `R₅ = R₄`, block by block in the LS basis.
#[derive(Debug, Clone)]
pub struct CIEigenvalues {
    pub triplet_p: [f64; 2],
    pub singlet_p: [f64; 2],
    pub triplet_d: f64,
    /// Columns are configuration-basis eigenvectors in the order
    /// `λ₁(³P), λ₂(³P), λ₁(¹P), λ₂(¹P), λ(³D)`.
    pub eigenvectors: DMatrix<f64>,
    /// Hamiltonian in the LS basis `¹P_sp, ¹P_pd, ³P_sp, ³P_pd, ³D_pd`.
    pub ls_hamiltonian: DMatrix<f64>,
    /// Largest entry coupling different LS terms.
    pub off_block: f64,
}

/// Orthonormal LS basis of the configuration space, one column per term.
pub fn ls_basis() -> DMatrix<f64> {
    let terms = [
        (Sector::SingletP, Shells::Sp),
        (Sector::SingletP, Shells::Pd),
        (Sector::TripletP, Shells::Sp),
        (Sector::TripletP, Shells::Pd),
        (Sector::TripletD, Shells::Pd),
    ];
    DMatrix::from_fn(5, 5, |i, j| sector_direction(terms[j].0, terms[j].1)[i])
}

/// `orbitals` are `R₀, R₁, R₂, R₄`.
pub fn ci_diagonalize(orbitals: &[RadialOrbital], params: HamiltonianParams, grid: &RadialGrid) -> Result<CIEigenvalues> {
    let [r0, r1, r2, r4] = orbitals else {
        return Err(Error::Shape(format!("expected 4 orbitals, got {}", orbitals.len())));
    };
    let full = vec![r0.clone(), r1.clone(), r2.clone(), r2.clone(), r4.clone(), r4.clone()];
    let h = config_matrices(&full, 5, params, grid).hamiltonian();
    let c = ls_basis();
    let hls = c.transpose() * &h * &c;
    let blocks: [&[usize]; 3] = [&[2, 3], &[0, 1], &[4]];
    let block_of = |i: usize| blocks.iter().position(|b| b.contains(&i)).unwrap();
    let mut off_block = 0.0f64;
    for i in 0..5 {
        for j in 0..5 {
            if block_of(i) != block_of(j) {
                off_block = off_block.max(hls[(i, j)].abs());
            }
        }
    }
    let mut values = Vec::with_capacity(5);
    let mut vectors = DMatrix::zeros(5, 5);
    let mut col = 0;
    for block in blocks {
        let sub = DMatrix::from_fn(block.len(), block.len(), |i, j| hls[(block[i], block[j])]);
        let eig = SymmetricEigen::new(sub);
        let mut order: Vec<usize> = (0..block.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        for k in order {
            values.push(eig.eigenvalues[k]);
            for (i, &ls) in block.iter().enumerate() {
                let y = eig.eigenvectors[(i, k)];
                for row in 0..5 {
                    vectors[(row, col)] += c[(row, ls)] * y;
                }
            }
            col += 1;
        }
    }
    Ok(CIEigenvalues {
        triplet_p: [values[0], values[1]],
        singlet_p: [values[2], values[3]],
        triplet_d: values[4],
        eigenvectors: vectors,
        ls_hamiltonian: hls,
        off_block,
    })
}

/// `R₀, R₁, R₂, R₄` of a state, the input of [`ci_diagonalize`].
pub fn ci_orbitals(state: &MCState) -> Result<Vec<RadialOrbital>> {
    if state.mode != Mode::SpPd {
        return Err(Error::Parameter("CI needs the sp+pd orbital set".into()));
    }
    Ok([0, 1, 2, 4].iter().map(|&i| state.orbitals[i].clone()).collect())
}

/// Full-mixing state from `R₀, R₁, R₂, R₄` and a mixing vector, with the
/// paired slots set equal.
pub fn paired_state(
    orbitals: &[RadialOrbital],
    mixing: Vec<f64>,
    params: HamiltonianParams,
    grid: &Arc<RadialGrid>,
) -> Result<MCState> {
    let full: Vec<RadialOrbital> = match orbitals.len() {
        3 => vec![orbitals[0].clone(), orbitals[1].clone(), orbitals[2].clone(), orbitals[2].clone()],
        4 => vec![
            orbitals[0].clone(),
            orbitals[1].clone(),
            orbitals[2].clone(),
            orbitals[2].clone(),
            orbitals[3].clone(),
            orbitals[3].clone(),
        ],
        n => return Err(Error::Shape(format!("expected 3 or 4 orbitals, got {n}"))),
    };
    let mode = if full.len() == 4 { Mode::Sp } else { Mode::SpPd };
    MCState::new(mode, full, MixingVector::new(mixing)?, grid.clone(), params)
}
