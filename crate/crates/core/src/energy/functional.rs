//! Energy, sector decomposition and radial gradients of the sp and sp+pd
//! variational states.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::compile::{compiled, Integral, TermKind};
use crate::angular::{JjConfig, Sector, Shells};
use crate::error::{Error, Result};
use crate::grid::{inner_values, kinetic_form, kinetic_form_grad, nuclear_form, RadialGrid, RadialOrbital};
use crate::slater_condon::{slater_rk_values, yk_potential, HamiltonianParams, TermBreakdown};
use crate::trial::SLOT_ELL;

/// Largest constraint residual accepted by [`total_energy`].
pub const CONSTRAINT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    /// `a Φ(s½p½) + b Φ(s½p3/2)` on `R₀ … R₃`.
    #[serde(rename = "sp")]
    Sp,
    /// All five configurations on `R₀ … R₅`.
    #[serde(rename = "sp+pd")]
    SpPd,
}

impl Mode {
    pub fn n_configs(self) -> usize {
        match self {
            Mode::Sp => 2,
            Mode::SpPd => 5,
        }
    }

    pub fn n_orbitals(self) -> usize {
        match self {
            Mode::Sp => 4,
            Mode::SpPd => 6,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Mode::Sp => "sp",
            Mode::SpPd => "sp+pd",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sp" => Ok(Mode::Sp),
            "sp+pd" => Ok(Mode::SpPd),
            _ => Err(Error::UnknownLabel(format!("mode {s}"))),
        }
    }
}

/// Coefficients `(a, b)` or `(a, b, c, d, e)` of the jj configurations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixingVector(Vec<f64>);

impl MixingVector {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != 2 && coeffs.len() != 5 {
            return Err(Error::Shape(format!("mixing vector of length {}", coeffs.len())));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Parameter("non-finite mixing coefficient".into()));
        }
        Ok(Self(coeffs))
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::Degenerate("zero mixing vector".into()));
        }
        Ok(Self(self.0.iter().map(|c| c / n).collect()))
    }
}

#[derive(Debug, Clone)]
pub struct MCState {
    pub mode: Mode,
    pub orbitals: Vec<RadialOrbital>,
    pub mixing: MixingVector,
    pub grid: Arc<RadialGrid>,
    pub params: HamiltonianParams,
}

impl MCState {
    pub fn new(
        mode: Mode,
        orbitals: Vec<RadialOrbital>,
        mixing: MixingVector,
        grid: Arc<RadialGrid>,
        params: HamiltonianParams,
    ) -> Result<Self> {
        if orbitals.len() != mode.n_orbitals() {
            return Err(Error::Shape(format!(
                "{mode} needs {} orbitals, got {}",
                mode.n_orbitals(),
                orbitals.len()
            )));
        }
        if mixing.coeffs().len() != mode.n_configs() {
            return Err(Error::Shape(format!(
                "{mode} needs {} mixing coefficients, got {}",
                mode.n_configs(),
                mixing.coeffs().len()
            )));
        }
        for (slot, o) in orbitals.iter().enumerate() {
            if o.ell != SLOT_ELL[slot] {
                return Err(Error::Shape(format!("R{slot} must have ℓ = {}", SLOT_ELL[slot])));
            }
            if o.values.len() != grid.len() {
                return Err(Error::Shape(format!(
                    "R{slot} has {} samples, grid has {}",
                    o.values.len(),
                    grid.len()
                )));
            }
        }
        Ok(Self {
            mode,
            orbitals,
            mixing,
            grid,
            params,
        })
    }

    pub fn coeffs(&self) -> &[f64] {
        self.mixing.coeffs()
    }

    /// Largest residual among the normalization and orthogonality constraints.
    pub fn constraint_violation(&self) -> f64 {
        let g = &self.grid;
        let mut worst = (self.mixing.norm().powi(2) - 1.0).abs();
        for o in &self.orbitals {
            worst = worst.max((inner_values(&o.values, &o.values, g) - 1.0).abs());
        }
        worst.max(inner_values(&self.orbitals[0].values, &self.orbitals[1].values, g).abs())
    }

    pub fn check_constraints(&self, tol: f64) -> Result<()> {
        let v = self.constraint_violation();
        if v > tol {
            return Err(Error::Constraint(format!("constraint residual {v:.3e} exceeds {tol:.0e}")));
        }
        Ok(())
    }
}

/// Configuration-basis matrices at fixed orbitals, split by sector and by
/// operator.
#[derive(Debug, Clone)]
pub struct ConfigMatrices {
    pub sector: [DMatrix<f64>; 3],
    pub kind: [DMatrix<f64>; 4],
    pub overlap: [DMatrix<f64>; 3],
}

impl ConfigMatrices {
    pub fn hamiltonian(&self) -> DMatrix<f64> {
        &self.sector[0] + &self.sector[1] + &self.sector[2]
    }
}

fn values(orbitals: &[RadialOrbital], slot: u8) -> &[f64] {
    &orbitals[slot as usize].values
}

struct Evaluator<'a> {
    orbitals: &'a [RadialOrbital],
    params: HamiltonianParams,
    grid: &'a RadialGrid,
    overlap: HashMap<(u8, u8), f64>,
    integral: HashMap<Integral, f64>,
}

impl<'a> Evaluator<'a> {
    fn new(orbitals: &'a [RadialOrbital], params: HamiltonianParams, grid: &'a RadialGrid) -> Self {
        Self {
            orbitals,
            params,
            grid,
            overlap: HashMap::new(),
            integral: HashMap::new(),
        }
    }

    fn overlap_product(&mut self, pairs: &[(u8, u8)]) -> f64 {
        pairs
            .iter()
            .map(|&(a, b)| {
                *self
                    .overlap
                    .entry((a, b))
                    .or_insert_with(|| inner_values(values(self.orbitals, a), values(self.orbitals, b), self.grid))
            })
            .product()
    }

    fn integral(&mut self, key: Integral) -> f64 {
        if let Some(v) = self.integral.get(&key) {
            return *v;
        }
        let o = self.orbitals;
        let v = match key {
            Integral::Kinetic { ell, a, b } => kinetic_form(values(o, a), values(o, b), ell, self.grid),
            Integral::Nuclear { a, b } => nuclear_form(values(o, a), values(o, b), self.params.z, self.grid),
            Integral::Slater(k) => {
                self.params.interaction_scale
                    * slater_rk_values(values(o, k.a), values(o, k.b), values(o, k.c), values(o, k.d), k.k, self.grid)
            }
        };
        self.integral.insert(key, v);
        v
    }
}

/// The Hamiltonian and overlap of the first `n_configs` configurations.
pub fn config_matrices(
    orbitals: &[RadialOrbital],
    n_configs: usize,
    params: HamiltonianParams,
    grid: &RadialGrid,
) -> ConfigMatrices {
    let zero = || DMatrix::<f64>::zeros(n_configs, n_configs);
    let mut out = ConfigMatrices {
        sector: [zero(), zero(), zero()],
        kind: [zero(), zero(), zero(), zero()],
        overlap: [zero(), zero(), zero()],
    };
    let mut ev = Evaluator::new(orbitals, params, grid);
    let symmetric_add = |m: &mut DMatrix<f64>, i: usize, j: usize, v: f64| {
        m[(i, j)] += v;
        if i != j {
            m[(j, i)] += v;
        }
    };
    let compiled = compiled();
    for t in compiled.terms.iter().filter(|t| t.j < n_configs) {
        let v = t.coeff * ev.overlap_product(&t.overlaps) * ev.integral(t.integral);
        symmetric_add(&mut out.sector[t.sector.index()], t.i, t.j, v);
        symmetric_add(&mut out.kind[t.kind.index()], t.i, t.j, v);
    }
    for t in compiled.norm_terms.iter().filter(|t| t.j < n_configs) {
        let v = t.coeff * ev.overlap_product(&t.overlaps);
        symmetric_add(&mut out.overlap[t.sector.index()], t.i, t.j, v);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub total_hartree: f64,
    /// Indexed by [`Sector::index`].
    pub sector_energy: [f64; 3],
    /// Squared norms of the sector components.
    pub sector_weight: [f64; 3],
    pub terms: TermBreakdown,
}

impl EnergyReport {
    pub fn sector(&self, s: Sector) -> f64 {
        self.sector_energy[s.index()]
    }

    pub fn weight(&self, s: Sector) -> f64 {
        self.sector_weight[s.index()]
    }

    /// `key = value` lines with fixed field names.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: f64| out.push_str(&format!("{k} = {v:.16e}\n"));
        line("total_hartree", self.total_hartree);
        for s in Sector::ALL {
            line(&format!("sector_{}", s.name()), self.sector(s));
        }
        line("kinetic", self.terms.kinetic);
        line("nuclear", self.terms.nuclear);
        line("direct", self.terms.direct);
        line("exchange", self.terms.exchange);
        for s in Sector::ALL {
            line(&format!("weight_{}", s.name()), self.weight(s));
        }
        out
    }
}

fn quadratic(m: &DMatrix<f64>, x: &DVector<f64>) -> f64 {
    x.dot(&(m * x))
}

/// Energy of the state from its configuration matrices, without the
/// constraint check.
pub fn energy_unchecked(state: &MCState) -> EnergyReport {
    let m = config_matrices(&state.orbitals, state.mode.n_configs(), state.params, &state.grid);
    report_from_matrices(&m, state.coeffs())
}

pub fn report_from_matrices(m: &ConfigMatrices, coeffs: &[f64]) -> EnergyReport {
    let x = DVector::from_column_slice(coeffs);
    let sector_energy = [0, 1, 2].map(|s| quadratic(&m.sector[s], &x));
    let sector_weight = [0, 1, 2].map(|s| quadratic(&m.overlap[s], &x));
    let kind = [0, 1, 2, 3].map(|k| quadratic(&m.kind[k], &x));
    EnergyReport {
        total_hartree: sector_energy.iter().sum(),
        sector_energy,
        sector_weight,
        terms: TermBreakdown {
            kinetic: kind[TermKind::Kinetic.index()],
            nuclear: kind[TermKind::Nuclear.index()],
            direct: kind[TermKind::Direct.index()],
            exchange: kind[TermKind::Exchange.index()],
        },
    }
}

/// `⟨Ψ, HΨ⟩` for a state satisfying the constraints.
pub fn total_energy(state: &MCState) -> Result<EnergyReport> {
    state.check_constraints(CONSTRAINT_TOL)?;
    Ok(energy_unchecked(state))
}

/// One sector's share of `Ψ`: effective `p` radial of the sp part, and for
/// each `d` slot the effective `p` radial multiplying it.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorComponent {
    pub sector: Sector,
    pub sp: Option<Vec<f64>>,
    pub pd: Vec<(u8, Vec<f64>)>,
    pub weight: f64,
}

pub fn sector_decompose(state: &MCState) -> [SectorComponent; 3] {
    let g = &state.grid;
    let x = state.coeffs();
    let n = g.len();
    Sector::ALL.map(|sector| {
        let mut sp: Option<Vec<f64>> = None;
        let mut pd: Vec<(u8, Vec<f64>)> = Vec::new();
        for cfg in JjConfig::ALL.iter().take(state.mode.n_configs()) {
            let c = cfg.ls_coefficient(sector).to_f64();
            if sector.csf_label(cfg.shells()).is_none() {
                continue;
            }
            let slots = cfg.default_slots();
            let (target, p_slot) = match cfg.shells() {
                Shells::Sp => (sp.get_or_insert_with(|| vec![0.0; n]), slots.high),
                Shells::Pd => {
                    let idx = match pd.iter().position(|(d, _)| *d == slots.high) {
                        Some(i) => i,
                        None => {
                            pd.push((slots.high, vec![0.0; n]));
                            pd.len() - 1
                        }
                    };
                    (&mut pd[idx].1, slots.low)
                }
            };
            let w = c * x[cfg.index()];
            for (t, r) in target.iter_mut().zip(&state.orbitals[p_slot as usize].values) {
                *t += w * r;
            }
        }
        let mut weight = sp.as_ref().map_or(0.0, |p| inner_values(p, p, g));
        for (d1, p1) in &pd {
            for (d2, p2) in &pd {
                let sd = inner_values(&state.orbitals[*d1 as usize].values, &state.orbitals[*d2 as usize].values, g);
                weight += inner_values(p1, p2, g) * sd;
            }
        }
        SectorComponent { sector, sp, pd, weight }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Piece {
    Kinetic { ell: u8, partner: u8 },
    Nuclear { partner: u8 },
    Overlap { partner: u8 },
    Potential { partner: u8, k: u8, b: u8, d: u8 },
}

impl Piece {
    fn potential(partner: u8, k: u8, b: u8, d: u8) -> Self {
        Piece::Potential {
            partner,
            k,
            b: b.min(d),
            d: b.max(d),
        }
    }
}

/// Derivatives of the energy with respect to every parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyGradient {
    /// `L²(r² dr)` gradients `∂E/∂R_slot`.
    pub orbitals: Vec<Vec<f64>>,
    /// `∂E/∂x_i = 2 (H x)_i`.
    pub mixing: Vec<f64>,
}

/// Gradient of the energy functional at the state (constraints not imposed).
pub fn energy_gradient(state: &MCState) -> EnergyGradient {
    let grid = &*state.grid;
    let orbitals = &state.orbitals;
    let n_cfg = state.mode.n_configs();
    let x = state.coeffs();
    let mut ev = Evaluator::new(orbitals, state.params, grid);
    let mut pieces: Vec<BTreeMap<Piece, f64>> = vec![BTreeMap::new(); orbitals.len()];
    let mut add = |slot: u8, piece: Piece, v: f64| {
        *pieces[slot as usize].entry(piece).or_default() += v;
    };
    let scale = state.params.interaction_scale;

    for t in compiled().terms.iter().filter(|t| t.j < n_cfg) {
        let pair_weight = if t.i == t.j { 1.0 } else { 2.0 };
        let w = pair_weight * x[t.i] * x[t.j] * t.coeff;
        if w == 0.0 {
            continue;
        }
        let value = ev.integral(t.integral);
        for (q, &(a, b)) in t.overlaps.iter().enumerate() {
            let others: Vec<(u8, u8)> = t
                .overlaps
                .iter()
                .enumerate()
                .filter(|(r, _)| *r != q)
                .map(|(_, p)| *p)
                .collect();
            let f = w * ev.overlap_product(&others) * value;
            add(a, Piece::Overlap { partner: b }, f);
            add(b, Piece::Overlap { partner: a }, f);
        }
        let f = w * ev.overlap_product(&t.overlaps);
        match t.integral {
            Integral::Kinetic { ell, a, b } => {
                add(a, Piece::Kinetic { ell, partner: b }, f);
                add(b, Piece::Kinetic { ell, partner: a }, f);
            }
            Integral::Nuclear { a, b } => {
                add(a, Piece::Nuclear { partner: b }, f);
                add(b, Piece::Nuclear { partner: a }, f);
            }
            Integral::Slater(key) => {
                let f = f * scale;
                add(key.a, Piece::potential(key.c, key.k, key.b, key.d), f);
                add(key.c, Piece::potential(key.a, key.k, key.b, key.d), f);
                add(key.b, Piece::potential(key.d, key.k, key.a, key.c), f);
                add(key.d, Piece::potential(key.b, key.k, key.a, key.c), f);
            }
        }
    }

    let r = grid.r();
    let w = grid.weights();
    let n = grid.len();
    let mut potentials: HashMap<(u8, u8, u8), Vec<f64>> = HashMap::new();
    let mut out = Vec::with_capacity(orbitals.len());
    for slot_pieces in &pieces {
        let mut grad = vec![0.0; n];
        for (piece, &c) in slot_pieces {
            if c == 0.0 {
                continue;
            }
            match *piece {
                Piece::Kinetic { ell, partner } => {
                    let kg = kinetic_form_grad(values(orbitals, partner), ell, grid);
                    grad.iter_mut().zip(&kg).for_each(|(g, v)| *g += c * v);
                }
                Piece::Nuclear { partner } => {
                    let p = values(orbitals, partner);
                    for i in 0..n {
                        grad[i] -= c * state.params.z * w[i] * r[i] * p[i];
                    }
                }
                Piece::Overlap { partner } => {
                    let p = values(orbitals, partner);
                    for i in 0..n {
                        grad[i] += c * w[i] * r[i] * r[i] * p[i];
                    }
                }
                Piece::Potential { partner, k, b, d } => {
                    let y = potentials
                        .entry((k, b, d))
                        .or_insert_with(|| yk_potential(values(orbitals, b), values(orbitals, d), k, grid));
                    let p = values(orbitals, partner);
                    for i in 0..n {
                        grad[i] += c * w[i] * r[i] * r[i] * p[i] * y[i];
                    }
                }
            }
        }
        for i in 0..n {
            grad[i] /= w[i] * r[i] * r[i];
        }
        out.push(grad);
    }

    let h = config_matrices(orbitals, n_cfg, state.params, grid).hamiltonian();
    let xv = DVector::from_column_slice(x);
    let mixing = (2.0 * (h * xv)).iter().copied().collect();
    EnergyGradient { orbitals: out, mixing }
}

/// `L²(r² dr)` gradient `∂E/∂R_slot`.
pub fn gradient_radial(state: &MCState, slot: usize) -> Result<Vec<f64>> {
    if slot >= state.orbitals.len() {
        return Err(Error::Shape(format!("no slot R{slot} in {} mode", state.mode)));
    }
    Ok(energy_gradient(state).orbitals.swap_remove(slot))
}

/// Mixing vector of the LS term `sector` on `shells` when equal-`ℓ` radials
/// coincide: the LS coefficients of the configurations on those shells.
pub fn sector_direction(sector: Sector, shells: Shells) -> [f64; 5] {
    let mut out = [0.0; 5];
    for cfg in JjConfig::ALL {
        if cfg.shells() == shells {
            out[cfg.index()] = cfg.ls_coefficient(sector).to_f64();
        }
    }
    out
}
