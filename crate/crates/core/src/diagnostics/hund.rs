//! Singlet/triplet ordering of paired states.
//!
//! `Ψ₁ = Σⱼ cⱼ core ∧ g₂ⱼ₋₁↑ ∧ g₂ⱼ↓` and `Ψ₂` the same with both spins
//! flipped. With orthonormal orbitals the one-body parts of
//! `⟨Ψ₁ ∓ Ψ₂, H(Ψ₁ ∓ Ψ₂)⟩` agree, and the difference of the two forms is
//! `−4⟨Ψ₁, HΨ₂⟩ = 4∬ Φ̄(x, y) Φ(y, x) / |x − y|` with
//! `Φ(x, y) = Σⱼ cⱼ g₂ⱼ₋₁(x) g₂ⱼ(y)`. For a single pair this is the Coulomb
//! self-energy of `ḡ₁ g₂`, hence positive. With several pairs the
//! antisymmetric part of `Φ` enters with a minus sign and the order can flip.

use rand::Rng;

use crate::angular::{Csf, Spin, SpinOrbital};
use crate::error::{Error, Result};
use crate::gaunt::gaunt_f64;
use crate::grid::{inner_values, RadialGrid, RadialOrbital};
use crate::slater_condon::{matrix_element, slater_rk_values, HamiltonianParams};

use super::{ConditionId, ConditionReport, Verdict};

/// Tolerance on the difference of the forms and on both identities.
pub const HUND_TOL: f64 = 1e-10;

/// `ℓ_m(R_slot)` without spin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpatialOrbital {
    pub slot: u8,
    pub ell: u8,
    pub m: i8,
}

impl SpatialOrbital {
    pub fn new(slot: u8, ell: u8, m: i8) -> Self {
        Self { slot, ell, m }
    }

    fn with_spin(self, spin: Spin) -> SpinOrbital {
        SpinOrbital::new(self.slot, self.ell, self.m, spin)
    }
}

/// `coeff · g_first ⊗ g_second`, each `g` a combination of spatial orbitals.
#[derive(Debug, Clone, PartialEq)]
pub struct HundPair {
    pub coeff: f64,
    pub first: Vec<(f64, SpatialOrbital)>,
    pub second: Vec<(f64, SpatialOrbital)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HundInput {
    /// Doubly occupied orbitals.
    pub core: Vec<SpatialOrbital>,
    pub pairs: Vec<HundPair>,
}

impl HundInput {
    /// `1s² (s ↑ p₁ ↓)` on slots `R₀`, `R₁`, `R₂`.
    pub fn sp_pair() -> Self {
        Self {
            core: vec![SpatialOrbital::new(0, 0, 0)],
            pairs: vec![HundPair {
                coeff: 1.0,
                first: vec![(1.0, SpatialOrbital::new(1, 0, 0))],
                second: vec![(1.0, SpatialOrbital::new(2, 1, 1))],
            }],
        }
    }

    /// One pair on slots `R₀`, `R₁`, `R₂`, `R₄`: `p₁(R₂) ⊗ g` with `g` a random
    /// unit combination of `s(R₁)` and `d₀(R₄)`.
    pub fn random<R: Rng>(rng: &mut R) -> Self {
        let angle: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        Self {
            core: vec![SpatialOrbital::new(0, 0, 0)],
            pairs: vec![HundPair {
                coeff: 1.0,
                first: vec![(1.0, SpatialOrbital::new(2, 1, 1))],
                second: vec![
                    (angle.cos(), SpatialOrbital::new(1, 0, 0)),
                    (angle.sin(), SpatialOrbital::new(4, 2, 0)),
                ],
            }],
        }
    }

    /// Three `M = 1` pairs `p₁ ⊗ (s, d₀)`, `p₋₁ ⊗ d₂`, `p₀ ⊗ d₁` with random
    /// weights, the pattern of the ¹P₁/³P₁ comparison in the sp+pd model.
    pub fn random_three_pairs<R: Rng>(rng: &mut R) -> Self {
        let mut out = Self::random(rng);
        let mut coeff = || rng.gen_range(0.2..1.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        out.pairs[0].coeff = coeff();
        let single = |slot, ell, m| vec![(1.0, SpatialOrbital::new(slot, ell, m))];
        out.pairs.push(HundPair {
            coeff: coeff(),
            first: single(2, 1, -1),
            second: single(4, 2, 2),
        });
        out.pairs.push(HundPair {
            coeff: coeff(),
            first: single(2, 1, 0),
            second: single(4, 2, 1),
        });
        out
    }

    /// `Ψ₁`, or `Ψ₂` when `flipped`.
    pub fn psi(&self, flipped: bool) -> Csf<f64> {
        let core: Vec<SpinOrbital> = self
            .core
            .iter()
            .flat_map(|u| [u.with_spin(Spin::Up), u.with_spin(Spin::Down)])
            .collect();
        let (s1, s2) = if flipped { (Spin::Down, Spin::Up) } else { (Spin::Up, Spin::Down) };
        let mut out = Csf::zero();
        for pair in &self.pairs {
            for (cu, u) in &pair.first {
                for (cv, v) in &pair.second {
                    let mut orbs = core.clone();
                    orbs.push(u.with_spin(s1));
                    orbs.push(v.with_spin(s2));
                    out.push(pair.coeff * cu * cv, orbs);
                }
            }
        }
        out
    }

    /// Largest deviation of the core and pair functions from orthonormality.
    pub fn orthonormality_error(&self, orbitals: &[RadialOrbital], grid: &RadialGrid) -> Result<f64> {
        let mut functions: Vec<Vec<(f64, SpatialOrbital)>> = self.core.iter().map(|u| vec![(1.0, *u)]).collect();
        for pair in &self.pairs {
            functions.push(pair.first.clone());
            functions.push(pair.second.clone());
        }
        for (_, u) in functions.iter().flatten() {
            let o = orbitals
                .get(u.slot as usize)
                .ok_or_else(|| Error::Shape(format!("no orbital in slot {}", u.slot)))?;
            if o.ell != u.ell {
                return Err(Error::Shape(format!("slot {} holds ℓ = {}, not {}", u.slot, o.ell, u.ell)));
            }
        }
        let overlap = |f: &[(f64, SpatialOrbital)], g: &[(f64, SpatialOrbital)]| -> f64 {
            let mut s = 0.0;
            for (a, u) in f {
                for (b, v) in g {
                    if u.ell == v.ell && u.m == v.m {
                        s += a * b * inner_values(&orbitals[u.slot as usize].values, &orbitals[v.slot as usize].values, grid);
                    }
                }
            }
            s
        };
        let mut worst = 0.0f64;
        for (i, f) in functions.iter().enumerate() {
            for g in &functions[i..] {
                let target = if std::ptr::eq(f, g) { 1.0 } else { 0.0 };
                worst = worst.max((overlap(f, g) - target).abs());
            }
        }
        Ok(worst)
    }
}

/// `⟨f₁(1) f₂(2) | 1/r₁₂ | g₁(1) g₂(2)⟩` for spatial orbitals.
fn coulomb(f1: SpatialOrbital, f2: SpatialOrbital, g1: SpatialOrbital, g2: SpatialOrbital, orbitals: &[RadialOrbital], grid: &RadialGrid) -> f64 {
    if f1.m + f2.m != g1.m + g2.m {
        return 0.0;
    }
    let v = |o: SpatialOrbital| &orbitals[o.slot as usize].values;
    (0..=4u8)
        .map(|k| {
            let c = gaunt_f64(f1.ell, f1.m, g1.ell, g1.m, k) * gaunt_f64(g2.ell, g2.m, f2.ell, f2.m, k);
            if c == 0.0 {
                0.0
            } else {
                c * slater_rk_values(v(f1), v(f2), v(g1), v(g2), k, grid)
            }
        })
        .sum()
}

/// `Σ_{jk} cⱼ cₖ ⟨g₂ⱼ₋₁ g₂ⱼ | V | ·⟩` over every combination term, with the
/// ket pair taken in the given order or swapped.
fn pair_sum(input: &HundInput, orbitals: &[RadialOrbital], grid: &RadialGrid, swapped: bool) -> f64 {
    let mut total = 0.0;
    for p in &input.pairs {
        for q in &input.pairs {
            for (a1, u) in &p.first {
                for (a2, v) in &p.second {
                    for (b1, x) in &q.first {
                        for (b2, y) in &q.second {
                            let w = p.coeff * q.coeff * a1 * a2 * b1 * b2;
                            let (k1, k2) = if swapped { (*y, *x) } else { (*x, *y) };
                            total += w * coulomb(*u, *v, k1, k2, orbitals, grid);
                        }
                    }
                }
            }
        }
    }
    total
}

/// `∬ V(x − y) Φ̄(x, y) Φ(y, x)` with `Φ(x, y) = Σⱼ cⱼ g₂ⱼ₋₁(x) g₂ⱼ(y)`:
/// the two-body part of `−⟨Ψ₁, HΨ₂⟩`, scaled like the interaction.
pub fn pair_overlap_integral(input: &HundInput, orbitals: &[RadialOrbital], params: HamiltonianParams, grid: &RadialGrid) -> f64 {
    params.interaction_scale * pair_sum(input, orbitals, grid, true)
}

/// `∬ V(x − y) |Φ(x, y)|²`, the direct counterpart of [`pair_overlap_integral`].
pub fn pair_direct_integral(input: &HundInput, orbitals: &[RadialOrbital], params: HamiltonianParams, grid: &RadialGrid) -> f64 {
    params.interaction_scale * pair_sum(input, orbitals, grid, false)
}

/// Compares `⟨Ψ₁+Ψ₂, H(Ψ₁+Ψ₂)⟩` with `⟨Ψ₁−Ψ₂, H(Ψ₁−Ψ₂)⟩` through the
/// determinant matrix elements, and checks the difference against both
/// `−4⟨Ψ₁, HΨ₂⟩` and the pair integral.
pub fn check_hund(input: &HundInput, orbitals: &[RadialOrbital], params: HamiltonianParams, grid: &RadialGrid) -> Result<ConditionReport> {
    let ortho = input.orthonormality_error(orbitals, grid)?;
    if ortho > 1e-8 {
        return Err(Error::Precondition(format!("orbitals are not orthonormal (error {ortho:e})")));
    }
    let psi1 = input.psi(false);
    let psi2 = input.psi(true);
    let plus = psi1.plus(&psi2);
    let minus = psi1.minus(&psi2);
    let triplet = matrix_element(&plus, &plus, orbitals, params, grid)?;
    let singlet = matrix_element(&minus, &minus, orbitals, params, grid)?;
    let cross = matrix_element(&psi1, &psi2, orbitals, params, grid)?;
    let pair = pair_overlap_integral(input, orbitals, params, grid);
    let difference = singlet - triplet;
    let gap_cross = (difference + 4.0 * cross).abs();
    let gap_pair = (difference - 4.0 * pair).abs();
    let verdict = if gap_cross > HUND_TOL || gap_pair > HUND_TOL || difference < -HUND_TOL {
        Verdict::Fails
    } else if difference > HUND_TOL {
        Verdict::Holds
    } else {
        Verdict::Inconclusive
    };
    Ok(ConditionReport::new(ConditionId::Hund, verdict)
        .with("form_plus", triplet)
        .with("form_minus", singlet)
        .with("difference", difference)
        .with("cross_element", cross)
        .with("pair_integral", pair)
        .with("pair_direct_integral", pair_direct_integral(input, orbitals, params, grid))
        .with("identity_gap_cross", gap_cross)
        .with("identity_gap_pair", gap_pair)
        .with("orthonormality_error", ortho)
        .with("tolerance", HUND_TOL))
}
