//! Symmetry class of a five-configuration wavefunction from its mixing
//! coefficients and the relations between its paired radial orbitals.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::builders::{build_jj_config, JjConfig};
use super::csf::{measure_casimir_approx, Csf, Observable};
use crate::grid::{inner_values, RadialGrid};

/// Tolerance on `‖R_i ∓ R_j‖` in `L²(r² dr)` for orbital equalities.
pub const ORBITAL_TOL: f64 = 1e-6;
/// Absolute tolerance on the linear coefficient relations.
pub const COEFF_TOL: f64 = 1e-6;

/// Which paired orbitals coincide up to sign: `Some(ε)` means `R_i = ε R_j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct OrbitalEqualities {
    pub r2_r3: Option<i8>,
    pub r4_r5: Option<i8>,
}

/// `Some(+1)` if `f = g`, `Some(-1)` if `f = -g`, within `tol`.
pub fn orbital_relation(f: &[f64], g: &[f64], grid: &RadialGrid, tol: f64) -> Option<i8> {
    let dist = |sign: f64| {
        let d: Vec<f64> = f.iter().zip(g).map(|(a, b)| a - sign * b).collect();
        inner_values(&d, &d, grid).max(0.0).sqrt()
    };
    if dist(1.0) < tol {
        Some(1)
    } else if dist(-1.0) < tol {
        Some(-1)
    } else {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SymmetryClass {
    SingletP { eps: i8, eps_prime: i8 },
    TripletP { eps: i8, eps_prime: i8 },
    TripletD { eps: i8, eps_prime: i8, eps_second: i8 },
    Mixed,
}

impl SymmetryClass {
    pub fn is_symmetric(self) -> bool {
        self != SymmetryClass::Mixed
    }

    pub fn term(self) -> &'static str {
        match self {
            SymmetryClass::SingletP { .. } => "1P1",
            SymmetryClass::TripletP { .. } => "3P1",
            SymmetryClass::TripletD { .. } => "3D1",
            SymmetryClass::Mixed => "mixed",
        }
    }
}

impl fmt::Display for SymmetryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = |e: i8| if e > 0 { '+' } else { '-' };
        match *self {
            SymmetryClass::SingletP { eps, eps_prime } | SymmetryClass::TripletP { eps, eps_prime } => {
                write!(f, "{}({},{})", self.term(), s(eps), s(eps_prime))
            }
            SymmetryClass::TripletD {
                eps,
                eps_prime,
                eps_second,
            } => write!(f, "3D1({},{},{})", s(eps), s(eps_prime), s(eps_second)),
            SymmetryClass::Mixed => f.write_str("mixed"),
        }
    }
}

fn pad(coeffs: &[f64]) -> [f64; 5] {
    let mut x = [0.0; 5];
    x[..coeffs.len().min(5)].copy_from_slice(&coeffs[..coeffs.len().min(5)]);
    x
}

/// Decides membership in the ¹P₁, ³P₁ or ³D₁ sets. An orbital relation is
/// only demanded when the wavefunction actually depends on both orbitals of
/// the pair; otherwise either sign is admissible.
pub fn classify_symmetry(coeffs: &[f64], eq: OrbitalEqualities) -> SymmetryClass {
    classify_with_tol(coeffs, eq, COEFF_TOL)
}

pub fn classify_with_tol(coeffs: &[f64], eq: OrbitalEqualities, tol: f64) -> SymmetryClass {
    let [a, b, c, d, e] = pad(coeffs);
    let nz = |v: f64| v.abs() > tol;
    let close = |x: f64, y: f64| (x - y).abs() <= tol;
    let s2 = 2f64.sqrt();
    let s5 = 5f64.sqrt();

    let needs_23 = (nz(a) || nz(c)) && (nz(b) || nz(d) || nz(e));
    let needs_45 = (nz(c) || nz(d)) && nz(e);
    let admissible = |want: Option<i8>, needed: bool, eps: i8| {
        if needed {
            want == Some(eps)
        } else {
            want.is_none_or(|w| w == eps)
        }
    };

    let signs = [1i8, -1];
    for &eps in &signs {
        if !admissible(eq.r2_r3, needs_23, eps) {
            continue;
        }
        for &eps_p in &signs {
            if !admissible(eq.r4_r5, needs_45, eps_p) {
                continue;
            }
            let (ef, epf) = (f64::from(eps), f64::from(eps_p));
            if close(a, ef * s2 * b) && close(3.0 * d, 4.0 * epf * e) && close(4.0 * c, -ef * s5 * d) {
                return SymmetryClass::TripletP { eps, eps_prime: eps_p };
            }
            if close(a * s2, -ef * b) && close(3.0 * d, -epf * e) && close(c, -ef * s5 * d) {
                return SymmetryClass::SingletP { eps, eps_prime: eps_p };
            }
            let eps_s: i8 = if c >= 0.0 { 1 } else { -1 };
            let esf = f64::from(eps_s);
            if close(a, 0.0)
                && close(b, 0.0)
                && close(c, esf / s2)
                && close(d, (0.4f64).sqrt() * ef * esf)
                && close(e, -(0.1f64).sqrt() * ef * epf * esf)
            {
                return SymmetryClass::TripletD {
                    eps,
                    eps_prime: eps_p,
                    eps_second: eps_s,
                };
            }
        }
    }
    SymmetryClass::Mixed
}

fn jj_configs_f64() -> &'static [Csf<f64>; 5] {
    static CACHE: OnceLock<[Csf<f64>; 5]> = OnceLock::new();
    CACHE.get_or_init(|| JjConfig::ALL.map(|c| build_jj_config(c, c.default_slots()).to_f64()))
}

/// Full determinant expansion of `Σ x_i Φ_i`. Orbitals declared equal up to
/// sign are merged onto the lower slot; the others stay independent labels.
pub fn expand_state(coeffs: &[f64], eq: OrbitalEqualities) -> Csf<f64> {
    let mut out = Csf::<f64>::zero();
    for (x, cfg) in coeffs.iter().zip(jj_configs_f64()) {
        if *x != 0.0 {
            out = out.plus(&cfg.scaled(x));
        }
    }
    out.map_slots(|slot| match (slot, eq.r2_r3, eq.r4_r5) {
        (3, Some(e), _) => (2, i64::from(e)),
        (5, _, Some(e)) => (4, i64::from(e)),
        _ => (slot, 1),
    })
}

/// Term symbol read off the L² and S² eigenvalues of an expanded state.
pub fn classify_by_casimir(state: &Csf<f64>, tol: f64) -> &'static str {
    let l2 = measure_casimir_approx(state, Observable::L2, tol);
    let s2 = measure_casimir_approx(state, Observable::S2, tol);
    let near = |v: Option<f64>, t: f64| v.is_some_and(|v| (v - t).abs() < 1e-6);
    match (near(l2, 2.0), near(l2, 6.0), near(s2, 0.0), near(s2, 2.0)) {
        (true, _, true, _) => "1P1",
        (true, _, _, true) => "3P1",
        (_, true, _, true) => "3D1",
        _ => "mixed",
    }
}
