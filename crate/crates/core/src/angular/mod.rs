//! Spin-orbitals, Slater determinants and configuration state functions with
//! exact coefficients, together with ladder and Casimir operators.

mod builders;
mod classify;
mod csf;
mod orbital;

#[cfg(test)]
mod tests;

pub use builders::{
    build_coupled, build_csf, build_highest_weight, build_jj_config, coupling_matrices, gram,
    CouplingMatrices, CsfLabel, ExactMatrix, JjConfig, Sector, Shells, Slots, DEFAULT_PD_SLOTS,
    DEFAULT_SP_SLOTS,
};
pub use classify::{
    classify_by_casimir, classify_symmetry, classify_with_tol, expand_state, orbital_relation,
    OrbitalEqualities, SymmetryClass, COEFF_TOL, ORBITAL_TOL,
};
pub use csf::{
    apply_ladder, measure_casimir, measure_casimir_approx, Coefficient, Csf, Eigenvalue, Ladder,
    Observable,
};
pub use orbital::{Determinant, Spin, SpinOrbital};
