//! `F(r)` with `⟨HΨ, ³P_sp(R₀,R₁,δR)⟩ = ∫ F δR dr` for
//! `Ψ = a ³P_sp(R₀,R₁,R₂) + c ³P_pd(R₀,R₂,R₄)`.

use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::grid::{kinetic_form_grad, RadialGrid, RadialOrbital};
use crate::slater_condon::{yk_potential, HamiltonianParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FVariant {
    /// Every term of the reduced matrix element, including the quadrupole
    /// `p → p, d → s` cross term.
    Complete,
    /// Only the dipole cross term.
    Printed,
}

/// `F` sampled on the grid. The one-body part is the exact discrete adjoint
/// of the kinetic form, so `Σ w F δR` reproduces the Hamiltonian matrix
/// element to rounding.
#[allow(clippy::too_many_arguments)]
pub fn f_function(
    r0: &RadialOrbital,
    r1: &RadialOrbital,
    r2: &RadialOrbital,
    r4: &RadialOrbital,
    a: f64,
    c: f64,
    params: HamiltonianParams,
    grid: &RadialGrid,
    variant: FVariant,
) -> Vec<f64> {
    let r = grid.r();
    let w = grid.weights();
    let (p0, p1, p2, p4) = (&r0.values, &r1.values, &r2.values, &r4.values);
    let scale = params.interaction_scale;

    let kinetic = kinetic_form_grad(p2, 1, grid);
    let y00 = yk_potential(p0, p0, 0, grid);
    let y11 = yk_potential(p1, p1, 0, grid);
    let y02 = yk_potential(p0, p2, 1, grid);
    let y12 = yk_potential(p1, p2, 1, grid);
    let y14 = match variant {
        FVariant::Complete => Some(yk_potential(p1, p4, 2, grid)),
        FVariant::Printed => None,
    };

    (0..grid.len())
        .map(|i| {
            let r2 = r[i] * r[i];
            let one_body = kinetic[i] / w[i] - params.z * r[i] * p2[i];
            let direct = r2 * p2[i] * (2.0 * y00[i] + y11[i]);
            let exchange = r2 * (p0[i] * y02[i] + p1[i] * y12[i]) / 3.0;
            let mut cross = -SQRT_2 / 3.0 * r2 * p4[i] * y12[i];
            if let Some(y) = &y14 {
                cross += SQRT_2 / 5.0 * r2 * p2[i] * y[i];
            }
            a * (one_body + scale * (direct - exchange)) + c * scale * cross
        })
        .collect()
}

/// [`f_function`] restricted to the dipole cross term.
#[allow(clippy::too_many_arguments)]
pub fn f_function_printed(
    r0: &RadialOrbital,
    r1: &RadialOrbital,
    r2: &RadialOrbital,
    r4: &RadialOrbital,
    a: f64,
    c: f64,
    params: HamiltonianParams,
    grid: &RadialGrid,
) -> Vec<f64> {
    f_function(r0, r1, r2, r4, a, c, params, grid, FVariant::Printed)
}
