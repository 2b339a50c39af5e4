//! `(K_ℓ + σ M)⁻¹` preconditioner: the kinetic form plus a shifted mass
//! matrix `M = diag(w r²)`, factored once per angular momentum.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::grid::{kinetic_form_grad, RadialGrid};

pub struct Preconditioner {
    matrices: Vec<DMatrix<f64>>,
    factors: Vec<Cholesky<f64, Dyn>>,
    mass: Vec<f64>,
}

impl Preconditioner {
    pub fn new(grid: &RadialGrid, shift: f64) -> Self {
        let n = grid.len();
        let mass: Vec<f64> = grid
            .weights()
            .iter()
            .zip(grid.r())
            .map(|(w, r)| w * r * r)
            .collect();
        let mut matrices = Vec::new();
        let mut factors = Vec::new();
        for ell in 0..=2u8 {
            let mut m = DMatrix::<f64>::zeros(n, n);
            let mut unit = vec![0.0; n];
            for j in 0..n {
                unit[j] = 1.0;
                let col = kinetic_form_grad(&unit, ell, grid);
                unit[j] = 0.0;
                for i in 0..n {
                    m[(i, j)] = col[i];
                }
            }
            // symmetrize away rounding before factoring
            let mut m = (&m + m.transpose()) * 0.5;
            for i in 0..n {
                m[(i, i)] += shift * mass[i];
            }
            let chol = Cholesky::new(m.clone()).expect("kinetic form plus positive shift is positive definite");
            matrices.push(m);
            factors.push(chol);
        }
        Self {
            matrices,
            factors,
            mass,
        }
    }

    /// `w r²`, the metric of `L²(r² dr)` on grid values.
    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn solve(&self, ell: u8, rhs: &[f64]) -> Vec<f64> {
        let b = DVector::from_column_slice(rhs);
        self.factors[ell as usize].solve(&b).iter().copied().collect()
    }

    /// `vᵀ P v`
    pub fn energy_norm(&self, ell: u8, v: &[f64]) -> f64 {
        let x = DVector::from_column_slice(v);
        x.dot(&(&self.matrices[ell as usize] * &x))
    }
}
