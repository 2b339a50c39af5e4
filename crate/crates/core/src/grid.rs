//! Logarithmic radial mesh, quadrature and derivative stencils.
//!
//! Nodes are `r_j = r_min · e^{j h}`. Integrals use the trapezoid rule in
//! `u = ln r` with the Jacobian `r` folded into the weights, which is
//! spectrally accurate for integrands that vanish at both ends. Derivatives
//! are taken in `u` with centred finite-difference stencils (one-sided near
//! the ends) and mapped back by `d/dr = r^{-1} d/du`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_POINTS: usize = 220;
pub const DEFAULT_R_MIN: f64 = 1e-5;
pub const DEFAULT_R_MAX: f64 = 60.0;

/// Stencil width for first derivatives in `u`.
const STENCIL: usize = 11;

/// Metadata written into artifact headers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n_points: usize,
    pub r_min: f64,
    pub r_max: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            n_points: DEFAULT_POINTS,
            r_min: DEFAULT_R_MIN,
            r_max: DEFAULT_R_MAX,
        }
    }
}

#[derive(Debug, Clone)]
struct StencilRow {
    start: usize,
    weights: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct RadialGrid {
    spec: GridSpec,
    h: f64,
    r: Vec<f64>,
    w: Vec<f64>,
    du: Vec<StencilRow>,
}

impl RadialGrid {
    pub const RULE: &'static str = "trapezoid-in-ln(r), 11-point d/du stencils";

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    /// Spacing in the log variable.
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn r(&self) -> &[f64] {
        &self.r
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    /// `Σ w_j f(r_j) ≈ ∫ f(r) dr`
    pub fn integrate(&self, f: &[f64]) -> f64 {
        debug_assert_eq!(f.len(), self.len());
        self.w.iter().zip(f).map(|(w, f)| w * f).sum()
    }

    /// Sample a function of `r` on the nodes.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        self.r.iter().map(|&r| f(r)).collect()
    }

    /// `D_u f`, the derivative with respect to `ln r`.
    pub fn d_du(&self, f: &[f64]) -> Vec<f64> {
        debug_assert_eq!(f.len(), self.len());
        self.du
            .iter()
            .map(|row| {
                row.weights
                    .iter()
                    .zip(&f[row.start..])
                    .map(|(c, v)| c * v)
                    .sum()
            })
            .collect()
    }

    /// Transpose of `D_u`.
    pub fn d_du_transpose(&self, g: &[f64]) -> Vec<f64> {
        debug_assert_eq!(g.len(), self.len());
        let mut out = vec![0.0; self.len()];
        for (row, gi) in self.du.iter().zip(g) {
            for (k, c) in row.weights.iter().enumerate() {
                out[row.start + k] += c * gi;
            }
        }
        out
    }

    fn check(&self, values: &[f64]) -> Result<()> {
        if values.len() != self.len() {
            return Err(Error::Shape(format!(
                "orbital has {} samples, grid has {}",
                values.len(),
                self.len()
            )));
        }
        Ok(())
    }
}

pub fn make_log_grid(n_points: usize, r_min: f64, r_max: f64) -> Result<RadialGrid> {
    if n_points < 2 {
        return Err(Error::Parameter(format!(
            "grid needs at least 2 points, got {n_points}"
        )));
    }
    if !(r_min.is_finite() && r_max.is_finite() && r_min > 0.0 && r_min < r_max) {
        return Err(Error::Parameter(format!(
            "grid bounds must satisfy 0 < r_min < r_max, got [{r_min}, {r_max}]"
        )));
    }
    let h = (r_max / r_min).ln() / (n_points - 1) as f64;
    let mut r: Vec<f64> = (0..n_points)
        .map(|j| r_min * (j as f64 * h).exp())
        .collect();
    r[n_points - 1] = r_max;
    let mut w: Vec<f64> = r.iter().map(|r| h * r).collect();
    w[0] *= 0.5;
    w[n_points - 1] *= 0.5;

    let width = STENCIL.min(n_points);
    let offsets: Vec<f64> = (0..width).map(|k| k as f64).collect();
    let du = (0..n_points)
        .map(|i| {
            let start = i.saturating_sub(width / 2).min(n_points - width);
            let x0 = (i - start) as f64;
            let mut weights: Vec<f64> = fornberg_first_derivative(x0, &offsets)
                .into_iter()
                .map(|c| c / h)
                .collect();
            // constants must differentiate to exactly zero
            let drift: f64 = weights.iter().sum();
            weights[i - start] -= drift;
            StencilRow { start, weights }
        })
        .collect();

    Ok(RadialGrid {
        spec: GridSpec {
            n_points,
            r_min,
            r_max,
        },
        h,
        r,
        w,
        du,
    })
}

pub fn default_grid() -> RadialGrid {
    let s = GridSpec::default();
    make_log_grid(s.n_points, s.r_min, s.r_max).expect("default grid parameters are valid")
}

/// First-derivative finite-difference weights at `x0` for nodes `xs`.
fn fornberg_first_derivative(x0: f64, xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    // c[j][m]: weight of node j for the m-th derivative, m ∈ {0, 1}
    let mut c = vec![[0.0f64; 2]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    for i in 1..n {
        let mn = i.min(1);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[1]).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialOrbital {
    pub ell: u8,
    pub values: Vec<f64>,
}

impl RadialOrbital {
    pub fn new(ell: u8, values: Vec<f64>) -> Self {
        Self { ell, values }
    }

    pub fn zeros(ell: u8, n: usize) -> Self {
        Self::new(ell, vec![0.0; n])
    }

    pub fn from_fn(ell: u8, grid: &RadialGrid, f: impl Fn(f64) -> f64) -> Self {
        Self::new(ell, grid.sample(f))
    }

    /// `‖R‖` in `L²(r² dr)`.
    pub fn norm(&self, grid: &RadialGrid) -> f64 {
        inner_values(&self.values, &self.values, grid).sqrt()
    }

    pub fn normalized(mut self, grid: &RadialGrid) -> Self {
        let n = self.norm(grid);
        if n > 0.0 {
            self.values.iter_mut().for_each(|v| *v /= n);
        }
        self
    }

    /// Largest `|R(r_j)| / r_j^ℓ` over the first few nodes relative to the
    /// orbital's peak. Small values mean the orbital behaves like `r^ℓ` or
    /// better near the origin.
    pub fn origin_regularity(&self, grid: &RadialGrid) -> f64 {
        let peak = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if peak == 0.0 {
            return 0.0;
        }
        let r_ref = grid.r()[grid.len() / 2];
        self.values
            .iter()
            .zip(grid.r())
            .take(4)
            .map(|(v, r)| v.abs() / (r / r_ref).powi(self.ell as i32))
            .fold(0.0f64, f64::max)
            / peak
    }
}

/// `∫ f g r² dr` on raw samples.
pub fn inner_values(f: &[f64], g: &[f64], grid: &RadialGrid) -> f64 {
    grid.w
        .iter()
        .zip(&grid.r)
        .zip(f.iter().zip(g))
        .map(|((w, r), (a, b))| w * r * r * a * b)
        .sum()
}

pub fn inner_r2(f: &RadialOrbital, g: &RadialOrbital, grid: &RadialGrid) -> Result<f64> {
    grid.check(&f.values)?;
    grid.check(&g.values)?;
    Ok(inner_values(&f.values, &g.values, grid))
}

pub fn radial_derivative(f: &RadialOrbital, grid: &RadialGrid) -> Result<Vec<f64>> {
    grid.check(&f.values)?;
    Ok(grid
        .d_du(&f.values)
        .into_iter()
        .zip(&grid.r)
        .map(|(d, r)| d / r)
        .collect())
}

/// Symmetric bilinear kinetic form `½∫[r² a′b′ + ℓ(ℓ+1) a b] dr`.
pub fn kinetic_form(a: &[f64], b: &[f64], ell: u8, grid: &RadialGrid) -> f64 {
    let da = grid.d_du(a);
    let db = if std::ptr::eq(a, b) { da.clone() } else { grid.d_du(b) };
    let l = f64::from(ell);
    let cent = l * (l + 1.0);
    0.5 * grid
        .w
        .iter()
        .enumerate()
        .map(|(j, w)| w * (da[j] * db[j] + cent * a[j] * b[j]))
        .sum::<f64>()
}

/// Euclidean gradient of `kinetic_form(a, b)` with respect to the samples of `a`.
pub fn kinetic_form_grad(b: &[f64], ell: u8, grid: &RadialGrid) -> Vec<f64> {
    let db = grid.d_du(b);
    let l = f64::from(ell);
    let cent = l * (l + 1.0);
    let wdb: Vec<f64> = grid.w.iter().zip(&db).map(|(w, d)| 0.5 * w * d).collect();
    let mut out = grid.d_du_transpose(&wdb);
    for (j, o) in out.iter_mut().enumerate() {
        *o += 0.5 * cent * grid.w[j] * b[j];
    }
    out
}

/// `-Z ∫ a b r dr`
pub fn nuclear_form(a: &[f64], b: &[f64], z: f64, grid: &RadialGrid) -> f64 {
    -z * grid
        .w
        .iter()
        .zip(&grid.r)
        .zip(a.iter().zip(b))
        .map(|((w, r), (x, y))| w * r * x * y)
        .sum::<f64>()
}

pub fn kinetic_radial(orbital: &RadialOrbital, grid: &RadialGrid) -> Result<f64> {
    grid.check(&orbital.values)?;
    Ok(kinetic_form(
        &orbital.values,
        &orbital.values,
        orbital.ell,
        grid,
    ))
}
