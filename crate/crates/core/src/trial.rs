//! Trial radial functions: hydrogenic shapes for initial guesses and random
//! smooth orbitals for property tests.

use rand::Rng;

use crate::grid::{inner_values, RadialGrid, RadialOrbital};

/// Slot layout of the five-configuration wavefunction: `ℓ` of `R₀ … R₅`.
pub const SLOT_ELL: [u8; 6] = [0, 0, 1, 1, 2, 2];

/// Normalized hydrogen-like radial function `R_{nℓ}` for charge `z`.
pub fn hydrogenic(n: u32, ell: u8, z: f64, grid: &RadialGrid) -> RadialOrbital {
    assert!(u32::from(ell) < n && n <= 3, "unsupported hydrogenic shell");
    let shape = move |r: f64| {
        let x = z * r;
        match (n, ell) {
            (1, 0) => (-x).exp(),
            (2, 0) => (2.0 - x) * (-x / 2.0).exp(),
            (2, 1) => x * (-x / 2.0).exp(),
            (3, 0) => (27.0 - 18.0 * x + 2.0 * x * x) * (-x / 3.0).exp(),
            (3, 1) => x * (6.0 - x) * (-x / 3.0).exp(),
            (3, 2) => x * x * (-x / 3.0).exp(),
            _ => unreachable!(),
        }
    };
    RadialOrbital::from_fn(ell, grid, shape).normalized(grid)
}

/// `r^ℓ (c₀ + c₁ r + c₂ r²) e^{-ζ r}`, normalized, with random `c` and `ζ`.
pub fn random_smooth<R: Rng>(ell: u8, rng: &mut R, grid: &RadialGrid) -> RadialOrbital {
    let zeta = rng.gen_range(0.8..4.0);
    let c: [f64; 3] = [
        rng.gen_range(0.5..1.5),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-0.3..0.3),
    ];
    RadialOrbital::from_fn(ell, grid, |r| {
        r.powi(i32::from(ell)) * (c[0] + c[1] * r + c[2] * r * r) * (-zeta * r).exp()
    })
    .normalized(grid)
}

/// Removes the component of `f` along the normalized `against`, then normalizes.
pub fn orthogonalize(mut f: RadialOrbital, against: &RadialOrbital, grid: &RadialGrid) -> RadialOrbital {
    let s = inner_values(&f.values, &against.values, grid);
    for (x, y) in f.values.iter_mut().zip(&against.values) {
        *x -= s * y;
    }
    f.normalized(grid)
}

/// Six random orbitals `R₀ … R₅` with `R₁ ⟂ R₀`.
pub fn random_orbital_set<R: Rng>(rng: &mut R, grid: &RadialGrid) -> Vec<RadialOrbital> {
    let mut set: Vec<RadialOrbital> = SLOT_ELL.iter().map(|&l| random_smooth(l, rng, grid)).collect();
    set[1] = orthogonalize(set[1].clone(), &set[0], grid);
    set
}

/// Smooth bump supported away from the grid ends, for perturbation tests.
pub fn random_perturbation<R: Rng>(ell: u8, rng: &mut R, grid: &RadialGrid) -> Vec<f64> {
    let zeta = rng.gen_range(0.7..3.0);
    let a = rng.gen_range(-1.0..1.0);
    let b = rng.gen_range(-1.0..1.0);
    let w = rng.gen_range(0.5..3.0);
    grid.sample(|r| r.powi(i32::from(ell)) * (a + b * (w * r).sin()) * (-zeta * r).exp())
}
