use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::angular::{build_csf, build_jj_config, Csf, CsfLabel, JjConfig, Sector, Shells, Slots};
use crate::error::Error;
use crate::grid::{default_grid, inner_values, kinetic_form, nuclear_form, RadialGrid, RadialOrbital};
use crate::slater_condon::{matrix_element, HamiltonianParams};
use crate::trial::{orthogonalize, random_orbital_set, random_perturbation, SLOT_ELL};

fn grid() -> Arc<RadialGrid> {
    Arc::new(default_grid())
}

fn unit_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / norm).collect()
}

fn random_state(mode: Mode, seed: u64, g: &Arc<RadialGrid>) -> MCState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut orbitals = random_orbital_set(&mut rng, g);
    orbitals.truncate(mode.n_orbitals());
    let x = unit_vector(&mut rng, mode.n_configs());
    MCState::new(mode, orbitals, MixingVector::new(x).unwrap(), g.clone(), HamiltonianParams::default()).unwrap()
}

/// Point of the `sector` symmetry class: equal radials on equal-`ℓ` slot
/// pairs and mixing `α T_sp + β T_pd`.
fn symmetric_state(sector: Sector, alpha: f64, seed: u64, g: &Arc<RadialGrid>) -> MCState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut orbitals = random_orbital_set(&mut rng, g);
    orbitals[3] = orbitals[2].clone();
    orbitals[5] = orbitals[4].clone();
    let beta = (1.0 - alpha * alpha).sqrt();
    let sp = sector_direction(sector, Shells::Sp);
    let pd = sector_direction(sector, Shells::Pd);
    let x: Vec<f64> = (0..5).map(|i| alpha * sp[i] + beta * pd[i]).collect();
    MCState::new(Mode::SpPd, orbitals, MixingVector::new(x).unwrap(), g.clone(), HamiltonianParams::default())
        .unwrap()
}

fn oracle_wavefunction(state: &MCState) -> Csf<f64> {
    let mut psi = Csf::<f64>::zero();
    for (cfg, x) in JjConfig::ALL.iter().zip(state.coeffs()) {
        psi = psi.plus(&build_jj_config(*cfg, cfg.default_slots()).to_f64().scaled(x));
    }
    psi
}

fn oracle_energy(state: &MCState) -> f64 {
    let psi = oracle_wavefunction(state);
    matrix_element(&psi, &psi, &state.orbitals, state.params, &state.grid).unwrap()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

#[test]
fn matches_determinant_oracle_on_random_states() {
    let g = grid();
    for seed in 0..100 {
        let mode = if seed % 2 == 0 { Mode::Sp } else { Mode::SpPd };
        let state = random_state(mode, seed, &g);
        let fast = total_energy(&state).unwrap().total_hartree;
        let oracle = oracle_energy(&state);
        assert!(
            ((fast - oracle) / oracle).abs() < 1e-10,
            "{mode} seed {seed}: {fast} vs {oracle}"
        );
    }
}

#[test]
fn term_breakdown_matches_oracle() {
    let g = grid();
    let state = random_state(Mode::SpPd, 7, &g);
    let psi = oracle_wavefunction(&state);
    let (norm, terms) =
        crate::slater_condon::matrix_element_terms(&psi, &psi, &state.orbitals, state.params, &g).unwrap();
    let report = total_energy(&state).unwrap();
    assert!((norm - 1.0).abs() < 1e-12);
    assert!((report.terms.kinetic - terms.kinetic).abs() < 1e-10);
    assert!((report.terms.nuclear - terms.nuclear).abs() < 1e-10);
    assert!((report.terms.direct + report.terms.exchange - terms.direct - terms.exchange).abs() < 1e-10);
}

#[test]
fn sectors_add_up_and_weights_sum_to_one() {
    let g = grid();
    for seed in 0..10 {
        for mode in [Mode::Sp, Mode::SpPd] {
            let state = random_state(mode, 100 + seed, &g);
            let report = total_energy(&state).unwrap();
            let sum: f64 = report.sector_energy.iter().sum();
            assert!((sum - report.total_hartree).abs() < 1e-12);
            assert!((report.sector_weight.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            let parts = sector_decompose(&state);
            for (p, w) in parts.iter().zip(report.sector_weight) {
                assert!((p.weight - w).abs() < 1e-12, "{}: {} vs {w}", p.sector, p.weight);
            }
            let total: f64 = parts.iter().map(|p| p.weight).sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn pure_first_configuration_splits_one_third_two_thirds() {
    let g = grid();
    let mut state = random_state(Mode::SpPd, 5, &g);
    state.mixing = MixingVector::new(vec![1.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
    let parts = sector_decompose(&state);
    assert!((parts[Sector::SingletP.index()].weight - 1.0 / 3.0).abs() < 1e-12);
    assert!((parts[Sector::TripletP.index()].weight - 2.0 / 3.0).abs() < 1e-12);
    assert!(parts[Sector::TripletD.index()].weight.abs() < 1e-15);

    let sp = parts[Sector::TripletP.index()].sp.as_ref().unwrap();
    let expect: Vec<f64> = state.orbitals[2].values.iter().map(|r| r * (2.0f64 / 3.0).sqrt()).collect();
    assert!(sp.iter().zip(&expect).all(|(a, b)| (a - b).abs() < 1e-14));
}

#[test]
fn triplet_point_lives_in_one_sector() {
    let g = grid();
    let state = symmetric_state(Sector::TripletP, 0.8, 9, &g);
    let parts = sector_decompose(&state);
    for s in [Sector::SingletP, Sector::TripletD] {
        let p = &parts[s.index()];
        assert!(p.weight.abs() < 1e-14);
        if let Some(sp) = &p.sp {
            assert!(max_abs(sp) < 1e-12);
        }
        // with R₄ = R₅ the pieces on the two d slots merge
        let merged: Vec<f64> = (0..g.len()).map(|i| p.pd.iter().map(|(_, f)| f[i]).sum()).collect();
        assert!(max_abs(&merged) < 1e-12);
    }
    assert!((parts[Sector::TripletP.index()].weight - 1.0).abs() < 1e-12);
}

#[test]
fn non_interacting_energy_is_sum_of_one_body_terms() {
    let g = grid();
    let mut state = random_state(Mode::Sp, 11, &g);
    state.params = state.params.non_interacting();
    state.mixing = MixingVector::new(vec![1.0, 0.0]).unwrap();
    let h = |slot: usize| {
        let v = &state.orbitals[slot].values;
        kinetic_form(v, v, SLOT_ELL[slot], &g) + nuclear_form(v, v, state.params.z, &g)
    };
    let expect = 2.0 * h(0) + h(1) + h(2);
    let e = total_energy(&state).unwrap();
    assert!((e.total_hartree - expect).abs() < 1e-12);
    assert_eq!(e.terms.direct, 0.0);
}

#[test]
fn constraint_violation_is_rejected() {
    let g = grid();
    let mut state = random_state(Mode::Sp, 1, &g);
    state.orbitals[2].values.iter_mut().for_each(|v| *v *= 1.001);
    assert!(matches!(total_energy(&state), Err(Error::Constraint(_))));
    assert!(matches!(gradient_radial(&state, 4), Err(Error::Shape(_))));
}

fn tangent_direction(state: &MCState, rng: &mut ChaCha8Rng) -> (Vec<Vec<f64>>, Vec<f64>) {
    let g = &state.grid;
    let mut h: Vec<Vec<f64>> = state
        .orbitals
        .iter()
        .map(|o| {
            let p = random_perturbation(o.ell, rng, g);
            let s = inner_values(&p, &o.values, g);
            p.iter().zip(&o.values).map(|(a, b)| a - s * b).collect()
        })
        .collect();
    // keep ⟨R₀,R₁⟩ = 0 to first order
    let s01 = inner_values(&h[1], &state.orbitals[0].values, g) + inner_values(&h[0], &state.orbitals[1].values, g);
    h[1].iter_mut().zip(&state.orbitals[0].values).for_each(|(a, b)| *a -= s01 * b);
    let x = state.coeffs();
    let mut hx: Vec<f64> = (0..x.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let along: f64 = hx.iter().zip(x).map(|(a, b)| a * b).sum();
    hx.iter_mut().zip(x).for_each(|(a, b)| *a -= along * b);
    (h, hx)
}

fn displaced(state: &MCState, h: &[Vec<f64>], hx: &[f64], eps: f64) -> MCState {
    let mut s = state.clone();
    for (o, d) in s.orbitals.iter_mut().zip(h) {
        o.values.iter_mut().zip(d).for_each(|(v, dv)| *v += eps * dv);
    }
    let x: Vec<f64> = state.coeffs().iter().zip(hx).map(|(v, dv)| v + eps * dv).collect();
    s.mixing = MixingVector::new(x).unwrap();
    s
}

#[test]
fn gradient_matches_central_difference() {
    let g = grid();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for seed in 0..6 {
        let mode = if seed % 2 == 0 { Mode::Sp } else { Mode::SpPd };
        let state = random_state(mode, 200 + seed, &g);
        let grad = energy_gradient(&state);
        let (h, hx) = tangent_direction(&state, &mut rng);
        let eps = 1e-5;
        let ep = energy_unchecked(&displaced(&state, &h, &hx, eps)).total_hartree;
        let em = energy_unchecked(&displaced(&state, &h, &hx, -eps)).total_hartree;
        let fd = (ep - em) / (2.0 * eps);
        let analytic: f64 = grad
            .orbitals
            .iter()
            .zip(&h)
            .map(|(gr, d)| inner_values(gr, d, &g))
            .sum::<f64>()
            + grad.mixing.iter().zip(&hx).map(|(a, b)| a * b).sum::<f64>();
        assert!(
            ((fd - analytic) / analytic).abs() < 1e-6,
            "{mode}: fd {fd} analytic {analytic}"
        );
    }
}

#[test]
fn single_slot_gradients_match_central_difference() {
    let g = grid();
    let state = random_state(Mode::SpPd, 33, &g);
    let grad = energy_gradient(&state);
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    for slot in 0..6 {
        let d = random_perturbation(SLOT_ELL[slot], &mut rng, &g);
        let shift = |eps: f64| {
            let mut s = state.clone();
            s.orbitals[slot].values.iter_mut().zip(&d).for_each(|(v, dv)| *v += eps * dv);
            energy_unchecked(&s).total_hartree
        };
        let fd = (shift(1e-5) - shift(-1e-5)) / 2e-5;
        let analytic = inner_values(&grad.orbitals[slot], &d, &g);
        assert!(((fd - analytic) / analytic).abs() < 1e-6, "R{slot}: {fd} vs {analytic}");
        assert_eq!(gradient_radial(&state, slot).unwrap(), grad.orbitals[slot]);
    }
}

fn assert_proportional(lhs: &[f64], rhs: &[f64], k: f64) {
    let scale = max_abs(lhs).max(max_abs(rhs));
    let err = lhs.iter().zip(rhs).fold(0.0f64, |m, (a, b)| m.max((a - k * b).abs()));
    assert!(err / scale < 1e-10, "relative deviation {:.3e}", err / scale);
}

#[test]
fn singlet_points_have_the_occupation_ratio_gradients() {
    let g = grid();
    for (seed, alpha) in [(40, 0.9), (41, 0.3), (42, -0.6)] {
        let state = symmetric_state(Sector::SingletP, alpha, seed, &g);
        let grad = energy_gradient(&state);
        assert_proportional(&grad.orbitals[2], &grad.orbitals[3], 0.5);
        assert_proportional(&grad.orbitals[4], &grad.orbitals[5], 2.0 / 3.0);
    }
}

#[test]
fn triplet_points_have_proportional_d_gradients() {
    // (−c√5 + 4d) : 3e = 21 : 9 on the triplet line 3d = 4e, 4c = −√5 d
    let g = grid();
    for (seed, alpha) in [(50, 0.95), (51, 0.5)] {
        let state = symmetric_state(Sector::TripletP, alpha, seed, &g);
        let grad = energy_gradient(&state);
        assert_proportional(&grad.orbitals[4], &grad.orbitals[5], 7.0 / 3.0);
    }
}

#[test]
fn symmetric_points_are_stationary_in_the_mixing() {
    let g = grid();
    for sector in Sector::ALL {
        let alpha = if sector == Sector::TripletD { 0.0 } else { 0.7 };
        let state = symmetric_state(sector, alpha, 60, &g);
        let m = config_matrices(&state.orbitals, 5, state.params, &g);
        for s in Sector::ALL {
            if s != sector {
                assert!(max_abs(m.sector[s.index()].as_slice()) > 0.0);
            }
        }
        // H x has no component outside the sector's own two directions
        let grad = energy_gradient(&state);
        for other in Sector::ALL.into_iter().filter(|s| *s != sector) {
            for shells in [Shells::Sp, Shells::Pd] {
                let dir = sector_direction(other, shells);
                let proj: f64 = dir.iter().zip(&grad.mixing).map(|(a, b)| a * b).sum();
                assert!(proj.abs() < 1e-12, "{sector} leaks into {other}: {proj}");
            }
        }
    }
}

#[test]
fn sp_energy_is_weighted_sum_of_normalized_sector_energies() {
    let g = grid();
    for seed in 0..5 {
        let state = random_state(Mode::Sp, 300 + seed, &g);
        let report = total_energy(&state).unwrap();
        let parts = sector_decompose(&state);
        let mut bound = 0.0;
        for sector in [Sector::SingletP, Sector::TripletP] {
            let part = &parts[sector.index()];
            let p = part.sp.as_ref().unwrap();
            let norm = part.weight.sqrt();
            let mut pure = state.clone();
            let radial = RadialOrbital::new(1, p.iter().map(|v| v / norm).collect());
            pure.orbitals[2] = radial.clone();
            pure.orbitals[3] = radial;
            let dir = sector_direction(sector, Shells::Sp);
            pure.mixing = MixingVector::new(dir[..2].to_vec()).unwrap();
            bound += part.weight * total_energy(&pure).unwrap().total_hartree;
        }
        assert!(report.total_hartree >= bound - 1e-12);
        assert!((report.total_hartree - bound).abs() < 1e-10);
    }
}

fn flip(state: &MCState, slot: usize, coeffs: &[usize]) -> MCState {
    let mut s = state.clone();
    s.orbitals[slot].values.iter_mut().for_each(|v| *v = -*v);
    let mut x = s.coeffs().to_vec();
    coeffs.iter().for_each(|&i| x[i] = -x[i]);
    s.mixing = MixingVector::new(x).unwrap();
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn sign_gauge_leaves_energy_invariant(seed in 0u64..10_000) {
        let g = grid();
        let state = random_state(Mode::SpPd, seed, &g);
        let e = total_energy(&state).unwrap().total_hartree;
        // each radial sign flip is absorbed by the coefficients that use it
        for (slot, coeffs) in [(2, vec![0, 2]), (3, vec![1, 3, 4]), (4, vec![2, 3]), (5, vec![4])] {
            let flipped = total_energy(&flip(&state, slot, &coeffs)).unwrap().total_hartree;
            prop_assert!((flipped - e).abs() < 1e-12);
        }
    }

    #[test]
    fn global_mixing_sign_is_irrelevant(seed in 0u64..10_000) {
        let g = grid();
        let state = random_state(Mode::Sp, seed, &g);
        let e = total_energy(&state).unwrap().total_hartree;
        let flipped = total_energy(&flip(&flip(&state, 2, &[0]), 3, &[1])).unwrap().total_hartree;
        prop_assert!((flipped - e).abs() < 1e-12);
    }
}

fn f_state(seed: u64, g: &Arc<RadialGrid>) -> (Vec<RadialOrbital>, f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let orbitals = random_orbital_set(&mut rng, g);
    let a: f64 = rng.gen_range(0.5..1.0);
    let c = -(1.0 - a * a).sqrt();
    (orbitals, a, c)
}

fn f_oracle(orbitals: &[RadialOrbital], a: f64, c: f64, delta: &[f64], g: &RadialGrid) -> f64 {
    let psi = build_csf(CsfLabel::TripletP1Sp, Slots::new(0, 1, 2))
        .to_f64()
        .scaled(&a)
        .plus(&build_csf(CsfLabel::TripletP1Pd, Slots::new(0, 2, 4)).to_f64().scaled(&c));
    let probe = build_csf(CsfLabel::TripletP1Sp, Slots::new(0, 1, 3)).to_f64();
    let mut set = orbitals.to_vec();
    set[3] = RadialOrbital::new(1, delta.to_vec());
    matrix_element(&psi, &probe, &set, HamiltonianParams::default(), g).unwrap()
}

#[test]
fn f_function_reproduces_matrix_element() {
    let g = grid();
    let (orb, a, c) = f_state(70, &g);
    let params = HamiltonianParams::default();
    let f = f_function(&orb[0], &orb[1], &orb[2], &orb[4], a, c, params, &g, FVariant::Complete);
    let printed = f_function_printed(&orb[0], &orb[1], &orb[2], &orb[4], a, c, params, &g);
    let mut rng = ChaCha8Rng::seed_from_u64(71);
    let mut printed_gap: f64 = 0.0;
    for _ in 0..10 {
        let raw = RadialOrbital::new(1, random_perturbation(1, &mut rng, &g));
        let delta = orthogonalize(raw, &orb[2], &g).values;
        let fd: Vec<f64> = f.iter().zip(&delta).map(|(x, y)| x * y).collect();
        let lhs = g.integrate(&fd);
        let oracle = f_oracle(&orb, a, c, &delta, &g);
        assert!(((lhs - oracle) / oracle).abs() < 1e-8, "{lhs} vs {oracle}");
        let pd: Vec<f64> = printed.iter().zip(&delta).map(|(x, y)| x * y).collect();
        printed_gap = printed_gap.max(((g.integrate(&pd) - oracle) / oracle).abs());
    }
    assert!(printed_gap > 1e-4, "dipole-only form should differ, gap {printed_gap}");
}

#[test]
fn f_vanishes_without_mixing() {
    let g = grid();
    let (orb, _, _) = f_state(72, &g);
    let f = f_function(&orb[0], &orb[1], &orb[2], &orb[4], 0.0, 0.0, HamiltonianParams::default(), &g, FVariant::Complete);
    assert!(f.iter().all(|v| *v == 0.0));
}

#[test]
fn f_one_body_part_matches_pointwise_formula() {
    // −(r²/2) R″ − r R′ + R − Z r R away from the grid ends
    let g = grid();
    let (orb, _, _) = f_state(73, &g);
    let params = HamiltonianParams::default().non_interacting();
    let f = f_function(&orb[0], &orb[1], &orb[2], &orb[4], 1.0, 0.0, params, &g, FVariant::Complete);
    let p = &orb[2].values;
    let r = g.r();
    let du = g.d_du(p);
    let du2 = g.d_du(&du);
    for i in 20..g.len() - 20 {
        if r[i] < 0.05 || r[i] > 10.0 {
            continue;
        }
        // r R′ = D_u R, r² R″ = D_u² R − D_u R
        let pointwise = -(du2[i] - du[i]) / 2.0 - du[i] + p[i] - params.z * r[i] * p[i];
        let scale = p.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!((f[i] - pointwise).abs() < 1e-6 * scale, "r = {}: {} vs {pointwise}", r[i], f[i]);
    }
}

#[test]
fn compiled_cross_sector_blocks_vanish() {
    let g = grid();
    let state = random_state(Mode::SpPd, 80, &g);
    let m = config_matrices(&state.orbitals, 5, state.params, &g);
    // ¹P and ³P entries of the first configuration vanish in ³D
    assert_eq!(m.sector[Sector::TripletD.index()][(0, 0)], 0.0);
    assert_eq!(m.sector[Sector::TripletD.index()][(1, 4)], 0.0);
}
