use proptest::prelude::*;

use super::*;
use crate::exact::{ExactScalar, Rational};

use Spin::{Down, Up};

fn sq(n: i128, d: i128) -> ExactScalar {
    ExactScalar::sqrt_frac(n, d)
}

fn core_plus(extra: &[SpinOrbital]) -> Vec<SpinOrbital> {
    let mut v = vec![SpinOrbital::s(0, Up), SpinOrbital::s(0, Down)];
    v.extend_from_slice(extra);
    v
}

fn wedge(extra: &[SpinOrbital]) -> Csf {
    Csf::wedge(&core_plus(extra))
}

fn hw(label: CsfLabel) -> Csf {
    build_highest_weight(label).unwrap()
}

fn coupled(label: CsfLabel) -> Csf {
    build_coupled(label).unwrap()
}

fn eig(state: &Csf, op: Observable) -> Option<Rational> {
    measure_casimir(state, op).value()
}

fn r(v: i128) -> Option<Rational> {
    Some(Rational::from_integer(v))
}

#[test]
fn triplet_p2_sp_is_one_determinant() {
    let s = hw(CsfLabel::TripletP2Sp);
    let expect = wedge(&[SpinOrbital::s(1, Up), SpinOrbital::p(2, 1, Up)]);
    assert_eq!(s.minus(&expect).len(), 0);
    assert_eq!(s.len(), 1);
}

#[test]
fn singlet_p_sp_matches_definition() {
    let s = hw(CsfLabel::SingletPSp);
    let expect = wedge(&[SpinOrbital::s(1, Up), SpinOrbital::p(2, 1, Down)])
        .minus(&wedge(&[SpinOrbital::s(1, Down), SpinOrbital::p(2, 1, Up)]))
        .scaled(&sq(1, 2));
    assert!(s.minus(&expect).is_zero());
}

#[test]
fn every_built_state_has_unit_norm() {
    for label in CsfLabel::ALL {
        let s = build_csf(label, label.default_slots());
        assert_eq!(s.norm_sq(), ExactScalar::one(), "{label}");
    }
}

#[test]
fn lowering_the_sp_triplet() {
    let top = hw(CsfLabel::TripletP2Sp);
    let s_minus = apply_ladder(Ladder::SMinus, &top);
    let expect = wedge(&[SpinOrbital::s(1, Up), SpinOrbital::p(2, 1, Down)])
        .plus(&wedge(&[SpinOrbital::s(1, Down), SpinOrbital::p(2, 1, Up)]));
    assert!(s_minus.minus(&expect).is_zero());

    let l_minus = apply_ladder(Ladder::LMinus, &top);
    let expect = wedge(&[SpinOrbital::s(1, Up), SpinOrbital::p(2, 0, Up)]).scaled(&sq(2, 1));
    assert!(l_minus.minus(&expect).is_zero());

    let back = apply_ladder(Ladder::LPlus, &l_minus);
    assert!(back.minus(&top.scaled(&ExactScalar::int(2))).is_zero());
}

#[test]
fn raising_after_lowering_pd_spin() {
    let top = hw(CsfLabel::TripletP2Pd);
    let ss = top.apply(Ladder::SMinus).apply(Ladder::SPlus);
    assert!(ss.minus(&top.scaled(&ExactScalar::int(2))).is_zero());
}

#[test]
fn coupled_states_have_expected_quantum_numbers() {
    let p = coupled(CsfLabel::TripletP1Sp);
    assert_eq!(p.norm_sq(), ExactScalar::one());
    assert_eq!(eig(&p, Observable::Jz), r(1));

    let d = coupled(CsfLabel::TripletD1Pd);
    assert_eq!(eig(&d, Observable::L2), r(6));
    assert_eq!(eig(&d, Observable::S2), r(2));
    assert_eq!(eig(&d, Observable::J2), r(2));
}

#[test]
fn term_table() {
    // (label, L², S², J², J_z)
    let table = [
        (CsfLabel::TripletP2Sp, 2, 2, 6, 2),
        (CsfLabel::TripletP2Pd, 2, 2, 6, 2),
        (CsfLabel::TripletD3Pd, 6, 2, 12, 3),
        (CsfLabel::SingletPSp, 2, 0, 2, 1),
        (CsfLabel::SingletPPd, 2, 0, 2, 1),
        (CsfLabel::TripletP1Sp, 2, 2, 2, 1),
        (CsfLabel::TripletP1Pd, 2, 2, 2, 1),
        (CsfLabel::TripletD1Pd, 6, 2, 2, 1),
    ];
    for (label, l2, s2, j2, jz) in table {
        let s = build_csf(label, label.default_slots());
        assert_eq!(eig(&s, Observable::L2), r(l2), "{label} L²");
        assert_eq!(eig(&s, Observable::S2), r(s2), "{label} S²");
        assert_eq!(eig(&s, Observable::J2), r(j2), "{label} J²");
        assert_eq!(eig(&s, Observable::Jz), r(jz), "{label} Jz");
    }
}

#[test]
fn spin_projection_can_be_half_integral_free() {
    let s = coupled(CsfLabel::TripletP1Pd);
    // M_S is not sharp in a J_z = 1 triplet with mixed (M_L, M_S)
    assert_eq!(measure_casimir(&s, Observable::Sz), Eigenvalue::Mixed);
    assert_eq!(measure_casimir(&hw(CsfLabel::TripletP2Pd), Observable::Sz), Eigenvalue::Exact(Rational::from_integer(1)));
}

#[test]
fn jj_configs_expand_with_the_tabulated_coefficients() {
    let slots = DEFAULT_SP_SLOTS;
    let a = build_jj_config(JjConfig::S12P12, slots);
    let singlet = build_csf(CsfLabel::SingletPSp, slots);
    let triplet = build_csf(CsfLabel::TripletP1Sp, slots);
    assert_eq!(a.dot(&singlet), -sq(1, 3));
    assert_eq!(a.dot(&triplet), sq(2, 3));

    let pd = DEFAULT_PD_SLOTS;
    let e = build_jj_config(JjConfig::P32D52, pd);
    assert_eq!(e.dot(&build_csf(CsfLabel::SingletPPd, pd)), sq(3, 5));
    assert_eq!(e.dot(&build_csf(CsfLabel::TripletP1Pd, pd)), sq(3, 10));
    assert_eq!(e.dot(&build_csf(CsfLabel::TripletD1Pd, pd)), -sq(1, 10));
}

#[test]
fn jj_configs_on_shared_slots_are_orthonormal() {
    for shells in [Shells::Sp, Shells::Pd] {
        let configs: Vec<JjConfig> = JjConfig::ALL.into_iter().filter(|c| c.shells() == shells).collect();
        let slots = if shells == Shells::Sp { DEFAULT_SP_SLOTS } else { DEFAULT_PD_SLOTS };
        for (i, x) in configs.iter().enumerate() {
            for (j, y) in configs.iter().enumerate() {
                let v = build_jj_config(*x, slots).dot(&build_jj_config(*y, slots));
                let want = if i == j { ExactScalar::one() } else { ExactScalar::zero() };
                assert_eq!(v, want, "{x} {y}");
            }
        }
    }
}

#[test]
fn casimir_examples() {
    assert_eq!(eig(&hw(CsfLabel::SingletPSp), Observable::S2), r(0));
    assert_eq!(eig(&coupled(CsfLabel::TripletD1Pd), Observable::L2), r(6));
    let a = build_jj_config(JjConfig::S12P12, DEFAULT_SP_SLOTS);
    assert_eq!(measure_casimir(&a, Observable::S2), Eigenvalue::Mixed);
    assert_eq!(measure_casimir(&a, Observable::J2), Eigenvalue::Exact(Rational::from_integer(2)));
}

#[test]
fn coupling_matrices_are_orthogonal() {
    let u = coupling_matrices();
    for m in [&u.u_sp, &u.u_pd] {
        let g = gram(m);
        for (i, row) in g.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let want = if i == j { ExactScalar::one() } else { ExactScalar::zero() };
                assert_eq!(*v, want);
            }
        }
    }
}

#[test]
fn coupling_matrices_hold_the_jj_coefficients() {
    // U_sp is the transpose of the sp coefficient block with its columns
    // reversed; U_pd is the pd block rotated by 180°.
    let u = coupling_matrices();
    let sp = [JjConfig::S12P12, JjConfig::S12P32];
    let sp_terms = [Sector::SingletP, Sector::TripletP];
    for i in 0..2 {
        for j in 0..2 {
            assert_eq!(u.u_sp[i][j], sp[j].ls_coefficient(sp_terms[1 - i]));
        }
    }
    let pd = [JjConfig::P12D32, JjConfig::P32D32, JjConfig::P32D52];
    for i in 0..3 {
        for j in 0..3 {
            assert_eq!(u.u_pd[i][j], pd[2 - i].ls_coefficient(Sector::ALL[2 - j]));
        }
    }
}

#[test]
fn ladder_and_label_parsing() {
    assert_eq!("3D1_pd".parse::<CsfLabel>().unwrap(), CsfLabel::TripletD1Pd);
    assert!("4F_pd".parse::<CsfLabel>().is_err());
    assert_eq!("p32d52".parse::<JjConfig>().unwrap(), JjConfig::P32D52);
    assert!(build_highest_weight(CsfLabel::TripletP1Sp).is_err());
    assert!(build_coupled(CsfLabel::SingletPSp).is_err());
}

#[test]
fn text_format_lists_signed_terms() {
    let text = hw(CsfLabel::SingletPSp).to_string();
    assert!(text.starts_with("# 1P_sp\n"));
    assert_eq!(text.lines().count(), 3);
    assert!(text.contains("s↑(R0)∧s↓(R0)∧s↑(R1)∧p1↓(R2)"));
}

#[test]
fn classification_examples() {
    let same = OrbitalEqualities {
        r2_r3: Some(1),
        r4_r5: Some(1),
    };
    let c = classify_symmetry(&[(2f64 / 3.0).sqrt(), (1f64 / 3.0).sqrt(), 0.0, 0.0, 0.0], same);
    assert!(matches!(c, SymmetryClass::TripletP { eps: 1, .. }), "{c}");

    let d = classify_symmetry(
        &[0.0, 0.0, 0.5f64.sqrt(), 0.4f64.sqrt(), -(0.1f64.sqrt())],
        same,
    );
    assert_eq!(
        d,
        SymmetryClass::TripletD {
            eps: 1,
            eps_prime: 1,
            eps_second: 1
        }
    );

    let x = 0.2f64.sqrt();
    assert_eq!(
        classify_symmetry(&[x; 5], OrbitalEqualities::default()),
        SymmetryClass::Mixed
    );
}

/// Random coefficient vectors drawn near the three symmetric families, or
/// from nowhere in particular, with matching or mismatching orbital relations.
fn arb_case() -> impl Strategy<Value = (Vec<f64>, OrbitalEqualities)> {
    (
        0usize..4,
        prop::sample::select(vec![1i8, -1]),
        prop::sample::select(vec![1i8, -1]),
        prop::sample::select(vec![1i8, -1]),
        -1.0f64..1.0,
        -1.0f64..1.0,
        prop::collection::vec(-1.0f64..1.0, 5),
        0usize..6,
        0usize..4,
    )
        .prop_map(|(family, eps, epsp, epss, p, q, noise, rel23, rel45)| {
            let (e, ep) = (f64::from(eps), f64::from(epsp));
            let s2 = 2f64.sqrt();
            let s5 = 5f64.sqrt();
            let mut x = match family {
                0 => vec![e * s2 * p, p, -e * s5 * q / 4.0, q, 3.0 * ep * q / 4.0],
                1 => vec![-e * p / s2, p, -e * s5 * q, q, -3.0 * ep * q],
                2 => {
                    let es = f64::from(epss);
                    vec![0.0, 0.0, es / s2, 0.4f64.sqrt() * e * es, -(0.1f64).sqrt() * e * ep * es]
                }
                _ => noise.clone(),
            };
            if rel23 == 5 {
                // small perturbation that breaks any relation
                x[2] += 0.01 * (1.0 + noise[0].abs());
            }
            let n = x.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-12);
            x.iter_mut().for_each(|v| *v /= n);
            let pick = |k: usize, s: i8| match k {
                0 | 1 | 5 => Some(s),
                2 => Some(-s),
                _ => None,
            };
            (
                x,
                OrbitalEqualities {
                    r2_r3: pick(rel23, eps),
                    r4_r5: pick(rel45, epsp),
                },
            )
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn classification_agrees_with_casimir((x, eq) in arb_case()) {
        let by_rule = classify_symmetry(&x, eq).term();
        let by_casimir = classify_by_casimir(&expand_state(&x, eq), 1e-9);
        prop_assert_eq!(by_rule, by_casimir, "x={:?} eq={:?}", x, eq);
    }
}
