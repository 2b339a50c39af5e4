//! Angular factors `c^k(ℓm; ℓ'm')` of the multipole expansion of `1/r₁₂`,
//! Condon–Shortley phase, computed exactly from Wigner 3j symbols.

use std::collections::HashMap;
use std::sync::OnceLock;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact::{ExactScalar, Rational};

pub const MAX_ELL: u8 = 2;
pub const MAX_K: u8 = 4;

fn fact(n: i64) -> i128 {
    (1..=n as i128).product()
}

/// Racah's closed form for `(j1 j2 j3; m1 m2 m3)` with integer arguments.
pub fn wigner_3j(j1: i64, j2: i64, j3: i64, m1: i64, m2: i64, m3: i64) -> ExactScalar {
    if m1 + m2 + m3 != 0
        || j3 < (j1 - j2).abs()
        || j3 > j1 + j2
        || m1.abs() > j1
        || m2.abs() > j2
        || m3.abs() > j3
    {
        return ExactScalar::zero();
    }
    let triangle = Rational::new(
        fact(j1 + j2 - j3) * fact(j1 - j2 + j3) * fact(-j1 + j2 + j3),
        fact(j1 + j2 + j3 + 1),
    );
    let projections = Rational::from_integer(
        fact(j1 + m1) * fact(j1 - m1) * fact(j2 + m2) * fact(j2 - m2) * fact(j3 + m3) * fact(j3 - m3),
    );
    let k_min = 0.max(j2 - j3 - m1).max(j1 - j3 + m2);
    let k_max = (j1 + j2 - j3).min(j1 - m1).min(j2 + m2);
    let mut sum = Rational::zero();
    for k in k_min..=k_max {
        let den = fact(k)
            * fact(j1 + j2 - j3 - k)
            * fact(j1 - m1 - k)
            * fact(j2 + m2 - k)
            * fact(j3 - j2 + m1 + k)
            * fact(j3 - j1 - m2 + k);
        let term = Rational::new(1, den);
        sum += if k % 2 == 0 { term } else { -term };
    }
    let phase = if (j1 - j2 - m3).rem_euclid(2) == 0 { 1 } else { -1 };
    ExactScalar::sqrt(triangle * projections).scale(sum * Rational::from_integer(phase))
}

fn gaunt_exact(l1: u8, m1: i8, l2: u8, m2: i8, k: u8) -> ExactScalar {
    let (l1, m1, l2, m2, k) = (
        i64::from(l1),
        i64::from(m1),
        i64::from(l2),
        i64::from(m2),
        i64::from(k),
    );
    if (l1 + l2 + k) % 2 != 0 {
        return ExactScalar::zero();
    }
    let parity = wigner_3j(l1, k, l2, 0, 0, 0);
    let projection = wigner_3j(l1, k, l2, -m1, m1 - m2, m2);
    let phase = if m1.rem_euclid(2) == 0 { 1 } else { -1 };
    let norm = ExactScalar::sqrt_frac(((2 * l1 + 1) * (2 * l2 + 1)) as i128, 1);
    (&norm * &(&parity * &projection)).scale(Rational::from_integer(phase))
}

type Key = (u8, i8, u8, i8, u8);

fn table() -> &'static HashMap<Key, (ExactScalar, f64)> {
    static TABLE: OnceLock<HashMap<Key, (ExactScalar, f64)>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = HashMap::new();
        for l1 in 0..=MAX_ELL {
            for l2 in 0..=MAX_ELL {
                for m1 in -(l1 as i8)..=(l1 as i8) {
                    for m2 in -(l2 as i8)..=(l2 as i8) {
                        for k in 0..=MAX_K {
                            let v = gaunt_exact(l1, m1, l2, m2, k);
                            let f = v.to_f64();
                            t.insert((l1, m1, l2, m2, k), (v, f));
                        }
                    }
                }
            }
        }
        t
    })
}

/// `c^k(ℓ₁m₁; ℓ₂m₂) = √(4π/(2k+1)) ∫ Y*_{ℓ₁m₁} Y_{k,m₁−m₂} Y_{ℓ₂m₂} dΩ`.
pub fn gaunt_ck(l1: u8, m1: i8, l2: u8, m2: i8, k: u8) -> Result<ExactScalar> {
    table()
        .get(&(l1, m1, l2, m2, k))
        .map(|(v, _)| v.clone())
        .ok_or_else(|| {
            Error::Parameter(format!(
                "c^{k}({l1},{m1}; {l2},{m2}) needs ℓ ≤ {MAX_ELL}, |m| ≤ ℓ, k ≤ {MAX_K}"
            ))
        })
}

/// Floating value of [`gaunt_ck`] for validated arguments.
pub fn gaunt_f64(l1: u8, m1: i8, l2: u8, m2: i8, k: u8) -> f64 {
    table()
        .get(&(l1, m1, l2, m2, k))
        .map(|(_, f)| *f)
        .unwrap_or_else(|| panic!("c^{k}({l1},{m1}; {l2},{m2}) out of range"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sq(n: i128, d: i128) -> ExactScalar {
        ExactScalar::sqrt_frac(n, d)
    }

    /// Associated Legendre `P_ℓ^m(x)`, m ≥ 0, with Condon–Shortley phase.
    fn legendre(l: i32, m: i32, x: f64) -> f64 {
        let s = (1.0 - x * x).max(0.0).sqrt();
        let mut pmm = 1.0;
        for i in 0..m {
            pmm *= -f64::from(2 * i + 1) * s;
        }
        if l == m {
            return pmm;
        }
        let mut p1 = x * f64::from(2 * m + 1) * pmm;
        let mut p0 = pmm;
        for ll in (m + 2)..=l {
            let p2 = (f64::from(2 * ll - 1) * x * p1 - f64::from(ll + m - 1) * p0) / f64::from(ll - m);
            p0 = p1;
            p1 = p2;
        }
        p1
    }

    /// θ-part of `Y_ℓ^m` normalized so that `∫ Θ² sin θ dθ = 1`.
    fn theta(l: i32, m: i32, t: f64) -> f64 {
        let ma = m.abs();
        let f = |n: i32| (1..=n).map(f64::from).product::<f64>();
        let norm = (f64::from(2 * l + 1) / 2.0 * f(l - ma) / f(l + ma)).sqrt();
        let v = norm * legendre(l, ma, t.cos());
        if m < 0 && ma % 2 == 1 {
            -v
        } else {
            v
        }
    }

    fn gaunt_by_quadrature(l1: i32, m1: i32, l2: i32, m2: i32, k: i32) -> f64 {
        // the φ integral contributes 2π / (2π)^{3/2}
        let n = 20000;
        let h = std::f64::consts::PI / f64::from(n);
        let g = |t: f64| theta(l1, m1, t) * theta(k, m1 - m2, t) * theta(l2, m2, t) * t.sin();
        let mut s = g(0.0) + g(std::f64::consts::PI);
        for i in 1..n {
            s += g(f64::from(i) * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        let integral = s * h / 3.0;
        let two_pi = 2.0 * std::f64::consts::PI;
        (4.0 * std::f64::consts::PI / f64::from(2 * k + 1)).sqrt() * integral / two_pi.sqrt()
    }

    #[test]
    fn three_j_reference_values() {
        assert_eq!(wigner_3j(1, 1, 0, 0, 0, 0), -sq(1, 3));
        assert_eq!(wigner_3j(1, 1, 2, 1, -1, 0), sq(1, 30));
        assert_eq!(wigner_3j(2, 2, 0, 1, -1, 0), -sq(1, 5));
        assert!(wigner_3j(1, 1, 1, 0, 0, 0).is_zero());
    }

    #[test]
    fn monopole_is_unity() {
        for l in 0..=2u8 {
            for m in -(l as i8)..=(l as i8) {
                assert_eq!(gaunt_ck(l, m, l, m, 0).unwrap(), ExactScalar::one());
            }
        }
    }

    #[test]
    fn spot_values() {
        let c = gaunt_ck(1, 1, 0, 0, 1).unwrap();
        assert_eq!(&c * &c, ExactScalar::frac(1, 3));
        assert!(gaunt_ck(0, 0, 2, 1, 1).unwrap().is_zero());
        assert_eq!(gaunt_ck(1, 0, 1, 0, 2).unwrap(), ExactScalar::frac(2, 5));
        assert_eq!(gaunt_ck(1, 1, 1, 1, 2).unwrap(), ExactScalar::frac(-1, 5));
        assert_eq!(gaunt_ck(1, 0, 0, 0, 1).unwrap(), sq(1, 3));
        assert_eq!(gaunt_ck(1, 0, 2, 0, 1).unwrap(), sq(4, 15));
    }

    #[test]
    fn out_of_range_is_rejected() {
        assert!(matches!(gaunt_ck(3, 0, 0, 0, 3), Err(Error::Parameter(_))));
        assert!(matches!(gaunt_ck(1, 2, 1, 0, 2), Err(Error::Parameter(_))));
        assert!(matches!(gaunt_ck(1, 0, 1, 0, 5), Err(Error::Parameter(_))));
    }

    #[test]
    fn exact_values_match_angular_quadrature() {
        for l1 in 0..=2i32 {
            for l2 in 0..=2i32 {
                for m1 in -l1..=l1 {
                    for m2 in -l2..=l2 {
                        for k in 0..=4i32 {
                            if (m1 - m2).abs() > k {
                                assert!(gaunt_ck(l1 as u8, m1 as i8, l2 as u8, m2 as i8, k as u8)
                                    .unwrap()
                                    .is_zero());
                                continue;
                            }
                            let exact = gaunt_f64(l1 as u8, m1 as i8, l2 as u8, m2 as i8, k as u8);
                            let numeric = gaunt_by_quadrature(l1, m1, l2, m2, k);
                            assert!(
                                (exact - numeric).abs() < 1e-10,
                                "c^{k}({l1},{m1};{l2},{m2}) exact {exact} numeric {numeric}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn hermitian_swap_rule() {
        // c^k(ℓ'm'; ℓm) = (−1)^{m−m'} c^k(ℓm; ℓ'm')
        for l1 in 0..=2u8 {
            for l2 in 0..=2u8 {
                for m1 in -(l1 as i8)..=(l1 as i8) {
                    for m2 in -(l2 as i8)..=(l2 as i8) {
                        for k in 0..=4u8 {
                            let a = gaunt_f64(l1, m1, l2, m2, k);
                            let b = gaunt_f64(l2, m2, l1, m1, k);
                            let s = if (m1 - m2).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                            assert!((a - s * b).abs() < 1e-14);
                        }
                    }
                }
            }
        }
    }
}
