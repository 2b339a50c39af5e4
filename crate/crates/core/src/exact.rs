//! Exact scalars of the form `Σ q_i √n_i` with rational `q_i` and squarefree `n_i`.
//!
//! Every coupling coefficient that shows up for s, p and d shells lives in this
//! set, so the angular algebra never touches floating point.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = Ratio<i128>;

/// Split `n` into `s² · f` with `f` squarefree.
fn squarefree_split(mut n: u128) -> (u128, u128) {
    debug_assert!(n > 0);
    let mut square = 1u128;
    let mut free = 1u128;
    let mut p = 2u128;
    while p * p <= n {
        let mut count = 0;
        while n % p == 0 {
            n /= p;
            count += 1;
        }
        for _ in 0..count / 2 {
            square *= p;
        }
        if count % 2 == 1 {
            free *= p;
        }
        p += 1;
    }
    free *= n;
    (square, free)
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct ExactScalar {
    // radicand -> rational coefficient; zero coefficients are never stored
    terms: BTreeMap<u128, Rational>,
}

impl ExactScalar {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::rational(Rational::one())
    }

    pub fn int(v: i128) -> Self {
        Self::rational(Rational::from_integer(v))
    }

    pub fn rational(q: Rational) -> Self {
        Self::term(q, 1)
    }

    pub fn frac(num: i128, den: i128) -> Self {
        Self::rational(Rational::new(num, den))
    }

    /// `q · √radicand`
    pub fn term(q: Rational, radicand: u128) -> Self {
        let mut out = Self::zero();
        if q.is_zero() || radicand == 0 {
            return out;
        }
        let (square, free) = squarefree_split(radicand);
        out.terms
            .insert(free, q * Rational::from_integer(square as i128));
        out
    }

    /// `√(q)` for a non-negative rational.
    pub fn sqrt(q: Rational) -> Self {
        assert!(!q.is_negative(), "sqrt of negative rational {q}");
        if q.is_zero() {
            return Self::zero();
        }
        // √(p/d) = √(p·d) / d
        let p = *q.numer() as u128;
        let d = *q.denom() as u128;
        Self::term(Rational::new(1, d as i128), p * d)
    }

    /// `√(num/den)`
    pub fn sqrt_frac(num: i128, den: i128) -> Self {
        Self::sqrt(Rational::new(num, den))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Returns the value as a rational when no surd remains.
    pub fn as_rational(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&1).copied(),
            _ => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(n, q)| q.to_f64().unwrap() * (*n as f64).sqrt())
            .sum()
    }

    pub fn scale(&self, q: Rational) -> Self {
        if q.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(n, c)| (*n, *c * q)).collect(),
        }
    }

    /// Multiplicative inverse for single-surd values.
    pub fn recip(&self) -> Option<Self> {
        if self.terms.len() != 1 {
            return None;
        }
        let (n, q) = self.terms.iter().next().unwrap();
        // 1/(q√n) = √n / (q n)
        Some(Self::term(
            Rational::one() / (*q * Rational::from_integer(*n as i128)),
            *n,
        ))
    }

    pub fn terms(&self) -> impl Iterator<Item = (u128, Rational)> + '_ {
        self.terms.iter().map(|(n, q)| (*n, *q))
    }
}

impl From<i128> for ExactScalar {
    fn from(v: i128) -> Self {
        Self::int(v)
    }
}

impl Add for &ExactScalar {
    type Output = ExactScalar;
    fn add(self, rhs: &ExactScalar) -> ExactScalar {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for ExactScalar {
    type Output = ExactScalar;
    fn add(self, rhs: ExactScalar) -> ExactScalar {
        &self + &rhs
    }
}

impl AddAssign<&ExactScalar> for ExactScalar {
    fn add_assign(&mut self, rhs: &ExactScalar) {
        for (n, q) in &rhs.terms {
            let entry = self.terms.entry(*n).or_insert_with(Rational::zero);
            *entry += *q;
            if entry.is_zero() {
                self.terms.remove(n);
            }
        }
    }
}

impl Neg for &ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        self.scale(-Rational::one())
    }
}

impl Neg for ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        -&self
    }
}

impl Sub for &ExactScalar {
    type Output = ExactScalar;
    fn sub(self, rhs: &ExactScalar) -> ExactScalar {
        self + &(-rhs)
    }
}

impl Sub for ExactScalar {
    type Output = ExactScalar;
    fn sub(self, rhs: ExactScalar) -> ExactScalar {
        &self - &rhs
    }
}

impl Mul for &ExactScalar {
    type Output = ExactScalar;
    fn mul(self, rhs: &ExactScalar) -> ExactScalar {
        let mut out = ExactScalar::zero();
        for (n1, q1) in &self.terms {
            for (n2, q2) in &rhs.terms {
                // √n1 √n2 = g √(n1 n2 / g²) with g = gcd(n1, n2); both squarefree
                let g = n1.gcd(n2);
                let rad = (n1 / g) * (n2 / g);
                let coef = *q1 * *q2 * Rational::from_integer(g as i128);
                out += &ExactScalar::term(coef, rad);
            }
        }
        out
    }
}

impl Mul for ExactScalar {
    type Output = ExactScalar;
    fn mul(self, rhs: ExactScalar) -> ExactScalar {
        &self * &rhs
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (n, q)) in self.terms.iter().enumerate() {
            let neg = q.is_negative();
            let mag = q.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            match (*n, mag.is_one()) {
                (1, _) => write!(f, "{mag}")?,
                (n, true) => write!(f, "√{n}")?,
                (n, false) => write!(f, "{mag}√{n}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Closest rational with denominator at most `max_den` (continued fractions).
pub fn rational_approx(x: f64, max_den: i128) -> Rational {
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > max_den {
            break;
        }
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        let frac = r - a;
        if frac.abs() < 1e-12 {
            break;
        }
        r = 1.0 / frac;
    }
    Rational::new(h1, k1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_products_reduce() {
        let a = ExactScalar::sqrt_frac(6, 10);
        let b = ExactScalar::sqrt_frac(10, 6);
        assert_eq!(&a * &b, ExactScalar::one());
        let two = &ExactScalar::sqrt_frac(2, 1) * &ExactScalar::sqrt_frac(2, 1);
        assert_eq!(two, ExactScalar::int(2));
    }

    #[test]
    fn sums_keep_distinct_surds() {
        let s = &ExactScalar::sqrt_frac(2, 1) + &ExactScalar::sqrt_frac(3, 1);
        assert!(s.as_rational().is_none());
        assert!((s.to_f64() - (2f64.sqrt() + 3f64.sqrt())).abs() < 1e-15);
        let z = &s - &s;
        assert!(z.is_zero());
    }

    #[test]
    fn sqrt_of_fraction() {
        let v = ExactScalar::sqrt_frac(3, 10);
        assert!((v.to_f64() - 0.3f64.sqrt()).abs() < 1e-15);
        let sq = &v * &v;
        assert_eq!(sq.as_rational(), Some(Rational::new(3, 10)));
        let inv = v.recip().unwrap();
        assert_eq!(&inv * &v, ExactScalar::one());
    }

    #[test]
    fn rational_approx_recovers_small_fractions() {
        assert_eq!(rational_approx(2.0 / 3.0, 100), Rational::new(2, 3));
        assert_eq!(rational_approx(-6.0, 100), Rational::from_integer(-6));
    }
}
