use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    /// Twice the projection, `±1`.
    pub fn twice_sz(self) -> i32 {
        match self {
            Spin::Up => 1,
            Spin::Down => -1,
        }
    }

    pub fn flipped(self) -> Spin {
        match self {
            Spin::Up => Spin::Down,
            Spin::Down => Spin::Up,
        }
    }
}

/// One-electron label `ℓ_m^σ(R_slot)`.
///
/// Field order fixes the canonical ordering inside determinants:
/// radial slot, then `ℓ`, then `m`, then spin with up before down.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SpinOrbital {
    pub slot: u8,
    pub ell: u8,
    pub m: i8,
    pub spin: Spin,
}

impl SpinOrbital {
    pub fn new(slot: u8, ell: u8, m: i8, spin: Spin) -> Self {
        assert!(ell <= 2, "only s, p and d shells are supported");
        assert!(m.unsigned_abs() <= ell, "|m| must not exceed ℓ");
        Self { slot, ell, m, spin }
    }

    pub fn s(slot: u8, spin: Spin) -> Self {
        Self::new(slot, 0, 0, spin)
    }

    pub fn p(slot: u8, m: i8, spin: Spin) -> Self {
        Self::new(slot, 1, m, spin)
    }

    pub fn d(slot: u8, m: i8, spin: Spin) -> Self {
        Self::new(slot, 2, m, spin)
    }

    /// Same spatial and spin label on another radial slot.
    pub fn on_slot(self, slot: u8) -> Self {
        Self { slot, ..self }
    }
}

impl fmt::Display for SpinOrbital {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let shell = ['s', 'p', 'd'][self.ell as usize];
        let arrow = match self.spin {
            Spin::Up => '↑',
            Spin::Down => '↓',
        };
        if self.ell == 0 {
            write!(f, "{shell}{arrow}(R{})", self.slot)
        } else {
            write!(f, "{shell}{}{arrow}(R{})", self.m, self.slot)
        }
    }
}

impl FromStr for SpinOrbital {
    type Err = Error;

    /// Parses the `Display` form, e.g. `p-1↓(R2)`; `u`/`d` may replace the arrows.
    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::UnknownLabel(s.to_string());
        let (head, tail) = s.split_once("(R").ok_or_else(bad)?;
        let slot: u8 = tail.strip_suffix(')').ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let mut chars = head.chars();
        let ell = match chars.next().ok_or_else(bad)? {
            's' => 0,
            'p' => 1,
            'd' => 2,
            _ => return Err(bad()),
        };
        let rest: String = chars.collect();
        let spin = match rest.chars().last().ok_or_else(bad)? {
            '↑' | 'u' => Spin::Up,
            '↓' | 'd' => Spin::Down,
            _ => return Err(bad()),
        };
        let m_text = &rest[..rest.len() - rest.chars().last().unwrap().len_utf8()];
        let m: i8 = if m_text.is_empty() && ell == 0 {
            0
        } else {
            m_text.parse().map_err(|_| bad())?
        };
        if m.unsigned_abs() > ell {
            return Err(bad());
        }
        Ok(SpinOrbital { slot, ell, m, spin })
    }
}

/// Normalized wedge product of distinct spin-orbitals in canonical order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Determinant {
    orbitals: Vec<SpinOrbital>,
}

impl Determinant {
    /// Sorts into canonical order. Returns the permutation sign, or `None`
    /// when a label repeats and the wedge product vanishes.
    pub fn canonical(mut orbitals: Vec<SpinOrbital>) -> Option<(i32, Determinant)> {
        let mut sign = 1;
        // insertion sort keeps the swap count, which is all we need for the sign
        for i in 1..orbitals.len() {
            let mut j = i;
            while j > 0 && orbitals[j - 1] > orbitals[j] {
                orbitals.swap(j - 1, j);
                sign = -sign;
                j -= 1;
            }
        }
        if orbitals.windows(2).any(|w| w[0] == w[1]) {
            return None;
        }
        Some((sign, Determinant { orbitals }))
    }

    pub fn orbitals(&self) -> &[SpinOrbital] {
        &self.orbitals
    }

    pub fn len(&self) -> usize {
        self.orbitals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orbitals.is_empty()
    }

    pub fn total_m(&self) -> i32 {
        self.orbitals.iter().map(|o| i32::from(o.m)).sum()
    }

    pub fn twice_total_sz(&self) -> i32 {
        self.orbitals.iter().map(|o| o.spin.twice_sz()).sum()
    }
}

impl fmt::Display for Determinant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, o) in self.orbitals.iter().enumerate() {
            if i > 0 {
                write!(f, "∧")?;
            }
            write!(f, "{o}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_order_tracks_sign() {
        let a = SpinOrbital::s(0, Spin::Up);
        let b = SpinOrbital::s(0, Spin::Down);
        let c = SpinOrbital::p(2, 1, Spin::Up);
        let (s1, d1) = Determinant::canonical(vec![a, b, c]).unwrap();
        let (s2, d2) = Determinant::canonical(vec![b, a, c]).unwrap();
        let (s3, d3) = Determinant::canonical(vec![c, a, b]).unwrap();
        assert_eq!(d1, d2);
        assert_eq!(d1, d3);
        assert_eq!((s1, s2, s3), (1, -1, 1));
        assert!(Determinant::canonical(vec![a, c, a]).is_none());
    }

    #[test]
    fn label_round_trip() {
        for o in [
            SpinOrbital::s(1, Spin::Down),
            SpinOrbital::p(2, -1, Spin::Up),
            SpinOrbital::d(5, 2, Spin::Down),
        ] {
            assert_eq!(o.to_string().parse::<SpinOrbital>().unwrap(), o);
        }
        assert!("f0↑(R1)".parse::<SpinOrbital>().is_err());
        assert!("p2↑(R1)".parse::<SpinOrbital>().is_err());
    }
}
