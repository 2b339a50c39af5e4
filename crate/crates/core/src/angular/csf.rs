use std::collections::BTreeMap;
use std::fmt;

use super::orbital::{Determinant, Spin, SpinOrbital};
use crate::exact::{rational_approx, ExactScalar, Rational};

/// Coefficient field for CSF expansions: exact surds or plain floats.
pub trait Coefficient: Clone + fmt::Debug + PartialEq {
    fn zero() -> Self;
    fn from_int(v: i64) -> Self;
    /// `√n`
    fn sqrt_int(n: u32) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn to_f64(&self) -> f64;
}

impl Coefficient for ExactScalar {
    fn zero() -> Self {
        ExactScalar::zero()
    }
    fn from_int(v: i64) -> Self {
        ExactScalar::int(i128::from(v))
    }
    fn sqrt_int(n: u32) -> Self {
        ExactScalar::sqrt_frac(i128::from(n), 1)
    }
    fn is_zero(&self) -> bool {
        ExactScalar::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn to_f64(&self) -> f64 {
        ExactScalar::to_f64(self)
    }
}

impl Coefficient for f64 {
    fn zero() -> Self {
        0.0
    }
    fn from_int(v: i64) -> Self {
        v as f64
    }
    fn sqrt_int(n: u32) -> Self {
        f64::from(n).sqrt()
    }
    fn is_zero(&self) -> bool {
        self.abs() < 1e-15
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

/// Linear combination of canonical determinants with merged like terms.
#[derive(Clone, PartialEq)]
pub struct Csf<S: Coefficient = ExactScalar> {
    terms: BTreeMap<Determinant, S>,
    pub label: Option<String>,
}

impl<S: Coefficient> Default for Csf<S> {
    fn default() -> Self {
        Self {
            terms: BTreeMap::new(),
            label: None,
        }
    }
}

impl<S: Coefficient> Csf<S> {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Single wedge product in the given (possibly non-canonical) order.
    pub fn wedge(orbitals: &[SpinOrbital]) -> Self {
        let mut out = Self::zero();
        out.push(S::from_int(1), orbitals.to_vec());
        out
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    /// Adds `coeff · (o₁∧…∧o_N)` after canonical reordering.
    pub fn push(&mut self, coeff: S, orbitals: Vec<SpinOrbital>) {
        if coeff.is_zero() {
            return;
        }
        if let Some((sign, det)) = Determinant::canonical(orbitals) {
            let c = coeff.mul(&S::from_int(i64::from(sign)));
            self.add_term(det, &c);
        }
    }

    fn add_term(&mut self, det: Determinant, coeff: &S) {
        let merged = match self.terms.get(&det) {
            Some(old) => old.add(coeff),
            None => coeff.clone(),
        };
        if merged.is_zero() {
            self.terms.remove(&det);
        } else {
            self.terms.insert(det, merged);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Determinant, &S)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scaled(&self, c: &S) -> Self {
        let mut out = Self::zero();
        for (d, v) in &self.terms {
            out.add_term(d.clone(), &v.mul(c));
        }
        out.label = self.label.clone();
        out
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (d, v) in &other.terms {
            out.add_term(d.clone(), v);
        }
        out.label = None;
        out
    }

    pub fn minus(&self, other: &Self) -> Self {
        self.plus(&other.scaled(&S::from_int(-1)))
    }

    /// Prepends the same spin-orbitals to every determinant.
    pub fn with_core(&self, core: &[SpinOrbital]) -> Self {
        let mut out = Self::zero();
        for (d, v) in &self.terms {
            let mut orbs = core.to_vec();
            orbs.extend_from_slice(d.orbitals());
            out.push(v.clone(), orbs);
        }
        out.label = self.label.clone();
        out
    }

    /// Inner product treating distinct determinants as orthonormal.
    pub fn dot(&self, other: &Self) -> S {
        let mut acc = S::zero();
        for (d, v) in &self.terms {
            if let Some(w) = other.terms.get(d) {
                acc = acc.add(&v.mul(w));
            }
        }
        acc
    }

    pub fn norm_sq(&self) -> S {
        self.dot(self)
    }

    /// Relabels radial slots; `map(slot) -> (new slot, sign)` and the sign is
    /// applied once per orbital that moves.
    pub fn map_slots(&self, map: impl Fn(u8) -> (u8, i64)) -> Self {
        let mut out = Self::zero();
        for (d, v) in &self.terms {
            let mut c = v.clone();
            let orbs = d
                .orbitals()
                .iter()
                .map(|o| {
                    let (slot, sign) = map(o.slot);
                    if sign != 1 {
                        c = c.mul(&S::from_int(sign));
                    }
                    o.on_slot(slot)
                })
                .collect();
            out.push(c, orbs);
        }
        out.label = self.label.clone();
        out
    }

    pub fn to_f64(&self) -> Csf<f64> {
        let mut out = Csf::<f64>::zero();
        for (d, v) in &self.terms {
            out.add_term(d.clone(), &v.to_f64());
        }
        out.label = self.label.clone();
        out
    }

    /// One-body operator: each orbital of each determinant is replaced in turn.
    fn one_body(&self, step: impl Fn(&SpinOrbital) -> Option<(S, SpinOrbital)>) -> Self {
        let mut out = Self::zero();
        for (d, v) in &self.terms {
            for (i, o) in d.orbitals().iter().enumerate() {
                if let Some((c, new)) = step(o) {
                    let mut orbs = d.orbitals().to_vec();
                    orbs[i] = new;
                    out.push(v.mul(&c), orbs);
                }
            }
        }
        out
    }

    fn diagonal(&self, value: impl Fn(&Determinant) -> i64) -> Self {
        let mut out = Self::zero();
        for (d, v) in &self.terms {
            out.add_term(d.clone(), &v.mul(&S::from_int(value(d))));
        }
        out
    }

    pub fn apply(&self, op: Ladder) -> Self {
        match op {
            Ladder::LMinus => self.one_body(|o| l_step::<S>(o, -1)),
            Ladder::LPlus => self.one_body(|o| l_step::<S>(o, 1)),
            Ladder::SMinus => self.one_body(|o| s_step::<S>(o, Spin::Up)),
            Ladder::SPlus => self.one_body(|o| s_step::<S>(o, Spin::Down)),
            Ladder::JMinus => self.apply(Ladder::LMinus).plus(&self.apply(Ladder::SMinus)),
            Ladder::JPlus => self.apply(Ladder::LPlus).plus(&self.apply(Ladder::SPlus)),
        }
    }

    /// Applies the observable. `S_z` and `J_z` return twice their value so
    /// that everything stays integral; use `measure_casimir` for eigenvalues.
    fn apply_observable_scaled(&self, op: Observable) -> Self {
        match op {
            Observable::Lz => self.diagonal(|d| i64::from(d.total_m())),
            Observable::Sz => self.diagonal(|d| i64::from(d.twice_total_sz())),
            Observable::Jz => {
                self.diagonal(|d| i64::from(2 * d.total_m() + d.twice_total_sz()))
            }
            Observable::L2 => self.casimir(Ladder::LMinus, Ladder::LPlus, |d| {
                Rational::from_integer(i128::from(d.total_m()))
            }),
            Observable::S2 => self.casimir(Ladder::SMinus, Ladder::SPlus, |d| {
                Rational::new(i128::from(d.twice_total_sz()), 2)
            }),
            Observable::J2 => self.casimir(Ladder::JMinus, Ladder::JPlus, |d| {
                Rational::new(i128::from(2 * d.total_m() + d.twice_total_sz()), 2)
            }),
        }
    }

    /// `X⁻X⁺ + X_z² + X_z`; the projection must make `m² + m` integral,
    /// which holds for every even-electron state.
    fn casimir(&self, lower: Ladder, raise: Ladder, proj: impl Fn(&Determinant) -> Rational) -> Self {
        let ladder = self.apply(raise).apply(lower);
        let diag = self.diagonal(|d| {
            let m = proj(d);
            let v = m * m + m;
            assert!(v.is_integer(), "half-integer projection in an even-electron state");
            *v.numer() as i64
        });
        ladder.plus(&diag)
    }
}

fn l_step<S: Coefficient>(o: &SpinOrbital, dir: i8) -> Option<(S, SpinOrbital)> {
    let m = o.m + dir;
    if m.unsigned_abs() > o.ell {
        return None;
    }
    let l = i32::from(o.ell);
    let mm = i32::from(o.m);
    let n = l * (l + 1) - mm * (mm + i32::from(dir));
    Some((S::sqrt_int(n as u32), SpinOrbital { m, ..*o }))
}

fn s_step<S: Coefficient>(o: &SpinOrbital, from: Spin) -> Option<(S, SpinOrbital)> {
    (o.spin == from).then(|| {
        (
            S::from_int(1),
            SpinOrbital {
                spin: from.flipped(),
                ..*o
            },
        )
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    LMinus,
    LPlus,
    SMinus,
    SPlus,
    JMinus,
    JPlus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    L2,
    S2,
    J2,
    Lz,
    Sz,
    Jz,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Eigenvalue {
    Exact(Rational),
    Mixed,
}

impl Eigenvalue {
    pub fn value(self) -> Option<Rational> {
        match self {
            Eigenvalue::Exact(v) => Some(v),
            Eigenvalue::Mixed => None,
        }
    }
}

impl fmt::Display for Eigenvalue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Eigenvalue::Exact(v) => write!(f, "{v}"),
            Eigenvalue::Mixed => write!(f, "mixed"),
        }
    }
}

pub fn apply_ladder<S: Coefficient>(op: Ladder, state: &Csf<S>) -> Csf<S> {
    state.apply(op)
}

fn eigen_scale(op: Observable) -> i128 {
    match op {
        Observable::Sz | Observable::Jz => 2,
        _ => 1,
    }
}

/// Exact eigenvalue test: guess `λ` from the Rayleigh quotient, then check
/// `Oψ − λψ = 0` in exact arithmetic.
pub fn measure_casimir(state: &Csf<ExactScalar>, op: Observable) -> Eigenvalue {
    if state.is_zero() {
        return Eigenvalue::Mixed;
    }
    let image = state.apply_observable_scaled(op);
    let quotient = state.dot(&image).to_f64() / state.norm_sq().to_f64();
    let guess = rational_approx(quotient, 1000);
    let residual = image.minus(&state.scaled(&ExactScalar::rational(guess)));
    if residual.is_zero() {
        Eigenvalue::Exact(guess / Rational::from_integer(eigen_scale(op)))
    } else {
        Eigenvalue::Mixed
    }
}

/// Floating counterpart of [`measure_casimir`]: the residual must vanish to
/// `tol` relative to the state norm.
pub fn measure_casimir_approx(state: &Csf<f64>, op: Observable, tol: f64) -> Option<f64> {
    if state.is_zero() {
        return None;
    }
    let image = state.apply_observable_scaled(op);
    let norm2 = state.norm_sq();
    let lambda = state.dot(&image) / norm2;
    let residual = image.minus(&state.scaled(&lambda));
    (residual.norm_sq().sqrt() <= tol * norm2.sqrt())
        .then(|| lambda / eigen_scale(op) as f64)
}

impl<S: Coefficient + fmt::Display> fmt::Display for Csf<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(l) = &self.label {
            writeln!(f, "# {l}")?;
        }
        if self.terms.is_empty() {
            return writeln!(f, "0");
        }
        for (d, v) in &self.terms {
            writeln!(f, "({v}) {d}")?;
        }
        Ok(())
    }
}

impl<S: Coefficient> fmt::Debug for Csf<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for (d, v) in &self.terms {
            m.entry(&d.to_string(), v);
        }
        m.finish()
    }
}
