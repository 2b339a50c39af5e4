//! Exact J_z = 1 configuration state functions for the `1s² 2s 2p` and
//! `1s² 2p 3d` shells, the jj-coupled configurations and the coupling
//! matrices between the two bases.

use std::fmt;
use std::str::FromStr;

use super::csf::{Csf, Ladder};
use super::orbital::{Spin, SpinOrbital};
use crate::error::{Error, Result};
use crate::exact::{ExactScalar, Rational};

use Spin::{Down, Up};

/// Radial slots carried by a two-open-shell CSF on top of the closed `s²` pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Slots {
    pub core: u8,
    /// `s` slot for sp states, `p` slot for pd states.
    pub low: u8,
    /// `p` slot for sp states, `d` slot for pd states.
    pub high: u8,
}

impl Slots {
    pub const fn new(core: u8, low: u8, high: u8) -> Self {
        Self { core, low, high }
    }
}

pub const DEFAULT_SP_SLOTS: Slots = Slots::new(0, 1, 2);
pub const DEFAULT_PD_SLOTS: Slots = Slots::new(0, 2, 4);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Shells {
    Sp,
    Pd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CsfLabel {
    TripletP2Sp,
    TripletP2Pd,
    TripletD3Pd,
    SingletPSp,
    SingletPPd,
    TripletP1Sp,
    TripletP1Pd,
    TripletD1Pd,
}

impl CsfLabel {
    pub const ALL: [CsfLabel; 8] = [
        CsfLabel::TripletP2Sp,
        CsfLabel::TripletP2Pd,
        CsfLabel::TripletD3Pd,
        CsfLabel::SingletPSp,
        CsfLabel::SingletPPd,
        CsfLabel::TripletP1Sp,
        CsfLabel::TripletP1Pd,
        CsfLabel::TripletD1Pd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CsfLabel::TripletP2Sp => "3P2_sp",
            CsfLabel::TripletP2Pd => "3P2_pd",
            CsfLabel::TripletD3Pd => "3D3_pd",
            CsfLabel::SingletPSp => "1P_sp",
            CsfLabel::SingletPPd => "1P_pd",
            CsfLabel::TripletP1Sp => "3P1_sp",
            CsfLabel::TripletP1Pd => "3P1_pd",
            CsfLabel::TripletD1Pd => "3D1_pd",
        }
    }

    pub fn shells(self) -> Shells {
        match self {
            CsfLabel::TripletP2Sp | CsfLabel::SingletPSp | CsfLabel::TripletP1Sp => Shells::Sp,
            _ => Shells::Pd,
        }
    }

    /// Built directly rather than by lowering.
    pub fn is_highest_weight(self) -> bool {
        !matches!(
            self,
            CsfLabel::TripletP1Sp | CsfLabel::TripletP1Pd | CsfLabel::TripletD1Pd
        )
    }

    pub fn default_slots(self) -> Slots {
        match self.shells() {
            Shells::Sp => DEFAULT_SP_SLOTS,
            Shells::Pd => DEFAULT_PD_SLOTS,
        }
    }
}

impl fmt::Display for CsfLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CsfLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        CsfLabel::ALL
            .into_iter()
            .find(|l| l.name() == s)
            .ok_or_else(|| Error::UnknownLabel(s.to_string()))
    }
}

fn sq(num: i128, den: i128) -> ExactScalar {
    ExactScalar::sqrt_frac(num, den)
}

fn core(slots: Slots) -> [SpinOrbital; 2] {
    [SpinOrbital::s(slots.core, Up), SpinOrbital::s(slots.core, Down)]
}

/// Open-shell pair `low ∧ high` as (coefficient, m_low, spin_low, m_high, spin_high).
type PairTerm = (ExactScalar, i8, Spin, i8, Spin);

fn open_pair(slots: Slots, shells: Shells, terms: Vec<PairTerm>) -> Csf {
    let (l_low, l_high) = match shells {
        Shells::Sp => (0, 1),
        Shells::Pd => (1, 2),
    };
    let mut out = Csf::zero();
    for (c, m1, s1, m2, s2) in terms {
        let mut orbs = core(slots).to_vec();
        orbs.push(SpinOrbital::new(slots.low, l_low, m1, s1));
        orbs.push(SpinOrbital::new(slots.high, l_high, m2, s2));
        out.push(c, orbs);
    }
    out
}

fn normalize(state: Csf) -> Csf {
    let n2 = state
        .norm_sq()
        .as_rational()
        .expect("norm² of a CSF built from surd coefficients is rational");
    let inv = ExactScalar::sqrt(Rational::from_integer(1) / n2);
    state.scaled(&inv)
}

fn highest_weight(label: CsfLabel, slots: Slots) -> Csf {
    let one = ExactScalar::one();
    match label {
        CsfLabel::TripletP2Sp => open_pair(slots, Shells::Sp, vec![(one, 0, Up, 1, Up)]),
        CsfLabel::SingletPSp => open_pair(
            slots,
            Shells::Sp,
            vec![(sq(1, 2), 0, Up, 1, Down), (-sq(1, 2), 0, Down, 1, Up)],
        ),
        CsfLabel::TripletP2Pd => open_pair(
            slots,
            Shells::Pd,
            vec![
                (sq(6, 10), -1, Up, 2, Up),
                (-sq(3, 10), 0, Up, 1, Up),
                (sq(1, 10), 1, Up, 0, Up),
            ],
        ),
        CsfLabel::TripletD3Pd => open_pair(
            slots,
            Shells::Pd,
            vec![(sq(2, 3), 0, Up, 2, Up), (-sq(1, 3), 1, Up, 1, Up)],
        ),
        CsfLabel::SingletPPd => {
            let k = ExactScalar::frac(1, 2) * sq(1, 5);
            let t = |c: ExactScalar| &k * &c;
            open_pair(
                slots,
                Shells::Pd,
                vec![
                    (t(sq(6, 1)), -1, Up, 2, Down),
                    (t(-sq(3, 1)), 0, Up, 1, Down),
                    (t(one.clone()), 1, Up, 0, Down),
                    (t(-sq(6, 1)), -1, Down, 2, Up),
                    (t(sq(3, 1)), 0, Down, 1, Up),
                    (t(-one), 1, Down, 0, Up),
                ],
            )
        }
        _ => unreachable!("lowered states are built by `coupled`"),
    }
}

fn coupled(label: CsfLabel, slots: Slots) -> Csf {
    match label {
        CsfLabel::TripletP1Sp | CsfLabel::TripletP1Pd => {
            let top = if label == CsfLabel::TripletP1Sp {
                CsfLabel::TripletP2Sp
            } else {
                CsfLabel::TripletP2Pd
            };
            let hw = highest_weight(top, slots);
            hw.apply(Ladder::LMinus)
                .minus(&hw.apply(Ladder::SMinus))
                .scaled(&ExactScalar::frac(1, 2))
        }
        CsfLabel::TripletD1Pd => {
            let hw = highest_weight(CsfLabel::TripletD3Pd, slots);
            let ll = hw.apply(Ladder::LMinus).apply(Ladder::LMinus);
            let ls = hw.apply(Ladder::SMinus).apply(Ladder::LMinus);
            let ss = hw.apply(Ladder::SMinus).apply(Ladder::SMinus);
            let combo = ll
                .minus(&ls.scaled(&ExactScalar::int(3)))
                .plus(&ss.scaled(&ExactScalar::int(6)));
            // the customary 1/(6√2) prefactor leaves norm² = 10/3, so
            // normalize exactly instead
            normalize(combo)
        }
        _ => unreachable!(),
    }
}

/// Any labelled CSF on explicit radial slots.
pub fn build_csf(label: CsfLabel, slots: Slots) -> Csf {
    let state = if label.is_highest_weight() {
        highest_weight(label, slots)
    } else {
        coupled(label, slots)
    };
    state.with_label(label.name())
}

pub fn build_highest_weight(label: CsfLabel) -> Result<Csf> {
    if !label.is_highest_weight() {
        return Err(Error::UnknownLabel(format!(
            "{label} is not a highest-weight state"
        )));
    }
    Ok(build_csf(label, label.default_slots()))
}

pub fn build_coupled(label: CsfLabel) -> Result<Csf> {
    if label.is_highest_weight() {
        return Err(Error::UnknownLabel(format!("{label} is not a coupled J=1 state")));
    }
    Ok(build_csf(label, label.default_slots()))
}

/// LS term of a J = 1, J_z = 1 state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sector {
    SingletP,
    TripletP,
    TripletD,
}

impl Sector {
    pub const ALL: [Sector; 3] = [Sector::SingletP, Sector::TripletP, Sector::TripletD];

    pub fn name(self) -> &'static str {
        match self {
            Sector::SingletP => "1P",
            Sector::TripletP => "3P",
            Sector::TripletD => "3D",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// The J = 1 CSF of this term on the given shells, if one exists.
    pub fn csf_label(self, shells: Shells) -> Option<CsfLabel> {
        match (self, shells) {
            (Sector::SingletP, Shells::Sp) => Some(CsfLabel::SingletPSp),
            (Sector::TripletP, Shells::Sp) => Some(CsfLabel::TripletP1Sp),
            (Sector::TripletD, Shells::Sp) => None,
            (Sector::SingletP, Shells::Pd) => Some(CsfLabel::SingletPPd),
            (Sector::TripletP, Shells::Pd) => Some(CsfLabel::TripletP1Pd),
            (Sector::TripletD, Shells::Pd) => Some(CsfLabel::TripletD1Pd),
        }
    }
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum JjConfig {
    S12P12,
    S12P32,
    P12D32,
    P32D32,
    P32D52,
}

impl JjConfig {
    pub const ALL: [JjConfig; 5] = [
        JjConfig::S12P12,
        JjConfig::S12P32,
        JjConfig::P12D32,
        JjConfig::P32D32,
        JjConfig::P32D52,
    ];

    pub fn name(self) -> &'static str {
        match self {
            JjConfig::S12P12 => "s12p12",
            JjConfig::S12P32 => "s12p32",
            JjConfig::P12D32 => "p12d32",
            JjConfig::P32D32 => "p32d32",
            JjConfig::P32D52 => "p32d52",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn shells(self) -> Shells {
        match self {
            JjConfig::S12P12 | JjConfig::S12P32 => Shells::Sp,
            _ => Shells::Pd,
        }
    }

    /// Radial slots of the five-configuration wavefunction.
    pub fn default_slots(self) -> Slots {
        match self {
            JjConfig::S12P12 => Slots::new(0, 1, 2),
            JjConfig::S12P32 => Slots::new(0, 1, 3),
            JjConfig::P12D32 => Slots::new(0, 2, 4),
            JjConfig::P32D32 => Slots::new(0, 3, 4),
            JjConfig::P32D52 => Slots::new(0, 3, 5),
        }
    }

    /// Expansion coefficient on the LS state of `sector`.
    pub fn ls_coefficient(self, sector: Sector) -> ExactScalar {
        let z = ExactScalar::zero();
        match (self, sector) {
            (JjConfig::S12P12, Sector::SingletP) => -sq(1, 3),
            (JjConfig::S12P12, Sector::TripletP) => sq(2, 3),
            (JjConfig::S12P32, Sector::SingletP) => sq(2, 3),
            (JjConfig::S12P32, Sector::TripletP) => sq(1, 3),
            (JjConfig::S12P12 | JjConfig::S12P32, Sector::TripletD) => z,
            (JjConfig::P12D32, Sector::SingletP) => sq(1, 3),
            (JjConfig::P12D32, Sector::TripletP) => -sq(1, 6),
            (JjConfig::P12D32, Sector::TripletD) => sq(1, 2),
            (JjConfig::P32D32, Sector::SingletP) => -sq(1, 15),
            (JjConfig::P32D32, Sector::TripletP) => sq(8, 15),
            (JjConfig::P32D32, Sector::TripletD) => sq(2, 5),
            (JjConfig::P32D52, Sector::SingletP) => sq(3, 5),
            (JjConfig::P32D52, Sector::TripletP) => sq(3, 10),
            (JjConfig::P32D52, Sector::TripletD) => -sq(1, 10),
        }
    }

    pub fn ls_coefficients_f64(self) -> [f64; 3] {
        Sector::ALL.map(|s| self.ls_coefficient(s).to_f64())
    }
}

impl fmt::Display for JjConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for JjConfig {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        JjConfig::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::UnknownLabel(s.to_string()))
    }
}

pub fn build_jj_config(config: JjConfig, slots: Slots) -> Csf {
    let mut out = Csf::zero();
    for sector in Sector::ALL {
        if let Some(label) = sector.csf_label(config.shells()) {
            let c = config.ls_coefficient(sector);
            if !c.is_zero() {
                out = out.plus(&build_csf(label, slots).scaled(&c));
            }
        }
    }
    out.with_label(config.name())
}

/// Exact square matrix, row-major.
pub type ExactMatrix = Vec<Vec<ExactScalar>>;

#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrices {
    pub u_sp: ExactMatrix,
    pub u_pd: ExactMatrix,
}

pub fn coupling_matrices() -> CouplingMatrices {
    let s3 = sq(1, 3);
    let s30 = sq(1, 30);
    let row = |k: &ExactScalar, v: Vec<ExactScalar>| v.iter().map(|x| k * x).collect::<Vec<_>>();
    CouplingMatrices {
        u_sp: vec![
            row(&s3, vec![sq(2, 1), ExactScalar::one()]),
            row(&s3, vec![ExactScalar::int(-1), sq(2, 1)]),
        ],
        u_pd: vec![
            row(&s30, vec![-sq(3, 1), ExactScalar::int(3), ExactScalar::int(3) * sq(2, 1)]),
            row(
                &s30,
                vec![ExactScalar::int(2) * sq(3, 1), ExactScalar::int(4), -sq(2, 1)],
            ),
            row(&s30, vec![sq(15, 1), -sq(5, 1), sq(10, 1)]),
        ],
    }
}

/// `Aᵀ A` in exact arithmetic.
pub fn gram(a: &ExactMatrix) -> ExactMatrix {
    let n = a[0].len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    a.iter()
                        .fold(ExactScalar::zero(), |acc, row| acc + &row[i] * &row[j])
                })
                .collect()
        })
        .collect()
}
