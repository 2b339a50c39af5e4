//! Named, reportable checks of the variational conditions: whether the
//! symmetric minimizers are stationary for the relaxed problem, the
//! singlet/triplet ordering, and whether the relaxed minimum breaks symmetry.

mod breaking;
mod conditions;
mod hund;
mod stationarity;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use breaking::{check_symmetry_breaking, BREAKING_GAP, SECTOR_WEIGHT_MIN};
pub use conditions::{
    check_condition_3d1, check_condition_3p1, condition_3d1_at, condition_3p1_at, condition_3p1_from_f, probe_set,
    triplet_p_amplitudes, variation_measure, ENERGY_MARGIN, VARIATION_FAILS, VARIATION_HOLDS, VARIATION_WINDOW,
};
pub use hund::{check_hund, pair_direct_integral, pair_overlap_integral, HundInput, HundPair, SpatialOrbital, HUND_TOL};
pub use stationarity::{
    check_stationarity, predicted_stationary, saddle_escape, SaddleEscape, NONSTATIONARY_THRESHOLD, STATIONARY_TOL,
};

use crate::error::{Error, Result};
use crate::solver::Solution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConditionId {
    #[serde(rename = "3P1")]
    TripletP1,
    #[serde(rename = "3D1")]
    TripletD1,
    #[serde(rename = "hund")]
    Hund,
    #[serde(rename = "stationarity")]
    Stationarity,
    #[serde(rename = "symmetry-breaking")]
    SymmetryBreaking,
}

impl ConditionId {
    pub fn name(self) -> &'static str {
        match self {
            ConditionId::TripletP1 => "3P1",
            ConditionId::TripletD1 => "3D1",
            ConditionId::Hund => "hund",
            ConditionId::Stationarity => "stationarity",
            ConditionId::SymmetryBreaking => "symmetry-breaking",
        }
    }
}

impl fmt::Display for ConditionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Fails,
    Inconclusive,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Sampled functions backing a verdict, one row per grid point.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Profile {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub id: ConditionId,
    pub verdict: Verdict,
    /// Named evidence in insertion order.
    pub scalars: Vec<(String, f64)>,
    /// Non-numeric evidence, such as the expected pattern.
    pub notes: Vec<(String, String)>,
    pub profile: Option<Profile>,
}

impl ConditionReport {
    pub fn new(id: ConditionId, verdict: Verdict) -> Self {
        Self {
            id,
            verdict,
            scalars: Vec::new(),
            notes: Vec::new(),
            profile: None,
        }
    }

    pub fn with(mut self, name: &str, value: f64) -> Self {
        self.push(name, value);
        self
    }

    pub fn push(&mut self, name: &str, value: f64) {
        self.scalars.push((name.to_string(), value));
    }

    pub fn note(&mut self, name: &str, value: impl Into<String>) {
        self.notes.push((name.to_string(), value.into()));
    }

    pub fn scalar(&self, name: &str) -> Option<f64> {
        self.scalars.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }

    /// `key = value` lines; floats carry 17 significant digits.
    pub fn to_text(&self) -> String {
        let mut out = format!("condition = {}\nverdict = {}\n", self.id, self.verdict);
        for (k, v) in &self.notes {
            out.push_str(&format!("{k} = {v}\n"));
        }
        for (k, v) in &self.scalars {
            out.push_str(&format!("{k} = {v:.16e}\n"));
        }
        out
    }
}

fn require_converged(solution: &Solution, role: &str) -> Result<()> {
    if solution.converged {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "{role} ({} {}) did not converge",
            solution.solve_mode, solution.symmetry
        )))
    }
}
