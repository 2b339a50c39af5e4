//! Whether the relaxed J = 1 minimum lies strictly below every symmetric one.

use crate::angular::Sector;
use crate::error::{Error, Result};

use super::{require_converged, ConditionId, ConditionReport, Verdict};
use crate::solver::Solution;

/// Required energy gap below the best symmetric minimum, in hartree.
pub const BREAKING_GAP: f64 = 1e-6;
/// Required weight of every LS sector in the relaxed minimizer.
pub const SECTOR_WEIGHT_MIN: f64 = 1e-4;

pub fn check_symmetry_breaking(full: &Solution, symmetric: &[&Solution]) -> Result<ConditionReport> {
    if symmetric.is_empty() {
        return Err(Error::Precondition("no symmetric solutions to compare with".into()));
    }
    require_converged(full, "relaxed solution")?;
    for s in symmetric {
        require_converged(s, "symmetric solution")?;
    }
    let best = symmetric.iter().map(|s| s.energy()).fold(f64::INFINITY, f64::min);
    let gap = best - full.energy();
    let mixed = !full.classification.is_symmetric();
    let weights = Sector::ALL.map(|s| full.report.weight(s));
    let spread = weights.iter().all(|w| *w > SECTOR_WEIGHT_MIN);
    let verdict = if gap > BREAKING_GAP && mixed && spread {
        Verdict::Holds
    } else {
        Verdict::Fails
    };
    let mut report = ConditionReport::new(ConditionId::SymmetryBreaking, verdict).with("energy_relaxed", full.energy());
    for s in symmetric {
        report.push(&format!("energy_{}_{}", s.solve_mode, s.symmetry), s.energy());
    }
    report.push("energy_symmetric_min", best);
    report.push("gap", gap);
    report.push("gap_required", BREAKING_GAP);
    for (s, w) in Sector::ALL.iter().zip(weights) {
        report.push(&format!("weight_{}", s.name()), w);
    }
    report.push("weight_required", SECTOR_WEIGHT_MIN);
    report.note("classification", full.classification.to_string());
    report.note("gap_clause", pass(gap > BREAKING_GAP));
    report.note("mixed_clause", pass(mixed));
    report.note("weight_clause", pass(spread));
    Ok(report)
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "met"
    } else {
        "not met"
    }
}
