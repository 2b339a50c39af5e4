//! Radial energy functional of the configuration-mixed states.

mod compile;
mod f_function;
mod functional;

pub use compile::{compiled, CompiledEnergy, Integral, NormTerm, Term, TermKind, ORTHOGONAL_SLOTS};
pub use f_function::{f_function, f_function_printed, FVariant};
pub use functional::{
    config_matrices, energy_gradient, energy_unchecked, gradient_radial, report_from_matrices,
    sector_decompose, sector_direction, total_energy, ConfigMatrices, EnergyGradient, EnergyReport, MCState, MixingVector,
    Mode, SectorComponent, CONSTRAINT_TOL,
};

#[cfg(test)]
mod tests;
