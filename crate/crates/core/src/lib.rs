pub mod error;
pub mod exact;
pub mod gaunt;
pub mod angular;
pub mod energy;
pub mod grid;
pub mod slater_condon;
pub mod solver;
pub mod diagnostics;
pub mod cli;
pub mod trial;

pub use error::{Error, Result};
