//! Derivative-free maximizers over mixed continuous/discrete boxes.

mod cmaes;
mod grid;
mod nelder_mead;
mod space;

pub use cmaes::{cmaes_maximize, CmaesConfig};
pub use grid::{grid_maximize, linspace, GridConfig, Refine};
pub use nelder_mead::{nelder_mead_maximize, NelderMeadConfig};
pub use space::{Candidate, OptimOutcome, SearchSpace};
