//! Quantum strategies: parameterization, Bell operators and the optimizer.

mod bell;
mod params;
mod schmidt;
mod strategy;

pub use bell::{bell_operator, largest_eigenvalue, BellOperator, EigenResult, DEGENERACY_GAP};
pub(crate) use bell::{assemble, largest_eigenpair};
pub use params::{
    basis_from_params, fix_nondegenerate_222, measurement_from_basis, measurement_from_params, offdiag_pairs,
    reduce_phase_params_n22, unitary_from_params, MeasurementParams, MeasurementSet,
};
pub use schmidt::{schmidt_decompose, SchmidtDecomposition};
pub use strategy::{behavior_of, product_state, QuantumStrategy};
mod solver;
pub use solver::{quantum_value, Method, MethodRun, OptimizerTrace, QuantumReport, SearchLayout, SolverConfig};
pub(crate) use solver::run_search;
