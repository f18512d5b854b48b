//! Tacit coordination problems: classical, quantum, lossy and noisy values.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod behavior;
pub mod classical;
pub mod error;
pub mod io;
pub mod link_budget;
pub mod linalg;
pub mod lossy;
pub mod noise;
pub mod optim;
pub mod oracles;
pub mod problem;
pub mod quantum;
pub mod scan;

pub use behavior::{
    check_local_polytope_222, check_no_signaling, correlation_matrix, deterministic_behavior, expected_utility,
    Behavior, CorrelationMatrix, DeterministicStrategy, LocalPolytopeReport, NoSignalingReport,
};
pub use classical::{classical_value, classical_value_with_budget, ClassicalReport};
pub use error::{Result, TcError};
pub use io::{problem_from_json, problem_to_json, InputDistribution, ProblemDocument};
pub use problem::{
    anti_array, is_xor_array, make_chsh, make_hedge_or_not, permute_problem, weighted_utility, Shape, TcProblem,
    WeightedUtilityArray, XorTable,
};
pub use link_budget::{Medium, LinkConfig};
pub use lossy::{lossy_value, threshold_efficiency, LossModel, LossyReport, ThresholdConfig, ThresholdReport};
pub use noise::NoiseModel;
pub use quantum::{quantum_value, Method, QuantumReport, QuantumStrategy, SolverConfig};
pub use scan::{AxisRange, Quantity, ScanCell, ScanSpec};
