//! Classical value by exhaustive search over deterministic strategies.

use serde::{Deserialize, Serialize};

use crate::behavior::DeterministicStrategy;
use crate::error::{Result, TcError};
use crate::problem::{weighted_utility, Shape, TcProblem};

pub const DEFAULT_CLASSICAL_BUDGET: u128 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalReport {
    pub value: f64,
    pub strategy: DeterministicStrategy,
    pub num_strategies_searched: u128,
}

/// `prod_i |D_i|^|O_i|`, saturating at `u128::MAX`.
pub fn strategy_count(shape: &Shape) -> u128 {
    shape.obs.iter().zip(&shape.dec).fold(1u128, |acc, (&m, &d)| {
        (0..m).fold(acc, |a, _| a.saturating_mul(d as u128))
    })
}

/// Decodes a mixed-radix strategy index. Digits run over party 1's
/// observations first, most significant first.
pub fn strategy_from_index(shape: &Shape, mut index: u128) -> DeterministicStrategy {
    let mut tables: Vec<Vec<usize>> = shape.obs.iter().map(|&m| vec![0; m]).collect();
    for i in (0..shape.parties()).rev() {
        let d = shape.dec[i] as u128;
        for slot in tables[i].iter_mut().rev() {
            *slot = (index % d) as usize;
            index /= d;
        }
    }
    DeterministicStrategy::new(tables)
}

pub fn classical_value(problem: &TcProblem) -> Result<ClassicalReport> {
    classical_value_with_budget(problem, DEFAULT_CLASSICAL_BUDGET)
}

/// Exact maximum over all deterministic strategies; ties go to the lowest index.
pub fn classical_value_with_budget(problem: &TcProblem, budget: u128) -> Result<ClassicalReport> {
    let shape = problem.shape();
    let count = strategy_count(shape);
    if count > budget {
        return Err(TcError::Budget { count, budget });
    }
    let w = weighted_utility(problem);
    let nd = shape.num_dec();
    let obs_tuples: Vec<Vec<usize>> = (0..shape.num_obs()).map(|o| shape.obs_tuple(o)).collect();

    let mut best_value = f64::NEG_INFINITY;
    let mut best_index = 0u128;
    let mut dec = vec![0usize; shape.parties()];
    for index in 0..count {
        let strategy = strategy_from_index(shape, index);
        let mut value = 0.0;
        for (o, ot) in obs_tuples.iter().enumerate() {
            for (slot, (&oi, table)) in dec.iter_mut().zip(ot.iter().zip(&strategy.tables)) {
                *slot = table[oi];
            }
            value += w.w[o * nd + shape.dec_index(&dec)];
        }
        if value > best_value {
            best_value = value;
            best_index = index;
        }
    }
    Ok(ClassicalReport {
        value: best_value,
        strategy: strategy_from_index(shape, best_index),
        num_strategies_searched: count,
    })
}
