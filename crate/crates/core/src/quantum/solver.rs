//! Quantum value search: layout of the search variables and the driver that
//! runs the grid and/or CMA-ES optimizers over them.

use std::f64::consts::{FRAC_PI_2, TAU};

use serde::{Deserialize, Serialize};

use crate::behavior::DeterministicStrategy;
use crate::error::{Result, TcError};
use crate::optim::{cmaes_maximize, grid_maximize, Candidate, CmaesConfig, GridConfig, Refine, SearchSpace};
use crate::problem::{Shape, TcProblem};
use crate::quantum::bell::{assemble, largest_eigenpair, BellOperator};
use crate::quantum::params::{check_dims, offdiag_pairs, MeasurementParams};
use crate::quantum::strategy::QuantumStrategy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Grid,
    Cmaes,
    Both,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub method: Method,
    pub grid: GridConfig,
    pub cmaes: CmaesConfig,
    /// Drop the qubit phase angles when every party has two observations and two decisions.
    pub reduce_phases: bool,
    /// Search only rank-one partitions on two-party qubit problems.
    pub pin_partitions: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            method: Method::Grid,
            grid: GridConfig::default(),
            cmaes: CmaesConfig::default(),
            reduce_phases: true,
            pin_partitions: true,
        }
    }
}

impl SolverConfig {
    /// Defaults for lossy searches, which also enumerate fallback tables:
    /// only the best few grid points per discrete assignment are refined.
    pub fn lossy() -> Self {
        Self { grid: GridConfig { refine: Refine::Top(3), ..GridConfig::default() }, ..Self::default() }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.cmaes.seed = seed;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodRun {
    pub method: Method,
    pub value: f64,
    pub evaluations: u64,
    pub iterations: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerTrace {
    pub seed: u64,
    pub evaluations: u64,
    pub iterations: u64,
    pub runs: Vec<MethodRun>,
}

#[derive(Debug, Clone, PartialEq)]
enum Angles {
    Full,
    MixingOnly,
}

/// How the optimizer's flat `(x, z)` vectors map onto measurement angles,
/// partitions and (optionally) a fallback strategy.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchLayout {
    shape: Shape,
    dims: Vec<usize>,
    angles: Angles,
    pinned: bool,
    fallback: bool,
    pub space: SearchSpace,
}

fn is_n22(shape: &Shape, dims: &[usize]) -> bool {
    shape.obs.iter().chain(&shape.dec).chain(dims).all(|&k| k == 2)
}

impl SearchLayout {
    /// `reduce` and `pin` apply only where they are valid and are ignored otherwise.
    pub fn new(shape: &Shape, dims: &[usize], reduce: bool, pin: bool, fallback: bool) -> Result<Self> {
        check_dims(shape, dims)?;
        let n22 = is_n22(shape, dims);
        let angles = if reduce && n22 { Angles::MixingOnly } else { Angles::Full };
        let pinned = pin && n22 && shape.parties() == 2;
        let (mut lower, mut upper, mut periodic) = (Vec::new(), Vec::new(), Vec::new());
        for (&q, &obs) in dims.iter().zip(&shape.obs) {
            for _ in 1..obs {
                for (m, n) in offdiag_pairs(q) {
                    if m < n {
                        lower.push(0.0);
                        upper.push(FRAC_PI_2);
                        periodic.push(false);
                    } else if angles == Angles::Full {
                        lower.push(0.0);
                        upper.push(TAU);
                        periodic.push(true);
                    }
                }
            }
        }
        let mut discrete = Vec::new();
        if !pinned {
            for ((&q, &dec), &obs) in dims.iter().zip(&shape.dec).zip(&shape.obs) {
                let card = dec
                    .checked_pow(q as u32)
                    .ok_or(TcError::Budget { count: u128::MAX, budget: usize::MAX as u128 })?;
                discrete.extend(std::iter::repeat_n(card, obs));
            }
        }
        if fallback {
            for i in 0..shape.parties() {
                discrete.extend(std::iter::repeat_n(shape.dec[i], shape.obs[i]));
            }
        }
        let space = SearchSpace::new(lower, upper, periodic, discrete)?;
        Ok(Self { shape: shape.clone(), dims: dims.to_vec(), angles, pinned, fallback, space })
    }

    pub fn num_continuous(&self) -> usize {
        self.space.continuous_dim()
    }

    pub fn num_discrete_combos(&self) -> u128 {
        self.space.num_combos()
    }

    pub fn decode(&self, x: &[f64], z: &[usize]) -> (MeasurementParams, Option<DeterministicStrategy>) {
        let shape = &self.shape;
        let mut xi = x.iter();
        let mut angles = Vec::with_capacity(shape.parties());
        for i in 0..shape.parties() {
            let q = self.dims[i];
            let mut party = Vec::with_capacity(shape.obs[i].saturating_sub(1));
            for _ in 1..shape.obs[i] {
                let v: Vec<f64> = offdiag_pairs(q)
                    .into_iter()
                    .map(|(m, n)| if m < n || self.angles == Angles::Full { *xi.next().unwrap() } else { 0.0 })
                    .collect();
                party.push(v);
            }
            angles.push(party);
        }
        let mut zi = z.iter();
        let partitions = (0..shape.parties())
            .map(|i| {
                let (q, delta) = (self.dims[i], shape.dec[i]);
                (0..shape.obs[i])
                    .map(|_| {
                        if self.pinned {
                            return vec![0, 1];
                        }
                        let mut code = *zi.next().unwrap();
                        let mut part = vec![0; q];
                        for slot in part.iter_mut().rev() {
                            *slot = code % delta;
                            code /= delta;
                        }
                        part
                    })
                    .collect()
            })
            .collect();
        let fallback = self.fallback.then(|| {
            DeterministicStrategy::new(
                (0..shape.parties()).map(|i| (0..shape.obs[i]).map(|_| *zi.next().unwrap()).collect()).collect(),
            )
        });
        (MeasurementParams { dims: self.dims.clone(), angles, partitions }, fallback)
    }
}

/// Runs the configured methods and returns the best candidate with a trace.
pub(crate) fn run_search<F>(
    space: &SearchSpace,
    config: &SolverConfig,
    warm: &[Candidate],
    f: &F,
) -> Result<(Candidate, OptimizerTrace)>
where
    F: Fn(&[f64], &[usize]) -> Result<f64> + Sync,
{
    let mut runs = Vec::new();
    let mut best: Option<Candidate> = None;
    let mut evaluations = 0;
    let mut iterations = 0;
    let mut record = |method: Method, out: crate::optim::OptimOutcome| {
        runs.push(MethodRun { method, value: out.best.value, evaluations: out.evaluations, iterations: out.iterations });
        evaluations += out.evaluations;
        iterations += out.iterations;
        if best.as_ref().is_none_or(|b| out.best.value > b.value) {
            best = Some(out.best);
        }
    };
    if matches!(config.method, Method::Grid | Method::Both) {
        record(Method::Grid, grid_maximize(space, &config.grid, warm, f)?);
    }
    if matches!(config.method, Method::Cmaes | Method::Both) {
        record(Method::Cmaes, cmaes_maximize(space, &config.cmaes, f)?);
    }
    let best = best.expect("at least one method runs");
    Ok((best, OptimizerTrace { seed: config.cmaes.seed, evaluations, iterations, runs }))
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumReport {
    /// `<state|H|state>` for the reported strategy.
    pub value: f64,
    pub strategy: QuantumStrategy,
    pub params: MeasurementParams,
    pub bell_operator: BellOperator,
    /// The top eigenvalue was degenerate, so the state is one of several.
    pub degenerate: bool,
    pub trace: OptimizerTrace,
    /// Raw optimizer coordinates, usable as a warm start.
    pub best: Candidate,
}

/// Lower bound on the quantum value with local dimensions `dims`.
pub fn quantum_value(problem: &TcProblem, dims: &[usize], config: &SolverConfig) -> Result<QuantumReport> {
    let shape = problem.shape();
    let layout = SearchLayout::new(shape, dims, config.reduce_phases, config.pin_partitions, false)?;
    let w = problem.weighted_utility();
    let objective = |x: &[f64], z: &[usize]| -> Result<f64> {
        let (params, _) = layout.decode(x, z);
        Ok(largest_eigenpair(&assemble(shape, &w, &params.measurements(shape)?.ops))?.value)
    };
    let (best, trace) = run_search(&layout.space, config, &[], &objective)?;
    let (params, _) = layout.decode(&best.x, &best.z);
    let measurements = params.measurements(shape)?;
    let h = BellOperator { h: assemble(shape, &w, &measurements.ops) };
    let top = largest_eigenpair(&h.h)?;
    let value = h.expectation(&top.vector);
    Ok(QuantumReport {
        value,
        strategy: QuantumStrategy::new(measurements, top.vector),
        params,
        bell_operator: h,
        degenerate: top.degenerate,
        trace,
        best,
    })
}
