//! Entanglement loss: lossy Bell operators, lossy values and threshold efficiencies.

use serde::{Deserialize, Serialize};

use crate::behavior::{deterministic_behavior, Behavior, DeterministicStrategy};
use crate::classical::classical_value;
use crate::error::{Result, TcError};
use crate::linalg::CMatrix;
use crate::optim::Candidate;
use crate::problem::{Shape, TcProblem};
use crate::quantum::{
    assemble, behavior_of, largest_eigenpair, run_search, schmidt_decompose, BellOperator, MeasurementParams,
    MeasurementSet, OptimizerTrace, QuantumStrategy, SearchLayout, SolverConfig,
};

/// Per-party probability that the entangled particle arrives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossModel {
    etas: Vec<f64>,
}

impl LossModel {
    pub fn new(etas: Vec<f64>) -> Result<Self> {
        if let Some(e) = etas.iter().find(|e| !(0.0..=1.0).contains(*e)) {
            return Err(TcError::Range(format!("efficiency {e} outside [0, 1]")));
        }
        Ok(Self { etas })
    }

    pub fn uniform(parties: usize, eta: f64) -> Result<Self> {
        Self::new(vec![eta; parties])
    }

    pub fn etas(&self) -> &[f64] {
        &self.etas
    }

    /// `prod_{i in S} (1 - eta_i) prod_{j not in S} eta_j`, where bit `i` of
    /// `subset` marks party `i` as having lost its particle.
    pub fn subset_weight(&self, subset: usize) -> f64 {
        self.etas
            .iter()
            .enumerate()
            .map(|(i, &e)| if subset >> i & 1 == 1 { 1.0 - e } else { e })
            .product()
    }

    fn check(&self, shape: &Shape) -> Result<()> {
        if self.etas.len() != shape.parties() {
            return Err(TcError::Dimension(format!(
                "{} efficiencies for {} parties",
                self.etas.len(),
                shape.parties()
            )));
        }
        Ok(())
    }
}

/// Parties in `subset` (bit `i` for party `i`) act on their fallback table:
/// the projector for the fallback decision becomes `I`, the others `0`.
pub fn semiclassical_measurements(
    measurements: &MeasurementSet,
    fallback: &DeterministicStrategy,
    subset: usize,
) -> MeasurementSet {
    let mut out = measurements.clone();
    for (i, party) in out.ops.iter_mut().enumerate() {
        if subset >> i & 1 == 0 {
            continue;
        }
        let q = measurements.dims[i];
        for (o, ops) in party.iter_mut().enumerate() {
            for (d, op) in ops.iter_mut().enumerate() {
                *op = if fallback.tables[i][o] == d { CMatrix::identity(q) } else { CMatrix::zeros(q, q) };
            }
        }
    }
    out
}

// Effective per-party operators eta P + (1 - eta) [f(o) = d] I. The lossy
// Bell operator is multilinear in these, so summing the subset expansion
// term by term gives the same operator.
fn effective_ops(measurements: &[Vec<Vec<CMatrix>>], dims: &[usize], fallback: &DeterministicStrategy, etas: &[f64]) -> Vec<Vec<Vec<CMatrix>>> {
    measurements
        .iter()
        .enumerate()
        .map(|(i, party)| {
            let eta = etas[i];
            party
                .iter()
                .enumerate()
                .map(|(o, ops)| {
                    ops.iter()
                        .enumerate()
                        .map(|(d, op)| {
                            let mut a = op.scaled(eta);
                            if fallback.tables[i][o] == d && eta < 1.0 {
                                a.add_scaled(&CMatrix::identity(dims[i]), 1.0 - eta);
                            }
                            a
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

pub fn lossy_bell_operator(
    problem: &TcProblem,
    measurements: &MeasurementSet,
    fallback: &DeterministicStrategy,
    loss: &LossModel,
) -> Result<BellOperator> {
    let shape = problem.shape();
    measurements.validate(shape, 1e-8)?;
    fallback.validate(shape)?;
    loss.check(shape)?;
    let ops = effective_ops(&measurements.ops, &measurements.dims, fallback, &loss.etas);
    Ok(BellOperator { h: assemble(shape, &problem.weighted_utility(), &ops) })
}

/// Mixture over loss patterns of the semiclassical behaviors.
pub fn lossy_behavior(strategy: &QuantumStrategy, fallback: &DeterministicStrategy, loss: &LossModel) -> Result<Behavior> {
    let state = strategy.state.as_ref().ok_or(TcError::MissingState)?;
    let shape = strategy.measurements.shape()?;
    fallback.validate(&shape)?;
    loss.check(&shape)?;
    let mut p = vec![0.0; shape.len()];
    for subset in 0..1usize << shape.parties() {
        let w = loss.subset_weight(subset);
        if w == 0.0 {
            continue;
        }
        let semi = QuantumStrategy::new(semiclassical_measurements(&strategy.measurements, fallback, subset), state.clone());
        for (acc, x) in p.iter_mut().zip(behavior_of(&semi)?.probs()) {
            *acc += w * x;
        }
    }
    Behavior::new(shape, p)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LossyReport {
    pub value: f64,
    pub quantum_part: QuantumStrategy,
    pub params: MeasurementParams,
    pub fallback: DeterministicStrategy,
    pub etas: Vec<f64>,
    pub degenerate: bool,
    /// Schmidt coefficients of the state for two-party problems.
    pub schmidt: Option<Vec<f64>>,
    pub trace: OptimizerTrace,
    pub best: Candidate,
}

/// Best lossy value over measurements, partitions and fallback tables.
/// `warm` candidates from an earlier call with the same layout seed extra
/// local refinements.
pub fn lossy_value(
    problem: &TcProblem,
    dims: &[usize],
    loss: &LossModel,
    config: &SolverConfig,
    warm: &[Candidate],
) -> Result<LossyReport> {
    let shape = problem.shape();
    loss.check(shape)?;
    let layout = SearchLayout::new(shape, dims, config.reduce_phases, config.pin_partitions, true)?;
    let w = problem.weighted_utility();
    let objective = |x: &[f64], z: &[usize]| -> Result<f64> {
        let (params, fallback) = layout.decode(x, z);
        let m = params.measurements(shape)?;
        let ops = effective_ops(&m.ops, dims, &fallback.expect("layout has fallback"), &loss.etas);
        Ok(largest_eigenpair(&assemble(shape, &w, &ops))?.value)
    };
    let (best, trace) = run_search(&layout.space, config, warm, &objective)?;
    let (params, fallback) = layout.decode(&best.x, &best.z);
    let fallback = fallback.expect("layout has fallback");
    let measurements = params.measurements(shape)?;
    let h = lossy_bell_operator(problem, &measurements, &fallback, loss)?;
    let top = largest_eigenpair(&h.h)?;
    let value = h.expectation(&top.vector);
    let schmidt = if dims.len() == 2 {
        Some(schmidt_decompose(&top.vector, dims)?.coefficients)
    } else {
        None
    };
    Ok(LossyReport {
        value,
        quantum_part: QuantumStrategy::new(measurements, top.vector),
        params,
        fallback,
        etas: loss.etas.clone(),
        degenerate: top.degenerate,
        schmidt,
        trace,
        best,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdConfig {
    pub tol: f64,
    /// Minimum advantage counted as a gap.
    pub epsilon: f64,
    pub solver: SolverConfig,
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        Self { tol: 1e-3, epsilon: 1e-7, solver: SolverConfig::lossy() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSample {
    pub eta: f64,
    pub lossy_value: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub eta_star: f64,
    pub gapless: bool,
    pub classical_value: f64,
    /// Final `(lo, hi)`: no advantage at `lo`, advantage at `hi`.
    pub bracket: (f64, f64),
    /// The lower end of the search interval already shows an advantage.
    pub invalid_bracket: bool,
    /// Pairs of samples where a larger efficiency gave a lower lossy value
    /// by more than the gap threshold.
    pub monotonicity_violations: usize,
    pub samples: Vec<ThresholdSample>,
}

/// Smallest equal efficiency with a quantum advantage, by bisection. The
/// search starts at 2/3 for two-party binary problems and at 0 otherwise.
pub fn threshold_efficiency(problem: &TcProblem, dims: &[usize], config: &ThresholdConfig) -> Result<ThresholdReport> {
    if !(config.tol > 0.0) || !(config.epsilon >= 0.0) {
        return Err(TcError::Range("tolerance must be positive and epsilon nonnegative".into()));
    }
    let n = problem.parties();
    let c = classical_value(problem)?.value;
    let mut samples = Vec::new();
    let mut eval = |eta: f64, warm: &[Candidate]| -> Result<(f64, Candidate)> {
        let r = lossy_value(problem, dims, &LossModel::uniform(n, eta)?, &config.solver, warm)?;
        samples.push(ThresholdSample { eta, lossy_value: r.value, gap: r.value - c });
        Ok((r.value - c, r.best))
    };

    let mut lo = if problem.shape().is_222() { 2.0 / 3.0 } else { 0.0 };
    let mut hi = 1.0;
    let (gap_hi, mut warm) = eval(hi, &[])?;
    let mut gapless = false;
    let mut invalid = false;
    if gap_hi <= config.epsilon {
        gapless = true;
    } else {
        let (gap_lo, _) = eval(lo, std::slice::from_ref(&warm))?;
        if gap_lo > config.epsilon {
            invalid = true;
            hi = lo;
        } else {
            while hi - lo > config.tol {
                let mid = 0.5 * (lo + hi);
                let (gap, best) = eval(mid, std::slice::from_ref(&warm))?;
                if gap > config.epsilon {
                    hi = mid;
                    warm = best;
                } else {
                    lo = mid;
                }
            }
        }
    }
    let eta_star = if gapless {
        1.0
    } else if invalid {
        lo
    } else {
        0.5 * (lo + hi)
    };

    let mut sorted = samples.clone();
    sorted.sort_by(|a, b| a.eta.total_cmp(&b.eta));
    let monotonicity_violations = sorted
        .iter()
        .enumerate()
        .map(|(k, a)| sorted[k + 1..].iter().filter(|b| b.lossy_value < a.lossy_value - config.epsilon).count())
        .sum();

    Ok(ThresholdReport {
        eta_star,
        gapless,
        classical_value: c,
        bracket: if gapless { (1.0, 1.0) } else { (lo, hi) },
        invalid_bracket: invalid,
        monotonicity_violations,
        samples,
    })
}

/// Behavior of the fallback alone, the `eta = 0` end of the lossy family.
pub fn fallback_behavior(shape: &Shape, fallback: &DeterministicStrategy) -> Result<Behavior> {
    deterministic_behavior(shape, fallback)
}
