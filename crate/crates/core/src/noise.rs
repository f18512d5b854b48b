//! Depolarizing noise on the shared state.

use crate::behavior::{expected_utility, Behavior};
use crate::error::{Result, TcError};
use crate::linalg::{CMatrix, C64};
use crate::problem::TcProblem;
use crate::quantum::{behavior_of, MeasurementSet, QuantumStrategy};

/// Cells whose advantage is at most this are treated as gapless.
pub const GAPLESS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    nu: f64,
}

impl NoiseModel {
    pub fn new(nu: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&nu) {
            return Err(TcError::Range(format!("noise weight {nu} outside [0, 1]")));
        }
        Ok(Self { nu })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }
}

fn rank(op: &CMatrix) -> f64 {
    op.trace().re.round()
}

/// Behavior on the maximally mixed state: `p(d|o) = prod_i rank(P_i(d_i|o_i)) / q_i`.
pub fn factorizable_rank_behavior(measurements: &MeasurementSet) -> Result<Behavior> {
    let shape = measurements.shape()?;
    let mut p = Vec::with_capacity(shape.len());
    for o in 0..shape.num_obs() {
        let ot = shape.obs_tuple(o);
        for d in 0..shape.num_dec() {
            let dt = shape.dec_tuple(d);
            p.push(
                (0..shape.parties())
                    .map(|i| rank(&measurements.ops[i][ot[i]][dt[i]]) / measurements.dims[i] as f64)
                    .product(),
            );
        }
    }
    Behavior::new(shape, p)
}

/// `(1 - nu) p + nu p_rank`
pub fn noisy_behavior(strategy: &QuantumStrategy, noise: NoiseModel) -> Result<Behavior> {
    let clean = behavior_of(strategy)?;
    let mixed = factorizable_rank_behavior(&strategy.measurements)?;
    clean.mix(&mixed, 1.0 - noise.nu)
}

pub fn factorizable_utility(problem: &TcProblem, measurements: &MeasurementSet) -> Result<f64> {
    expected_utility(problem, &factorizable_rank_behavior(measurements)?)
}

/// `(1 - nu) EU(p) + nu EU(p_rank)`
pub fn noisy_expected_utility(problem: &TcProblem, strategy: &QuantumStrategy, noise: NoiseModel) -> Result<f64> {
    let clean = expected_utility(problem, &behavior_of(strategy)?)?;
    let fact = factorizable_utility(problem, &strategy.measurements)?;
    Ok((1.0 - noise.nu) * clean + noise.nu * fact)
}

/// Largest noise weight keeping `(1 - nu) q + nu u_fact` at or above `c`,
/// clamped to `[0, 1]`.
pub fn robustness(quantum: f64, classical: f64, factorizable: f64) -> Result<f64> {
    if quantum < classical - GAPLESS_TOL {
        return Err(TcError::Range(format!("quantum value {quantum} is below classical {classical}")));
    }
    if quantum - classical <= GAPLESS_TOL {
        return Ok(0.0);
    }
    if quantum <= factorizable {
        return Err(TcError::Numerical(format!(
            "robustness undefined: quantum value {quantum} does not exceed factorizable utility {factorizable}"
        )));
    }
    Ok(((quantum - classical) / (quantum - factorizable)).clamp(0.0, 1.0))
}

/// `max(0, (1 - nu) q + nu u_fact - c)`, with advantages up to
/// [`GAPLESS_TOL`] reported as zero.
pub fn noisy_gap(quantum: f64, classical: f64, factorizable: f64, noise: NoiseModel) -> f64 {
    let gap = (1.0 - noise.nu) * quantum + noise.nu * factorizable - classical;
    if gap <= GAPLESS_TOL {
        0.0
    } else {
        gap
    }
}

/// Embeds a qubit strategy with two outcomes per measurement into ququarts:
/// outcome 0 becomes `P0 ⊗ |0><0|` and outcome 1 its complement, with every
/// party's ancilla prepared in `|0>`. The clean behavior is unchanged while
/// the rank split becomes 1 : 3.
pub fn ququart_lift(strategy: &QuantumStrategy) -> Result<QuantumStrategy> {
    let state = strategy.state.as_ref().ok_or(TcError::MissingState)?;
    let m = &strategy.measurements;
    if m.dims.iter().any(|&q| q != 2) || m.ops.iter().flatten().any(|ops| ops.len() != 2) {
        return Err(TcError::Unsupported("ququart lift needs qubits with two outcomes".into()));
    }
    let anc0 = CMatrix::diag_real(&[1.0, 0.0]);
    let ops = m
        .ops
        .iter()
        .map(|party| {
            party
                .iter()
                .map(|ops| {
                    let low = ops[0].kron(&anc0);
                    vec![low.clone(), CMatrix::identity(4).sub(&low)]
                })
                .collect()
        })
        .collect();
    let n = m.dims.len();
    let mut lifted = vec![C64::new(0.0, 0.0); 4usize.pow(n as u32)];
    for (k, &amp) in state.iter().enumerate() {
        // qubit index bits (a_1..a_n) -> ququart digits (2 a_i + 0)
        let mut idx = 0;
        for i in 0..n {
            let a = (k >> (n - 1 - i)) & 1;
            idx = idx * 4 + 2 * a;
        }
        lifted[idx] = amp;
    }
    Ok(QuantumStrategy::new(MeasurementSet { dims: vec![4; n], ops }, lifted))
}
