//! Quantum strategies and the behaviors they induce.

use crate::behavior::Behavior;
use crate::error::{Result, TcError};
use crate::linalg::{kron_vec, norm, C64};
use crate::quantum::params::MeasurementSet;

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumStrategy {
    pub measurements: MeasurementSet,
    /// Shared state over the tensor product of the parties' spaces.
    pub state: Option<Vec<C64>>,
}

impl QuantumStrategy {
    pub fn new(measurements: MeasurementSet, state: Vec<C64>) -> Self {
        Self { measurements, state: Some(state) }
    }

    pub fn validate(&self) -> Result<()> {
        let shape = self.measurements.shape()?;
        self.measurements.validate(&shape, 1e-8)?;
        if let Some(s) = &self.state {
            if s.len() != self.measurements.total_dim() {
                return Err(TcError::Dimension(format!(
                    "state has {} amplitudes, expected {}",
                    s.len(),
                    self.measurements.total_dim()
                )));
            }
            if (norm(s) - 1.0).abs() > 1e-8 {
                return Err(TcError::Range(format!("state norm {} is not 1", norm(s))));
            }
        }
        Ok(())
    }
}

/// `p(d|o) = <psi| (x)_i P_i(d_i|o_i) |psi>`.
pub fn behavior_of(strategy: &QuantumStrategy) -> Result<Behavior> {
    let state = strategy.state.as_ref().ok_or(TcError::MissingState)?;
    strategy.validate()?;
    let shape = strategy.measurements.shape()?;
    let ops = &strategy.measurements.ops;
    let n = shape.parties();
    let mut p = Vec::with_capacity(shape.len());
    for o in 0..shape.num_obs() {
        let ot = shape.obs_tuple(o);
        for d in 0..shape.num_dec() {
            let dt = shape.dec_tuple(d);
            // apply each party's projector to its tensor factor
            let mut v = state.clone();
            let mut left = 1usize;
            for i in 0..n {
                let q = strategy.measurements.dims[i];
                let right = v.len() / (left * q);
                let op = &ops[i][ot[i]][dt[i]];
                let mut out = vec![C64::new(0.0, 0.0); v.len()];
                for a in 0..left {
                    for r in 0..q {
                        for c in 0..q {
                            let x = op[(r, c)];
                            if x == C64::new(0.0, 0.0) {
                                continue;
                            }
                            for b in 0..right {
                                out[(a * q + r) * right + b] += x * v[(a * q + c) * right + b];
                            }
                        }
                    }
                }
                v = out;
                left *= q;
            }
            let prob: f64 = state.iter().zip(&v).map(|(s, x)| (s.conj() * x).re).sum();
            p.push(prob.clamp(0.0, 1.0));
        }
    }
    Behavior::new(shape, p)
}

/// `|psi_1> (x) ... (x) |psi_n>`
pub fn product_state(factors: &[Vec<C64>]) -> Vec<C64> {
    factors.iter().fold(vec![C64::new(1.0, 0.0)], |acc, f| kron_vec(&acc, f))
}
