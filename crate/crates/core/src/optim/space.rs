use serde::{Deserialize, Serialize};

use crate::error::{Result, TcError};

/// Box of continuous coordinates plus a list of finite discrete coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Periodic coordinates wrap into `[lower, upper)`; the rest are clamped.
    pub periodic: Vec<bool>,
    /// Cardinality of each discrete coordinate.
    pub discrete: Vec<usize>,
}

impl SearchSpace {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, periodic: Vec<bool>, discrete: Vec<usize>) -> Result<Self> {
        if lower.len() != upper.len() || lower.len() != periodic.len() {
            return Err(TcError::Dimension("bounds and periodicity flags differ in length".into()));
        }
        if lower.iter().zip(&upper).any(|(l, u)| !(l <= u) || !l.is_finite() || !u.is_finite()) {
            return Err(TcError::Range("search bounds must be finite with lower <= upper".into()));
        }
        if discrete.contains(&0) {
            return Err(TcError::Range("discrete coordinate with no values".into()));
        }
        Ok(Self { lower, upper, periodic, discrete })
    }

    pub fn continuous_dim(&self) -> usize {
        self.lower.len()
    }

    /// Number of discrete assignments, saturating.
    pub fn num_combos(&self) -> u128 {
        self.discrete.iter().fold(1u128, |a, &k| a.saturating_mul(k as u128))
    }

    /// Mixed-radix decoding, first coordinate most significant.
    pub fn combo(&self, mut index: u128) -> Vec<usize> {
        let mut z = vec![0; self.discrete.len()];
        for (slot, &k) in z.iter_mut().zip(&self.discrete).rev() {
            *slot = (index % k as u128) as usize;
            index /= k as u128;
        }
        z
    }

    /// Maps an arbitrary point into the box.
    pub fn project(&self, x: &mut [f64]) {
        for (i, xi) in x.iter_mut().enumerate() {
            let (lo, hi) = (self.lower[i], self.upper[i]);
            if self.periodic[i] && hi > lo {
                let w = hi - lo;
                *xi = lo + (*xi - lo).rem_euclid(w);
                if *xi >= hi {
                    *xi = lo;
                }
            } else {
                *xi = xi.clamp(lo, hi);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub x: Vec<f64>,
    pub z: Vec<usize>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimOutcome {
    pub best: Candidate,
    pub evaluations: u64,
    pub iterations: u64,
}

/// First strictly greater value wins, so ties keep the earliest candidate.
pub(crate) fn best_of<I: IntoIterator<Item = Candidate>>(items: I) -> Option<Candidate> {
    let mut best: Option<Candidate> = None;
    for c in items {
        if best.as_ref().is_none_or(|b| c.value > b.value) {
            best = Some(c);
        }
    }
    best
}
