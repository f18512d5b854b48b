//! Bell operators and their top eigenpair.

use crate::error::{Result, TcError};
use crate::linalg::{hermitian_eigen, norm, CMatrix, C64};
use crate::problem::{Shape, TcProblem, WeightedUtilityArray};
use crate::quantum::params::MeasurementSet;

pub const HERMITIAN_TOL: f64 = 1e-8;
pub const RESIDUAL_TOL: f64 = 1e-8;
pub const DEGENERACY_GAP: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct BellOperator {
    pub h: CMatrix,
}

impl BellOperator {
    pub fn dim(&self) -> usize {
        self.h.rows()
    }

    pub fn expectation(&self, state: &[C64]) -> f64 {
        self.h.expectation(state)
    }
}

/// `sum_o p(o) sum_d u(o, d) (x)_i ops[i][o_i][d_i]`, assembled party by
/// party: the operator for party `k` given a prefix of observations and
/// decisions is `sum_{o_k, d_k} op ⊗ (rest)`.
pub(crate) fn assemble(shape: &Shape, w: &WeightedUtilityArray, ops: &[Vec<Vec<CMatrix>>]) -> CMatrix {
    fn rec(shape: &Shape, w: &WeightedUtilityArray, ops: &[Vec<Vec<CMatrix>>], k: usize, o: usize, d: usize) -> CMatrix {
        let n = shape.parties();
        if k == n {
            return CMatrix::from_rows(1, 1, vec![C64::new(w.w[o * shape.num_dec() + d], 0.0)]);
        }
        let q = ops[k][0][0].rows();
        let rest_dim: usize = ops[k + 1..].iter().map(|p| p[0][0].rows()).product();
        let mut acc = CMatrix::zeros(q * rest_dim, q * rest_dim);
        for ok in 0..shape.obs[k] {
            for dk in 0..shape.dec[k] {
                let op = &ops[k][ok][dk];
                if op.max_abs() == 0.0 {
                    continue;
                }
                let rest = rec(shape, w, ops, k + 1, o * shape.obs[k] + ok, d * shape.dec[k] + dk);
                acc.add_scaled(&op.kron(&rest), 1.0);
            }
        }
        acc
    }
    let mut h = rec(shape, w, ops, 0, 0, 0);
    // exact Hermitian symmetrization of rounding noise
    let n = h.rows();
    for i in 0..n {
        h[(i, i)] = C64::new(h[(i, i)].re, 0.0);
        for j in i + 1..n {
            let avg = (h[(i, j)] + h[(j, i)].conj()) * 0.5;
            h[(i, j)] = avg;
            h[(j, i)] = avg.conj();
        }
    }
    h
}

pub fn bell_operator(problem: &TcProblem, measurements: &MeasurementSet) -> Result<BellOperator> {
    let shape = problem.shape();
    measurements.validate(shape, 1e-8)?;
    Ok(BellOperator { h: assemble(shape, &problem.weighted_utility(), &measurements.ops) })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    pub value: f64,
    /// Unit norm.
    pub vector: Vec<C64>,
    /// The top two eigenvalues are closer than `DEGENERACY_GAP`.
    pub degenerate: bool,
    pub residual: f64,
}

pub fn largest_eigenvalue(op: &BellOperator) -> Result<EigenResult> {
    largest_eigenpair(&op.h)
}

pub(crate) fn largest_eigenpair(h: &CMatrix) -> Result<EigenResult> {
    let herm = h.hermiticity_error();
    if herm > HERMITIAN_TOL {
        return Err(TcError::NonHermitian(herm));
    }
    let eig = hermitian_eigen(h)?;
    let n = eig.values.len();
    let value = eig.values[n - 1];
    let vector = eig.vectors.column(n - 1);
    let hv = h.matvec(&vector);
    let residual = norm(&hv.iter().zip(&vector).map(|(a, b)| a - b * value).collect::<Vec<_>>());
    if residual > RESIDUAL_TOL * h.max_abs().max(1.0) {
        return Err(TcError::Numerical(format!("eigenpair residual {residual:e}")));
    }
    let degenerate = n > 1 && value - eig.values[n - 2] < DEGENERACY_GAP;
    Ok(EigenResult { value, vector, degenerate, residual })
}
