//! Angle parameterization of unitaries, bases and projective measurements.

use std::f64::consts::{FRAC_PI_2, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Result, TcError};
use crate::linalg::{CMatrix, C64, ZERO};
use crate::problem::Shape;

/// Off-diagonal index pairs `(m, n)`, `m != n`, in row-major order. Angle
/// vectors for [`basis_from_params`] follow this order.
pub fn offdiag_pairs(q: usize) -> Vec<(usize, usize)> {
    (0..q).flat_map(|m| (0..q).filter(move |&n| n != m).map(move |n| (m, n))).collect()
}

fn check_count(what: &str, got: usize, expected: usize) -> Result<()> {
    if got != expected {
        return Err(TcError::Dimension(format!("{what}: got {got} angles, expected {expected}")));
    }
    Ok(())
}

// U <- U * exp(i P_n lambda): scales column n.
fn apply_phase(u: &mut CMatrix, n: usize, lambda: f64) {
    if lambda == 0.0 {
        return;
    }
    let ph = C64::from_polar(1.0, lambda);
    for r in 0..u.rows() {
        u[(r, n)] *= ph;
    }
}

// U <- U * exp(i sigma_{m,n} theta), a real rotation on columns m and n.
fn apply_rotation(u: &mut CMatrix, m: usize, n: usize, theta: f64) {
    if theta == 0.0 {
        return;
    }
    let (s, c) = theta.sin_cos();
    for r in 0..u.rows() {
        let a = u[(r, m)];
        let b = u[(r, n)];
        u[(r, m)] = a * c - b * s;
        u[(r, n)] = a * s + b * c;
    }
}

// Angle lookup: `lambda(m, n)` for m != n.
fn compose(q: usize, lambda: impl Fn(usize, usize) -> f64, diag: Option<&[f64]>) -> CMatrix {
    let mut u = CMatrix::identity(q);
    for m in 0..q.saturating_sub(1) {
        for n in m + 1..q {
            apply_phase(&mut u, n, lambda(n, m));
            apply_rotation(&mut u, m, n, lambda(m, n));
        }
    }
    if let Some(d) = diag {
        for (l, &x) in d.iter().enumerate() {
            apply_phase(&mut u, l, x);
        }
    }
    u
}

/// Full `q x q` unitary from `q^2` angles laid out row-major as `lambda[m * q + n]`.
///
/// Mixing angles (`m < n`) must lie in `[0, pi/2]`, phases (`m >= n`) in `[0, 2pi]`.
pub fn unitary_from_params(q: usize, lambda: &[f64]) -> Result<CMatrix> {
    check_count("unitary", lambda.len(), q * q)?;
    for m in 0..q {
        for n in 0..q {
            let x = lambda[m * q + n];
            let hi = if m < n { FRAC_PI_2 } else { TAU };
            if !x.is_finite() || !(0.0..=hi).contains(&x) {
                return Err(TcError::Range(format!("angle ({m}, {n}) = {x} outside [0, {hi}]")));
            }
        }
    }
    let diag: Vec<f64> = (0..q).map(|l| lambda[l * q + l]).collect();
    Ok(compose(q, |m, n| lambda[m * q + n], Some(&diag)))
}

/// Orthonormal basis (as matrix columns) from the `q^2 - q` off-diagonal
/// angles in [`offdiag_pairs`] order. Any real angle is accepted.
pub fn basis_from_params(q: usize, angles: &[f64]) -> Result<CMatrix> {
    check_count("basis", angles.len(), q * q - q)?;
    if angles.iter().any(|x| !x.is_finite()) {
        return Err(TcError::NonFinite("basis angles".into()));
    }
    // position of (m, n) in the off-diagonal order
    let at = |m: usize, n: usize| angles[m * (q - 1) + if n > m { n - 1 } else { n }];
    Ok(compose(q, at, None))
}

/// Projectors for each decision: sums of `|b_k><b_k|` over basis columns `k`
/// assigned to that decision. Unassigned decisions get the zero projector.
pub fn measurement_from_basis(basis: &CMatrix, delta: usize, partition: &[usize]) -> Result<Vec<CMatrix>> {
    let q = basis.cols();
    if partition.len() != q {
        return Err(TcError::Dimension(format!("partition has {} entries, expected {q}", partition.len())));
    }
    if let Some(&d) = partition.iter().find(|&&d| d >= delta) {
        return Err(TcError::Range(format!("partition assigns decision {d} but only {delta} exist")));
    }
    let mut ops = vec![CMatrix::zeros(q, q); delta];
    for (k, &d) in partition.iter().enumerate() {
        let op = &mut ops[d];
        for i in 0..q {
            let bi = basis[(i, k)];
            if bi == ZERO {
                continue;
            }
            for j in 0..q {
                op[(i, j)] += bi * basis[(j, k)].conj();
            }
        }
    }
    Ok(ops)
}

pub fn measurement_from_params(q: usize, delta: usize, angles: &[f64], partition: &[usize]) -> Result<Vec<CMatrix>> {
    measurement_from_basis(&basis_from_params(q, angles)?, delta, partition)
}

/// Projectors indexed `[party][observation][decision]`, each `dims[party]` square.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSet {
    pub dims: Vec<usize>,
    pub ops: Vec<Vec<Vec<CMatrix>>>,
}

impl MeasurementSet {
    pub fn shape(&self) -> Result<Shape> {
        Shape::new(
            self.ops.iter().map(Vec::len).collect(),
            self.ops.iter().map(|o| o.first().map_or(0, Vec::len)).collect(),
        )
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// Checks dimensions and that every observation's operators are
    /// Hermitian, idempotent and sum to the identity.
    pub fn validate(&self, shape: &Shape, tol: f64) -> Result<()> {
        if self.dims.len() != shape.parties() || self.ops.len() != shape.parties() {
            return Err(TcError::Dimension("measurement set and problem disagree on party count".into()));
        }
        for (i, party) in self.ops.iter().enumerate() {
            let q = self.dims[i];
            if party.len() != shape.obs[i] {
                return Err(TcError::Dimension(format!("party {i} has {} observations", party.len())));
            }
            for (o, ops) in party.iter().enumerate() {
                if ops.len() != shape.dec[i] {
                    return Err(TcError::Dimension(format!("party {i}, observation {o}: {} outcomes", ops.len())));
                }
                let mut total = CMatrix::zeros(q, q);
                for op in ops {
                    if op.rows() != q || op.cols() != q {
                        return Err(TcError::Dimension(format!("party {i} operator is not {q}x{q}")));
                    }
                    if op.hermiticity_error() > tol || op.matmul(op).max_abs_diff(op) > tol {
                        return Err(TcError::Numerical(format!("party {i}, observation {o}: not a projector")));
                    }
                    total.add_scaled(op, 1.0);
                }
                if total.max_abs_diff(&CMatrix::identity(q)) > tol {
                    return Err(TcError::Numerical(format!("party {i}, observation {o}: outcomes do not sum to I")));
                }
            }
        }
        Ok(())
    }
}

/// Per-party angles and partitions describing a full measurement set.
///
/// The first observation of each party is measured in the computational
/// basis, so `angles[i]` holds one vector per observation after the first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementParams {
    pub dims: Vec<usize>,
    /// `angles[party][obs - 1]`, each of length `q^2 - q`.
    pub angles: Vec<Vec<Vec<f64>>>,
    /// `partitions[party][obs][k]` is the decision for basis vector `k`.
    pub partitions: Vec<Vec<Vec<usize>>>,
}

impl MeasurementParams {
    /// Computational bases everywhere; basis vector `k` goes to decision `min(k, |D|-1)`.
    pub fn computational(shape: &Shape, dims: &[usize]) -> Result<Self> {
        check_dims(shape, dims)?;
        let angles = (0..shape.parties())
            .map(|i| vec![vec![0.0; dims[i] * dims[i] - dims[i]]; shape.obs[i] - 1])
            .collect();
        let partitions = (0..shape.parties())
            .map(|i| vec![(0..dims[i]).map(|k| k.min(shape.dec[i] - 1)).collect(); shape.obs[i]])
            .collect();
        Ok(Self { dims: dims.to_vec(), angles, partitions })
    }

    pub fn validate(&self, shape: &Shape) -> Result<()> {
        check_dims(shape, &self.dims)?;
        for i in 0..shape.parties() {
            let q = self.dims[i];
            if self.angles.len() != shape.parties() || self.angles[i].len() != shape.obs[i] - 1 {
                return Err(TcError::Dimension(format!("party {i}: wrong number of angle vectors")));
            }
            for a in &self.angles[i] {
                check_count("measurement", a.len(), q * q - q)?;
            }
            if self.partitions.len() != shape.parties() || self.partitions[i].len() != shape.obs[i] {
                return Err(TcError::Dimension(format!("party {i}: wrong number of partitions")));
            }
        }
        Ok(())
    }

    pub fn num_continuous(&self) -> usize {
        self.angles.iter().flatten().map(Vec::len).sum()
    }

    pub fn measurements(&self, shape: &Shape) -> Result<MeasurementSet> {
        self.validate(shape)?;
        let mut ops = Vec::with_capacity(shape.parties());
        for i in 0..shape.parties() {
            let q = self.dims[i];
            let mut party = Vec::with_capacity(shape.obs[i]);
            for o in 0..shape.obs[i] {
                let basis = if o == 0 {
                    CMatrix::identity(q)
                } else {
                    basis_from_params(q, &self.angles[i][o - 1])?
                };
                party.push(measurement_from_basis(&basis, shape.dec[i], &self.partitions[i][o])?);
            }
            ops.push(party);
        }
        Ok(MeasurementSet { dims: self.dims.clone(), ops })
    }
}

pub(crate) fn check_dims(shape: &Shape, dims: &[usize]) -> Result<()> {
    if dims.len() != shape.parties() {
        return Err(TcError::Dimension(format!("{} dims for {} parties", dims.len(), shape.parties())));
    }
    for (i, (&q, &d)) in dims.iter().zip(&shape.dec).enumerate() {
        if q < d {
            return Err(TcError::Range(format!("party {i}: dimension {q} is below its {d} decisions")));
        }
    }
    Ok(())
}

fn is_n22(shape: &Shape, dims: &[usize]) -> bool {
    shape.obs.iter().all(|&m| m == 2) && shape.dec.iter().all(|&d| d == 2) && dims.iter().all(|&q| q == 2)
}

/// Sets the qubit phase angle of every party to zero. Valid for binary
/// observations and decisions on qubits, where that phase does not change the
/// Bell operator's spectrum.
pub fn reduce_phase_params_n22(shape: &Shape, params: &MeasurementParams) -> Result<MeasurementParams> {
    params.validate(shape)?;
    if !is_n22(shape, &params.dims) {
        return Err(TcError::Unsupported("phase reduction needs two observations, two decisions and qubits".into()));
    }
    let mut out = params.clone();
    for party in &mut out.angles {
        party[0][1] = 0.0;
    }
    Ok(out)
}

/// Pins every partition to the rank-one split `[0, 1]` on a two-party qubit problem.
pub fn fix_nondegenerate_222(shape: &Shape, params: &MeasurementParams) -> Result<MeasurementParams> {
    params.validate(shape)?;
    if shape.parties() != 2 || !is_n22(shape, &params.dims) {
        return Err(TcError::Unsupported("partition pinning needs a (2,2,2) problem on qubits".into()));
    }
    let mut out = params.clone();
    for party in &mut out.partitions {
        for part in party.iter_mut() {
            *part = vec![0, 1];
        }
    }
    Ok(out)
}
