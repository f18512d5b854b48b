//! Schmidt decomposition of two-party pure states.

use crate::error::{Result, TcError};
use crate::linalg::{hermitian_eigen, inner, norm, CMatrix, C64, ZERO};

#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtDecomposition {
    /// Nonnegative, descending.
    pub coefficients: Vec<f64>,
    pub left: Vec<Vec<C64>>,
    pub right: Vec<Vec<C64>>,
}

impl SchmidtDecomposition {
    pub fn reconstruct(&self) -> Vec<C64> {
        let (q1, q2) = (self.left[0].len(), self.right[0].len());
        let mut psi = vec![ZERO; q1 * q2];
        for (k, &s) in self.coefficients.iter().enumerate() {
            for a in 0..q1 {
                for b in 0..q2 {
                    psi[a * q2 + b] += self.left[k][a] * self.right[k][b] * s;
                }
            }
        }
        psi
    }
}

/// `|psi> = sum_k s_k |u_k> (x) |v_k>` with `psi[a * q2 + b]` the amplitude of `|a b>`.
pub fn schmidt_decompose(state: &[C64], dims: &[usize]) -> Result<SchmidtDecomposition> {
    if dims.len() != 2 {
        return Err(TcError::Unsupported(format!("Schmidt decomposition needs 2 parties, got {}", dims.len())));
    }
    let (q1, q2) = (dims[0], dims[1]);
    if state.len() != q1 * q2 {
        return Err(TcError::Dimension(format!("state has {} amplitudes, expected {}", state.len(), q1 * q2)));
    }
    let m = CMatrix::from_rows(q1, q2, state.to_vec());
    let eig = hermitian_eigen(&m.matmul(&m.adjoint()))?;
    let r = q1.min(q2);
    let mut coefficients = Vec::with_capacity(r);
    let mut left = Vec::with_capacity(r);
    let mut right: Vec<Vec<C64>> = Vec::with_capacity(r);
    let mt = {
        let mut t = CMatrix::zeros(q2, q1);
        for a in 0..q1 {
            for b in 0..q2 {
                t[(b, a)] = m[(a, b)];
            }
        }
        t
    };
    for k in (q1 - r..q1).rev() {
        let u = eig.vectors.column(k);
        let conj_u: Vec<C64> = u.iter().map(|x| x.conj()).collect();
        let w = mt.matvec(&conj_u);
        let s = norm(&w);
        coefficients.push(s);
        left.push(u);
        right.push(if s > 1e-12 { w.iter().map(|x| x / s).collect() } else { Vec::new() });
    }
    // complete right vectors for vanishing coefficients
    for k in 0..r {
        if !right[k].is_empty() {
            continue;
        }
        let mut found = None;
        for e in 0..q2 {
            let mut v = vec![ZERO; q2];
            v[e] = C64::new(1.0, 0.0);
            for w in right.iter().filter(|w| !w.is_empty()) {
                let c = inner(w, &v);
                for (x, y) in v.iter_mut().zip(w) {
                    *x -= c * y;
                }
            }
            let n = norm(&v);
            if n > 1e-6 {
                found = Some(v.iter().map(|x| x / n).collect());
                break;
            }
        }
        right[k] = found.ok_or_else(|| TcError::Numerical("could not complete Schmidt basis".into()))?;
    }
    Ok(SchmidtDecomposition { coefficients, left, right })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(v: &[f64]) -> Vec<C64> {
        v.iter().map(|&x| C64::new(x, 0.0)).collect()
    }

    fn check(state: &[C64], dims: &[usize]) -> SchmidtDecomposition {
        let d = schmidt_decompose(state, dims).unwrap();
        let total: f64 = d.coefficients.iter().map(|s| s * s).sum();
        assert!((total - norm(state).powi(2)).abs() < 1e-10);
        assert!(d.coefficients.windows(2).all(|w| w[0] >= w[1]));
        let back = d.reconstruct();
        let err = norm(&back.iter().zip(state).map(|(a, b)| a - b).collect::<Vec<_>>());
        assert!(err < 1e-9, "reconstruction error {err}");
        d
    }

    #[test]
    fn optimal_lossy_state() {
        let psi = real(&[0.0401, -0.902, -0.428, -0.0401]);
        let n = norm(&psi);
        let psi: Vec<C64> = psi.iter().map(|x| x / n).collect();
        let d = check(&psi, &[2, 2]);
        assert!((d.coefficients[0] - 0.903).abs() < 5e-3);
        assert!((d.coefficients[1] - 0.429).abs() < 5e-3);
    }

    #[test]
    fn product_and_maximally_entangled() {
        let d = check(&real(&[0.6, 0.8, 0.0, 0.0]), &[2, 2]);
        assert!((d.coefficients[0] - 1.0).abs() < 1e-12 && d.coefficients[1].abs() < 1e-12);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let d = check(&real(&[h, 0.0, 0.0, h]), &[2, 2]);
        assert!(d.coefficients.iter().all(|s| (s - h).abs() < 1e-12));
    }

    #[test]
    fn rectangular_and_complex() {
        let psi = vec![
            C64::new(0.1, 0.2),
            C64::new(-0.3, 0.1),
            C64::new(0.0, 0.4),
            C64::new(0.5, -0.2),
            C64::new(0.2, 0.2),
            C64::new(-0.1, 0.0),
        ];
        let n = norm(&psi);
        let psi: Vec<C64> = psi.iter().map(|x| x / n).collect();
        check(&psi, &[2, 3]);
        check(&psi, &[3, 2]);
    }

    #[test]
    fn arity_check() {
        assert!(matches!(schmidt_decompose(&real(&[1.0; 8]), &[2, 2, 2]), Err(TcError::Unsupported(_))));
        assert!(matches!(schmidt_decompose(&real(&[1.0; 3]), &[2, 2]), Err(TcError::Dimension(_))));
    }
}
