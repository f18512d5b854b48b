//! Closed forms for CHSH with independent Bernoulli inputs.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Result, TcError};

/// `1 - 1/sqrt(2)`
pub const GAP_LOW: f64 = 1.0 - FRAC_1_SQRT_2;
/// `1/sqrt(2)`
pub const GAP_HIGH: f64 = FRAC_1_SQRT_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Low,
    Middle,
    High,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseValue {
    pub p: f64,
    pub value: f64,
    pub branch: Branch,
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(TcError::Range(format!("p = {p} outside [0, 1]")));
    }
    Ok(())
}

pub fn chsh_bernoulli_classical(p: f64) -> Result<PiecewiseValue> {
    check_p(p)?;
    Ok(if p <= 0.5 {
        PiecewiseValue { p, value: 1.0 - p * p, branch: Branch::Low }
    } else {
        PiecewiseValue { p, value: -p * p + 2.0 * p, branch: Branch::High }
    })
}

pub fn chsh_bernoulli_quantum(p: f64) -> Result<PiecewiseValue> {
    check_p(p)?;
    Ok(if p <= GAP_LOW {
        PiecewiseValue { p, value: 1.0 - p * p, branch: Branch::Low }
    } else if p >= GAP_HIGH {
        PiecewiseValue { p, value: -p * p + 2.0 * p, branch: Branch::High }
    } else {
        PiecewiseValue { p, value: FRAC_1_SQRT_2 * (1.0 - 2.0 * p * (1.0 - p)) + 0.5, branch: Branch::Middle }
    })
}

/// Whether a quantum advantage exists: `p` strictly inside `(1 - 1/sqrt 2, 1/sqrt 2)`.
pub fn gap_region(p: f64) -> bool {
    p > GAP_LOW && p < GAP_HIGH
}

/// `sqrt((2p^2 - 1)(2p^2 - 4p + 1)) / (2 sqrt 2)`, real only on
/// `[1 - 1/sqrt 2, 1/sqrt 2]`; `None` elsewhere.
pub fn lambda_star(p: f64) -> Result<Option<f64>> {
    check_p(p)?;
    if !(GAP_LOW..=GAP_HIGH).contains(&p) {
        return Ok(None);
    }
    let prod = (2.0 * p * p - 1.0) * (2.0 * p * p - 4.0 * p + 1.0);
    Ok(Some(prod.max(0.0).sqrt() / (2.0 * std::f64::consts::SQRT_2)))
}

/// `|asin a + asin b + asin c - asin d| <= pi`.
pub fn tsirelson_feasible(a: f64, b: f64, c: f64, d: f64) -> Result<bool> {
    if [a, b, c, d].iter().any(|x| !(-1.0..=1.0).contains(x)) {
        return Err(TcError::Range("correlations must lie in [-1, 1]".into()));
    }
    Ok((a.asin() + b.asin() + c.asin() - d.asin()).abs() <= PI + 1e-10)
}

/// All four sign placements of the Tsirelson constraint for a 2x2
/// correlation matrix `[[c00, c01], [c10, c11]]`.
pub fn tsirelson_feasible_all(c: [[f64; 2]; 2]) -> Result<bool> {
    let [[a, b], [cc, d]] = c;
    Ok(tsirelson_feasible(a, b, cc, d)?
        && tsirelson_feasible(a, b, d, cc)?
        && tsirelson_feasible(a, cc, d, b)?
        && tsirelson_feasible(b, cc, d, a)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_8;

    #[test]
    fn classical_values() {
        assert_eq!(chsh_bernoulli_classical(0.5).unwrap().value, 0.75);
        assert_eq!(chsh_bernoulli_classical(0.0).unwrap().value, 1.0);
        assert!((chsh_bernoulli_classical(0.3).unwrap().value - 0.91).abs() < 1e-15);
        assert!(chsh_bernoulli_classical(1.1).is_err());
    }

    #[test]
    fn quantum_values_and_continuity() {
        assert!((chsh_bernoulli_quantum(0.5).unwrap().value - FRAC_PI_8.cos().powi(2)).abs() < 1e-15);
        assert!(((1.0 + FRAC_1_SQRT_2) / 2.0 - FRAC_PI_8.cos().powi(2)).abs() < 1e-15);
        assert!((chsh_bernoulli_quantum(0.3).unwrap().value - (FRAC_1_SQRT_2 * 0.58 + 0.5)).abs() < 1e-15);
        for edge in [GAP_LOW, GAP_HIGH] {
            let mid = FRAC_1_SQRT_2 * (1.0 - 2.0 * edge * (1.0 - edge)) + 0.5;
            let q = chsh_bernoulli_quantum(edge).unwrap();
            assert!((q.value - mid).abs() < 1e-12);
            assert!((q.value - chsh_bernoulli_classical(edge).unwrap().value).abs() < 1e-12);
            assert_ne!(q.branch, Branch::Middle);
        }
    }

    #[test]
    fn gap_region_is_open() {
        assert!(gap_region(0.5));
        assert!(!gap_region(0.2));
        assert!(!gap_region(GAP_LOW) && !gap_region(GAP_HIGH));
        for k in 0..=100 {
            let p = k as f64 / 100.0;
            let diff = chsh_bernoulli_quantum(p).unwrap().value - chsh_bernoulli_classical(p).unwrap().value;
            assert!(diff >= -1e-15);
            assert_eq!(diff > 1e-9, gap_region(p), "p = {p}");
        }
    }

    #[test]
    fn lambda_star_values() {
        // (2p^2 - 1)(2p^2 - 4p + 1) = (-0.5)(-0.5) at p = 1/2
        let l = lambda_star(0.5).unwrap().unwrap();
        assert!((l - 0.5 / (2.0 * 2f64.sqrt())).abs() < 1e-15);
        assert!(lambda_star(GAP_HIGH).unwrap().unwrap().abs() < 1e-7);
        assert_eq!(lambda_star(0.1).unwrap(), None);
        for k in 0..=20 {
            let p = GAP_LOW + (GAP_HIGH - GAP_LOW) * k as f64 / 20.0;
            let l = lambda_star(p).unwrap().unwrap();
            assert!(l * l <= p.powi(4) + 1e-12 && l * l <= (1.0 - p).powi(4) + 1e-12);
        }
    }

    #[test]
    fn lambda_star_solves_the_stationarity_condition() {
        // With A = l^2 / (p (1-p))^2 the optimum satisfies
        // sqrt(1 - l^2/(1-p)^4) sqrt(1 - l^2/p^4) = +-(1 - 3A); compare squares.
        for p in [0.3, 0.35, 0.4, 0.45, 0.5, 0.55, 0.6, 0.65, 0.7] {
            let l2 = lambda_star(p).unwrap().unwrap().powi(2);
            let a = l2 / (p * (1.0 - p)).powi(2);
            let s2 = (1.0 - l2 / (1.0 - p).powi(4)) * (1.0 - l2 / p.powi(4));
            assert!((s2 - (1.0 - 3.0 * a).powi(2)).abs() < 1e-12, "p = {p}");
        }
    }

    #[test]
    fn tsirelson_corners() {
        let h = FRAC_1_SQRT_2;
        assert!(tsirelson_feasible(h, h, h, -h).unwrap());
        assert!(tsirelson_feasible(1.0, 1.0, 1.0, 1.0).unwrap());
        assert!(!tsirelson_feasible(1.0, 1.0, 1.0, -1.0).unwrap());
        assert!(tsirelson_feasible(2.0, 0.0, 0.0, 0.0).is_err());
    }
}
