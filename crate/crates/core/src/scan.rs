//! Parameter sweeps over the hedge-or-not family.

use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classical::classical_value;
use crate::error::{Result, TcError};
use crate::lossy::{threshold_efficiency, ThresholdConfig};
use crate::noise::{factorizable_utility, noisy_gap, robustness, NoiseModel, GAPLESS_TOL};
use crate::problem::make_hedge_or_not;
use crate::quantum::{quantum_value, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Gap,
    EtaStar,
    Robustness,
    NoisyGap,
}

impl FromStr for Quantity {
    type Err = TcError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gap" => Ok(Self::Gap),
            "eta_star" => Ok(Self::EtaStar),
            "robustness" => Ok(Self::Robustness),
            "noisy_gap" => Ok(Self::NoisyGap),
            other => Err(TcError::Parse(format!("unknown scan quantity `{other}`"))),
        }
    }
}

/// Inclusive `start, start + step, ..., stop` within `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisRange {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Default for AxisRange {
    fn default() -> Self {
        Self { start: 0.0, stop: 1.0, step: 0.1 }
    }
}

impl AxisRange {
    pub fn new(start: f64, stop: f64, step: f64) -> Result<Self> {
        let r = Self { start, stop, step };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0) {
            return Err(TcError::Range(format!("step {} must be positive", self.step)));
        }
        if !(0.0..=1.0).contains(&self.start) || !(0.0..=1.0).contains(&self.stop) || self.start > self.stop {
            return Err(TcError::Range(format!("range [{}, {}] must lie within [0, 1]", self.start, self.stop)));
        }
        Ok(())
    }

    /// Grid values, rounded to 12 decimals so that `0.1 * 3` prints as `0.3`.
    pub fn values(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..n).map(|k| ((self.start + k as f64 * self.step) * 1e12).round() / 1e12).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSpec {
    pub quantity: Quantity,
    pub p: AxisRange,
    pub beta: AxisRange,
    /// Noise weight for [`Quantity::NoisyGap`].
    pub nu: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanCell {
    pub p: f64,
    pub beta: f64,
    pub value: f64,
}

/// Classical and quantum values of one hedge-or-not instance, plus the
/// utility of the quantum strategy on the maximally mixed state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellSolution {
    pub p: f64,
    pub beta: f64,
    pub classical: f64,
    pub quantum: f64,
    pub factorizable: f64,
}

impl CellSolution {
    pub fn gap(&self) -> f64 {
        let g = self.quantum - self.classical;
        if g <= GAPLESS_TOL {
            0.0
        } else {
            g
        }
    }

    pub fn robustness(&self) -> Result<f64> {
        if self.gap() == 0.0 {
            return Ok(0.0);
        }
        robustness(self.quantum, self.classical, self.factorizable)
    }

    pub fn noisy_gap(&self, noise: NoiseModel) -> f64 {
        noisy_gap(self.quantum.max(self.classical), self.classical, self.factorizable, noise)
    }
}

pub fn solve_cell(p: f64, beta: f64, config: &SolverConfig) -> Result<CellSolution> {
    let problem = make_hedge_or_not(p, beta)?;
    let classical = classical_value(&problem)?.value;
    let q = quantum_value(&problem, &[2, 2], config)?;
    let factorizable = factorizable_utility(&problem, &q.strategy.measurements)?;
    Ok(CellSolution { p, beta, classical, quantum: q.value, factorizable })
}

fn grid(spec: &ScanSpec) -> Result<Vec<(f64, f64)>> {
    spec.p.validate()?;
    spec.beta.validate()?;
    let betas = spec.beta.values();
    Ok(spec.p.values().into_iter().flat_map(|p| betas.iter().map(move |&b| (p, b))).collect())
}

/// Solves every cell of the `p` x `beta` grid (rows ordered `p` outer, `beta` inner).
pub fn solve_grid(p: AxisRange, beta: AxisRange, config: &SolverConfig) -> Result<Vec<CellSolution>> {
    let cells = grid(&ScanSpec { quantity: Quantity::Gap, p, beta, nu: None })?;
    cells.par_iter().map(|&(p, b)| solve_cell(p, b, config)).collect()
}

/// Runs a scan. Gapless cells report 0 for the gap-type quantities and 1
/// for the threshold efficiency.
pub fn run_scan(spec: &ScanSpec, solver: &SolverConfig, threshold: &ThresholdConfig) -> Result<Vec<ScanCell>> {
    let noise = match spec.quantity {
        Quantity::NoisyGap => Some(NoiseModel::new(
            spec.nu.ok_or_else(|| TcError::Range("noisy_gap scans need a noise weight".into()))?,
        )?),
        _ => None,
    };
    let cells = grid(spec)?;
    cells
        .par_iter()
        .map(|&(p, beta)| {
            let value = match spec.quantity {
                Quantity::EtaStar => {
                    threshold_efficiency(&make_hedge_or_not(p, beta)?, &[2, 2], threshold)?.eta_star
                }
                Quantity::Gap => solve_cell(p, beta, solver)?.gap(),
                Quantity::Robustness => solve_cell(p, beta, solver)?.robustness()?,
                Quantity::NoisyGap => solve_cell(p, beta, solver)?.noisy_gap(noise.expect("checked above")),
            };
            Ok(ScanCell { p, beta, value })
        })
        .collect()
}

/// Noisy advantage on every cell of a grid.
pub fn noisy_gap_scan(p: AxisRange, beta: AxisRange, nu: f64, solver: &SolverConfig) -> Result<Vec<ScanCell>> {
    let spec = ScanSpec { quantity: Quantity::NoisyGap, p, beta, nu: Some(nu) };
    run_scan(&spec, solver, &ThresholdConfig::default())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_values() {
        let v = AxisRange::default().values();
        assert_eq!(v.len(), 11);
        assert_eq!(v[3], 0.3);
        assert_eq!(v[10], 1.0);
        assert_eq!(AxisRange::new(0.3, 0.3, 0.1).unwrap().values(), vec![0.3]);
        assert!(AxisRange::new(0.0, 1.0, 0.0).is_err());
        assert!(AxisRange::new(0.5, 1.2, 0.1).is_err());
        assert!("heat".parse::<Quantity>().is_err());
        assert_eq!("eta_star".parse::<Quantity>().unwrap(), Quantity::EtaStar);
    }

    #[test]
    fn corner_cell_values() {
        let c = solve_cell(0.5, 0.0, &SolverConfig::default()).unwrap();
        let tsirelson = (std::f64::consts::PI / 8.0).cos().powi(2);
        assert!((c.gap() - (tsirelson - 0.75)).abs() < 1e-6);
        assert!((c.robustness().unwrap() - (1.0 - std::f64::consts::FRAC_1_SQRT_2)).abs() < 1e-6);
        let nu = c.robustness().unwrap();
        assert!(c.noisy_gap(NoiseModel::new((nu + 1e-6).min(1.0)).unwrap()) == 0.0);
        let flat = solve_cell(0.3, 0.5, &SolverConfig::default()).unwrap();
        assert_eq!(flat.gap(), 0.0);
        assert_eq!(flat.robustness().unwrap(), 0.0);
    }

    #[test]
    fn scan_order_and_noise_requirement() {
        let spec = ScanSpec {
            quantity: Quantity::Gap,
            p: AxisRange::new(0.4, 0.5, 0.1).unwrap(),
            beta: AxisRange::new(0.0, 0.5, 0.5).unwrap(),
            nu: None,
        };
        let cells = run_scan(&spec, &SolverConfig::default(), &ThresholdConfig::default()).unwrap();
        let coords: Vec<(f64, f64)> = cells.iter().map(|c| (c.p, c.beta)).collect();
        assert_eq!(coords, vec![(0.4, 0.0), (0.4, 0.5), (0.5, 0.0), (0.5, 0.5)]);
        assert_eq!(cells[1].value, 0.0);
        let noisy = ScanSpec { quantity: Quantity::NoisyGap, ..spec };
        assert!(run_scan(&noisy, &SolverConfig::default(), &ThresholdConfig::default()).is_err());
    }
}
