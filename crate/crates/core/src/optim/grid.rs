use rayon::prelude::*;

use crate::error::{Result, TcError};
use crate::optim::nelder_mead::{nelder_mead_maximize, NelderMeadConfig};
use crate::optim::space::{best_of, Candidate, OptimOutcome, SearchSpace};

/// Which grid points get a local refinement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Refine {
    All,
    /// The best `k` grid points of each discrete assignment.
    Top(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridConfig {
    pub points_per_axis: usize,
    pub refine: Refine,
    /// Cap on grid points times discrete assignments.
    pub budget: u128,
    pub local: NelderMeadConfig,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { points_per_axis: 20, refine: Refine::All, budget: 200_000, local: NelderMeadConfig::default() }
    }
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.5 * (lo + hi)],
        _ => (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect(),
    }
}

fn grid_point(axes: &[Vec<f64>], mut index: usize) -> Vec<f64> {
    let mut x = vec![0.0; axes.len()];
    for (slot, axis) in x.iter_mut().zip(axes).rev() {
        *slot = axis[index % axis.len()];
        index /= axis.len();
    }
    x
}

/// Evaluates a full grid for every discrete assignment, refines the chosen
/// points (and any warm starts) with Nelder-Mead, and keeps the best.
pub fn grid_maximize<F>(space: &SearchSpace, config: &GridConfig, warm_starts: &[Candidate], f: &F) -> Result<OptimOutcome>
where
    F: Fn(&[f64], &[usize]) -> Result<f64> + Sync,
{
    let v = space.continuous_dim();
    let axes: Vec<Vec<f64>> = (0..v)
        .map(|i| {
            if space.periodic[i] {
                // the upper end of a periodic axis repeats the lower one
                let n = config.points_per_axis.max(1);
                let w = space.upper[i] - space.lower[i];
                (0..n).map(|k| space.lower[i] + w * k as f64 / n as f64).collect()
            } else {
                linspace(space.lower[i], space.upper[i], config.points_per_axis)
            }
        })
        .collect();
    let per_combo = axes.iter().try_fold(1usize, |a, ax| a.checked_mul(ax.len())).unwrap_or(usize::MAX);
    let combos = space.num_combos();
    let count = (per_combo as u128).saturating_mul(combos);
    if count > config.budget {
        return Err(TcError::Budget { count, budget: config.budget });
    }
    let combos = combos as usize;

    let values: Vec<f64> = (0..combos * per_combo)
        .into_par_iter()
        .map(|k| {
            let z = space.combo((k / per_combo) as u128);
            f(&grid_point(&axes, k % per_combo), &z)
        })
        .collect::<Result<_>>()?;
    let mut evaluations = values.len() as u64;

    let mut starts: Vec<(Vec<f64>, Vec<usize>)> = Vec::new();
    for c in 0..combos {
        let z = space.combo(c as u128);
        let block = &values[c * per_combo..(c + 1) * per_combo];
        let chosen: Vec<usize> = match config.refine {
            Refine::All => (0..per_combo).collect(),
            Refine::Top(k) => {
                let mut idx: Vec<usize> = (0..per_combo).collect();
                idx.sort_by(|&a, &b| block[b].total_cmp(&block[a]).then(a.cmp(&b)));
                idx.truncate(k.max(1));
                idx
            }
        };
        starts.extend(chosen.into_iter().map(|i| (grid_point(&axes, i), z.clone())));
    }
    for w in warm_starts {
        if w.x.len() == v && w.z.len() == space.discrete.len() && w.z.iter().zip(&space.discrete).all(|(a, b)| a < b) {
            starts.push((w.x.clone(), w.z.clone()));
        }
    }

    let refined: Vec<(Candidate, u64, u64)> = starts
        .par_iter()
        .map(|(x, z)| nelder_mead_maximize(space, x, z, &config.local, f))
        .collect::<Result<_>>()?;
    let mut iterations = 0;
    for (_, e, it) in &refined {
        evaluations += e;
        iterations += it;
    }
    let best = best_of(refined.into_iter().map(|r| r.0))
        .ok_or_else(|| TcError::Numerical("grid search produced no candidates".into()))?;
    Ok(OptimOutcome { best, evaluations, iterations })
}
