use crate::error::Result;
use crate::optim::space::{Candidate, SearchSpace};

#[derive(Debug, Clone, PartialEq)]
pub struct NelderMeadConfig {
    /// Initial simplex edge as a fraction of each coordinate's range.
    pub step: f64,
    /// Stop when every vertex is within this distance of the best, per coordinate.
    pub xtol: f64,
    /// Or when the simplex values agree to this absolute tolerance.
    pub ftol: f64,
    /// Per-dimension evaluation cap; the total cap is this times `dim + 1`.
    pub max_evals_per_dim: usize,
}

impl Default for NelderMeadConfig {
    fn default() -> Self {
        Self { step: 0.025, xtol: 1e-10, ftol: 1e-15, max_evals_per_dim: 400 }
    }
}

/// Maximizes `f(x, z)` over the continuous coordinates with `z` held fixed.
/// Returns the best vertex and the evaluation and iteration counts.
pub fn nelder_mead_maximize<F>(
    space: &SearchSpace,
    start: &[f64],
    z: &[usize],
    config: &NelderMeadConfig,
    f: &F,
) -> Result<(Candidate, u64, u64)>
where
    F: Fn(&[f64], &[usize]) -> Result<f64>,
{
    let n = start.len();
    let evals = std::cell::Cell::new(0u64);
    let eval = |x: &mut Vec<f64>| -> Result<f64> {
        space.project(x);
        evals.set(evals.get() + 1);
        f(x, z)
    };
    let mut x0 = start.to_vec();
    let f0 = eval(&mut x0)?;
    if n == 0 {
        return Ok((Candidate { x: x0, z: z.to_vec(), value: f0 }, evals.get(), 0));
    }

    // minimize -f
    let mut simplex: Vec<(Vec<f64>, f64)> = vec![(x0.clone(), -f0)];
    for i in 0..n {
        let range = space.upper[i] - space.lower[i];
        let mut x = x0.clone();
        let h = config.step * if range > 0.0 { range } else { 1.0 };
        x[i] += if x[i] + h <= space.upper[i] || space.periodic[i] { h } else { -h };
        let v = eval(&mut x)?;
        simplex.push((x, -v));
    }

    let max_evals = (config.max_evals_per_dim * (n + 1)) as u64;
    let mut iters = 0u64;
    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = &simplex[0];
        let xspread = simplex[1..]
            .iter()
            .flat_map(|(x, _)| x.iter().zip(&best.0).map(|(a, b)| (a - b).abs()))
            .fold(0.0f64, f64::max);
        let fspread = simplex[n].1 - simplex[0].1;
        if xspread <= config.xtol || fspread <= config.ftol || evals.get() >= max_evals {
            break;
        }
        iters += 1;

        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / n as f64;
            }
        }
        let worst = simplex[n].clone();
        let along = |t: f64| -> Vec<f64> { centroid.iter().zip(&worst.0).map(|(c, w)| c + t * (c - w)).collect() };

        let mut xr = along(1.0);
        let fr = -eval(&mut xr)?;
        if fr < simplex[0].1 {
            let mut xe = along(2.0);
            let fe = -eval(&mut xe)?;
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let (xc, fc) = if fr < worst.1 {
                let mut x = along(0.5);
                let v = -eval(&mut x)?;
                (x, v)
            } else {
                let mut x = along(-0.5);
                let v = -eval(&mut x)?;
                (x, v)
            };
            if fc < worst.1.min(fr) {
                simplex[n] = (xc, fc);
            } else {
                let b = simplex[0].0.clone();
                for v in simplex.iter_mut().skip(1) {
                    let mut x: Vec<f64> = b.iter().zip(&v.0).map(|(bi, xi)| bi + 0.5 * (xi - bi)).collect();
                    let fx = -eval(&mut x)?;
                    *v = (x, fx);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, v) = simplex.swap_remove(0);
    Ok((Candidate { x, z: z.to_vec(), value: -v }, evals.get(), iters))
}
