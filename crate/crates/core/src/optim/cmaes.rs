//! CMA-ES on the unit cube, with discrete coordinates decoded by binning and
//! a margin that keeps every discrete coordinate able to leave its bin.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Result, TcError};
use crate::optim::space::{best_of, Candidate, OptimOutcome, SearchSpace};

#[derive(Debug, Clone, PartialEq)]
pub struct CmaesConfig {
    pub restarts: usize,
    /// Initial step size in unit-cube coordinates.
    pub sigma0: f64,
    pub max_iters: usize,
    /// Stop a run when `sigma * max sqrt(C_ii)` falls below this.
    pub tol_x: f64,
    /// Stop a run when recent best values span less than this.
    pub tol_fun: f64,
    pub seed: u64,
    /// Defaults to `4 + floor(3 ln N)`.
    pub population: Option<usize>,
}

impl Default for CmaesConfig {
    fn default() -> Self {
        Self { restarts: 5, sigma0: 0.25, max_iters: 400, tol_x: 1e-11, tol_fun: 1e-14, seed: 0, population: None }
    }
}

struct Decoder<'a> {
    space: &'a SearchSpace,
    /// Indices of discrete coordinates with more than one value.
    active: Vec<usize>,
}

impl Decoder<'_> {
    fn dim(&self) -> usize {
        self.space.continuous_dim() + self.active.len()
    }

    fn decode(&self, y: &[f64]) -> (Vec<f64>, Vec<usize>) {
        let v = self.space.continuous_dim();
        let mut x: Vec<f64> = (0..v)
            .map(|i| self.space.lower[i] + y[i] * (self.space.upper[i] - self.space.lower[i]))
            .collect();
        self.space.project(&mut x);
        let mut z = vec![0; self.space.discrete.len()];
        for (k, &j) in self.active.iter().enumerate() {
            let card = self.space.discrete[j];
            z[j] = ((y[v + k].clamp(0.0, 1.0) * card as f64) as usize).min(card - 1);
        }
        (x, z)
    }
}

fn run<F>(dec: &Decoder, config: &CmaesConfig, restart: usize, f: &F) -> Result<(Candidate, u64, u64)>
where
    F: Fn(&[f64], &[usize]) -> Result<f64>,
{
    let n = dec.dim();
    let v = dec.space.continuous_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(restart as u64);

    let lambda = config.population.unwrap_or(4 + (3.0 * (n as f64).ln()).floor() as usize).max(2);
    let mu = lambda / 2;
    let raw: Vec<f64> = (0..mu).map(|i| ((lambda as f64 + 1.0) / 2.0).ln() - ((i + 1) as f64).ln()).collect();
    let total: f64 = raw.iter().sum();
    let w: Vec<f64> = raw.iter().map(|x| x / total).collect();
    let mu_eff = 1.0 / w.iter().map(|x| x * x).sum::<f64>();
    let nf = n as f64;
    let cc = (4.0 + mu_eff / nf) / (nf + 4.0 + 2.0 * mu_eff / nf);
    let cs = (mu_eff + 2.0) / (nf + mu_eff + 5.0);
    let c1 = 2.0 / ((nf + 1.3).powi(2) + mu_eff);
    let cmu = (1.0 - c1).min(2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) / ((nf + 2.0).powi(2) + mu_eff));
    let damps = 1.0 + 2.0 * (0.0f64).max(((mu_eff - 1.0) / (nf + 1.0)).sqrt() - 1.0) + cs;
    let chi_n = nf.sqrt() * (1.0 - 1.0 / (4.0 * nf) + 1.0 / (21.0 * nf * nf));
    // probability floor for leaving a discrete bin
    let alpha = (1.0 / (nf * lambda as f64)).min(0.5);
    let z_alpha = Normal::new(0.0, 1.0).expect("standard normal").inverse_cdf(1.0 - alpha);

    let mut mean = DVector::from_fn(n, |_, _| rng.random::<f64>());
    let mut sigma = config.sigma0;
    let mut c = DMatrix::<f64>::identity(n, n);
    let mut b = DMatrix::<f64>::identity(n, n);
    let mut d = DVector::from_element(n, 1.0);
    let mut ps = DVector::zeros(n);
    let mut pc = DVector::zeros(n);

    let mut evals = 0u64;
    let mut best: Option<Candidate> = None;
    let mut history: Vec<f64> = Vec::new();
    let mut iters = 0u64;

    for gen in 0..config.max_iters {
        iters += 1;
        let mut pop: Vec<(DVector<f64>, DVector<f64>, f64)> = Vec::with_capacity(lambda);
        for _ in 0..lambda {
            let zv = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
            let yv = &b * d.component_mul(&zv);
            let x = &mean + &yv * sigma;
            let (cx, cz) = dec.decode(x.as_slice());
            let val = f(&cx, &cz)?;
            evals += 1;
            if !val.is_finite() {
                return Err(TcError::NonFinite("objective value".into()));
            }
            if best.as_ref().is_none_or(|bst| val > bst.value) {
                best = Some(Candidate { x: cx, z: cz, value: val });
            }
            pop.push((x, yv, val));
        }
        pop.sort_by(|a, b| b.2.total_cmp(&a.2));
        history.push(pop[0].2);

        let old_mean = mean.clone();
        let mut y_w = DVector::zeros(n);
        for (wi, (_, yv, _)) in w.iter().zip(&pop) {
            y_w += yv * *wi;
        }
        mean = &old_mean + &y_w * sigma;

        // C^{-1/2} y_w
        let inv_sqrt = &b * DMatrix::from_diagonal(&d.map(|x| 1.0 / x)) * b.transpose();
        ps = &ps * (1.0 - cs) + (&inv_sqrt * &y_w) * (cs * (2.0 - cs) * mu_eff).sqrt();
        let hsig = ps.norm() / (1.0 - (1.0 - cs).powi(2 * (gen as i32 + 1))).sqrt() / chi_n < 1.4 + 2.0 / (nf + 1.0);
        pc = &pc * (1.0 - cc);
        if hsig {
            pc += &y_w * (cc * (2.0 - cc) * mu_eff).sqrt();
        }
        let mut rank_mu = DMatrix::zeros(n, n);
        for (wi, (_, yv, _)) in w.iter().zip(&pop) {
            rank_mu += yv * yv.transpose() * *wi;
        }
        let delta_h = if hsig { 0.0 } else { cc * (2.0 - cc) };
        c = &c * (1.0 - c1 - cmu + c1 * delta_h) + (&pc * pc.transpose()) * c1 + rank_mu * cmu;
        sigma *= ((cs / damps) * (ps.norm() / chi_n - 1.0)).exp();
        sigma = sigma.min(1.0);

        c = (&c + c.transpose()) * 0.5;
        let eig = SymmetricEigen::new(c.clone());
        b = eig.eigenvectors;
        d = eig.eigenvalues.map(|x| x.max(1e-300).sqrt());

        // margin: pull each discrete mean within z_alpha marginal deviations
        // of its nearest bin boundary
        for (k, &j) in dec.active.iter().enumerate() {
            let i = v + k;
            let card = dec.space.discrete[j] as f64;
            let m = mean[i].clamp(0.0, 1.0);
            let bin = (m * card).floor().min(card - 1.0);
            let lo = bin / card;
            let hi = (bin + 1.0) / card;
            let candidates = [(bin > 0.0).then_some(lo), (bin < card - 1.0).then_some(hi)];
            let nearest = candidates.iter().flatten().copied().min_by(|a, b| (a - m).abs().total_cmp(&(b - m).abs()));
            if let Some(edge) = nearest {
                let reach = z_alpha * sigma * c[(i, i)].sqrt();
                if (edge - m).abs() > reach {
                    mean[i] = edge - (edge - m).signum() * reach;
                } else {
                    mean[i] = m;
                }
            }
        }

        let spread = sigma * c.diagonal().iter().fold(0.0f64, |a, &x| a.max(x.sqrt()));
        let window = 10 + (30.0 * nf / lambda as f64).ceil() as usize;
        let flat = history.len() >= window && {
            let recent = &history[history.len() - window..];
            let (mn, mx) = recent.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
            mx - mn < config.tol_fun && pop[0].2 - pop[lambda - 1].2 < config.tol_fun
        };
        if spread < config.tol_x || flat {
            break;
        }
    }
    let (mx, mz) = dec.decode(mean.as_slice());
    let mv = f(&mx, &mz)?;
    evals += 1;
    let cand = best_of([best.expect("at least one generation"), Candidate { x: mx, z: mz, value: mv }]).unwrap();
    Ok((cand, evals, iters))
}

/// Independent restarts from random means; restart `r` draws from stream `r`
/// of a generator seeded with `config.seed`, so results do not depend on
/// thread scheduling.
pub fn cmaes_maximize<F>(space: &SearchSpace, config: &CmaesConfig, f: &F) -> Result<OptimOutcome>
where
    F: Fn(&[f64], &[usize]) -> Result<f64> + Sync,
{
    let dec = Decoder { space, active: (0..space.discrete.len()).filter(|&j| space.discrete[j] > 1).collect() };
    if dec.dim() == 0 {
        let (x, z) = dec.decode(&[]);
        let value = f(&x, &z)?;
        return Ok(OptimOutcome { best: Candidate { x, z, value }, evaluations: 1, iterations: 0 });
    }
    let runs: Vec<(Candidate, u64, u64)> = (0..config.restarts.max(1))
        .into_par_iter()
        .map(|r| run(&dec, config, r, f))
        .collect::<Result<_>>()?;
    let evaluations = runs.iter().map(|r| r.1).sum();
    let iterations = runs.iter().map(|r| r.2).sum();
    let best = best_of(runs.into_iter().map(|r| r.0)).expect("at least one restart");
    Ok(OptimOutcome { best, evaluations, iterations })
}
