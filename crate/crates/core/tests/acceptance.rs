//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::time::{Duration, Instant};

use tacit_core::behavior::{check_local_polytope_222, check_no_signaling, expected_utility};
use tacit_core::classical::strategy_count;
use tacit_core::link_budget::{attempt_time, efficiency, effective_rate, max_arm_length, required_multiplicity, success_probability};
use tacit_core::linalg::C64;
use tacit_core::lossy::{lossy_behavior, LossModel};
use tacit_core::noise::{noisy_expected_utility, ququart_lift, NoiseModel};
use tacit_core::oracles::{chsh_bernoulli_classical, chsh_bernoulli_quantum};
use tacit_core::problem::{make_chsh, make_hedge_or_not};
use tacit_core::quantum::{behavior_of, measurement_from_params, schmidt_decompose, QuantumStrategy};
use tacit_core::scan::{solve_grid, CellSolution};
use tacit_core::{
    classical_value, deterministic_behavior, lossy_value, quantum_value, threshold_efficiency, AxisRange,
    DeterministicStrategy, LinkConfig, Medium, Method, SolverConfig, ThresholdConfig,
};

type Outcome = Result<(), String>;

struct Suite {
    failures: usize,
}

impl Suite {
    fn run(&mut self, id: &str, name: &str, limit: Option<Duration>, f: impl FnOnce() -> Outcome) {
        let start = Instant::now();
        let mut outcome = f();
        let elapsed = start.elapsed();
        if let (Ok(()), Some(limit)) = (&outcome, limit) {
            if elapsed > limit {
                outcome = Err(format!("took {elapsed:.1?}, limit {limit:?}"));
            }
        }
        match outcome {
            Ok(()) => println!("PASS {id} {name} ({elapsed:.2?})"),
            Err(why) => {
                self.failures += 1;
                println!("FAIL {id} {name} ({elapsed:.2?}): {why}");
            }
        }
    }
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn close(label: &str, got: f64, want: f64, tol: f64) -> Outcome {
    check((got - want).abs() <= tol, || format!("{label}: got {got}, want {want} +/- {tol}"))
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn grid_axis() -> AxisRange {
    AxisRange::new(0.0, 1.0, 0.1).unwrap()
}

fn cell(grid: &[CellSolution], p: f64, beta: f64) -> &CellSolution {
    grid.iter()
        .find(|c| (c.p - p).abs() < 1e-9 && (c.beta - beta).abs() < 1e-9)
        .expect("grid cell")
}

fn chsh_baseline() -> Outcome {
    let problem = make_chsh(0.5, false).map_err(err)?;
    close("classical", classical_value(&problem).map_err(err)?.value, 0.75, 1e-12)?;
    let target = (PI / 8.0).cos().powi(2);
    for method in [Method::Grid, Method::Cmaes] {
        let config = SolverConfig { method, ..SolverConfig::default() };
        let q = quantum_value(&problem, &[2, 2], &config).map_err(err)?.value;
        close(&format!("quantum via {method:?}"), q, target, 1e-5)?;
    }
    Ok(())
}

fn chsh_sweep() -> Outcome {
    let config = SolverConfig::default();
    for k in 0..=20 {
        let p = k as f64 * 0.05;
        let problem = make_chsh(p, false).map_err(err)?;
        let c = classical_value(&problem).map_err(err)?.value;
        close(&format!("classical p={p:.2}"), c, chsh_bernoulli_classical(p).map_err(err)?.value, 1e-12)?;
        let q = quantum_value(&problem, &[2, 2], &config).map_err(err)?.value;
        close(&format!("quantum p={p:.2}"), q, chsh_bernoulli_quantum(p).map_err(err)?.value, 1e-5)?;
        let gap = q - c;
        let interior = p > 1.0 - FRAC_1_SQRT_2 && p < FRAC_1_SQRT_2;
        if interior {
            let margin = if (7..=13).contains(&k) { 1e-6 } else { 0.0 };
            check(gap > margin, || format!("p={p:.2}: gap {gap} not above {margin}"))?;
        } else {
            check(gap <= 1e-9, || format!("p={p:.2}: unexpected gap {gap}"))?;
        }
    }
    Ok(())
}

fn hedge_case() -> Outcome {
    let problem = make_hedge_or_not(0.3, 0.3).map_err(err)?;
    let c = classical_value(&problem).map_err(err)?;
    close("classical", c.value, 0.79, 1e-12)?;
    check(c.num_strategies_searched == strategy_count(problem.shape()), || "search was not exhaustive".into())?;
    // NYSE always B; NASDAQ A on no indicator, B on indicator
    let witness = DeterministicStrategy::new(vec![vec![1, 1], vec![0, 1]]);
    let eu = expected_utility(&problem, &deterministic_behavior(problem.shape(), &witness).map_err(err)?).map_err(err)?;
    close("witness utility", eu, c.value, 1e-12)?;
    let lossy = lossy_value(&problem, &[2, 2], &LossModel::uniform(2, 0.95).map_err(err)?, &SolverConfig::lossy(), &[])
        .map_err(err)?;
    close("lossy value at 0.95", lossy.value, 0.792, 2e-3)?;
    let t = threshold_efficiency(&problem, &[2, 2], &ThresholdConfig::default()).map_err(err)?;
    close("threshold efficiency", t.eta_star, 0.941, 2e-3)
}

fn gap_grid(grid: &[CellSolution]) -> Outcome {
    check(grid.len() == 121, || format!("{} cells", grid.len()))?;
    for c in grid {
        if (c.beta - 0.5).abs() < 1e-9 {
            let g = c.quantum - c.classical;
            check(g <= 1e-9, || format!("beta=0.5 p={:.1}: gap {g}", c.p))?;
        }
        let mirror = cell(grid, c.p, 1.0 - c.beta);
        let d = (c.gap() - mirror.gap()).abs();
        check(d <= 1e-6, || format!("mirror at p={:.1} beta={:.1}: {d}", c.p, c.beta))?;
        if c.beta == 0.0 {
            let expect = c.p > 0.25 && c.p < 0.75;
            check((c.gap() > 0.0) == expect, || format!("beta=0 p={:.1}: gap {}", c.p, c.gap()))?;
        }
    }
    Ok(())
}

fn threshold_grid(grid: &[CellSolution]) -> Outcome {
    let cells: Vec<(f64, f64)> = grid.iter().map(|c| (c.p, c.beta)).collect();
    let config = ThresholdConfig::default();
    let reports: Vec<_> = {
        use rayon::prelude::*;
        cells
            .par_iter()
            .map(|&(p, beta)| threshold_efficiency(&make_hedge_or_not(p, beta)?, &[2, 2], &config))
            .collect::<Result<Vec<_>, _>>()
            .map_err(err)?
    };
    for (sol, r) in grid.iter().zip(&reports) {
        let at = format!("p={:.1} beta={:.1}", sol.p, sol.beta);
        if r.gapless {
            check(r.eta_star == 1.0, || format!("{at}: gapless cell reports {}", r.eta_star))?;
            check(sol.gap() <= 1e-7, || format!("{at}: gap {} but threshold search found none", sol.gap()))?;
        } else {
            check(r.eta_star >= 2.0 / 3.0 - 1e-9 && r.eta_star < 1.0, || format!("{at}: eta* {}", r.eta_star))?;
            check(!r.invalid_bracket, || format!("{at}: advantage at the lower end"))?;
        }
    }
    Ok(())
}

fn robustness_grid(grid: &[CellSolution]) -> Outcome {
    close("corner robustness", cell(grid, 0.5, 0.0).robustness().map_err(err)?, 1.0 - FRAC_1_SQRT_2, 1e-3)?;
    for c in grid {
        let r = c.robustness().map_err(err)?;
        check((0.0..=0.293 + 1e-3).contains(&r), || format!("p={:.1} beta={:.1}: {r}", c.p, c.beta))?;
    }
    Ok(())
}

fn noisy_grids(grid: &[CellSolution]) -> Outcome {
    let gapped = |nu: f64| -> Vec<bool> {
        grid.iter().map(|c| c.noisy_gap(NoiseModel::new(nu).unwrap()) > 0.0).collect()
    };
    let sets = [gapped(0.05), gapped(0.1), gapped(0.2)];
    for w in sets.windows(2) {
        let nested = w[0].iter().zip(&w[1]).all(|(&wide, &narrow)| wide || !narrow);
        check(nested, || "gapped regions are not nested".into())?;
    }
    check(sets[0].iter().any(|&g| g), || "no gapped cell at nu=0.05".into())
}

fn ququart_trick() -> Outcome {
    let problem = make_chsh(0.5, false).map_err(err)?;
    let q = quantum_value(&problem, &[2, 2], &SolverConfig::default()).map_err(err)?;
    let lifted = ququart_lift(&q.strategy).map_err(err)?;
    let clean = (PI / 8.0).cos().powi(2);
    for nu in [0.1, 0.5, 1.0] {
        let noise = NoiseModel::new(nu).map_err(err)?;
        let qubit = noisy_expected_utility(&problem, &q.strategy, noise).map_err(err)?;
        let ququart = noisy_expected_utility(&problem, &lifted, noise).map_err(err)?;
        close(&format!("qubit nu={nu}"), qubit, (1.0 - nu) * clean + nu / 2.0, 1e-9)?;
        close(&format!("ququart minus qubit nu={nu}"), ququart - qubit, nu / 16.0, 1e-12)?;
    }
    Ok(())
}

fn schmidt_check() -> Outcome {
    let (a, b) = (0.9995, 0.0301);
    let u = [[a, b], [b, -a]];
    let v = [[b, a], [-a, b]];
    let weights = [0.903, 0.429];
    let mut psi = vec![C64::new(0.0, 0.0); 4];
    for k in 0..2 {
        for i in 0..2 {
            for j in 0..2 {
                psi[2 * i + j] += C64::new(weights[k] * u[k][i] * v[k][j], 0.0);
            }
        }
    }
    let d = schmidt_decompose(&psi, &[2, 2]).map_err(err)?;
    close("first coefficient", d.coefficients[0], 0.903, 5e-3)?;
    close("second coefficient", d.coefficients[1], 0.429, 5e-3)
}

fn link_budget() -> Outcome {
    let (fiber, air) = (Medium::fiber(), Medium::free_space());
    close("fiber arm length", max_arm_length(&fiber, 2.0 / 3.0).map_err(err)?, 10.35, 0.1)?;
    let d = 56.3;
    close("attempt time (us)", attempt_time(d, fiber.speed, air.speed).map_err(err)? * 1e6, 230.0, 10.0)?;
    close("success probability", success_probability(&fiber, d, 0.5).map_err(err)?, 0.055, 2e-3)?;
    let link = LinkConfig::new(d, 1).map_err(err)?;
    close("per-copy rate", effective_rate(&link, &fiber, &air).map_err(err)?, 240.0, 12.0)?;
    let m = required_multiplicity(1e6, &link, &fiber, &air).map_err(err)?;
    check((4000..=4500).contains(&m), || format!("multiplicity {m}"))?;
    let loss = 1.0 - efficiency(&Medium::vacuum_guide(), 28.15).map_err(err)?;
    close("vacuum guide loss", loss, 3.24e-4, 0.02 * 3.24e-4)?;
    close("waveguide 1 cm", efficiency(&Medium::waveguide(), 1e-5).map_err(err)?, 0.955, 1e-3)
}

fn property_suite() -> Outcome {
    let cases = [(0.5, 0.0), (0.3, 0.3), (0.7, 0.1), (0.2, 0.8)];
    for (p, beta) in cases {
        let problem = make_hedge_or_not(p, beta).map_err(err)?;
        let q = quantum_value(&problem, &[2, 2], &SolverConfig::default()).map_err(err)?;
        let b = behavior_of(&q.strategy).map_err(err)?;
        let ns = check_no_signaling(&b, 1e-9);
        check(ns.ok, || format!("({p}, {beta}): signaling {}", ns.max_violation))?;
        let psi = q.strategy.state.as_ref().ok_or("missing state")?;
        let eu = expected_utility(&problem, &b).map_err(err)?;
        close("Bell operator vs behavior", q.bell_operator.expectation(psi), eu, 1e-10)?;

        let fallback = DeterministicStrategy::new(vec![vec![0, 0], vec![1, 1]]);
        let lb = lossy_behavior(&q.strategy, &fallback, &LossModel::uniform(2, 0.9).map_err(err)?).map_err(err)?;
        check(check_no_signaling(&lb, 1e-9).ok, || "lossy behavior signals".into())?;

        // one party answering constantly on its first observation
        let mut ms = q.strategy.measurements.clone();
        ms.ops[0][0] = measurement_from_params(2, 2, &[0.0, 0.0], &[0, 0]).map_err(err)?;
        let degenerate = QuantumStrategy::new(ms, psi.clone());
        let local = check_local_polytope_222(&behavior_of(&degenerate).map_err(err)?, 1e-9).map_err(err)?;
        check(local.inside, || format!("degenerate behavior outside polytope by {}", local.worst_margin))?;

        let c = classical_value(&problem).map_err(err)?.value;
        let cfg = SolverConfig::lossy();
        let at = |eta: f64| -> Result<f64, String> {
            Ok(lossy_value(&problem, &[2, 2], &LossModel::uniform(2, eta).map_err(err)?, &cfg, &[]).map_err(err)?.value)
        };
        close("lossy at 0", at(0.0)?, c, 1e-12)?;
        close("lossy at 1", at(1.0)?, q.value, 1e-8)?;
    }

    let problem = make_hedge_or_not(0.3, 0.3).map_err(err)?;
    let config = SolverConfig { method: Method::Cmaes, ..SolverConfig::default() }.with_seed(11);
    let a = quantum_value(&problem, &[2, 2], &config).map_err(err)?;
    let b = quantum_value(&problem, &[2, 2], &config).map_err(err)?;
    check(a.value.to_bits() == b.value.to_bits() && a.best == b.best, || "seeded runs differ".into())?;
    let la = lossy_value(&problem, &[2, 2], &LossModel::uniform(2, 0.95).map_err(err)?, &SolverConfig::lossy(), &[])
        .map_err(err)?;
    let lb = lossy_value(&problem, &[2, 2], &LossModel::uniform(2, 0.95).map_err(err)?, &SolverConfig::lossy(), &[])
        .map_err(err)?;
    check(la.value.to_bits() == lb.value.to_bits(), || "lossy runs differ".into())
}

fn main() {
    let mut suite = Suite { failures: 0 };
    let secs = |s: u64| Some(Duration::from_secs(s));
    suite.run("1", "CHSH baseline", secs(5), chsh_baseline);
    suite.run("2", "CHSH-Bernoulli sweep", secs(120), chsh_sweep);
    suite.run("3", "hedge-or-not at p=0.3 beta=0.3", secs(60), hedge_case);

    let start = Instant::now();
    let grid = solve_grid(grid_axis(), grid_axis(), &SolverConfig::default());
    let grid_time = start.elapsed();
    match grid {
        Ok(grid) => {
            suite.run("4", "gap grid", Some(Duration::from_secs(300).saturating_sub(grid_time)), || gap_grid(&grid));
            suite.run("5", "threshold grid", secs(900), || threshold_grid(&grid));
            suite.run("6", "robustness grid", None, || robustness_grid(&grid));
            suite.run("7", "noisy grids nested", None, || noisy_grids(&grid));
        }
        Err(e) => {
            for id in ["4", "5", "6", "7"] {
                suite.run(id, "grid criteria", None, || Err(format!("grid solve failed: {e}")));
            }
        }
    }
    suite.run("8", "ququart rank trick", None, ququart_trick);
    suite.run("9", "Schmidt coefficients", None, schmidt_check);
    suite.run("10", "link budget", secs(1), link_budget);
    suite.run("11", "property suite", None, property_suite);

    println!("{} failed", suite.failures);
    if suite.failures > 0 {
        std::process::exit(1);
    }
}
