use std::fs;
use std::path::Path;

use serde_json::{json, Value};
use tacit_core::link_budget::{attempt_time, efficiency, effective_rate, max_arm_length, required_multiplicity, success_probability};
use tacit_core::linalg::C64;
use tacit_core::problem::{make_chsh, make_hedge_or_not};
use tacit_core::quantum::schmidt_decompose;
use tacit_core::scan::run_scan;
use tacit_core::{
    classical_value, classical_value_with_budget, lossy_value, problem_from_json, quantum_value, threshold_efficiency,
    AxisRange, DeterministicStrategy, LinkConfig, LossModel, Medium, Method, Quantity, ScanSpec, SolverConfig,
    TcError, TcProblem, ThresholdConfig,
};

use crate::output::{write_csv, write_json};
use crate::{BuiltIn, Command, Failure, MethodArg, ProblemArgs, QuantityArg, SolverArgs};

type Outcome = Result<(), Failure>;

pub fn run(command: Command, output: Option<&Path>) -> Outcome {
    match command {
        Command::Classical { problem, budget } => classical(&load(&problem)?, budget, output),
        Command::Quantum { problem, solver } => quantum(&load(&problem)?, &solver, output),
        Command::Lossy { problem, solver, eta } => lossy(&load(&problem)?, &solver, &eta, output),
        Command::Threshold { problem, solver, tol, epsilon } => {
            let problem = load(&problem)?;
            let config = ThresholdConfig { tol, epsilon, solver: solver_config(&solver, SolverConfig::lossy()) };
            let report = threshold_efficiency(&problem, &dims(&problem, &solver)?, &config)?;
            write_json(to_value(&report)?, output)?;
            Ok(())
        }
        Command::Scan { quantity, p_range, beta_range, nu, tol, epsilon, solver } => {
            let spec = ScanSpec {
                quantity: match quantity {
                    QuantityArg::Gap => Quantity::Gap,
                    QuantityArg::EtaStar => Quantity::EtaStar,
                    QuantityArg::Robustness => Quantity::Robustness,
                    QuantityArg::NoisyGap => Quantity::NoisyGap,
                },
                p: parse_range(&p_range)?,
                beta: parse_range(&beta_range)?,
                nu,
            };
            let threshold = ThresholdConfig { tol, epsilon, solver: solver_config(&solver, SolverConfig::lossy()) };
            let cells = spec.p.values().len() * spec.beta.values().len();
            eprintln!("scanning {cells} cells");
            let rows = run_scan(&spec, &solver_config(&solver, SolverConfig::default()), &threshold)?;
            write_csv(&rows, output)?;
            Ok(())
        }
        Command::Linkbudget {
            medium,
            herald,
            distance,
            arm_length,
            multiplicity,
            target_rate,
            projection,
            eta_target,
        } => {
            let medium: Medium = medium.parse()?;
            let herald: Medium = herald.parse()?;
            let link = LinkConfig { projection, ..LinkConfig::new(distance, multiplicity)? };
            let arm = arm_length.unwrap_or(0.5 * distance);
            let arm_eta = efficiency(&medium, arm)?;
            let single = LinkConfig { multiplicity: 1, ..link.clone() };
            let max_arm = max_arm_length(&medium, eta_target)?;
            let report = json!({
                "medium": medium,
                "herald": herald,
                "distance_km": distance,
                "arm_length_km": arm,
                "arm_efficiency": arm_eta,
                "arm_loss": 1.0 - arm_eta,
                "max_arm_length_km": if max_arm.is_finite() { json!(max_arm) } else { Value::Null },
                "attempt_time_s": attempt_time(distance, medium.speed, herald.speed)?,
                "success_probability": success_probability(&medium, distance, projection)?,
                "rate_per_copy_hz": effective_rate(&single, &medium, &herald)?,
                "multiplicity": multiplicity,
                "rate_hz": effective_rate(&link, &medium, &herald)?,
                "required_multiplicity": match target_rate {
                    Some(t) => json!(required_multiplicity(t, &link, &medium, &herald)?),
                    None => Value::Null,
                },
            });
            write_json(report, output)?;
            Ok(())
        }
    }
}

fn load(args: &ProblemArgs) -> Result<TcProblem, Failure> {
    let need = |v: Option<f64>, name: &str| v.ok_or_else(|| Failure::input(format!("--{name} is required")));
    match (args.problem, &args.file) {
        (Some(BuiltIn::HedgeOrNot), _) => Ok(make_hedge_or_not(need(args.p, "p")?, need(args.beta, "beta")?)?),
        (Some(BuiltIn::Chsh), _) => Ok(make_chsh(need(args.p, "p")?, args.anti)?),
        (None, Some(path)) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
            Ok(problem_from_json(&text)?)
        }
        (None, None) => Err(Failure::input("give a problem file or --problem")),
    }
}

fn parse_range(s: &str) -> Result<AxisRange, Failure> {
    let parts: Vec<f64> = s
        .split(':')
        .map(|x| x.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| Failure::input(format!("bad range `{s}`: {e}")))?;
    match parts[..] {
        [start, stop, step] => Ok(AxisRange::new(start, stop, step)?),
        _ => Err(Failure::input(format!("range `{s}` must be START:STOP:STEP"))),
    }
}

fn solver_config(args: &SolverArgs, base: SolverConfig) -> SolverConfig {
    let mut c = base;
    c.method = match args.method {
        MethodArg::Grid => Method::Grid,
        MethodArg::Cmaes => Method::Cmaes,
        MethodArg::Both => Method::Both,
    };
    if let Some(n) = args.grid_size {
        c.grid.points_per_axis = n;
    }
    if let Some(b) = args.budget {
        c.grid.budget = b;
    }
    if let Some(seed) = args.seed {
        c = c.with_seed(seed);
    }
    c
}

fn dims(problem: &TcProblem, args: &SolverArgs) -> Result<Vec<usize>, Failure> {
    let n = problem.parties();
    match args.dims.as_deref() {
        None => Ok(vec![2; n]),
        Some([q]) => Ok(vec![*q; n]),
        Some(d) if d.len() == n => Ok(d.to_vec()),
        Some(d) => Err(Failure::input(format!("{} dimensions given for {n} parties", d.len()))),
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Result<Value, Failure> {
    serde_json::to_value(v).map_err(|e| Failure { code: 4, message: e.to_string() })
}

fn amplitudes(state: &[C64]) -> Value {
    json!(state.iter().map(|a| [a.re, a.im]).collect::<Vec<_>>())
}

fn schmidt(problem: &TcProblem, state: &[C64], dims: &[usize]) -> Result<Value, Failure> {
    if problem.parties() != 2 {
        return Ok(Value::Null);
    }
    Ok(json!(schmidt_decompose(state, dims)?.coefficients))
}

fn labeled(problem: &TcProblem, s: &DeterministicStrategy) -> Value {
    let labels = problem.dec_labels();
    json!(s
        .tables
        .iter()
        .enumerate()
        .map(|(i, t)| t.iter().map(|&d| labels[i][d].clone()).collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

fn classical(problem: &TcProblem, budget: Option<u128>, output: Option<&Path>) -> Outcome {
    let r = match budget {
        Some(b) => classical_value_with_budget(problem, b)?,
        None => classical_value(problem)?,
    };
    let searched = u64::try_from(r.num_strategies_searched).map(Value::from).unwrap_or_else(|_| json!(r.num_strategies_searched.to_string()));
    write_json(json!({ "value": r.value, "strategy": labeled(problem, &r.strategy), "searched": searched }), output)?;
    Ok(())
}

fn quantum(problem: &TcProblem, args: &SolverArgs, output: Option<&Path>) -> Outcome {
    let dims = dims(problem, args)?;
    let r = quantum_value(problem, &dims, &solver_config(args, SolverConfig::default()))?;
    let state = r.strategy.state.as_deref().ok_or(TcError::MissingState)?;
    let report = json!({
        "value": r.value,
        "dims": dims,
        "angles": r.params.angles,
        "partitions": r.params.partitions,
        "state": amplitudes(state),
        "schmidt": schmidt(problem, state, &dims)?,
        "degenerate": r.degenerate,
        "trace": to_value(&r.trace)?,
    });
    write_json(report, output)?;
    Ok(())
}

fn lossy(problem: &TcProblem, args: &SolverArgs, eta: &[f64], output: Option<&Path>) -> Outcome {
    let dims = dims(problem, args)?;
    let loss = match eta {
        [e] => LossModel::uniform(problem.parties(), *e)?,
        _ => LossModel::new(eta.to_vec())?,
    };
    let r = lossy_value(problem, &dims, &loss, &solver_config(args, SolverConfig::lossy()), &[])?;
    let c = classical_value(problem)?.value;
    let state = r.quantum_part.state.as_deref().ok_or(TcError::MissingState)?;
    let report = json!({
        "value": r.value,
        "classical_value": c,
        "gap": r.value - c,
        "etas": r.etas,
        "dims": dims,
        "angles": r.params.angles,
        "partitions": r.params.partitions,
        "fallback": labeled(problem, &r.fallback),
        "state": amplitudes(state),
        "schmidt": r.schmidt,
        "degenerate": r.degenerate,
        "trace": to_value(&r.trace)?,
    });
    write_json(report, output)?;
    Ok(())
}
