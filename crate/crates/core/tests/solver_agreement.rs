use tacit_core::behavior::check_local_polytope_222;
use tacit_core::lossy::{lossy_value, LossModel};
use tacit_core::oracles::{chsh_bernoulli_classical, chsh_bernoulli_quantum};
use tacit_core::problem::{anti_array, make_chsh, make_hedge_or_not, permute_problem};
use tacit_core::quantum::behavior_of;
use tacit_core::{classical_value, quantum_value, SolverConfig};

#[test]
fn chsh_sweep_matches_closed_forms() {
    let config = SolverConfig::default();
    for k in 0..=10 {
        let p = k as f64 / 10.0;
        let problem = make_chsh(p, false).unwrap();
        let c = classical_value(&problem).unwrap().value;
        assert!((c - chsh_bernoulli_classical(p).unwrap().value).abs() < 1e-12, "classical at p={p}");
        let q = quantum_value(&problem, &[2, 2], &config).unwrap().value;
        assert!((q - chsh_bernoulli_quantum(p).unwrap().value).abs() < 1e-5, "quantum at p={p}: {q}");
    }
}

#[test]
fn relabeling_keeps_the_quantum_value() {
    let config = SolverConfig::default();
    let problem = make_hedge_or_not(0.3, 0.2).unwrap();
    let base = quantum_value(&problem, &[2, 2], &config).unwrap().value;
    let swapped = permute_problem(&problem, &[vec![1, 0], vec![0, 1]], &[vec![0, 1], vec![1, 0]]).unwrap();
    let q = quantum_value(&swapped, &[2, 2], &config).unwrap().value;
    assert!((q - base).abs() < 1e-7, "{q} vs {base}");
}

#[test]
fn anti_array_has_the_same_gap() {
    let config = SolverConfig::default();
    for (p, beta) in [(0.5, 0.0), (0.3, 0.3), (0.6, 0.8)] {
        let problem = make_hedge_or_not(p, beta).unwrap();
        let anti = anti_array(&problem).unwrap();
        let gap = |pr| {
            quantum_value(pr, &[2, 2], &config).unwrap().value - classical_value(pr).unwrap().value
        };
        assert!((gap(&problem) - gap(&anti)).abs() < 1e-7, "p={p} beta={beta}");
    }
}

#[test]
fn pinned_partitions_lose_nothing_on_binary_problems() {
    let problem = make_hedge_or_not(0.3, 0.3).unwrap();
    let pinned = quantum_value(&problem, &[2, 2], &SolverConfig::default()).unwrap().value;
    let free = SolverConfig { pin_partitions: false, ..SolverConfig::default() };
    let unpinned = quantum_value(&problem, &[2, 2], &free).unwrap().value;
    assert!((pinned - unpinned).abs() < 1e-7, "{pinned} vs {unpinned}");
}

#[test]
fn lossy_value_rises_with_efficiency_and_beats_classical() {
    let problem = make_hedge_or_not(0.3, 0.3).unwrap();
    let c = classical_value(&problem).unwrap().value;
    let config = SolverConfig::lossy();
    let mut last = f64::NEG_INFINITY;
    for eta in [0.0, 0.5, 0.8, 0.9, 0.95, 1.0] {
        let v = lossy_value(&problem, &[2, 2], &LossModel::uniform(2, eta).unwrap(), &config, &[]).unwrap().value;
        assert!(v >= c - 1e-12, "eta={eta}: {v} < {c}");
        assert!(v >= last - 1e-9, "eta={eta}: {v} < {last}");
        last = v;
    }
}

#[test]
fn optimal_chsh_behavior_leaves_the_local_polytope() {
    let problem = make_chsh(0.5, false).unwrap();
    let report = quantum_value(&problem, &[2, 2], &SolverConfig::default()).unwrap();
    let b = behavior_of(&report.strategy).unwrap();
    let local = check_local_polytope_222(&b, 1e-9).unwrap();
    assert!(!local.inside);
    // CHSH expression 2*sqrt(2) against the local bound 2
    assert!((local.worst_margin - (2.0 * 2f64.sqrt() - 2.0)).abs() < 1e-4, "{}", local.worst_margin);
}
