//! Behaviors, deterministic strategies and the checks that apply to them.

use serde::{Deserialize, Serialize};

use crate::error::{Result, TcError};
use crate::problem::{Shape, TcProblem};

pub const BEHAVIOR_ENTRY_TOL: f64 = 1e-12;
pub const BEHAVIOR_ROW_TOL: f64 = 1e-10;

/// Conditional probabilities `p(d|o)` laid out like the utility array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Behavior {
    shape: Shape,
    p: Vec<f64>,
}

impl Behavior {
    pub fn new(shape: Shape, p: Vec<f64>) -> Result<Self> {
        if p.len() != shape.len() {
            return Err(TcError::Dimension(format!(
                "behavior has {} entries, expected {}",
                p.len(),
                shape.len()
            )));
        }
        if p.iter().any(|x| !x.is_finite()) {
            return Err(TcError::NonFinite("behavior".into()));
        }
        if let Some(x) = p.iter().find(|&&x| !(-BEHAVIOR_ENTRY_TOL..=1.0 + BEHAVIOR_ENTRY_TOL).contains(&x)) {
            return Err(TcError::Probability(format!("behavior entry {x} outside [0, 1]")));
        }
        let nd = shape.num_dec();
        for (o, row) in p.chunks(nd).enumerate() {
            let total: f64 = row.iter().sum();
            if (total - 1.0).abs() > BEHAVIOR_ROW_TOL {
                return Err(TcError::Probability(format!("row {o} sums to {total}")));
            }
        }
        Ok(Self { shape, p })
    }

    /// `p(d|o) = 1/|D|` everywhere.
    pub fn uniform(shape: Shape) -> Self {
        let nd = shape.num_dec();
        let p = vec![1.0 / nd as f64; shape.len()];
        Self { shape, p }
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn probs(&self) -> &[f64] {
        &self.p
    }

    pub fn at(&self, obs: usize, dec: usize) -> f64 {
        self.p[self.shape.entry(obs, dec)]
    }

    pub fn row(&self, obs: usize) -> &[f64] {
        let nd = self.shape.num_dec();
        &self.p[obs * nd..(obs + 1) * nd]
    }

    /// `t * self + (1 - t) * other`
    pub fn mix(&self, other: &Behavior, t: f64) -> Result<Behavior> {
        if self.shape != other.shape {
            return Err(TcError::Dimension("behaviors have different shapes".into()));
        }
        let p = self.p.iter().zip(&other.p).map(|(a, b)| t * a + (1.0 - t) * b).collect();
        Behavior::new(self.shape.clone(), p)
    }

    pub(crate) fn from_parts_unchecked(shape: Shape, p: Vec<f64>) -> Self {
        Self { shape, p }
    }
}

/// `sum_o p_O(o) sum_d p(d|o) u_o^d`
pub fn expected_utility(problem: &TcProblem, behavior: &Behavior) -> Result<f64> {
    if problem.shape() != behavior.shape() {
        return Err(TcError::Dimension(format!(
            "problem shape {:?} vs behavior shape {:?}",
            problem.shape(),
            behavior.shape()
        )));
    }
    let nd = problem.shape().num_dec();
    Ok(problem
        .input_dist()
        .iter()
        .enumerate()
        .map(|(o, &po)| {
            let u = &problem.utility()[o * nd..(o + 1) * nd];
            po * behavior.row(o).iter().zip(u).map(|(p, u)| p * u).sum::<f64>()
        })
        .sum())
}

/// One local decision table per party: `tables[i][o_i] = f_i(o_i)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DeterministicStrategy {
    pub tables: Vec<Vec<usize>>,
}

impl DeterministicStrategy {
    pub fn new(tables: Vec<Vec<usize>>) -> Self {
        Self { tables }
    }

    /// Every party answers `decision` regardless of observation.
    pub fn constant(shape: &Shape, decision: usize) -> Self {
        Self { tables: shape.obs.iter().map(|&m| vec![decision; m]).collect() }
    }

    pub fn validate(&self, shape: &Shape) -> Result<()> {
        if self.tables.len() != shape.parties() {
            return Err(TcError::Dimension(format!(
                "strategy has {} parties, problem has {}",
                self.tables.len(),
                shape.parties()
            )));
        }
        for (i, table) in self.tables.iter().enumerate() {
            if table.len() != shape.obs[i] {
                return Err(TcError::Dimension(format!(
                    "party {i} table covers {} observations, expected {}",
                    table.len(),
                    shape.obs[i]
                )));
            }
            if let Some(&d) = table.iter().find(|&&d| d >= shape.dec[i]) {
                return Err(TcError::Range(format!("party {i} maps to decision {d}, only {} exist", shape.dec[i])));
            }
        }
        Ok(())
    }

    /// Joint decision index chosen on joint observation `obs`.
    pub fn joint_decision(&self, shape: &Shape, obs: usize) -> usize {
        let tuple = shape.obs_tuple(obs);
        let dec: Vec<usize> = tuple.iter().zip(&self.tables).map(|(&o, t)| t[o]).collect();
        shape.dec_index(&dec)
    }
}

pub fn deterministic_behavior(shape: &Shape, strategy: &DeterministicStrategy) -> Result<Behavior> {
    strategy.validate(shape)?;
    let mut p = vec![0.0; shape.len()];
    for o in 0..shape.num_obs() {
        p[shape.entry(o, strategy.joint_decision(shape, o))] = 1.0;
    }
    Ok(Behavior::from_parts_unchecked(shape.clone(), p))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoSignalingReport {
    pub ok: bool,
    pub max_violation: f64,
}

/// For every party, the marginal over the others' decisions must not move
/// with that party's observation.
pub fn check_no_signaling(behavior: &Behavior, tol: f64) -> NoSignalingReport {
    let shape = behavior.shape();
    let n = shape.parties();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        // marginal[(o, d with d_i summed out)]
        let mut marg = std::collections::HashMap::<(Vec<usize>, Vec<usize>), Vec<f64>>::new();
        for o in 0..shape.num_obs() {
            let ot = shape.obs_tuple(o);
            for d in 0..shape.num_dec() {
                let mut dt = shape.dec_tuple(d);
                let mut rest_o = ot.clone();
                let oi = rest_o.remove(i);
                dt.remove(i);
                let slot = marg.entry((rest_o, dt)).or_insert_with(|| vec![0.0; shape.obs[i]]);
                slot[oi] += behavior.at(o, d);
            }
        }
        for values in marg.values() {
            let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
            worst = worst.max(hi - lo);
        }
    }
    NoSignalingReport { ok: worst <= tol, max_violation: worst }
}

/// `c_kl = 2 p(XOR = 0 | k, l) - 1` for two parties with binary decisions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub rows: usize,
    pub cols: usize,
    pub c: Vec<f64>,
}

impl CorrelationMatrix {
    pub fn at(&self, k: usize, l: usize) -> f64 {
        self.c[k * self.cols + l]
    }
}

pub fn correlation_matrix(behavior: &Behavior) -> Result<CorrelationMatrix> {
    let shape = behavior.shape();
    if shape.parties() != 2 || shape.dec != [2, 2] {
        return Err(TcError::Unsupported("correlation matrices need two parties with binary decisions".into()));
    }
    let (rows, cols) = (shape.obs[0], shape.obs[1]);
    let c = (0..rows * cols)
        .map(|o| {
            let r = behavior.row(o);
            (r[0] + r[3]) - (r[1] + r[2])
        })
        .collect();
    Ok(CorrelationMatrix { rows, cols, c })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalPolytopeReport {
    pub inside: bool,
    /// Largest `|S| - 2` over the CHSH combinations; positive means violated.
    pub worst_margin: f64,
    pub min_probability: f64,
}

/// Fine's characterization of the (2,2,2) local polytope: positivity plus the
/// eight CHSH inequalities `|c00 + c01 + c10 + c11 - 2 c_k| <= 2`.
pub fn check_local_polytope_222(behavior: &Behavior, tol: f64) -> Result<LocalPolytopeReport> {
    if !behavior.shape().is_222() {
        return Err(TcError::Unsupported("local polytope check is for (2,2,2) behaviors".into()));
    }
    let c = correlation_matrix(behavior)?.c;
    let total: f64 = c.iter().sum();
    let worst_margin = c.iter().map(|&ck| (total - 2.0 * ck).abs() - 2.0).fold(f64::NEG_INFINITY, f64::max);
    let min_probability = behavior.probs().iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(LocalPolytopeReport {
        inside: worst_margin <= tol && min_probability >= -tol,
        worst_margin,
        min_probability,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{make_chsh, make_hedge_or_not};

    fn shape222() -> Shape {
        Shape::new(vec![2, 2], vec![2, 2]).unwrap()
    }

    #[test]
    fn reference_witness_scores_079() {
        let p = make_hedge_or_not(0.3, 0.3).unwrap();
        // NYSE always B, NASDAQ N->A, I->B
        let s = DeterministicStrategy::new(vec![vec![1, 1], vec![0, 1]]);
        let b = deterministic_behavior(p.shape(), &s).unwrap();
        assert!((expected_utility(&p, &b).unwrap() - 0.79).abs() < 1e-12);
    }

    #[test]
    fn uniform_behavior_scores_half_on_hedge_or_not() {
        for &(pp, beta) in &[(0.1, 0.0), (0.3, 0.3), (0.8, 0.9)] {
            let p = make_hedge_or_not(pp, beta).unwrap();
            let eu = expected_utility(&p, &Behavior::uniform(shape222())).unwrap();
            assert!((eu - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_utility_gives_zero() {
        let p = make_chsh(0.4, false).unwrap().with_utility(vec![0.0; 16]).unwrap();
        assert_eq!(expected_utility(&p, &Behavior::uniform(shape222())).unwrap(), 0.0);
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let p = make_chsh(0.4, false).unwrap();
        let other = Behavior::uniform(Shape::new(vec![2, 3], vec![2, 2]).unwrap());
        assert!(matches!(expected_utility(&p, &other), Err(TcError::Dimension(_))));
    }

    #[test]
    fn deterministic_rows() {
        let s = DeterministicStrategy::constant(&shape222(), 0);
        let b = deterministic_behavior(&shape222(), &s).unwrap();
        for o in 0..4 {
            assert_eq!(b.row(o), &[1.0, 0.0, 0.0, 0.0]);
        }
        // f1 = identity, f2 = flip
        let s = DeterministicStrategy::new(vec![vec![0, 1], vec![1, 0]]);
        let b = deterministic_behavior(&shape222(), &s).unwrap();
        for o1 in 0..2 {
            for o2 in 0..2 {
                let o = 2 * o1 + o2;
                let col = 2 * o1 + (1 - o2);
                for d in 0..4 {
                    assert_eq!(b.at(o, d), if d == col { 1.0 } else { 0.0 });
                }
            }
        }
        let bad = DeterministicStrategy::new(vec![vec![0, 2], vec![0, 0]]);
        assert!(deterministic_behavior(&shape222(), &bad).is_err());
    }

    #[test]
    fn every_deterministic_behavior_is_no_signaling_and_local() {
        let shape = Shape::new(vec![2, 3], vec![2, 3]).unwrap();
        for a in 0..4 {
            for b in 0..27 {
                let t1 = vec![a & 1, a >> 1];
                let t2 = vec![b % 3, (b / 3) % 3, b / 9];
                let beh = deterministic_behavior(&shape, &DeterministicStrategy::new(vec![t1, t2])).unwrap();
                let r = check_no_signaling(&beh, 0.0);
                assert!(r.ok);
                assert_eq!(r.max_violation, 0.0);
            }
        }
        for k in 0..16 {
            let t = vec![vec![k & 1, (k >> 1) & 1], vec![(k >> 2) & 1, (k >> 3) & 1]];
            let beh = deterministic_behavior(&shape222(), &DeterministicStrategy::new(t)).unwrap();
            assert!(check_local_polytope_222(&beh, 1e-12).unwrap().inside);
        }
    }

    #[test]
    fn copying_the_other_observation_signals() {
        // party 2 outputs o_1, party 1 outputs 0
        let mut p = vec![0.0; 16];
        for o1 in 0..2 {
            for o2 in 0..2 {
                p[(2 * o1 + o2) * 4 + o1] = 1.0;
            }
        }
        let b = Behavior::new(shape222(), p).unwrap();
        let r = check_no_signaling(&b, 1e-9);
        assert!(!r.ok);
        assert_eq!(r.max_violation, 1.0);
    }

    #[test]
    fn correlation_extremes() {
        let correlated = Behavior::new(shape222(), [0.5, 0.0, 0.0, 0.5].repeat(4)).unwrap();
        assert!(correlation_matrix(&correlated).unwrap().c.iter().all(|&c| c == 1.0));
        let uniform = Behavior::uniform(shape222());
        assert!(correlation_matrix(&uniform).unwrap().c.iter().all(|&c| c == 0.0));
    }

    #[test]
    fn behavior_validation() {
        assert!(Behavior::new(shape222(), vec![0.25; 15]).is_err());
        assert!(Behavior::new(shape222(), [0.5, 0.5, 0.5, -0.5].repeat(4)).is_err());
        assert!(Behavior::new(shape222(), [0.3, 0.3, 0.3, 0.3].repeat(4)).is_err());
    }
}
