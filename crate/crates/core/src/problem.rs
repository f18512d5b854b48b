//! Tacit-coordination problems: alphabets, input distribution and utility.
//!
//! All flattened arrays use one layout. A joint observation `(o_1, ..., o_n)`
//! maps to a row-major index over the per-party observation counts, joint
//! decisions likewise, and a flattened `O x D` array stores observations as
//! the outer index and decisions as the inner one.

use serde::{Deserialize, Serialize};

use crate::error::{Result, TcError};

/// Tolerance for an input distribution to count as normalized.
pub const DIST_TOL: f64 = 1e-12;

/// Per-party alphabet sizes and the row-major index arithmetic over them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shape {
    pub obs: Vec<usize>,
    pub dec: Vec<usize>,
}

fn ravel(radices: &[usize], digits: &[usize]) -> usize {
    digits.iter().zip(radices).fold(0, |acc, (&d, &r)| acc * r + d)
}

fn unravel(radices: &[usize], mut index: usize) -> Vec<usize> {
    let mut digits = vec![0; radices.len()];
    for (slot, &r) in digits.iter_mut().zip(radices).rev() {
        *slot = index % r;
        index /= r;
    }
    digits
}

impl Shape {
    pub fn new(obs: Vec<usize>, dec: Vec<usize>) -> Result<Self> {
        if obs.len() != dec.len() {
            return Err(TcError::Dimension(format!(
                "{} observation alphabets but {} decision alphabets",
                obs.len(),
                dec.len()
            )));
        }
        if obs.len() < 2 {
            return Err(TcError::Range(format!("need at least 2 parties, got {}", obs.len())));
        }
        if obs.iter().chain(&dec).any(|&k| k == 0) {
            return Err(TcError::Range("alphabets must be non-empty".into()));
        }
        Ok(Self { obs, dec })
    }

    pub fn parties(&self) -> usize {
        self.obs.len()
    }

    pub fn num_obs(&self) -> usize {
        self.obs.iter().product()
    }

    pub fn num_dec(&self) -> usize {
        self.dec.iter().product()
    }

    pub fn len(&self) -> usize {
        self.num_obs() * self.num_dec()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn obs_index(&self, obs: &[usize]) -> usize {
        ravel(&self.obs, obs)
    }

    pub fn obs_tuple(&self, index: usize) -> Vec<usize> {
        unravel(&self.obs, index)
    }

    pub fn dec_index(&self, dec: &[usize]) -> usize {
        ravel(&self.dec, dec)
    }

    pub fn dec_tuple(&self, index: usize) -> Vec<usize> {
        unravel(&self.dec, index)
    }

    /// Flat position of `(o, d)` given joint indices.
    pub fn entry(&self, obs: usize, dec: usize) -> usize {
        obs * self.num_dec() + dec
    }

    /// `(n, m, delta)` when every party has `m` observations and `delta` decisions.
    pub fn uniform_type(&self) -> Option<(usize, usize, usize)> {
        let m = self.obs[0];
        let delta = self.dec[0];
        (self.obs.iter().all(|&k| k == m) && self.dec.iter().all(|&k| k == delta))
            .then_some((self.parties(), m, delta))
    }

    pub fn is_222(&self) -> bool {
        self.uniform_type() == Some((2, 2, 2))
    }
}

/// A game definition: who sees what, who decides what, and how it pays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TcProblem {
    obs_labels: Vec<Vec<String>>,
    dec_labels: Vec<Vec<String>>,
    input_dist: Vec<f64>,
    utility: Vec<f64>,
    #[serde(skip)]
    shape: Option<Shape>,
}

fn check_labels(labels: &[Vec<String>]) -> Result<()> {
    for (party, alphabet) in labels.iter().enumerate() {
        for (i, label) in alphabet.iter().enumerate() {
            if alphabet[..i].contains(label) {
                return Err(TcError::DuplicateLabel { party, label: label.clone() });
            }
        }
    }
    Ok(())
}

impl TcProblem {
    pub fn new(
        obs_labels: Vec<Vec<String>>,
        dec_labels: Vec<Vec<String>>,
        input_dist: Vec<f64>,
        utility: Vec<f64>,
    ) -> Result<Self> {
        let shape = Shape::new(
            obs_labels.iter().map(Vec::len).collect(),
            dec_labels.iter().map(Vec::len).collect(),
        )?;
        check_labels(&obs_labels)?;
        check_labels(&dec_labels)?;
        if input_dist.len() != shape.num_obs() {
            return Err(TcError::Dimension(format!(
                "input distribution has {} entries, expected {}",
                input_dist.len(),
                shape.num_obs()
            )));
        }
        if utility.len() != shape.len() {
            return Err(TcError::Dimension(format!(
                "utility array has {} entries, expected {}",
                utility.len(),
                shape.len()
            )));
        }
        if input_dist.iter().any(|x| !x.is_finite()) {
            return Err(TcError::NonFinite("input distribution".into()));
        }
        if utility.iter().any(|x| !x.is_finite()) {
            return Err(TcError::NonFinite("utility array".into()));
        }
        if let Some(x) = input_dist.iter().find(|&&x| x < 0.0) {
            return Err(TcError::Probability(format!("negative entry {x}")));
        }
        let total: f64 = input_dist.iter().sum();
        if (total - 1.0).abs() > DIST_TOL {
            return Err(TcError::Probability(format!("entries sum to {total}, not 1")));
        }
        Ok(Self { obs_labels, dec_labels, input_dist, utility, shape: Some(shape) })
    }

    /// Problem with labels `"0"`, `"1"`, ... for every alphabet.
    pub fn from_sizes(
        obs: &[usize],
        dec: &[usize],
        input_dist: Vec<f64>,
        utility: Vec<f64>,
    ) -> Result<Self> {
        let labels = |sizes: &[usize]| -> Vec<Vec<String>> {
            sizes.iter().map(|&k| (0..k).map(|i| i.to_string()).collect()).collect()
        };
        Self::new(labels(obs), labels(dec), input_dist, utility)
    }

    pub fn shape(&self) -> &Shape {
        self.shape.as_ref().expect("shape is set by the constructor")
    }

    pub fn parties(&self) -> usize {
        self.obs_labels.len()
    }

    pub fn obs_labels(&self) -> &[Vec<String>] {
        &self.obs_labels
    }

    pub fn dec_labels(&self) -> &[Vec<String>] {
        &self.dec_labels
    }

    pub fn input_dist(&self) -> &[f64] {
        &self.input_dist
    }

    pub fn utility(&self) -> &[f64] {
        &self.utility
    }

    pub fn utility_at(&self, obs: usize, dec: usize) -> f64 {
        self.utility[self.shape().entry(obs, dec)]
    }

    /// Index of `label` in party `party`'s observation alphabet.
    pub fn obs_label_index(&self, party: usize, label: &str) -> Option<usize> {
        self.obs_labels.get(party)?.iter().position(|l| l == label)
    }

    pub fn dec_label_index(&self, party: usize, label: &str) -> Option<usize> {
        self.dec_labels.get(party)?.iter().position(|l| l == label)
    }

    /// Same alphabets and distribution, new utility array.
    pub fn with_utility(&self, utility: Vec<f64>) -> Result<Self> {
        Self::new(self.obs_labels.clone(), self.dec_labels.clone(), self.input_dist.clone(), utility)
    }

    pub fn weighted_utility(&self) -> WeightedUtilityArray {
        weighted_utility(self)
    }
}

/// `w_o^d = p_O(o) * u_o^d`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedUtilityArray {
    pub shape: Shape,
    pub w: Vec<f64>,
}

impl WeightedUtilityArray {
    pub fn at(&self, obs: usize, dec: usize) -> f64 {
        self.w[self.shape.entry(obs, dec)]
    }
}

pub fn weighted_utility(problem: &TcProblem) -> WeightedUtilityArray {
    let shape = problem.shape().clone();
    let nd = shape.num_dec();
    let w = problem
        .utility()
        .iter()
        .enumerate()
        .map(|(k, u)| problem.input_dist()[k / nd] * u)
        .collect();
    WeightedUtilityArray { shape, w }
}

fn bernoulli_pair(p: f64) -> Vec<f64> {
    let q = 1.0 - p;
    vec![q * q, q * p, p * q, p * p]
}

fn check_unit(name: &str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(TcError::Range(format!("{name} = {x} is outside [0, 1]")));
    }
    Ok(())
}

fn strings(labels: &[&str]) -> Vec<String> {
    labels.iter().map(|s| s.to_string()).collect()
}

/// The hedge-or-not problem: observations `N`/`I` (indicator seen with
/// probability `p`, independently per party), decisions `A`/`B`.
pub fn make_hedge_or_not(p: f64, beta: f64) -> Result<TcProblem> {
    check_unit("p", p)?;
    check_unit("beta", beta)?;
    let b = beta;
    #[rustfmt::skip]
    let utility = vec![
        0.0, 1.0,     1.0,     0.0,
        b,   1.0 - b, 1.0 - b, b,
        b,   1.0 - b, 1.0 - b, b,
        1.0, 0.0,     0.0,     1.0,
    ];
    let obs = strings(&["N", "I"]);
    let dec = strings(&["A", "B"]);
    TcProblem::new(vec![obs.clone(), obs], vec![dec.clone(), dec], bernoulli_pair(p), utility)
}

/// CHSH with independent Bernoulli(`p`) inputs. Utility 1 on a win, 0 otherwise;
/// `anti` swaps the winning condition.
pub fn make_chsh(p: f64, anti: bool) -> Result<TcProblem> {
    check_unit("p", p)?;
    let mut utility = Vec::with_capacity(16);
    for o1 in 0..2u8 {
        for o2 in 0..2u8 {
            for d1 in 0..2u8 {
                for d2 in 0..2u8 {
                    let bit = (o1 & o2) ^ (d1 ^ d2) ^ u8::from(!anti);
                    utility.push(f64::from(bit));
                }
            }
        }
    }
    let bits = strings(&["0", "1"]);
    TcProblem::new(vec![bits.clone(), bits.clone()], vec![bits.clone(), bits], bernoulli_pair(p), utility)
}

fn check_permutation(perm: &[usize], len: usize, what: &str) -> Result<()> {
    let mut seen = vec![false; len];
    if perm.len() != len {
        return Err(TcError::Permutation(format!("{what}: length {} for alphabet of {len}", perm.len())));
    }
    for &k in perm {
        if k >= len || std::mem::replace(&mut seen[k], true) {
            return Err(TcError::Permutation(format!("{what}: {perm:?} is not a permutation")));
        }
    }
    Ok(())
}

/// Relabels observations and decisions: `v_o^d = w_{pi(o)}^{sigma(d)}`
/// with `pi`, `sigma` applied party by party.
pub fn permute_problem(
    problem: &TcProblem,
    obs_perms: &[Vec<usize>],
    dec_perms: &[Vec<usize>],
) -> Result<TcProblem> {
    let shape = problem.shape();
    let n = shape.parties();
    if obs_perms.len() != n || dec_perms.len() != n {
        return Err(TcError::Permutation(format!("need one permutation per party ({n})")));
    }
    for i in 0..n {
        check_permutation(&obs_perms[i], shape.obs[i], "observation permutation")?;
        check_permutation(&dec_perms[i], shape.dec[i], "decision permutation")?;
    }
    let map = |tuple: Vec<usize>, perms: &[Vec<usize>]| -> Vec<usize> {
        tuple.iter().zip(perms).map(|(&x, p)| p[x]).collect()
    };
    let mut input_dist = vec![0.0; shape.num_obs()];
    let mut utility = vec![0.0; shape.len()];
    for o in 0..shape.num_obs() {
        let src_o = shape.obs_index(&map(shape.obs_tuple(o), obs_perms));
        input_dist[o] = problem.input_dist()[src_o];
        for d in 0..shape.num_dec() {
            let src_d = shape.dec_index(&map(shape.dec_tuple(d), dec_perms));
            utility[shape.entry(o, d)] = problem.utility_at(src_o, src_d);
        }
    }
    let relabel = |labels: &[Vec<String>], perms: &[Vec<usize>]| -> Vec<Vec<String>> {
        labels.iter().zip(perms).map(|(l, p)| p.iter().map(|&k| l[k].clone()).collect()).collect()
    };
    TcProblem::new(
        relabel(problem.obs_labels(), obs_perms),
        relabel(problem.dec_labels(), dec_perms),
        input_dist,
        utility,
    )
}

/// Reduced form of an XOR utility array: `u_o^d = table[o][parity(d)]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XorTable {
    pub table: Vec<[f64; 2]>,
}

impl XorTable {
    pub fn value(&self, obs: usize, parity: usize) -> f64 {
        self.table[obs][parity]
    }
}

fn parity(tuple: &[usize]) -> usize {
    tuple.iter().fold(0, |acc, &d| acc ^ d)
}

/// `Some` exactly when every utility entry depends on the decisions only
/// through their XOR. Entries are compared with `==`.
pub fn is_xor_array(problem: &TcProblem) -> Result<Option<XorTable>> {
    let shape = problem.shape();
    if shape.dec.iter().any(|&k| k != 2) {
        return Err(TcError::Unsupported("XOR arrays need binary decisions".into()));
    }
    let nd = shape.num_dec();
    let mut table = Vec::with_capacity(shape.num_obs());
    for o in 0..shape.num_obs() {
        let mut row: [Option<f64>; 2] = [None, None];
        for d in 0..nd {
            let par = parity(&shape.dec_tuple(d));
            let u = problem.utility_at(o, d);
            match row[par] {
                None => row[par] = Some(u),
                #[allow(clippy::float_cmp)]
                Some(prev) if prev == u => {}
                Some(_) => return Ok(None),
            }
        }
        table.push([row[0].unwrap_or(0.0), row[1].unwrap_or(0.0)]);
    }
    Ok(Some(XorTable { table }))
}

/// XOR problem with the parity argument flipped.
pub fn anti_array(problem: &TcProblem) -> Result<TcProblem> {
    let table = is_xor_array(problem)?
        .ok_or_else(|| TcError::Unsupported("anti-array requires an XOR utility array".into()))?;
    let shape = problem.shape();
    let mut utility = vec![0.0; shape.len()];
    for o in 0..shape.num_obs() {
        for d in 0..shape.num_dec() {
            utility[shape.entry(o, d)] = table.value(o, 1 - parity(&shape.dec_tuple(d)));
        }
    }
    problem.with_utility(utility)
}
