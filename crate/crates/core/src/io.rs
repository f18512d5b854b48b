//! JSON problem documents.

use serde::{Deserialize, Serialize};

use crate::error::{Result, TcError};
use crate::problem::TcProblem;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum InputDistribution {
    /// Probabilities over joint observations in canonical order.
    Explicit { probs: Vec<f64> },
    /// Independent binary observations per party; the second label has probability `p`.
    BernoulliProduct { p: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemDocument {
    pub parties: usize,
    pub observations: Vec<Vec<String>>,
    pub decisions: Vec<Vec<String>>,
    pub input_distribution: InputDistribution,
    pub utility: Vec<f64>,
}

impl ProblemDocument {
    pub fn into_problem(self) -> Result<TcProblem> {
        if self.observations.len() != self.parties || self.decisions.len() != self.parties {
            return Err(TcError::Dimension(format!(
                "`parties` is {} but {} observation and {} decision alphabets were given",
                self.parties,
                self.observations.len(),
                self.decisions.len()
            )));
        }
        let probs = match self.input_distribution {
            InputDistribution::Explicit { probs } => probs,
            InputDistribution::BernoulliProduct { p } => {
                if !(0.0..=1.0).contains(&p) {
                    return Err(TcError::Range(format!("bernoulli p = {p} outside [0, 1]")));
                }
                if self.observations.iter().any(|o| o.len() != 2) {
                    return Err(TcError::Unsupported(
                        "bernoulli_product needs binary observations for every party".into(),
                    ));
                }
                let n = self.parties;
                (0..1usize << n)
                    .map(|o| {
                        (0..n)
                            .map(|i| if (o >> (n - 1 - i)) & 1 == 1 { p } else { 1.0 - p })
                            .product()
                    })
                    .collect()
            }
        };
        TcProblem::new(self.observations, self.decisions, probs, self.utility)
    }

    pub fn from_problem(problem: &TcProblem) -> Self {
        Self {
            parties: problem.parties(),
            observations: problem.obs_labels().to_vec(),
            decisions: problem.dec_labels().to_vec(),
            input_distribution: InputDistribution::Explicit { probs: problem.input_dist().to_vec() },
            utility: problem.utility().to_vec(),
        }
    }
}

pub fn problem_from_json(text: &str) -> Result<TcProblem> {
    let doc: ProblemDocument = serde_json::from_str(text).map_err(|e| TcError::Parse(e.to_string()))?;
    doc.into_problem()
}

pub fn problem_to_json(problem: &TcProblem) -> String {
    serde_json::to_string_pretty(&ProblemDocument::from_problem(problem)).expect("documents always serialize")
}
