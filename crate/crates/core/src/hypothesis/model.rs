use crate::error::{Error, Result};

use super::class::HypothesisClass;

const WEIGHT_TOLERANCE: f64 = 1e-12;

/// How labels are produced for a drawn point.
#[derive(Debug, Clone, PartialEq)]
pub enum LabelMechanism {
    /// Labels come from a target hypothesis in the class.
    Realizable { target: usize },
    /// Labels come from `base`, flipped independently at point `x` with
    /// probability `flip[x]`.
    Agnostic { base: Vec<u8>, flip: Vec<f64> },
}

/// A distribution over the domain together with a label mechanism.
#[derive(Debug, Clone, PartialEq)]
pub struct DataModel {
    weights: Vec<f64>,
    labels: LabelMechanism,
}

impl DataModel {
    pub fn uniform_weights(n: usize) -> Vec<f64> {
        vec![1.0 / n as f64; n]
    }

    fn check_weights(class: &HypothesisClass, weights: &[f64]) -> Result<()> {
        if weights.len() != class.domain_size() {
            return Err(Error::Input(format!(
                "{} weights for a domain of size {}",
                weights.len(),
                class.domain_size()
            )));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::Input("weights must be finite and nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_TOLERANCE {
            return Err(Error::Input(format!("weights sum to {total}, expected 1")));
        }
        Ok(())
    }

    pub fn realizable(class: &HypothesisClass, weights: Vec<f64>, target: usize) -> Result<Self> {
        Self::check_weights(class, &weights)?;
        class.check_index(target)?;
        Ok(DataModel {
            weights,
            labels: LabelMechanism::Realizable { target },
        })
    }

    /// Realizable model whose labels are an explicit row, which must belong
    /// to the class.
    pub fn realizable_row(class: &HypothesisClass, weights: Vec<f64>, row: &[u8]) -> Result<Self> {
        let target = class.find_row(row).ok_or_else(|| {
            Error::Input("realizable label row is not a hypothesis of the class".into())
        })?;
        Self::realizable(class, weights, target)
    }

    pub fn agnostic(
        class: &HypothesisClass,
        weights: Vec<f64>,
        base: Vec<u8>,
        flip: Vec<f64>,
    ) -> Result<Self> {
        Self::check_weights(class, &weights)?;
        let n = class.domain_size();
        if base.len() != n || flip.len() != n {
            return Err(Error::Input(format!(
                "agnostic labels need {n} base labels and {n} flip rates"
            )));
        }
        if base.iter().any(|&b| b > 1) {
            return Err(Error::Input("base labels must be binary".into()));
        }
        if flip.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
            return Err(Error::Input("flip rates must lie in [0, 1]".into()));
        }
        Ok(DataModel {
            weights,
            labels: LabelMechanism::Agnostic { base, flip },
        })
    }

    /// Agnostic model flipping the labels of hypothesis `base` at a constant rate.
    pub fn constant_noise(
        class: &HypothesisClass,
        weights: Vec<f64>,
        base: usize,
        eta: f64,
    ) -> Result<Self> {
        class.check_index(base)?;
        let n = class.domain_size();
        Self::agnostic(class, weights, class.row(base).to_vec(), vec![eta; n])
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, x: usize) -> f64 {
        self.weights[x]
    }

    pub fn labels(&self) -> &LabelMechanism {
        &self.labels
    }

    pub fn is_realizable(&self) -> bool {
        matches!(self.labels, LabelMechanism::Realizable { .. })
    }

    pub fn target(&self) -> Option<usize> {
        match self.labels {
            LabelMechanism::Realizable { target } => Some(target),
            LabelMechanism::Agnostic { .. } => None,
        }
    }

    /// Probability that the label of `x` is 1.
    pub fn prob_one(&self, class: &HypothesisClass, x: usize) -> f64 {
        match &self.labels {
            LabelMechanism::Realizable { target } => f64::from(class.predict(*target, x)),
            LabelMechanism::Agnostic { base, flip } => {
                if base[x] == 1 {
                    1.0 - flip[x]
                } else {
                    flip[x]
                }
            }
        }
    }

    /// Probability that a prediction of `pred` at `x` disagrees with the label.
    pub fn mistake_prob(&self, class: &HypothesisClass, x: usize, pred: u8) -> f64 {
        let p1 = self.prob_one(class, x);
        if pred == 1 {
            1.0 - p1
        } else {
            p1
        }
    }
}
