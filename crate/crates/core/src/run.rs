//! Learner options and the result record shared by every learner.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypothesis::{signature_string, HypothesisClass};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Erm,
    Cal,
    A2,
    Replical,
    Replica2,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Erm,
        Algorithm::Cal,
        Algorithm::A2,
        Algorithm::Replical,
        Algorithm::Replica2,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Erm => "erm",
            Algorithm::Cal => "cal",
            Algorithm::A2 => "a2",
            Algorithm::Replical => "replical",
            Algorithm::Replica2 => "replica2",
        }
    }

    /// Whether the algorithm targets the agnostic setting.
    pub fn is_agnostic(&self) -> bool {
        matches!(self, Algorithm::A2 | Algorithm::Replica2)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Input(format!("unknown algorithm `{s}`")))
    }
}

/// Multipliers on the asymptotic sample sizes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Constants {
    /// Passive ERM sample size.
    pub c_pass: f64,
    /// CAL per-round labels.
    pub c_cal: f64,
    /// A² per-round labels.
    pub c_a2: f64,
    /// A² final-step labels.
    pub c_a2_final: f64,
    /// Error-estimation part of the replicable per-round sample.
    pub c_k1: f64,
    /// Replicability part of the replicable per-round and final samples.
    pub c_k2: f64,
    /// Error-estimation part of the replicable agnostic final sample.
    pub c_k3: f64,
    /// Number of threshold intervals, `c_grid ln|C| / rho^2`.
    pub c_grid: f64,
    /// Unlabeled sample size as a multiple of the rSTAT requirement.
    pub c_t: f64,
}

impl Default for Constants {
    fn default() -> Self {
        Constants {
            c_pass: 2.0,
            c_cal: 2.0,
            c_a2: 16.0,
            c_a2_final: 16.0,
            c_k1: 2.0,
            c_k2: 1.0,
            c_k3: 1.0,
            c_grid: 1.0,
            c_t: 2.0,
        }
    }
}

impl Constants {
    pub const KEYS: [&'static str; 9] = [
        "c_pass", "c_cal", "c_a2", "c_a2_final", "c_k1", "c_k2", "c_k3", "c_grid", "c_t",
    ];

    fn slot(&mut self, key: &str) -> Option<&mut f64> {
        Some(match key {
            "c_pass" => &mut self.c_pass,
            "c_cal" => &mut self.c_cal,
            "c_a2" => &mut self.c_a2,
            "c_a2_final" | "c_a2'" => &mut self.c_a2_final,
            "c_k1" => &mut self.c_k1,
            "c_k2" => &mut self.c_k2,
            "c_k3" => &mut self.c_k3,
            "c_grid" => &mut self.c_grid,
            "c_t" | "c_T" => &mut self.c_t,
            _ => return None,
        })
    }

    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        if !value.is_finite() || value <= 0.0 {
            return Err(Error::Parameter(format!("constant {key} must be positive, got {value}")));
        }
        let slot = self
            .slot(key)
            .ok_or_else(|| Error::Input(format!("unknown constant `{key}`")))?;
        *slot = value;
        Ok(())
    }

    /// Applies a `KEY=VAL` override.
    pub fn apply_assignment(&mut self, assignment: &str) -> Result<()> {
        let (key, val) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Input(format!("expected KEY=VAL, got `{assignment}`")))?;
        let value: f64 = val
            .trim()
            .parse()
            .map_err(|_| Error::Input(format!("bad value in `{assignment}`")))?;
        self.set(key.trim(), value)
    }
}

/// Knobs shared by all learners.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct LearnerOptions {
    pub constants: Constants,
    /// Replaces the exactly computed disagreement coefficient.
    pub theta_override: Option<f64>,
    /// Forces the threshold-grid spacing of the realizable and agnostic-loop grids.
    pub spacing_override: Option<f64>,
    /// Charge unlabeled draws as a stream-based learner would.
    pub stream_accounting: bool,
}

/// State of one round of a learner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: usize,
    /// Disagreement-mass value the loop guard looked at (exact for the
    /// baselines, the rSTAT estimate for the replicable learners).
    pub disagreement_estimate: f64,
    /// Exact disagreement mass of the version space at this point.
    pub disagreement_mass: f64,
    pub version_space_size: usize,
    /// Elimination threshold applied in this round, if any.
    pub threshold: Option<f64>,
    /// Noise slack added to the threshold (agnostic learners).
    pub sigma: Option<f64>,
    pub labels_so_far: u64,
}

/// Outcome of a single learner run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub algorithm: Algorithm,
    pub hypothesis: usize,
    /// Prediction row of the returned hypothesis as a `0`/`1` string.
    pub signature: String,
    pub labels_used: u64,
    pub unlabeled_used: u64,
    pub rounds: usize,
    pub final_disagreement_estimate: f64,
    pub theta: f64,
    /// Version space at return, before the final selection.
    pub survivors: Vec<usize>,
    /// Version space the last elimination step was applied to.
    pub last_round_members: Vec<usize>,
    /// Threshold-grid origin and spacing of the last phase (replicable learners).
    pub grid: Option<crate::replicable::ThresholdGrid>,
    /// Slack added to the threshold in the last elimination step.
    pub last_sigma: Option<f64>,
    pub trace: Vec<RoundRecord>,
    pub flags: Vec<String>,
}

impl RunResult {
    pub(crate) fn signature_of(class: &HypothesisClass, h: usize) -> String {
        signature_string(class.row(h))
    }
}

pub(crate) fn check_unit(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!("{name} must lie in (0, 1), got {v}")))
    }
}
