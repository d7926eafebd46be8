use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypothesis::{DataModel, HypothesisClass};
use crate::run::{Algorithm, Constants, LearnerOptions};
use crate::shared_randomness::Seed;

/// Which hypothesis class to build.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClassSpec {
    Thresholds { domain_size: usize },
    Intervals { domain_size: usize },
    WorstCase { domain_size: usize },
    Explicit { rows: Vec<Vec<u8>> },
}

impl ClassSpec {
    pub fn generator(name: &str, domain_size: usize) -> Result<Self> {
        Ok(match name {
            "thresholds" => ClassSpec::Thresholds { domain_size },
            "intervals" => ClassSpec::Intervals { domain_size },
            "worst_case" | "worst-case" => ClassSpec::WorstCase { domain_size },
            _ => return Err(Error::Input(format!("unknown class generator `{name}`"))),
        })
    }

    pub fn build(&self) -> Result<HypothesisClass> {
        match self {
            ClassSpec::Thresholds { domain_size } => HypothesisClass::thresholds(*domain_size),
            ClassSpec::Intervals { domain_size } => HypothesisClass::intervals(*domain_size),
            ClassSpec::WorstCase { domain_size } => HypothesisClass::worst_case(*domain_size),
            ClassSpec::Explicit { rows } => HypothesisClass::from_rows(rows.clone()),
        }
    }

    /// Target used when the oracle does not name one: the middle threshold
    /// for threshold classes, hypothesis 0 otherwise.
    pub fn default_target(&self, class: &HypothesisClass) -> usize {
        match self {
            ClassSpec::Thresholds { domain_size } => domain_size / 2,
            _ => 0,
        }
        .min(class.len() - 1)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DistributionSpec {
    #[default]
    Uniform,
    Weights { weights: Vec<f64> },
}

/// How labels are produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OracleSpec {
    /// Labels are the predictions of `target`.
    Realizable {
        #[serde(default)]
        target: Option<usize>,
    },
    /// Predictions of `target` flipped independently with probability `eta`.
    ConstantNoise {
        #[serde(default)]
        target: Option<usize>,
        eta: f64,
    },
    /// Arbitrary per-point base labels and flip probabilities.
    Agnostic { base: Vec<u8>, flip: Vec<f64> },
}

impl Default for OracleSpec {
    fn default() -> Self {
        OracleSpec::Realizable { target: None }
    }
}

/// How the shared random string of each pair is chosen.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedPolicy {
    /// Every pair uses `b_seed` itself.
    Fixed,
    /// Pair `i` uses a seed derived from `b_seed` and `i`.
    #[default]
    PerTrial,
}

/// An experiment description. Every field has a default, so a config file
/// only needs the fields it changes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub class: ClassSpec,
    pub distribution: DistributionSpec,
    pub oracle: OracleSpec,
    pub algorithm: Algorithm,
    pub epsilon: f64,
    pub delta: f64,
    /// Replicability parameter; required by the replicable learners.
    pub rho: Option<f64>,
    /// Shorthand for a constant-noise oracle with `eta = nu` on the oracle's
    /// target.
    pub nu: Option<f64>,
    pub constants: Constants,
    pub theta_override: Option<f64>,
    pub spacing_override: Option<f64>,
    pub stream_accounting: bool,
    pub trials: u64,
    pub b_seed: Seed,
    pub b_policy: SeedPolicy,
    pub data_seed: Seed,
    /// Feed both sides of a pair the same data stream.
    pub mirror_data: bool,
    /// Run trials on the rayon thread pool.
    pub parallel: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            class: ClassSpec::Thresholds { domain_size: 128 },
            distribution: DistributionSpec::Uniform,
            oracle: OracleSpec::default(),
            algorithm: Algorithm::Cal,
            epsilon: 0.05,
            delta: 0.05,
            rho: None,
            nu: None,
            constants: Constants::default(),
            theta_override: None,
            spacing_override: None,
            stream_accounting: false,
            trials: 1,
            b_seed: Seed::from_u64(0),
            b_policy: SeedPolicy::PerTrial,
            data_seed: Seed::from_u64(1),
            mirror_data: false,
            parallel: false,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn options(&self) -> LearnerOptions {
        LearnerOptions {
            constants: self.constants,
            theta_override: self.theta_override,
            spacing_override: self.spacing_override,
            stream_accounting: self.stream_accounting,
        }
    }

    /// Range checks that do not need the class.
    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64| {
            if v > 0.0 && v < 1.0 {
                Ok(())
            } else {
                Err(Error::Parameter(format!("{name} must lie in (0, 1), got {v}")))
            }
        };
        unit("epsilon", self.epsilon)?;
        unit("delta", self.delta)?;
        if let Some(rho) = self.rho {
            unit("rho", rho)?;
        } else if matches!(self.algorithm, Algorithm::Replical | Algorithm::Replica2) {
            return Err(Error::Parameter(format!("{} needs rho", self.algorithm)));
        }
        if let Some(nu) = self.nu {
            if !(nu > 0.0 && nu < 0.5) {
                return Err(Error::Parameter(format!("nu must lie in (0, 1/2), got {nu}")));
            }
        }
        if let OracleSpec::ConstantNoise { eta, .. } = self.oracle {
            if !(0.0..0.5).contains(&eta) {
                return Err(Error::Parameter(format!("eta must lie in [0, 1/2), got {eta}")));
            }
        }
        Ok(())
    }

    /// Builds the class and data model, checking indices and probabilities.
    pub fn build(&self) -> Result<(HypothesisClass, DataModel)> {
        self.validate()?;
        let class = self.class.build()?;
        let n = class.domain_size();
        let weights = match &self.distribution {
            DistributionSpec::Uniform => DataModel::uniform_weights(n),
            DistributionSpec::Weights { weights } => weights.clone(),
        };
        let target_or_default = |t: Option<usize>| -> Result<usize> {
            let t = t.unwrap_or_else(|| self.class.default_target(&class));
            class.check_index(t)?;
            Ok(t)
        };
        let model = match (&self.oracle, self.nu) {
            (OracleSpec::Realizable { target } | OracleSpec::ConstantNoise { target, .. }, Some(nu)) => {
                DataModel::constant_noise(&class, weights, target_or_default(*target)?, nu)?
            }
            (OracleSpec::Agnostic { .. }, Some(_)) => {
                return Err(Error::Config("`nu` cannot be combined with an explicit agnostic oracle".into()))
            }
            (OracleSpec::Realizable { target }, None) => {
                DataModel::realizable(&class, weights, target_or_default(*target)?)?
            }
            (OracleSpec::ConstantNoise { target, eta }, None) => {
                DataModel::constant_noise(&class, weights, target_or_default(*target)?, *eta)?
            }
            (OracleSpec::Agnostic { base, flip }, None) => {
                DataModel::agnostic(&class, weights, base.clone(), flip.clone())?
            }
        };
        Ok((class, model))
    }
}
