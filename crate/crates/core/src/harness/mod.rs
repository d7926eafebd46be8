//! Monte-Carlo experiment engine: single runs, paired replicability trials,
//! label-complexity sweeps and their serialization.

mod config;
mod export;
mod sweep;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::baselines::{run_a2, run_cal, run_passive_erm};
use crate::error::{Error, Result};
use crate::hypothesis::{noise_rate, true_error, DataModel, DataRng, HypothesisClass};
use crate::replicable::{run_replica2, run_replical};
use crate::run::{Algorithm, LearnerOptions, RunResult};
use crate::shared_randomness::{RandomString, Seed};

pub use config::{ClassSpec, DistributionSpec, ExperimentConfig, OracleSpec, SeedPolicy};
pub use export::{export, Exportable, Format, TrialRecord, CSV_COLUMNS};
pub use sweep::{label_complexity_sweep, SweepRow, SweepTable};

/// Environment variable naming the default output directory of the CLI.
pub const OUT_DIR_ENV: &str = "REPLICAL_OUT_DIR";

/// Runs one learner. `rho` is only read by the replicable learners, and the
/// random string only by them.
#[allow(clippy::too_many_arguments)]
pub fn run_algorithm(
    algorithm: Algorithm,
    class: &HypothesisClass,
    model: &DataModel,
    eps: f64,
    delta: f64,
    rho: Option<f64>,
    rs: &mut RandomString,
    rng: &mut DataRng,
    opts: &LearnerOptions,
) -> Result<RunResult> {
    let rho = || rho.ok_or_else(|| Error::Parameter(format!("{algorithm} needs rho")));
    match algorithm {
        Algorithm::Erm => run_passive_erm(class, model, eps, delta, rng, opts),
        Algorithm::Cal => run_cal(class, model, eps, delta, rng, opts),
        Algorithm::A2 => run_a2(class, model, eps, delta, rng, opts),
        Algorithm::Replical => run_replical(class, model, eps, delta, rho()?, rs, rng, opts),
        Algorithm::Replica2 => run_replica2(class, model, eps, delta, rho()?, rs, rng, opts),
    }
}

/// Short content hash of a prediction signature.
pub fn signature_hash(signature: &str) -> String {
    hex::encode(&Sha256::digest(signature.as_bytes())[..8])
}

/// Seeds of one pair of runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairSeeds {
    pub b: Seed,
    pub data: [Seed; 2],
}

/// One pair of runs sharing a random string.
#[derive(Debug, Clone, PartialEq)]
pub struct PairOutcome {
    pub index: u64,
    pub seeds: PairSeeds,
    pub sides: [Result<RunResult>; 2],
}

impl PairOutcome {
    /// Both sides returned and their prediction rows are equal.
    pub fn agreed(&self) -> bool {
        match &self.sides {
            [Ok(a), Ok(b)] => a.signature == b.signature,
            _ => false,
        }
    }
}

/// A validated config together with the class and model it describes.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub class: HypothesisClass,
    pub model: DataModel,
    /// Exact noise rate and best hypothesis of the model.
    pub nu: f64,
    pub best: usize,
    options: LearnerOptions,
}

impl Experiment {
    pub fn new(config: ExperimentConfig) -> Result<Self> {
        let (class, model) = config.build()?;
        let (nu, best) = noise_rate(&class, &model)?;
        let options = config.options();
        Ok(Experiment {
            config,
            class,
            model,
            nu,
            best,
            options,
        })
    }

    pub fn options(&self) -> &LearnerOptions {
        &self.options
    }

    /// One run with explicit seeds.
    pub fn run_with(&self, algorithm: Algorithm, eps: f64, b: Seed, data: Seed) -> Result<RunResult> {
        let mut rs = RandomString::new(b);
        let mut rng = data.data_rng();
        run_algorithm(
            algorithm,
            &self.class,
            &self.model,
            eps,
            self.config.delta,
            self.config.rho,
            &mut rs,
            &mut rng,
            &self.options,
        )
    }

    /// One run of the configured algorithm with explicit seeds.
    pub fn run_single(&self, b: Seed, data: Seed) -> Result<RunResult> {
        self.run_with(self.config.algorithm, self.config.epsilon, b, data)
    }

    /// Seeds of pair `index`, derived only from the config and the index.
    pub fn pair_seeds(&self, index: u64) -> PairSeeds {
        let cfg = &self.config;
        let b = match cfg.b_policy {
            SeedPolicy::Fixed => cfg.b_seed,
            SeedPolicy::PerTrial => cfg.b_seed.derive("pair-b", index),
        };
        let first = cfg.data_seed.derive("pair-data", 2 * index);
        let second = if cfg.mirror_data {
            first
        } else {
            cfg.data_seed.derive("pair-data", 2 * index + 1)
        };
        PairSeeds {
            b,
            data: [first, second],
        }
    }

    pub fn run_pair(&self, index: u64) -> PairOutcome {
        let seeds = self.pair_seeds(index);
        PairOutcome {
            index,
            seeds,
            sides: [
                self.run_single(seeds.b, seeds.data[0]),
                self.run_single(seeds.b, seeds.data[1]),
            ],
        }
    }

    /// All configured pairs, in index order.
    pub fn run_pairs(&self) -> Vec<PairOutcome> {
        let n = self.config.trials;
        if self.config.parallel {
            (0..n).into_par_iter().map(|i| self.run_pair(i)).collect()
        } else {
            (0..n).map(|i| self.run_pair(i)).collect()
        }
    }

    /// Whether `result` kept a hypothesis with the signature of the best
    /// hypothesis of the model.
    pub fn best_survived(&self, result: &RunResult) -> bool {
        result
            .survivors
            .iter()
            .any(|&h| self.class.same_signature(h, self.best))
    }

    /// Error budget a run is judged against: `nu + eps`.
    pub fn error_target(&self, eps: f64) -> f64 {
        self.nu + eps
    }
}

/// Error statistics of one side of the pairs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SideStats {
    pub completed: u64,
    pub mean_error: f64,
    pub max_error: f64,
    /// Runs whose returned hypothesis has error at most `nu + epsilon`.
    pub within_target: u64,
    /// Runs that kept a hypothesis with the best hypothesis's signature.
    pub best_survived: u64,
}

/// How often the exact disagreement mass at least halved between two
/// consecutive loop checks.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct HalvingStats {
    pub transitions: u64,
    pub halved: u64,
    pub frequency: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicabilityReport {
    pub algorithm: Algorithm,
    pub epsilon: f64,
    pub delta: f64,
    pub rho: Option<f64>,
    pub nu: f64,
    pub pairs: u64,
    pub agreements: u64,
    pub agreement_rate: f64,
    /// Wilson 95% interval of the agreement rate.
    pub agreement_low: f64,
    pub agreement_high: f64,
    /// Failed runs by error category; every failed run counts once.
    pub failures: BTreeMap<String, u64>,
    pub sides: [SideStats; 2],
    pub labels_mean: f64,
    pub labels_max: u64,
    pub unlabeled_mean: f64,
    pub unlabeled_max: u64,
    pub halving: HalvingStats,
    pub records: Vec<TrialRecord>,
}

/// Wilson score interval at 95% confidence.
pub fn wilson_interval(successes: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054_f64;
    let n = n as f64;
    let p = successes as f64 / n;
    let denom = 1.0 + z * z / n;
    let center = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Halving counts over the consecutive loop checks of one run.
pub fn halving_transitions(result: &RunResult) -> (u64, u64) {
    let masses: Vec<f64> = result.trace.iter().map(|r| r.disagreement_mass).collect();
    let halved = masses
        .windows(2)
        .filter(|w| w[1] <= w[0] / 2.0 + crate::hypothesis::PROB_TOLERANCE)
        .count();
    (masses.len().saturating_sub(1) as u64, halved as u64)
}

/// Runs the configured pairs and aggregates them.
pub fn run_paired_trials(cfg: &ExperimentConfig) -> Result<ReplicabilityReport> {
    let exp = Experiment::new(cfg.clone())?;
    let outcomes = exp.run_pairs();
    Ok(aggregate(&exp, &outcomes))
}

/// Aggregates pair outcomes. Every statistic is a sum, maximum or ratio of
/// sums, so the result does not depend on the order of `outcomes` except for
/// the order of `records`, which follows it.
pub fn aggregate(exp: &Experiment, outcomes: &[PairOutcome]) -> ReplicabilityReport {
    let cfg = &exp.config;
    let mut failures = BTreeMap::new();
    let mut sides: [SideStats; 2] = Default::default();
    let mut error_sums = [0.0; 2];
    let (mut label_sum, mut unlabeled_sum, mut runs) = (0u64, 0u64, 0u64);
    let (mut labels_max, mut unlabeled_max) = (0, 0);
    let mut halving = HalvingStats::default();
    let mut agreements = 0;
    let mut records = Vec::with_capacity(2 * outcomes.len());
    let target = exp.error_target(cfg.epsilon);

    for outcome in outcomes {
        let agreed = outcome.agreed();
        agreements += agreed as u64;
        for (side, res) in outcome.sides.iter().enumerate() {
            let mut record = TrialRecord {
                trial: outcome.index,
                algo: cfg.algorithm.name().to_string(),
                epsilon: cfg.epsilon,
                delta: cfg.delta,
                rho: cfg.rho,
                nu: exp.nu,
                theta: None,
                labels_used: None,
                unlabeled_used: None,
                rounds: None,
                err_final: None,
                signature_hash: String::new(),
                b_seed: outcome.seeds.b.to_hex(),
                data_seed: outcome.seeds.data[side].to_hex(),
                agreed,
            };
            match res {
                Ok(r) => {
                    let err = true_error(&exp.class, &exp.model, r.hypothesis)
                        .expect("learners return indices of the class");
                    let stats = &mut sides[side];
                    stats.completed += 1;
                    error_sums[side] += err;
                    stats.max_error = stats.max_error.max(err);
                    stats.within_target += (err <= target + crate::hypothesis::PROB_TOLERANCE) as u64;
                    stats.best_survived += exp.best_survived(r) as u64;
                    runs += 1;
                    label_sum += r.labels_used;
                    unlabeled_sum += r.unlabeled_used;
                    labels_max = labels_max.max(r.labels_used);
                    unlabeled_max = unlabeled_max.max(r.unlabeled_used);
                    let (t, h) = halving_transitions(r);
                    halving.transitions += t;
                    halving.halved += h;
                    record.theta = Some(r.theta);
                    record.labels_used = Some(r.labels_used);
                    record.unlabeled_used = Some(r.unlabeled_used);
                    record.rounds = Some(r.rounds as u64);
                    record.err_final = Some(err);
                    record.signature_hash = signature_hash(&r.signature);
                }
                Err(e) => *failures.entry(e.category().to_string()).or_insert(0) += 1,
            }
            records.push(record);
        }
    }
    for (stats, sum) in sides.iter_mut().zip(error_sums) {
        if stats.completed > 0 {
            stats.mean_error = sum / stats.completed as f64;
        }
    }
    if halving.transitions > 0 {
        halving.frequency = halving.halved as f64 / halving.transitions as f64;
    }
    let pairs = outcomes.len() as u64;
    let (agreement_low, agreement_high) = wilson_interval(agreements, pairs);
    let mean = |sum: u64| if runs > 0 { sum as f64 / runs as f64 } else { 0.0 };
    ReplicabilityReport {
        algorithm: cfg.algorithm,
        epsilon: cfg.epsilon,
        delta: cfg.delta,
        rho: cfg.rho,
        nu: exp.nu,
        pairs,
        agreements,
        agreement_rate: if pairs > 0 { agreements as f64 / pairs as f64 } else { 0.0 },
        agreement_low,
        agreement_high,
        failures,
        sides,
        labels_mean: mean(label_sum),
        labels_max,
        unlabeled_mean: mean(unlabeled_sum),
        unlabeled_max,
        halving,
        records,
    }
}
