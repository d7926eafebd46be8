use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypothesis::true_error;
use crate::run::Algorithm;

use super::{Experiment, ExperimentConfig};

pub(super) const SWEEP_COLUMNS: [&str; 9] = [
    "algo",
    "epsilon",
    "trials",
    "completed",
    "mean_labels",
    "mean_unlabeled",
    "mean_rounds",
    "mean_error",
    "failures",
];

/// Mean costs of one algorithm at one accuracy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub algo: Algorithm,
    pub epsilon: f64,
    pub trials: u64,
    pub completed: u64,
    pub mean_labels: f64,
    pub mean_unlabeled: f64,
    pub mean_rounds: f64,
    pub mean_error: f64,
    pub failures: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn row(&self, algo: Algorithm, epsilon: f64) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.algo == algo && r.epsilon == epsilon)
    }
}

/// Runs `cfg.trials` independent runs of every algorithm at every accuracy.
/// Trial `t` uses the same seeds at every accuracy and for every algorithm.
pub fn label_complexity_sweep(
    cfg: &ExperimentConfig,
    eps_list: &[f64],
    algorithms: &[Algorithm],
) -> Result<SweepTable> {
    if eps_list.is_empty() || algorithms.is_empty() {
        return Err(Error::Input("sweep needs at least one epsilon and one algorithm".into()));
    }
    for &eps in eps_list {
        ExperimentConfig {
            epsilon: eps,
            ..cfg.clone()
        }
        .validate()?;
    }
    let exp = Experiment::new(cfg.clone())?;
    let seeds = |t: u64| (cfg.b_seed.derive("sweep-b", t), cfg.data_seed.derive("sweep-data", t));
    let mut rows = Vec::new();
    for &eps in eps_list {
        for &algo in algorithms {
            let run = |t: u64| {
                let (b, data) = seeds(t);
                exp.run_with(algo, eps, b, data)
            };
            let results: Vec<_> = if cfg.parallel {
                (0..cfg.trials).into_par_iter().map(run).collect()
            } else {
                (0..cfg.trials).map(run).collect()
            };
            let ok: Vec<_> = results.iter().filter_map(|r| r.as_ref().ok()).collect();
            let n = ok.len() as f64;
            let mean = |f: &dyn Fn(&crate::run::RunResult) -> f64| {
                if ok.is_empty() {
                    0.0
                } else {
                    ok.iter().map(|r| f(r)).sum::<f64>() / n
                }
            };
            rows.push(SweepRow {
                algo,
                epsilon: eps,
                trials: cfg.trials,
                completed: ok.len() as u64,
                mean_labels: mean(&|r| r.labels_used as f64),
                mean_unlabeled: mean(&|r| r.unlabeled_used as f64),
                mean_rounds: mean(&|r| r.rounds as f64),
                mean_error: mean(&|r| true_error(&exp.class, &exp.model, r.hypothesis).unwrap_or(f64::NAN)),
                failures: results.len() as u64 - ok.len() as u64,
            });
        }
    }
    Ok(SweepTable { rows })
}
