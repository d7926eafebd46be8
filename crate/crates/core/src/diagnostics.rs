//! Interval profiles of a threshold grid, the bad-threshold test, and
//! survivor-set comparisons between paired runs.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypothesis::{conditional_true_error, DataModel, HypothesisClass, VersionSpace};
use crate::replicable::{GridPosition, ThresholdGrid};
use crate::run::RunResult;

/// Distribution of reference errors over the intervals of a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalProfile {
    pub grid: ThresholdGrid,
    /// Hypotheses whose reference error lies below `v_init`.
    pub below: usize,
    /// Hypotheses whose reference error lies beyond the last interval.
    pub above: usize,
    /// `counts[i]` is the number of hypotheses in interval `i`, for
    /// `i in 0..=grid.count`.
    pub counts: Vec<usize>,
    /// `cumulative[i] = below + counts[0] + ... + counts[i]`.
    pub cumulative: Vec<usize>,
    pub reference_errors: Vec<f64>,
}

impl IntervalProfile {
    pub fn from_errors(grid: ThresholdGrid, reference_errors: Vec<f64>) -> Self {
        let mut counts = vec![0; grid.intervals()];
        let (mut below, mut above) = (0, 0);
        for &e in &reference_errors {
            match grid.position(e) {
                GridPosition::Below => below += 1,
                GridPosition::Above => above += 1,
                GridPosition::Interval(i) => counts[i] += 1,
            }
        }
        let cumulative = counts
            .iter()
            .scan(below, |acc, &c| {
                *acc += c;
                Some(*acc)
            })
            .collect();
        IntervalProfile {
            grid,
            below,
            above,
            counts,
            cumulative,
            reference_errors,
        }
    }

    /// Number of hypotheses in intervals `0..=i` plus those below the grid.
    pub fn cumulative_through(&self, i: usize) -> usize {
        self.cumulative[i]
    }

    pub fn total(&self) -> usize {
        self.reference_errors.len()
    }
}

/// Profiles the last elimination step of a replicable run: the reference
/// error of each member of that step's version space is its exact
/// conditional error on the step's disagreement region, minus the slack
/// added to the threshold in the agnostic case.
pub fn profile_run(class: &HypothesisClass, model: &DataModel, result: &RunResult) -> Result<IntervalProfile> {
    let grid = result
        .grid
        .ok_or_else(|| Error::Input(format!("{} runs have no threshold grid", result.algorithm)))?;
    let sigma = result.last_sigma.unwrap_or(0.0);
    if result.last_round_members.is_empty() {
        return Ok(IntervalProfile::from_errors(grid, Vec::new()));
    }
    let vs = VersionSpace::from_indices(class.len(), result.last_round_members.iter().copied())?;
    let errors = vs
        .iter()
        .map(|h| conditional_true_error(class, model, &vs, h).map(|e| e - sigma))
        .collect::<Result<Vec<_>>>()?;
    Ok(IntervalProfile::from_errors(grid, errors))
}

/// Outcome of the bad-threshold test for one interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdFlag {
    /// Interval index in `1..=grid.count`; its midpoint is threshold
    /// `interval - 1` of the grid.
    pub interval: usize,
    /// The interval holds more than `rho/30` times everything before it.
    pub crowded: bool,
    /// Some later interval `interval + j` holds at least `e^j` times
    /// everything before `interval`.
    pub steep: bool,
}

impl ThresholdFlag {
    pub fn bad(&self) -> bool {
        self.crowded || self.steep
    }
}

pub fn classify_thresholds(profile: &IntervalProfile, rho: f64) -> Vec<ThresholdFlag> {
    let m = profile.grid.count;
    (1..=m)
        .map(|i| {
            let before = profile.cumulative_through(i - 1) as f64;
            let crowded = profile.counts[i] as f64 > rho / 30.0 * before;
            // No interval holds more than the total, so larger j cannot fire.
            let total = profile.total() as f64;
            let steep = (1..=m - i)
                .map(|j| (j, (j as f64).exp() * before))
                .take_while(|&(_, bound)| bound <= total)
                .any(|(j, bound)| profile.counts[i + j] as f64 >= bound);
            ThresholdFlag {
                interval: i,
                crowded,
                steep,
            }
        })
        .collect()
}

/// Fraction of the selectable intervals flagged bad.
pub fn bad_fraction(profile: &IntervalProfile, rho: f64) -> f64 {
    let flags = classify_thresholds(profile, rho);
    if flags.is_empty() {
        return 0.0;
    }
    flags.iter().filter(|f| f.bad()).count() as f64 / flags.len() as f64
}

/// Survivor signatures of the two sides of a paired run.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairedSets {
    pub first: BTreeSet<String>,
    pub second: BTreeSet<String>,
}

impl PairedSets {
    pub fn new(first: impl IntoIterator<Item = String>, second: impl IntoIterator<Item = String>) -> Self {
        PairedSets {
            first: first.into_iter().collect(),
            second: second.into_iter().collect(),
        }
    }

    /// Survivor signatures of two runs on the same class.
    pub fn from_runs(class: &HypothesisClass, a: &RunResult, b: &RunResult) -> Self {
        let sigs = |r: &RunResult| {
            r.survivors
                .iter()
                .map(|&h| crate::hypothesis::signature_string(class.row(h)))
                .collect::<Vec<_>>()
        };
        PairedSets::new(sigs(a), sigs(b))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Divergence {
    pub value: f64,
    /// Both sets were empty; `value` is then reported as 0.
    pub both_empty: bool,
}

/// Symmetric difference over union.
pub fn set_divergence(p: &PairedSets) -> Divergence {
    let union = p.first.union(&p.second).count();
    if union == 0 {
        return Divergence {
            value: 0.0,
            both_empty: true,
        };
    }
    let sym = p.first.symmetric_difference(&p.second).count();
    Divergence {
        value: sym as f64 / union as f64,
        both_empty: false,
    }
}
