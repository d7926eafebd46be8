//! RepliCAL and ReplicA²: disagreement-based learners whose loop control,
//! elimination threshold and final pick are all driven by the shared random
//! string, so that two runs on independent samples usually return the same
//! hypothesis.

use serde::{Deserialize, Serialize};

use crate::baselines::{realizable_round_bound, resolve_theta};
use crate::error::{Error, Result};
use crate::hypothesis::{
    disagreement_mass, noise_rate, sample_labeled_counts, sample_region_hits, Counters, DataModel,
    DataRng, HypothesisClass, VersionSpace,
};
use crate::rstat::{required_sample_size, rstat_answer_from_sum, SqParams};
use crate::run::{check_unit, Algorithm, Constants, LearnerOptions, RoundRecord, RunResult};
use crate::shared_randomness::{labels, RandomString};

/// Which threshold range a grid covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridPhase {
    /// `[v_init, v_init + 1/(8Θ))`
    Realizable,
    /// `[v_init, v_init + 1/(32Θ))`
    AgnosticLoop,
    /// `[v_init, v_init + ε/(64Θν))`, reusing the loop grid's selected index.
    AgnosticFinal { reuse_index: usize },
}

/// A randomly offset grid of elimination thresholds.
///
/// The range `[v_init, v_init + range_top)` is cut into `count + 1`
/// intervals of width `spacing`; the selectable thresholds are the midpoints
/// of intervals `1..=count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdGrid {
    pub v_init: f64,
    pub spacing: f64,
    pub count: usize,
    pub selected_index: usize,
    pub range_top: f64,
}

/// Where a value falls relative to a grid's intervals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridPosition {
    Below,
    Interval(usize),
    Above,
}

impl ThresholdGrid {
    /// Threshold number `i` in `0..count`: the midpoint of interval `i + 1`.
    pub fn threshold(&self, i: usize) -> f64 {
        self.v_init + (i as f64 + 1.5) * self.spacing
    }

    pub fn thresholds(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.threshold(i)).collect()
    }

    pub fn selected_threshold(&self) -> f64 {
        self.threshold(self.selected_index)
    }

    /// Number of intervals, `range_top / spacing`.
    pub fn intervals(&self) -> usize {
        self.count + 1
    }

    pub fn position(&self, value: f64) -> GridPosition {
        if value < self.v_init {
            return GridPosition::Below;
        }
        let i = ((value - self.v_init) / self.spacing).floor() as usize;
        if i >= self.intervals() {
            GridPosition::Above
        } else {
            GridPosition::Interval(i)
        }
    }
}

fn range_top(theta: f64, phase: GridPhase, eps: f64, nu: f64) -> Result<f64> {
    match phase {
        GridPhase::Realizable => Ok(1.0 / (8.0 * theta)),
        GridPhase::AgnosticLoop | GridPhase::AgnosticFinal { .. } if nu <= 0.0 => Err(
            Error::Parameter("agnostic threshold grids need a positive noise rate".into()),
        ),
        GridPhase::AgnosticLoop => Ok(1.0 / (32.0 * theta)),
        GridPhase::AgnosticFinal { .. } => Ok(eps / (64.0 * theta * nu)),
    }
}

/// Number of selectable thresholds, `max(1, floor(c_grid ln|C| / rho^2))`.
pub fn threshold_count(rho: f64, class_size: usize, c_grid: f64) -> usize {
    ((c_grid * (class_size as f64).ln() / (rho * rho)).floor() as usize).max(1)
}

/// Count and spacing of a grid; deterministic, no randomness involved.
fn grid_shape(
    theta: f64,
    rho: f64,
    class_size: usize,
    phase: GridPhase,
    eps: f64,
    nu: f64,
    opts: &LearnerOptions,
) -> Result<(f64, usize, f64)> {
    if theta.is_nan() || theta <= 0.0 {
        return Err(Error::Parameter(format!("theta must be positive, got {theta}")));
    }
    let top = range_top(theta, phase, eps, nu)?;
    let forced = match phase {
        GridPhase::AgnosticFinal { .. } => None,
        _ => opts.spacing_override,
    };
    match forced {
        Some(spacing) => {
            let ratio = top / spacing;
            let intervals = ratio.round();
            if spacing.is_nan() || spacing <= 0.0 || (ratio - intervals).abs() > 1e-9 || intervals < 2.0 {
                return Err(Error::Parameter(format!(
                    "spacing {spacing} must divide the threshold range {top} into at least 2 intervals"
                )));
            }
            Ok((top, intervals as usize - 1, spacing))
        }
        None => {
            let count = threshold_count(rho, class_size, opts.constants.c_grid);
            Ok((top, count, top / (count as f64 + 1.0)))
        }
    }
}

/// Builds a threshold grid, drawing its origin and (except in the final
/// agnostic phase) its selected index from the shared random string.
#[allow(clippy::too_many_arguments)]
pub fn build_grid(
    theta: f64,
    rho: f64,
    class_size: usize,
    phase: GridPhase,
    eps: f64,
    nu: f64,
    rs: &mut RandomString,
    opts: &LearnerOptions,
) -> Result<ThresholdGrid> {
    let (top, count, spacing) = grid_shape(theta, rho, class_size, phase, eps, nu, opts)?;
    let (origin_label, selected_index) = match phase {
        GridPhase::AgnosticFinal { reuse_index } => {
            if reuse_index >= count {
                return Err(Error::Parameter(format!(
                    "reused interval index {reuse_index} outside a grid of {count} thresholds"
                )));
            }
            (labels::V_INIT_FINAL, Some(reuse_index))
        }
        _ => (labels::V_INIT, None),
    };
    let v_init = rs.derive_uniform(origin_label) * 2.0 * top;
    let selected_index = match selected_index {
        Some(i) => i,
        None => rs.derive_choice(labels::V_INDEX, count),
    };
    Ok(ThresholdGrid {
        v_init,
        spacing,
        count,
        selected_index,
        range_top: top,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Setting {
    Realizable,
    Agnostic,
}

/// Sample sizes and per-query parameters of a replicable run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleParams {
    pub setting: Setting,
    pub n_max: usize,
    /// Labels per loop round.
    pub k: u64,
    /// Labels in the final agnostic step.
    pub k_final: Option<u64>,
    /// Unlabeled points per loop-guard estimate; `None` when the agnostic
    /// loop guard can never hold.
    pub t_loop: Option<u64>,
    pub t_final: Option<u64>,
    pub loop_query: Option<SqParams>,
    pub final_query: Option<SqParams>,
    pub spacing: f64,
    pub spacing_final: Option<f64>,
}

/// Deterministic sample sizes for RepliCAL (`Setting::Realizable`) or
/// ReplicA² (`Setting::Agnostic`).
#[allow(clippy::too_many_arguments)]
pub fn size_schedule(
    theta: f64,
    eps: f64,
    delta: f64,
    rho: f64,
    nu: f64,
    class_size: usize,
    setting: Setting,
    opts: &LearnerOptions,
) -> Result<ScheduleParams> {
    check_unit("epsilon", eps)?;
    check_unit("delta", delta)?;
    check_unit("rho", rho)?;
    if rho <= 2.0 * delta {
        return Err(Error::Parameter(format!(
            "replicable learners need rho > 2 delta; got rho={rho}, delta={delta}"
        )));
    }
    let Constants {
        c_k1, c_k2, c_k3, c_t, ..
    } = opts.constants;
    if c_t < 1.0 {
        return Err(Error::Parameter(format!(
            "c_t must be at least 1 to meet the rSTAT sample requirement, got {c_t}"
        )));
    }
    let c = class_size as f64;
    let unlabeled = |q: &SqParams| -> Result<u64> {
        Ok((c_t * required_sample_size(q)? as f64).ceil() as u64)
    };
    match setting {
        Setting::Realizable => {
            let (_, _, spacing) =
                grid_shape(theta, rho, class_size, GridPhase::Realizable, eps, 0.0, opts)?;
            let n = realizable_round_bound(eps);
            let nf = n as f64;
            let k_err = (c_k1 * theta * (c * nf / delta).ln()).ceil();
            let k_rep = (c_k2 * (nf / rho).ln() / (theta * spacing * spacing)).ceil();
            let query = SqParams::new(rho / (2.0 * nf), eps / 2.0, delta / (2.0 * nf))?;
            Ok(ScheduleParams {
                setting,
                n_max: n,
                k: k_err.max(k_rep).max(1.0) as u64,
                k_final: None,
                t_loop: Some(unlabeled(&query)?),
                t_final: None,
                loop_query: Some(query),
                final_query: None,
                spacing,
                spacing_final: None,
            })
        }
        Setting::Agnostic => {
            if nu.is_nan() || nu <= 0.0 {
                return Err(Error::Parameter("ReplicA² needs a positive noise rate".into()));
            }
            let (_, _, spacing) =
                grid_shape(theta, rho, class_size, GridPhase::AgnosticLoop, eps, nu, opts)?;
            let (_, _, spacing_final) = grid_shape(
                theta,
                rho,
                class_size,
                GridPhase::AgnosticFinal { reuse_index: 0 },
                eps,
                nu,
                opts,
            )?;
            let n = (1.0 / (8.0 * theta * nu)).log2().ceil().max(0.0) as usize + 1;
            let nf = n as f64;
            let k_err = (c_k1 * theta * theta * (c * nf / delta).ln()).ceil();
            let k_rep = (c_k2 * (nf / rho).ln() / (theta * spacing * spacing)).ceil();
            let kf_err = (c_k3 * theta * theta * (nu * nu / (eps * eps)) * (c / delta).ln()).ceil();
            let kf_rep = (c_k2 * (nf / rho).ln() / (spacing_final * spacing_final)).ceil();
            let split = 2.0 * (nf + 1.0);
            let loop_query = if 16.0 * theta * nu < 1.0 {
                Some(SqParams::new(rho / split, 8.0 * theta * nu, delta / split)?)
            } else {
                None
            };
            let final_query = SqParams::new(rho / split, eps / 2.0, delta / split)?;
            Ok(ScheduleParams {
                setting,
                n_max: n,
                k: k_err.max(k_rep).max(1.0) as u64,
                k_final: Some(kf_err.max(kf_rep).max(1.0) as u64),
                t_loop: loop_query.as_ref().map(unlabeled).transpose()?,
                t_final: Some(unlabeled(&final_query)?),
                loop_query,
                final_query: Some(final_query),
                spacing,
                spacing_final: Some(spacing_final),
            })
        }
    }
}

/// Returns the survivor that comes first in a shared random order of all
/// distinct signatures of the class.
///
/// The order is drawn over the whole class rather than over the survivors,
/// so two runs whose survivor sets overlap pick the same hypothesis with
/// probability at least the size of the intersection over the size of the
/// union.
pub fn select_final(class: &HypothesisClass, survivors: &VersionSpace, rs: &mut RandomString) -> Result<usize> {
    if survivors.is_empty() {
        return Err(Error::EmptyVersionSpace);
    }
    let order = rs.derive_permutation(labels::FINAL_ORDER, class.distinct_signatures());
    let mut position = vec![0; order.len()];
    for (pos, &rank) in order.iter().enumerate() {
        position[rank] = pos;
    }
    Ok(survivors
        .iter()
        .min_by_key(|&h| (position[class.canonical_rank(h)], h))
        .expect("nonempty"))
}

fn validate_common(eps: f64, delta: f64, rho: f64) -> Result<()> {
    check_unit("epsilon", eps)?;
    check_unit("delta", delta)?;
    check_unit("rho", rho)?;
    if rho <= 2.0 * delta {
        return Err(Error::Parameter(format!(
            "replicable learners need rho > 2 delta; got rho={rho}, delta={delta}"
        )));
    }
    Ok(())
}

/// Θ as used for sizing: an exactly computed Θ of zero (every hypothesis
/// agrees with the center on the support) is replaced by 1.
fn sizing_theta(theta: f64, flags: &mut Vec<String>) -> f64 {
    if theta > 0.0 {
        theta
    } else {
        flags.push("theta_zero_sized_as_one".to_string());
        1.0
    }
}

struct Estimator<'a> {
    class: &'a HypothesisClass,
    model: &'a DataModel,
}

impl Estimator<'_> {
    /// Replicable estimate of the disagreement mass of `vs` from `t` fresh
    /// unlabeled points. Returns `(estimate, exact mass)`.
    #[allow(clippy::too_many_arguments)]
    fn estimate(
        &self,
        vs: &VersionSpace,
        query: &SqParams,
        t: u64,
        rs: &mut RandomString,
        label: &str,
        rng: &mut DataRng,
        counters: &mut Counters,
    ) -> Result<(f64, f64)> {
        let mass = disagreement_mass(self.class, self.model, vs)?;
        let hits = sample_region_hits(mass, t, rng, counters);
        let est = rstat_answer_from_sum(query, t, hits as f64, rs, label)?;
        Ok((est, mass))
    }
}

/// Keeps the members of `vs` whose empirical conditional error on a fresh
/// sample of `k` labels is at most `cutoff`.
#[allow(clippy::too_many_arguments)]
fn threshold_step(
    class: &HypothesisClass,
    model: &DataModel,
    vs: &mut VersionSpace,
    k: u64,
    cutoff: f64,
    rng: &mut DataRng,
    counters: &mut Counters,
    stream_accounting: bool,
) -> Result<()> {
    let counts = sample_labeled_counts(class, model, vs, k, rng, counters, stream_accounting)?;
    vs.retain(|h| counts.mistakes(class, h) as f64 / k as f64 <= cutoff);
    if vs.is_empty() {
        return Err(Error::EmptyVersionSpace);
    }
    Ok(())
}

/// RepliCAL for the realizable setting.
#[allow(clippy::too_many_arguments)]
pub fn run_replical(
    class: &HypothesisClass,
    model: &DataModel,
    eps: f64,
    delta: f64,
    rho: f64,
    rs: &mut RandomString,
    rng: &mut DataRng,
    opts: &LearnerOptions,
) -> Result<RunResult> {
    validate_common(eps, delta, rho)?;
    let mut flags = Vec::new();
    let (_, center) = noise_rate(class, model)?;
    let theta_exact = resolve_theta(class, model, center, opts)?;
    let theta = sizing_theta(theta_exact, &mut flags);
    let sched = size_schedule(theta, eps, delta, rho, 0.0, class.len(), Setting::Realizable, opts)?;
    let grid = build_grid(theta, rho, class.len(), GridPhase::Realizable, eps, 0.0, rs, opts)?;
    let threshold = grid.selected_threshold();
    let query = sched.loop_query.expect("realizable schedule has a loop query");
    let t = sched.t_loop.expect("realizable schedule has a loop size");
    let cap = 4 * sched.n_max;
    let est = Estimator { class, model };

    let mut counters = Counters::default();
    let mut vs = VersionSpace::full(class.len());
    let mut trace = Vec::new();
    let mut rounds = 0;
    let mut last_round_members = Vec::new();
    let final_estimate = loop {
        let label = labels::rstat_round(rounds);
        let (estimate, mass) = est.estimate(&vs, &query, t, rs, &label, rng, &mut counters)?;
        let going = estimate >= eps / 2.0;
        trace.push(RoundRecord {
            round: rounds,
            disagreement_estimate: estimate,
            disagreement_mass: mass,
            version_space_size: vs.len(),
            threshold: going.then_some(threshold),
            sigma: None,
            labels_so_far: counters.labels,
        });
        if !going {
            break estimate;
        }
        if rounds >= cap {
            return Err(Error::RoundCapExceeded { cap });
        }
        last_round_members = vs.to_vec();
        threshold_step(
            class,
            model,
            &mut vs,
            sched.k,
            threshold,
            rng,
            &mut counters,
            opts.stream_accounting,
        )?;
        rounds += 1;
    };

    let h = select_final(class, &vs, rs)?;
    Ok(RunResult {
        algorithm: Algorithm::Replical,
        hypothesis: h,
        signature: RunResult::signature_of(class, h),
        labels_used: counters.labels,
        unlabeled_used: counters.unlabeled,
        rounds,
        final_disagreement_estimate: final_estimate,
        theta: theta_exact,
        survivors: vs.to_vec(),
        last_round_members,
        grid: Some(grid),
        last_sigma: None,
        trace,
        flags,
    })
}

/// ReplicA² for the agnostic setting. The noise rate is taken exactly from
/// the data model.
#[allow(clippy::too_many_arguments)]
pub fn run_replica2(
    class: &HypothesisClass,
    model: &DataModel,
    eps: f64,
    delta: f64,
    rho: f64,
    rs: &mut RandomString,
    rng: &mut DataRng,
    opts: &LearnerOptions,
) -> Result<RunResult> {
    validate_common(eps, delta, rho)?;
    let mut flags = Vec::new();
    let (nu, center) = noise_rate(class, model)?;
    if nu <= 0.0 {
        return Err(Error::Parameter(
            "ReplicA² needs a positive noise rate; use RepliCAL for realizable data".into(),
        ));
    }
    let theta_exact = resolve_theta(class, model, center, opts)?;
    let theta = sizing_theta(theta_exact, &mut flags);
    let sched = size_schedule(theta, eps, delta, rho, nu, class.len(), Setting::Agnostic, opts)?;
    let loop_grid = build_grid(theta, rho, class.len(), GridPhase::AgnosticLoop, eps, nu, rs, opts)?;
    let threshold = loop_grid.selected_threshold();
    let est = Estimator { class, model };
    let cap = 4 * sched.n_max;
    let guard = 16.0 * theta * nu;

    let mut counters = Counters::default();
    let mut vs = VersionSpace::full(class.len());
    let mut trace = Vec::new();
    let mut rounds = 0;
    let mut last_round_members = Vec::new();
    let mut last_sigma = None;

    match (sched.loop_query, sched.t_loop) {
        (Some(query), Some(t)) => loop {
            let label = labels::rstat_round(rounds);
            let (estimate, mass) = est.estimate(&vs, &query, t, rs, &label, rng, &mut counters)?;
            let going = estimate >= guard;
            let sigma = 2.0 * nu / estimate + 1.0 / (16.0 * theta);
            trace.push(RoundRecord {
                round: rounds,
                disagreement_estimate: estimate,
                disagreement_mass: mass,
                version_space_size: vs.len(),
                threshold: going.then_some(threshold),
                sigma: going.then_some(sigma),
                labels_so_far: counters.labels,
            });
            if !going {
                break;
            }
            if rounds >= cap {
                return Err(Error::RoundCapExceeded { cap });
            }
            last_round_members = vs.to_vec();
            last_sigma = Some(sigma);
            threshold_step(
                class,
                model,
                &mut vs,
                sched.k,
                threshold + sigma,
                rng,
                &mut counters,
                opts.stream_accounting,
            )?;
            rounds += 1;
        },
        _ => flags.push("loop_guard_unsatisfiable".to_string()),
    }

    let final_grid = build_grid(
        theta,
        rho,
        class.len(),
        GridPhase::AgnosticFinal {
            reuse_index: loop_grid.selected_index,
        },
        eps,
        nu,
        rs,
        opts,
    )?;
    let final_threshold = final_grid.selected_threshold();
    let final_query = sched.final_query.expect("agnostic schedule has a final query");
    let t_final = sched.t_final.expect("agnostic schedule has a final size");
    let (estimate, mass) = est.estimate(
        &vs,
        &final_query,
        t_final,
        rs,
        labels::RSTAT_FINAL,
        rng,
        &mut counters,
    )?;
    let sigma = 2.0 * nu / estimate + eps / (16.0 * theta * nu);
    trace.push(RoundRecord {
        round: rounds,
        disagreement_estimate: estimate,
        disagreement_mass: mass,
        version_space_size: vs.len(),
        threshold: Some(final_threshold),
        sigma: Some(sigma),
        labels_so_far: counters.labels,
    });
    if mass > 0.0 {
        last_round_members = vs.to_vec();
        last_sigma = Some(sigma);
        threshold_step(
            class,
            model,
            &mut vs,
            sched.k_final.expect("agnostic schedule has a final sample"),
            final_threshold + sigma,
            rng,
            &mut counters,
            opts.stream_accounting,
        )?;
        rounds += 1;
    }

    let h = select_final(class, &vs, rs)?;
    Ok(RunResult {
        algorithm: Algorithm::Replica2,
        hypothesis: h,
        signature: RunResult::signature_of(class, h),
        labels_used: counters.labels,
        unlabeled_used: counters.unlabeled,
        rounds,
        final_disagreement_estimate: estimate,
        theta: theta_exact,
        survivors: vs.to_vec(),
        last_round_members,
        grid: Some(final_grid),
        last_sigma,
        trace,
        flags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypothesis::DataModel;
    use crate::shared_randomness::Seed;
    use rand::SeedableRng;

    fn rs(v: u64) -> RandomString {
        RandomString::new(Seed::from_u64(v))
    }

    #[test]
    fn forced_spacing_grid() {
        let opts = LearnerOptions {
            spacing_override: Some(1.0 / 64.0),
            ..Default::default()
        };
        let g = build_grid(2.0, 0.3, 129, GridPhase::Realizable, 0.05, 0.0, &mut rs(1), &opts).unwrap();
        assert_eq!(g.count, 3);
        let tau = 1.0 / 64.0;
        for (i, m) in [1.5, 2.5, 3.5].into_iter().enumerate() {
            assert!((g.threshold(i) - (g.v_init + m * tau)).abs() < 1e-15);
        }
        assert!(g.v_init >= 0.0 && g.v_init < 0.125);
        let bad = LearnerOptions {
            spacing_override: Some(0.05),
            ..Default::default()
        };
        assert!(build_grid(2.0, 0.3, 129, GridPhase::Realizable, 0.05, 0.0, &mut rs(1), &bad).is_err());
    }

    #[test]
    fn grids_are_b_determined() {
        let opts = LearnerOptions::default();
        let a = build_grid(2.0, 0.3, 129, GridPhase::AgnosticLoop, 0.1, 0.05, &mut rs(9), &opts).unwrap();
        let b = build_grid(2.0, 0.3, 129, GridPhase::AgnosticLoop, 0.1, 0.05, &mut rs(9), &opts).unwrap();
        assert_eq!(a, b);
        let c = build_grid(2.0, 0.3, 129, GridPhase::AgnosticLoop, 0.1, 0.05, &mut rs(10), &opts).unwrap();
        assert_ne!(a.v_init, c.v_init);
    }

    #[test]
    fn single_threshold_grid() {
        // ln 2 / 0.9^2 < 1, clamped to one threshold.
        assert_eq!(threshold_count(0.9, 2, 1.0), 1);
        let g = build_grid(1.0, 0.9, 2, GridPhase::Realizable, 0.1, 0.0, &mut rs(3), &LearnerOptions::default())
            .unwrap();
        assert_eq!((g.count, g.selected_index), (1, 0));
    }

    #[test]
    fn final_grid_reuses_index_and_needs_noise() {
        let opts = LearnerOptions::default();
        let f = build_grid(2.0, 0.3, 129, GridPhase::AgnosticFinal { reuse_index: 7 }, 0.1, 0.05, &mut rs(2), &opts)
            .unwrap();
        assert_eq!(f.selected_index, 7);
        assert!((f.range_top - 0.1 / (64.0 * 2.0 * 0.05)).abs() < 1e-15);
        assert!(matches!(
            build_grid(2.0, 0.3, 129, GridPhase::AgnosticLoop, 0.1, 0.0, &mut rs(2), &opts),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn realizable_schedule_hand_values() {
        // Closed forms evaluated separately for theta=2, eps=0.05,
        // delta=0.02, rho=0.1, |C|=129.
        let s = size_schedule(2.0, 0.05, 0.02, 0.1, 0.0, 129, Setting::Realizable, &LearnerOptions::default())
            .unwrap();
        assert_eq!(s.n_max, 6);
        assert!((s.spacing - 0.000_128_600_823_045_267_5).abs() < 1e-18);
        assert_eq!(s.k, 123_784_680);
        assert_eq!(s.t_loop, Some(458_313_912));
        // delta = rho = 0.1 leaves no rSTAT margin.
        assert!(size_schedule(2.0, 0.05, 0.1, 0.1, 0.0, 129, Setting::Realizable, &LearnerOptions::default())
            .is_err());
    }

    #[test]
    fn agnostic_schedule_hand_values() {
        let s = size_schedule(2.0, 0.1, 0.02, 0.3, 0.01, 129, Setting::Agnostic, &LearnerOptions::default())
            .unwrap();
        assert_eq!(s.n_max, 4);
        assert_eq!(s.k, 15_468_993);
        assert_eq!(s.k_final, Some(1_237_520));
        assert_eq!(s.t_loop, Some(420_190));
        assert_eq!(s.t_final, Some(4_302_740));
        // 16 theta nu >= 1: no loop query.
        let noisy = size_schedule(2.0, 0.1, 0.02, 0.3, 0.05, 129, Setting::Agnostic, &LearnerOptions::default())
            .unwrap();
        assert!(noisy.loop_query.is_none() && noisy.t_loop.is_none());
    }

    #[test]
    fn halving_eps_adds_one_round() {
        let opts = LearnerOptions::default();
        for eps in [0.3, 0.1, 0.05, 0.01] {
            let a = size_schedule(2.0, eps, 0.02, 0.1, 0.0, 129, Setting::Realizable, &opts).unwrap();
            let b = size_schedule(2.0, eps / 2.0, 0.02, 0.1, 0.0, 129, Setting::Realizable, &opts).unwrap();
            assert_eq!(b.n_max, a.n_max + 1);
            assert_eq!(a, size_schedule(2.0, eps, 0.02, 0.1, 0.0, 129, Setting::Realizable, &opts).unwrap());
        }
    }

    #[test]
    fn singleton_class_needs_no_labels() {
        let c = HypothesisClass::from_rows(vec![vec![1, 0, 1]]).unwrap();
        let m = DataModel::realizable(&c, DataModel::uniform_weights(3), 0).unwrap();
        let mut rng = DataRng::seed_from_u64(4);
        let r = run_replical(&c, &m, 0.05, 0.05, 0.3, &mut rs(4), &mut rng, &LearnerOptions::default()).unwrap();
        assert_eq!((r.labels_used, r.rounds, r.hypothesis), (0, 0, 0));
    }

    #[test]
    fn replicable_learners_check_their_setting() {
        let c = HypothesisClass::thresholds(16).unwrap();
        let m = DataModel::realizable(&c, DataModel::uniform_weights(16), 8).unwrap();
        let mut rng = DataRng::seed_from_u64(0);
        let opts = LearnerOptions::default();
        assert!(matches!(
            run_replica2(&c, &m, 0.1, 0.05, 0.3, &mut rs(0), &mut rng, &opts),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            run_replical(&c, &m, 0.1, 0.2, 0.3, &mut rs(0), &mut rng, &opts),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn agnostic_trace_slack_dominates_noise_term() {
        let c = HypothesisClass::thresholds(64).unwrap();
        let m = DataModel::constant_noise(&c, DataModel::uniform_weights(64), 32, 0.01).unwrap();
        let opts = LearnerOptions::default();
        for seed in 0..5 {
            let mut rng = DataRng::seed_from_u64(seed);
            let r = run_replica2(&c, &m, 0.1, 0.05, 0.3, &mut rs(seed), &mut rng, &opts).unwrap();
            assert!(r.rounds >= 1);
            for rec in &r.trace {
                if let Some(sigma) = rec.sigma {
                    assert!(sigma >= 2.0 * 0.01 / rec.disagreement_estimate - 1e-12);
                }
            }
            assert!(r.survivors.contains(&32));
        }
    }

    #[test]
    fn final_pick_uses_global_order() {
        let c = HypothesisClass::thresholds(8).unwrap();
        let all = VersionSpace::full(c.len());
        let first = select_final(&c, &all, &mut rs(5)).unwrap();
        // Removing anything but the winner does not change the pick.
        let mut fewer = all.clone();
        fewer.retain(|h| h == first || h % 2 == 0);
        assert_eq!(select_final(&c, &fewer, &mut rs(5)).unwrap(), first);
        let mut empty = all;
        empty.retain(|_| false);
        assert!(matches!(select_final(&c, &empty, &mut rs(5)), Err(Error::EmptyVersionSpace)));
    }
}
