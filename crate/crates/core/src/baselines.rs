//! Non-replicable reference learners: passive ERM, CAL and A².

use crate::error::{Error, Result};
use crate::hypothesis::{
    disagreement_coefficient, disagreement_mass, noise_rate, sample_labeled_counts,
    sample_labeled_counts_full, sample_region_hits, Counters, DataModel, DataRng,
    HypothesisClass, LabelCounts, VersionSpace,
};
use crate::run::{check_unit, Algorithm, LearnerOptions, RoundRecord, RunResult};

/// Disagreement coefficient at `center`, unless overridden.
pub fn resolve_theta(
    class: &HypothesisClass,
    model: &DataModel,
    center: usize,
    opts: &LearnerOptions,
) -> Result<f64> {
    match opts.theta_override {
        Some(t) if t.is_finite() && t > 0.0 => Ok(t),
        Some(t) => Err(Error::Parameter(format!("theta override must be positive, got {t}"))),
        None => disagreement_coefficient(class, model, center),
    }
}

/// Round bound `ceil(log2(2 / eps))` of the realizable learners.
pub fn realizable_round_bound(eps: f64) -> usize {
    (2.0 / eps).log2().ceil().max(1.0) as usize
}

/// Lowest-index member of `vs` with the fewest mistakes on `counts`.
fn empirical_minimizer(class: &HypothesisClass, vs: &VersionSpace, counts: &LabelCounts) -> usize {
    let mut best: Option<(u64, usize)> = None;
    for h in vs.iter() {
        let m = counts.mistakes(class, h);
        if best.is_none_or(|(bm, _)| m < bm) {
            best = Some((m, h));
        }
    }
    best.map(|(_, h)| h).expect("nonempty version space")
}

#[allow(clippy::too_many_arguments)]
fn finish(
    algorithm: Algorithm,
    class: &HypothesisClass,
    hypothesis: usize,
    counters: Counters,
    rounds: usize,
    final_estimate: f64,
    theta: f64,
    survivors: &VersionSpace,
    last_round_members: Vec<usize>,
    trace: Vec<RoundRecord>,
    flags: Vec<String>,
) -> RunResult {
    RunResult {
        algorithm,
        hypothesis,
        signature: RunResult::signature_of(class, hypothesis),
        labels_used: counters.labels,
        unlabeled_used: counters.unlabeled,
        rounds,
        final_disagreement_estimate: final_estimate,
        theta,
        survivors: survivors.to_vec(),
        last_round_members,
        grid: None,
        last_sigma: None,
        trace,
        flags,
    }
}

/// Passive empirical risk minimization on
/// `ceil(c_pass / eps * ln(|C| / delta))` labeled draws.
pub fn run_passive_erm(
    class: &HypothesisClass,
    model: &DataModel,
    eps: f64,
    delta: f64,
    rng: &mut DataRng,
    opts: &LearnerOptions,
) -> Result<RunResult> {
    check_unit("epsilon", eps)?;
    check_unit("delta", delta)?;
    let m = passive_sample_size(class.len(), eps, delta, opts.constants.c_pass);
    let mut counters = Counters::default();
    let counts = sample_labeled_counts_full(class, model, m, rng, &mut counters);
    let all = VersionSpace::full(class.len());
    let h = empirical_minimizer(class, &all, &counts);
    let trace = vec![RoundRecord {
        round: 0,
        disagreement_estimate: disagreement_mass(class, model, &all)?,
        disagreement_mass: disagreement_mass(class, model, &all)?,
        version_space_size: class.len(),
        threshold: None,
        sigma: None,
        labels_so_far: counters.labels,
    }];
    Ok(finish(
        Algorithm::Erm,
        class,
        h,
        counters,
        1,
        0.0,
        f64::NAN,
        &all,
        all.to_vec(),
        trace,
        Vec::new(),
    ))
}

pub fn passive_sample_size(class_size: usize, eps: f64, delta: f64, c_pass: f64) -> u64 {
    (c_pass / eps * (class_size as f64 / delta).ln()).ceil() as u64
}

/// Hoeffding sample size estimating a mass to within `eps / 2` with failure
/// probability `fail`.
fn mass_estimate_size(eps: f64, fail: f64) -> u64 {
    (2.0 * (2.0 / fail).ln() / (eps * eps)).ceil() as u64
}

/// CAL: sample from the disagreement region and drop every hypothesis
/// inconsistent with a queried label, until the region has mass at most `eps`.
pub fn run_cal(
    class: &HypothesisClass,
    model: &DataModel,
    eps: f64,
    delta: f64,
    rng: &mut DataRng,
    opts: &LearnerOptions,
) -> Result<RunResult> {
    check_unit("epsilon", eps)?;
    check_unit("delta", delta)?;
    let target = model
        .target()
        .ok_or_else(|| Error::WrongSetting("CAL requires a realizable model".into()))?;
    let theta = resolve_theta(class, model, target, opts)?;
    let n_max = realizable_round_bound(eps);
    let cap = 4 * n_max;
    let k = ((opts.constants.c_cal * theta * (class.len() as f64 * n_max as f64 / delta).ln()).ceil()
        as u64)
        .max(1);

    let mut counters = Counters::default();
    let mut vs = VersionSpace::full(class.len());
    let mut trace = Vec::new();
    let mut rounds = 0;
    let mut last_round_members = vs.to_vec();
    let estimate = loop {
        let mass = disagreement_mass(class, model, &vs)?;
        let estimate = if opts.stream_accounting {
            let m = mass_estimate_size(eps, delta / (2.0 * n_max as f64));
            sample_region_hits(mass, m, rng, &mut counters) as f64 / m as f64
        } else {
            mass
        };
        trace.push(RoundRecord {
            round: rounds,
            disagreement_estimate: estimate,
            disagreement_mass: mass,
            version_space_size: vs.len(),
            threshold: None,
            sigma: None,
            labels_so_far: counters.labels,
        });
        if estimate <= eps || mass <= 0.0 {
            break estimate;
        }
        if rounds >= cap {
            return Err(Error::RoundCapExceeded { cap });
        }
        let counts =
            sample_labeled_counts(class, model, &vs, k, rng, &mut counters, opts.stream_accounting)?;
        last_round_members = vs.to_vec();
        vs.retain(|h| counts.consistent(class, h));
        if vs.is_empty() {
            return Err(Error::EmptyVersionSpace);
        }
        rounds += 1;
    };
    let h = vs.first().expect("nonempty");
    Ok(finish(
        Algorithm::Cal,
        class,
        h,
        counters,
        rounds,
        estimate,
        theta,
        &vs,
        last_round_members,
        trace,
        Vec::new(),
    ))
}

/// Round bound and per-round confidence of A².
pub fn a2_round_bound(theta: f64, nu: f64, eps: f64) -> usize {
    if nu > 0.0 {
        (1.0 / (8.0 * theta * nu)).log2().ceil().max(0.0) as usize + 1
    } else {
        realizable_round_bound(eps)
    }
}

/// A²: eliminate every hypothesis whose Hoeffding lower bound exceeds the
/// smallest upper bound, until the region mass drops below `8 Θ ν`, then
/// return the empirical minimizer of a final conditional sample.
pub fn run_a2(
    class: &HypothesisClass,
    model: &DataModel,
    eps: f64,
    delta: f64,
    rng: &mut DataRng,
    opts: &LearnerOptions,
) -> Result<RunResult> {
    check_unit("epsilon", eps)?;
    check_unit("delta", delta)?;
    let (nu, best) = noise_rate(class, model)?;
    let theta = resolve_theta(class, model, best, opts)?;
    let n_max = a2_round_bound(theta, nu, eps);
    let noisy = nu > 0.0;
    let delta_round = if noisy {
        delta / n_max as f64
    } else {
        delta / (1.0 + n_max as f64)
    };
    let c = class.len() as f64;
    let k = ((opts.constants.c_a2 * theta * theta * (c * n_max as f64 / delta_round).ln()).ceil()
        as u64)
        .max(1);
    let width = ((2.0 * c / delta_round).ln() / (2.0 * k as f64)).sqrt();
    let guard = 8.0 * theta * nu;
    let cap = if noisy { 4 * n_max } else { n_max };

    let mut counters = Counters::default();
    let mut vs = VersionSpace::full(class.len());
    let mut trace = Vec::new();
    let mut flags = Vec::new();
    let mut rounds = 0;
    loop {
        let mass = disagreement_mass(class, model, &vs)?;
        trace.push(RoundRecord {
            round: rounds,
            disagreement_estimate: mass,
            disagreement_mass: mass,
            version_space_size: vs.len(),
            threshold: Some(width),
            sigma: None,
            labels_so_far: counters.labels,
        });
        if mass < guard || mass <= 0.0 {
            break;
        }
        if rounds >= cap {
            if noisy {
                return Err(Error::RoundCapExceeded { cap });
            }
            flags.push("round_cap_reached".to_string());
            break;
        }
        let counts =
            sample_labeled_counts(class, model, &vs, k, rng, &mut counters, opts.stream_accounting)?;
        let mut errs = vec![f64::NAN; class.len()];
        for h in vs.iter() {
            errs[h] = counts.mistakes(class, h) as f64 / k as f64;
        }
        let min_upper = vs.iter().map(|h| errs[h] + width).fold(f64::INFINITY, f64::min);
        vs.retain(|h| errs[h] - width <= min_upper);
        if vs.is_empty() {
            return Err(Error::EmptyVersionSpace);
        }
        rounds += 1;
    }

    let final_mass = disagreement_mass(class, model, &vs)?;
    let last_round_members = vs.to_vec();
    let h = if final_mass > 0.0 {
        let k_final = ((opts.constants.c_a2_final * theta * theta * (nu * nu / (eps * eps))
            * (c / delta).ln())
        .ceil() as u64)
            .max(1);
        let counts = sample_labeled_counts(
            class,
            model,
            &vs,
            k_final,
            rng,
            &mut counters,
            opts.stream_accounting,
        )?;
        empirical_minimizer(class, &vs, &counts)
    } else {
        vs.first().expect("nonempty")
    };
    Ok(finish(
        Algorithm::A2,
        class,
        h,
        counters,
        rounds,
        final_mass,
        theta,
        &vs,
        last_round_members,
        trace,
        flags,
    ))
}
