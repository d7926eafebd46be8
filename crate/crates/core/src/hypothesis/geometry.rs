//! Exact error and disagreement quantities for a finite class under a known
//! data model.

use crate::error::{Error, Result};

use super::class::HypothesisClass;
use super::model::DataModel;
use super::version_space::VersionSpace;

/// Slack used when comparing probabilities computed as floating-point sums.
pub const PROB_TOLERANCE: f64 = 1e-12;

/// Probability over the data model that `h` mislabels a drawn point.
pub fn true_error(class: &HypothesisClass, model: &DataModel, h: usize) -> Result<f64> {
    class.check_index(h)?;
    Ok((0..class.domain_size())
        .map(|x| model.weight(x) * model.mistake_prob(class, x, class.predict(h, x)))
        .fold(0.0, |acc, p| acc + p))
}

/// Error of `h` under the data model conditioned on the disagreement region
/// of `vs`. Returns `ZeroMassRegion` when that region has no mass.
pub fn conditional_true_error(
    class: &HypothesisClass,
    model: &DataModel,
    vs: &VersionSpace,
    h: usize,
) -> Result<f64> {
    class.check_index(h)?;
    let region = disagreement_region(class, vs)?;
    let mass: f64 = region.iter().map(|&x| model.weight(x)).sum();
    if mass <= 0.0 {
        return Err(Error::ZeroMassRegion);
    }
    let err: f64 = region
        .iter()
        .map(|&x| model.weight(x) * model.mistake_prob(class, x, class.predict(h, x)))
        .sum();
    Ok(err / mass)
}

/// Domain points on which at least two members of `vs` disagree, in
/// increasing order.
pub fn disagreement_region(class: &HypothesisClass, vs: &VersionSpace) -> Result<Vec<usize>> {
    let members = vs.to_vec();
    let Some(&first) = members.first() else {
        return Err(Error::EmptyVersionSpace);
    };
    let reference = class.row(first);
    let mut split = vec![false; class.domain_size()];
    for &h in &members[1..] {
        for (x, (&a, &b)) in reference.iter().zip(class.row(h)).enumerate() {
            if a != b {
                split[x] = true;
            }
        }
    }
    Ok(split
        .iter()
        .enumerate()
        .filter_map(|(x, &s)| s.then_some(x))
        .collect())
}

/// Probability mass of the disagreement region of `vs`.
pub fn disagreement_mass(class: &HypothesisClass, model: &DataModel, vs: &VersionSpace) -> Result<f64> {
    Ok(disagreement_region(class, vs)?
        .into_iter()
        .map(|x| model.weight(x))
        .fold(0.0, |acc, p| acc + p))
}

/// Probability that `h1` and `h2` predict differently.
pub fn hypothesis_distance(
    class: &HypothesisClass,
    model: &DataModel,
    h1: usize,
    h2: usize,
) -> Result<f64> {
    class.check_index(h1)?;
    class.check_index(h2)?;
    Ok(class
        .row(h1)
        .iter()
        .zip(class.row(h2))
        .zip(model.weights())
        .filter(|((a, b), _)| a != b)
        .map(|(_, w)| w)
        .fold(0.0, |acc, p| acc + p))
}

/// All hypotheses within distance `eps` of `center`.
pub fn error_ball(
    class: &HypothesisClass,
    model: &DataModel,
    center: usize,
    eps: f64,
) -> Result<VersionSpace> {
    class.check_index(center)?;
    let mut members = Vec::new();
    for h in 0..class.len() {
        if hypothesis_distance(class, model, center, h)? <= eps + PROB_TOLERANCE {
            members.push(h);
        }
    }
    VersionSpace::from_indices(class.len(), members)
}

/// Exact disagreement coefficient at `center`: the supremum over `eps > 0` of
/// the disagreement mass of the `eps`-ball divided by `eps`.
///
/// The ball only changes at the distances of class members from the center
/// and the ratio decreases between those steps, so evaluating at each
/// distinct positive distance is exact.
pub fn disagreement_coefficient(class: &HypothesisClass, model: &DataModel, center: usize) -> Result<f64> {
    class.check_index(center)?;
    let mut by_distance = Vec::with_capacity(class.len());
    for h in 0..class.len() {
        by_distance.push((hypothesis_distance(class, model, center, h)?, h));
    }
    by_distance.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    // Incrementally grow the ball, tracking which points already see both labels.
    let reference = class.row(center);
    let mut split = vec![false; class.domain_size()];
    let mut mass = 0.0;
    let mut best: f64 = 0.0;
    let mut i = 0;
    while i < by_distance.len() {
        let step = by_distance[i].0;
        while i < by_distance.len() && by_distance[i].0 <= step + PROB_TOLERANCE {
            let h = by_distance[i].1;
            for (x, (&a, &b)) in reference.iter().zip(class.row(h)).enumerate() {
                if a != b && !split[x] {
                    split[x] = true;
                    mass += model.weight(x);
                }
            }
            i += 1;
        }
        if step > PROB_TOLERANCE {
            best = best.max(mass / step);
        }
    }
    Ok(best)
}

/// Best achievable error in the class and the lowest index attaining it.
pub fn noise_rate(class: &HypothesisClass, model: &DataModel) -> Result<(f64, usize)> {
    if let Some(target) = model.target() {
        let first = (0..class.len())
            .find(|&h| class.same_signature(h, target))
            .unwrap_or(target);
        return Ok((0.0, first));
    }
    let mut best = (f64::INFINITY, 0);
    for h in 0..class.len() {
        let e = true_error(class, model, h)?;
        if e < best.0 - PROB_TOLERANCE {
            best = (e, h);
        }
    }
    Ok(best)
}
