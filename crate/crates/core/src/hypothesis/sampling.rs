//! Labeled and unlabeled draws from a data model.
//!
//! The per-point samplers return explicit samples. The learners use the
//! aggregated samplers, which draw per-point counts from the same
//! multinomial/binomial laws directly and therefore cost `O(|X|)` per call
//! instead of `O(k)`.

use rand::distr::{weighted::WeightedIndex, Distribution};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Gamma, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::class::HypothesisClass;
use super::geometry::disagreement_region;
use super::model::DataModel;
use super::version_space::VersionSpace;

/// Per-run data randomness. Never derived from the shared random string.
pub type DataRng = ChaCha8Rng;

/// Label and unlabeled-point consumption of a single run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counters {
    pub labels: u64,
    pub unlabeled: u64,
}

/// Labeled points drawn from the data model conditioned on a region.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSample {
    pub points: Vec<usize>,
    pub labels: Vec<u8>,
    /// Round that produced the sample.
    pub round: usize,
}

impl LabeledSample {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Collapses the sample into per-point label counts.
    pub fn counts(&self, domain_size: usize) -> LabelCounts {
        let mut counts = LabelCounts::new(domain_size);
        for (&x, &y) in self.points.iter().zip(&self.labels) {
            if y == 1 {
                counts.ones[x] += 1;
            } else {
                counts.zeros[x] += 1;
            }
        }
        counts.total = self.points.len() as u64;
        counts
    }
}

/// Number of 0- and 1-labels observed at each domain point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelCounts {
    pub zeros: Vec<u64>,
    pub ones: Vec<u64>,
    pub total: u64,
}

impl LabelCounts {
    pub fn new(domain_size: usize) -> Self {
        LabelCounts {
            zeros: vec![0; domain_size],
            ones: vec![0; domain_size],
            total: 0,
        }
    }

    /// Number of observed labels that `h` gets wrong.
    pub fn mistakes(&self, class: &HypothesisClass, h: usize) -> u64 {
        (0..class.domain_size())
            .map(|x| {
                if class.predict(h, x) == 1 {
                    self.zeros[x]
                } else {
                    self.ones[x]
                }
            })
            .sum()
    }

    /// Fraction of observed labels that `h` gets wrong.
    pub fn error(&self, class: &HypothesisClass, h: usize) -> Result<f64> {
        if self.total == 0 {
            return Err(Error::Precondition("empirical error of an empty sample".into()));
        }
        Ok(self.mistakes(class, h) as f64 / self.total as f64)
    }

    /// True when `h` agrees with every observed label.
    pub fn consistent(&self, class: &HypothesisClass, h: usize) -> bool {
        self.mistakes(class, h) == 0
    }
}

/// Fraction of sample points mislabeled by `h`.
pub fn conditional_empirical_error(
    class: &HypothesisClass,
    sample: &LabeledSample,
    h: usize,
) -> Result<f64> {
    class.check_index(h)?;
    if sample.is_empty() {
        return Err(Error::Precondition("empirical error of an empty sample".into()));
    }
    let wrong = sample
        .points
        .iter()
        .zip(&sample.labels)
        .filter(|(&x, &y)| class.predict(h, x) != y)
        .count();
    Ok(wrong as f64 / sample.len() as f64)
}

fn region_and_mass(
    class: &HypothesisClass,
    model: &DataModel,
    vs: &VersionSpace,
) -> Result<(Vec<usize>, f64)> {
    let region = disagreement_region(class, vs)?;
    let mass: f64 = region.iter().map(|&x| model.weight(x)).sum();
    if mass <= 0.0 {
        return Err(Error::ZeroMassRegion);
    }
    Ok((region, mass))
}

/// Number of draws from the full distribution rejected before `accepted`
/// draws land in a region of mass `mass` (negative binomial, drawn as a
/// gamma-Poisson mixture).
fn rejected_draws(accepted: u64, mass: f64, rng: &mut DataRng) -> u64 {
    if accepted == 0 || mass >= 1.0 {
        return 0;
    }
    let shape = accepted as f64;
    let scale = (1.0 - mass) / mass;
    let lambda = Gamma::new(shape, scale).expect("valid gamma").sample(rng);
    if lambda <= 0.0 {
        return 0;
    }
    Poisson::new(lambda).map(|p| p.sample(rng) as u64).unwrap_or(0)
}

fn draw_label(class: &HypothesisClass, model: &DataModel, x: usize, rng: &mut DataRng) -> u8 {
    let p1 = model.prob_one(class, x);
    if p1 >= 1.0 {
        1
    } else if p1 <= 0.0 {
        0
    } else {
        u8::from(rng.random::<f64>() < p1)
    }
}

/// Draws `k` labeled points from the data model conditioned on the
/// disagreement region of `vs`.
///
/// With `stream_accounting` the unlabeled counter is also charged for the
/// draws a rejection sampler over the full distribution would have discarded.
#[allow(clippy::too_many_arguments)]
pub fn sample_labeled(
    class: &HypothesisClass,
    model: &DataModel,
    vs: &VersionSpace,
    k: usize,
    round: usize,
    rng: &mut DataRng,
    counters: &mut Counters,
    stream_accounting: bool,
) -> Result<LabeledSample> {
    let (region, mass) = region_and_mass(class, model, vs)?;
    let mut sample = LabeledSample {
        points: Vec::with_capacity(k),
        labels: Vec::with_capacity(k),
        round,
    };
    if k == 0 {
        return Ok(sample);
    }
    let weights: Vec<f64> = region.iter().map(|&x| model.weight(x)).collect();
    let picker = WeightedIndex::new(&weights).map_err(|e| Error::Input(e.to_string()))?;
    for _ in 0..k {
        let x = region[picker.sample(rng)];
        sample.points.push(x);
        sample.labels.push(draw_label(class, model, x, rng));
    }
    counters.labels += k as u64;
    if stream_accounting {
        counters.unlabeled += rejected_draws(k as u64, mass, rng);
    }
    Ok(sample)
}

/// Same law as [`sample_labeled`], returned as per-point label counts.
#[allow(clippy::too_many_arguments)]
pub fn sample_labeled_counts(
    class: &HypothesisClass,
    model: &DataModel,
    vs: &VersionSpace,
    k: u64,
    rng: &mut DataRng,
    counters: &mut Counters,
    stream_accounting: bool,
) -> Result<LabelCounts> {
    let (region, mass) = region_and_mass(class, model, vs)?;
    let counts = draw_counts(class, model, &region, mass, k, rng);
    counters.labels += k;
    if stream_accounting {
        counters.unlabeled += rejected_draws(k, mass, rng);
    }
    Ok(counts)
}

/// Draws `k` labeled points from the unconditioned data model, as counts.
pub fn sample_labeled_counts_full(
    class: &HypothesisClass,
    model: &DataModel,
    k: u64,
    rng: &mut DataRng,
    counters: &mut Counters,
) -> LabelCounts {
    let support: Vec<usize> = (0..class.domain_size()).collect();
    let counts = draw_counts(class, model, &support, 1.0, k, rng);
    counters.labels += k;
    counts
}

fn draw_counts(
    class: &HypothesisClass,
    model: &DataModel,
    region: &[usize],
    mass: f64,
    k: u64,
    rng: &mut DataRng,
) -> LabelCounts {
    let mut counts = LabelCounts::new(class.domain_size());
    let support: Vec<usize> = region
        .iter()
        .copied()
        .filter(|&x| model.weight(x) > 0.0)
        .collect();
    // Multinomial by sequential conditional binomials.
    let mut remaining = k;
    let mut remaining_mass = mass;
    for (i, &x) in support.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        let w = model.weight(x);
        let hits = if i + 1 == support.len() {
            remaining
        } else {
            binomial(remaining, (w / remaining_mass).clamp(0.0, 1.0), rng)
        };
        remaining -= hits;
        remaining_mass -= w;
        let ones = binomial(hits, model.prob_one(class, x), rng);
        counts.ones[x] += ones;
        counts.zeros[x] += hits - ones;
    }
    counts.total = k;
    counts
}

fn binomial(n: u64, p: f64, rng: &mut DataRng) -> u64 {
    if n == 0 || p <= 0.0 {
        0
    } else if p >= 1.0 {
        n
    } else {
        Binomial::new(n, p).expect("valid binomial").sample(rng)
    }
}

/// Draws `m` unlabeled points from the data model.
pub fn sample_unlabeled(
    model: &DataModel,
    m: usize,
    rng: &mut DataRng,
    counters: &mut Counters,
) -> Result<Vec<usize>> {
    if m == 0 {
        return Ok(Vec::new());
    }
    let picker = WeightedIndex::new(model.weights()).map_err(|e| Error::Input(e.to_string()))?;
    counters.unlabeled += m as u64;
    Ok((0..m).map(|_| picker.sample(rng)).collect())
}

/// Draws `m` unlabeled points and returns how many fall in a region of mass
/// `mass`; equivalent to summing the region indicator over the points.
pub fn sample_region_hits(mass: f64, m: u64, rng: &mut DataRng, counters: &mut Counters) -> u64 {
    counters.unlabeled += m;
    binomial(m, mass.clamp(0.0, 1.0), rng)
}
