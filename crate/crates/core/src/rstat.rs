//! Replicable statistical queries by random-offset grid rounding.
//!
//! The empirical mean of `k` query values concentrates within
//! `r = tau * beta / (1 + beta)` of the true mean with probability `1 - delta`
//! once `k >= (1 + beta)^2 ln(2 / delta) / (2 tau^2 beta^2)`, where
//! `beta = rho - 2 delta`. The mean is then rounded to the nearest point of
//! the grid `{u + i s}` with spacing `s = 2 (tau - r)` and offset `u` drawn
//! from the shared random string. Two runs disagree only if a grid midpoint
//! falls between their means, which happens with probability at most
//! `2 r / s = beta` on the concentration event, so the total disagreement
//! probability is at most `2 delta + beta = rho`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::shared_randomness::RandomString;

/// Parameters of one replicable statistical query.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqParams {
    pub rho: f64,
    pub tau: f64,
    pub delta: f64,
}

impl SqParams {
    pub fn new(rho: f64, tau: f64, delta: f64) -> Result<Self> {
        let p = SqParams { rho, tau, delta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let open_unit = |v: f64| v > 0.0 && v < 1.0;
        if !open_unit(self.rho) || !open_unit(self.tau) || !open_unit(self.delta) {
            return Err(Error::Parameter(format!(
                "rSTAT needs rho, tau, delta in (0, 1); got rho={}, tau={}, delta={}",
                self.rho, self.tau, self.delta
            )));
        }
        if self.beta() <= 0.0 {
            return Err(Error::Parameter(format!(
                "rSTAT margin rho - 2 delta must be positive; got rho={}, delta={}",
                self.rho, self.delta
            )));
        }
        Ok(())
    }

    /// Margin `rho - 2 delta`.
    pub fn beta(&self) -> f64 {
        self.rho - 2.0 * self.delta
    }

    /// Concentration radius of the empirical mean.
    pub fn radius(&self) -> f64 {
        let beta = self.beta();
        self.tau * beta / (1.0 + beta)
    }

    /// Spacing of the rounding grid.
    pub fn spacing(&self) -> f64 {
        2.0 * (self.tau - self.radius())
    }

    /// Unrounded sample-size requirement.
    pub fn sample_size_real(&self) -> f64 {
        let beta = self.beta();
        (1.0 + beta).powi(2) * (2.0 / self.delta).ln() / (2.0 * self.tau * self.tau * beta * beta)
    }
}

/// Number of query evaluations one call of [`rstat_answer`] needs.
pub fn required_sample_size(p: &SqParams) -> Result<u64> {
    p.validate()?;
    Ok(p.sample_size_real().ceil() as u64)
}

/// The randomly offset rounding grid `{offset + i * spacing}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OffsetGrid {
    pub offset: f64,
    pub spacing: f64,
}

impl OffsetGrid {
    /// Nearest grid point to `mean`, clamped to `[0, 1]`.
    pub fn round(&self, mean: f64) -> f64 {
        let i = ((mean - self.offset) / self.spacing).round();
        (self.offset + i * self.spacing).clamp(0.0, 1.0)
    }
}

/// Replicable estimate of the mean of a `[0, 1]`-valued query from its
/// values on a fresh sample. The grid offset is the next draw of `label`.
pub fn rstat_answer(p: &SqParams, values: &[f64], rs: &mut RandomString, label: &str) -> Result<f64> {
    if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::Input(format!("query value {v} outside [0, 1]")));
    }
    let sum: f64 = values.iter().sum();
    rstat_answer_from_sum(p, values.len() as u64, sum, rs, label)
}

/// [`rstat_answer`] given only the sample size and the sum of the values.
pub fn rstat_answer_from_sum(
    p: &SqParams,
    n: u64,
    sum: f64,
    rs: &mut RandomString,
    label: &str,
) -> Result<f64> {
    let required = required_sample_size(p)?;
    if n < required {
        return Err(Error::Precondition(format!(
            "rSTAT needs at least {required} samples, got {n}"
        )));
    }
    if !(0.0..=n as f64).contains(&sum) {
        return Err(Error::Input(format!("query sum {sum} outside [0, {n}]")));
    }
    let spacing = p.spacing();
    let grid = OffsetGrid {
        offset: rs.derive_uniform(label) * spacing,
        spacing,
    };
    Ok(grid.round(sum / n as f64))
}

/// Exact probability, over the offset `u ~ U[0, spacing)`, that the means
/// `a` and `b` round to the same clamped grid point.
///
/// Computed by splitting `[0, spacing)` at every offset where either
/// rounded value can change and checking agreement on each piece.
pub fn offset_agreement_probability(a: f64, b: f64, spacing: f64) -> f64 {
    let mut cuts = vec![0.0, spacing];
    for m in [a, b, 0.0, 1.0] {
        // Rounding of m changes where (m - u) / s crosses a half-integer;
        // clamping changes where the grid point crosses 0 or 1.
        for shift in [0.5, 0.0] {
            let base = m - shift * spacing;
            let lo = ((base - spacing) / spacing).floor() as i64 - 1;
            let hi = (base / spacing).ceil() as i64 + 1;
            for i in lo..=hi {
                let u = base - i as f64 * spacing;
                if u > 0.0 && u < spacing {
                    cuts.push(u);
                }
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut agree = 0.0;
    for w in cuts.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        let grid = OffsetGrid { offset: mid, spacing };
        if grid.round(a) == grid.round(b) {
            agree += w[1] - w[0];
        }
    }
    agree / spacing
}
