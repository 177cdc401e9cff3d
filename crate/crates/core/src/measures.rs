//! Summaries of random fields: excursion sets, upcrossings, Euler
//! characteristics, excursion probabilities and CVaR.
//!
//! A point is in the excursion set when its value is `>= u`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grf::FieldEnsemble;
use crate::grid::GridDomain;
use crate::par;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExcursionMask {
    domain: GridDomain,
    active: Vec<bool>,
    threshold: f64,
}

impl ExcursionMask {
    /// Build a mask directly, e.g. for tests on hand-drawn shapes.
    pub fn from_active(domain: GridDomain, active: Vec<bool>, threshold: f64) -> Result<Self> {
        if active.len() != domain.len() {
            return Err(Error::input(format!(
                "mask has {} entries for {} grid points",
                active.len(),
                domain.len()
            )));
        }
        Ok(ExcursionMask { domain, active, threshold })
    }

    pub fn domain(&self) -> &GridDomain {
        &self.domain
    }

    pub fn active(&self) -> &[bool] {
        &self.active
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn count(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }
}

pub fn excursion_mask(sample: &[f64], domain: &GridDomain, u: f64) -> Result<ExcursionMask> {
    let active = sample.iter().map(|&v| v >= u).collect();
    ExcursionMask::from_active(domain.clone(), active, u)
}

/// Indices i with sample[i] < u <= sample[i+1].
pub fn count_upcrossings(sample: &[f64], u: f64) -> Result<usize> {
    if sample.len() < 2 {
        return Err(Error::input("upcrossings need at least 2 points"));
    }
    Ok(sample.windows(2).filter(|w| w[0] < u && w[1] >= u).count())
}

/// Rice's formula for the expected number of upcrossings per unit length of
/// a stationary Gaussian process with variance `sigma2` and second spectral
/// moment `lambda`.
pub fn rice_expected_upcrossings(sigma2: f64, lambda: f64, u: f64) -> Result<f64> {
    if !(sigma2 > 0.0) || !(lambda > 0.0) {
        return Err(Error::param(format!(
            "rice formula needs sigma2 > 0 and lambda > 0, got {sigma2}, {lambda}"
        )));
    }
    Ok(lambda.sqrt() / (2.0 * PI * sigma2.sqrt()) * (-u * u / (2.0 * sigma2)).exp())
}

/// Euler characteristic of the excursion set.
///
/// 1D: number of maximal runs. 2D: V − E + F of the cubical complex on the
/// active points with 4-neighbour edges and fully active unit cells.
pub fn euler_characteristic(mask: &ExcursionMask) -> Result<i64> {
    let a = &mask.active;
    match mask.domain.dim() {
        1 => {
            let starts = (0..a.len()).filter(|&i| a[i] && (i == 0 || !a[i - 1])).count();
            Ok(starts as i64)
        }
        2 => {
            let shape = mask.domain.shape();
            let (n0, n1) = (shape[0], shape[1]);
            let at = |i: usize, j: usize| a[i * n1 + j];
            let mut v = 0i64;
            let mut e = 0i64;
            let mut f = 0i64;
            for i in 0..n0 {
                for j in 0..n1 {
                    if !at(i, j) {
                        continue;
                    }
                    v += 1;
                    let right = j + 1 < n1 && at(i, j + 1);
                    let down = i + 1 < n0 && at(i + 1, j);
                    e += i64::from(right) + i64::from(down);
                    if right && down && at(i + 1, j + 1) {
                        f += 1;
                    }
                }
            }
            Ok(v - e + f)
        }
        d => Err(Error::Unsupported(format!("euler characteristic for {d}-dimensional domains"))),
    }
}

/// Mean Euler characteristic of the excursion sets of every sample.
pub fn mc_expected_ec(ensemble: &FieldEnsemble, u: f64) -> Result<f64> {
    let domain = ensemble.domain();
    if domain.dim() > 2 {
        return Err(Error::Unsupported(format!(
            "euler characteristic for {}-dimensional domains",
            domain.dim()
        )));
    }
    let ecs = par::map_indexed(ensemble.len(), |k| {
        excursion_mask(ensemble.sample(k), domain, u).and_then(|m| euler_characteristic(&m))
    });
    let total = ecs.into_iter().collect::<Result<Vec<_>>>()?.into_iter().sum::<i64>();
    Ok(total as f64 / ensemble.len() as f64)
}

/// max over grid points, per sample.
pub fn per_sample_max(ensemble: &FieldEnsemble) -> Vec<f64> {
    ensemble
        .samples()
        .iter()
        .map(|row| row.iter().copied().fold(f64::NEG_INFINITY, f64::max))
        .collect()
}

/// Fraction of samples whose maximum reaches `u`.
pub fn mc_excursion_probability(ensemble: &FieldEnsemble, u: f64) -> f64 {
    let hits = per_sample_max(ensemble).into_iter().filter(|&m| m >= u).count();
    hits as f64 / ensemble.len() as f64
}

/// Discrete Rockafellar–Uryasev CVaR_α of per-sample costs.
pub fn cvar_field(costs: &[f64], alpha: f64) -> Result<f64> {
    if costs.is_empty() {
        return Err(Error::input("cvar needs at least one cost"));
    }
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::param(format!("alpha must lie in [0, 1), got {alpha}")));
    }
    let mut v = costs.to_vec();
    v.sort_by(f64::total_cmp);
    let k = v.len();
    let scale = 1.0 / ((1.0 - alpha) * k as f64);
    // The objective is convex piecewise linear with kinks at the samples, so
    // the minimum sits at one of them. Scan with a running suffix sum.
    let mut suffix = v.iter().sum::<f64>();
    let mut best = f64::INFINITY;
    for (j, &f) in v.iter().enumerate() {
        // Σ_{i>=j} (v_i − f) over the sorted tail
        let tail = suffix - f * (k - j) as f64;
        best = best.min(f + scale * tail.max(0.0));
        suffix -= f;
    }
    Ok(best)
}
