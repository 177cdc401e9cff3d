//! Gaussian random field sampling on tensor grids.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::grid::GridDomain;
use crate::kernels::{Kernel, MeanSpec};
use crate::par;
use crate::rng::{NormalStream, StreamTag};

/// Largest grid accepted by the dense sampler.
pub const MAX_SAMPLING_POINTS: usize = 20_000;

/// K sample functions evaluated on a grid; row k is sample k.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldEnsemble {
    domain: GridDomain,
    values: Vec<Vec<f64>>,
    seed: u64,
    provenance: String,
}

impl FieldEnsemble {
    pub fn new(domain: GridDomain, values: Vec<Vec<f64>>, seed: u64, provenance: impl Into<String>) -> Result<Self> {
        let n = domain.len();
        if values.is_empty() {
            return Err(Error::input("ensemble needs at least one sample"));
        }
        if let Some(k) = values.iter().position(|row| row.len() != n) {
            return Err(Error::input(format!(
                "sample {k} has {} values for {n} grid points",
                values[k].len()
            )));
        }
        if values.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Invariant("ensemble contains non-finite values".into()));
        }
        Ok(FieldEnsemble { domain, values, seed, provenance: provenance.into() })
    }

    pub fn domain(&self) -> &GridDomain {
        &self.domain
    }

    pub fn samples(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn sample(&self, k: usize) -> &[f64] {
        &self.values[k]
    }

    pub fn value(&self, k: usize, i: usize) -> f64 {
        self.values[k][i]
    }

    /// Number of samples K.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Number of grid points N.
    pub fn points(&self) -> usize {
        self.domain.len()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    /// Apply `f` to every value, e.g. to clamp a probability field.
    pub fn map_values(mut self, f: impl Fn(f64) -> f64) -> Result<Self> {
        for v in self.values.iter_mut().flatten() {
            *v = f(*v);
        }
        if self.values.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Invariant("mapping produced non-finite values".into()));
        }
        Ok(self)
    }

    /// CSV with one header row of grid coordinates (components joined by
    /// `:` on multi-dimensional grids) and one row per sample.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> = (0..self.points())
            .map(|i| {
                self.domain
                    .point(i)
                    .iter()
                    .map(|c| c.to_string())
                    .collect::<Vec<_>>()
                    .join(":")
            })
            .collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for row in &self.values {
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{v}");
            }
            out.push('\n');
        }
        out
    }
}

/// Σ evaluated on every pair of support points.
pub fn covariance_matrix(kernel: &Kernel, domain: &GridDomain) -> Result<DenseMatrix> {
    kernel.validate()?;
    let pts = domain.points();
    let n = pts.len();
    let mut m = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = kernel.eval(&pts[i], &pts[j])?;
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    Ok(m)
}

/// Default jitter ceiling: 1e-6 times the largest diagonal entry.
pub fn default_max_jitter(matrix: &DenseMatrix) -> f64 {
    let d = (0..matrix.rows().min(matrix.cols())).map(|i| matrix[(i, i)]).fold(0.0, f64::max);
    1e-6 * d
}

fn jitter_ladder(max_jitter: f64) -> Vec<f64> {
    let mut ladder = vec![0.0];
    let mut j = 1e-12;
    while j <= max_jitter * (1.0 + 1e-12) {
        ladder.push(j);
        j *= 100.0;
    }
    if max_jitter > 0.0 && *ladder.last().unwrap() < max_jitter * (1.0 - 1e-12) {
        ladder.push(max_jitter);
    }
    ladder
}

/// Cholesky of `matrix + jitter·I`, returning the failing pivot on breakdown.
fn cholesky(matrix: &DenseMatrix, jitter: f64) -> std::result::Result<DenseMatrix, usize> {
    let n = matrix.rows();
    let mut l = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let dot: f64 = {
                let (ri, rj) = (l.row(i), l.row(j));
                ri[..j].iter().zip(&rj[..j]).map(|(a, b)| a * b).sum()
            };
            if i == j {
                let d = matrix[(i, i)] + jitter - dot;
                if !(d > 0.0) || !d.is_finite() {
                    return Err(i);
                }
                l[(i, i)] = d.sqrt();
            } else {
                l[(i, j)] = (matrix[(i, j)] - dot) / l[(j, j)];
            }
        }
    }
    Ok(l)
}

/// Lower-triangular L with L·Lᵀ = matrix + jitter·I for the smallest jitter
/// on the ladder {0, 1e-12, 1e-10, ...} up to `max_jitter` that succeeds.
///
/// An all-zero matrix (degenerate field) returns a zero factor.
pub fn cholesky_with_jitter(matrix: &DenseMatrix, max_jitter: f64) -> Result<(DenseMatrix, f64)> {
    let n = matrix.rows();
    if matrix.cols() != n {
        return Err(Error::input(format!("matrix is {}x{}, expected square", n, matrix.cols())));
    }
    let scale = matrix.as_slice().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if !matrix.is_symmetric(1e-12 * scale.max(f64::MIN_POSITIVE)) {
        return Err(Error::input("matrix is not symmetric"));
    }
    if !(max_jitter >= 0.0) {
        return Err(Error::param(format!("max_jitter must be >= 0, got {max_jitter}")));
    }
    if scale == 0.0 {
        return Ok((DenseMatrix::zeros(n, n), 0.0));
    }
    let mut last = (0, 0.0);
    for jitter in jitter_ladder(max_jitter) {
        match cholesky(matrix, jitter) {
            Ok(l) => return Ok((l, jitter)),
            Err(pivot) => last = (pivot, jitter),
        }
    }
    Err(Error::NotPositiveDefinite { pivot: last.0, jitter: last.1 })
}

/// Draw `k` samples μ + L·z_k with L from [`cholesky_with_jitter`] using the
/// default jitter ceiling.
pub fn sample_field(kernel: &Kernel, mean: &MeanSpec, domain: &GridDomain, k: usize, seed: u64) -> Result<FieldEnsemble> {
    sample_field_with(kernel, mean, domain, k, seed, None)
}

pub fn sample_field_with(
    kernel: &Kernel,
    mean: &MeanSpec,
    domain: &GridDomain,
    k: usize,
    seed: u64,
    max_jitter: Option<f64>,
) -> Result<FieldEnsemble> {
    check_size(domain)?;
    let cov = covariance_matrix(kernel, domain)?;
    let mu = mean.vector(domain)?;
    let provenance = format!(
        "kernel={} mean={}",
        serde_json::to_string(kernel).unwrap_or_default(),
        serde_json::to_string(mean).unwrap_or_default()
    );
    sample_with_covariance(&cov, &mu, domain, k, seed, max_jitter, provenance)
}

/// Sampling from an explicit covariance matrix and mean vector.
pub fn sample_with_covariance(
    cov: &DenseMatrix,
    mu: &[f64],
    domain: &GridDomain,
    k: usize,
    seed: u64,
    max_jitter: Option<f64>,
    provenance: String,
) -> Result<FieldEnsemble> {
    check_size(domain)?;
    let n = domain.len();
    if k == 0 {
        return Err(Error::input("sample count must be >= 1"));
    }
    if cov.rows() != n || mu.len() != n {
        return Err(Error::input(format!(
            "covariance {}x{} and mean of length {} do not match {n} grid points",
            cov.rows(),
            cov.cols(),
            mu.len()
        )));
    }
    let max_jitter = max_jitter.unwrap_or_else(|| default_max_jitter(cov));
    let (l, _) = cholesky_with_jitter(cov, max_jitter)?;
    let values = par::map_indexed(k, |s| {
        let mut z = vec![0.0; n];
        NormalStream::new(seed, StreamTag::Field, s as u64).fill_normal(&mut z);
        let mut row = vec![0.0; n];
        l.lower_matvec(&z, &mut row);
        for (r, m) in row.iter_mut().zip(mu) {
            *r += m;
        }
        row
    });
    FieldEnsemble::new(domain.clone(), values, seed, provenance)
}

fn check_size(domain: &GridDomain) -> Result<()> {
    if domain.len() > MAX_SAMPLING_POINTS {
        return Err(Error::TooLarge { points: domain.len(), limit: MAX_SAMPLING_POINTS });
    }
    Ok(())
}

/// Pointwise sum of squares of zero-mean, unit-variance ensembles.
pub fn chi_squared_combine(ensembles: &[FieldEnsemble]) -> Result<FieldEnsemble> {
    let first = ensembles.first().ok_or_else(|| Error::input("need at least one ensemble"))?;
    for (j, e) in ensembles.iter().enumerate().skip(1) {
        if e.domain != first.domain {
            return Err(Error::input(format!("ensemble {j} is on a different domain")));
        }
        if e.len() != first.len() {
            return Err(Error::input(format!("ensemble {j} has {} samples, expected {}", e.len(), first.len())));
        }
    }
    let values = (0..first.len())
        .map(|k| {
            (0..first.points())
                .map(|i| ensembles.iter().map(|e| e.values[k][i].powi(2)).sum())
                .collect()
        })
        .collect();
    FieldEnsemble::new(
        first.domain.clone(),
        values,
        first.seed,
        format!("chi_squared(dof={})", ensembles.len()),
    )
}

/// Sample mean and unbiased sample covariance (divisor K−1).
pub fn empirical_moments(ensemble: &FieldEnsemble) -> Result<(Vec<f64>, DenseMatrix)> {
    let k = ensemble.len();
    if k < 2 {
        return Err(Error::input(format!("empirical moments need K >= 2, got {k}")));
    }
    let n = ensemble.points();
    let mut mean = vec![0.0; n];
    for row in &ensemble.values {
        for (m, v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= k as f64;
    }
    let mut cov = DenseMatrix::zeros(n, n);
    let mut centered = vec![0.0; n];
    for row in &ensemble.values {
        for ((c, v), m) in centered.iter_mut().zip(row).zip(&mean) {
            *c = v - m;
        }
        for i in 0..n {
            let ci = centered[i];
            for (o, cj) in cov.row_mut(i)[..=i].iter_mut().zip(&centered) {
                *o += ci * cj;
            }
        }
    }
    let denom = (k - 1) as f64;
    for i in 0..n {
        for j in 0..=i {
            let v = cov[(i, j)] / denom;
            cov[(i, j)] = v;
            cov[(j, i)] = v;
        }
    }
    Ok((mean, cov))
}
