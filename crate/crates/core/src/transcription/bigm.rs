use super::layout::Block;
use super::program::TranscribedProgram;
use crate::error::{Error, Result};

/// Variables added by [`big_m_excursion`].
#[derive(Debug, Clone, PartialEq)]
pub struct ExcursionVars {
    /// f̄_k, the per-sample maximum of the monitored values.
    pub fbar: Block,
    /// q_k ∈ [0, 1], relaxed excursion indicators.
    pub q: Block,
    pub samples: usize,
    pub threshold: f64,
    pub big_m: f64,
}

impl ExcursionVars {
    /// Coefficients of (1/K) Σ q_k.
    pub fn probability_terms(&self) -> Vec<(usize, f64)> {
        let s = 1.0 / self.samples as f64;
        self.q.range().map(|j| (j, s)).collect()
    }

    pub fn probability(&self, x: &[f64]) -> f64 {
        x[self.q.range()].iter().sum::<f64>() / self.samples as f64
    }
}

/// Big-M reformulation of the excursion indicator over a block indexed
/// (point i, sample k): f̄_k ≥ y_ik for all i and f̄_k − M q_k ≤ u.
///
/// Without an explicit `m`, M = max upper bound of the block − u, which
/// requires finite bounds.
pub fn big_m_excursion(
    program: TranscribedProgram,
    monitored: &str,
    u: f64,
    m: Option<f64>,
) -> Result<(TranscribedProgram, ExcursionVars)> {
    let n = program.block(monitored)?.dims.first().copied().unwrap_or(0);
    big_m_excursion_on(program, monitored, &(0..n).collect::<Vec<_>>(), u, m)
}

/// As [`big_m_excursion`] but monitoring only the listed points.
pub fn big_m_excursion_on(
    mut program: TranscribedProgram,
    monitored: &str,
    points: &[usize],
    u: f64,
    m: Option<f64>,
) -> Result<(TranscribedProgram, ExcursionVars)> {
    let block = program.block(monitored)?.clone();
    if block.dims.len() != 2 {
        return Err(Error::input(format!(
            "monitored block {monitored:?} must be indexed by (point, sample), has dims {:?}",
            block.dims
        )));
    }
    let (n, k) = (block.dims[0], block.dims[1]);
    if let Some(&bad) = points.iter().find(|&&i| i >= n) {
        return Err(Error::input(format!("monitored point {bad} out of range")));
    }
    let big_m = match m {
        Some(m) if m > 0.0 && m.is_finite() => m,
        Some(m) => return Err(Error::param(format!("big-M must be > 0, got {m}"))),
        None => {
            let ub = block.range().map(|j| program.ub[j]).fold(f64::NEG_INFINITY, f64::max);
            if !ub.is_finite() {
                return Err(Error::param(format!(
                    "block {monitored:?} has no finite upper bound; supply big-M explicitly"
                )));
            }
            if ub - u > 0.0 { ub - u } else { 1.0 }
        }
    };
    let fbar = program.add_block(&format!("fbar_{monitored}"), &[k], f64::NEG_INFINITY, f64::INFINITY)?;
    let q = program.add_block(&format!("q_{monitored}"), &[k], 0.0, 1.0)?;
    for s in 0..k {
        for &i in points {
            program.add_le(&[(block.at(&[i, s]), 1.0), (fbar.at(&[s]), -1.0)], 0.0);
        }
        program.add_le(&[(fbar.at(&[s]), 1.0), (q.at(&[s]), -big_m)], u);
    }
    program.relaxed_binary.extend(q.range());
    program.big_m = Some(big_m);
    let vars = ExcursionVars { fbar, q, samples: k, threshold: u, big_m };
    Ok((program, vars))
}

/// Round relaxed binaries: 1 if the value exceeds `tol`, else 0.
pub fn round_binaries(x: &[f64], indices: &[usize], tol: f64) -> Result<Vec<f64>> {
    let mut out = x.to_vec();
    for &j in indices {
        let v = *x.get(j).ok_or_else(|| Error::input(format!("binary index {j} out of range")))?;
        if !(v >= -tol && v <= 1.0 + tol) {
            return Err(Error::Invariant(format!("relaxed binary {j} = {v} outside [0, 1]")));
        }
        out[j] = if v > tol { 1.0 } else { 0.0 };
    }
    Ok(out)
}

pub const DEFAULT_ROUNDING_TOL: f64 = 1e-6;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_rule() {
        assert_eq!(round_binaries(&[0.0, 1.0], &[0, 1], 1e-6).unwrap(), vec![0.0, 1.0]);
        assert_eq!(round_binaries(&[1e-9], &[0], 1e-6).unwrap(), vec![0.0]);
        assert_eq!(round_binaries(&[0.05, 7.0], &[0], 1e-6).unwrap(), vec![1.0, 7.0]);
        assert!(matches!(round_binaries(&[1.5], &[0], 1e-6), Err(Error::Invariant(_))));
    }

    #[test]
    fn adds_rows_and_blocks() {
        let mut p = TranscribedProgram::new();
        p.add_block("y", &[3, 2], 0.0, 0.5).unwrap();
        let (p, v) = big_m_excursion(p, "y", 0.25, None).unwrap();
        assert_eq!(v.big_m, 0.25);
        assert_eq!(p.a_in.nrows, 2 * (3 + 1));
        assert_eq!(p.relaxed_binary, vec![8, 9]);
        assert_eq!(v.probability_terms(), vec![(8, 0.5), (9, 0.5)]);
        p.validate().unwrap();
    }

    #[test]
    fn errors() {
        let mut p = TranscribedProgram::new();
        p.add_block("y", &[3, 2], 0.0, f64::INFINITY).unwrap();
        assert!(big_m_excursion(p.clone(), "nope", 0.0, Some(1.0)).is_err());
        assert!(big_m_excursion(p.clone(), "y", 0.0, None).is_err());
        assert!(big_m_excursion(p, "y", 0.0, Some(-1.0)).is_err());
    }
}
