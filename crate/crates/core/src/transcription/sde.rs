use serde::Serialize;

use crate::error::{Error, Result};
use crate::par;
use crate::rng::{NormalStream, StreamTag};

/// Euler–Maruyama trajectories. `values[k]` holds path k as T consecutive
/// states of length `dim`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SdePath {
    pub times: Vec<f64>,
    pub dim: usize,
    pub values: Vec<Vec<f64>>,
    pub seed: u64,
}

impl SdePath {
    pub fn paths(&self) -> usize {
        self.values.len()
    }

    pub fn state(&self, k: usize, t: usize) -> &[f64] {
        &self.values[k][t * self.dim..(t + 1) * self.dim]
    }

    pub fn terminal(&self, k: usize) -> &[f64] {
        self.state(k, self.times.len() - 1)
    }

    /// Component `c` of path `k` over all times.
    pub fn component(&self, k: usize, c: usize) -> Vec<f64> {
        (0..self.times.len()).map(|t| self.state(k, t)[c]).collect()
    }
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.len() < 2 {
        return Err(Error::input("need at least 2 time points"));
    }
    if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::input("times must be finite and strictly increasing"));
    }
    Ok(())
}

/// y(t_{i+1}) = y(t_i) + f(y, t_i)·Δt + h(t_i)·ΔW, one independent Wiener
/// increment per state component, drawn from the stream of (seed, path).
///
/// `drift(y, t, out)` writes f(y, t) into `out`.
pub fn euler_maruyama<F, H>(drift: F, noise: H, y0: &[f64], times: &[f64], k: usize, seed: u64) -> Result<SdePath>
where
    F: Fn(&[f64], f64, &mut [f64]) + Sync + Send,
    H: Fn(f64) -> f64 + Sync + Send,
{
    check_times(times)?;
    if k == 0 {
        return Err(Error::input("path count must be >= 1"));
    }
    if y0.is_empty() {
        return Err(Error::input("initial state is empty"));
    }
    let dim = y0.len();
    let nt = times.len();
    let values = par::map_indexed(k, |p| {
        let mut rng = NormalStream::new(seed, StreamTag::Wiener, p as u64);
        let mut out = Vec::with_capacity(nt * dim);
        out.extend_from_slice(y0);
        let mut f = vec![0.0; dim];
        for i in 0..nt - 1 {
            let dt = times[i + 1] - times[i];
            let (prev, _) = out.split_at(i * dim + dim);
            let y = &prev[i * dim..];
            drift(y, times[i], &mut f);
            let h = noise(times[i]);
            let sdt = dt.sqrt();
            let next: Vec<f64> = (0..dim)
                .map(|c| {
                    let dw = sdt * rng.next_normal();
                    let v = y[c] + f[c] * dt;
                    if h != 0.0 { v + h * dw } else { v }
                })
                .collect();
            out.extend_from_slice(&next);
        }
        out
    });
    if values.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Simulation("euler-maruyama produced non-finite states".into()));
    }
    Ok(SdePath { times: times.to_vec(), dim, values, seed })
}

/// Deterministic explicit Euler, returned as T consecutive states.
pub fn explicit_euler<F>(drift: F, y0: &[f64], times: &[f64]) -> Result<Vec<f64>>
where
    F: Fn(&[f64], f64, &mut [f64]),
{
    check_times(times)?;
    let dim = y0.len();
    let mut out = y0.to_vec();
    let mut f = vec![0.0; dim];
    for i in 0..times.len() - 1 {
        let dt = times[i + 1] - times[i];
        let y = out[i * dim..].to_vec();
        drift(&y, times[i], &mut f);
        for c in 0..dim {
            out.push(y[c] + f[c] * dt);
        }
    }
    Ok(out)
}
