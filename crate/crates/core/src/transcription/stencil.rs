use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridDomain;
use crate::sparse::Triplets;

/// Composite trapezoid weights for the given (increasing) coordinates.
pub fn quadrature_weights(coords: &[f64]) -> Result<Vec<f64>> {
    if coords.len() < 2 {
        return Err(Error::input("quadrature needs at least 2 points"));
    }
    let mut w = vec![0.0; coords.len()];
    for (i, pair) in coords.windows(2).enumerate() {
        let half = 0.5 * (pair[1] - pair[0]);
        w[i] += half;
        w[i + 1] += half;
    }
    Ok(w)
}

/// Tensor-product trapezoid weights over every point of `grid`.
pub fn grid_weights(grid: &GridDomain) -> Result<Vec<f64>> {
    let per_axis = grid
        .axes()
        .iter()
        .map(|a| quadrature_weights(a.coords()))
        .collect::<Result<Vec<_>>>()?;
    Ok((0..grid.len())
        .map(|i| grid.multi_index(i).iter().zip(&per_axis).map(|(&j, w)| w[j]).product())
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeScheme {
    /// (y[i] − y[i−1]) / (t_i − t_{i−1}) along `axis`.
    BackwardEulerTime { axis: usize },
    /// 5-point Laplacian in the plane of `axes`, interior nodes only.
    CentralLaplacian2d { axes: [usize; 2] },
}

/// Rows of a derivative operator. Row r approximates the derivative at grid
/// point `anchors[r]` as a combination of grid values.
#[derive(Debug, Clone, PartialEq)]
pub struct Stencil {
    pub anchors: Vec<usize>,
    pub rows: Vec<Vec<(usize, f64)>>,
    pub ncols: usize,
}

impl Stencil {
    pub fn apply(&self, y: &[f64]) -> Vec<f64> {
        self.rows.iter().map(|r| r.iter().map(|&(j, a)| a * y[j]).sum()).collect()
    }

    pub fn matrix(&self) -> Triplets {
        let mut m = Triplets::new(0, self.ncols);
        for r in &self.rows {
            m.push_row(r);
        }
        m
    }
}

pub fn derivative_rows(grid: &GridDomain, scheme: DerivativeScheme) -> Result<Stencil> {
    let strides = grid.strides();
    let mut anchors = Vec::new();
    let mut rows = Vec::new();
    match scheme {
        DerivativeScheme::BackwardEulerTime { axis } => {
            if axis >= grid.dim() {
                return Err(Error::input(format!("time axis {axis} out of range")));
            }
            let t = grid.axis(axis).coords();
            for i in 0..grid.len() {
                let m = grid.multi_index(i);
                if m[axis] == 0 {
                    continue;
                }
                let dt = t[m[axis]] - t[m[axis] - 1];
                rows.push(vec![(i, 1.0 / dt), (i - strides[axis], -1.0 / dt)]);
                anchors.push(i);
            }
        }
        DerivativeScheme::CentralLaplacian2d { axes } => {
            if axes.iter().any(|&a| a >= grid.dim()) || axes[0] == axes[1] {
                return Err(Error::input(format!("laplacian axes {axes:?} invalid for a {}-d grid", grid.dim())));
            }
            let mut inv_h2 = [0.0; 2];
            for (s, &a) in axes.iter().enumerate() {
                let h = grid.axis(a).uniform_spacing().ok_or_else(|| {
                    Error::Unsupported(format!("laplacian requires uniform spacing on axis {a}"))
                })?;
                inv_h2[s] = 1.0 / (h * h);
            }
            let shape = grid.shape();
            for i in 0..grid.len() {
                let m = grid.multi_index(i);
                if axes.iter().any(|&a| m[a] == 0 || m[a] + 1 == shape[a]) {
                    continue;
                }
                let (s0, s1) = (strides[axes[0]], strides[axes[1]]);
                rows.push(vec![
                    (i - s0, inv_h2[0]),
                    (i + s0, inv_h2[0]),
                    (i - s1, inv_h2[1]),
                    (i + s1, inv_h2[1]),
                    (i, -2.0 * (inv_h2[0] + inv_h2[1])),
                ]);
                anchors.push(i);
            }
        }
    }
    Ok(Stencil { anchors, rows, ncols: grid.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Axis;

    #[test]
    fn trapezoid_examples() {
        assert_eq!(quadrature_weights(&[0.0, 1.0, 2.0]).unwrap(), vec![0.5, 1.0, 0.5]);
        assert_eq!(quadrature_weights(&[0.0, 24.0]).unwrap(), vec![12.0, 12.0]);
        assert_eq!(quadrature_weights(&[0.0, 1.0, 3.0]).unwrap(), vec![0.5, 1.5, 1.0]);
        assert!(quadrature_weights(&[1.0]).is_err());
        let g = GridDomain::uniform(&[(0.0, 2.0, 3), (0.0, 1.0, 5)]).unwrap();
        let w = grid_weights(&g).unwrap();
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn backward_difference_of_linear_function() {
        let g = GridDomain::new(vec![Axis::from_coords(vec![0.0, 0.5, 2.0, 2.25]).unwrap()]).unwrap();
        let s = derivative_rows(&g, DerivativeScheme::BackwardEulerTime { axis: 0 }).unwrap();
        assert_eq!(s.anchors, vec![1, 2, 3]);
        let y: Vec<f64> = g.axis(0).coords().iter().map(|t| 3.0 * t - 1.0).collect();
        for v in s.apply(&y) {
            assert!((v - 3.0).abs() < 1e-12);
        }
        assert!(s.apply(&[4.0; 4]).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn laplacian_exact_on_quadratics() {
        let g = GridDomain::uniform(&[(0.0, 1.0, 3), (-1.0, 1.0, 6), (0.0, 2.0, 9)]).unwrap();
        let s = derivative_rows(&g, DerivativeScheme::CentralLaplacian2d { axes: [1, 2] }).unwrap();
        assert_eq!(s.anchors.len(), 3 * 4 * 7);
        let y: Vec<f64> = g.points().iter().map(|p| p[1] * p[1] + p[2] * p[2] + 5.0 * p[0]).collect();
        for v in s.apply(&y) {
            assert!((v - 4.0).abs() < 1e-9, "{v}");
        }
    }

    #[test]
    fn laplacian_rejects_nonuniform() {
        let g = GridDomain::new(vec![
            Axis::from_coords(vec![0.0, 1.0, 3.0]).unwrap(),
            Axis::uniform(0.0, 1.0, 3).unwrap(),
        ])
        .unwrap();
        let r = derivative_rows(&g, DerivativeScheme::CentralLaplacian2d { axes: [0, 1] });
        assert!(matches!(r, Err(Error::Unsupported(_))));
    }
}
