//! Tensor-product discretizations of the deterministic domain.
//!
//! Points are flattened in row-major order: the last axis varies fastest.
//! Every module that indexes `(point i, sample k)` relies on this order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One axis of a tensor grid. Coordinates are strictly increasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AxisRepr", into = "AxisRepr")]
pub struct Axis {
    coords: Vec<f64>,
    uniform: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
enum AxisRepr {
    Uniform { lower: f64, upper: f64, points: usize },
    Explicit { coords: Vec<f64> },
}

impl TryFrom<AxisRepr> for Axis {
    type Error = Error;

    fn try_from(r: AxisRepr) -> Result<Self> {
        match r {
            AxisRepr::Uniform { lower, upper, points } => Axis::uniform(lower, upper, points),
            AxisRepr::Explicit { coords } => Axis::from_coords(coords),
        }
    }
}

impl From<Axis> for AxisRepr {
    fn from(a: Axis) -> Self {
        if a.uniform {
            AxisRepr::Uniform { lower: a.lower(), upper: a.upper(), points: a.len() }
        } else {
            AxisRepr::Explicit { coords: a.coords }
        }
    }
}

impl Axis {
    pub fn uniform(lower: f64, upper: f64, points: usize) -> Result<Self> {
        if points < 2 {
            return Err(Error::input(format!("axis needs at least 2 points, got {points}")));
        }
        if !(lower < upper) || !lower.is_finite() || !upper.is_finite() {
            return Err(Error::input(format!("axis bounds must satisfy lower < upper, got [{lower}, {upper}]")));
        }
        let h = (upper - lower) / (points - 1) as f64;
        let mut coords: Vec<f64> = (0..points).map(|i| lower + h * i as f64).collect();
        coords[points - 1] = upper;
        Ok(Axis { coords, uniform: true })
    }

    pub fn from_coords(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::input("axis needs at least 2 points"));
        }
        if coords.iter().any(|c| !c.is_finite()) || coords.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::input("axis coordinates must be finite and strictly increasing"));
        }
        Ok(Axis { coords, uniform: false })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn lower(&self) -> f64 {
        self.coords[0]
    }

    pub fn upper(&self) -> f64 {
        self.coords[self.coords.len() - 1]
    }

    /// Spacing if the axis is equidistant (to 1e-9 relative), else `None`.
    pub fn uniform_spacing(&self) -> Option<f64> {
        let h = (self.upper() - self.lower()) / (self.len() - 1) as f64;
        let ok = self.coords.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h);
        ok.then_some(h)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridDomain {
    axes: Vec<Axis>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    boundary: Vec<usize>,
}

impl GridDomain {
    pub fn new(axes: Vec<Axis>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::input("grid needs at least one axis"));
        }
        Ok(GridDomain { axes, boundary: Vec::new() })
    }

    pub fn uniform(spec: &[(f64, f64, usize)]) -> Result<Self> {
        let axes = spec
            .iter()
            .map(|&(lo, hi, n)| Axis::uniform(lo, hi, n))
            .collect::<Result<Vec<_>>>()?;
        GridDomain::new(axes)
    }

    /// Attach a boundary index set (D₀); indices must be valid flat indices.
    pub fn with_boundary(mut self, mut indices: Vec<usize>) -> Result<Self> {
        let n = self.len();
        if let Some(&bad) = indices.iter().find(|&&i| i >= n) {
            return Err(Error::input(format!("boundary index {bad} out of range for {n} points")));
        }
        indices.sort_unstable();
        indices.dedup();
        self.boundary = indices;
        Ok(self)
    }

    pub fn boundary(&self) -> &[usize] {
        &self.boundary
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn axis(&self, a: usize) -> &Axis {
        &self.axes[a]
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(Axis::len).collect()
    }

    /// Total number of support points.
    pub fn len(&self) -> usize {
        self.axes.iter().map(Axis::len).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major stride of each axis.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dim()];
        for a in (0..self.dim().saturating_sub(1)).rev() {
            strides[a] = strides[a + 1] * self.axes[a + 1].len();
        }
        strides
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for a in (0..self.dim()).rev() {
            let n = self.axes[a].len();
            idx[a] = flat % n;
            flat /= n;
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.axes)
            .fold(0, |acc, (&i, ax)| acc * ax.len() + i)
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat)
            .iter()
            .zip(&self.axes)
            .map(|(&i, ax)| ax.coords[i])
            .collect()
    }

    /// All support points d̂ᵢ in row-major order.
    pub fn points(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    /// Flat indices lying on the lower or upper face of any of `axes`.
    pub fn face_indices(&self, axes: &[usize]) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| {
                let m = self.multi_index(i);
                axes.iter().any(|&a| m[a] == 0 || m[a] + 1 == self.axes[a].len())
            })
            .collect()
    }

    /// Locate a point on the grid (coordinates matched to 1e-9 relative).
    pub fn locate(&self, d: &[f64]) -> Option<usize> {
        if d.len() != self.dim() {
            return None;
        }
        let mut idx = Vec::with_capacity(self.dim());
        for (x, ax) in d.iter().zip(&self.axes) {
            let tol = 1e-9 * (ax.upper() - ax.lower());
            let pos = ax.coords.iter().position(|c| (c - x).abs() <= tol)?;
            idx.push(pos);
        }
        Some(self.flat_index(&idx))
    }

    /// Sub-grid made of a subset of the axes (e.g. the spatial part of a
    /// space-time grid).
    pub fn sub_grid(&self, axes: &[usize]) -> Result<GridDomain> {
        GridDomain::new(axes.iter().map(|&a| self.axes[a].clone()).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_major_layout() {
        let g = GridDomain::uniform(&[(0.0, 1.0, 2), (0.0, 2.0, 3)]).unwrap();
        assert_eq!(g.len(), 6);
        assert_eq!(g.point(1), vec![0.0, 1.0]);
        assert_eq!(g.point(3), vec![1.0, 0.0]);
        assert_eq!(g.flat_index(&[1, 2]), 5);
        assert_eq!(g.multi_index(5), vec![1, 2]);
        assert_eq!(g.strides(), vec![3, 1]);
    }

    #[test]
    fn rejects_bad_axes() {
        assert!(Axis::uniform(0.0, 1.0, 1).is_err());
        assert!(Axis::uniform(1.0, 1.0, 3).is_err());
        assert!(Axis::from_coords(vec![0.0, 2.0, 1.0]).is_err());
        let g = GridDomain::uniform(&[(0.0, 1.0, 3)]).unwrap();
        assert!(g.clone().with_boundary(vec![3]).is_err());
        assert_eq!(g.with_boundary(vec![2, 0, 2]).unwrap().boundary(), &[0, 2]);
    }

    #[test]
    fn faces_of_square() {
        let g = GridDomain::uniform(&[(0.0, 1.0, 3), (0.0, 1.0, 3)]).unwrap();
        assert_eq!(g.face_indices(&[0, 1]), vec![0, 1, 2, 3, 5, 6, 7, 8]);
        assert_eq!(g.locate(&[0.5, 1.0]), Some(5));
        assert_eq!(g.locate(&[0.25, 1.0]), None);
    }

    #[test]
    fn serde_forms() {
        let a: Axis = serde_json::from_str(r#"{"lower":0,"upper":24,"points":49}"#).unwrap();
        assert_eq!(a.len(), 49);
        assert_eq!(a.uniform_spacing(), Some(0.5));
        let b: Axis = serde_json::from_str(r#"{"coords":[0,1,3]}"#).unwrap();
        assert_eq!(b.uniform_spacing(), None);
        assert!(serde_json::from_str::<Axis>(r#"{"lower":0,"upper":1,"points":1}"#).is_err());
    }
}
