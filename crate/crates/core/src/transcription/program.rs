use serde::{Deserialize, Serialize};

use super::layout::{Block, VariableLayout};
use crate::error::{Error, Result};
use crate::sparse::Triplets;

/// Finite convex program
///
/// ```text
/// min  ½ xᵀQx + cᵀx + constant
/// s.t. A_eq x = b_eq,  A_in x ≤ b_in,  lb ≤ x ≤ ub
/// ```
///
/// `q` holds every nonzero of the symmetric matrix (both triangles).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProgramRepr", into = "ProgramRepr")]
pub struct TranscribedProgram {
    pub layout: VariableLayout,
    pub q: Triplets,
    pub c: Vec<f64>,
    pub constant: f64,
    pub a_eq: Triplets,
    pub b_eq: Vec<f64>,
    pub a_in: Triplets,
    pub b_in: Vec<f64>,
    pub lb: Vec<f64>,
    pub ub: Vec<f64>,
    pub relaxed_binary: Vec<usize>,
    pub big_m: Option<f64>,
}

impl Default for TranscribedProgram {
    fn default() -> Self {
        Self::new()
    }
}

impl TranscribedProgram {
    pub fn new() -> Self {
        TranscribedProgram {
            layout: VariableLayout::new(),
            q: Triplets::new(0, 0),
            c: Vec::new(),
            constant: 0.0,
            a_eq: Triplets::new(0, 0),
            b_eq: Vec::new(),
            a_in: Triplets::new(0, 0),
            b_in: Vec::new(),
            lb: Vec::new(),
            ub: Vec::new(),
            relaxed_binary: Vec::new(),
            big_m: None,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.c.len()
    }

    /// Append a variable block with uniform bounds.
    pub fn add_block(&mut self, name: &str, dims: &[usize], lb: f64, ub: f64) -> Result<Block> {
        if lb > ub {
            return Err(Error::input(format!("block {name:?}: lb {lb} > ub {ub}")));
        }
        let b = self.layout.add(name, dims)?;
        let n = self.layout.len();
        self.c.resize(n, 0.0);
        self.lb.resize(n, lb);
        self.ub.resize(n, ub);
        self.q.nrows = n;
        self.q.ncols = n;
        self.a_eq.ncols = n;
        self.a_in.ncols = n;
        Ok(b)
    }

    pub fn block(&self, name: &str) -> Result<&Block> {
        self.layout.get(name)
    }

    pub fn add_eq(&mut self, entries: &[(usize, f64)], rhs: f64) -> usize {
        self.b_eq.push(rhs);
        self.a_eq.push_row(entries)
    }

    /// Row Σ a_j x_j ≤ rhs.
    pub fn add_le(&mut self, entries: &[(usize, f64)], rhs: f64) -> usize {
        self.b_in.push(rhs);
        self.a_in.push_row(entries)
    }

    /// Add `v` to Q_ij and Q_ji (once on the diagonal).
    pub fn add_quadratic(&mut self, i: usize, j: usize, v: f64) {
        self.q.push(i, j, v);
        if i != j {
            self.q.push(j, i, v);
        }
    }

    pub fn add_linear(&mut self, i: usize, v: f64) {
        self.c[i] += v;
    }

    pub fn set_bounds(&mut self, i: usize, lb: f64, ub: f64) {
        self.lb[i] = lb;
        self.ub[i] = ub;
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        let qx = self.q.matvec(x);
        0.5 * dot(x, &qx) + dot(&self.c, x) + self.constant
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        self.layout.check()?;
        if self.layout.len() != n || self.lb.len() != n || self.ub.len() != n {
            return Err(Error::input("objective, bounds and layout sizes differ"));
        }
        if self.q.nrows != n || self.q.ncols != n || self.a_eq.ncols != n || self.a_in.ncols != n {
            return Err(Error::input("matrix column counts differ from variable count"));
        }
        if self.a_eq.nrows != self.b_eq.len() || self.a_in.nrows != self.b_in.len() {
            return Err(Error::input("constraint rows and right-hand sides differ in length"));
        }
        self.q.validate()?;
        self.a_eq.validate()?;
        self.a_in.validate()?;
        if !self.q.to_csc().is_symmetric(1e-12 * (1.0 + self.q.max_abs())) {
            return Err(Error::input("Q is not symmetric"));
        }
        if let Some(i) = (0..n).find(|&i| !(self.lb[i] <= self.ub[i])) {
            return Err(Error::input(format!("lb > ub for variable {i}")));
        }
        if self.c.iter().chain(&self.b_eq).chain(&self.b_in).any(|v| !v.is_finite()) {
            return Err(Error::input("non-finite objective or right-hand side"));
        }
        if let Some(&i) = self.relaxed_binary.iter().find(|&&i| i >= n) {
            return Err(Error::input(format!("relaxed binary index {i} out of range")));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("program serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::input(format!("program json: {e}")))
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Sparse-triplet JSON form; infinite bounds are written as `null`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProgramRepr {
    layout: VariableLayout,
    q: Triplets,
    c: Vec<f64>,
    #[serde(default)]
    constant: f64,
    a_eq: Triplets,
    b_eq: Vec<f64>,
    a_in: Triplets,
    b_in: Vec<f64>,
    lb: Vec<Option<f64>>,
    ub: Vec<Option<f64>>,
    #[serde(default)]
    relaxed_binary: Vec<usize>,
    #[serde(default)]
    big_m: Option<f64>,
}

impl From<TranscribedProgram> for ProgramRepr {
    fn from(p: TranscribedProgram) -> Self {
        let finite = |v: Vec<f64>| v.into_iter().map(|x| x.is_finite().then_some(x)).collect();
        ProgramRepr {
            layout: p.layout,
            q: p.q,
            c: p.c,
            constant: p.constant,
            a_eq: p.a_eq,
            b_eq: p.b_eq,
            a_in: p.a_in,
            b_in: p.b_in,
            lb: finite(p.lb),
            ub: finite(p.ub),
            relaxed_binary: p.relaxed_binary,
            big_m: p.big_m,
        }
    }
}

impl TryFrom<ProgramRepr> for TranscribedProgram {
    type Error = Error;

    fn try_from(r: ProgramRepr) -> Result<Self> {
        let p = TranscribedProgram {
            layout: r.layout,
            q: r.q,
            c: r.c,
            constant: r.constant,
            a_eq: r.a_eq,
            b_eq: r.b_eq,
            a_in: r.a_in,
            b_in: r.b_in,
            lb: r.lb.into_iter().map(|v| v.unwrap_or(f64::NEG_INFINITY)).collect(),
            ub: r.ub.into_iter().map(|v| v.unwrap_or(f64::INFINITY)).collect(),
            relaxed_binary: r.relaxed_binary,
            big_m: r.big_m,
        };
        p.validate()?;
        Ok(p)
    }
}
