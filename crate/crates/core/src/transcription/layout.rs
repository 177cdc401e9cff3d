use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A named, contiguous slice of the decision vector indexed row-major by
/// `dims` (empty `dims` means a scalar).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Block {
    pub name: String,
    pub dims: Vec<usize>,
    pub offset: usize,
}

impl Block {
    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn range(&self) -> std::ops::Range<usize> {
        self.offset..self.offset + self.len()
    }

    /// Flat decision-vector index of a multi-index into this block.
    pub fn at(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.dims.len(), "block {} index rank", self.name);
        let local = idx.iter().zip(&self.dims).fold(0, |acc, (&i, &n)| {
            debug_assert!(i < n, "block {} index {i} >= {n}", self.name);
            acc * n + i
        });
        self.offset + local
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariableLayout {
    blocks: Vec<Block>,
}

impl VariableLayout {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.blocks.last().map_or(0, |b| b.offset + b.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// Append a block; its offset is the current total size.
    pub fn add(&mut self, name: &str, dims: &[usize]) -> Result<Block> {
        if self.blocks.iter().any(|b| b.name == name) {
            return Err(Error::input(format!("duplicate block name {name:?}")));
        }
        let b = Block { name: name.to_string(), dims: dims.to_vec(), offset: self.len() };
        self.blocks.push(b.clone());
        Ok(b)
    }

    pub fn get(&self, name: &str) -> Result<&Block> {
        self.blocks
            .iter()
            .find(|b| b.name == name)
            .ok_or_else(|| Error::input(format!("unknown block {name:?}")))
    }

    /// Values of a block extracted from a full decision vector.
    pub fn slice<'a>(&self, name: &str, x: &'a [f64]) -> Result<&'a [f64]> {
        let b = self.get(name)?;
        x.get(b.range())
            .ok_or_else(|| Error::input(format!("vector too short for block {name:?}")))
    }

    pub(crate) fn check(&self) -> Result<()> {
        let mut expect = 0;
        for b in &self.blocks {
            if b.offset != expect {
                return Err(Error::Invariant(format!("block {:?} overlaps or leaves a gap", b.name)));
            }
            expect += b.len();
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offsets_accumulate() {
        let mut l = VariableLayout::new();
        let y = l.add("y", &[3, 2]).unwrap();
        let z = l.add("z", &[]).unwrap();
        assert_eq!(l.len(), 7);
        assert_eq!(y.at(&[2, 1]), 5);
        assert_eq!(z.at(&[]), 6);
        assert!(l.add("y", &[1]).is_err());
        assert!(l.get("w").is_err());
        let x: Vec<f64> = (0..7).map(f64::from).collect();
        assert_eq!(l.slice("y", &x).unwrap(), &x[..6]);
        l.check().unwrap();
    }
}
