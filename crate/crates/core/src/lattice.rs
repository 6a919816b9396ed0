//! Multi-indices on the d-dimensional integer lattice.
//!
//! Conventions used throughout the crate:
//!
//! ```text
//! |n + 1|  =  prod_j (n_j + 1)        volume of the box [0, n]
//! [-n, n]  =  prod_j {-n_j, ..., n_j} symmetric box, volume prod_j (2 n_j + 1)
//! ```
//!
//! Truncation ladders are increasing sequences of boxes along which limits
//! are probed empirically.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// A point of `Z^d`. The dimension is `len()`; it is always at least 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(pub Vec<i64>);

impl MultiIndex {
    pub fn new(components: Vec<i64>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::invalid("multi-index must have dimension >= 1"));
        }
        Ok(MultiIndex(components))
    }

    pub fn zeros(dim: usize) -> Self {
        MultiIndex(vec![0; dim])
    }

    pub fn splat(dim: usize, v: i64) -> Self {
        MultiIndex(vec![v; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> MultiIndex {
        MultiIndex(self.0.iter().map(|a| -a).collect())
    }

    /// Volume of the box `[0, self]`, i.e. `prod_j (self_j + 1)`.
    pub fn box_volume(&self) -> f64 {
        self.0.iter().map(|&n| (n + 1) as f64).product()
    }

    /// Volume of the symmetric box `[-self, self]`, i.e. `prod_j (2 self_j + 1)`.
    pub fn symmetric_volume(&self) -> f64 {
        self.0.iter().map(|&n| (2 * n + 1) as f64).product()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|&k| k >= 0)
    }

    /// Componentwise `self_j <= other_j`.
    pub fn le(&self, other: &MultiIndex) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: self.dim(),
            });
        }
        Ok(())
    }
}

impl std::fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, k) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, ")")
    }
}

/// Iterates over all lattice points of the box `[lo, hi]` in row-major order
/// (last axis fastest). Empty if `lo_j > hi_j` on some axis.
pub fn box_iter<'a>(lo: &'a [i64], hi: &'a [i64]) -> BoxIter<'a> {
    let empty = lo.iter().zip(hi).any(|(a, b)| a > b);
    BoxIter {
        lo,
        hi,
        cur: lo.to_vec(),
        done: empty,
    }
}

/// Allocation-free walk over `[lo, hi]` in row-major order, for hot loops.
pub fn for_each_box(lo: &[i64], hi: &[i64], mut f: impl FnMut(&[i64])) {
    if lo.iter().zip(hi).any(|(a, b)| a > b) {
        return;
    }
    let mut cur = lo.to_vec();
    loop {
        f(&cur);
        let mut axis = cur.len();
        loop {
            if axis == 0 {
                return;
            }
            axis -= 1;
            if cur[axis] < hi[axis] {
                cur[axis] += 1;
                for a in axis + 1..cur.len() {
                    cur[a] = lo[a];
                }
                break;
            }
        }
    }
}

pub struct BoxIter<'a> {
    lo: &'a [i64],
    hi: &'a [i64],
    cur: Vec<i64>,
    done: bool,
}

impl<'a> Iterator for BoxIter<'a> {
    type Item = Vec<i64>;

    fn next(&mut self) -> Option<Vec<i64>> {
        if self.done {
            return None;
        }
        let out = self.cur.clone();
        for axis in (0..self.cur.len()).rev() {
            if self.cur[axis] < self.hi[axis] {
                self.cur[axis] += 1;
                for a in axis + 1..self.cur.len() {
                    self.cur[a] = self.lo[a];
                }
                return Some(out);
            }
        }
        self.done = true;
        Some(out)
    }
}

/// A truncation ladder: strictly increasing boxes along which estimates are
/// reported. The default construction is geometric with ratio 2 ending at `top`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Ladder(pub Vec<MultiIndex>);

impl Ladder {
    pub fn explicit(rungs: Vec<MultiIndex>) -> Result<Self> {
        if rungs.is_empty() {
            return Err(Error::invalid("ladder must have at least one rung"));
        }
        let dim = rungs[0].dim();
        for w in rungs.windows(2) {
            w[1].check_dim(dim)?;
            if !w[0].le(&w[1]) || w[0] == w[1] {
                return Err(Error::invalid("ladder rungs must be strictly increasing"));
            }
        }
        Ok(Ladder(rungs))
    }

    /// `rungs` boxes ending at `top`, each half the previous one (componentwise,
    /// clamped to at least 1).
    pub fn geometric(top: &MultiIndex, rungs: usize) -> Result<Self> {
        if rungs == 0 {
            return Err(Error::invalid("ladder must have at least one rung"));
        }
        if top.0.iter().any(|&n| n < 1) {
            return Err(Error::invalid("ladder top must be >= 1 on every axis"));
        }
        let mut out = Vec::new();
        for r in 0..rungs {
            let shift = (rungs - 1 - r) as u32;
            let rung: Vec<i64> = top.0.iter().map(|&n| (n >> shift).max(1)).collect();
            let rung = MultiIndex(rung);
            if out.last() == Some(&rung) {
                continue;
            }
            out.push(rung);
        }
        Ladder::explicit(out)
    }

    pub fn top(&self) -> &MultiIndex {
        self.0.last().expect("ladder is non-empty")
    }

    pub fn dim(&self) -> usize {
        self.0[0].dim()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_volume_matches_iteration() {
        let n = MultiIndex(vec![2, 3]);
        let count = box_iter(&[0, 0], &n.0).count();
        assert_eq!(count as f64, n.box_volume());
        let sym = box_iter(&[-2, -3], &n.0).count();
        assert_eq!(sym as f64, n.symmetric_volume());
    }

    #[test]
    fn box_iter_row_major() {
        let pts: Vec<Vec<i64>> = box_iter(&[0, -1], &[1, 0]).collect();
        assert_eq!(
            pts,
            vec![vec![0, -1], vec![0, 0], vec![1, -1], vec![1, 0]]
        );
    }

    #[test]
    fn empty_box_iterates_nothing() {
        assert_eq!(box_iter(&[1], &[0]).count(), 0);
    }

    #[test]
    fn geometric_ladder_ends_at_top() {
        let l = Ladder::geometric(&MultiIndex(vec![100_000]), 5).unwrap();
        assert_eq!(l.0.len(), 5);
        assert_eq!(l.0[0], MultiIndex(vec![6250]));
        assert_eq!(l.top(), &MultiIndex(vec![100_000]));
    }

    #[test]
    fn geometric_ladder_clamps_small_tops() {
        let l = Ladder::geometric(&MultiIndex(vec![4]), 5).unwrap();
        assert!(l.0.len() < 5);
        assert_eq!(l.0[0], MultiIndex(vec![1]));
    }

    #[test]
    fn non_increasing_ladder_rejected() {
        let err = Ladder::explicit(vec![MultiIndex(vec![4]), MultiIndex(vec![4])]);
        assert!(err.is_err());
    }

    #[test]
    fn zero_dim_rejected() {
        assert!(MultiIndex::new(vec![]).is_err());
    }
}
