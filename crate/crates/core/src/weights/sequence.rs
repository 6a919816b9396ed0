//! Storage and evaluation of weight sequences.
//!
//! A [`WeightSequence`] holds complex values on a finite lattice box
//! `[lo, hi]` (row-major) and evaluates to exactly zero outside it. Sequences
//! built from a closed-form generator remember their provenance so that exact
//! fast paths (trig-polynomial correlations, amplitudes) stay available, and so
//! that operations which would silently truncate the generator's support can
//! refuse instead.

use ndarray::ArrayD;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{box_iter, MultiIndex};
use crate::weights::trigpoly::TrigPolynomial;

/// Closed-form sequence generators.
///
/// A generator defines `a(k)` for every `k` in `N^d`; materializing a
/// [`WeightSequence`] from one caches a finite box of values. Operations that
/// need values beyond the cached box fail with `BoxExceeded` rather than
/// zero-filling, because for generated sequences the mathematical values out
/// there are known and nonzero.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Generator {
    /// `a(k) = sum_alpha c_alpha z_alpha^k`.
    Trigpoly { poly: TrigPolynomial },
    /// `a(k) = (-1)^floor(log_base(k_1 + ... + k_d + 1))`; base defaults to e.
    ///
    /// The sign flips on a doubly exponential schedule, so block averages over
    /// dyadic-style ladders oscillate forever while the correlations converge
    /// to 1. This is the standard counterexample showing that converging
    /// correlations alone do not give converging amplitudes.
    Example59 {
        d: usize,
        #[serde(default)]
        base: Option<f64>,
    },
}

impl Generator {
    pub fn dim(&self) -> usize {
        match self {
            Generator::Trigpoly { poly } => poly.dim(),
            Generator::Example59 { d, .. } => *d,
        }
    }

    /// Evaluate at a nonnegative lattice point.
    pub fn eval(&self, k: &[i64]) -> Complex64 {
        debug_assert!(k.iter().all(|&c| c >= 0));
        match self {
            Generator::Trigpoly { poly } => poly.eval(k),
            Generator::Example59 { base, .. } => {
                let s: i64 = k.iter().sum();
                let ln = ((s + 1) as f64).ln();
                let level = match base {
                    None => ln,
                    Some(b) => ln / b.ln(),
                }
                .floor() as i64;
                if level % 2 == 0 {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(-1.0, 0.0)
                }
            }
        }
    }
}

/// A bounded complex sequence stored on a lattice box, zero outside.
///
/// Support may be signed (translation produces negative indices); sequences
/// fresh from data or a generator start at the origin.
#[derive(Debug, Clone)]
pub struct WeightSequence {
    dim: usize,
    lo: Vec<i64>,
    values: ArrayD<Complex64>,
    generator: Option<Generator>,
}

impl WeightSequence {
    /// Values on `[0, n]` in row-major order (last axis fastest).
    pub fn from_values(n: &MultiIndex, values: Vec<Complex64>) -> Result<Self> {
        Self::from_values_signed(&MultiIndex::zeros(n.dim()), n, values)
    }

    /// Values on a signed box `[lo, hi]`, row-major.
    pub fn from_values_signed(lo: &MultiIndex, hi: &MultiIndex, values: Vec<Complex64>) -> Result<Self> {
        lo.check_dim(hi.dim())?;
        let mut shape = Vec::with_capacity(lo.dim());
        for (&l, &h) in lo.0.iter().zip(&hi.0) {
            if h < l {
                return Err(Error::invalid(format!("empty box axis: lo {l} > hi {h}")));
            }
            shape.push((h - l + 1) as usize);
        }
        let len: usize = shape.iter().product();
        if len != values.len() {
            return Err(Error::invalid(format!(
                "box holds {len} points but {} values given",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::invalid("non-finite sequence value"));
        }
        let values = ArrayD::from_shape_vec(shape, values).expect("shape/len checked");
        Ok(WeightSequence { dim: lo.dim(), lo: lo.0.clone(), values, generator: None })
    }

    /// Materialize a generator on `[0, n]`.
    pub fn from_generator(generator: Generator, n: &MultiIndex) -> Result<Self> {
        if generator.dim() != n.dim() {
            return Err(Error::DimensionMismatch { expected: generator.dim(), got: n.dim() });
        }
        if n.0.iter().any(|&c| c < 0) {
            return Err(Error::invalid("generator box must be nonnegative"));
        }
        let zeros = vec![0i64; n.dim()];
        let mut vals = Vec::with_capacity(n.box_volume() as usize);
        for k in box_iter(&zeros, &n.0) {
            vals.push(generator.eval(&k));
        }
        let mut seq = Self::from_values(n, vals)?;
        seq.generator = Some(generator);
        Ok(seq)
    }

    /// Build from a pointwise closure on `[0, n]`, visited in row-major order.
    pub fn from_fn(n: &MultiIndex, mut f: impl FnMut(&[i64]) -> Complex64) -> Result<Self> {
        let zeros = vec![0i64; n.dim()];
        let mut vals = Vec::with_capacity(n.box_volume() as usize);
        for k in box_iter(&zeros, &n.0) {
            vals.push(f(&k));
        }
        Self::from_values(n, vals)
    }

    pub fn constant(n: &MultiIndex, c: Complex64) -> Result<Self> {
        Self::from_fn(n, |_| c)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Inclusive lower corner of the stored box.
    pub fn lo(&self) -> MultiIndex {
        MultiIndex(self.lo.clone())
    }

    /// Inclusive upper corner of the stored box.
    pub fn hi(&self) -> MultiIndex {
        MultiIndex(
            self.lo
                .iter()
                .zip(self.values.shape())
                .map(|(&l, &s)| l + s as i64 - 1)
                .collect(),
        )
    }

    pub fn generator(&self) -> Option<&Generator> {
        self.generator.as_ref()
    }

    /// Raw stored table (row-major over `[lo, hi]`).
    pub fn values(&self) -> &ArrayD<Complex64> {
        &self.values
    }

    /// Evaluate at any signed lattice point; zero outside the stored box.
    pub fn eval(&self, k: &[i64]) -> Complex64 {
        debug_assert_eq!(k.len(), self.dim);
        let mut idx = Vec::with_capacity(self.dim);
        for ((&c, &l), &s) in k.iter().zip(&self.lo).zip(self.values.shape()) {
            let off = c - l;
            if off < 0 || off >= s as i64 {
                return Complex64::new(0.0, 0.0);
            }
            idx.push(off as usize);
        }
        self.values[idx.as_slice()]
    }

    /// Largest `|a(k)|` over the stored box.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Translated sequence `A^m(k) = A(k + m)`; support shifts to `[lo-m, hi-m]`.
    ///
    /// The result drops any generator tag: after translation the table is the
    /// ground truth (a translated `N^d` generator is no longer a function on
    /// `N^d`).
    pub fn translate(&self, m: &MultiIndex) -> Result<Self> {
        m.check_dim(self.dim)?;
        let lo = MultiIndex(self.lo.iter().zip(&m.0).map(|(&l, &s)| l - s).collect());
        let hi = MultiIndex(
            self.hi()
                .0
                .iter()
                .zip(&m.0)
                .map(|(&h, &s)| h - s)
                .collect(),
        );
        let values = self.values.iter().cloned().collect();
        Self::from_values_signed(&lo, &hi, values)
    }

    /// Zero-copy accessor with no per-call allocation, for summation loops.
    pub(crate) fn flat_view(&self) -> FlatView<'_> {
        let shape: Vec<i64> = self.values.shape().iter().map(|&s| s as i64).collect();
        let mut strides = vec![1i64; shape.len()];
        for axis in (0..shape.len().saturating_sub(1)).rev() {
            strides[axis] = strides[axis + 1] * shape[axis + 1];
        }
        FlatView {
            vals: self.values.as_slice().expect("row-major storage"),
            lo: &self.lo,
            shape,
            strides,
        }
    }

    /// Error unless the stored box covers `[0, needed]` whenever the sequence
    /// is generator-backed (where zero-filling would silently change values).
    pub(crate) fn require_coverage(&self, needed: &MultiIndex) -> Result<()> {
        needed.check_dim(self.dim)?;
        if self.generator.is_none() {
            return Ok(());
        }
        let hi = self.hi();
        for axis in 0..self.dim {
            if self.lo[axis] > 0 || hi.0[axis] < needed.0[axis] {
                return Err(Error::BoxExceeded(format!(
                    "generated sequence materialized on [{}, {}] but axis {axis} needs [0, {}]",
                    self.lo(),
                    hi,
                    needed.0[axis]
                )));
            }
        }
        Ok(())
    }
}

/// Borrowed row-major view of a sequence table; reads outside the stored box
/// return zero, matching [`WeightSequence::eval`].
pub(crate) struct FlatView<'a> {
    vals: &'a [Complex64],
    lo: &'a [i64],
    shape: Vec<i64>,
    strides: Vec<i64>,
}

impl FlatView<'_> {
    #[inline]
    pub(crate) fn get(&self, k: &[i64]) -> Complex64 {
        let mut flat = 0i64;
        for axis in 0..k.len() {
            let off = k[axis] - self.lo[axis];
            if off < 0 || off >= self.shape[axis] {
                return Complex64::new(0.0, 0.0);
            }
            flat += off * self.strides[axis];
        }
        self.vals[flat as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::MultiIndex;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_extension_outside_box() {
        let a = WeightSequence::from_values(
            &MultiIndex::new(vec![1, 1]).unwrap(),
            vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)],
        )
        .unwrap();
        assert_eq!(a.eval(&[0, 1]), c(2.0, 0.0));
        assert_eq!(a.eval(&[1, 0]), c(3.0, 0.0));
        assert_eq!(a.eval(&[-1, 0]), c(0.0, 0.0));
        assert_eq!(a.eval(&[0, 2]), c(0.0, 0.0));
        assert_eq!(a.eval(&[5, 5]), c(0.0, 0.0));
    }

    #[test]
    fn translate_shifts_support() {
        let a = WeightSequence::from_values(
            &MultiIndex::new(vec![2]).unwrap(),
            vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)],
        )
        .unwrap();
        let t = a.translate(&MultiIndex::new(vec![2]).unwrap()).unwrap();
        assert_eq!(t.lo().0, vec![-2]);
        assert_eq!(t.hi().0, vec![0]);
        assert_eq!(t.eval(&[-2]), c(1.0, 0.0));
        assert_eq!(t.eval(&[0]), c(3.0, 0.0));
        assert_eq!(t.eval(&[1]), c(0.0, 0.0));
        // A^m(k) = A(k+m) pointwise.
        for k in -4..4 {
            assert_eq!(t.eval(&[k]), a.eval(&[k + 2]));
        }
    }

    #[test]
    fn example59_sign_schedule() {
        // floor(ln(s+1)) is 0 for s+1 in [1,e), 1 for [e,e^2), 2 for [e^2,e^3)...
        let g = Generator::Example59 { d: 1, base: None };
        assert_eq!(g.eval(&[0]).re, 1.0); // ln(1)=0
        assert_eq!(g.eval(&[1]).re, 1.0); // ln(2)=0.69 -> floor 0
        assert_eq!(g.eval(&[2]).re, -1.0); // ln(3)=1.09 -> floor 1
        assert_eq!(g.eval(&[6]).re, -1.0); // ln(7)=1.94 -> floor 1
        assert_eq!(g.eval(&[7]).re, 1.0); // ln(8)=2.08 -> floor 2
        // base-2 variant flips at powers of two instead.
        let g2 = Generator::Example59 { d: 1, base: Some(2.0) };
        assert_eq!(g2.eval(&[0]).re, 1.0); // log2(1)=0
        assert_eq!(g2.eval(&[1]).re, -1.0); // log2(2)=1
        assert_eq!(g2.eval(&[3]).re, 1.0); // log2(4)=2
    }

    #[test]
    fn example59_depends_on_coordinate_sum() {
        let g = Generator::Example59 { d: 2, base: None };
        assert_eq!(g.eval(&[1, 1]).re, -1.0); // floor(ln 3) = 1
        for s in 0..40i64 {
            let vals: Vec<f64> = (0..=s).map(|i| g.eval(&[i, s - i]).re).collect();
            assert!(vals.windows(2).all(|w| w[0] == w[1]));
        }
    }

    #[test]
    fn generator_box_materializes_and_guards() {
        let g = Generator::Example59 { d: 1, base: None };
        let a = WeightSequence::from_generator(g, &MultiIndex::new(vec![10]).unwrap()).unwrap();
        for k in 0..=10 {
            assert_eq!(a.eval(&[k]), a.generator().unwrap().eval(&[k]));
        }
        assert!(a.require_coverage(&MultiIndex::new(vec![10]).unwrap()).is_ok());
        assert!(a.require_coverage(&MultiIndex::new(vec![11]).unwrap()).is_err());
        // Plain tables are their own ground truth: no coverage error.
        let t = WeightSequence::from_values(&MultiIndex::new(vec![1]).unwrap(), vec![c(1.0, 0.0); 2])
            .unwrap();
        assert!(t.require_coverage(&MultiIndex::new(vec![99]).unwrap()).is_ok());
    }

    #[test]
    fn shape_mismatch_rejected() {
        assert!(WeightSequence::from_values(&MultiIndex::new(vec![2]).unwrap(), vec![c(1.0, 0.0); 2])
            .is_err());
        assert!(WeightSequence::from_values(
            &MultiIndex::new(vec![1]).unwrap(),
            vec![c(f64::NAN, 0.0), c(0.0, 0.0)]
        )
        .is_err());
    }
}
