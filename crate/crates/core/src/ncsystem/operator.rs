//! Matrix-algebra elements under the normalized trace.
//!
//! An `Operator` is an N x N complex matrix viewed as an element of the
//! probability space `(M_N, tau)` with `tau(x) = (1/N) sum_i x_ii`, so
//! `tau(1) = 1`. The associated inner product and norms are
//!
//! ```text
//! <x, y> = tau(x* y) = (1/N) sum_ij conj(x_ij) y_ij,
//! ||x||_2 = <x, x>^{1/2},    ||x||_inf = largest singular value.
//! ```

use ndarray::Array2;
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{adjoint, identity, operator_norm};
use crate::sum::KahanC64;

#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    mat: Array2<Complex64>,
}

impl Operator {
    pub fn new(mat: Array2<Complex64>) -> Result<Self> {
        let (r, c) = mat.dim();
        if r == 0 || r != c {
            return Err(Error::invalid("operator must be square and nonempty"));
        }
        if mat.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("operator entries must be finite"));
        }
        Ok(Operator { mat })
    }

    pub fn zeros(n: usize) -> Self {
        Operator { mat: Array2::from_elem((n, n), Complex64::new(0.0, 0.0)) }
    }

    pub fn identity(n: usize) -> Self {
        Operator { mat: identity(n) }
    }

    /// Matrix unit `E_ij` (1 in row i, column j).
    pub fn matrix_unit(n: usize, i: usize, j: usize) -> Result<Self> {
        if i >= n || j >= n {
            return Err(Error::invalid("matrix unit index out of range"));
        }
        let mut m = Self::zeros(n);
        m.mat[(i, j)] = Complex64::new(1.0, 0.0);
        Ok(m)
    }

    /// Entries uniform in `[-1,1] + [-1,1]i`; test and simulation fodder.
    pub fn random(rng: &mut impl Rng, n: usize) -> Self {
        let mat = Array2::from_shape_fn((n, n), |_| {
            Complex64::new(2.0 * rng.gen::<f64>() - 1.0, 2.0 * rng.gen::<f64>() - 1.0)
        });
        Operator { mat }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn mat(&self) -> &Array2<Complex64> {
        &self.mat
    }

    pub fn mat_mut(&mut self) -> &mut Array2<Complex64> {
        &mut self.mat
    }

    pub fn into_mat(self) -> Array2<Complex64> {
        self.mat
    }

    pub fn adjoint(&self) -> Operator {
        Operator { mat: adjoint(&self.mat) }
    }

    pub fn mul(&self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim(), rhs.dim(), "operator dimensions differ");
        Operator { mat: self.mat.dot(&rhs.mat) }
    }

    pub fn add(&self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim(), rhs.dim(), "operator dimensions differ");
        Operator { mat: &self.mat + &rhs.mat }
    }

    pub fn sub(&self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim(), rhs.dim(), "operator dimensions differ");
        Operator { mat: &self.mat - &rhs.mat }
    }

    pub fn scale(&self, c: Complex64) -> Operator {
        Operator { mat: self.mat.mapv(|z| z * c) }
    }

    /// `self += c * rhs` without a temporary.
    pub fn axpy(&mut self, c: Complex64, rhs: &Operator) {
        assert_eq!(self.dim(), rhs.dim(), "operator dimensions differ");
        self.mat.zip_mut_with(&rhs.mat, |a, &b| *a += c * b);
    }

    /// Normalized trace `tau(x) = (1/N) sum_i x_ii`.
    pub fn trace(&self) -> Complex64 {
        let mut acc = KahanC64::default();
        for i in 0..self.dim() {
            acc.add(self.mat[(i, i)]);
        }
        acc.value() / self.dim() as f64
    }

    /// `tau(x* y)`, computed entrywise (no matrix product needed).
    pub fn inner(&self, rhs: &Operator) -> Complex64 {
        assert_eq!(self.dim(), rhs.dim(), "operator dimensions differ");
        let mut acc = KahanC64::default();
        for (a, b) in self.mat.iter().zip(rhs.mat.iter()) {
            acc.add(a.conj() * b);
        }
        acc.value() / self.dim() as f64
    }

    /// `||x||_2 = tau(x* x)^{1/2}`.
    pub fn norm_l2(&self) -> f64 {
        self.inner(self).re.max(0.0).sqrt()
    }

    /// `||x||_inf`, the largest singular value.
    pub fn norm_op(&self) -> f64 {
        operator_norm(&self.mat)
    }

    /// Largest entrywise deviation from `rhs`.
    pub fn max_abs_diff(&self, rhs: &Operator) -> f64 {
        assert_eq!(self.dim(), rhs.dim(), "operator dimensions differ");
        self.mat
            .iter()
            .zip(rhs.mat.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, rhs: &Operator, tol: f64) -> bool {
        self.max_abs_diff(rhs) <= tol
    }
}
