//! Eigen-decomposition of the commuting conjugation superoperators.
//!
//! Each `T_j(x) = U_j x U_j*` is a unitary map on the N^2-dimensional
//! operator space with inner product `tau(x* y)`. A simultaneous eigenbasis
//! `v_1..v_N` of the commuting `U_j` induces one for the superoperators:
//!
//! ```text
//! B_pq = sqrt(N) v_p v_q*,   T_j(B_pq) = lam_{j,p} conj(lam_{j,q}) B_pq,
//! ```
//!
//! and the `B_pq` are tau-orthonormal. Every eigenvalue is unimodular, so in
//! finite dimension the eigen-operator span is the whole space and its
//! orthocomplement projector is the zero map; the useful output is the
//! eigenvalue lattice itself (ratios of `U_j` eigenvalue pairs), plus the
//! projector onto the joint fixed space.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::simultaneous_unitary_eigenbasis;
use crate::ncsystem::operator::Operator;
use crate::ncsystem::system::MatrixSystem;

/// Cluster width for grouping nearly equal unitary eigenvalues.
const CLUSTER_TOL: f64 = 1e-8;

/// Tau-orthonormal eigenbasis of operator space with per-axis eigenvalues.
#[derive(Debug, Clone)]
pub struct KroneckerDecomposition {
    dim_matrix: usize,
    dim_params: usize,
    basis: Vec<Operator>,
    eigenvalues: Vec<Vec<Complex64>>,
}

impl KroneckerDecomposition {
    pub fn dim_matrix(&self) -> usize {
        self.dim_matrix
    }

    pub fn dim_params(&self) -> usize {
        self.dim_params
    }

    /// Tau-orthonormal eigen-operators `sqrt(N) v_p v_q*`, length N^2.
    pub fn basis(&self) -> &[Operator] {
        &self.basis
    }

    /// `eigenvalues()[i][j]` is the `T_j` eigenvalue on `basis()[i]`.
    pub fn eigenvalues(&self) -> &[Vec<Complex64>] {
        &self.eigenvalues
    }

    fn check(&self, x: &Operator) -> Result<()> {
        if x.dim() != self.dim_matrix {
            return Err(Error::DimensionMismatch {
                expected: self.dim_matrix,
                got: x.dim(),
            });
        }
        Ok(())
    }

    /// Projection onto the eigen-operator span: `sum <B_i,x> B_i` over basis
    /// elements with unimodular eigenvalues. In finite dimension that is all
    /// of them, so this reproduces `x` to rounding.
    pub fn project_k(&self, x: &Operator) -> Result<Operator> {
        self.check(x)?;
        let mut acc = Operator::zeros(self.dim_matrix);
        for (b, mus) in self.basis.iter().zip(&self.eigenvalues) {
            if mus.iter().any(|mu| (mu.norm() - 1.0).abs() > 1e-6) {
                continue;
            }
            acc.axpy(b.inner(x), b);
        }
        Ok(acc)
    }

    /// Complementary projection `x - project_k(x)`; the zero map here.
    pub fn project_kperp(&self, x: &Operator) -> Result<Operator> {
        Ok(x.sub(&self.project_k(x)?))
    }

    /// Projection onto the joint fixed space: basis elements whose eigenvalue
    /// is 1 on every axis. This is the mean-ergodic limit of the averages.
    pub fn fixed_projection(&self, x: &Operator) -> Result<Operator> {
        self.check(x)?;
        let mut acc = Operator::zeros(self.dim_matrix);
        for (b, mus) in self.basis.iter().zip(&self.eigenvalues) {
            if mus.iter().all(|mu| (mu - Complex64::new(1.0, 0.0)).norm() <= 1e-6) {
                acc.axpy(b.inner(x), b);
            }
        }
        Ok(acc)
    }
}

/// Diagonalize all conjugation superoperators at once.
///
/// The eigenvalues are reconstructed as Rayleigh quotients
/// `lam_{j,p} conj(lam_{j,q})` from the matrix eigenvalues, so each is exactly
/// unimodular up to the eigensolver's residual; the constructor verifies this
/// along with tau-orthonormality of the basis.
pub fn kronecker_decomposition(sys: &MatrixSystem) -> Result<KroneckerDecomposition> {
    let n = sys.dim_matrix();
    let mats: Vec<Array2<Complex64>> =
        sys.unitaries().iter().map(|u| u.mat().clone()).collect();
    let (v, thetas) = simultaneous_unitary_eigenbasis(&mats, CLUSTER_TOL)?;
    let columns: Vec<Vec<Complex64>> = (0..n)
        .map(|p| (0..n).map(|r| v[(r, p)]).collect())
        .collect();
    let scale = (n as f64).sqrt();
    let mut basis = Vec::with_capacity(n * n);
    let mut eigenvalues = Vec::with_capacity(n * n);
    for p in 0..n {
        for q in 0..n {
            let mut mat = Array2::from_elem((n, n), Complex64::new(0.0, 0.0));
            for r in 0..n {
                for c in 0..n {
                    mat[(r, c)] = scale * columns[p][r] * columns[q][c].conj();
                }
            }
            basis.push(Operator::new(mat)?);
            let mus: Vec<Complex64> = (0..sys.dim_params())
                .map(|j| thetas[j][p] * thetas[j][q].conj())
                .collect();
            for mu in &mus {
                if (mu.norm() - 1.0).abs() > 1e-6 {
                    return Err(Error::invalid(format!(
                        "superoperator eigenvalue modulus {} is not 1",
                        mu.norm()
                    )));
                }
            }
            eigenvalues.push(mus);
        }
    }
    Ok(KroneckerDecomposition {
        dim_matrix: n,
        dim_params: sys.dim_params(),
        basis,
        eigenvalues,
    })
}
