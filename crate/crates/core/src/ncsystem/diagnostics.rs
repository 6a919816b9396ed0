//! Almost-uniform-convergence probes.
//!
//! Two numerical companions to the qualitative convergence statements. The
//! first searches for a projection `e` of large trace so that a finite family
//! of tail operators is uniformly small compressed by `e`: given tails `A_i`,
//! it diagonalizes `S = sum w_i A_i* A_i` and scans spectral projections onto
//! the flattest eigenvectors. The result is a certified upper bound for the
//! achieved sup, never claimed optimal.
//!
//! The second evaluates
//!
//! ```text
//! sup_{lambda in grid} || M_n(x, lambda) e ||_inf
//! ```
//!
//! over a root-of-unity lattice. Folding `T^k(x)` by `k mod G` turns all grid
//! twists into one d-dimensional discrete Fourier transform; a naive path
//! that loops over the grid is kept for the agreement test.

use ndarray::{ArrayD, IxDyn};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::root_of_unity_sums;
use crate::lattice::MultiIndex;
use crate::linalg::{hermitian_eigen, operator_norm};
use crate::ncsystem::operator::Operator;
use crate::ncsystem::system::{for_each_power, twisted_average, MatrixSystem};
use crate::torus::TorusPoint;

/// Orthogonal projection, validated as `p = p* = p^2` within a tolerance.
#[derive(Debug, Clone)]
pub struct Projection {
    op: Operator,
}

impl Projection {
    pub fn new(op: Operator, tol: f64) -> Result<Self> {
        let herm_defect = op.max_abs_diff(&op.adjoint());
        let idem_defect = op.mul(&op).max_abs_diff(&op);
        if herm_defect > tol || idem_defect > tol {
            return Err(Error::invalid(format!(
                "not a projection: hermitian defect {herm_defect:.2e}, idempotency defect {idem_defect:.2e}"
            )));
        }
        let tr = op.trace();
        if tr.re < -tol || tr.re > 1.0 + tol || tr.im.abs() > tol {
            return Err(Error::invalid(format!(
                "projection trace {tr} outside [0, 1]"
            )));
        }
        Ok(Self { op })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            op: Operator::identity(n),
        }
    }

    pub fn op(&self) -> &Operator {
        &self.op
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    /// Normalized trace, the fraction of the space the projection keeps.
    pub fn trace(&self) -> f64 {
        self.op.trace().re
    }

    /// `tau(1 - p)`, the discarded fraction.
    pub fn codim_fraction(&self) -> f64 {
        1.0 - self.trace()
    }
}

/// Search strategy for the tail diagnostic.
#[derive(Debug, Clone)]
pub struct AuStrategy {
    /// Per-tail weights in `S = sum w_i A_i* A_i`; `None` means uniform.
    pub weights: Option<Vec<f64>>,
    /// Minimize `||e A e||` when true, `||A e||` otherwise.
    pub bilateral: bool,
}

impl Default for AuStrategy {
    fn default() -> Self {
        Self {
            weights: None,
            bilateral: true,
        }
    }
}

/// Find a projection `e` with `tau(1-e) <= epsilon` making every tail small.
///
/// Candidates are spectral projections of `S` onto the `r` smallest
/// eigenvalues for each admissible rank `r >= N(1-epsilon)`; among those the
/// one with the smallest achieved sup wins, with ties going to larger rank.
pub fn au_convergence_diagnostic(
    tails: &[Operator],
    epsilon: f64,
    strategy: &AuStrategy,
) -> Result<(Projection, f64)> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::invalid(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    let Some(first) = tails.first() else {
        return Err(Error::invalid("need at least one tail operator"));
    };
    let n = first.dim();
    for t in tails {
        if t.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: t.dim(),
            });
        }
    }
    let weights = match &strategy.weights {
        Some(w) => {
            if w.len() != tails.len() {
                return Err(Error::invalid(format!(
                    "{} weights for {} tails",
                    w.len(),
                    tails.len()
                )));
            }
            if w.iter().any(|&wi| !(wi.is_finite() && wi >= 0.0)) {
                return Err(Error::invalid("weights must be finite and nonnegative"));
            }
            w.clone()
        }
        None => vec![1.0; tails.len()],
    };

    let mut s = Operator::zeros(n);
    for (t, &w) in tails.iter().zip(&weights) {
        s.axpy(Complex64::new(w, 0.0), &t.adjoint().mul(t));
    }
    let (_, vecs) = hermitian_eigen(s.mat())?;

    let min_rank = (n as f64 * (1.0 - epsilon)).ceil() as usize;
    let achieved = |e: &Operator| -> f64 {
        tails
            .iter()
            .map(|t| {
                let m = if strategy.bilateral {
                    e.mul(t).mul(e)
                } else {
                    t.mul(e)
                };
                operator_norm(m.mat())
            })
            .fold(0.0, f64::max)
    };

    let mut best: Option<(Operator, f64)> = None;
    for r in (min_rank..=n).rev() {
        let mut e = Operator::zeros(n);
        {
            let mat = e.mat_mut();
            for c in 0..r {
                for row in 0..n {
                    for col in 0..n {
                        mat[(row, col)] += vecs[(row, c)] * vecs[(col, c)].conj();
                    }
                }
            }
        }
        let sup = achieved(&e);
        if best.as_ref().map_or(true, |(_, b)| sup < *b) {
            best = Some((e, sup));
        }
    }
    let (e, sup) = best.expect("rank range is nonempty");
    Ok((Projection::new(e, 1e-8)?, sup))
}

fn check_grid(grid: &[usize], d: usize) -> Result<()> {
    if grid.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: grid.len(),
        });
    }
    if grid.iter().any(|&g| g == 0) {
        return Err(Error::invalid("grid resolution must be >= 1 per axis"));
    }
    Ok(())
}

/// `max_lambda ||twisted_average(sys, x, lambda, n) * e||_inf` over the
/// root-of-unity lattice with `grid[j]` points on axis `j`, via one
/// d-dimensional transform of the folded powers `T^k(x)`.
pub fn uniform_ww_sup(
    sys: &MatrixSystem,
    x: &Operator,
    e: &Projection,
    n: &MultiIndex,
    grid: &[usize],
) -> Result<f64> {
    check_grid(grid, sys.dim_params())?;
    if e.dim() != sys.dim_matrix() {
        return Err(Error::DimensionMismatch {
            expected: sys.dim_matrix(),
            got: e.dim(),
        });
    }
    let nm = sys.dim_matrix();
    let cells: usize = grid.iter().product();
    let mut folded = vec![Operator::zeros(nm); cells];
    let flat = |k: &[i64]| -> usize {
        let mut idx = 0usize;
        for (j, &kj) in k.iter().enumerate() {
            idx = idx * grid[j] + (kj.rem_euclid(grid[j] as i64)) as usize;
        }
        idx
    };
    for_each_power(sys, x, n, |k, tkx| {
        folded[flat(k)].axpy(Complex64::new(1.0, 0.0), tkx);
    });

    // One scalar transform per matrix entry; reassemble per grid cell.
    let shape = IxDyn(grid);
    let mut twists = vec![Operator::zeros(nm); cells];
    for row in 0..nm {
        for col in 0..nm {
            let mut entry = ArrayD::from_elem(shape.clone(), Complex64::new(0.0, 0.0));
            for (cell, op) in folded.iter().enumerate() {
                entry.as_slice_mut().unwrap()[cell] = op.mat()[(row, col)];
            }
            let sums = root_of_unity_sums(&entry);
            let flat_sums = sums.as_slice().unwrap();
            for (cell, op) in twists.iter_mut().enumerate() {
                op.mat_mut()[(row, col)] = flat_sums[cell];
            }
        }
    }

    let norm = 1.0 / n.box_volume();
    let mut sup = 0.0f64;
    for m in &twists {
        let compressed = m.mul(e.op()).scale(Complex64::new(norm, 0.0));
        sup = sup.max(operator_norm(compressed.mat()));
    }
    Ok(sup)
}

/// Same supremum without the transform: loop over every grid point. Reference
/// path for the agreement test; cost grows with the grid volume.
pub fn uniform_ww_sup_naive(
    sys: &MatrixSystem,
    x: &Operator,
    e: &Projection,
    n: &MultiIndex,
    grid: &[usize],
) -> Result<f64> {
    check_grid(grid, sys.dim_params())?;
    if e.dim() != sys.dim_matrix() {
        return Err(Error::DimensionMismatch {
            expected: sys.dim_matrix(),
            got: e.dim(),
        });
    }
    let mut sup = 0.0f64;
    let his: Vec<i64> = grid.iter().map(|&g| g as i64 - 1).collect();
    for q in crate::lattice::box_iter(&vec![0; grid.len()], &his) {
        let angles: Vec<f64> = q
            .iter()
            .zip(grid)
            .map(|(&qj, &gj)| qj as f64 / gj as f64)
            .collect();
        let lambda = TorusPoint::new(angles)?;
        let avg = twisted_average(sys, x, &lambda, n)?;
        sup = sup.max(operator_norm(avg.mul(e.op()).mat()));
    }
    Ok(sup)
}
