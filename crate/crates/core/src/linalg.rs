//! Dense complex linear algebra for small matrices.
//!
//! Everything the crate diagonalizes is Hermitian or unitary (hence normal)
//! and of modest size, so a cyclic complex Jacobi eigensolver is used: it is
//! deterministic, needs no external backend, and delivers eigenvectors
//! orthonormal to a few ulps, which the 1e-10 projector identities downstream
//! rely on.
//!
//! Unitaries are diagonalized through their commuting Hermitian parts
//! `H = (U + U*)/2`, `K = (U - U*)/(2i)`; families of commuting unitaries are
//! handled by recursive refinement: diagonalize one Hermitian piece, split
//! eigenspaces by clustering, restrict the next piece to each cluster.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub fn identity(n: usize) -> Array2<Complex64> {
    Array2::from_shape_fn((n, n), |(i, j)| {
        if i == j {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

pub fn adjoint(a: &Array2<Complex64>) -> Array2<Complex64> {
    let (r, c) = a.dim();
    Array2::from_shape_fn((c, r), |(i, j)| a[(j, i)].conj())
}

pub fn frobenius_norm(a: &Array2<Complex64>) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn off_diagonal_norm(a: &Array2<Complex64>) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi sweeps.
///
/// Returns eigenvalues in ascending order and the matrix whose columns are the
/// corresponding orthonormal eigenvectors, so `a = V diag(w) V*`.
pub fn hermitian_eigen(a: &Array2<Complex64>) -> Result<(Vec<f64>, Array2<Complex64>)> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::invalid("hermitian_eigen requires a square matrix"));
    }
    let herm_defect = {
        let adj = adjoint(a);
        frobenius_norm(&(a - &adj))
    };
    let scale = frobenius_norm(a).max(1e-300);
    if herm_defect > 1e-8 * scale {
        return Err(Error::invalid(format!(
            "matrix is not Hermitian (defect {herm_defect:.3e})"
        )));
    }

    let mut m = a.clone();
    let mut v = identity(n);
    let tol = 1e-30_f64.max(1e-28 * scale * scale); // squared off-norm target
    let max_sweeps = 60;

    for _ in 0..max_sweeps {
        let off2 = off_diagonal_norm(&m).powi(2);
        if off2 <= tol {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                let abs = apq.norm();
                if abs < 1e-300 {
                    continue;
                }
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                // Unitary rotation J with J[pp]=c, J[pq]=s*phi, J[qp]=-s*conj(phi),
                // J[qq]=c annihilating the (p,q) entry; phi = apq/|apq|.
                let phi = apq / abs;
                let tau = (aqq - app) / (2.0 * abs);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // rows/cols p and q of m: m <- J* m J
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = mkp * c - mkq * phi.conj() * s;
                    m[(k, q)] = mkp * phi * s + mkq * c;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = mpk * c - mqk * phi * s;
                    m[(q, k)] = mpk * phi.conj() * s + mqk * c;
                }
                // keep Hermitian structure exact where it matters
                m[(p, q)] = Complex64::new(0.0, 0.0);
                m[(q, p)] = Complex64::new(0.0, 0.0);
                m[(p, p)] = Complex64::new(m[(p, p)].re, 0.0);
                m[(q, q)] = Complex64::new(m[(q, q)].re, 0.0);

                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c - vkq * phi.conj() * s;
                    v[(k, q)] = vkp * phi * s + vkq * c;
                }
            }
        }
    }

    let mut pairs: Vec<(f64, usize)> = (0..n).map(|i| (m[(i, i)].re, i)).collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("eigenvalues are finite"));
    let values: Vec<f64> = pairs.iter().map(|&(w, _)| w).collect();
    let mut vectors = Array2::zeros((n, n));
    for (dst, &(_, src)) in pairs.iter().enumerate() {
        for r in 0..n {
            vectors[(r, dst)] = v[(r, src)];
        }
    }
    Ok((values, vectors))
}

/// Largest singular value. Uses the Hermitian eigensolver on `a* a` up to
/// 64x64 and power iteration with a fixed deterministic start above that.
pub fn operator_norm(a: &Array2<Complex64>) -> f64 {
    let (r, c) = a.dim();
    if r == 0 || c == 0 {
        return 0.0;
    }
    let gram = adjoint(a).dot(a);
    if c <= 64 {
        let (w, _) = hermitian_eigen(&gram).expect("gram matrix is Hermitian");
        w.last().copied().unwrap_or(0.0).max(0.0).sqrt()
    } else {
        power_iteration_norm(&gram).max(0.0).sqrt()
    }
}

fn power_iteration_norm(gram: &Array2<Complex64>) -> f64 {
    let n = gram.nrows();
    // deterministic start with all Fourier modes populated
    let mut v: Vec<Complex64> = (0..n)
        .map(|i| Complex64::from_polar(1.0, 0.7 * i as f64 + 0.31))
        .collect();
    let mut lambda = 0.0;
    for _ in 0..500 {
        let mut w = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..n {
                acc += gram[(i, j)] * v[j];
            }
            w[i] = acc;
        }
        let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        for z in &mut w {
            *z /= norm;
        }
        let prev = lambda;
        lambda = norm;
        v = w;
        if (lambda - prev).abs() <= 1e-13 * lambda.max(1.0) {
            break;
        }
    }
    lambda
}

/// Groups were produced in ascending order; split whenever the gap between
/// consecutive values exceeds `tol`.
fn cluster_ranges(values: &[f64], tol: f64) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || values[i] - values[i - 1] > tol {
            out.push(start..i);
            start = i;
        }
    }
    out
}

/// Common orthonormal eigenbasis of a family of commuting unitaries.
///
/// Returns `(v, thetas)` where the columns of `v` are the joint eigenvectors
/// and `thetas[j][c]` is the eigenvalue of `mats[j]` on column `c`.
pub fn simultaneous_unitary_eigenbasis(
    mats: &[Array2<Complex64>],
    cluster_tol: f64,
) -> Result<(Array2<Complex64>, Vec<Vec<Complex64>>)> {
    if mats.is_empty() {
        return Err(Error::invalid("need at least one matrix"));
    }
    let n = mats[0].nrows();
    for m in mats {
        if m.dim() != (n, n) {
            return Err(Error::invalid("matrices must share a square shape"));
        }
    }

    // Hermitian and anti-Hermitian parts of every unitary, interleaved.
    let mut herms: Vec<Array2<Complex64>> = Vec::with_capacity(2 * mats.len());
    for u in mats {
        let ua = adjoint(u);
        let h = (u + &ua).mapv(|z| z * 0.5);
        let k = (u - &ua).mapv(|z| z * Complex64::new(0.0, -0.5));
        herms.push(h);
        herms.push(k);
    }

    // Blocks of columns of `basis` spanning joint invariant subspaces.
    let mut basis = identity(n);
    let mut blocks: Vec<std::ops::Range<usize>> = vec![0..n];

    for h in &herms {
        let mut next_blocks = Vec::new();
        for block in &blocks {
            let width = block.len();
            if width == 1 {
                next_blocks.push(block.clone());
                continue;
            }
            // restriction of h to the block: q* h q
            let q = basis.slice(ndarray::s![.., block.clone()]).to_owned();
            let restricted = adjoint(&q).dot(h).dot(&q);
            // symmetrize away roundoff before Jacobi
            let restricted = {
                let adj = adjoint(&restricted);
                (&restricted + &adj).mapv(|z| z * 0.5)
            };
            let (w, vecs) = hermitian_eigen(&restricted)?;
            let rotated = q.dot(&vecs);
            basis
                .slice_mut(ndarray::s![.., block.clone()])
                .assign(&rotated);
            for sub in cluster_ranges(&w, cluster_tol) {
                next_blocks.push(block.start + sub.start..block.start + sub.end);
            }
        }
        blocks = next_blocks;
    }

    // Rayleigh quotients give the unitary eigenvalues on each column.
    let mut thetas = vec![vec![Complex64::new(0.0, 0.0); n]; mats.len()];
    for (j, u) in mats.iter().enumerate() {
        for c in 0..n {
            let col = basis.column(c);
            let mut uy = vec![Complex64::new(0.0, 0.0); n];
            for r in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    acc += u[(r, k)] * col[k];
                }
                uy[r] = acc;
            }
            let mut theta = Complex64::new(0.0, 0.0);
            for r in 0..n {
                theta += col[r].conj() * uy[r];
            }
            thetas[j][c] = theta;
        }
    }
    Ok((basis, thetas))
}
