//! Operator-valued correlations and spectral coefficients.
//!
//! For a system `T` and an element `x`,
//!
//! ```text
//! gamma_x(m)      = tau((T^m x)* x),
//! sigma_hat_n(m)  = (1/|n+1|) sum_{0<=k<=n, -m<=k<=n-m} T^{k+m}(x*) T^k(x).
//! ```
//!
//! Because each `T^k` is an automorphism, `T^{k+m}(x*) T^k(x) =
//! T^k(T^m(x*) x)`, so the coefficient is an ergodic-type sum of a single
//! operator over a clipped box and factors per axis. A deliberately naive
//! companion path tabulates every `T^k(x)` and multiplies pairs; the two must
//! agree to rounding, which is the module's central identity test.

use num_complex::Complex64;

use crate::error::Result;
use crate::lattice::MultiIndex;
use crate::ncsystem::operator::Operator;
use crate::ncsystem::system::{apply_power, for_each_power, MatrixSystem};

/// `gamma_x(m) = tau((T^m x)* x)`; positive definite in `m` by construction.
pub fn operator_correlation(
    sys: &MatrixSystem,
    x: &Operator,
    m: &MultiIndex,
) -> Result<Complex64> {
    let tmx = apply_power(sys, x, m)?;
    Ok(tmx.inner(x))
}

/// Per-axis window `[max(0,-m_j), min(n_j, n_j-m_j)]`; `None` when empty.
fn clipped_box(m: &MultiIndex, n: &MultiIndex) -> Option<(MultiIndex, MultiIndex)> {
    let mut lo = Vec::with_capacity(m.dim());
    let mut hi = Vec::with_capacity(m.dim());
    for (&mj, &nj) in m.0.iter().zip(&n.0) {
        let l = 0i64.max(-mj);
        let h = nj.min(nj - mj);
        if l > h {
            return None;
        }
        lo.push(l);
        hi.push(h);
    }
    Some((MultiIndex(lo), MultiIndex(hi)))
}

/// The displayed finite operator sum, evaluated through the factorized form
/// `(1/|n+1|) T^lo sum_{0<=k<=hi-lo} T^k (T^m(x*) x)`.
pub fn operator_spectral_coeff(
    sys: &MatrixSystem,
    x: &Operator,
    m: &MultiIndex,
    n: &MultiIndex,
) -> Result<Operator> {
    m.check_dim(sys.dim_params())?;
    n.check_dim(sys.dim_params())?;
    let norm = Complex64::new(1.0 / n.box_volume(), 0.0);
    let Some((lo, hi)) = clipped_box(m, n) else {
        return Ok(Operator::zeros(sys.dim_matrix()));
    };
    let base = apply_power(sys, &x.adjoint(), m)?.mul(x);
    let width = hi.sub(&lo);
    let mut acc = base;
    for (j, &w) in width.0.iter().enumerate() {
        let mut sum = acc.clone();
        let mut cur = acc;
        for _ in 0..w {
            cur = sys.apply(j, &cur);
            sum = sum.add(&cur);
        }
        acc = sum;
    }
    Ok(apply_power(sys, &acc, &lo)?.scale(norm))
}

/// Same coefficient by brute force: tabulate `T^k(x)` on `[0, n]`, then sum
/// `T^{k+m}(x)* T^k(x)` over the admissible `k`. Reference path for the
/// two-route identity test; cost and memory are O(|n+1|) operators.
pub fn operator_spectral_coeff_direct(
    sys: &MatrixSystem,
    x: &Operator,
    m: &MultiIndex,
    n: &MultiIndex,
) -> Result<Operator> {
    m.check_dim(sys.dim_params())?;
    n.check_dim(sys.dim_params())?;
    let mut table: Vec<Operator> = Vec::with_capacity(n.box_volume() as usize);
    for_each_power(sys, x, n, |_, tkx| table.push(tkx.clone()));
    let strides = {
        let mut s = vec![1i64; n.dim()];
        for j in (0..n.dim().saturating_sub(1)).rev() {
            s[j] = s[j + 1] * (n.0[j + 1] + 1);
        }
        s
    };
    let flat = |k: &[i64]| -> usize {
        k.iter().zip(&strides).map(|(&ki, &st)| ki * st).sum::<i64>() as usize
    };
    let mut acc = Operator::zeros(sys.dim_matrix());
    let Some((lo, hi)) = clipped_box(m, n) else {
        return Ok(acc);
    };
    for k in crate::lattice::box_iter(&lo.0, &hi.0) {
        let shifted: Vec<i64> = k.iter().zip(&m.0).map(|(&ki, &mi)| ki + mi).collect();
        let term = table[flat(&shifted)].adjoint().mul(&table[flat(&k)]);
        acc = acc.add(&term);
    }
    Ok(acc.scale(Complex64::new(1.0 / n.box_volume(), 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hermitian_eigen;
    use crate::ncsystem::system::{random_commuting_unitaries, DEFAULT_SYSTEM_TOL};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn quarter_system() -> MatrixSystem {
        let mut m = Operator::zeros(2).into_mat();
        m[(0, 0)] = c(1.0, 0.0);
        m[(1, 1)] = c(0.0, 1.0);
        MatrixSystem::new(vec![Operator::new(m).unwrap()], DEFAULT_SYSTEM_TOL).unwrap()
    }

    #[test]
    fn correlation_at_zero_is_l2_norm_squared() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let us = random_commuting_unitaries(&mut rng, 3, 2);
        let sys = MatrixSystem::new(us, DEFAULT_SYSTEM_TOL).unwrap();
        let x = Operator::random(&mut rng, 3);
        let g0 = operator_correlation(&sys, &x, &MultiIndex(vec![0, 0])).unwrap();
        assert!((g0 - c(x.norm_l2().powi(2), 0.0)).norm() < 1e-12);
    }

    #[test]
    fn quarter_rotation_correlation_closed_form() {
        // gamma(m) = conj((-i)^m) tau(x*x) = i^m / 2.
        let sys = quarter_system();
        let x = Operator::matrix_unit(2, 0, 1).unwrap();
        let i = c(0.0, 1.0);
        for m in -6i64..=6 {
            let got = operator_correlation(&sys, &x, &MultiIndex(vec![m])).unwrap();
            assert!((got - i.powi(m as i32) * 0.5).norm() < 1e-12, "m={m}");
        }
    }

    #[test]
    fn correlation_gram_matrices_are_psd() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..5 {
            let us = random_commuting_unitaries(&mut rng, 3, 2);
            let sys = MatrixSystem::new(us, DEFAULT_SYSTEM_TOL).unwrap();
            let x = Operator::random(&mut rng, 3);
            let ms: Vec<MultiIndex> = (0..5)
                .map(|_| MultiIndex(vec![rng.gen_range(-4..=4), rng.gen_range(-4..=4)]))
                .collect();
            let mut gram =
                ndarray::Array2::from_elem((ms.len(), ms.len()), c(0.0, 0.0));
            for (i, mi) in ms.iter().enumerate() {
                for (j, mj) in ms.iter().enumerate() {
                    gram[(i, j)] =
                        operator_correlation(&sys, &x, &mi.sub(mj)).unwrap();
                }
            }
            let (w, _) = hermitian_eigen(&gram).unwrap();
            let scale = x.norm_l2().powi(2);
            assert!(w[0] >= -1e-9 * scale.max(1.0), "min eigenvalue {}", w[0]);
        }
    }

    #[test]
    fn coeff_at_zero_is_positive_operator() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let us = random_commuting_unitaries(&mut rng, 4, 2);
        let sys = MatrixSystem::new(us, DEFAULT_SYSTEM_TOL).unwrap();
        let x = Operator::random(&mut rng, 4);
        let s0 = operator_spectral_coeff(&sys, &x, &MultiIndex(vec![0, 0]), &MultiIndex(vec![3, 4]))
            .unwrap();
        assert!(s0.approx_eq(&s0.adjoint(), 1e-10));
        let (w, _) = hermitian_eigen(s0.mat()).unwrap();
        assert!(w[0] >= -1e-10, "min eigenvalue {}", w[0]);
    }

    #[test]
    fn quarter_rotation_coeff_closed_form() {
        // sigma_hat_n(m) = ((n+1-|m|)/(n+1)) i^m E22 for |m| <= n.
        let sys = quarter_system();
        let x = Operator::matrix_unit(2, 0, 1).unwrap();
        let e22 = Operator::matrix_unit(2, 1, 1).unwrap();
        let n = MultiIndex(vec![7]);
        let i = c(0.0, 1.0);
        for m in -7i64..=7 {
            let got = operator_spectral_coeff(&sys, &x, &MultiIndex(vec![m]), &n).unwrap();
            let weight = (8 - m.abs()) as f64 / 8.0;
            let want = e22.scale(i.powi(m as i32) * weight);
            assert!(got.approx_eq(&want, 1e-12), "m={m}");
        }
        // |m| > n: empty window, zero coefficient.
        let far = operator_spectral_coeff(&sys, &x, &MultiIndex(vec![9]), &n).unwrap();
        assert!(far.approx_eq(&Operator::zeros(2), 0.0));
    }

    #[test]
    fn two_paths_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for round in 0..8 {
            let n_mat = 2 + (round % 3);
            let us = random_commuting_unitaries(&mut rng, n_mat, 2);
            let sys = MatrixSystem::new(us, DEFAULT_SYSTEM_TOL).unwrap();
            let x = Operator::random(&mut rng, n_mat);
            let n = MultiIndex(vec![rng.gen_range(2..=6), rng.gen_range(2..=6)]);
            let m = MultiIndex(vec![rng.gen_range(-5..=5), rng.gen_range(-5..=5)]);
            let fast = operator_spectral_coeff(&sys, &x, &m, &n).unwrap();
            let slow = operator_spectral_coeff_direct(&sys, &x, &m, &n).unwrap();
            let scale = x.norm_op().powi(2).max(1.0);
            assert!(
                fast.approx_eq(&slow, 1e-10 * scale),
                "round {round}: diff {}",
                fast.max_abs_diff(&slow)
            );
        }
    }

    #[test]
    fn trace_of_coeff_tracks_correlation() {
        // tau(sigma_hat_n(m)) approaches gamma_x(m) as n grows; report-style
        // check at moderate n for a 1d rotation system.
        let sys = quarter_system();
        let x = Operator::matrix_unit(2, 0, 1).unwrap();
        let m = MultiIndex(vec![2]);
        let g = operator_correlation(&sys, &x, &m).unwrap();
        let s = operator_spectral_coeff(&sys, &x, &m, &MultiIndex(vec![199])).unwrap();
        assert!((s.trace() - g).norm() < 0.02);
    }
}
