//! Correlation estimates, stability ladders, Marcinkiewicz seminorms, and
//! amplitude estimates for weight sequences.
//!
//! The central object is the windowed correlation
//!
//! ```text
//! gamma_n(m) = (1/|n+1|) sum_{k_j = max(0, -m_j)}^{n_j} conj(a(k)) a(k+m),
//! ```
//!
//! whose convergence along a ladder of boxes is the membership probe for the
//! space of sequences that have correlations. All sums run compensated so that
//! results are reproducible to ~1e-12 relative across summation orders.

use ndarray::ArrayD;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{box_iter, for_each_box, Ladder, MultiIndex};
use crate::sum::{KahanC64, KahanF64};
use crate::torus::TorusPoint;
use crate::weights::sequence::WeightSequence;

fn check_nonnegative(n: &MultiIndex) -> Result<()> {
    if n.0.iter().any(|&v| v < 0) {
        return Err(Error::invalid(format!("truncation box {n} must be >= 0")));
    }
    Ok(())
}

/// The windowed correlation at lag `m`, truncation `n`: exactly the finite
/// expression above. For `m >= 0` and a trig polynomial this reproduces the
/// closed form up to geometric cross terms; for negative components of `m` the
/// shortened index range introduces an extra `O(|m|/n)` deficit (the estimator
/// is only Hermitian in the limit).
pub fn correlation_estimate(a: &WeightSequence, m: &MultiIndex, n: &MultiIndex) -> Result<Complex64> {
    m.check_dim(a.dim())?;
    n.check_dim(a.dim())?;
    check_nonnegative(n)?;
    let needed = MultiIndex(
        n.0.iter()
            .zip(&m.0)
            .map(|(&nj, &mj)| nj.max(nj + mj))
            .collect(),
    );
    a.require_coverage(&needed)?;
    Ok(correlation_sum(a, &m.0, &n.0))
}

/// Unchecked core sum; assumes dims agree and coverage was checked.
fn correlation_sum(a: &WeightSequence, m: &[i64], n: &[i64]) -> Complex64 {
    let view = a.flat_view();
    let lo: Vec<i64> = m.iter().map(|&mj| 0.max(-mj)).collect();
    let mut shifted = vec![0i64; m.len()];
    let mut acc = KahanC64::default();
    for_each_box(&lo, n, |k| {
        for (s, (&kj, &mj)) in shifted.iter_mut().zip(k.iter().zip(m)) {
            *s = kj + mj;
        }
        let ak = view.get(k);
        if ak != Complex64::new(0.0, 0.0) {
            acc.add(ak.conj() * view.get(&shifted));
        }
    });
    let volume: f64 = n.iter().map(|&nj| (nj + 1) as f64).product();
    acc.value() / volume
}

#[derive(Debug, Clone, Serialize)]
pub struct CorrelationRow {
    pub m: Vec<i64>,
    pub re: f64,
    pub im: f64,
    pub ladder_spread: f64,
}

/// Correlation estimates on the symmetric lag box `[-M, M]` along a ladder of
/// truncations, with per-lag stability diagnostics.
#[derive(Debug, Clone)]
pub struct CorrelationTable {
    halfwidth: MultiIndex,
    ladder: Ladder,
    /// One table per rung, each over `[-M, M]` (row-major, index `m + M`).
    rungs: Vec<ArrayD<Complex64>>,
    stability_tol: f64,
}

/// Estimates over the lag box `[-halfwidth, halfwidth]` at every rung of
/// `ladder`. The sequence "appears in S" at tolerance `stability_tol` when all
/// successive rung differences stay below it for every lag.
pub fn correlation_table(
    a: &WeightSequence,
    halfwidth: &MultiIndex,
    ladder: &Ladder,
    stability_tol: f64,
) -> Result<CorrelationTable> {
    halfwidth.check_dim(a.dim())?;
    if ladder.dim() != a.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: ladder.dim() });
    }
    if halfwidth.0.iter().any(|&h| h < 0) {
        return Err(Error::invalid("lag halfwidth must be >= 0"));
    }
    if !(stability_tol > 0.0) {
        return Err(Error::invalid("stability tolerance must be positive"));
    }
    let top = ladder.top();
    a.require_coverage(&top.add(halfwidth))?;

    let shape: Vec<usize> = halfwidth.0.iter().map(|&h| (2 * h + 1) as usize).collect();
    let neg = halfwidth.neg();
    let mut rungs = Vec::with_capacity(ladder.0.len());
    for n in &ladder.0 {
        check_nonnegative(n)?;
        let mut vals = Vec::with_capacity(halfwidth.symmetric_volume() as usize);
        for m in box_iter(&neg.0, &halfwidth.0) {
            vals.push(correlation_sum(a, &m, &n.0));
        }
        rungs.push(ArrayD::from_shape_vec(shape.clone(), vals).expect("shape matches"));
    }
    Ok(CorrelationTable {
        halfwidth: halfwidth.clone(),
        ladder: ladder.clone(),
        rungs,
        stability_tol,
    })
}

impl CorrelationTable {
    pub fn dim(&self) -> usize {
        self.halfwidth.dim()
    }

    pub fn halfwidth(&self) -> &MultiIndex {
        &self.halfwidth
    }

    pub fn ladder(&self) -> &Ladder {
        &self.ladder
    }

    pub fn stability_tol(&self) -> f64 {
        self.stability_tol
    }

    fn index_of(&self, m: &MultiIndex) -> Result<Vec<usize>> {
        m.check_dim(self.dim())?;
        let mut idx = Vec::with_capacity(m.dim());
        for (&mj, &hj) in m.0.iter().zip(&self.halfwidth.0) {
            if mj.abs() > hj {
                return Err(Error::invalid(format!(
                    "lag {m} outside stored halfwidth {}",
                    self.halfwidth
                )));
            }
            idx.push((mj + hj) as usize);
        }
        Ok(idx)
    }

    /// Estimate at the top rung.
    pub fn entry(&self, m: &MultiIndex) -> Result<Complex64> {
        let idx = self.index_of(m)?;
        Ok(self.rungs[self.rungs.len() - 1][idx.as_slice()])
    }

    /// Estimate at ladder rung `r` (0 = smallest box).
    pub fn rung_entry(&self, r: usize, m: &MultiIndex) -> Result<Complex64> {
        if r >= self.rungs.len() {
            return Err(Error::invalid(format!("rung {r} out of range")));
        }
        let idx = self.index_of(m)?;
        Ok(self.rungs[r][idx.as_slice()])
    }

    pub fn rung_count(&self) -> usize {
        self.rungs.len()
    }

    /// Largest successive-rung difference at lag `m` (0 for a single rung).
    pub fn ladder_spread(&self, m: &MultiIndex) -> Result<f64> {
        let idx = self.index_of(m)?;
        let mut spread: f64 = 0.0;
        for w in self.rungs.windows(2) {
            spread = spread.max((w[1][idx.as_slice()] - w[0][idx.as_slice()]).norm());
        }
        Ok(spread)
    }

    /// Largest spread over every stored lag.
    pub fn max_spread(&self) -> f64 {
        let mut spread: f64 = 0.0;
        for w in self.rungs.windows(2) {
            for (a, b) in w[0].iter().zip(w[1].iter()) {
                spread = spread.max((b - a).norm());
            }
        }
        spread
    }

    /// True when every lag's ladder stabilized below the tolerance.
    pub fn appears_in_s(&self) -> bool {
        self.max_spread() <= self.stability_tol
    }

    /// Largest `|gamma(-m) - conj(gamma(m))|` at the top rung. The windowed
    /// estimator is only asymptotically Hermitian; this reports the finite-n
    /// defect rather than hiding it by symmetrization.
    pub fn hermitian_defect(&self) -> f64 {
        let top = &self.rungs[self.rungs.len() - 1];
        let neg = self.halfwidth.neg();
        let mut defect: f64 = 0.0;
        for m in box_iter(&neg.0, &self.halfwidth.0) {
            let plus: Vec<usize> = m
                .iter()
                .zip(&self.halfwidth.0)
                .map(|(&mj, &hj)| (mj + hj) as usize)
                .collect();
            let minus: Vec<usize> = m
                .iter()
                .zip(&self.halfwidth.0)
                .map(|(&mj, &hj)| (hj - mj) as usize)
                .collect();
            defect = defect.max((top[minus.as_slice()] - top[plus.as_slice()].conj()).norm());
        }
        defect
    }

    /// Flat row export (top-rung values plus spreads), row-major over lags.
    pub fn to_rows(&self) -> Vec<CorrelationRow> {
        let top = &self.rungs[self.rungs.len() - 1];
        let neg = self.halfwidth.neg();
        let mut rows = Vec::new();
        for m in box_iter(&neg.0, &self.halfwidth.0) {
            let mi = MultiIndex(m.clone());
            let idx = self.index_of(&mi).expect("in-range by construction");
            let v = top[idx.as_slice()];
            rows.push(CorrelationRow {
                m,
                re: v.re,
                im: v.im,
                ladder_spread: self.ladder_spread(&mi).expect("in-range"),
            });
        }
        rows
    }

    /// CSV export with columns `m1..md, re, im, ladder_spread`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for j in 1..=self.dim() {
            out.push_str(&format!("m{j},"));
        }
        out.push_str("re,im,ladder_spread\n");
        for row in self.to_rows() {
            for c in &row.m {
                out.push_str(&format!("{c},"));
            }
            out.push_str(&format!("{},{},{}\n", row.re, row.im, row.ladder_spread));
        }
        out
    }
}

/// Marcinkiewicz seminorm at truncation `n`:
///
/// ```text
/// ((1/|n+1|) sum_{k=-n}^{n} |A(k)|^p)^(1/p)
/// ```
///
/// for finite `p >= 1`; for `p = infinity` the sup of `|A|` over the stored
/// box (the two-sided sup stabilizes there once `n` covers the support).
pub fn marcinkiewicz_seminorm(a: &WeightSequence, p: f64, n: &MultiIndex) -> Result<f64> {
    n.check_dim(a.dim())?;
    check_nonnegative(n)?;
    if p.is_nan() || p < 1.0 {
        return Err(Error::invalid("seminorm order must satisfy p >= 1"));
    }
    if p.is_infinite() {
        return Ok(a.sup_norm());
    }
    a.require_coverage(n)?;
    let view = a.flat_view();
    let neg = n.neg();
    let mut acc = KahanF64::default();
    for_each_box(&neg.0, &n.0, |k| {
        let v = view.get(k).norm();
        if v != 0.0 {
            acc.add(v.powf(p));
        }
    });
    Ok((acc.value() / n.box_volume()).powf(1.0 / p))
}

/// Truncated semi-inner product `(1/|n+1|) sum_{k=-n}^{n} conj(A(k)) B(k)`.
pub fn semi_inner_product(a: &WeightSequence, b: &WeightSequence, n: &MultiIndex) -> Result<Complex64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: b.dim() });
    }
    n.check_dim(a.dim())?;
    check_nonnegative(n)?;
    a.require_coverage(n)?;
    b.require_coverage(n)?;
    let va = a.flat_view();
    let vb = b.flat_view();
    let neg = n.neg();
    let mut acc = KahanC64::default();
    for_each_box(&neg.0, &n.0, |k| {
        let x = va.get(k);
        if x != Complex64::new(0.0, 0.0) {
            acc.add(x.conj() * vb.get(k));
        }
    });
    Ok(acc.value() / n.box_volume())
}

/// Twisted Cesaro average `(1/|n+1|) sum_{k=0}^{n} a(k) conj(z)^k`, the
/// finite-`n` amplitude.
pub fn amplitude_estimate(a: &WeightSequence, z: &TorusPoint, n: &MultiIndex) -> Result<Complex64> {
    if z.dim() != a.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: z.dim() });
    }
    n.check_dim(a.dim())?;
    check_nonnegative(n)?;
    a.require_coverage(n)?;
    let view = a.flat_view();
    let zeros = vec![0i64; a.dim()];
    let mut acc = KahanC64::default();
    let mut buf = MultiIndex::zeros(a.dim());
    for_each_box(&zeros, &n.0, |k| {
        let ak = view.get(k);
        if ak != Complex64::new(0.0, 0.0) {
            buf.0.copy_from_slice(k);
            // z.pow(k).conj() rather than z.conj().pow(k): bitwise conjugate of
            // the same phase evaluation, so matched-frequency products cancel
            // to machine precision.
            acc.add(ak * z.pow(&buf).conj());
        }
    });
    Ok(acc.value() / n.box_volume())
}
