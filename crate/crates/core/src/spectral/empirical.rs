//! Empirical spectral densities of windowed sequences.
//!
//! For a sequence `a` truncated to the box `[0, n]` the empirical density is
//! the nonnegative trig polynomial
//!
//! ```text
//! f(z) = (1/|n+1|) |sum_{0<=k<=n} a(k) conj(z)^k|^2,
//! ```
//!
//! whose Fourier-Stieltjes coefficients are the windowed autocorrelations
//!
//! ```text
//! sigma_hat(m) = (1/|n+1|) sum_{k, k+m in [0,n]} conj(a(k)) a(k+m).
//! ```
//!
//! The fast path computes all of them at once by FFT; the definitional
//! double-loop path is kept alongside as a cross-check oracle.

use ndarray::ArrayD;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::windowed_autocorrelation;
use crate::lattice::{for_each_box, MultiIndex};
use crate::spectral::measure::{TorusMeasure, TorusPolynomial};
use crate::spectral::FourierCoeffs;
use crate::sum::{KahanC64, KahanF64};
use crate::torus::TorusPoint;
use crate::weights::WeightSequence;

/// Fourier data of one empirical density; coefficients live on `[-n, n]`
/// (row-major, lag `m` at offset `m + n`) and are exactly Hermitian. Lags
/// beyond the box belong to the polynomial too: they are exactly zero.
#[derive(Debug, Clone)]
pub struct EmpiricalDensity {
    n: MultiIndex,
    coeffs: ArrayD<Complex64>,
}

fn window_table(a: &WeightSequence, n: &MultiIndex) -> Result<ArrayD<Complex64>> {
    n.check_dim(a.dim())?;
    if n.0.iter().any(|&v| v < 0) {
        return Err(Error::invalid("truncation box must be >= 0"));
    }
    let hi = a.hi();
    for axis in 0..a.dim() {
        if a.lo().0[axis] > 0 || hi.0[axis] < n.0[axis] {
            return Err(Error::BoxExceeded(format!(
                "truncation {n} exceeds the stored box [{}, {}]",
                a.lo(),
                hi
            )));
        }
    }
    let view = a.flat_view();
    let shape: Vec<usize> = n.0.iter().map(|&v| (v + 1) as usize).collect();
    let mut vals = Vec::with_capacity(n.box_volume() as usize);
    let zeros = vec![0i64; a.dim()];
    for_each_box(&zeros, &n.0, |k| vals.push(view.get(k)));
    Ok(ArrayD::from_shape_vec(shape, vals).expect("shape matches"))
}

/// Empirical density at truncation `n` (requires `[0, n]` inside `a`'s box).
/// FFT-accelerated; coefficients are Hermitian-symmetrized (bitwise exact) and
/// the center is recomputed directly so `sigma_hat(0) = avg |a|^2` exactly.
pub fn empirical_density(a: &WeightSequence, n: &MultiIndex) -> Result<EmpiricalDensity> {
    let table = window_table(a, n)?;
    let volume = n.box_volume();
    let mut coeffs = windowed_autocorrelation(&table);
    coeffs.mapv_inplace(|c| c / volume);

    // Project onto exactly Hermitian tables: c(m) <- (c(m) + conj(c(-m))) / 2.
    // IEEE addition commutes, so the symmetry then holds bitwise.
    let halfwidth = n.clone();
    let old = coeffs.clone();
    let neg = halfwidth.neg();
    for_each_box(&neg.0, &halfwidth.0, |m| {
        let plus: Vec<usize> = m
            .iter()
            .zip(&halfwidth.0)
            .map(|(&v, &h)| (v + h) as usize)
            .collect();
        let minus: Vec<usize> = m
            .iter()
            .zip(&halfwidth.0)
            .map(|(&v, &h)| (h - v) as usize)
            .collect();
        coeffs[plus.as_slice()] = (old[plus.as_slice()] + old[minus.as_slice()].conj()) / 2.0;
    });

    // Exact total mass at the center.
    let mut energy = KahanF64::default();
    for v in table.iter() {
        energy.add(v.norm_sqr());
    }
    let center: Vec<usize> = n.0.iter().map(|&v| v as usize).collect();
    coeffs[center.as_slice()] = Complex64::new(energy.value() / volume, 0.0);

    Ok(EmpiricalDensity { n: n.clone(), coeffs })
}

/// Definitional path: each coefficient by its own windowed double sum. Slow;
/// exists to pin the FFT path down in tests and stays exact for tiny boxes.
pub fn empirical_density_direct(a: &WeightSequence, n: &MultiIndex) -> Result<EmpiricalDensity> {
    let table = window_table(a, n)?;
    let volume = n.box_volume();
    let shape: Vec<usize> = n.0.iter().map(|&v| (2 * v + 1) as usize).collect();
    let mut coeffs = ArrayD::zeros(shape);
    let neg = n.neg();
    for_each_box(&neg.0, &n.0, |m| {
        // k and k+m both inside [0, n].
        let lo: Vec<i64> = m.iter().map(|&mj| 0.max(-mj)).collect();
        let hi: Vec<i64> = m
            .iter()
            .zip(&n.0)
            .map(|(&mj, &nj)| nj.min(nj - mj))
            .collect();
        let mut acc = KahanC64::default();
        let mut kp = vec![0usize; m.len()];
        let mut kk = vec![0usize; m.len()];
        for_each_box(&lo, &hi, |k| {
            for j in 0..k.len() {
                kk[j] = k[j] as usize;
                kp[j] = (k[j] + m[j]) as usize;
            }
            acc.add(table[kk.as_slice()].conj() * table[kp.as_slice()]);
        });
        let idx: Vec<usize> = m
            .iter()
            .zip(&n.0)
            .map(|(&mj, &nj)| (mj + nj) as usize)
            .collect();
        coeffs[idx.as_slice()] = acc.value() / volume;
    });
    Ok(EmpiricalDensity { n: n.clone(), coeffs })
}

impl EmpiricalDensity {
    /// Truncation box (also the coefficient halfwidth).
    pub fn n(&self) -> &MultiIndex {
        &self.n
    }

    /// Total mass `sigma_hat(0) = (1/|n+1|) sum |a(k)|^2`.
    pub fn mass(&self) -> f64 {
        let center: Vec<usize> = self.n.0.iter().map(|&v| v as usize).collect();
        self.coeffs[center.as_slice()].re
    }

    /// `sigma_hat(m)`; exactly zero beyond the degree box.
    pub fn coeff(&self, m: &MultiIndex) -> Complex64 {
        let mut idx = Vec::with_capacity(m.dim());
        for (&mj, &nj) in m.0.iter().zip(&self.n.0) {
            if mj.abs() > nj {
                return Complex64::new(0.0, 0.0);
            }
            idx.push((mj + nj) as usize);
        }
        self.coeffs[idx.as_slice()]
    }

    /// Largest bitwise Hermitian defect (should be exactly 0).
    pub fn hermitian_defect(&self) -> f64 {
        let neg = self.n.neg();
        let mut defect: f64 = 0.0;
        let mut buf = MultiIndex::zeros(self.n.dim());
        for_each_box(&neg.0, &self.n.0, |m| {
            buf.0.copy_from_slice(m);
            defect = defect.max((self.coeff(&buf.neg()) - self.coeff(&buf).conj()).norm());
        });
        defect
    }

    /// Density value `f(z) = sum_m sigma_hat(m) conj(z)^m` (real part; the
    /// Hermitian table makes the imaginary part cancel).
    pub fn eval(&self, z: &TorusPoint) -> f64 {
        let neg = self.n.neg();
        let mut acc = KahanC64::default();
        let mut buf = MultiIndex::zeros(self.n.dim());
        for_each_box(&neg.0, &self.n.0, |m| {
            buf.0.copy_from_slice(m);
            let c = self.coeff(&buf);
            if c != Complex64::new(0.0, 0.0) {
                acc.add(c * z.pow(&buf).conj());
            }
        });
        acc.value().re
    }

    /// Package as a measure with trig-polynomial density (validated there).
    pub fn to_measure(&self) -> Result<TorusMeasure> {
        // Density coefficient at l is sigma_hat(-l).
        let neg = self.n.neg();
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        let mut buf = MultiIndex::zeros(self.n.dim());
        for_each_box(&neg.0, &self.n.0, |l| {
            buf.0.copy_from_slice(l);
            coeffs.push(self.coeff(&buf.neg()));
        });
        let poly = TorusPolynomial::new(self.n.clone(), coeffs)?;
        TorusMeasure::with_parts(self.n.dim(), Vec::new(), Some(poly))
    }
}

impl FourierCoeffs for EmpiricalDensity {
    fn dim(&self) -> usize {
        self.n.dim()
    }

    fn coeff(&self, m: &MultiIndex) -> Complex64 {
        EmpiricalDensity::coeff(self, m)
    }

    /// All lags are exact for a trig-polynomial density (zero beyond degree).
    fn available_halfwidth(&self) -> Option<MultiIndex> {
        None
    }
}
