//! Measures on the d-torus and their finite-window diagnostics.
//!
//! The representable measures are sums of point atoms plus an absolutely
//! continuous part with trig-polynomial density (a Lebesgue decomposition;
//! singular-continuous parts are out of representational scope). Sequences
//! enter through their empirical spectral densities
//!
//! ```text
//! d sigma_a^n(z) = (1/|n+1|) |sum_{0<=k<=n} a(k) conj(z)^k|^2 dz,
//! ```
//!
//! whose Fourier coefficients are windowed autocorrelations. On top of the
//! coefficient view sit the classical criteria: point-mass extraction by
//! Dirichlet averaging, Wiener's continuity criterion, affinity bounds, and
//! weak-convergence pairings.

mod affinity;
mod empirical;
mod measure;

pub use affinity::{
    affinity, affinity_sequences, affinity_with, weak_convergence_check, ww_pointbound,
    AffinityReport, PointBoundReport, PointBoundRung, QuadratureConfig, TestFnReport,
    WeakConvergenceReport,
};
pub use empirical::{empirical_density, empirical_density_direct, EmpiricalDensity};
pub use measure::{fourier_stieltjes, AtomSpec, TorusMeasure, TorusPolynomial};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{for_each_box, MultiIndex};
use crate::sum::{KahanC64, KahanF64};
use crate::torus::TorusPoint;

/// Anything exposing Fourier-Stieltjes coefficients `int z^m d mu`.
pub trait FourierCoeffs {
    fn dim(&self) -> usize;

    /// `int z^m d mu`. Implementations whose coefficients are only known on a
    /// finite box return unspecified values outside it; gate access through
    /// [`FourierCoeffs::available_halfwidth`].
    fn coeff(&self, m: &MultiIndex) -> Complex64;

    /// Largest symmetric box on which coefficients are trustworthy; `None`
    /// means every lag is exact (closed-form measures, trig-poly densities).
    fn available_halfwidth(&self) -> Option<MultiIndex>;
}

fn check_window<C: FourierCoeffs + ?Sized>(coeffs: &C, h: &MultiIndex) -> Result<()> {
    h.check_dim(coeffs.dim())?;
    if h.0.iter().any(|&v| v < 0) {
        return Err(Error::invalid("coefficient window must be >= 0"));
    }
    if let Some(avail) = coeffs.available_halfwidth() {
        if !h.le(&avail) {
            return Err(Error::BoxExceeded(format!(
                "window {h} exceeds available coefficient box {avail}"
            )));
        }
    }
    Ok(())
}

/// Dirichlet average estimating the mass of the atom at `z`:
///
/// ```text
/// (1/prod(2n_j+1)) sum_{k=-n}^{n} conj(z)^k sigma_hat(k).
/// ```
///
/// The real part is the estimate; `imag_defect` reports the (ideally zero)
/// imaginary residue. For positive measures the value lies between roughly
/// `-0.22 * mass` (the flat window's worst sidelobe) and `mass`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PointMass {
    pub value: f64,
    pub imag_defect: f64,
}

pub fn point_mass<C: FourierCoeffs + ?Sized>(
    coeffs: &C,
    z: &TorusPoint,
    n: &MultiIndex,
) -> Result<PointMass> {
    check_window(coeffs, n)?;
    if z.dim() != coeffs.dim() {
        return Err(Error::DimensionMismatch { expected: coeffs.dim(), got: z.dim() });
    }
    let neg = n.neg();
    let mut acc = KahanC64::default();
    let mut buf = MultiIndex::zeros(n.dim());
    for_each_box(&neg.0, &n.0, |k| {
        buf.0.copy_from_slice(k);
        acc.add(z.pow(&buf).conj() * coeffs.coeff(&buf));
    });
    let avg = acc.value() / n.symmetric_volume();
    Ok(PointMass { value: avg.re, imag_defect: avg.im.abs() })
}

/// Wiener's criterion average `(1/prod(2h_j+1)) sum_{|l|<=h} |sigma_hat(l)|^2`;
/// tends to the sum of squared atom masses, so 0 exactly when the measure is
/// continuous. Normalization divides by the full window size so a Dirac gives
/// exactly 1 (the displayed variant with `prod(h_j+1)` differs by `2^d`).
pub fn wiener_continuity<C: FourierCoeffs + ?Sized>(coeffs: &C, h: &MultiIndex) -> Result<f64> {
    check_window(coeffs, h)?;
    let neg = h.neg();
    let mut acc = KahanF64::default();
    let mut buf = MultiIndex::zeros(h.dim());
    for_each_box(&neg.0, &h.0, |k| {
        buf.0.copy_from_slice(k);
        acc.add(coeffs.coeff(&buf).norm_sqr());
    });
    Ok(acc.value() / h.symmetric_volume())
}

impl FourierCoeffs for crate::weights::CorrelationTable {
    fn dim(&self) -> usize {
        CorrelationTable::dim(self)
    }

    fn coeff(&self, m: &MultiIndex) -> Complex64 {
        self.entry(m).unwrap_or(Complex64::new(0.0, 0.0))
    }

    fn available_halfwidth(&self) -> Option<MultiIndex> {
        Some(self.halfwidth().clone())
    }
}

use crate::weights::CorrelationTable;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dirac_point_mass_is_one_at_every_window() {
        let mu = TorusMeasure::dirac(TorusPoint::new(vec![0.37]).unwrap());
        for n in [1i64, 4, 17] {
            let pm = point_mass(&mu, &TorusPoint::new(vec![0.37]).unwrap(), &MultiIndex::new(vec![n]).unwrap())
                .unwrap();
            assert!((pm.value - 1.0).abs() < 1e-12, "n={n}: {}", pm.value);
            assert!(pm.imag_defect < 1e-12);
        }
    }

    #[test]
    fn haar_point_mass_is_reciprocal_window() {
        let mu = TorusMeasure::haar(2);
        let n = MultiIndex::new(vec![3, 5]).unwrap();
        let pm = point_mass(&mu, &TorusPoint::new(vec![0.1, 0.9]).unwrap(), &n).unwrap();
        assert!((pm.value - 1.0 / (7.0 * 11.0)).abs() < 1e-14);
    }

    #[test]
    fn two_atom_point_mass_separates() {
        // 0.3 and 0.7 at well-separated 8th roots of unity: exact at period windows.
        let u = TorusPoint::new(vec![0.0]).unwrap();
        let v = TorusPoint::new(vec![0.5]).unwrap();
        let mu = TorusMeasure::atomic(vec![(u.clone(), 0.3), (v, 0.7)]).unwrap();
        let pm = point_mass(&mu, &u, &MultiIndex::new(vec![256]).unwrap()).unwrap();
        // Window 513 is odd and v has period 2, so the geometric sum leaves 1/513.
        assert!((pm.value - 0.3).abs() < 0.01, "{}", pm.value);
    }

    #[test]
    fn wiener_fixed_points() {
        let z = TorusPoint::new(vec![0.37]).unwrap();
        let h = MultiIndex::new(vec![64]).unwrap();
        assert!((wiener_continuity(&TorusMeasure::dirac(z), &h).unwrap() - 1.0).abs() < 1e-12);
        let haar = wiener_continuity(&TorusMeasure::haar(1), &h).unwrap();
        assert!((haar - 1.0 / 129.0).abs() < 1e-15);
    }

    #[test]
    fn wiener_two_atoms_near_058() {
        // Frozen oracle: angles 0.13 and 0.57 with masses 0.3/0.7 at h=512
        // give 0.5799999999999997.
        let mu = TorusMeasure::atomic(vec![
            (TorusPoint::new(vec![0.13]).unwrap(), 0.3),
            (TorusPoint::new(vec![0.57]).unwrap(), 0.7),
        ])
        .unwrap();
        let got = wiener_continuity(&mu, &MultiIndex::new(vec![512]).unwrap()).unwrap();
        assert!((got - 0.58).abs() < 0.01, "{got}");
        assert!((got - 0.5799999999999997).abs() < 1e-9, "{got}");
    }

    #[test]
    fn window_guard() {
        // Correlation-table coefficients are only known on their stored box.
        let a = crate::weights::WeightSequence::constant(
            &MultiIndex::new(vec![40]).unwrap(),
            Complex64::new(1.0, 0.0),
        )
        .unwrap();
        let ladder = crate::lattice::Ladder::geometric(&MultiIndex::new(vec![32]).unwrap(), 2).unwrap();
        let t = crate::weights::correlation_table(&a, &MultiIndex::new(vec![4]).unwrap(), &ladder, 0.1)
            .unwrap();
        let z = TorusPoint::new(vec![0.0]).unwrap();
        assert!(point_mass(&t, &z, &MultiIndex::new(vec![4]).unwrap()).is_ok());
        assert!(point_mass(&t, &z, &MultiIndex::new(vec![5]).unwrap()).is_err());
    }
}
