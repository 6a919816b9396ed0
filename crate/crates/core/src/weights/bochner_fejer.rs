//! Bochner-Fejer kernels and the polynomial approximants they induce.
//!
//! One axis carries a kernel built from `r` base frequencies `beta_1..beta_r`
//! and orders `n_1..n_r`:
//!
//! ```text
//! K_B(t) = sum_{|nu_i| <= n_i} d_B(nu) e^{2 pi i (nu . beta) t},
//! d_B(nu) = prod_i (1 - |nu_i| / n_i),
//! ```
//!
//! a product of Fejer kernels read along the rationally independent directions
//! declared by the caller (independence is a caller promise, not verified).
//! Convolving a bounded sequence with the product kernel over all axes yields
//! a trigonometric polynomial supported on the kernel's frequency lattice with
//! coefficients `d_B(nu) * Gamma_a(z_nu)`; its sup norm never exceeds the
//! sequence's.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{box_iter, MultiIndex};
use crate::sum::KahanC64;
use crate::torus::{TorusPoint, DEFAULT_TOL};
use crate::weights::correlation::amplitude_estimate;
use crate::weights::sequence::{Generator, WeightSequence};
use crate::weights::trigpoly::TrigPolynomial;

/// Kernel data for a single lattice axis.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AxisKernel {
    /// Fejer orders `n_i >= 1`.
    pub orders: Vec<u32>,
    /// Base frequencies `beta_i` (angle fractions).
    pub bases: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BochnerFejerSpec {
    axes: Vec<AxisKernel>,
}

/// Hard cap on the kernel's frequency-lattice size.
const MAX_LATTICE: f64 = 200_000.0;

impl BochnerFejerSpec {
    pub fn new(axes: Vec<AxisKernel>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::invalid("kernel needs at least one axis"));
        }
        let mut lattice = 1.0f64;
        for (j, ax) in axes.iter().enumerate() {
            if ax.orders.is_empty() || ax.orders.len() != ax.bases.len() {
                return Err(Error::invalid(format!(
                    "axis {j}: orders and bases must be nonempty and equal-length"
                )));
            }
            if ax.orders.iter().any(|&n| n == 0) {
                return Err(Error::invalid(format!("axis {j}: orders must be >= 1")));
            }
            if ax.bases.iter().any(|b| !b.is_finite()) {
                return Err(Error::invalid(format!("axis {j}: non-finite base")));
            }
            for &n in &ax.orders {
                lattice *= (2 * n + 1) as f64;
            }
        }
        if lattice > MAX_LATTICE {
            return Err(Error::invalid(format!(
                "kernel frequency lattice has {lattice:.0} points, cap is {MAX_LATTICE:.0}"
            )));
        }
        Ok(BochnerFejerSpec { axes })
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[AxisKernel] {
        &self.axes
    }

    /// All `(frequency, weight)` pairs with `weight = d_B(nu) > 0`, merged over
    /// `nu` collisions (coincident angles add their weights). Frequencies whose
    /// weight vanishes (`|nu_i| = n_i`) are dropped.
    pub fn lattice(&self) -> Vec<(TorusPoint, f64)> {
        // Enumerate the per-axis (angle, weight) lists first, then take products.
        let mut per_axis: Vec<Vec<(f64, f64)>> = Vec::with_capacity(self.axes.len());
        for ax in &self.axes {
            let r = ax.orders.len();
            let lo: Vec<i64> = ax.orders.iter().map(|&n| -(n as i64)).collect();
            let hi: Vec<i64> = ax.orders.iter().map(|&n| n as i64).collect();
            let mut list = Vec::new();
            for nu in box_iter(&lo, &hi) {
                let mut w = 1.0f64;
                for i in 0..r {
                    w *= 1.0 - (nu[i].abs() as f64) / (ax.orders[i] as f64);
                }
                if w > 0.0 {
                    let angle: f64 = nu.iter().zip(&ax.bases).map(|(&v, &b)| v as f64 * b).sum();
                    list.push((angle.rem_euclid(1.0), w));
                }
            }
            per_axis.push(list);
        }
        let mut partial: Vec<(Vec<f64>, f64)> = vec![(Vec::new(), 1.0)];
        for list in &per_axis {
            let mut next = Vec::with_capacity(partial.len() * list.len());
            for (angles, w) in &partial {
                for (a, wa) in list {
                    let mut v = angles.clone();
                    v.push(*a);
                    next.push((v, w * wa));
                }
            }
            partial = next;
        }
        let mut points: Vec<(TorusPoint, f64)> = Vec::new();
        for (angles, w) in partial {
            let z = TorusPoint::new(angles).expect("angles finite");
            match points.iter_mut().find(|(p, _)| p.distance(&z) <= DEFAULT_TOL) {
                Some((_, acc)) => *acc += w,
                None => points.push((z, w)),
            }
        }
        points
    }
}

/// `prod_j K_{B_j}(t_j)`; imaginary part is a numerical residue of the
/// symmetric sum and stays at machine scale.
pub fn bochner_fejer_kernel_eval(spec: &BochnerFejerSpec, t: &MultiIndex) -> Result<Complex64> {
    t.check_dim(spec.dim())?;
    let mut product = Complex64::new(1.0, 0.0);
    for (axis, ax) in spec.axes.iter().enumerate() {
        let lo: Vec<i64> = ax.orders.iter().map(|&n| -(n as i64)).collect();
        let hi: Vec<i64> = ax.orders.iter().map(|&n| n as i64).collect();
        let mut acc = KahanC64::default();
        for nu in box_iter(&lo, &hi) {
            let mut w = 1.0f64;
            for i in 0..nu.len() {
                w *= 1.0 - (nu[i].abs() as f64) / (ax.orders[i] as f64);
            }
            if w == 0.0 {
                continue;
            }
            let angle: f64 = nu.iter().zip(&ax.bases).map(|(&v, &b)| v as f64 * b).sum();
            let phase = std::f64::consts::TAU * angle * t.0[axis] as f64;
            acc.add(Complex64::from_polar(w, phase));
        }
        product *= acc.value();
    }
    Ok(product)
}

/// The Bochner-Fejer approximant of `a` at truncation `n`: the trigonometric
/// polynomial with coefficient `d_B(nu) * Gamma_a^n(z_nu)` at each lattice
/// frequency. When `a` carries a trig-polynomial generator the amplitudes are
/// evaluated by the closed form (frequency-exact path); otherwise by
/// finite-window averages.
pub fn bochner_fejer_convolve(
    spec: &BochnerFejerSpec,
    a: &WeightSequence,
    n: &MultiIndex,
) -> Result<TrigPolynomial> {
    if a.dim() != spec.dim() {
        return Err(Error::DimensionMismatch { expected: spec.dim(), got: a.dim() });
    }
    n.check_dim(a.dim())?;
    let exact = match a.generator() {
        Some(Generator::Trigpoly { poly }) => Some(poly.clone()),
        _ => None,
    };
    let mut terms: Vec<(TorusPoint, Complex64)> = Vec::new();
    for (z, w) in spec.lattice() {
        let gamma = match &exact {
            Some(poly) => poly.amplitude_exact(&z, DEFAULT_TOL),
            None => amplitude_estimate(a, &z, n)?,
        };
        let coeff = Complex64::new(w, 0.0) * gamma;
        if coeff.norm() == 0.0 {
            continue;
        }
        match terms.iter_mut().find(|(p, _)| p.distance(&z) <= DEFAULT_TOL) {
            Some((_, acc)) => *acc += coeff,
            None => terms.push((z, coeff)),
        }
    }
    if terms.is_empty() {
        // Zero polynomial: keep a single zero coefficient at the identity so the
        // type's "at least one term" invariant holds.
        terms.push((TorusPoint::one(a.dim()), Complex64::new(0.0, 0.0)));
    }
    TrigPolynomial::new(terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fft::{fft_nd, FftDirection};
    use ndarray::ArrayD;

    fn spec1(orders: Vec<u32>, bases: Vec<f64>) -> BochnerFejerSpec {
        BochnerFejerSpec::new(vec![AxisKernel { orders, bases }]).unwrap()
    }

    #[test]
    fn order_one_kernel_is_constant_one() {
        let s = spec1(vec![1], vec![0.137]);
        for t in [-5i64, 0, 3, 11] {
            let v = bochner_fejer_kernel_eval(&s, &MultiIndex::new(vec![t]).unwrap()).unwrap();
            assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-12, "t={t}: {v}");
        }
    }

    #[test]
    fn order_two_kernel_peak_value() {
        // K_B(0) = 1/2 + 1 + 1/2 = 2.
        let s = spec1(vec![2], vec![0.61]);
        let v = bochner_fejer_kernel_eval(&s, &MultiIndex::new(vec![0]).unwrap()).unwrap();
        assert!((v - Complex64::new(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn kernel_fourier_coefficients_are_triangular_weights() {
        // Rational base 1/8: the kernel is 8-periodic in t and its DFT over one
        // period reads off d_B(nu) at bin nu mod 8.
        let s = spec1(vec![2], vec![0.125]);
        let mut table = ArrayD::from_shape_vec(
            vec![8],
            (0..8)
                .map(|t| bochner_fejer_kernel_eval(&s, &MultiIndex::new(vec![t]).unwrap()).unwrap())
                .collect(),
        )
        .unwrap();
        fft_nd(&mut table, FftDirection::Forward);
        // Forward DFT: X(q) = sum_t K(t) e^{-2 pi i q t / 8}; K has frequency
        // nu/8 with weight d_B(nu), so X(nu mod 8) = 8 * d_B(nu).
        let want = [(0usize, 1.0), (1, 0.5), (7, 0.5), (2, 0.0), (6, 0.0)];
        for (bin, w) in want {
            let got = table[[bin]] / 8.0;
            assert!(
                (got - Complex64::new(w, 0.0)).norm() < 1e-12,
                "bin {bin}: {got} vs {w}"
            );
        }
    }

    #[test]
    fn convolve_scales_matched_frequency_by_weight() {
        // a(k) = e^{2 pi i beta k}, order 2 at base beta: coefficient 1/2 at beta.
        let beta = 0.3;
        let z = TorusPoint::new(vec![beta]).unwrap();
        let psi = TrigPolynomial::new(vec![(z.clone(), Complex64::new(1.0, 0.0))]).unwrap();
        let s = spec1(vec![2], vec![beta]);

        // Exact path (generator attached).
        let a = psi.to_weight_sequence(&MultiIndex::new(vec![255]).unwrap()).unwrap();
        let out = bochner_fejer_convolve(&s, &a, &MultiIndex::new(vec![255]).unwrap()).unwrap();
        assert_eq!(out.terms().len(), 1);
        assert!(out.terms()[0].freq.distance(&z) < 1e-12);
        assert!((out.terms()[0].coeff - Complex64::new(0.5, 0.0)).norm() < 1e-12);

        // Numerical path (plain table): dominant coefficient within cross-term
        // error, spurious lattice coefficients small.
        let table = WeightSequence::from_values(
            &MultiIndex::new(vec![2047]).unwrap(),
            (0..2048)
                .map(|k| z.pow(&MultiIndex::new(vec![k]).unwrap()))
                .collect(),
        )
        .unwrap();
        let out = bochner_fejer_convolve(&s, &table, &MultiIndex::new(vec![2047]).unwrap()).unwrap();
        let main = out
            .terms()
            .iter()
            .find(|t| t.freq.distance(&z) < 1e-9)
            .expect("matched frequency present");
        assert!((main.coeff - Complex64::new(0.5, 0.0)).norm() < 1e-3);
        for t in out.terms() {
            if t.freq.distance(&z) > 1e-9 {
                assert!(t.coeff.norm() < 1e-2, "spurious {} at {}", t.coeff, t.freq);
            }
        }
    }

    #[test]
    fn convolve_of_zero_is_zero_polynomial() {
        let s = spec1(vec![2], vec![0.3]);
        let zero =
            WeightSequence::constant(&MultiIndex::new(vec![63]).unwrap(), Complex64::new(0.0, 0.0))
                .unwrap();
        let out = bochner_fejer_convolve(&s, &zero, &MultiIndex::new(vec![63]).unwrap()).unwrap();
        assert!(out.coeff_abs_sum() == 0.0);
    }

    #[test]
    fn sup_norm_never_grows_periodic_exact_case() {
        // A single base 1/8 keeps the kernel lattice collision-free (the
        // non-growth statement assumes independent bases; two rationals are
        // never independent), and makes everything 8-periodic in k, so finite
        // sups are true sups: the smoothing is a convex average over a period.
        let z1 = TorusPoint::new(vec![0.125]).unwrap();
        let z2 = TorusPoint::new(vec![0.375]).unwrap();
        let psi = TrigPolynomial::new(vec![
            (z1, Complex64::new(0.7, 0.2)),
            (z2, Complex64::new(-0.3, 0.5)),
        ])
        .unwrap();
        let s = spec1(vec![4], vec![0.125]);
        let a = psi.to_weight_sequence(&MultiIndex::new(vec![31]).unwrap()).unwrap();
        let out = bochner_fejer_convolve(&s, &a, &MultiIndex::new(vec![31]).unwrap()).unwrap();
        let sup_in: f64 = (0..8).map(|k| psi.eval(&[k]).norm()).fold(0.0, f64::max);
        let sup_out: f64 = (0..8).map(|k| out.eval(&[k]).norm()).fold(0.0, f64::max);
        assert!(
            sup_out <= sup_in + 1e-10,
            "kernel convolution grew the sup: {sup_out} > {sup_in}"
        );
        // Output frequencies are a subset of the input's (frequency exactness).
        for t in out.terms() {
            assert!(psi
                .terms()
                .iter()
                .any(|pt| pt.freq.distance(&t.freq) <= 1e-9));
        }
        // And coefficient mass only shrinks: |d_B c| <= |c|.
        assert!(out.coeff_abs_sum() <= psi.coeff_abs_sum() + 1e-12);
    }

    #[test]
    fn lattice_cap_enforced() {
        let err = BochnerFejerSpec::new(vec![AxisKernel {
            orders: vec![200, 200, 200],
            bases: vec![0.1, 0.2, 0.3],
        }]);
        assert!(err.is_err());
    }
}
