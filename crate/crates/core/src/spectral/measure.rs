//! Torus measures: atoms plus an optional trig-polynomial density.

use ndarray::ArrayD;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{box_iter, for_each_box, MultiIndex};
use crate::spectral::FourierCoeffs;
use crate::sum::{KahanC64, KahanF64};
use crate::torus::{TorusPoint, DEFAULT_TOL};
use crate::weights::TrigPolynomial;

/// A function `f(z) = sum_{|l| <= h} c(l) z^l` on the torus, stored on the
/// symmetric coefficient box `[-h, h]` (row-major, index `l + h`).
#[derive(Debug, Clone)]
pub struct TorusPolynomial {
    halfwidth: MultiIndex,
    coeffs: ArrayD<Complex64>,
}

impl TorusPolynomial {
    pub fn new(halfwidth: MultiIndex, coeffs: Vec<Complex64>) -> Result<Self> {
        if halfwidth.0.iter().any(|&h| h < 0) {
            return Err(Error::invalid("coefficient halfwidth must be >= 0"));
        }
        let shape: Vec<usize> = halfwidth.0.iter().map(|&h| (2 * h + 1) as usize).collect();
        let len: usize = shape.iter().product();
        if coeffs.len() != len {
            return Err(Error::invalid(format!(
                "coefficient box holds {len} entries, got {}",
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::invalid("non-finite coefficient"));
        }
        Ok(TorusPolynomial {
            halfwidth,
            coeffs: ArrayD::from_shape_vec(shape, coeffs).expect("checked"),
        })
    }

    /// The monomial `z^m`.
    pub fn monomial(m: &MultiIndex) -> Self {
        let halfwidth = MultiIndex(m.0.iter().map(|&v| v.abs()).collect());
        let shape: Vec<usize> = halfwidth.0.iter().map(|&h| (2 * h + 1) as usize).collect();
        let mut coeffs = ArrayD::from_elem(shape, Complex64::new(0.0, 0.0));
        let idx: Vec<usize> = m
            .0
            .iter()
            .zip(&halfwidth.0)
            .map(|(&v, &h)| (v + h) as usize)
            .collect();
        coeffs[idx.as_slice()] = Complex64::new(1.0, 0.0);
        TorusPolynomial { halfwidth, coeffs }
    }

    pub fn constant(dim: usize, c: Complex64) -> Self {
        TorusPolynomial {
            halfwidth: MultiIndex::zeros(dim),
            coeffs: ArrayD::from_elem(vec![1; dim], c),
        }
    }

    pub fn dim(&self) -> usize {
        self.halfwidth.dim()
    }

    pub fn halfwidth(&self) -> &MultiIndex {
        &self.halfwidth
    }

    /// Coefficient at `l`; exactly zero outside the stored box.
    pub fn coeff(&self, l: &MultiIndex) -> Complex64 {
        let mut idx = Vec::with_capacity(l.dim());
        for (&lj, &hj) in l.0.iter().zip(&self.halfwidth.0) {
            if lj.abs() > hj {
                return Complex64::new(0.0, 0.0);
            }
            idx.push((lj + hj) as usize);
        }
        self.coeffs[idx.as_slice()]
    }

    pub fn eval(&self, z: &TorusPoint) -> Complex64 {
        let neg = self.halfwidth.neg();
        let mut acc = KahanC64::default();
        let mut buf = MultiIndex::zeros(self.dim());
        for_each_box(&neg.0, &self.halfwidth.0, |l| {
            buf.0.copy_from_slice(l);
            let c = self.coeff(&buf);
            if c != Complex64::new(0.0, 0.0) {
                acc.add(c * z.pow(&buf));
            }
        });
        acc.value()
    }

    /// `int f dz` (the coefficient at 0).
    pub fn mean(&self) -> Complex64 {
        self.coeff(&MultiIndex::zeros(self.dim()))
    }

    /// Largest Hermitian defect `|c(-l) - conj(c(l))|`; zero iff `f` is
    /// real-valued on the torus.
    pub fn hermitian_defect(&self) -> f64 {
        let neg = self.halfwidth.neg();
        let mut defect: f64 = 0.0;
        for l in box_iter(&neg.0, &self.halfwidth.0) {
            let li = MultiIndex(l);
            let mi = li.neg();
            defect = defect.max((self.coeff(&mi) - self.coeff(&li).conj()).norm());
        }
        defect
    }

    /// Replace `c(l)` by `(c(l) + conj(c(-l)))/2`, projecting onto real-valued
    /// functions; afterwards the Hermitian symmetry holds bitwise.
    pub fn symmetrize(&mut self) {
        let old = self.coeffs.clone();
        let h = self.halfwidth.clone();
        let neg = h.neg();
        for l in box_iter(&neg.0, &h.0) {
            let plus: Vec<usize> = l.iter().zip(&h.0).map(|(&v, &hh)| (v + hh) as usize).collect();
            let minus: Vec<usize> = l.iter().zip(&h.0).map(|(&v, &hh)| (hh - v) as usize).collect();
            self.coeffs[plus.as_slice()] = (old[plus.as_slice()] + old[minus.as_slice()].conj()) / 2.0;
        }
    }
}

/// An atom list plus an optional absolutely continuous part.
#[derive(Debug, Clone)]
pub struct TorusMeasure {
    dim: usize,
    atoms: Vec<(TorusPoint, f64)>,
    density: Option<TorusPolynomial>,
}

/// Atom/density split of a measure (serialization schema mirrors this).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AtomSpec {
    pub angles: Vec<f64>,
    pub mass: f64,
}

impl TorusMeasure {
    pub fn zero(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("measure dimension must be >= 1"));
        }
        Ok(TorusMeasure { dim, atoms: Vec::new(), density: None })
    }

    pub fn dirac(z: TorusPoint) -> Self {
        let dim = z.dim();
        TorusMeasure { dim, atoms: vec![(z, 1.0)], density: None }
    }

    /// Normalized Haar measure (density identically 1).
    pub fn haar(dim: usize) -> Self {
        TorusMeasure {
            dim,
            atoms: Vec::new(),
            density: Some(TorusPolynomial::constant(dim, Complex64::new(1.0, 0.0))),
        }
    }

    /// Purely atomic measure; masses must be positive and points pairwise
    /// distinct at the torus tolerance.
    pub fn atomic(atoms: Vec<(TorusPoint, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::invalid("atomic measure needs at least one atom"));
        }
        let dim = atoms[0].0.dim();
        Self::with_parts(dim, atoms, None)
    }

    /// General construction. The density, if present, must be real-valued
    /// (Hermitian coefficients) and nonnegative up to `-1e-9 * scale` on a
    /// verification grid.
    pub fn with_parts(
        dim: usize,
        atoms: Vec<(TorusPoint, f64)>,
        density: Option<TorusPolynomial>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("measure dimension must be >= 1"));
        }
        for (z, mass) in &atoms {
            if z.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: z.dim() });
            }
            if !(*mass > 0.0) || !mass.is_finite() {
                return Err(Error::invalid("atom masses must be strictly positive"));
            }
        }
        for i in 0..atoms.len() {
            for j in i + 1..atoms.len() {
                if atoms[i].0.distance(&atoms[j].0) <= DEFAULT_TOL {
                    return Err(Error::invalid(format!(
                        "coincident atoms at {}",
                        atoms[i].0
                    )));
                }
            }
        }
        if let Some(f) = &density {
            if f.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: f.dim() });
            }
            let scale = f.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max).max(1e-300);
            if f.hermitian_defect() > 1e-9 * scale {
                return Err(Error::invalid("density is not real-valued (Hermitian defect)"));
            }
            // Positivity up to tolerance on a midpoint grid.
            let per_axis: usize = if dim == 1 { 256 } else { 32 };
            let mut min_val = f64::INFINITY;
            let mut grid_idx = vec![0usize; dim];
            loop {
                let z = TorusPoint::new(
                    grid_idx
                        .iter()
                        .map(|&i| (i as f64 + 0.5) / per_axis as f64)
                        .collect(),
                )?;
                min_val = min_val.min(f.eval(&z).re);
                let mut axis = dim;
                loop {
                    if axis == 0 {
                        break;
                    }
                    axis -= 1;
                    grid_idx[axis] += 1;
                    if grid_idx[axis] < per_axis {
                        break;
                    }
                    grid_idx[axis] = 0;
                }
                if grid_idx.iter().all(|&i| i == 0) {
                    break;
                }
            }
            if min_val < -1e-9 * scale.max(1.0) {
                return Err(Error::invalid(format!(
                    "density dips to {min_val:.3e} on the verification grid"
                )));
            }
        }
        let mu = TorusMeasure { dim, atoms, density };
        if mu.total_mass() < 0.0 {
            return Err(Error::invalid("total mass must be >= 0"));
        }
        Ok(mu)
    }

    /// The exact spectral measure of a trig polynomial: `sum |c_a|^2 delta_{z_a}`.
    pub fn from_trig_polynomial(psi: &TrigPolynomial) -> Result<Self> {
        let atoms: Vec<(TorusPoint, f64)> = psi
            .terms()
            .iter()
            .filter(|t| t.coeff.norm_sqr() > 0.0)
            .map(|t| (t.freq.clone(), t.coeff.norm_sqr()))
            .collect();
        if atoms.is_empty() {
            return Self::zero(psi.dim());
        }
        Self::with_parts(psi.dim(), atoms, None)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &[(TorusPoint, f64)] {
        &self.atoms
    }

    pub fn density(&self) -> Option<&TorusPolynomial> {
        self.density.as_ref()
    }

    pub fn total_mass(&self) -> f64 {
        let mut acc = KahanF64::default();
        for (_, m) in &self.atoms {
            acc.add(*m);
        }
        if let Some(f) = &self.density {
            acc.add(f.mean().re);
        }
        acc.value()
    }

    /// `int z^m d mu = sum_atoms mass * z^m + c_density(-m)`.
    pub fn fourier_stieltjes(&self, m: &MultiIndex) -> Result<Complex64> {
        m.check_dim(self.dim)?;
        let mut acc = KahanC64::default();
        for (z, mass) in &self.atoms {
            acc.add(Complex64::new(*mass, 0.0) * z.pow(m));
        }
        if let Some(f) = &self.density {
            // int z^m f(z) dz picks out the coefficient of z^{-m}.
            acc.add(f.coeff(&m.neg()));
        }
        Ok(acc.value())
    }
}

/// Free-function form of [`TorusMeasure::fourier_stieltjes`].
pub fn fourier_stieltjes(mu: &TorusMeasure, m: &MultiIndex) -> Result<Complex64> {
    mu.fourier_stieltjes(m)
}

impl FourierCoeffs for TorusMeasure {
    fn dim(&self) -> usize {
        self.dim
    }

    fn coeff(&self, m: &MultiIndex) -> Complex64 {
        self.fourier_stieltjes(m).expect("dimension checked by caller")
    }

    fn available_halfwidth(&self) -> Option<MultiIndex> {
        None
    }
}
