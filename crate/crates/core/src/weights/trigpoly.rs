//! Trigonometric polynomials on the lattice: `psi(k) = sum_alpha c_alpha z_alpha^k`.
//!
//! These are the ground-truth fixtures of the whole library. Their correlation
//! and amplitude have closed forms,
//!
//! ```text
//! gamma_psi(m)  = sum_alpha |c_alpha|^2 z_alpha^m,
//! Gamma_psi(z)  = c_alpha  if z = z_alpha,  else 0,
//! ```
//!
//! and the finite-window estimators deviate from them only through geometric
//! cross terms that [`TrigPolynomial::cross_term_bound`] controls explicitly.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::MultiIndex;
use crate::sum::KahanC64;
use crate::torus::{TorusPoint, DEFAULT_TOL};
use crate::weights::sequence::{Generator, WeightSequence};

/// One frequency/coefficient pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrigTerm {
    pub freq: TorusPoint,
    pub coeff: Complex64,
}

/// A finite sum of unimodular exponentials with pairwise distinct frequencies.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrigPolynomial {
    dim: usize,
    terms: Vec<TrigTerm>,
}

impl TrigPolynomial {
    /// Frequencies must share a dimension and be pairwise distinct (wrapped
    /// max-axis distance above [`DEFAULT_TOL`]); coefficients must be finite.
    pub fn new(terms: Vec<(TorusPoint, Complex64)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::invalid("trig polynomial needs at least one term"));
        }
        let dim = terms[0].0.dim();
        for (z, c) in &terms {
            if z.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: z.dim() });
            }
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(Error::invalid("non-finite coefficient"));
            }
        }
        for i in 0..terms.len() {
            for j in i + 1..terms.len() {
                if terms[i].0.distance(&terms[j].0) <= DEFAULT_TOL {
                    return Err(Error::invalid(format!(
                        "coincident frequencies {} and {}",
                        terms[i].0, terms[j].0
                    )));
                }
            }
        }
        Ok(TrigPolynomial {
            dim,
            terms: terms
                .into_iter()
                .map(|(freq, coeff)| TrigTerm { freq, coeff })
                .collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[TrigTerm] {
        &self.terms
    }

    pub fn eval(&self, k: &[i64]) -> Complex64 {
        let idx = MultiIndex(k.to_vec());
        let mut acc = KahanC64::default();
        for t in &self.terms {
            acc.add(t.coeff * t.freq.pow(&idx));
        }
        acc.value()
    }

    /// `sum |c_alpha|`, an upper bound for the sup norm.
    pub fn coeff_abs_sum(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.norm()).sum()
    }

    /// `sum |c_alpha|^2`, the limiting mean square (total spectral mass).
    pub fn energy(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.norm_sqr()).sum()
    }

    /// Exact limiting correlation `sum_alpha |c_alpha|^2 z_alpha^m`.
    pub fn correlation_exact(&self, m: &MultiIndex) -> Result<Complex64> {
        m.check_dim(self.dim)?;
        let mut acc = KahanC64::default();
        for t in &self.terms {
            acc.add(Complex64::new(t.coeff.norm_sqr(), 0.0) * t.freq.pow(m));
        }
        Ok(acc.value())
    }

    /// Exact limiting amplitude: the coefficient at `z` when `z` matches a
    /// frequency within `tol`, else zero.
    pub fn amplitude_exact(&self, z: &TorusPoint, tol: f64) -> Complex64 {
        for t in &self.terms {
            if t.freq.distance(z) <= tol {
                return t.coeff;
            }
        }
        Complex64::new(0.0, 0.0)
    }

    /// Smallest pairwise frequency distance; infinite for a single term.
    pub fn min_gap(&self) -> f64 {
        let mut gap = f64::INFINITY;
        for i in 0..self.terms.len() {
            for j in i + 1..self.terms.len() {
                gap = gap.min(self.terms[i].freq.distance(&self.terms[j].freq));
            }
        }
        gap
    }

    /// Rigorous bound on the finite-window correlation error at `m >= 0`:
    ///
    /// ```text
    /// |estimate_n(m) - gamma_psi(m)| <= sum_{alpha != beta} |c_a||c_b| / (2 (n*+1) g_ab)
    /// ```
    ///
    /// where `n* = min_j n_j` and `g_ab` is the pair's frequency distance
    /// (per-axis geometric sums obey `|1 - e^{2 pi i g}| = 2 sin(pi g) >= 4g`
    /// for `g` in `(0, 1/2]`). Diagonal terms are window-exact for `m >= 0`.
    pub fn cross_term_bound(&self, n: &MultiIndex) -> Result<f64> {
        n.check_dim(self.dim)?;
        let min_n1 = n.0.iter().map(|&v| v + 1).min().unwrap_or(1) as f64;
        let mut total = 0.0;
        for i in 0..self.terms.len() {
            for j in 0..self.terms.len() {
                if i == j {
                    continue;
                }
                let g = self.terms[i].freq.distance(&self.terms[j].freq);
                total += self.terms[i].coeff.norm() * self.terms[j].coeff.norm() / (2.0 * min_n1 * g);
            }
        }
        Ok(total)
    }

    /// Materialize on `[0, n]` keeping the closed form attached.
    pub fn to_weight_sequence(&self, n: &MultiIndex) -> Result<WeightSequence> {
        WeightSequence::from_generator(Generator::Trigpoly { poly: self.clone() }, n)
    }

    /// Seeded random polynomial with `atoms` terms and pairwise frequency
    /// distance at least `min_gap`; coefficient moduli lie in `[0.2, 1]`.
    pub fn random<R: Rng>(rng: &mut R, dim: usize, atoms: usize, min_gap: f64) -> Result<Self> {
        if atoms == 0 || dim == 0 {
            return Err(Error::invalid("need at least one atom and one axis"));
        }
        if min_gap <= 0.0 || min_gap * (2.0 * atoms as f64) > 1.0 {
            return Err(Error::invalid("gap infeasible for requested atom count"));
        }
        let mut freqs: Vec<TorusPoint> = Vec::with_capacity(atoms);
        let mut guard = 0;
        while freqs.len() < atoms {
            guard += 1;
            if guard > 100_000 {
                return Err(Error::invalid("frequency sampling did not terminate"));
            }
            let cand = TorusPoint::new((0..dim).map(|_| rng.gen::<f64>()).collect())?;
            if freqs.iter().all(|z| z.distance(&cand) >= min_gap) {
                freqs.push(cand);
            }
        }
        let terms = freqs
            .into_iter()
            .map(|z| {
                let r = 0.2 + 0.8 * rng.gen::<f64>();
                let phase = std::f64::consts::TAU * rng.gen::<f64>();
                (z, Complex64::from_polar(r, phase))
            })
            .collect();
        Self::new(terms)
    }
}
