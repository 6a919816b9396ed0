//! Points of the d-torus, stored as fractional angles.
//!
//! A point `z` of `T^d` is kept as angles `theta in [0, 1)^d`, meaning
//! `z_j = exp(2 pi i theta_j)`. Monomials evaluate as
//!
//! ```text
//! z^k = exp(2 pi i <theta, k>),   k in Z^d.
//! ```
//!
//! Equality of torus points is only ever decided at an explicit tolerance,
//! measured along the wrapped per-axis distance.

use crate::error::{Error, Result};
use crate::lattice::MultiIndex;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Default tolerance for declaring two torus points equal.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TorusPoint {
    angles: Vec<f64>,
}

/// Reduce to `[0, 1)`.
fn wrap(t: f64) -> f64 {
    let r = t - t.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

impl TorusPoint {
    pub fn new(angles: Vec<f64>) -> Result<Self> {
        if angles.is_empty() {
            return Err(Error::invalid("torus point must have dimension >= 1"));
        }
        if angles.iter().any(|t| !t.is_finite()) {
            return Err(Error::invalid("torus angles must be finite"));
        }
        Ok(TorusPoint {
            angles: angles.into_iter().map(wrap).collect(),
        })
    }

    /// The identity element `(1, ..., 1)`.
    pub fn one(dim: usize) -> Self {
        TorusPoint {
            angles: vec![0.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.angles.len()
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    /// `z^k = exp(2 pi i <theta, k>)`.
    pub fn pow(&self, k: &MultiIndex) -> Complex64 {
        debug_assert_eq!(self.dim(), k.dim());
        let mut phase = 0.0;
        for (t, &kj) in self.angles.iter().zip(&k.0) {
            phase += t * kj as f64;
        }
        Complex64::from_polar(1.0, std::f64::consts::TAU * phase)
    }

    /// `z_j^k` for a single axis; used by separable per-axis accumulations.
    pub fn axis_phase(&self, axis: usize, k: i64) -> Complex64 {
        Complex64::from_polar(1.0, std::f64::consts::TAU * self.angles[axis] * k as f64)
    }

    pub fn conj(&self) -> TorusPoint {
        TorusPoint {
            angles: self.angles.iter().map(|&t| wrap(-t)).collect(),
        }
    }

    /// Componentwise product (group operation).
    pub fn mul(&self, other: &TorusPoint) -> TorusPoint {
        TorusPoint {
            angles: self
                .angles
                .iter()
                .zip(&other.angles)
                .map(|(a, b)| wrap(a + b))
                .collect(),
        }
    }

    /// Max over axes of the wrapped distance `min(|dt|, 1 - |dt|)`.
    pub fn distance(&self, other: &TorusPoint) -> f64 {
        self.angles
            .iter()
            .zip(&other.angles)
            .map(|(a, b)| {
                let d = (a - b).abs();
                d.min(1.0 - d)
            })
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &TorusPoint, tol: f64) -> bool {
        self.dim() == other.dim() && self.distance(other) <= tol
    }
}

impl std::fmt::Display for TorusPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "exp(2pi i * (")?;
        for (i, t) in self.angles.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{t:.6}")?;
        }
        write!(f, "))")
    }
}
