//! Serializable input descriptions.
//!
//! These are the JSON shapes experiments are configured with: weight
//! sequences (explicit values or a named generator), torus measures (atoms
//! plus an optional trig-polynomial density given by Fourier coefficients),
//! matrix systems (explicit unitaries or a seeded random commuting family),
//! and ladders. Each spec validates on `build`, so a malformed file fails
//! before any computation starts, and the resolved spec is embedded verbatim
//! in reports.
//!
//! Complex scalars are `[re, im]` pairs; matrices are row-major nested
//! arrays of pairs.

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Ladder, MultiIndex};
use crate::ncsystem::operator::Operator;
use crate::ncsystem::system::{random_commuting_unitaries, MatrixSystem, DEFAULT_SYSTEM_TOL};
use crate::spectral::{AtomSpec, TorusMeasure, TorusPolynomial};
use crate::torus::TorusPoint;
use crate::weights::{Generator, WeightSequence};

pub type ComplexPair = [f64; 2];

pub fn pair_to_complex(p: ComplexPair) -> Complex64 {
    Complex64::new(p[0], p[1])
}

pub fn complex_to_pair(z: Complex64) -> ComplexPair {
    [z.re, z.im]
}

/// A weight sequence: explicit row-major `values` on `[0, box]`, or a
/// `generator` materialized on that box. Exactly one source must be present.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeightSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(rename = "box")]
    pub corner: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<ComplexPair>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<Generator>,
}

impl WeightSpec {
    pub fn build(&self) -> Result<WeightSequence> {
        let n = MultiIndex(self.corner.clone());
        if let Some(d) = self.d {
            n.check_dim(d)?;
        }
        match (&self.values, &self.generator) {
            (Some(vals), None) => {
                let zs: Vec<Complex64> = vals.iter().map(|&p| pair_to_complex(p)).collect();
                WeightSequence::from_values(&n, zs)
            }
            (None, Some(gen)) => WeightSequence::from_generator(gen.clone(), &n),
            (Some(_), Some(_)) => {
                Err(Error::invalid("give either values or a generator, not both"))
            }
            (None, None) => Err(Error::invalid("weight spec needs values or a generator")),
        }
    }
}

/// Fourier coefficients of a trig-polynomial density on `[-box, box]`,
/// row-major.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensitySpec {
    #[serde(rename = "box")]
    pub halfwidth: Vec<i64>,
    pub coeffs: Vec<ComplexPair>,
}

/// Atoms plus an optional absolutely continuous part.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasureSpec {
    #[serde(default)]
    pub atoms: Vec<AtomSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density_fourier: Option<DensitySpec>,
}

impl MeasureSpec {
    pub fn build(&self) -> Result<TorusMeasure> {
        let density = match &self.density_fourier {
            Some(spec) => Some(TorusPolynomial::new(
                MultiIndex(spec.halfwidth.clone()),
                spec.coeffs.iter().map(|&p| pair_to_complex(p)).collect(),
            )?),
            None => None,
        };
        let dim = if let Some(atom) = self.atoms.first() {
            atom.angles.len()
        } else if let Some(d) = &density {
            d.dim()
        } else {
            return Err(Error::invalid("measure spec needs atoms or a density"));
        };
        let mut atoms = Vec::with_capacity(self.atoms.len());
        for a in &self.atoms {
            atoms.push((TorusPoint::new(a.angles.clone())?, a.mass));
        }
        TorusMeasure::with_parts(dim, atoms, density)
    }
}

/// Row-major complex matrix.
pub type MatrixSpec = Vec<Vec<ComplexPair>>;

pub fn matrix_from_spec(spec: &MatrixSpec) -> Result<Array2<Complex64>> {
    let rows = spec.len();
    if rows == 0 {
        return Err(Error::invalid("matrix spec must be nonempty"));
    }
    let cols = spec[0].len();
    if spec.iter().any(|r| r.len() != cols) {
        return Err(Error::invalid("matrix rows must share one length"));
    }
    let mut mat = Array2::from_elem((rows, cols), Complex64::new(0.0, 0.0));
    for (i, row) in spec.iter().enumerate() {
        for (j, &p) in row.iter().enumerate() {
            mat[(i, j)] = pair_to_complex(p);
        }
    }
    Ok(mat)
}

pub fn matrix_to_spec(mat: &Array2<Complex64>) -> MatrixSpec {
    (0..mat.nrows())
        .map(|i| (0..mat.ncols()).map(|j| complex_to_pair(mat[(i, j)])).collect())
        .collect()
}

/// A commuting-unitary system: explicit matrices, or a seeded random family
/// built from a shared eigenbasis. Random specs require the caller to pass
/// the run's seed.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SystemSpec {
    Explicit {
        #[serde(rename = "N")]
        n: usize,
        unitaries: Vec<MatrixSpec>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tol: Option<f64>,
    },
    Random {
        #[serde(rename = "N")]
        n: usize,
        d: usize,
    },
}

impl SystemSpec {
    pub fn needs_seed(&self) -> bool {
        matches!(self, SystemSpec::Random { .. })
    }

    pub fn build(&self, seed: Option<u64>) -> Result<MatrixSystem> {
        match self {
            SystemSpec::Explicit { n, unitaries, tol } => {
                let mut ops = Vec::with_capacity(unitaries.len());
                for u in unitaries {
                    let mat = matrix_from_spec(u)?;
                    if mat.nrows() != *n || mat.ncols() != *n {
                        return Err(Error::invalid(format!(
                            "unitary is {} x {}, declared N = {n}",
                            mat.nrows(),
                            mat.ncols()
                        )));
                    }
                    ops.push(Operator::new(mat)?);
                }
                MatrixSystem::new(ops, tol.unwrap_or(DEFAULT_SYSTEM_TOL))
            }
            SystemSpec::Random { n, d } => {
                let seed = seed.ok_or_else(|| {
                    Error::invalid("random system spec requires an explicit seed")
                })?;
                use rand::SeedableRng;
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                let us = random_commuting_unitaries(&mut rng, *n, *d);
                MatrixSystem::new(us, DEFAULT_SYSTEM_TOL)
            }
        }
    }
}

/// Explicit list of strictly increasing rung corners.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LadderSpec(pub Vec<Vec<i64>>);

impl LadderSpec {
    pub fn build(&self) -> Result<Ladder> {
        Ladder::explicit(self.0.iter().cloned().map(MultiIndex).collect())
    }
}
