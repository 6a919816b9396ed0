//! Commuting unitary dynamics and the weighted ergodic averages.
//!
//! A system is `d` pairwise commuting unitaries on C^N; each induces the
//! trace-preserving automorphism `T_j(x) = U_j x U_j*`, and for a signed
//! multi-index `T^k = T_1^{k_1} ... T_d^{k_d}`. The averages are
//!
//! ```text
//! A_n(x)         = (1/|n+1|) sum_{0<=k<=n} T^k x,
//! A_n(x, a)      = (1/|n+1|) sum_{0<=k<=n} a(k) T^k x,
//! M_n(x, lambda) = (1/|n+1|) sum_{0<=k<=n} lambda^k T^k x.
//! ```
//!
//! The unweighted and twisted sums factor per axis (the scalars commute with
//! everything), so they cost O(sum n_j) conjugations; the general weighted
//! sum walks the box once with prefix reuse, one conjugation per lattice
//! point.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::lattice::MultiIndex;
use crate::linalg::{identity, operator_norm};
use crate::ncsystem::operator::Operator;
use crate::torus::TorusPoint;
use crate::weights::WeightSequence;

/// Default validation tolerance for unitarity and commutation defects.
pub const DEFAULT_SYSTEM_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct MatrixSystem {
    unitaries: Vec<Operator>,
    adjoints: Vec<Operator>,
    tol: f64,
}

impl MatrixSystem {
    pub fn new(unitaries: Vec<Operator>, tol: f64) -> Result<Self> {
        if unitaries.is_empty() {
            return Err(Error::InvalidSystem("need at least one unitary".into()));
        }
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::InvalidSystem("tolerance must be positive".into()));
        }
        let n = unitaries[0].dim();
        for u in &unitaries {
            if u.dim() != n {
                return Err(Error::InvalidSystem("unitaries must share one dimension".into()));
            }
            let defect = operator_norm(&(&u.mat().dot(&u.adjoint().into_mat()) - &identity(n)));
            if defect > tol {
                return Err(Error::InvalidSystem(format!(
                    "unitarity defect {defect:.3e} exceeds tolerance {tol:.3e}"
                )));
            }
        }
        for i in 0..unitaries.len() {
            for j in (i + 1)..unitaries.len() {
                let ab = unitaries[i].mul(&unitaries[j]);
                let ba = unitaries[j].mul(&unitaries[i]);
                let defect = operator_norm(&(ab.mat() - ba.mat()));
                if defect > tol {
                    return Err(Error::InvalidSystem(format!(
                        "unitaries {i} and {j} fail to commute: defect {defect:.3e}"
                    )));
                }
            }
        }
        let adjoints = unitaries.iter().map(Operator::adjoint).collect();
        Ok(MatrixSystem { unitaries, adjoints, tol })
    }

    /// Matrix dimension N.
    pub fn dim_matrix(&self) -> usize {
        self.unitaries[0].dim()
    }

    /// Number of commuting parameters d.
    pub fn dim_params(&self) -> usize {
        self.unitaries.len()
    }

    pub fn unitaries(&self) -> &[Operator] {
        &self.unitaries
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// `T_j(x) = U_j x U_j*`.
    pub fn apply(&self, j: usize, x: &Operator) -> Operator {
        self.unitaries[j].mul(x).mul(&self.adjoints[j])
    }

    /// `T_j^{-1}(x) = U_j* x U_j`.
    pub fn apply_inverse(&self, j: usize, x: &Operator) -> Operator {
        self.adjoints[j].mul(x).mul(&self.unitaries[j])
    }

    fn check_x(&self, x: &Operator) -> Result<()> {
        if x.dim() != self.dim_matrix() {
            return Err(Error::DimensionMismatch { expected: self.dim_matrix(), got: x.dim() });
        }
        Ok(())
    }

    fn check_k(&self, k: &MultiIndex) -> Result<()> {
        k.check_dim(self.dim_params())
    }
}

/// `T^k x` for signed `k`; negative powers conjugate by the adjoint.
pub fn apply_power(sys: &MatrixSystem, x: &Operator, k: &MultiIndex) -> Result<Operator> {
    sys.check_x(x)?;
    sys.check_k(k)?;
    let mut out = x.clone();
    for (j, &kj) in k.0.iter().enumerate() {
        for _ in 0..kj.unsigned_abs() {
            out = if kj >= 0 { sys.apply(j, &out) } else { sys.apply_inverse(j, &out) };
        }
    }
    Ok(out)
}

fn check_box(n: &MultiIndex) -> Result<()> {
    if n.0.iter().any(|&c| c < 0) {
        return Err(Error::invalid("truncation box must be nonnegative"));
    }
    Ok(())
}

/// Per-axis partial sum `sum_{k_j=0}^{count} c(k_j) T_j^{k_j}(x)` with scalar
/// coefficients supplied by `coeff`.
fn axis_sum(
    sys: &MatrixSystem,
    j: usize,
    x: &Operator,
    count: i64,
    coeff: impl Fn(i64) -> Complex64,
) -> Operator {
    let mut acc = x.scale(coeff(0));
    let mut cur = x.clone();
    for k in 1..=count {
        cur = sys.apply(j, &cur);
        acc.axpy(coeff(k), &cur);
    }
    acc
}

/// `(1/|n+1|) sum_{0<=k<=n} T^k x`.
pub fn ergodic_average(sys: &MatrixSystem, x: &Operator, n: &MultiIndex) -> Result<Operator> {
    sys.check_x(x)?;
    sys.check_k(n)?;
    check_box(n)?;
    let mut acc = x.clone();
    for (j, &nj) in n.0.iter().enumerate() {
        acc = axis_sum(sys, j, &acc, nj, |_| Complex64::new(1.0, 0.0));
    }
    Ok(acc.scale(Complex64::new(1.0 / n.box_volume(), 0.0)))
}

/// `(1/|n+1|) sum lambda^k T^k x`; the phase for each axis step is evaluated
/// fresh from the angle (no accumulated drift).
pub fn twisted_average(
    sys: &MatrixSystem,
    x: &Operator,
    lambda: &TorusPoint,
    n: &MultiIndex,
) -> Result<Operator> {
    sys.check_x(x)?;
    sys.check_k(n)?;
    check_box(n)?;
    if lambda.dim() != sys.dim_params() {
        return Err(Error::DimensionMismatch { expected: sys.dim_params(), got: lambda.dim() });
    }
    let mut acc = x.clone();
    for (j, &nj) in n.0.iter().enumerate() {
        acc = axis_sum(sys, j, &acc, nj, |k| lambda.axis_phase(j, k));
    }
    Ok(acc.scale(Complex64::new(1.0 / n.box_volume(), 0.0)))
}

/// Walks `T^k x` over the box `[0, n]` in row-major order with per-axis
/// prefix reuse: one conjugation per lattice step.
pub(crate) fn for_each_power(
    sys: &MatrixSystem,
    x: &Operator,
    n: &MultiIndex,
    mut f: impl FnMut(&[i64], &Operator),
) {
    fn rec(
        sys: &MatrixSystem,
        n: &[i64],
        j: usize,
        base: &Operator,
        idx: &mut Vec<i64>,
        f: &mut impl FnMut(&[i64], &Operator),
    ) {
        let mut cur = base.clone();
        for k in 0..=n[j] {
            if k > 0 {
                cur = sys.apply(j, &cur);
            }
            idx[j] = k;
            if j + 1 == n.len() {
                f(idx, &cur);
            } else {
                rec(sys, n, j + 1, &cur, idx, f);
            }
        }
    }
    let mut idx = vec![0i64; n.dim()];
    rec(sys, &n.0, 0, x, &mut idx, &mut f);
}

/// `(1/|n+1|) sum a(k) T^k x` for a general weight table.
pub fn weighted_average(
    sys: &MatrixSystem,
    x: &Operator,
    a: &WeightSequence,
    n: &MultiIndex,
) -> Result<Operator> {
    sys.check_x(x)?;
    sys.check_k(n)?;
    check_box(n)?;
    if a.dim() != sys.dim_params() {
        return Err(Error::DimensionMismatch { expected: sys.dim_params(), got: a.dim() });
    }
    a.require_coverage(n)?;
    let view = a.flat_view();
    let mut acc = Operator::zeros(sys.dim_matrix());
    for_each_power(sys, x, n, |k, tkx| {
        let w = view.get(k);
        if w != Complex64::new(0.0, 0.0) {
            acc.axpy(w, tkx);
        }
    });
    Ok(acc.scale(Complex64::new(1.0 / n.box_volume(), 0.0)))
}

/// Random unitary: modified Gram-Schmidt applied to a random complex matrix.
pub fn random_unitary(rng: &mut impl Rng, n: usize) -> Operator {
    loop {
        let raw = Operator::random(rng, n).into_mat();
        let mut cols: Vec<Vec<Complex64>> = (0..n)
            .map(|j| (0..n).map(|i| raw[(i, j)]).collect())
            .collect();
        let mut ok = true;
        for j in 0..n {
            for prev in 0..j {
                let dot: Complex64 = cols[prev]
                    .iter()
                    .zip(cols[j].iter())
                    .map(|(p, c)| p.conj() * c)
                    .sum();
                for i in 0..n {
                    let pi = cols[prev][i];
                    cols[j][i] -= dot * pi;
                }
            }
            let norm: f64 = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-6 {
                ok = false;
                break;
            }
            for z in &mut cols[j] {
                *z /= norm;
            }
        }
        if !ok {
            continue;
        }
        let mut mat = ndarray::Array2::from_elem((n, n), Complex64::new(0.0, 0.0));
        for (j, col) in cols.iter().enumerate() {
            for (i, &z) in col.iter().enumerate() {
                mat[(i, j)] = z;
            }
        }
        return Operator::new(mat).expect("orthonormalized matrix is finite");
    }
}

/// `d` exactly commuting random unitaries: a shared random eigenbasis with
/// independent random eigenphases per parameter.
pub fn random_commuting_unitaries(rng: &mut impl Rng, n: usize, d: usize) -> Vec<Operator> {
    let v = random_unitary(rng, n);
    let vh = v.adjoint();
    (0..d)
        .map(|_| {
            let mut diag = Operator::zeros(n).into_mat();
            for i in 0..n {
                let theta = rng.gen::<f64>();
                diag[(i, i)] = Complex64::from_polar(1.0, std::f64::consts::TAU * theta);
            }
            let diag = Operator::new(diag).expect("finite diagonal");
            v.mul(&diag).mul(&vh)
        })
        .collect()
}
