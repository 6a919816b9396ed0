//! Two-parameter van der Corput inequality and its summation identities.
//!
//! For elements `a_{j1,j2}` (1-indexed, zero outside the stated range) and
//! window `H = (h1+1)(h2+1)`, the inequality bounds the squared norm of the
//! full average by a diagonal term and four groups of shifted correlation
//! averages:
//!
//! ```text
//! || (1/(n1 n2)) sum a ||^2  <  (4/H) ||avg a* a||
//!     + (8/H) [ sum_{d1} ||avg a*_{j} a_{j+(d1,0)}||
//!             + sum_{d2} ||avg a*_{j} a_{j+(0,d2)}||
//!             + sum_{d1,d2} ||avg a*_{j} a_{j+(d1,d2)}||
//!             + sum_{d1,d2} ||avg a*_{j+(d1,0)} a_{j+(0,d2)}|| ]
//! ```
//!
//! Every shifted sum is reported under two normalizations: dividing by
//! `n1 n2` (the literal display, zero padding included) and dividing by the
//! overlap count of nonzero products. The overlap form is never below the
//! padded form, so the padded bound is the sharp one and is what the fuzz
//! asserts; both appear in reports. The underpinning identities, an exact
//! window-sum rearrangement in one and two indices, are verified as algebraic
//! equalities in their own right.

use ndarray::Array2;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::MultiIndex;
use crate::ncsystem::diagnostics::{uniform_ww_sup, Projection};
use crate::ncsystem::operator::Operator;
use crate::ncsystem::spectralcoeff::operator_correlation;
use crate::ncsystem::system::{apply_power, ergodic_average, MatrixSystem};
use crate::sum::KahanF64;

/// Slack for the inequality check; equality cases (zero arrays) exist, so
/// the strict form is tested as `lhs <= rhs + VDC_TOL`.
pub const VDC_TOL: f64 = 1e-10;

/// 1-indexed rectangular array of same-dim operators, zero outside.
#[derive(Debug, Clone)]
pub struct OperatorArray2D {
    n1: usize,
    n2: usize,
    entries: Vec<Operator>,
    zero: Operator,
}

impl OperatorArray2D {
    pub fn new(n1: usize, n2: usize, entries: Vec<Operator>) -> Result<Self> {
        if n1 == 0 || n2 == 0 {
            return Err(Error::invalid("array extents must be >= 1"));
        }
        if entries.len() != n1 * n2 {
            return Err(Error::invalid(format!(
                "{} entries for a {n1} x {n2} array",
                entries.len()
            )));
        }
        let dim = entries[0].dim();
        if entries.iter().any(|e| e.dim() != dim) {
            return Err(Error::invalid("entries must share one dimension"));
        }
        Ok(Self {
            n1,
            n2,
            entries,
            zero: Operator::zeros(dim),
        })
    }

    pub fn from_fn(
        n1: usize,
        n2: usize,
        mut f: impl FnMut(usize, usize) -> Operator,
    ) -> Result<Self> {
        let mut entries = Vec::with_capacity(n1 * n2);
        for j1 in 1..=n1 {
            for j2 in 1..=n2 {
                entries.push(f(j1, j2));
            }
        }
        Self::new(n1, n2, entries)
    }

    /// All entries the identity (scalars when `dim = 1`).
    pub fn identity(n1: usize, n2: usize, dim: usize) -> Self {
        Self::from_fn(n1, n2, |_, _| Operator::identity(dim)).expect("positive extents")
    }

    /// Entries with independent standard-Gaussian real and imaginary parts.
    pub fn random_gaussian(rng: &mut impl rand::Rng, n1: usize, n2: usize, dim: usize) -> Self {
        use rand_distr::StandardNormal;
        Self::from_fn(n1, n2, |_, _| {
            let mut mat =
                Array2::from_elem((dim, dim), num_complex::Complex64::new(0.0, 0.0));
            for v in mat.iter_mut() {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                *v = num_complex::Complex64::new(re, im);
            }
            Operator::new(mat).expect("finite entries")
        })
        .expect("positive extents")
    }

    pub fn extents(&self) -> (usize, usize) {
        (self.n1, self.n2)
    }

    pub fn dim(&self) -> usize {
        self.zero.dim()
    }

    /// Signed access with the zero-outside convention.
    pub fn get(&self, j1: i64, j2: i64) -> &Operator {
        if j1 < 1 || j2 < 1 || j1 > self.n1 as i64 || j2 > self.n2 as i64 {
            return &self.zero;
        }
        &self.entries[(j1 as usize - 1) * self.n2 + (j2 as usize - 1)]
    }
}

/// Outcome of one exact identity check; `lhs` and `rhs` are the two sides
/// computed independently.
#[derive(Debug, Clone)]
pub struct FormulaReport {
    pub lhs: Operator,
    pub rhs: Operator,
    /// `max |lhs - rhs|` over entries.
    pub deviation: f64,
    /// Deviation divided by `1 + max(|lhs|, |rhs|)` entrywise scale.
    pub relative_deviation: f64,
    /// Window exceeds array length; computed anyway, not covered by the proof.
    pub outside_hypothesis: bool,
}

fn formula_report(lhs: Operator, rhs: Operator, outside: bool) -> FormulaReport {
    let deviation = lhs.max_abs_diff(&rhs);
    let scale = lhs
        .mat()
        .iter()
        .chain(rhs.mat().iter())
        .map(|v| v.norm())
        .fold(0.0, f64::max);
    FormulaReport {
        deviation,
        relative_deviation: deviation / (1.0 + scale),
        lhs,
        rhs,
        outside_hypothesis: outside,
    }
}

/// `(h+1) sum_{j=1}^n a_j` against the window rearrangement
/// `sum_{k=1}^{n+h} sum_{j=k-h}^{k} a_j` with zero padding.
pub fn formula1_check(values: &[Operator], h: i64) -> Result<FormulaReport> {
    if values.is_empty() {
        return Err(Error::invalid("need at least one element"));
    }
    if h < 0 {
        return Err(Error::invalid("window must be >= 0"));
    }
    let dim = values[0].dim();
    if values.iter().any(|v| v.dim() != dim) {
        return Err(Error::invalid("elements must share one dimension"));
    }
    let n = values.len() as i64;
    let get = |j: i64| -> Option<&Operator> {
        (1..=n).contains(&j).then(|| &values[(j - 1) as usize])
    };
    let mut lhs = Operator::zeros(dim);
    for v in values {
        lhs.axpy(((h + 1) as f64).into(), v);
    }
    let mut rhs = Operator::zeros(dim);
    for k in 1..=(n + h) {
        for j in (k - h)..=k {
            if let Some(v) = get(j) {
                rhs.axpy(1.0.into(), v);
            }
        }
    }
    Ok(formula_report(lhs, rhs, h > n))
}

/// Scalar convenience wrapper: lifts to 1 x 1 operators.
pub fn formula1_check_scalars(
    values: &[num_complex::Complex64],
    h: i64,
) -> Result<FormulaReport> {
    let ops: Vec<Operator> = values
        .iter()
        .map(|&z| Operator::new(Array2::from_elem((1, 1), z)))
        .collect::<Result<_>>()?;
    formula1_check(&ops, h)
}

/// Double-window rearrangement over a square array:
/// `sum_{k=1}^{n+h} sum_{j,j'=k-h}^{k} a_{j,j'}` against
/// `(h+1) sum_j a_{j,j} + sum_{d=1}^{h} (h-d+1) sum_j (a_{j,j+d} + a_{j+d,j})`.
pub fn formula2_check(array: &OperatorArray2D, h: i64) -> Result<FormulaReport> {
    let (n1, n2) = array.extents();
    if n1 != n2 {
        return Err(Error::invalid(format!(
            "identity needs a square array, got {n1} x {n2}"
        )));
    }
    if h < 0 {
        return Err(Error::invalid("window must be >= 0"));
    }
    let n = n1 as i64;
    let dim = array.dim();
    let mut lhs = Operator::zeros(dim);
    for k in 1..=(n + h) {
        for j in (k - h)..=k {
            for jp in (k - h)..=k {
                lhs.axpy(1.0.into(), array.get(j, jp));
            }
        }
    }
    let mut rhs = Operator::zeros(dim);
    for j in 1..=n {
        rhs.axpy(((h + 1) as f64).into(), array.get(j, j));
    }
    for d in 1..=h {
        let w: num_complex::Complex64 = ((h - d + 1) as f64).into();
        for j in 1..=n {
            rhs.axpy(w, array.get(j, j + d));
            rhs.axpy(w, array.get(j + d, j));
        }
    }
    Ok(formula_report(lhs, rhs, h > n))
}

/// One inequality group under both normalizations.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GroupTerm {
    /// Sum of shifted-average norms, each divided by the overlap count.
    pub overlap: f64,
    /// Same norms divided by `n1 n2` (the literal zero-padded display).
    pub padded: f64,
}

/// Squared-average bound with per-group subtotals.
#[derive(Debug, Clone, Serialize)]
pub struct VdcBoundReport {
    pub n: (usize, usize),
    pub h: (i64, i64),
    /// `|| (1/(n1 n2)) sum a ||^2`.
    pub lhs: f64,
    /// Bound with overlap-normalized groups; never below `rhs_padded`.
    pub rhs: f64,
    /// Bound exactly as displayed, zero padding included. The sharp form.
    pub rhs_padded: f64,
    /// Diagonal, axis-1, axis-2, double-shift, mixed-adjoint subtotals.
    pub groups: [GroupTerm; 5],
    pub outside_hypothesis: bool,
    /// `lhs > rhs_padded + VDC_TOL`; signals an implementation bug.
    pub violation: bool,
}

/// Norm of `sum_j a*_{j + off_l} a_{j + off_r}` plus the overlap count.
fn shifted_norm(
    array: &OperatorArray2D,
    off_l: (i64, i64),
    off_r: (i64, i64),
) -> (f64, f64) {
    let (n1, n2) = array.extents();
    let mut acc = Operator::zeros(array.dim());
    let mut count = 0.0;
    for j1 in 1..=(n1 as i64) {
        for j2 in 1..=(n2 as i64) {
            let left = array.get(j1 + off_l.0, j2 + off_l.1);
            let right = array.get(j1 + off_r.0, j2 + off_r.1);
            if left.norm_l2() == 0.0 || right.norm_l2() == 0.0 {
                continue;
            }
            acc.axpy(1.0.into(), &left.adjoint().mul(right));
            count += 1.0;
        }
    }
    (acc.norm_op(), count)
}

/// Shifted-average norms shared across window pairs: the norm of group
/// `(d1, d2)` does not depend on `h`, only its inclusion does.
struct ShiftTables {
    n: (usize, usize),
    volume: f64,
    lhs: f64,
    diag: (f64, f64),
    axis1: Vec<(f64, f64)>,
    axis2: Vec<(f64, f64)>,
    double_shift: Vec<Vec<(f64, f64)>>,
    mixed: Vec<Vec<(f64, f64)>>,
}

fn shift_tables(array: &OperatorArray2D, m1: i64, m2: i64) -> ShiftTables {
    let (n1, n2) = array.extents();
    let volume = (n1 * n2) as f64;
    let cap = (1.0 / volume).into();
    let mut full = Operator::zeros(array.dim());
    for j1 in 1..=(n1 as i64) {
        for j2 in 1..=(n2 as i64) {
            full.axpy(1.0.into(), array.get(j1, j2));
        }
    }
    ShiftTables {
        n: (n1, n2),
        volume,
        lhs: full.scale(cap).norm_op().powi(2),
        diag: shifted_norm(array, (0, 0), (0, 0)),
        axis1: (1..=m1).map(|d1| shifted_norm(array, (0, 0), (d1, 0))).collect(),
        axis2: (1..=m2).map(|d2| shifted_norm(array, (0, 0), (0, d2))).collect(),
        double_shift: (1..=m1)
            .map(|d1| (1..=m2).map(|d2| shifted_norm(array, (0, 0), (d1, d2))).collect())
            .collect(),
        mixed: (1..=m1)
            .map(|d1| (1..=m2).map(|d2| shifted_norm(array, (d1, 0), (0, d2))).collect())
            .collect(),
    }
}

/// Assemble the report for one window pair; accumulation order matches the
/// defining sums term for term, so the result is bit-identical whether the
/// tables were built for this window alone or for a whole sweep.
fn bound_from_tables(t: &ShiftTables, h1: i64, h2: i64) -> VdcBoundReport {
    let volume = t.volume;
    let big_h = ((h1 + 1) * (h2 + 1)) as f64;
    let mut groups = [GroupTerm {
        overlap: 0.0,
        padded: 0.0,
    }; 5];
    let add = |slot: &mut GroupTerm, (raw, count): (f64, f64)| {
        if count > 0.0 {
            slot.overlap += raw / count;
        }
        slot.padded += raw / volume;
    };
    add(&mut groups[0], t.diag);
    for d1 in 1..=h1 {
        add(&mut groups[1], t.axis1[(d1 - 1) as usize]);
    }
    for d2 in 1..=h2 {
        add(&mut groups[2], t.axis2[(d2 - 1) as usize]);
    }
    for d1 in 1..=h1 {
        for d2 in 1..=h2 {
            add(&mut groups[3], t.double_shift[(d1 - 1) as usize][(d2 - 1) as usize]);
            add(&mut groups[4], t.mixed[(d1 - 1) as usize][(d2 - 1) as usize]);
        }
    }

    let combine = |pick: fn(&GroupTerm) -> f64| -> f64 {
        (4.0 * pick(&groups[0])
            + 8.0 * (pick(&groups[1]) + pick(&groups[2]) + pick(&groups[3]) + pick(&groups[4])))
            / big_h
    };
    let rhs = combine(|g| g.overlap);
    let rhs_padded = combine(|g| g.padded);
    VdcBoundReport {
        n: t.n,
        h: (h1, h2),
        lhs: t.lhs,
        rhs,
        rhs_padded,
        groups,
        outside_hypothesis: h1 > t.n.0 as i64 || h2 > t.n.1 as i64,
        violation: t.lhs > rhs_padded + VDC_TOL,
    }
}

/// Evaluate the inequality at one window pair.
pub fn vdc_bound(array: &OperatorArray2D, h1: i64, h2: i64) -> Result<VdcBoundReport> {
    if h1 < 1 || h2 < 1 {
        return Err(Error::invalid("windows must be >= 1"));
    }
    Ok(bound_from_tables(&shift_tables(array, h1, h2), h1, h2))
}

/// Evaluate the inequality at every admissible window pair `(1,1) <= h <= n`,
/// computing each shifted-average norm once.
pub fn vdc_bound_sweep(array: &OperatorArray2D) -> Vec<VdcBoundReport> {
    let (n1, n2) = array.extents();
    let tables = shift_tables(array, n1 as i64, n2 as i64);
    let mut out = Vec::with_capacity(n1 * n2);
    for h1 in 1..=(n1 as i64) {
        for h2 in 1..=(n2 as i64) {
            out.push(bound_from_tables(&tables, h1, h2));
        }
    }
    out
}

/// The inequality specialized to twisted orbit sums: for a d=2 system the
/// right side is free of the twist, so one evaluation bounds the whole
/// lambda-grid sup. Reports the finite-n bound, the directly computed grid
/// sup, and the first-power Wiener coefficient tail over `[-h, h]`, whose
/// decay in `h` is what sends the bound to zero.
#[derive(Debug, Clone, Serialize)]
pub struct WwProofReport {
    pub n: (i64, i64),
    pub h: (i64, i64),
    pub grid: (usize, usize),
    pub grid_sup: f64,
    pub grid_sup_sq: f64,
    /// `(4/H)||e M(x*x) e|| + (8/H) sum ||e M(...) e||` over the four
    /// shifted groups.
    pub bound: f64,
    pub group_norms: [f64; 5],
    /// `(1/prod(2 h_j + 1)) sum_{|l| <= h} |gamma_x(l)|`.
    pub wiener_tail: f64,
    /// `grid_sup_sq > bound + 1e-8`; signals an implementation bug.
    pub violation: bool,
}

pub fn vdc_apply_wwproof(
    sys: &MatrixSystem,
    x: &Operator,
    e: &Projection,
    n: &MultiIndex,
    h: (i64, i64),
    grid: (usize, usize),
) -> Result<WwProofReport> {
    if sys.dim_params() != 2 {
        return Err(Error::invalid(format!(
            "two-parameter systems only, got d = {}",
            sys.dim_params()
        )));
    }
    n.check_dim(2)?;
    if h.0 < 1 || h.1 < 1 {
        return Err(Error::invalid("windows must be >= 1"));
    }
    if grid.0 < 1 || grid.1 < 1 {
        return Err(Error::invalid("grid resolution must be >= 1 per axis"));
    }
    let compressed_norm = |y: &Operator| -> Result<f64> {
        let avg = ergodic_average(sys, y, n)?;
        Ok(e.op().mul(&avg).mul(e.op()).norm_op())
    };
    let xstar = x.adjoint();
    let mut group_norms = [0.0f64; 5];
    group_norms[0] = compressed_norm(&xstar.mul(x))?;
    for d1 in 1..=h.0 {
        let shifted = apply_power(sys, x, &MultiIndex(vec![d1, 0]))?;
        group_norms[1] += compressed_norm(&xstar.mul(&shifted))?;
    }
    for d2 in 1..=h.1 {
        let shifted = apply_power(sys, x, &MultiIndex(vec![0, d2]))?;
        group_norms[2] += compressed_norm(&xstar.mul(&shifted))?;
    }
    for d1 in 1..=h.0 {
        let left = apply_power(sys, &xstar, &MultiIndex(vec![d1, 0]))?;
        for d2 in 1..=h.1 {
            let shifted = apply_power(sys, x, &MultiIndex(vec![d1, d2]))?;
            group_norms[3] += compressed_norm(&xstar.mul(&shifted))?;
            let part = apply_power(sys, x, &MultiIndex(vec![0, d2]))?;
            group_norms[4] += compressed_norm(&left.mul(&part))?;
        }
    }
    let big_h = ((h.0 + 1) * (h.1 + 1)) as f64;
    let bound = (4.0 * group_norms[0]
        + 8.0 * (group_norms[1] + group_norms[2] + group_norms[3] + group_norms[4]))
        / big_h;

    let grid_sup = uniform_ww_sup(sys, x, e, n, &[grid.0, grid.1])?;

    let mut tail = KahanF64::default();
    for l1 in -h.0..=h.0 {
        for l2 in -h.1..=h.1 {
            tail.add(
                operator_correlation(sys, x, &MultiIndex(vec![l1, l2]))?.norm(),
            );
        }
    }
    let wiener_tail =
        tail.value() / (((2 * h.0 + 1) * (2 * h.1 + 1)) as f64);

    Ok(WwProofReport {
        n: (n.0[0], n.0[1]),
        h,
        grid,
        grid_sup,
        grid_sup_sq: grid_sup * grid_sup,
        bound,
        group_norms,
        wiener_tail,
        violation: grid_sup * grid_sup > bound + 1e-8,
    })
}
