//! Affinity between torus measures and the finite-window inequality reports.
//!
//! The affinity of two nonnegative measures,
//!
//! ```text
//! rho(P, Q) = int sqrt(dP/dnu) sqrt(dQ/dnu) dnu,
//! ```
//!
//! decomposes over our representation: matched atoms contribute
//! `sqrt(p_i q_i)`, atom-vs-density cross terms vanish, and density-vs-density
//! contributes `int sqrt(f g)`, evaluated by midpoint quadrature with dyadic
//! refinement (integrand taken as 0 where either density is <= 0; the measures
//! the estimators produce are nonnegative up to rounding).

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{box_iter, Ladder, MultiIndex};
use crate::spectral::empirical::{empirical_density, EmpiricalDensity};
use crate::spectral::measure::{TorusMeasure, TorusPolynomial};
use crate::spectral::{point_mass, FourierCoeffs};
use crate::sum::{KahanC64, KahanF64};
use crate::torus::{TorusPoint, DEFAULT_TOL};
use crate::weights::{amplitude_estimate, WeightSequence};

/// Midpoint-rule refinement controls for the continuous part.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct QuadratureConfig {
    /// Starting grid points per axis.
    pub start_per_axis: usize,
    /// Number of dyadic refinements allowed.
    pub max_refinements: usize,
    /// Stop when successive refinements agree to this relative tolerance.
    pub rel_tol: f64,
}

impl QuadratureConfig {
    pub fn for_dim(dim: usize) -> Self {
        QuadratureConfig {
            start_per_axis: if dim <= 1 { 64 } else { 32 },
            max_refinements: 6,
            rel_tol: 1e-6,
        }
    }
}

fn midpoint_integral(f: &dyn Fn(&TorusPoint) -> f64, dim: usize, per_axis: usize) -> f64 {
    let hi: Vec<i64> = vec![per_axis as i64 - 1; dim];
    let lo = vec![0i64; dim];
    let mut acc = KahanF64::default();
    for idx in box_iter(&lo, &hi) {
        let z = TorusPoint::new(
            idx.iter()
                .map(|&i| (i as f64 + 0.5) / per_axis as f64)
                .collect(),
        )
        .expect("grid angles finite");
        acc.add(f(&z));
    }
    acc.value() / (per_axis as f64).powi(dim as i32)
}

fn refine_integral(f: &dyn Fn(&TorusPoint) -> f64, dim: usize, quad: &QuadratureConfig) -> f64 {
    let mut per_axis = quad.start_per_axis.max(2);
    let mut value = midpoint_integral(f, dim, per_axis);
    for _ in 0..quad.max_refinements {
        per_axis *= 2;
        let next = midpoint_integral(f, dim, per_axis);
        let stable = (next - value).abs() <= quad.rel_tol * next.abs().max(1e-12);
        value = next;
        if stable {
            break;
        }
    }
    value
}

/// Hellinger affinity with default quadrature.
pub fn affinity(p: &TorusMeasure, q: &TorusMeasure) -> Result<f64> {
    affinity_with(p, q, &QuadratureConfig::for_dim(p.dim()))
}

pub fn affinity_with(p: &TorusMeasure, q: &TorusMeasure, quad: &QuadratureConfig) -> Result<f64> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), got: q.dim() });
    }
    let mut total = KahanF64::default();
    for (zp, mp) in p.atoms() {
        for (zq, mq) in q.atoms() {
            if zp.distance(zq) <= DEFAULT_TOL {
                total.add((mp * mq).sqrt());
            }
        }
    }
    if let (Some(fp), Some(fq)) = (p.density(), q.density()) {
        let integrand = move |z: &TorusPoint| -> f64 {
            let a = fp.eval(z).re;
            let b = fq.eval(z).re;
            if a <= 0.0 || b <= 0.0 {
                0.0
            } else {
                (a * b).sqrt()
            }
        };
        total.add(refine_integral(&integrand, p.dim(), quad));
    }
    Ok(total.value())
}

/// Finite-window comparison of `(1/|n+1|) |sum a conj(b)|` against the
/// affinity of the two empirical densities. The inequality holds exactly for
/// the true integrals; the violation flag uses `tolerance` to absorb
/// quadrature error, and firing still indicates an implementation bug, not a
/// counterexample.
#[derive(Debug, Clone, Serialize)]
pub struct AffinityReport {
    pub value: f64,
    pub affinity_empirical: f64,
    pub tolerance: f64,
    pub violation: bool,
}

pub fn affinity_sequences(
    a: &WeightSequence,
    b: &WeightSequence,
    n: &MultiIndex,
) -> Result<AffinityReport> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: b.dim() });
    }
    n.check_dim(a.dim())?;
    a.require_coverage(n)?;
    b.require_coverage(n)?;
    let va = a.flat_view();
    let vb = b.flat_view();
    let zeros = vec![0i64; a.dim()];
    let mut acc = KahanC64::default();
    crate::lattice::for_each_box(&zeros, &n.0, |k| {
        acc.add(va.get(k) * vb.get(k).conj());
    });
    let value = (acc.value() / n.box_volume()).norm();

    let da = empirical_density(a, n)?;
    let db = empirical_density(b, n)?;
    let quad = QuadratureConfig::for_dim(a.dim());
    let fa = move |z: &TorusPoint| da.eval(z).max(0.0);
    let fb = move |z: &TorusPoint| db.eval(z).max(0.0);
    let integrand = move |z: &TorusPoint| (fa(z) * fb(z)).sqrt();
    let affinity_empirical = refine_integral(&integrand, a.dim(), &quad);

    let tolerance = 1e-3 * (1.0 + value.abs());
    Ok(AffinityReport {
        value,
        affinity_empirical,
        tolerance,
        violation: value > affinity_empirical + tolerance,
    })
}

/// One rung of the pointwise bound `|Gamma_n(z)| <= sqrt(sigma_n({z}))`.
#[derive(Debug, Clone, Serialize)]
pub struct PointBoundRung {
    pub n: Vec<i64>,
    pub amplitude_abs: f64,
    pub point_mass: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PointBoundReport {
    pub angles: Vec<f64>,
    pub pointmass_halfwidth: i64,
    pub rungs: Vec<PointBoundRung>,
    pub tolerance: f64,
    pub violation: bool,
}

/// Ladder of `|amplitude|` against `sqrt(point mass)` at `z`. Point masses
/// use a window of halfwidth `pm_halfwidth` per axis on each rung's empirical
/// density; the window must sit well inside every rung (the density carries
/// triangular coefficient weights, so a full-size window halves a pure atom).
/// `tol` absorbs the finite-window error; the flag checks the top rung.
pub fn ww_pointbound(
    a: &WeightSequence,
    z: &TorusPoint,
    ladder: &Ladder,
    pm_halfwidth: i64,
    tol: f64,
) -> Result<PointBoundReport> {
    if z.dim() != a.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: z.dim() });
    }
    if ladder.dim() != a.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: ladder.dim() });
    }
    if pm_halfwidth < 1 {
        return Err(Error::invalid("point-mass halfwidth must be >= 1"));
    }
    if ladder.0.iter().any(|n| n.0.iter().any(|&c| c < pm_halfwidth)) {
        return Err(Error::invalid(format!(
            "point-mass halfwidth {pm_halfwidth} exceeds a ladder rung"
        )));
    }
    let h = MultiIndex::splat(a.dim(), pm_halfwidth);
    let mut rungs = Vec::with_capacity(ladder.0.len());
    for n in &ladder.0 {
        let amp = amplitude_estimate(a, z, n)?;
        let dens = empirical_density(a, n)?;
        let pm = point_mass(&dens, z, &h)?;
        rungs.push(PointBoundRung {
            n: n.0.clone(),
            amplitude_abs: amp.norm(),
            point_mass: pm.value,
            bound: pm.value.max(0.0).sqrt(),
        });
    }
    let top = rungs.last().expect("ladder nonempty");
    let violation = top.amplitude_abs > top.bound + tol;
    Ok(PointBoundReport {
        angles: z.angles().to_vec(),
        pointmass_halfwidth: pm_halfwidth,
        rungs,
        tolerance: tol,
        violation,
    })
}

/// Weak-convergence pairings of one test function.
#[derive(Debug, Clone, Serialize)]
pub struct TestFnReport {
    pub pairings: Vec<Complex64>,
    pub target: Complex64,
    pub discrepancies: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct WeakConvergenceReport {
    pub per_fn: Vec<TestFnReport>,
    pub max_top_discrepancy: f64,
}

/// Exact Fourier pairing `int f d sigma = sum_m c_f(m) sigma_hat(m)`.
fn pair(f: &TorusPolynomial, coeffs: &dyn FourierCoeffs) -> Complex64 {
    let h = f.halfwidth();
    let neg = h.neg();
    let mut acc = KahanC64::default();
    for m in box_iter(&neg.0, &h.0) {
        let mi = MultiIndex(m);
        let c = f.coeff(&mi);
        if c != Complex64::new(0.0, 0.0) {
            acc.add(c * coeffs.coeff(&mi));
        }
    }
    acc.value()
}

/// Ladder of `int f d sigma_a^n` against `int f d target` for each test
/// polynomial. Test degrees must fit inside every rung's coefficient box.
pub fn weak_convergence_check(
    a: &WeightSequence,
    target: &TorusMeasure,
    testfns: &[TorusPolynomial],
    ladder: &Ladder,
) -> Result<WeakConvergenceReport> {
    if target.dim() != a.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: target.dim() });
    }
    if ladder.dim() != a.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: ladder.dim() });
    }
    if testfns.is_empty() {
        return Err(Error::invalid("need at least one test function"));
    }
    let smallest = &ladder.0[0];
    for f in testfns {
        if f.dim() != a.dim() {
            return Err(Error::DimensionMismatch { expected: a.dim(), got: f.dim() });
        }
        if !f.halfwidth().le(smallest) {
            return Err(Error::BoxExceeded(format!(
                "test degree {} exceeds the smallest rung {smallest}",
                f.halfwidth()
            )));
        }
    }
    let densities: Vec<EmpiricalDensity> = ladder
        .0
        .iter()
        .map(|n| empirical_density(a, n))
        .collect::<Result<_>>()?;
    let mut per_fn = Vec::with_capacity(testfns.len());
    let mut max_top: f64 = 0.0;
    for f in testfns {
        let target_val = pair(f, target);
        let pairings: Vec<Complex64> = densities.iter().map(|d| pair(f, d)).collect();
        let discrepancies: Vec<f64> = pairings.iter().map(|p| (p - target_val).norm()).collect();
        max_top = max_top.max(*discrepancies.last().expect("ladder nonempty"));
        per_fn.push(TestFnReport { pairings, target: target_val, discrepancies });
    }
    Ok(WeakConvergenceReport { per_fn, max_top_discrepancy: max_top })
}
