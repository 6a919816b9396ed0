//! Weight sequences on the lattice and their correlation/approximation toolkit.
//!
//! A weight sequence is a bounded complex-valued function on `N^d` (stored on a
//! finite box, zero-extended elsewhere). This module provides:
//!
//! - [`WeightSequence`]: the storage type, with closed-form generators and
//!   translation on `Z^d`,
//! - [`TrigPolynomial`]: finite sums `sum_alpha c_alpha z_alpha^k` with exact
//!   correlation and amplitude formulas, used as ground-truth fixtures,
//! - correlation estimators and the ladder-stability probe for the space of
//!   sequences whose correlations converge (`correlation_table`),
//! - Marcinkiewicz seminorms and the associated semi-inner product,
//! - Bochner-Fejer kernels and polynomial approximants,
//! - a classifier that scores a sequence against the three bounded-Besicovitch
//!   conditions (discrete spectrum, existing amplitudes, mass equality).

mod bochner_fejer;
mod classify;
mod correlation;
mod sequence;
mod trigpoly;

pub use bochner_fejer::{bochner_fejer_convolve, bochner_fejer_kernel_eval, AxisKernel, BochnerFejerSpec};
pub use classify::{
    classify_besicovitch, AmplitudeEvidence, AtomEvidence, ClassificationReport, ClassifyConfig,
    ClassifyTolerances, Verdict,
};
pub use correlation::{
    amplitude_estimate, correlation_estimate, correlation_table, marcinkiewicz_seminorm,
    semi_inner_product, CorrelationRow, CorrelationTable,
};
pub use sequence::{Generator, WeightSequence};
pub use trigpoly::TrigPolynomial;
