//! Numerical toolkit for weighted multi-parameter ergodic averages.
//!
//! The library makes a cluster of related constructions executable:
//!
//! * correlations and empirical spectral measures of bounded weight
//!   sequences on the lattice `N^d`, with the measures living on the d-torus
//!   ([`weights`], [`spectral`]);
//! * an almost-periodicity classifier driven by point masses, amplitudes and
//!   their consistency ([`weights::classify_besicovitch`]);
//! * Bochner-Fejer kernels and their smoothing action on sequences;
//! * a finite-dimensional matrix dynamical system simulator with commuting
//!   unitaries, weighted/twisted operator averages and uniform sups over
//!   twist frequencies ([`ncsystem`]);
//! * a two-parameter van der Corput inequality checker for operator arrays
//!   ([`vandercorput`]).
//!
//! Estimators are truncations: they evaluate finite lattice sums and report
//! them along growing boxes ("ladders") so that stabilization, not abstract
//! convergence, is what gets asserted. All randomized drivers require an
//! explicit seed and are reproducible byte for byte.

pub mod error;
pub mod lattice;
pub mod sum;
pub mod torus;

pub mod fft;
pub mod linalg;

pub mod weights;

pub mod spectral;

pub mod ncsystem;

pub mod vandercorput;

pub mod config;
pub mod report;

pub use error::{Error, Result};
pub use lattice::{Ladder, MultiIndex};
pub use torus::TorusPoint;

/// Library version, embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
