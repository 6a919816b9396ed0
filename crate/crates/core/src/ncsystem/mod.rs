//! Matrix-algebra dynamical systems.
//!
//! A finite noncommutative probability space here is the algebra of N x N
//! complex matrices with the normalized trace `tau(x) = (1/N) sum x_ii`,
//! acted on by d commuting trace-preserving automorphisms `T_j(x) = U_j x
//! U_j*` built from commuting unitaries. On top of that sit weighted and
//! twisted ergodic averages, operator-valued correlations and spectral
//! coefficients with a two-route identity check, the eigen-decomposition of
//! the conjugation superoperators, almost-uniform-convergence diagnostics,
//! and a classical sample-path channel for scalar streams, where the
//! orthocomplement phenomena that finite matrix models cannot exhibit are
//! exercised instead.

pub mod classical;
pub mod diagnostics;
pub mod kronecker;
pub mod operator;
pub mod spectralcoeff;
pub mod system;

pub use classical::{
    classical_sample_average, classical_twisted_average, classical_twisted_grid, grid_sup,
    read_stream, write_stream, SampleStream,
};
pub use diagnostics::{au_convergence_diagnostic, uniform_ww_sup, AuStrategy, Projection};
pub use kronecker::{kronecker_decomposition, KroneckerDecomposition};
pub use operator::Operator;
pub use spectralcoeff::{
    operator_correlation, operator_spectral_coeff, operator_spectral_coeff_direct,
};
pub use system::{
    apply_power, ergodic_average, random_commuting_unitaries, twisted_average,
    weighted_average, MatrixSystem,
};
