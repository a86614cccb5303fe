//! Finite-truncation models of analytic reproducing kernel Hilbert spaces
//! over the unit ball, and the operator-theoretic machinery that lives on
//! them: defect operators and purity diagnostics for commuting row
//! contractions, co-isometric dilations into truncated vector-valued
//! Drury-Arveson space, partial-isometry factorizations of joint invariant
//! subspaces, and multiplier symbols for shift-invariant subspaces of
//! Hardy/Bergman-type spaces.
//!
//! Everything is dense complex linear algebra at desk scale. Spaces are
//! truncated at a degree cap, which makes the compressed shift tuples
//! nilpotent and turns the infinite-dimensional identities into exact
//! finite ones (up to floating point), with honest residuals reported
//! where truncation genuinely loses information.

pub mod ballspace;
pub mod dilation;
pub mod invariant;
pub mod linalg;
pub mod multiindex;
pub mod multiplier;
pub mod optuple;
pub mod serialize;
pub mod verify;

pub use ballspace::{
    inner_product, kernel_coefficients, kernel_vector, make_space, make_space_from_coefficients,
    shift_tuple, BallPoint, KernelFamily, SpaceVector, TruncatedSpace,
};
pub use dilation::{build_dilation, dilation_diagnostics, DilationDiagnostics, DilationMap};
pub use invariant::{
    check_invariant, factor_invariant_subspace, orthonormalize, restrict_tuple, FactorDiagnostics,
    InvariantFactor, InvariantReport, Subspace,
};
pub use multiindex::{enumerate_upto, gamma, gamma_exact, Basis, MultiIndex};
pub use multiplier::{
    check_intertwining, extract_symbol, factor_to_multiplier, joint_eigenspace_dim,
    multiplier_matrix, symbol_coefficients, symbol_grid, verify_analytic, AnalyticReport,
    IntertwinerCheck, MultiplierDiagnostics, MultiplierFactor,
};
pub use optuple::{
    cp_apply, cp_power_multinomial, defect, purity_report, validate_tuple, DefectData,
    OperatorTuple, PurityReport, PurityVerdict, ValidationReport,
};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex<f64>;
/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dense complex column vector.
pub type CVector = nalgebra::DVector<C64>;

/// Default tolerance for commutator norms when validating a tuple.
pub const DEFAULT_COMMUTATOR_TOL: f64 = 1e-10;
/// Default relative threshold for defect-rank decisions.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;
/// Default residual tolerance below which a CP iterate counts as zero.
pub const DEFAULT_PURITY_TOL: f64 = 1e-10;
/// Default iteration budget for the purity test.
pub const DEFAULT_PURITY_MAX_ITER: usize = 500;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("degree {degree} exceeds the exact multinomial range (max {max})")]
    DegreeLimit { degree: u32, max: u32 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("tuple is not commuting: max commutator norm {norm:.3e} exceeds {tol:.3e}")]
    NotCommuting { norm: f64, tol: f64 },

    #[error("tuple is not a row contraction: min eigenvalue of I - sum T_i T_i* is {min_eig:.3e}")]
    NotRowContraction { min_eig: f64 },

    #[error("point lies outside the open unit ball (|w| = {norm:.6})")]
    PointOutsideBall { norm: f64 },

    #[error("subspace is not jointly invariant: residual {residual:.3e} exceeds {tol:.3e}")]
    NotInvariant { residual: f64, tol: f64 },

    #[error("non-trivial subspace required")]
    ZeroSubspace,

    #[error("tuple is not pure: residual {residual:.3e} after {iterations} iterations")]
    NotPure { residual: f64, iterations: usize },

    #[error("tuple has zero defect rank; nothing to dilate")]
    ZeroDefect,

    #[error("operator does not intertwine the shift tuples: residual {residual:.3e}")]
    NotIntertwining { residual: f64 },

    #[error("target space is not analytic: {0}")]
    NotAnalytic(String),
}

pub type Result<T> = std::result::Result<T, Error>;
