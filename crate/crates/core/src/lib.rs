//! Computation of the state ensembles that behave like the standard basis
//! under the discrete quantum Fourier transform.
//!
//! The n-dimensional QFT is the unitary `U_n` with entries `ω^{jk}/√n`,
//! `ω = e^{2πi/n}`. An ensemble of states `|ψ_0⟩ … |ψ_{n−1}⟩` is *admissible*
//! when `U_n|ψ_j⟩ = (1/√n) Σ_k ω^{jk} |ψ_k⟩`; collecting the states as the
//! columns of a matrix `A`, admissibility is exactly the commutation condition
//! `U_n A = A U_n`. This crate computes the full commutant of `U_n`, exposes
//! the closed-form solution families for n = 2, 3, 4, and solves the
//! orthonormality constraints on those families, including the complete qubit
//! branches and the qutrit constraint system with its closed-form branches and
//! a deterministic multistart Gauss–Newton solver.
//!
//! Modules:
//! - [`linalg`]: dense complex matrices, the QFT matrix, a one-sided Jacobi
//!   SVD with rank-revealing nullspace, and eigenvalue multiplicities of `U_n`
//!   via the `U⁴ = I` projector identity.
//! - [`commutant`]: the solution space of `U_n A = A U_n`, closed-form
//!   families, membership and symmetry checks.
//! - [`ensemble`]: column ensembles, the admissibility residuals, Gram
//!   matrices, and the JSON wire format.
//! - [`orthonormal`]: orthonormality constraints on the admissible families
//!   (qubit branches, qutrit system `f1..f4`, multistart solver).

pub mod commutant;
pub mod ensemble;
pub mod linalg;
pub mod orthonormal;

pub use commutant::{
    closed_form_family, commutant_basis, commutator_operator, symmetry_report, verify_membership,
    AdmissibleFamily, CommutantBasis, FamilyParams, SymmetryReport,
};
pub use ensemble::{check_qft_admissible, family_to_ensemble, gram, Ensemble};
pub use linalg::{
    dagger, matmul, nullspace, qft_eigen_multiplicities, qft_matrix, CMatrix, Cplx,
    EigenMultiplicities,
};
pub use orthonormal::{
    beta_family_point, branch_x0y0_zero, branch_y0_zero, qubit_branches, qutrit_constraints,
    qutrit_jacobian, qutrit_jacobian_rank, radical_point_y_tenth, real_solutions,
    solve_fixed_imag, solve_full, QubitBranch, QubitBranchSolution, QubitSolution, QutritBranch,
    QutritPoint, QutritPointRecord, Sign, SignChoices, SolveOutcome, SolverConfig,
};

/// Relative singular-value threshold used for every rank decision in the
/// crate (nullspace dimension, span ranks, Jacobian rank).
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Errors shared by all modules.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension must be at least {min}, got {n}")]
    DimensionTooSmall { n: usize, min: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("non-finite value in input")]
    NonFinite,
    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
    #[error("no closed-form family for n = {0} (supported: 2, 3, 4)")]
    UnsupportedFamily(usize),
    #[error("family for n = {n} takes {expected} parameters, got {got}")]
    ParamCount { n: usize, expected: usize, got: usize },
    #[error("domain violation: {0}")]
    DomainViolation(String),
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),
}

pub type Result<T> = std::result::Result<T, Error>;
