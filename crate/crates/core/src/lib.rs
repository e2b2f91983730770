//! Decides quantum realizability of CHSH correlation vectors for arbitrarily
//! fixed binary qubit observables, constructs explicit witness density
//! operators, and classifies correlation points against the CHSH, Tsirel'son,
//! Tsirel'son-Landau, and Bell-original constraint families.
//!
//! The decision procedure evaluates
//!
//! ```text
//! sqrt(gamma' F(alpha, beta) gamma) + sqrt(gamma' F(alpha, -beta) gamma) <= 2
//! ```
//!
//! where `gamma = (gamma_11, gamma_21, gamma_12, gamma_22)` holds the
//! correlations of the normalized observables and `alpha`, `beta` are the
//! Bloch angles between each party's pair of observables. Degenerate
//! (parallel) observable pairs are handled by dedicated branch criteria that
//! are the continuous extensions of the generic one.
//!
//! Modules:
//! - [`linalg`]: dense complex 2x2 / 4x4 matrices and a cyclic Jacobi
//!   Hermitian eigensolver.
//! - [`observables`]: Bloch observables, normalization, measurement settings,
//!   and the anti-commuting frames `E_mu`, `F_nu`.
//! - [`realizability`]: the F matrix, the feasibility test with its branch
//!   cases, and witness construction/verification.
//! - [`inequalities`]: CHSH, Tsirel'son, Tsirel'son-Landau (three forms plus a
//!   Gram-matrix oracle), Bell's original inequality, and the probability-form
//!   CHSH check.
//! - [`qjp`]: discrete Kirkwood-Dirac characteristic vectors, Bloch
//!   coefficient reconstruction, and marginalization.
//! - [`transforms`]: the symmetry-reduction maps T1, T2 and their composition.
//! - [`sampling`]: seeded Monte Carlo generators and the brute-force oracle
//!   sweeps.

pub mod inequalities;
pub mod linalg;
pub mod observables;
pub mod qjp;
pub mod realizability;
pub mod sampling;
pub mod transforms;

use std::fmt;

/// Centralized tolerance table. Every numeric comparison in the crate uses one
/// of these constants.
pub mod tol {
    /// Algebraic identities (products, expansions, symmetry residuals).
    pub const ALGEBRAIC: f64 = 1e-12;
    /// Eigenvalue assertions and spectra comparisons.
    pub const EIGENVALUE: f64 = 1e-10;
    /// Positive semidefiniteness slack: `min eigenvalue >= -PSD_SLACK`.
    pub const PSD_SLACK: f64 = 1e-10;
    /// Maximum allowed anti-Hermitian part (max norm) before a matrix is
    /// rejected by the `HermMat` constructor.
    pub const HERMITICITY_REJECT: f64 = 1e-9;
    /// Jacobi sweep convergence: off-diagonal Frobenius norm below this.
    pub const JACOBI_OFF_FRO: f64 = 1e-13;
    /// Jacobi sweep limit; exceeding it signals malformed input.
    pub const JACOBI_MAX_SWEEPS: usize = 100;
    /// Parallelism classification threshold on |sin angle|.
    pub const PARALLEL_TOL: f64 = 1e-9;
    /// Slack on the feasibility comparison `lhs <= 2` and on the equality
    /// constraints of the parallel branches.
    pub const FEASIBILITY_SLACK: f64 = 1e-12;
    /// Residual imaginary part allowed in should-be-real quantities; looser
    /// than `ALGEBRAIC` because two cancellations stack in the w22 / w33
    /// reconstruction formulas.
    pub const IMAG_RESIDUAL: f64 = 1e-8;
    /// Positive semidefiniteness slack for the Gram-matrix search.
    pub const GRAM_PSD_SLACK: f64 = 1e-9;
    /// The Gram-oracle agreement sweep excludes points this close to the
    /// Tsirel'son-Landau boundary (arcsin-form margin), where its grid
    /// search cannot certify either verdict.
    pub const TL_BOUNDARY_BUFFER: f64 = 1e-3;
    /// Slack used by the Monte Carlo oracle sweeps on `lhs <= 2`.
    pub const SWEEP_SLACK: f64 = 1e-9;
}

/// Errors shared by all modules.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Matrix dimensions do not match.
    DimMismatch { left: usize, right: usize },
    /// Dimension outside the supported set {2, 4}.
    BadDim(usize),
    /// Anti-Hermitian part exceeds the rejection threshold.
    NotHermitian { residual: f64 },
    /// Jacobi iteration failed to converge within the sweep limit.
    NonConvergence,
    /// Non-finite component in a public constructor.
    NonFinite,
    /// Bloch vector with zero norm.
    ZeroBloch,
    /// Angle outside the accepted range.
    BadAngle(f64),
    /// Cross product vanished although |sin alpha| is above the parallel
    /// threshold.
    InconsistentGeometry,
    /// An operation requiring non-parallel observables received a degenerate
    /// angle or setting.
    DegenerateAngle,
    /// Input violates the kernel membership gamma_11 = gamma_12,
    /// gamma_21 = gamma_22.
    NotInKernel { residual: f64 },
    /// Witness construction requested for an infeasible correlation vector.
    Infeasible,
    /// Explicit w33 value lies outside the feasible interval.
    W33OutOfInterval { value: f64, lo: f64, hi: f64 },
    /// Matrix fails density-operator validation.
    NotDensity { trace_residual: f64, min_eig: f64 },
    /// Correlation component outside [-1, 1].
    OutOfCube { value: f64 },
    /// A should-be-real quantity carries too large an imaginary part.
    ResidualImag { residual: f64 },
    /// Malformed probability data.
    BadProbability(String),
    /// Empty keep set passed to marginalization.
    EmptyKeep,
    /// Slot index outside {1, 2, 3, 4} or repeated/unsorted keep set.
    BadSlot(usize),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimMismatch { left, right } => {
                write!(f, "dimension mismatch: {left} vs {right}")
            }
            Error::BadDim(d) => write!(f, "unsupported dimension {d} (expected 2 or 4)"),
            Error::NotHermitian { residual } => {
                write!(f, "anti-Hermitian part {residual:.3e} exceeds threshold")
            }
            Error::NonConvergence => write!(f, "Jacobi iteration did not converge"),
            Error::NonFinite => write!(f, "non-finite component"),
            Error::ZeroBloch => write!(f, "zero Bloch vector"),
            Error::BadAngle(a) => write!(f, "angle {a} outside [0, pi]"),
            Error::InconsistentGeometry => {
                write!(f, "cross product vanished for a non-parallel pair")
            }
            Error::DegenerateAngle => write!(f, "degenerate (parallel) angle"),
            Error::NotInKernel { residual } => {
                write!(f, "kernel membership violated by {residual:.3e}")
            }
            Error::Infeasible => write!(f, "correlation vector is not realizable"),
            Error::W33OutOfInterval { value, lo, hi } => {
                write!(f, "w33 = {value} outside feasible interval [{lo}, {hi}]")
            }
            Error::NotDensity {
                trace_residual,
                min_eig,
            } => write!(
                f,
                "not a density operator: |trace - 1| = {trace_residual:.3e}, min eigenvalue = {min_eig:.3e}"
            ),
            Error::OutOfCube { value } => {
                write!(f, "correlation component {value} outside [-1, 1]")
            }
            Error::ResidualImag { residual } => {
                write!(f, "imaginary residual {residual:.3e} in a real quantity")
            }
            Error::BadProbability(detail) => write!(f, "malformed probability data: {detail}"),
            Error::EmptyKeep => write!(f, "empty keep set"),
            Error::BadSlot(s) => write!(f, "bad slot {s} (keep sets are ascending subsets of 1..=4)"),
        }
    }
}

impl std::error::Error for Error {}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Correlation vector of the normalized observables in the frozen component
/// order `(gamma_11, gamma_21, gamma_12, gamma_22)`: the first setting index
/// belongs to party A and varies fastest.
pub type CorrVec = [f64; 4];
