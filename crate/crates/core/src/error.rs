//! Crate-wide error type and result alias.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// The grid cannot split [0, 2π) into two half-period sectors.
    #[error("sector pairing impossible: samples per period must be even, got {0}")]
    SectorPairingImpossible(usize),

    /// Total point count exceeds the configured ceiling.
    #[error("grid too large: {dim} points exceeds the limit of {max}")]
    GridTooLarge { dim: usize, max: usize },

    /// A scalar argument was NaN or infinite.
    #[error("argument must be finite, got {0}")]
    NonFinite(f64),

    /// A transform was asked for on a state already in the target form.
    #[error("representation mismatch: state is already in the {0} representation")]
    RepresentationMismatch(&'static str),

    /// Two objects built over different grids were combined.
    #[error("grid mismatch between operands")]
    GridMismatch,

    /// A sector index fell outside the base half-period.
    #[error("not a base-sector index: s = {s} must be below {half}")]
    NotBaseSector { s: usize, half: usize },

    /// A tabulated weight entry was NaN or infinite.
    #[error("weight must be real and finite")]
    WeightNotReal,

    /// A weight with |ζ| > 1 has no complementary partner.
    #[error("not completable: |weight| exceeds 1 (max {0})")]
    NotCompletable(f64),

    /// An envelope normalized to zero.
    #[error("degenerate envelope: zero norm")]
    DegenerateEnvelope,

    /// Gaussian envelope widths must be positive.
    #[error("envelope widths must be positive")]
    BadEnvelopeWidth,

    /// A half-grid index was out of range for the grid.
    #[error("fiber index out of range: ({s}, {m})")]
    FiberIndexOutOfRange { s: usize, m: usize },

    /// Decoding needs a state with nonzero norm.
    #[error("zero-norm state cannot be decoded")]
    ZeroNormState,

    /// A rotation pair needs fiberwise ζ² + ζ′² = 1.
    #[error("weights not complementary: max |ζ² + ζ′² − 1| = {0}")]
    WeightsNotComplementary(f64),

    /// Two-mode tensor operators carry a bounded number of terms.
    #[error("two-mode operator takes 1 to {max} tensor terms, got {got}")]
    BadTermCount { got: usize, max: usize },

    /// Dense materialization refused a matrix over the probe budget.
    #[error("dense budget exceeded: dimension {dim} over limit {max}")]
    BudgetExceeded { dim: usize, max: usize },

    /// Vector or matrix shapes disagree.
    #[error("dimension mismatch: {a} vs {b}")]
    DimensionMismatch { a: usize, b: usize },

    /// An axis vector was zero or not finite.
    #[error("axis must be a nonzero finite 3-vector")]
    BadAxis,

    /// A density matrix had an eigenvalue below −tolerance.
    #[error("matrix is not positive semidefinite (min eigenvalue {0})")]
    NotPositive(f64),

    /// Circuit text failed to parse.
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    /// A gate referenced a qubit the circuit does not declare.
    #[error("qubit out of range: index {index} with {count} qubit(s) declared")]
    QubitOutOfRange { index: usize, count: usize },

    /// Self-check suite name was not recognized.
    #[error("unknown suite '{0}'")]
    UnknownSuite(String),
}
