use alloc::string::String;

/// Errors raised by state, lattice, channel and protocol constructors.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("symbol contexts differ")]
    ContextMismatch,
    #[error("duplicate symbol `{0}` in context")]
    DuplicateSymbol(String),
    #[error("symbol index {0} is outside the symbol context")]
    UnknownSymbol(usize),
    #[error("symbol `{0}` has no value in the valuation")]
    MissingSymbol(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid density matrix: {0}")]
    InvalidState(String),
    #[error("invalid tensor factorization: {0}")]
    InvalidFactorization(String),
    #[error("energy {0} is not an integer combination of the ladder basis")]
    NotInLattice(String),
    #[error("ladder coordinate {coordinate} outside truncation [{min}, {max}]")]
    TruncationOverflow { coordinate: i64, min: i64, max: i64 },
    #[error("ladder intervals are not rational-linearly independent")]
    DependentIntervals,
    #[error("Kraus completeness violated: max deviation {0:e}")]
    Incomplete(f64),
    #[error("Kraus operator {index} has no definite energy shift (off-shift entry {magnitude:e})")]
    IndefiniteShift { index: usize, magnitude: f64 },
    #[error("operator is not unitary: max deviation {0:e}")]
    NotUnitary(f64),
    #[error("unitary is not energy conserving: max off-block entry {0:e}")]
    NotEnergyConserving(f64),
    #[error("ancilla state is not incoherent: max off-block entry {0:e}")]
    CoherentAncilla(f64),
    #[error("channel is not covariant: commutator norm {0:e}")]
    NotCovariant(f64),
    #[error("levels {0} and {1} are degenerate")]
    DegeneratePair(usize, usize),
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("composite dimension {dim} exceeds cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("malformed protocol bundle: {0}")]
    MalformedProtocol(String),
}

pub type Result<T> = core::result::Result<T, Error>;
