//! Fixed numerical tolerances.

/// Max entry deviation of `ρ − ρ†`.
pub const HERMITIAN: f64 = 1e-12;
/// Allowed deviation of the trace from one.
pub const TRACE: f64 = 1e-12;
/// Smallest eigenvalue accepted as positive semidefinite.
pub const PSD: f64 = -1e-10;
/// Max entry deviation of `Σ K†K − I`.
pub const COMPLETENESS: f64 = 1e-10;
/// Commutator norm below which a channel counts as covariant.
pub const COVARIANCE: f64 = 1e-10;
/// Max entry deviation of `U†U − I` for dilation unitaries.
pub const UNITARITY: f64 = 1e-10;
/// Default coherence cutoff for mode sets.
pub const MODE_THRESHOLD: f64 = 1e-12;
/// Eigenvalue pairs with `λ_k + λ_l` at or below this are skipped in the QFI sum.
pub const QFI_PAIR_CUTOFF: f64 = 1e-14;
/// Eigenvalues at or below this are treated as zero before taking `√ρ`.
pub const SQRT_CUTOFF: f64 = 1e-14;
/// Default cap on composite dimensions built by the n-copy constructions.
pub const DIMENSION_CAP: usize = 1 << 12;
