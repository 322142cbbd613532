//! Two-qubit coherence pumping.
//!
//! Two copies of a qubit on `diag(0, Δ)` share the degenerate pair
//! `{|01⟩, |10⟩}`. Rotating inside that pair is energy conserving, and
//! keeping the first qubit moves coherence between the copies.

use crate::channel::{from_dilation_keeping, CovariantChannel};
use crate::error::{Error, Result};
use crate::hamiltonian::LabeledHamiltonian;
use crate::linalg::{c64, CMatrix, C64};
use crate::state::DensityMatrix;
#[allow(unused_imports)]
use num_traits::Float;

/// `U|01⟩ = cosθ|01⟩ + sinθ|10⟩`, `U|10⟩ = −sinθ|01⟩ + cosθ|10⟩`, identity on
/// `|00⟩` and `|11⟩`.
pub fn pump_unitary(theta: f64) -> CMatrix {
    let (s, c) = theta.sin_cos();
    let mut u = CMatrix::identity(4, 4);
    u[(1, 1)] = c64(c, 0.0);
    u[(2, 1)] = c64(s, 0.0);
    u[(1, 2)] = c64(-s, 0.0);
    u[(2, 2)] = c64(c, 0.0);
    u
}

fn check_qubit(h: &LabeledHamiltonian) -> Result<()> {
    if h.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: h.dim(),
        });
    }
    if h.energy(0) == h.energy(1) {
        return Err(Error::DegeneratePair(0, 1));
    }
    Ok(())
}

/// The pumping map `qubit ⊗ qubit → qubit` (first qubit kept).
pub fn pump_channel(h: &LabeledHamiltonian, theta: f64) -> Result<CovariantChannel> {
    check_qubit(h)?;
    let h = h.flattened();
    let pair = h.tensor(&h)?;
    let none = DensityMatrix::basis_state(0, LabeledHamiltonian::trivial(h.context().clone(), 1)?)?;
    from_dilation_keeping(&pump_unitary(theta), &pair, &none, &[0])
}

/// Pumps `σ₁ ⊗ σ₂` and returns the first qubit.
pub fn pump_pair(
    first: &DensityMatrix,
    second: &DensityMatrix,
    theta: f64,
) -> Result<DensityMatrix> {
    if first.hamiltonian().energies() != second.hamiltonian().energies()
        || first.hamiltonian().context() != second.hamiltonian().context()
    {
        return Err(Error::InvalidFactorization(
            "qubit Hamiltonians differ".into(),
        ));
    }
    let h = first.hamiltonian().flattened();
    let ch = pump_channel(&h, theta)?;
    ch.apply(&first.rebind(h.clone())?.tensor(&second.rebind(h)?)?)
}

/// Pumps two copies of `σ`.
pub fn pump_qubits(sigma: &DensityMatrix, theta: f64) -> Result<DensityMatrix> {
    pump_pair(sigma, sigma, theta)
}

/// Output coherence `c·[cosθ + (2p − 1) sinθ]` for two copies of
/// `[[p, c], [c̄, 1 − p]]`.
pub fn pump_coherence_closed_form(p: f64, c: C64, theta: f64) -> C64 {
    c * (theta.cos() + (2.0 * p - 1.0) * theta.sin())
}

/// `θ* = atan(2p − 1)`, where the gain is `√(1 + (2p − 1)²)`.
pub fn optimal_pump_angle(p: f64) -> f64 {
    (2.0 * p - 1.0).atan()
}
