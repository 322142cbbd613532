//! Coherence manipulation under covariant (time-translation symmetric)
//! operations.
//!
//! The crate is `no_std` with `alloc`. Energies are exact rational vectors
//! over declared-independent symbols ([`energy`]); lattice questions about
//! them are answered exactly ([`lattice`], [`ladder`]). States and channels
//! are dense complex matrices bound to those exact Hamiltonians, so
//! degeneracy and covariance are decided structurally rather than by
//! floating-point closeness.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod channel;
pub mod energy;
pub mod error;
pub mod hamiltonian;
pub mod ladder;
pub mod lattice;
pub mod linalg;
pub mod measures;
pub mod modes;
pub mod protocols;
pub mod sample;
pub mod state;
pub mod tol;

pub use channel::{CovariantChannel, KrausChannel, KrausOperator};
pub use energy::{EnergyValue, SymbolContext, Valuation};
pub use error::{Error, Result};
pub use hamiltonian::{Factor, LabeledHamiltonian};
pub use modes::{ModeSet, Verdict};
pub use state::DensityMatrix;
