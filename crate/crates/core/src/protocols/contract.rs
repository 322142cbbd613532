//! Marginal-catalytic contract checking.
//!
//! A protocol supplies `(Λ, ξ, {c_i}, ρ′, ε)` with `Λ` acting on
//! `S ⊗ C_1 ⊗ … ⊗ C_N`. The contract is `‖Tr_C τ − ρ′‖₁ < ε` and
//! `Tr_{\C_i} τ = c_i` for `τ = Λ(ξ ⊗ c_1 ⊗ … ⊗ c_N)`.

use alloc::vec::Vec;

use crate::channel::{Channel, CovariantChannel};
use crate::error::{Error, Result};
use crate::state::DensityMatrix;

/// Deviation below which a catalyst counts as returned exactly, and below
/// which the target counts as reached when `ε = 0`.
pub const EXACT: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolBundle {
    pub channel: CovariantChannel,
    pub input: DensityMatrix,
    pub catalysts: Vec<DensityMatrix>,
    pub target: DensityMatrix,
    pub epsilon: f64,
}

/// Source of a protocol instance; the construction itself is up to the
/// implementor.
pub trait MarginalCatalyticProtocol {
    fn bundle(&self) -> Result<ProtocolBundle>;
}

impl MarginalCatalyticProtocol for ProtocolBundle {
    fn bundle(&self) -> Result<ProtocolBundle> {
        Ok(self.clone())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContractReport {
    /// `‖Tr_C τ − ρ′‖₁`.
    pub target_deviation: f64,
    /// `‖Tr_{\C_i} τ − c_i‖₁` per catalyst.
    pub catalyst_deviations: Vec<f64>,
    pub epsilon: f64,
}

impl ContractReport {
    pub fn target_ok(&self) -> bool {
        self.target_deviation < self.epsilon || self.target_deviation <= EXACT
    }

    pub fn catalysts_ok(&self) -> bool {
        self.catalyst_deviations.iter().all(|&d| d <= EXACT)
    }

    pub fn passed(&self) -> bool {
        self.target_ok() && self.catalysts_ok()
    }
}

fn malformed(msg: &str) -> Error {
    Error::MalformedProtocol(msg.into())
}

pub fn verify_marginal_catalytic<P: MarginalCatalyticProtocol + ?Sized>(
    protocol: &P,
) -> Result<ContractReport> {
    let b = protocol.bundle()?;
    if !(b.epsilon >= 0.0) {
        return Err(malformed("epsilon must be nonnegative"));
    }
    let mut joint = b.input.clone();
    for c in &b.catalysts {
        joint = joint.tensor(c)?;
    }
    if b.channel.input().dim() != joint.dim() {
        return Err(malformed("channel input does not match input ⊗ catalysts"));
    }
    let joint = joint
        .rebind(b.channel.input().clone())
        .map_err(|_| malformed("channel input spectrum does not match input ⊗ catalysts"))?;
    let target_factors = b.target.hamiltonian().factors().len();
    let mut out_factors = b.target.hamiltonian().factors().to_vec();
    for c in &b.catalysts {
        out_factors.extend_from_slice(c.hamiltonian().factors());
    }
    let out_h = crate::hamiltonian::LabeledHamiltonian::from_factors(
        b.target.hamiltonian().context().clone(),
        out_factors,
    )?;
    if !out_h.same_spectrum(b.channel.output()) {
        return Err(malformed(
            "channel output does not match target ⊗ catalysts",
        ));
    }
    let tau = b.channel.apply(&joint)?.rebind(out_h)?;

    let system: Vec<usize> = (0..target_factors).collect();
    let target_deviation = tau.partial_trace(&system)?.trace_norm_distance(&b.target)?;
    let mut catalyst_deviations = Vec::with_capacity(b.catalysts.len());
    let mut start = target_factors;
    for c in &b.catalysts {
        let nf = c.hamiltonian().factors().len();
        let slots: Vec<usize> = (start..start + nf).collect();
        catalyst_deviations.push(tau.partial_trace(&slots)?.trace_norm_distance(c)?);
        start += nf;
    }
    Ok(ContractReport {
        target_deviation,
        catalyst_deviations,
        epsilon: b.epsilon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::{EnergyValue, SymbolContext};
    use crate::hamiltonian::LabeledHamiltonian;
    use crate::linalg::c64;

    fn qubit() -> LabeledHamiltonian {
        LabeledHamiltonian::new(
            SymbolContext::new(["1"]).unwrap(),
            alloc::vec![EnergyValue::zero(), EnergyValue::integer(0, 1)],
        )
        .unwrap()
    }

    fn plus() -> DensityMatrix {
        DensityMatrix::pure(&[c64(1.0, 0.0), c64(1.0, 0.0)], qubit()).unwrap()
    }

    #[test]
    fn identity_protocol() {
        let b = ProtocolBundle {
            channel: CovariantChannel::identity(qubit()),
            input: plus(),
            catalysts: Vec::new(),
            target: plus(),
            epsilon: 0.0,
        };
        let r = verify_marginal_catalytic(&b).unwrap();
        assert!(r.target_deviation < 1e-15);
        assert!(r.passed());
    }

    #[test]
    fn perturbed_catalyst_is_flagged() {
        let eta = 0.01;
        let c = DensityMatrix::maximally_mixed(qubit());
        let bent = DensityMatrix::diagonal(&[0.5 + eta, 0.5 - eta], qubit()).unwrap();
        let swap_out = CovariantChannel::replacement(qubit(), &bent).unwrap();
        let channel = CovariantChannel::identity(qubit())
            .tensor(&swap_out)
            .unwrap();
        let b = ProtocolBundle {
            channel,
            input: plus(),
            catalysts: alloc::vec![c],
            target: plus(),
            epsilon: 0.1,
        };
        let r = verify_marginal_catalytic(&b).unwrap();
        assert!(r.target_ok());
        assert!((r.catalyst_deviations[0] - 2.0 * eta).abs() < 1e-14);
        assert!(!r.passed());
    }

    #[test]
    fn mismatched_bundle_is_malformed() {
        let b = ProtocolBundle {
            channel: CovariantChannel::identity(qubit()),
            input: plus(),
            catalysts: alloc::vec![plus()],
            target: plus(),
            epsilon: 0.0,
        };
        assert!(matches!(
            verify_marginal_catalytic(&b),
            Err(Error::MalformedProtocol(_))
        ));
    }
}
