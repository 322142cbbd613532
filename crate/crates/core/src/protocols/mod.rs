//! Constructive coherence-manipulation protocols.

mod catalyst;
mod contract;
mod counterexample;
mod extraction;
mod pumping;
mod schedule;

pub use catalyst::{build_correlated_catalyst, CatalystBundle, CatalystContract, SlotKind};
pub use contract::{
    verify_marginal_catalytic, ContractReport, MarginalCatalyticProtocol, ProtocolBundle,
};
pub use counterexample::{
    counterexample_distance_formula, counterexample_report, counterexample_state,
    CounterexampleReport,
};
pub use extraction::{extract_weak_qubit, weak_qubit_extractor};
pub use pumping::{
    optimal_pump_angle, pump_channel, pump_coherence_closed_form, pump_pair, pump_qubits,
    pump_unitary,
};
pub use schedule::{
    check_freshness, minimal_k_for_rate, rate_certificate, recombination_schedule,
    total_conversions, FreshnessReport, RateCertificate, ScheduleRound,
};
