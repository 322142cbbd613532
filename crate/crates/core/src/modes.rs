//! Modes of asymmetry and the transformability conditions built on them.
//!
//! The resonant modes `𝒞(ρ)` (integer span) and rational modes `𝒞′(ρ)`
//! (rational span) are infinite; they are never materialized. A [`ModeSet`]
//! stores the finite generator set `𝒟(ρ)` and answers membership.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::energy::{EnergyValue, SymbolContext};
use crate::lattice;
use crate::state::DensityMatrix;
use crate::tol;

/// Energy differences carrying coherence above a threshold.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeSet {
    intervals: BTreeSet<EnergyValue>,
    threshold: f64,
    context: SymbolContext,
}

impl ModeSet {
    /// Builds a set from explicit intervals; negations are added.
    pub fn from_intervals<I>(context: SymbolContext, intervals: I, threshold: f64) -> Self
    where
        I: IntoIterator<Item = EnergyValue>,
    {
        let mut set = BTreeSet::new();
        for d in intervals {
            set.insert(-&d);
            set.insert(d);
        }
        Self {
            intervals: set,
            threshold,
            context,
        }
    }

    pub fn intervals(&self) -> impl Iterator<Item = &EnergyValue> {
        self.intervals.iter()
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, delta: &EnergyValue) -> bool {
        self.intervals.contains(delta)
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn context(&self) -> &SymbolContext {
        &self.context
    }

    /// Nonzero intervals with a positive leading coefficient, one per `±Δ` pair.
    pub fn generators(&self) -> Vec<EnergyValue> {
        use num_traits::Signed;
        self.intervals
            .iter()
            .filter(|d| d.terms().next().is_some_and(|(_, c)| c.is_positive()))
            .cloned()
            .collect()
    }

    /// Whether the set carries no coherence at all (only the zero mode).
    pub fn is_trivial(&self) -> bool {
        self.intervals.iter().all(EnergyValue::is_zero)
    }

    fn generators_in(&self, context: &SymbolContext) -> Option<Vec<EnergyValue>> {
        self.generators()
            .iter()
            .map(|g| g.remap(&self.context, context))
            .collect()
    }
}

/// `𝒟(ρ)`: `E_i − E_j` for every entry with `|ρ_ij| > threshold`.
pub fn modes_of(rho: &DensityMatrix, threshold: f64) -> ModeSet {
    let e = rho.hamiltonian().energies();
    let mut set = BTreeSet::new();
    for i in 0..rho.dim() {
        for j in 0..rho.dim() {
            if rho.entry(i, j).norm() > threshold {
                let d = &e[i] - &e[j];
                set.insert(-&d);
                set.insert(d);
            }
        }
    }
    ModeSet {
        intervals: set,
        threshold,
        context: rho.hamiltonian().context().clone(),
    }
}

/// `x ∈ 𝒞`, the integer span of the modes.
pub fn resonant_member(x: &EnergyValue, modes: &ModeSet) -> bool {
    lattice::z_span_member(x, &modes.generators())
}

/// `x ∈ 𝒞′`, the rational span of the modes.
pub fn rational_member(x: &EnergyValue, modes: &ModeSet) -> bool {
    lattice::q_span_member(x, &modes.generators())
}

/// Which span an inclusion is tested in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpanKind {
    Integer,
    Rational,
}

fn check_subset(target: &ModeSet, source: &ModeSet, kind: SpanKind) -> bool {
    // Target generators in the source context; a symbol unknown to the source
    // is independent of everything there.
    let Some(tg) = target.generators_in(&source.context) else {
        return false;
    };
    let sg = source.generators();
    tg.iter().all(|g| match kind {
        SpanKind::Integer => lattice::z_span_member(g, &sg),
        SpanKind::Rational => lattice::q_span_member(g, &sg),
    })
}

/// `𝒞(target) ⊆ 𝒞(source)`.
pub fn check_subset_z(target: &ModeSet, source: &ModeSet) -> bool {
    check_subset(target, source, SpanKind::Integer)
}

/// `𝒞′(target) ⊆ 𝒞′(source)`.
pub fn check_subset_q(target: &ModeSet, source: &ModeSet) -> bool {
    check_subset(target, source, SpanKind::Rational)
}

/// Outcome of comparing the mode sets of an initial and a target state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    /// `𝒞(ρ′) ⊆ 𝒞(ρ)`: marginal-asymptotic and correlated-catalytic
    /// conversion are both possible.
    Amplifiable,
    /// `𝒞′(ρ′) ⊆ 𝒞′(ρ)` but `𝒞(ρ′) ⊄ 𝒞(ρ)`: no marginal-asymptotic protocol
    /// exists. Whether a correlated catalyst helps is an open conjecture.
    BlockedZ,
    /// `𝒞′(ρ′) ⊄ 𝒞′(ρ)`: not even a correlated catalyst helps.
    BlockedQ,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Amplifiable => "AMPLIFIABLE",
            Verdict::BlockedZ => "BLOCKED_Z",
            Verdict::BlockedQ => "BLOCKED_Q",
        }
    }

    pub fn explanation(&self) -> &'static str {
        match self {
            Verdict::Amplifiable => {
                "target modes lie in the integer span of the source modes; \
                 asymptotic marginal and correlated-catalytic conversion are achievable"
            }
            Verdict::BlockedZ => {
                "a target mode is a rational but not an integer combination of source modes; \
                 asymptotic marginal conversion is impossible, correlated-catalytic \
                 feasibility is open (strong mode no-broadcasting conjecture)"
            }
            Verdict::BlockedQ => {
                "a target mode is not a rational combination of source modes; \
                 impossible even with a correlated catalyst"
            }
        }
    }
}

impl core::fmt::Display for Verdict {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Verdict at the default coherence threshold.
pub fn transform_verdict(rho: &DensityMatrix, target: &DensityMatrix) -> Verdict {
    transform_verdict_with(rho, target, tol::MODE_THRESHOLD)
}

pub fn transform_verdict_with(
    rho: &DensityMatrix,
    target: &DensityMatrix,
    threshold: f64,
) -> Verdict {
    let source = modes_of(rho, threshold);
    let goal = modes_of(target, threshold);
    if !check_subset_q(&goal, &source) {
        Verdict::BlockedQ
    } else if !check_subset_z(&goal, &source) {
        Verdict::BlockedZ
    } else {
        Verdict::Amplifiable
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::LabeledHamiltonian;
    use crate::linalg::c64;

    fn ctx() -> SymbolContext {
        SymbolContext::new(["1", "sqrt2", "sqrt3"]).unwrap()
    }

    fn int(n: i64) -> EnergyValue {
        EnergyValue::integer(0, n)
    }

    fn qubit(gap: EnergyValue) -> LabeledHamiltonian {
        LabeledHamiltonian::new(ctx(), alloc::vec![EnergyValue::zero(), gap]).unwrap()
    }

    fn plus(h: LabeledHamiltonian) -> DensityMatrix {
        DensityMatrix::pure(&[c64(1.0, 0.0), c64(1.0, 0.0)], h).unwrap()
    }

    fn set(v: &[EnergyValue]) -> ModeSet {
        ModeSet::from_intervals(ctx(), v.iter().cloned().chain([EnergyValue::zero()]), 0.0)
    }

    #[test]
    fn modes_of_plus_state() {
        let m = modes_of(&plus(qubit(int(1))), tol::MODE_THRESHOLD);
        let expect: BTreeSet<_> = [int(-1), EnergyValue::zero(), int(1)].into_iter().collect();
        assert_eq!(m.intervals().cloned().collect::<BTreeSet<_>>(), expect);
        assert_eq!(m.generators(), [int(1)]);
        let inc = DensityMatrix::maximally_mixed(qubit(int(1)));
        assert!(modes_of(&inc, 1e-12).is_trivial());
        assert_eq!(modes_of(&inc, 1e-12).len(), 1);
    }

    #[test]
    fn product_modes() {
        let r2 = EnergyValue::integer(1, 1);
        let rho = plus(qubit(int(1)))
            .tensor(&plus(qubit(r2.clone())))
            .unwrap();
        let m = modes_of(&rho, 1e-12);
        let mut expect = BTreeSet::new();
        for d in [
            EnergyValue::zero(),
            int(1),
            r2.clone(),
            &int(1) + &r2,
            &int(1) - &r2,
        ] {
            expect.insert(-&d);
            expect.insert(d);
        }
        assert_eq!(m.intervals().cloned().collect::<BTreeSet<_>>(), expect);
    }

    #[test]
    fn resonant_membership() {
        let m = modes_of(&plus(qubit(int(1))), 1e-12);
        assert!(resonant_member(&int(2), &m));
        assert!(!resonant_member(&EnergyValue::ratio(0, 1, 2), &m));
        assert!(rational_member(&EnergyValue::ratio(0, 1, 2), &m));
        let m = set(&[int(1), EnergyValue::integer(1, 1)]);
        assert!(resonant_member(
            &(&int(1) + &EnergyValue::integer(1, 1)),
            &m
        ));
    }

    #[test]
    fn subset_checks() {
        let src = set(&[int(1), EnergyValue::integer(1, 1)]);
        let t = set(&[int(1)]);
        assert!(check_subset_z(&t, &src) && check_subset_q(&t, &src));
        let t = set(&[EnergyValue::integer(2, 1)]);
        assert!(!check_subset_z(&t, &src) && !check_subset_q(&t, &src));
        let t = set(&[EnergyValue::ratio(0, 1, 2)]);
        let src = set(&[int(1)]);
        assert!(check_subset_q(&t, &src));
        assert!(!check_subset_z(&t, &src));
    }

    #[test]
    fn subset_across_contexts() {
        let other = SymbolContext::new(["1", "pi"]).unwrap();
        let src = set(&[int(1)]);
        let t = ModeSet::from_intervals(other.clone(), [int(3)], 0.0);
        assert!(check_subset_z(&t, &src));
        let t = ModeSet::from_intervals(other, [EnergyValue::integer(1, 1)], 0.0);
        assert!(!check_subset_q(&t, &src));
    }

    #[test]
    fn verdicts() {
        let h = qubit(int(1));
        let weak = DensityMatrix::pure(&[c64(1.0, 0.0), c64(0.05, 0.0)], h.clone()).unwrap();
        let weak = DensityMatrix::new(
            weak.matrix() * c64(0.5, 0.0)
                + DensityMatrix::maximally_mixed(h.clone()).matrix() * c64(0.5, 0.0),
            h.clone(),
        )
        .unwrap();
        assert_eq!(
            transform_verdict(&weak, &plus(h.clone())),
            Verdict::Amplifiable
        );
        let inc = DensityMatrix::maximally_mixed(h.clone());
        assert_eq!(transform_verdict(&inc, &plus(h.clone())), Verdict::BlockedQ);
        let half = plus(qubit(EnergyValue::ratio(0, 1, 2)));
        assert_eq!(transform_verdict(&plus(h), &half), Verdict::BlockedZ);
    }
}
