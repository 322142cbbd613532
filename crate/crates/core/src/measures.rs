//! Asymmetry monotones.
//!
//! Quantum Fisher information and Wigner–Yanase skew information are additive
//! on tensor products and non-increasing under covariant channels. The
//! relative entropy of asymmetry uses the natural logarithm.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::channel::CovariantChannel;
use crate::energy::Valuation;
use crate::error::Result;
use crate::hamiltonian::LabeledHamiltonian;
use crate::linalg::{self, c64, CMatrix};
use crate::sample;
use crate::state::DensityMatrix;
use crate::tol;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MeasureKind {
    Qfi,
    WySkew,
    RelEntAsym,
}

impl MeasureKind {
    pub const ALL: [MeasureKind; 3] = [
        MeasureKind::Qfi,
        MeasureKind::WySkew,
        MeasureKind::RelEntAsym,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            MeasureKind::Qfi => "QFI",
            MeasureKind::WySkew => "WY_SKEW",
            MeasureKind::RelEntAsym => "REL_ENT_ASYM",
        }
    }
}

impl core::fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `F = 2 Σ_{k,l} (λ_k − λ_l)² / (λ_k + λ_l) · |⟨k|H|l⟩|²`, skipping pairs
/// with `λ_k + λ_l ≤ 1e-14`. Equals `4 Var(H)` on pure states.
pub fn qfi(rho: &DensityMatrix, valuation: &Valuation) -> Result<f64> {
    let h = rho.hamiltonian().numeric(valuation)?;
    let (vals, vecs) = linalg::hermitian_eigen(rho.matrix());
    let d = rho.dim();
    // ⟨k|H|l⟩ with H diagonal in the computational basis.
    let hv = CMatrix::from_fn(d, d, |x, l| vecs[(x, l)] * h[x]);
    let hkl = vecs.adjoint() * hv;
    let mut f = 0.0;
    for k in 0..d {
        for l in 0..d {
            let s = vals[k] + vals[l];
            if s <= tol::QFI_PAIR_CUTOFF {
                continue;
            }
            let diff = vals[k] - vals[l];
            f += diff * diff / s * hkl[(k, l)].norm_sqr();
        }
    }
    Ok((2.0 * f).max(0.0))
}

fn sqrtm(rho: &DensityMatrix) -> CMatrix {
    let (vals, vecs) = linalg::hermitian_eigen(rho.matrix());
    let d = rho.dim();
    let root: Vec<f64> = vals
        .iter()
        .map(|&v| if v > tol::SQRT_CUTOFF { v.sqrt() } else { 0.0 })
        .collect();
    let scaled = CMatrix::from_fn(d, d, |x, k| vecs[(x, k)] * root[k]);
    scaled * vecs.adjoint()
}

/// `I = −½ Tr [√ρ, H]² = ½ Σ_{x,y} |(√ρ)_{xy}|² (h_x − h_y)²`.
pub fn wy_skew(rho: &DensityMatrix, valuation: &Valuation) -> Result<f64> {
    let h = rho.hamiltonian().numeric(valuation)?;
    let s = sqrtm(rho);
    let mut total = 0.0;
    for x in 0..rho.dim() {
        for y in 0..rho.dim() {
            let gap = h[x] - h[y];
            total += s[(x, y)].norm_sqr() * gap * gap;
        }
    }
    Ok(0.5 * total)
}

/// Von Neumann entropy in nats, `0 · ln 0 = 0`.
pub fn entropy(rho: &DensityMatrix) -> f64 {
    linalg::hermitian_eigenvalues(rho.matrix())
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.ln())
        .sum()
}

/// `S(𝒟(ρ)) − S(ρ)` with `𝒟` the exact-block dephasing.
pub fn rel_ent_asym(rho: &DensityMatrix) -> f64 {
    (entropy(&rho.dephase()) - entropy(rho)).max(0.0)
}

pub fn measure(kind: MeasureKind, rho: &DensityMatrix, valuation: &Valuation) -> Result<f64> {
    match kind {
        MeasureKind::Qfi => qfi(rho, valuation),
        MeasureKind::WySkew => wy_skew(rho, valuation),
        MeasureKind::RelEntAsym => Ok(rel_ent_asym(rho)),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeasureReport {
    pub kind: MeasureKind,
    pub value: f64,
    pub valuation: Valuation,
}

pub fn report(rho: &DensityMatrix, valuation: &Valuation) -> Result<Vec<MeasureReport>> {
    MeasureKind::ALL
        .iter()
        .map(|&kind| {
            Ok(MeasureReport {
                kind,
                value: measure(kind, rho, valuation)?,
                valuation: valuation.clone(),
            })
        })
        .collect()
}

/// Allowed increase before a monotonicity check counts as violated.
pub const MONOTONICITY_SLACK: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub channel: usize,
    pub state: usize,
    pub before: f64,
    pub after: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonotonicityReport {
    pub kind: MeasureKind,
    pub checked: usize,
    /// Largest `after − before` over all pairs.
    pub worst_increase: f64,
    pub violations: Vec<Violation>,
}

impl MonotonicityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `measure(Λ(ρ)) ≤ measure(ρ) + 1e-9` for every channel and every
/// state on the channel's input.
pub fn monotonicity_suite(
    kind: MeasureKind,
    channels: &[CovariantChannel],
    states: &[DensityMatrix],
    valuation: &Valuation,
) -> Result<MonotonicityReport> {
    let mut out = MonotonicityReport {
        kind,
        checked: 0,
        worst_increase: f64::NEG_INFINITY,
        violations: Vec::new(),
    };
    for (ci, ch) in channels.iter().enumerate() {
        for (si, rho) in states.iter().enumerate() {
            if rho.dim() != ch.kraus()[0].matrix.ncols() {
                continue;
            }
            let before = measure(kind, rho, valuation)?;
            let after = measure(kind, &ch.apply(rho)?, valuation)?;
            out.checked += 1;
            out.worst_increase = out.worst_increase.max(after - before);
            if after > before + MONOTONICITY_SLACK {
                out.violations.push(Violation {
                    channel: ci,
                    state: si,
                    before,
                    after,
                });
            }
        }
    }
    Ok(out)
}

/// The `n`-copy bound `R(ρ) ≥ R(τ)/n` for `τ` produced covariantly from `ρ^{⊗n}`.
#[derive(Clone, Debug, PartialEq)]
pub struct CopyBound {
    pub single: f64,
    pub per_copy: f64,
}

impl CopyBound {
    pub fn holds(&self) -> bool {
        self.single + MONOTONICITY_SLACK >= self.per_copy
    }
}

pub fn copy_bound(
    kind: MeasureKind,
    rho: &DensityMatrix,
    tau: &DensityMatrix,
    n: usize,
    valuation: &Valuation,
) -> Result<CopyBound> {
    Ok(CopyBound {
        single: measure(kind, rho, valuation)?,
        per_copy: measure(kind, tau, valuation)? / n.max(1) as f64,
    })
}

/// `R(τ) − R(τ_A) − R(τ_B)`; negative means superadditivity fails on `τ`.
pub fn superadditivity_gap(
    kind: MeasureKind,
    tau: &DensityMatrix,
    split: usize,
    valuation: &Valuation,
) -> Result<f64> {
    let nf = tau.hamiltonian().factors().len();
    let a: Vec<usize> = (0..split).collect();
    let b: Vec<usize> = (split..nf).collect();
    let whole = measure(kind, tau, valuation)?;
    let ma = measure(kind, &tau.partial_trace(&a)?, valuation)?;
    let mb = measure(kind, &tau.partial_trace(&b)?, valuation)?;
    Ok(whole - ma - mb)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeReport {
    pub kind: MeasureKind,
    pub trials: usize,
    /// Most negative gap seen (`None` if `trials == 0`).
    pub best_gap: Option<f64>,
    /// State attaining `best_gap`, kept only when the gap is below `−1e-8`.
    pub witness: Option<DensityMatrix>,
}

/// Gap below which a probe result is recorded as a superadditivity witness.
pub const WITNESS_THRESHOLD: f64 = -1e-8;

/// Randomized search over bipartite states on `h_a ⊗ h_b` for a negative
/// superadditivity gap. Samples mix full-rank, low-rank and pure states.
pub fn superadditivity_probe(
    kind: MeasureKind,
    h_a: &LabeledHamiltonian,
    h_b: &LabeledHamiltonian,
    valuation: &Valuation,
    seed: u64,
    trials: usize,
) -> Result<ProbeReport> {
    let h = h_a.tensor(h_b)?;
    let split = h_a.factors().len();
    let mut rng = sample::rng(seed);
    let mut best: Option<(f64, DensityMatrix)> = None;
    for t in 0..trials {
        let tau = match t % 3 {
            0 => sample::pure_state(&h, &mut rng)?,
            1 => sample::mixed_state(&h, 2, &mut rng)?,
            _ => sample::mixed_state(&h, h.dim(), &mut rng)?,
        };
        let gap = superadditivity_gap(kind, &tau, split, valuation)?;
        if best.as_ref().is_none_or(|(g, _)| gap < *g) {
            best = Some((gap, tau));
        }
    }
    Ok(match best {
        None => ProbeReport {
            kind,
            trials,
            best_gap: None,
            witness: None,
        },
        Some((gap, tau)) => ProbeReport {
            kind,
            trials,
            best_gap: Some(gap),
            witness: (gap < WITNESS_THRESHOLD).then_some(tau),
        },
    })
}

/// `(|i⟩ + |j⟩)/√2` as a density matrix.
pub fn equal_superposition(h: &LabeledHamiltonian, i: usize, j: usize) -> Result<DensityMatrix> {
    let mut amps = alloc::vec![c64(0.0, 0.0); h.dim()];
    amps[i] = c64(1.0, 0.0);
    amps[j] = c64(1.0, 0.0);
    DensityMatrix::pure(&amps, h.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::{EnergyValue, SymbolContext};

    fn qubit() -> LabeledHamiltonian {
        LabeledHamiltonian::new(
            SymbolContext::new(["1"]).unwrap(),
            alloc::vec![EnergyValue::zero(), EnergyValue::integer(0, 1)],
        )
        .unwrap()
    }

    fn val() -> Valuation {
        Valuation::new().with("1", 1.0)
    }

    #[test]
    fn plus_state_values() {
        let plus = equal_superposition(&qubit(), 0, 1).unwrap();
        assert!((qfi(&plus, &val()).unwrap() - 1.0).abs() < 1e-10);
        assert!((wy_skew(&plus, &val()).unwrap() - 0.25).abs() < 1e-10);
        assert!((rel_ent_asym(&plus) - core::f64::consts::LN_2).abs() < 1e-10);
    }

    #[test]
    fn incoherent_is_zero() {
        let rho = DensityMatrix::diagonal(&[0.3, 0.7], qubit()).unwrap();
        for kind in MeasureKind::ALL {
            assert_eq!(measure(kind, &rho, &val()).unwrap(), 0.0);
        }
    }

    #[test]
    fn dephasing_kills_measures() {
        let plus = equal_superposition(&qubit(), 0, 1).unwrap();
        let ch = CovariantChannel::dephasing(qubit());
        let r =
            monotonicity_suite(MeasureKind::Qfi, &[ch.clone()], &[plus.clone()], &val()).unwrap();
        assert!(r.passed());
        assert!((r.worst_increase + 1.0).abs() < 1e-10);
        assert!(qfi(&ch.apply(&plus).unwrap(), &val()).unwrap() < 1e-15);
    }

    #[test]
    fn product_gap_vanishes() {
        let plus = equal_superposition(&qubit(), 0, 1).unwrap();
        let tau = plus.tensor(&plus).unwrap();
        for kind in [MeasureKind::Qfi, MeasureKind::WySkew] {
            assert!(superadditivity_gap(kind, &tau, 1, &val()).unwrap().abs() < 1e-12);
        }
    }
}
