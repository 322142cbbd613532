//! Correlated catalyst from an `n`-copy channel.
//!
//! Given `τ = Λ_n(ρ^{⊗n})`, the catalyst on `S^{⊗(n−1)} ⊗ R` is
//! `c = (1/n) Σ_k ρ^{⊗(k−1)} ⊗ τ_{n−k} ⊗ |k⟩⟨k|_R` with `τ_i` the marginal of
//! `τ` on its first `i` copies. The channel on `S ⊗ C` applies `Λ_n` when the
//! register reads `n`, advances the register `k → k+1` (and `n → 1`), then
//! hands the last system slot out as the new `S`.

use alloc::vec::Vec;

use crate::channel::{Channel, CovariantChannel, KrausOperator};
use crate::energy::EnergyValue;
use crate::error::{Error, Result};
use crate::hamiltonian::{Factor, LabeledHamiltonian};
use crate::linalg::{self, c64, CMatrix, ONE};
use crate::state::DensityMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlotKind {
    Catalyst,
    Register,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CatalystBundle {
    /// State on `S^{⊗(n−1)} ⊗ R`.
    pub state: DensityMatrix,
    pub register_dim: usize,
    /// One entry per tensor factor of `state`.
    pub slots: Vec<SlotKind>,
    /// `(1/n) Σ_i Tr_{\i} τ`, the system marginal the channel must produce.
    pub system_target: DensityMatrix,
}

impl CatalystBundle {
    /// Checks both exactness contracts on `Λ(ρ ⊗ c)`. Deviations are maximum
    /// entry differences.
    pub fn verify(
        &self,
        rho: &DensityMatrix,
        channel: &CovariantChannel,
    ) -> Result<CatalystContract> {
        let s = rho.rebind(rho.hamiltonian().flattened())?;
        let out = channel.apply(&s.tensor(&self.state)?)?;
        let nf = out.hamiltonian().factors().len();
        let rest: Vec<usize> = (1..nf).collect();
        let catalyst = out.partial_trace(&rest)?;
        let system = out.partial_trace(&[0])?;
        Ok(CatalystContract {
            catalyst_deviation: catalyst.max_entry_distance(&self.state)?,
            system_deviation: system.max_entry_distance(&self.system_target)?,
            system,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CatalystContract {
    pub catalyst_deviation: f64,
    pub system_deviation: f64,
    pub system: DensityMatrix,
}

impl CatalystContract {
    pub fn holds(&self, tolerance: f64) -> bool {
        self.catalyst_deviation <= tolerance && self.system_deviation <= tolerance
    }
}

fn block_state(parts: &[&CMatrix]) -> CMatrix {
    parts
        .iter()
        .skip(1)
        .fold(parts[0].clone(), |acc, m| linalg::kron(&acc, m))
}

/// Builds the catalyst and the catalytic channel on `S ⊗ S^{⊗(n−1)} ⊗ R`.
/// `lambda_n` must map `S^{⊗n}` to itself; the composite dimension
/// `d^n · n` may not exceed `cap`.
pub fn build_correlated_catalyst(
    rho: &DensityMatrix,
    lambda_n: &CovariantChannel,
    n: usize,
    cap: usize,
) -> Result<(CatalystBundle, CovariantChannel)> {
    if n == 0 {
        return Err(Error::OutOfRange("n must be at least 1".into()));
    }
    let s_h = rho.hamiltonian().flattened();
    let d = s_h.dim();
    let sn_dim = d.checked_pow(n as u32).ok_or(Error::DimensionCap {
        dim: usize::MAX,
        cap,
    })?;
    let total = sn_dim.checked_mul(n).ok_or(Error::DimensionCap {
        dim: usize::MAX,
        cap,
    })?;
    if total > cap {
        return Err(Error::DimensionCap { dim: total, cap });
    }
    let sn_h = s_h.power(n)?;
    if lambda_n.input().dim() != sn_dim || lambda_n.output().dim() != sn_dim {
        return Err(Error::InvalidFactorization(
            "the n-copy channel must map S^n to itself".into(),
        ));
    }
    let lambda = lambda_n.rebind(sn_h.clone(), sn_h)?;
    let rho = rho.rebind(s_h.clone())?;
    let ctx = s_h.context().clone();

    let tau = lambda.apply(&rho.power(n)?)?;
    // marginals[i] = τ_i for i = 1..n.
    let mut marginals: Vec<Option<CMatrix>> = alloc::vec![None];
    for i in 1..=n {
        let keep: Vec<usize> = (0..i).collect();
        marginals.push(Some(tau.partial_trace(&keep)?.matrix().clone()));
    }

    let s_factor = Factor::new(s_h.energies().to_vec());
    let r_factor = Factor::new(alloc::vec![EnergyValue::zero(); n]);
    let mut c_factors = alloc::vec![s_factor.clone(); n - 1];
    c_factors.push(r_factor.clone());
    let c_h = LabeledHamiltonian::from_factors(ctx.clone(), c_factors)?;

    let weight = c64(1.0 / n as f64, 0.0);
    let one = CMatrix::identity(1, 1);
    let mut c = CMatrix::zeros(c_h.dim(), c_h.dim());
    for k in 1..=n {
        let mut reg = CMatrix::zeros(n, n);
        reg[(k - 1, k - 1)] = ONE;
        let rho_part = if k == 1 {
            one.clone()
        } else {
            rho.power(k - 1)?.matrix().clone()
        };
        let tau_part = marginals[n - k].clone().unwrap_or_else(|| one.clone());
        c += block_state(&[&rho_part, &tau_part, &reg]) * weight;
    }
    let state = DensityMatrix::new(c, c_h)?;

    let mut system_target = CMatrix::zeros(d, d);
    for i in 0..n {
        system_target += tau.partial_trace(&[i])?.matrix() * weight;
    }
    let system_target = DensityMatrix::new(system_target, s_h.clone())?;

    // Composite S^n ⊗ R with index s·n + r, register value k = r + 1.
    let mut all_factors = alloc::vec![s_factor; n];
    all_factors.push(r_factor);
    let full_h = LabeledHamiltonian::from_factors(ctx, all_factors)?;
    let dims = alloc::vec![d; n];
    let front: Vec<usize> = (0..sn_dim)
        .map(|s| {
            let mut digs = linalg::digits(s, &dims);
            let last = digs.pop().unwrap_or(0);
            digs.insert(0, last);
            linalg::compose(&digs, &dims)
        })
        .collect();
    let mut kraus = Vec::with_capacity(n - 1 + lambda.kraus().len());
    for r in 0..n - 1 {
        let mut k = CMatrix::zeros(total, total);
        for s in 0..sn_dim {
            k[(front[s] * n + r + 1, s * n + r)] = ONE;
        }
        kraus.push(KrausOperator {
            matrix: k,
            shift: EnergyValue::zero(),
        });
    }
    for op in lambda.kraus() {
        let mut k = CMatrix::zeros(total, total);
        for f in 0..sn_dim {
            for e in 0..sn_dim {
                k[(front[f] * n, e * n + n - 1)] = op.matrix[(f, e)];
            }
        }
        kraus.push(KrausOperator {
            matrix: k,
            shift: op.shift.clone(),
        });
    }
    let channel = CovariantChannel::new(kraus, full_h.clone(), full_h)?;

    let mut slots = alloc::vec![SlotKind::Catalyst; n - 1];
    slots.push(SlotKind::Register);
    Ok((
        CatalystBundle {
            state,
            register_dim: n,
            slots,
            system_target,
        },
        channel,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::SymbolContext;
    use crate::tol;

    fn plus() -> DensityMatrix {
        let h = LabeledHamiltonian::new(
            SymbolContext::new(["1"]).unwrap(),
            alloc::vec![EnergyValue::zero(), EnergyValue::integer(0, 1)],
        )
        .unwrap();
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[c64(0.6, 0.0), c64(0.2, 0.1), c64(0.2, -0.1), c64(0.4, 0.0)],
        );
        DensityMatrix::new(m, h).unwrap()
    }

    #[test]
    fn identity_channel_returns_rho() {
        let rho = plus();
        for n in 1..=3 {
            let id = CovariantChannel::identity(rho.hamiltonian().power(n).unwrap());
            let (bundle, ch) = build_correlated_catalyst(&rho, &id, n, tol::DIMENSION_CAP).unwrap();
            let report = bundle.verify(&rho, &ch).unwrap();
            assert!(report.holds(1e-12), "{report:?}");
            assert!(report.system.max_entry_distance(&rho).unwrap() < 1e-12);
        }
    }

    #[test]
    fn cap_is_enforced() {
        let rho = plus();
        let id = CovariantChannel::identity(rho.hamiltonian().power(3).unwrap());
        assert!(matches!(
            build_correlated_catalyst(&rho, &id, 3, 23),
            Err(Error::DimensionCap { dim: 24, .. })
        ));
    }
}
