//! A family of states that is close to `|+⟩⟨+|^{⊗m}` on every qubit but far
//! from it globally:
//!
//! `τ_m = (1−δ)[(1−ε/2)|+⟩⟨+| + (ε/2)|−⟩⟨−|]^{⊗m} + (δ/2)(|+⟩⟨+|^{⊗m} + |−⟩⟨−|^{⊗m})`.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::energy::{EnergyValue, SymbolContext};
use crate::error::{Error, Result};
use crate::hamiltonian::LabeledHamiltonian;
use crate::linalg::{self, c64, CMatrix};
use crate::state::DensityMatrix;
use crate::tol;

fn qubit_h() -> Result<LabeledHamiltonian> {
    LabeledHamiltonian::new(
        SymbolContext::new(["1"])?,
        alloc::vec![EnergyValue::zero(), EnergyValue::integer(0, 1)],
    )
}

fn plus_minus(sign: f64) -> CMatrix {
    CMatrix::from_row_slice(
        2,
        2,
        &[
            c64(0.5, 0.0),
            c64(0.5 * sign, 0.0),
            c64(0.5 * sign, 0.0),
            c64(0.5, 0.0),
        ],
    )
}

fn power(m: &CMatrix, n: usize) -> CMatrix {
    (1..n).fold(m.clone(), |acc, _| linalg::kron(&acc, m))
}

fn check(m: usize, eps: f64, delta: f64) -> Result<()> {
    if m == 0 {
        return Err(Error::OutOfRange("m must be at least 1".into()));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::OutOfRange(alloc::format!(
            "eps = {eps} not in (0, 1)"
        )));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::OutOfRange(alloc::format!(
            "delta = {delta} not in (0, 1)"
        )));
    }
    let dim = 1usize << m.min(usize::BITS as usize - 1);
    if dim > tol::DIMENSION_CAP {
        return Err(Error::DimensionCap {
            dim,
            cap: tol::DIMENSION_CAP,
        });
    }
    Ok(())
}

/// `τ_m` on `m` qubits with Hamiltonian `diag(0, 1)` each.
pub fn counterexample_state(m: usize, eps: f64, delta: f64) -> Result<DensityMatrix> {
    check(m, eps, delta)?;
    let plus = plus_minus(1.0);
    let minus = plus_minus(-1.0);
    let single = &plus * c64(1.0 - eps / 2.0, 0.0) + &minus * c64(eps / 2.0, 0.0);
    let mat = power(&single, m) * c64(1.0 - delta, 0.0)
        + (power(&plus, m) + power(&minus, m)) * c64(delta / 2.0, 0.0);
    DensityMatrix::new(mat, qubit_h()?.power(m)?)
}

/// `f(m, ε) = 2[1 − (1−δ)(1−ε/2)^m − δ/2]`.
pub fn counterexample_distance_formula(m: usize, eps: f64, delta: f64) -> f64 {
    2.0 * (1.0 - (1.0 - delta) * (1.0 - eps / 2.0).powi(m as i32) - delta / 2.0)
}

/// All distances are trace norms `‖·‖₁`.
#[derive(Clone, Debug, PartialEq)]
pub struct CounterexampleReport {
    pub m: usize,
    pub eps: f64,
    pub delta: f64,
    /// `max_i ‖Tr_{\i} τ − |+⟩⟨+|‖₁`.
    pub marginal_dist: f64,
    /// `‖τ − Tr_{\1}τ ⊗ Tr_1 τ‖₁`; zero for `m = 1`.
    pub correlation: f64,
    /// `‖τ − |+⟩⟨+|^{⊗m}‖₁`.
    pub global_dist: f64,
    pub f_formula: f64,
}

pub fn counterexample_report(m: usize, eps: f64, delta: f64) -> Result<CounterexampleReport> {
    let tau = counterexample_state(m, eps, delta)?;
    let h = qubit_h()?;
    let plus = DensityMatrix::new(plus_minus(1.0), h.clone())?;
    let mut marginal_dist = 0.0f64;
    for i in 0..m {
        marginal_dist = marginal_dist.max(tau.partial_trace(&[i])?.trace_norm_distance(&plus)?);
    }
    let correlation = if m == 1 {
        0.0
    } else {
        let rest: Vec<usize> = (1..m).collect();
        let product = tau
            .partial_trace(&[0])?
            .tensor(&tau.partial_trace(&rest)?)?;
        tau.trace_norm_distance(&product)?
    };
    let global_dist = tau.trace_norm_distance(&plus.power(m)?)?;
    Ok(CounterexampleReport {
        m,
        eps,
        delta,
        marginal_dist,
        correlation,
        global_dist,
        f_formula: counterexample_distance_formula(m, eps, delta),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formula_value() {
        assert!((counterexample_distance_formula(2, 0.2, 0.01) - 0.3862).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(counterexample_state(0, 0.1, 0.1).is_err());
        assert!(counterexample_state(2, 1.0, 0.1).is_err());
        assert!(counterexample_state(2, 0.1, 0.0).is_err());
        assert!(matches!(
            counterexample_state(13, 0.1, 0.1),
            Err(Error::DimensionCap { .. })
        ));
    }

    #[test]
    fn single_qubit_report() {
        let r = counterexample_report(1, 0.2, 0.01).unwrap();
        assert_eq!(r.correlation, 0.0);
        assert!((r.global_dist - r.f_formula).abs() < 1e-12);
    }
}
