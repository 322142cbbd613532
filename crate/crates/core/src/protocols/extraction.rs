use alloc::vec::Vec;

use crate::channel::{CovariantChannel, KrausOperator};
use crate::energy::EnergyValue;
use crate::error::{Error, Result};
use crate::hamiltonian::LabeledHamiltonian;
use crate::linalg::{CMatrix, ONE};
use crate::state::DensityMatrix;

/// Covariant map onto a qubit with gap `E_j − E_i` that copies `ρ_ij` to the
/// qubit coherence. Kraus set: `A = |0⟩⟨i| + |1⟩⟨j|` (shift `−E_i`) and
/// `B_k = |0⟩⟨k|` (shift `−E_k`) for every other level `k`.
pub fn weak_qubit_extractor(
    h: &LabeledHamiltonian,
    i: usize,
    j: usize,
) -> Result<CovariantChannel> {
    let d = h.dim();
    if i >= d || j >= d || i == j {
        return Err(Error::OutOfRange(alloc::format!(
            "level pair ({i}, {j}) in dimension {d}"
        )));
    }
    if h.energy(i) == h.energy(j) {
        return Err(Error::DegeneratePair(i, j));
    }
    let out = LabeledHamiltonian::new(
        h.context().clone(),
        alloc::vec![EnergyValue::zero(), h.energy(j) - h.energy(i)],
    )?;
    let mut a = CMatrix::zeros(2, d);
    a[(0, i)] = ONE;
    a[(1, j)] = ONE;
    let mut kraus: Vec<KrausOperator> = alloc::vec![KrausOperator {
        matrix: a,
        shift: -h.energy(i)
    }];
    for k in (0..d).filter(|&k| k != i && k != j) {
        let mut b = CMatrix::zeros(2, d);
        b[(0, k)] = ONE;
        kraus.push(KrausOperator {
            matrix: b,
            shift: -h.energy(k),
        });
    }
    CovariantChannel::new(kraus, h.clone(), out)
}

/// Qubit state on `diag(0, E_j − E_i)` with off-diagonal entry `ρ_ij`.
pub fn extract_weak_qubit(rho: &DensityMatrix, i: usize, j: usize) -> Result<DensityMatrix> {
    weak_qubit_extractor(rho.hamiltonian(), i, j)?.apply(rho)
}
