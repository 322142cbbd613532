//! Density matrices bound to a [`LabeledHamiltonian`].

use alloc::format;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::energy::Valuation;
use crate::error::{Error, Result};
use crate::hamiltonian::{validate_factor_subset, LabeledHamiltonian};
use crate::linalg::{self, c64, CMatrix, FactorSplit, C64, ZERO};
use crate::tol;

/// Hermitian, positive semidefinite, unit-trace matrix on the basis of a
/// [`LabeledHamiltonian`].
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
    hamiltonian: LabeledHamiltonian,
}

impl DensityMatrix {
    /// Validates Hermiticity (max entry deviation ≤ 1e-12), trace (within
    /// 1e-12) and positivity (min eigenvalue ≥ −1e-10).
    pub fn new(matrix: CMatrix, hamiltonian: LabeledHamiltonian) -> Result<Self> {
        check_shape(&matrix, hamiltonian.dim())?;
        let herm = linalg::max_abs_diff(&matrix, &matrix.adjoint());
        if herm > tol::HERMITIAN {
            return Err(Error::InvalidState(format!(
                "not Hermitian (deviation {:e})",
                herm
            )));
        }
        let tr = matrix.trace();
        if (tr - linalg::ONE).norm() > tol::TRACE {
            return Err(Error::InvalidState(format!("trace {} != 1", tr)));
        }
        let min = linalg::hermitian_eigenvalues(&matrix)[0];
        if min < tol::PSD {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {:e}",
                min
            )));
        }
        Ok(Self {
            matrix: linalg::hermitize(&matrix),
            hamiltonian,
        })
    }

    /// Projects an approximately valid matrix onto the state space:
    /// Hermitian part, negative eigenvalues clipped to zero, unit trace.
    pub fn projected(matrix: CMatrix, hamiltonian: LabeledHamiltonian) -> Result<Self> {
        check_shape(&matrix, hamiltonian.dim())?;
        let (vals, vecs) = linalg::hermitian_eigen(&matrix);
        let clipped: Vec<f64> = vals.iter().map(|&v| v.max(0.0)).collect();
        let total: f64 = clipped.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidState("no positive weight".into()));
        }
        let d = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            clipped.len(),
            clipped.iter().map(|&v| c64(v / total, 0.0)),
        ));
        let m = &vecs * d * vecs.adjoint();
        Ok(Self {
            matrix: linalg::hermitize(&m),
            hamiltonian,
        })
    }

    /// For outputs of completely positive maps: hermitizes and rescales the
    /// trace without an eigenvalue check. Returns the trace deviation.
    pub(crate) fn from_cp_output(matrix: CMatrix, hamiltonian: LabeledHamiltonian) -> (Self, f64) {
        let m = linalg::hermitize(&matrix);
        let tr = m.trace().re;
        let dev = (tr - 1.0).abs();
        let m = if dev > 0.0 { m * c64(1.0 / tr, 0.0) } else { m };
        (
            Self {
                matrix: m,
                hamiltonian,
            },
            dev,
        )
    }

    pub(crate) fn from_parts_unchecked(matrix: CMatrix, hamiltonian: LabeledHamiltonian) -> Self {
        Self {
            matrix,
            hamiltonian,
        }
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalized) amplitude vector.
    pub fn pure(amplitudes: &[C64], hamiltonian: LabeledHamiltonian) -> Result<Self> {
        let v = nalgebra::DVector::from_column_slice(amplitudes);
        let norm = v.norm();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        let v = v / c64(norm, 0.0);
        check_shape(&CMatrix::zeros(v.len(), v.len()), hamiltonian.dim())?;
        let m = &v * v.adjoint();
        Ok(Self {
            matrix: m,
            hamiltonian,
        })
    }

    pub fn basis_state(index: usize, hamiltonian: LabeledHamiltonian) -> Result<Self> {
        let d = hamiltonian.dim();
        if index >= d {
            return Err(Error::OutOfRange(format!("basis index {} >= {}", index, d)));
        }
        let mut m = CMatrix::zeros(d, d);
        m[(index, index)] = linalg::ONE;
        Ok(Self {
            matrix: m,
            hamiltonian,
        })
    }

    pub fn maximally_mixed(hamiltonian: LabeledHamiltonian) -> Self {
        let d = hamiltonian.dim();
        let m = CMatrix::identity(d, d) * c64(1.0 / d as f64, 0.0);
        Self {
            matrix: m,
            hamiltonian,
        }
    }

    /// Diagonal state from a probability vector (normalized here).
    pub fn diagonal(probs: &[f64], hamiltonian: LabeledHamiltonian) -> Result<Self> {
        check_shape(&CMatrix::zeros(probs.len(), probs.len()), hamiltonian.dim())?;
        if probs.iter().any(|&p| p < 0.0 || !p.is_finite()) {
            return Err(Error::InvalidState(
                "negative or non-finite probability".into(),
            ));
        }
        let total: f64 = probs.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidState("zero total probability".into()));
        }
        let m = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            probs.len(),
            probs.iter().map(|&p| c64(p / total, 0.0)),
        ));
        Ok(Self {
            matrix: m,
            hamiltonian,
        })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn hamiltonian(&self) -> &LabeledHamiltonian {
        &self.hamiltonian
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.matrix[(i, j)]
    }

    pub fn into_parts(self) -> (CMatrix, LabeledHamiltonian) {
        (self.matrix, self.hamiltonian)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.matrix)
    }

    /// Same matrix on a different Hamiltonian of equal dimension.
    pub fn rebind(&self, hamiltonian: LabeledHamiltonian) -> Result<Self> {
        check_shape(&self.matrix, hamiltonian.dim())?;
        Ok(Self {
            matrix: self.matrix.clone(),
            hamiltonian,
        })
    }

    /// Kronecker product; the composite Hamiltonian has energies `E_a + E_b`.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let h = self.hamiltonian.tensor(&other.hamiltonian)?;
        Ok(Self {
            matrix: linalg::kron(&self.matrix, &other.matrix),
            hamiltonian: h,
        })
    }

    /// `ρ^{⊗n}`.
    pub fn power(&self, n: usize) -> Result<Self> {
        let h = self.hamiltonian.power(n)?;
        let mut m = self.matrix.clone();
        for _ in 1..n {
            m = linalg::kron(&m, &self.matrix);
        }
        Ok(Self {
            matrix: m,
            hamiltonian: h,
        })
    }

    /// Reduced state on the kept factors (in the order given).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        let dims = self.hamiltonian.factor_dims();
        validate_factor_subset(keep, dims.len())?;
        let h = self.hamiltonian.restrict(keep)?;
        let split = FactorSplit::new(&dims, keep);
        let mut out = CMatrix::zeros(split.kept_dim, split.kept_dim);
        // Group composite indices by their traced part.
        let mut by_traced: Vec<Vec<(usize, usize)>> = alloc::vec![Vec::new(); split.traced_dim];
        for (full, &(k, t)) in split.parts.iter().enumerate() {
            by_traced[t].push((full, k));
        }
        for group in &by_traced {
            for &(r, kr) in group {
                for &(c, kc) in group {
                    out[(kr, kc)] += self.matrix[(r, c)];
                }
            }
        }
        Ok(Self {
            matrix: out,
            hamiltonian: h,
        })
    }

    /// Reorders tensor factors: output factor `i` is input factor `order[i]`.
    pub fn permute_factors(&self, order: &[usize]) -> Result<Self> {
        let dims = self.hamiltonian.factor_dims();
        let h = self.hamiltonian.permute(order)?;
        let perm = factor_permutation(&dims, order);
        let d = self.dim();
        let mut out = CMatrix::zeros(d, d);
        for r in 0..d {
            for c in 0..d {
                out[(perm[r], perm[c])] = self.matrix[(r, c)];
            }
        }
        Ok(Self {
            matrix: out,
            hamiltonian: h,
        })
    }

    /// `‖a − b‖₁`, the sum of absolute eigenvalues of the difference.
    pub fn trace_norm_distance(&self, other: &Self) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(linalg::hermitian_trace_norm(
            &(&self.matrix - &other.matrix),
        ))
    }

    /// `d(a, b) = ½‖a − b‖₁`.
    pub fn trace_distance(&self, other: &Self) -> Result<f64> {
        Ok(0.5 * self.trace_norm_distance(other)?)
    }

    /// `e^{−iHt} ρ e^{iHt}`: entry `(i, j)` picks up `e^{i(E_j − E_i)t}`.
    pub fn time_evolve(&self, t: f64, valuation: &Valuation) -> Result<Self> {
        let e = self.hamiltonian.numeric(valuation)?;
        let m = CMatrix::from_fn(self.dim(), self.dim(), |i, j| {
            let phase = (e[j] - e[i]) * t;
            self.matrix[(i, j)] * c64(phase.cos(), phase.sin())
        });
        Ok(Self {
            matrix: m,
            hamiltonian: self.hamiltonian.clone(),
        })
    }

    /// Pinching onto exact-energy blocks: entries with `E_i ≠ E_j` are zeroed.
    pub fn dephase(&self) -> Self {
        let e = self.hamiltonian.energies();
        let m = CMatrix::from_fn(self.dim(), self.dim(), |i, j| {
            if e[i] == e[j] {
                self.matrix[(i, j)]
            } else {
                ZERO
            }
        });
        Self {
            matrix: m,
            hamiltonian: self.hamiltonian.clone(),
        }
    }

    /// Largest magnitude among entries connecting distinct energies.
    pub fn max_coherence(&self) -> f64 {
        let e = self.hamiltonian.energies();
        let mut best = 0.0f64;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                if e[i] != e[j] {
                    best = best.max(self.matrix[(i, j)].norm());
                }
            }
        }
        best
    }

    pub fn is_incoherent(&self, tolerance: f64) -> bool {
        self.max_coherence() <= tolerance
    }

    /// Max entry deviation from another matrix of the same size.
    pub fn max_entry_distance(&self, other: &Self) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(linalg::max_abs_diff(&self.matrix, &other.matrix))
    }
}

/// Composite index permutation induced by reordering factors with `order`.
pub(crate) fn factor_permutation(dims: &[usize], order: &[usize]) -> Vec<usize> {
    let new_dims: Vec<usize> = order.iter().map(|&k| dims[k]).collect();
    let total: usize = dims.iter().product();
    (0..total)
        .map(|i| {
            let d = linalg::digits(i, dims);
            let nd: Vec<usize> = order.iter().map(|&k| d[k]).collect();
            linalg::compose(&nd, &new_dims)
        })
        .collect()
}

fn check_shape(m: &CMatrix, dim: usize) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::InvalidState("matrix is not square".into()));
    }
    if m.nrows() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: m.nrows(),
        });
    }
    Ok(())
}

/// `ρ_1 ⊗ ρ_2 ⊗ …`.
pub fn tensor_all(states: &[DensityMatrix]) -> Result<DensityMatrix> {
    let (first, rest) = states
        .split_first()
        .ok_or_else(|| Error::InvalidFactorization("empty product".into()))?;
    rest.iter().try_fold(first.clone(), |acc, s| acc.tensor(s))
}
