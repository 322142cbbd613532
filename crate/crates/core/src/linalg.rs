//! Dense complex helpers on top of nalgebra.

use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex;

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Eigen-decomposition of a Hermitian matrix: ascending eigenvalues and
/// the matching orthonormal eigenvectors as columns.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), CMatrix::zeros(0, 0));
    }
    let h = hermitize(m);
    let eig = nalgebra::SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut v: Vec<f64> = hermitize(m)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    v.sort_by(f64::total_cmp);
    v
}

/// `(m + m†) / 2`.
pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// Schatten 1-norm of a Hermitian matrix.
pub fn hermitian_trace_norm(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m).iter().map(|x| x.abs()).sum()
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    debug_assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

/// Largest entry deviation of `U†U` from the identity.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let n = u.ncols();
    max_abs_diff(&(u.adjoint() * u), &CMatrix::identity(n, n))
}

/// Mixed-radix digits of `index` for the given factor dimensions.
pub fn digits(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = alloc::vec![0; dims.len()];
    for (slot, &d) in out.iter_mut().zip(dims).rev() {
        *slot = index % d;
        index /= d;
    }
    out
}

pub fn compose(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&x, &d)| acc * d + x)
}

/// Splits composite indices into `(kept, traced)` indices for a factor subset.
pub(crate) struct FactorSplit {
    pub kept_dim: usize,
    pub traced_dim: usize,
    /// Composite index -> (kept index, traced index).
    pub parts: Vec<(usize, usize)>,
}

impl FactorSplit {
    pub fn new(dims: &[usize], keep: &[usize]) -> Self {
        let total: usize = dims.iter().product();
        let traced: Vec<usize> = (0..dims.len()).filter(|k| !keep.contains(k)).collect();
        let kept_dims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
        let traced_dims: Vec<usize> = traced.iter().map(|&k| dims[k]).collect();
        let parts = (0..total)
            .map(|i| {
                let d = digits(i, dims);
                let kd: Vec<usize> = keep.iter().map(|&k| d[k]).collect();
                let td: Vec<usize> = traced.iter().map(|&k| d[k]).collect();
                (compose(&kd, &kept_dims), compose(&td, &traced_dims))
            })
            .collect();
        Self {
            kept_dim: kept_dims.iter().product(),
            traced_dim: traced_dims.iter().product(),
            parts,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digits_round_trip() {
        let dims = [2, 3, 4];
        for i in 0..24 {
            assert_eq!(compose(&digits(i, &dims), &dims), i);
        }
        assert_eq!(digits(23, &dims), [1, 2, 3]);
    }

    #[test]
    fn eigen_of_pauli_x() {
        let x = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
        let v = hermitian_eigenvalues(&x);
        assert!((v[0] + 1.0).abs() < 1e-14 && (v[1] - 1.0).abs() < 1e-14);
        assert!((hermitian_trace_norm(&x) - 2.0).abs() < 1e-14);
    }
}
