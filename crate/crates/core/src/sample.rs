//! Seeded random states and unitaries.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::error::Result;
use crate::hamiltonian::LabeledHamiltonian;
use crate::linalg::{c64, CMatrix, C64};
use crate::state::DensityMatrix;

/// Deterministic generator used throughout; one per sweep, never shared.
pub type SeededRng = rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    use rand::SeedableRng;
    SeededRng::seed_from_u64(seed)
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    c64(re, im) * (0.5f64).sqrt()
}

/// Ginibre matrix with i.i.d. standard complex normal entries.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// Haar-random unitary: QR of a Ginibre matrix with the phases of `R`'s
/// diagonal moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    if n == 0 {
        return CMatrix::zeros(0, 0);
    }
    let qr = ginibre(n, n, rng).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            c64(1.0, 0.0)
        };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Uniform point on the probability simplex.
pub fn simplex<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

/// Random pure state with Gaussian amplitudes.
pub fn pure_state<R: Rng + ?Sized>(h: &LabeledHamiltonian, rng: &mut R) -> Result<DensityMatrix> {
    let amps: Vec<C64> = (0..h.dim()).map(|_| complex_normal(rng)).collect();
    DensityMatrix::pure(&amps, h.clone())
}

/// Random mixed state `G G† / Tr` with `G` a `dim × rank` Ginibre matrix.
pub fn mixed_state<R: Rng + ?Sized>(
    h: &LabeledHamiltonian,
    rank: usize,
    rng: &mut R,
) -> Result<DensityMatrix> {
    let g = ginibre(h.dim(), rank.max(1), rng);
    let m = &g * g.adjoint();
    let tr = m.trace();
    DensityMatrix::projected(m / tr, h.clone())
}

/// Random diagonal (hence incoherent) state.
pub fn incoherent_state<R: Rng + ?Sized>(
    h: &LabeledHamiltonian,
    rng: &mut R,
) -> Result<DensityMatrix> {
    DensityMatrix::diagonal(&simplex(h.dim(), rng), h.clone())
}

/// Mixture of a random diagonal state and a random pure state supported on
/// `support` only; coherence is confined to differences within `support`.
pub fn sparse_coherent_state<R: Rng + ?Sized>(
    h: &LabeledHamiltonian,
    support: &[usize],
    rng: &mut R,
) -> Result<DensityMatrix> {
    let d = h.dim();
    let mut amps = alloc::vec![c64(0.0, 0.0); d];
    for &i in support {
        amps[i] = complex_normal(rng);
    }
    let pure = DensityMatrix::pure(&amps, h.clone())?;
    let diag = incoherent_state(h, rng)?;
    let w: f64 = rng.gen_range(0.2..0.9);
    let m = pure.matrix() * c64(w, 0.0) + diag.matrix() * c64(1.0 - w, 0.0);
    DensityMatrix::projected(m, h.clone())
}
