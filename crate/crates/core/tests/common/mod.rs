#![allow(dead_code)]

use coherence_core::ladder::{LadderSpec, LadderSystem, LevelRange};
use coherence_core::linalg::{c64, CMatrix, C64};
use coherence_core::sample::{self, SeededRng};
use coherence_core::{DensityMatrix, EnergyValue, LabeledHamiltonian, SymbolContext, Valuation};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn ctx() -> SymbolContext {
    SymbolContext::new(["1", "sqrt2", "sqrt3"]).unwrap()
}

pub fn val() -> Valuation {
    Valuation::new()
        .with("1", 1.0)
        .with("sqrt2", 2f64.sqrt())
        .with("sqrt3", 3f64.sqrt())
}

/// `a + b√2 + c√3`.
pub fn e(a: i64, b: i64, c: i64) -> EnergyValue {
    &(&EnergyValue::integer(0, a) + &EnergyValue::integer(1, b)) + &EnergyValue::integer(2, c)
}

pub fn ham(levels: &[EnergyValue]) -> LabeledHamiltonian {
    LabeledHamiltonian::new(ctx(), levels.to_vec()).unwrap()
}

pub fn qubit() -> LabeledHamiltonian {
    ham(&[e(0, 0, 0), e(1, 0, 0)])
}

pub fn plus(h: LabeledHamiltonian) -> DensityMatrix {
    DensityMatrix::pure(&[c64(1.0, 0.0), c64(1.0, 0.0)], h).unwrap()
}

/// Random Hamiltonian drawn from a small pool so that degeneracies and
/// commensurate gaps both occur.
pub fn random_hamiltonian(dim: usize, rng: &mut SeededRng) -> LabeledHamiltonian {
    let pool = [
        e(0, 0, 0),
        e(1, 0, 0),
        e(2, 0, 0),
        e(0, 1, 0),
        e(1, 1, 0),
        e(0, 0, 1),
    ];
    ham(&(0..dim)
        .map(|_| pool.choose(rng).unwrap().clone())
        .collect::<Vec<_>>())
}

/// Random state with coherence on a random subset of levels.
pub fn random_state(h: &LabeledHamiltonian, rng: &mut SeededRng) -> DensityMatrix {
    match rng.gen_range(0..3) {
        0 => sample::mixed_state(h, h.dim(), rng).unwrap(),
        1 => sample::pure_state(h, rng).unwrap(),
        _ => {
            let mut idx: Vec<usize> = (0..h.dim()).collect();
            idx.shuffle(rng);
            let k = rng.gen_range(1..=h.dim());
            sample::sparse_coherent_state(h, &idx[..k], rng).unwrap()
        }
    }
}

pub fn ladders(intervals: &[EnergyValue], range: (i64, i64)) -> LadderSystem {
    let r = LevelRange::new(range.0, range.1).unwrap();
    LadderSystem::new(
        ctx(),
        intervals
            .iter()
            .map(|i| LadderSpec::new(i.clone(), r, 1).unwrap())
            .collect(),
    )
    .unwrap()
}

/// Partial trace by explicit index contraction over row-major factors.
pub fn naive_partial_trace(m: &CMatrix, dims: &[usize], keep: &[usize]) -> CMatrix {
    let total: usize = dims.iter().product();
    let kept: usize = keep.iter().map(|&k| dims[k]).product();
    let split = |mut i: usize| {
        let mut d = vec![0; dims.len()];
        for f in (0..dims.len()).rev() {
            d[f] = i % dims[f];
            i /= dims[f];
        }
        d
    };
    let kept_index = |d: &[usize]| keep.iter().fold(0, |acc, &k| acc * dims[k] + d[k]);
    let traced_part = |d: &[usize]| -> Vec<usize> {
        (0..dims.len())
            .filter(|f| !keep.contains(f))
            .map(|f| d[f])
            .collect()
    };
    let mut out = CMatrix::zeros(kept, kept);
    for r in 0..total {
        let dr = split(r);
        for c in 0..total {
            let dc = split(c);
            if traced_part(&dr) == traced_part(&dc) {
                out[(kept_index(&dr), kept_index(&dc))] += m[(r, c)];
            }
        }
    }
    out
}

pub fn max_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn cplx(re: f64, im: f64) -> C64 {
    c64(re, im)
}
