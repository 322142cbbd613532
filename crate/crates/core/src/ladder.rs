//! Ladder systems `L(Δ)` and the embedding of arbitrary Hamiltonians into
//! products of ladders with rational-linearly independent spacings.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use num_traits::ToPrimitive;

use crate::energy::{EnergyValue, SymbolContext};
use crate::error::{Error, Result};
use crate::hamiltonian::{Factor, LabeledHamiltonian};
use crate::lattice;
use crate::linalg::{self, CMatrix};
use crate::state::DensityMatrix;

/// Inclusive range of ladder levels `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LevelRange {
    pub min: i64,
    pub max: i64,
}

impl LevelRange {
    pub fn new(min: i64, max: i64) -> Result<Self> {
        if min > max {
            return Err(Error::OutOfRange(format!("level range [{}, {}]", min, max)));
        }
        Ok(Self { min, max })
    }

    pub fn contains(&self, n: i64) -> bool {
        (self.min..=self.max).contains(&n)
    }

    pub fn len(&self) -> usize {
        (self.max - self.min + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl Default for LevelRange {
    /// `[−8, 8]`.
    fn default() -> Self {
        Self { min: -8, max: 8 }
    }
}

/// Truncated ladder: levels `n ∈ range` with energy `n·interval`, each
/// repeated `degeneracy` times. The basis index of `|n, a⟩` is
/// `(n − min)·degeneracy + a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LadderSpec {
    pub interval: EnergyValue,
    pub range: LevelRange,
    pub degeneracy: usize,
}

impl LadderSpec {
    pub fn new(interval: EnergyValue, range: LevelRange, degeneracy: usize) -> Result<Self> {
        if degeneracy == 0 {
            return Err(Error::OutOfRange(
                "ladder degeneracy must be positive".into(),
            ));
        }
        Ok(Self {
            interval,
            range,
            degeneracy,
        })
    }

    pub fn dim(&self) -> usize {
        self.range.len() * self.degeneracy
    }

    /// `(n, a)` of a basis index.
    pub fn level(&self, index: usize) -> (i64, usize) {
        (
            self.range.min + (index / self.degeneracy) as i64,
            index % self.degeneracy,
        )
    }

    pub fn index(&self, n: i64, a: usize) -> usize {
        (n - self.range.min) as usize * self.degeneracy + a
    }

    pub fn factor(&self) -> Factor {
        Factor::new(
            (0..self.dim())
                .map(|i| self.interval.scale_int(self.level(i).0))
                .collect(),
        )
    }
}

/// Product of ladders with its composite Hamiltonian.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LadderSystem {
    ladders: Vec<LadderSpec>,
    hamiltonian: LabeledHamiltonian,
}

impl LadderSystem {
    pub fn new(context: SymbolContext, ladders: Vec<LadderSpec>) -> Result<Self> {
        let hamiltonian = LabeledHamiltonian::from_factors(
            context,
            ladders.iter().map(LadderSpec::factor).collect(),
        )?;
        Ok(Self {
            ladders,
            hamiltonian,
        })
    }

    pub fn ladders(&self) -> &[LadderSpec] {
        &self.ladders
    }

    pub fn hamiltonian(&self) -> &LabeledHamiltonian {
        &self.hamiltonian
    }

    pub fn intervals(&self) -> Vec<EnergyValue> {
        self.ladders.iter().map(|l| l.interval.clone()).collect()
    }

    /// Ladder levels `n_j` of a composite basis index.
    pub fn coordinates(&self, index: usize) -> Vec<i64> {
        let dims: Vec<usize> = self.ladders.iter().map(LadderSpec::dim).collect();
        linalg::digits(index, &dims)
            .into_iter()
            .zip(&self.ladders)
            .map(|(d, l)| l.level(d).0)
            .collect()
    }

    /// Same levels with new spacings.
    pub fn with_intervals(&self, intervals: &[EnergyValue]) -> Result<Self> {
        if intervals.len() != self.ladders.len() {
            return Err(Error::DimensionMismatch {
                expected: self.ladders.len(),
                found: intervals.len(),
            });
        }
        let ladders = self
            .ladders
            .iter()
            .zip(intervals)
            .map(|(l, i)| LadderSpec {
                interval: i.clone(),
                ..l.clone()
            })
            .collect();
        Self::new(self.hamiltonian.context().clone(), ladders)
    }

    /// Whether the nonzero spacings are rational-linearly independent and no
    /// spacing is zero.
    pub fn has_independent_intervals(&self) -> bool {
        let iv = self.intervals();
        iv.iter().all(|i| !i.is_zero()) && lattice::q_rank(&iv) == iv.len()
    }
}

/// Result of embedding a Hamiltonian into ladders.
#[derive(Clone, Debug)]
pub struct LadderEmbedding {
    pub system: LadderSystem,
    pub basis: Vec<EnergyValue>,
    /// Lattice coordinates `n_j` of each original basis state.
    pub coordinates: Vec<Vec<i64>>,
    /// Degeneracy label `α` of each original basis state.
    pub degeneracy_labels: Vec<usize>,
    /// Original basis index -> composite ladder index (injective).
    pub index_map: Vec<usize>,
}

impl LadderEmbedding {
    /// Pads a state into the ladder space along the index map.
    pub fn embed_state(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.index_map.len() {
            return Err(Error::DimensionMismatch {
                expected: self.index_map.len(),
                found: rho.dim(),
            });
        }
        let d = self.system.hamiltonian().dim();
        let mut m = CMatrix::zeros(d, d);
        for (i, &a) in self.index_map.iter().enumerate() {
            for (j, &b) in self.index_map.iter().enumerate() {
                m[(a, b)] = rho.entry(i, j);
            }
        }
        Ok(DensityMatrix::from_parts_unchecked(
            m,
            self.system.hamiltonian().clone(),
        ))
    }
}

/// Maps each eigenstate `|E, α⟩` of `h` to `⊗_j |n_j⟩` with `E = Σ n_j Δ_j`.
///
/// The ladders are cut to the levels actually used; `truncation` bounds the
/// allowed coordinates and any coordinate outside it is an error. Degenerate
/// energies are distinguished by a degeneracy label carried on the first
/// ladder.
pub fn embed_into_ladders(
    h: &LabeledHamiltonian,
    basis: &[EnergyValue],
    truncation: LevelRange,
) -> Result<LadderEmbedding> {
    if lattice::q_rank(basis) != basis.len() || basis.iter().any(EnergyValue::is_zero) {
        return Err(Error::DependentIntervals);
    }
    let ctx = h.context();
    let mut coordinates = Vec::with_capacity(h.dim());
    for e in h.energies() {
        if !lattice::z_span_member(e, basis) {
            return Err(Error::NotInLattice(format!("{}", e.display(ctx))));
        }
        let c = lattice::integer_coordinates(e, basis)
            .ok_or_else(|| Error::NotInLattice(format!("{}", e.display(ctx))))?;
        let c: Vec<i64> = c.iter().map(|x| x.to_i64().unwrap_or(i64::MAX)).collect();
        for &n in &c {
            if !truncation.contains(n) {
                return Err(Error::TruncationOverflow {
                    coordinate: n,
                    min: truncation.min,
                    max: truncation.max,
                });
            }
        }
        coordinates.push(c);
    }

    let mut seen: BTreeMap<Vec<i64>, usize> = BTreeMap::new();
    let degeneracy_labels: Vec<usize> = coordinates
        .iter()
        .map(|c| {
            let slot = seen.entry(c.clone()).or_insert(0);
            *slot += 1;
            *slot - 1
        })
        .collect();
    let degeneracy = seen.values().copied().max().unwrap_or(1).max(1);

    let k = basis.len();
    let ladders: Vec<LadderSpec> = (0..k)
        .map(|j| {
            let lo = coordinates.iter().map(|c| c[j]).min().unwrap_or(0);
            let hi = coordinates.iter().map(|c| c[j]).max().unwrap_or(0);
            LadderSpec {
                interval: basis[j].clone(),
                range: LevelRange { min: lo, max: hi },
                degeneracy: if j == 0 { degeneracy } else { 1 },
            }
        })
        .collect();
    if ladders.is_empty() {
        // Every energy is zero: a single fully degenerate ladder L(0).
        let ladder = LadderSpec {
            interval: EnergyValue::zero(),
            range: LevelRange { min: 0, max: 0 },
            degeneracy,
        };
        let system = LadderSystem::new(ctx.clone(), alloc::vec![ladder])?;
        let index_map = degeneracy_labels.clone();
        return Ok(LadderEmbedding {
            system,
            basis: Vec::new(),
            coordinates,
            degeneracy_labels,
            index_map,
        });
    }
    let system = LadderSystem::new(ctx.clone(), ladders)?;
    let dims: Vec<usize> = system.ladders.iter().map(LadderSpec::dim).collect();
    let index_map = coordinates
        .iter()
        .zip(&degeneracy_labels)
        .map(|(c, &a)| {
            let digits: Vec<usize> = system
                .ladders
                .iter()
                .enumerate()
                .map(|(j, l)| l.index(c[j], if j == 0 { a } else { 0 }))
                .collect();
            linalg::compose(&digits, &dims)
        })
        .collect();
    Ok(LadderEmbedding {
        system,
        basis: basis.to_vec(),
        coordinates,
        degeneracy_labels,
        index_map,
    })
}

/// Complete degeneration: the selected ladders get spacing zero. Density
/// matrices on the system are unaffected; only which entries count as
/// coherent changes.
pub fn degenerate_ladder(system: &LadderSystem, which: &[usize]) -> Result<LadderSystem> {
    crate::hamiltonian::validate_factor_subset(which, system.ladders.len())?;
    let intervals: Vec<EnergyValue> = system
        .ladders
        .iter()
        .enumerate()
        .map(|(j, l)| {
            if which.contains(&j) {
                EnergyValue::zero()
            } else {
                l.interval.clone()
            }
        })
        .collect();
    system.with_intervals(&intervals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c64;

    fn ctx() -> SymbolContext {
        SymbolContext::new(["1", "sqrt2"]).unwrap()
    }

    fn one() -> EnergyValue {
        EnergyValue::integer(0, 1)
    }

    fn r2() -> EnergyValue {
        EnergyValue::integer(1, 1)
    }

    #[test]
    fn qubit_embeds_into_one_ladder() {
        let h = LabeledHamiltonian::new(ctx(), alloc::vec![EnergyValue::zero(), r2()]).unwrap();
        let e = embed_into_ladders(&h, &[r2()], LevelRange::default()).unwrap();
        assert_eq!(e.system.ladders().len(), 1);
        assert_eq!(e.system.ladders()[0].range, LevelRange { min: 0, max: 1 });
        assert_eq!(e.coordinates, [[0], [1]]);
        assert_eq!(e.index_map, [0, 1]);
    }

    #[test]
    fn qutrit_embeds_into_two_ladders() {
        let h =
            LabeledHamiltonian::new(ctx(), alloc::vec![EnergyValue::zero(), one(), r2()]).unwrap();
        let e = embed_into_ladders(&h, &[one(), r2()], LevelRange::default()).unwrap();
        assert_eq!(e.coordinates, [[0, 0], [1, 0], [0, 1]]);
        for (i, &m) in e.index_map.iter().enumerate() {
            assert_eq!(e.system.hamiltonian().energy(m), h.energy(i));
        }
    }

    #[test]
    fn four_level_lattice_points() {
        let h = LabeledHamiltonian::new(
            ctx(),
            alloc::vec![EnergyValue::zero(), one(), r2(), &one() + &r2()],
        )
        .unwrap();
        let e = embed_into_ladders(&h, &[one(), r2()], LevelRange::default()).unwrap();
        assert_eq!(e.coordinates, [[0, 0], [1, 0], [0, 1], [1, 1]]);
        assert_eq!(e.index_map, [0, 2, 1, 3]);
    }

    #[test]
    fn degeneracy_and_errors() {
        let h =
            LabeledHamiltonian::new(ctx(), alloc::vec![EnergyValue::zero(), one(), one()]).unwrap();
        let e = embed_into_ladders(&h, &[one()], LevelRange::default()).unwrap();
        assert_eq!(e.degeneracy_labels, [0, 0, 1]);
        assert_eq!(e.system.ladders()[0].degeneracy, 2);
        let mut sorted = e.index_map.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 3);

        let half = EnergyValue::ratio(0, 1, 2);
        let h = LabeledHamiltonian::new(ctx(), alloc::vec![EnergyValue::zero(), half]).unwrap();
        assert!(matches!(
            embed_into_ladders(&h, &[one()], LevelRange::default()),
            Err(Error::NotInLattice(_))
        ));

        let h = LabeledHamiltonian::new(ctx(), alloc::vec![EnergyValue::integer(0, 9)]).unwrap();
        assert!(matches!(
            embed_into_ladders(&h, &[one()], LevelRange::default()),
            Err(Error::TruncationOverflow { coordinate: 9, .. })
        ));
    }

    #[test]
    fn degeneration_removes_coherence() {
        let h = LabeledHamiltonian::new(
            ctx(),
            alloc::vec![EnergyValue::zero(), one(), r2(), &one() + &r2()],
        )
        .unwrap();
        let e = embed_into_ladders(&h, &[one(), r2()], LevelRange::default()).unwrap();
        // |0⟩_1 ⊗ |+⟩_√2: coherent only across the √2 ladder.
        let amps = [c64(1.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0)];
        let rho = DensityMatrix::pure(&amps, e.system.hamiltonian().clone()).unwrap();
        assert!(rho.max_coherence() > 0.4);
        let flat = degenerate_ladder(&e.system, &[1]).unwrap();
        let after = rho.rebind(flat.hamiltonian().clone()).unwrap();
        assert_eq!(after.dephase(), after);
        let all = degenerate_ladder(&e.system, &[0, 1]).unwrap();
        assert!(all
            .hamiltonian()
            .energies()
            .iter()
            .all(EnergyValue::is_zero));
        assert_eq!(degenerate_ladder(&e.system, &[]).unwrap(), e.system);
    }
}
