//! Covariant channels.
//!
//! A channel is covariant when it commutes with time translation. The
//! canonical representation here is a *definite-shift* Kraus set: every
//! operator `K` carries an exact energy shift `δ` and only connects levels
//! with `E_out(f) − E_in(e) = δ`. Every covariant channel has such a form
//! (the Choi operator splits into shift sectors), and with it covariance is a
//! structural property instead of something to integrate over time.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use rand::Rng;

use crate::energy::{EnergyValue, Valuation};
use crate::error::{Error, Result};
use crate::hamiltonian::LabeledHamiltonian;
use crate::ladder::LadderSystem;
use crate::linalg::{self, CMatrix, FactorSplit, C64, ZERO};
use crate::sample;
use crate::state::DensityMatrix;
use crate::tol;

/// Anything given by Kraus operators between two Hamiltonians.
pub trait Channel {
    fn kraus_matrices(&self) -> Vec<&CMatrix>;
    fn input(&self) -> &LabeledHamiltonian;
    fn output(&self) -> &LabeledHamiltonian;

    /// Choi operator `Σ_a vec(K_a) vec(K_a)†`, with `vec` index
    /// `f · d_in + e` for the entry `⟨f|K|e⟩`.
    fn choi(&self) -> CMatrix {
        let din = self.input().dim();
        let n = self.output().dim() * din;
        let mut j = CMatrix::zeros(n, n);
        for k in self.kraus_matrices() {
            let v: Vec<C64> = (0..n).map(|x| k[(x / din, x % din)]).collect();
            for (x, vx) in v.iter().enumerate() {
                if *vx == ZERO {
                    continue;
                }
                for (y, vy) in v.iter().enumerate() {
                    j[(x, y)] += vx * vy.conj();
                }
            }
        }
        j
    }
}

fn completeness_defect(ops: &[&CMatrix], din: usize) -> f64 {
    let mut sum = CMatrix::zeros(din, din);
    for k in ops {
        sum += k.adjoint() * *k;
    }
    linalg::max_abs_diff(&sum, &CMatrix::identity(din, din))
}

fn check_shapes(ops: &[&CMatrix], din: usize, dout: usize) -> Result<()> {
    for k in ops {
        if k.ncols() != din {
            return Err(Error::DimensionMismatch {
                expected: din,
                found: k.ncols(),
            });
        }
        if k.nrows() != dout {
            return Err(Error::DimensionMismatch {
                expected: dout,
                found: k.nrows(),
            });
        }
    }
    Ok(())
}

fn apply_kraus(ops: &[&CMatrix], rho: &CMatrix) -> CMatrix {
    let dout = ops.first().map_or(0, |k| k.nrows());
    let mut out = CMatrix::zeros(dout, dout);
    for k in ops {
        out += *k * rho * k.adjoint();
    }
    out
}

/// `max_{x,y} |[J, H_out⊗I − I⊗H_in]_{xy}|` under `valuation`. The channel
/// is covariant iff this vanishes (≤ 1e-10 in practice).
pub fn verify_covariance<C: Channel + ?Sized>(channel: &C, valuation: &Valuation) -> Result<f64> {
    let ein = channel.input().numeric(valuation)?;
    let eout = channel.output().numeric(valuation)?;
    let din = ein.len();
    let j = channel.choi();
    let n = j.nrows();
    let diag: Vec<f64> = (0..n).map(|x| eout[x / din] - ein[x % din]).collect();
    let mut worst = 0.0f64;
    for x in 0..n {
        for y in 0..n {
            let gap = (diag[y] - diag[x]).abs();
            if gap > 0.0 {
                worst = worst.max(j[(x, y)].norm() * gap);
            }
        }
    }
    Ok(worst)
}

/// General channel without shift labels.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel {
    ops: Vec<CMatrix>,
    input: LabeledHamiltonian,
    output: LabeledHamiltonian,
}

impl KrausChannel {
    pub fn new(
        ops: Vec<CMatrix>,
        input: LabeledHamiltonian,
        output: LabeledHamiltonian,
    ) -> Result<Self> {
        if input.context() != output.context() {
            return Err(Error::ContextMismatch);
        }
        let refs: Vec<&CMatrix> = ops.iter().collect();
        check_shapes(&refs, input.dim(), output.dim())?;
        let defect = completeness_defect(&refs, input.dim());
        if defect > tol::COMPLETENESS {
            return Err(Error::Incomplete(defect));
        }
        Ok(Self { ops, input, output })
    }

    /// `ρ ↦ UρU†`.
    pub fn unitary(u: CMatrix, h: LabeledHamiltonian) -> Result<Self> {
        Self::new(alloc::vec![u], h.clone(), h)
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if !rho.hamiltonian().same_spectrum(&self.input) {
            return Err(Error::DimensionMismatch {
                expected: self.input.dim(),
                found: rho.dim(),
            });
        }
        let refs: Vec<&CMatrix> = self.ops.iter().collect();
        Ok(DensityMatrix::from_cp_output(apply_kraus(&refs, rho.matrix()), self.output.clone()).0)
    }

    /// Splits the Choi operator into exact shift sectors and diagonalizes each
    /// sector, giving a definite-shift Kraus set. Fails if the Choi operator
    /// has weight above 1e-10 between different sectors.
    pub fn to_covariant(&self) -> Result<CovariantChannel> {
        let din = self.input.dim();
        let j = self.choi();
        let n = j.nrows();
        let shift_of = |x: usize| self.output.energy(x / din) - self.input.energy(x % din);
        let mut sectors: BTreeMap<EnergyValue, Vec<usize>> = BTreeMap::new();
        for x in 0..n {
            sectors.entry(shift_of(x)).or_default().push(x);
        }
        let mut label = alloc::vec![0usize; n];
        for (s, (_, xs)) in sectors.iter().enumerate() {
            for &x in xs {
                label[x] = s;
            }
        }
        let mut off = 0.0f64;
        for x in 0..n {
            for y in 0..n {
                if label[x] != label[y] {
                    off = off.max(j[(x, y)].norm());
                }
            }
        }
        if off > tol::COVARIANCE {
            return Err(Error::NotCovariant(off));
        }
        let scale = linalg::max_abs(&j).max(1.0);
        let mut kraus = Vec::new();
        for (shift, xs) in sectors {
            let block = CMatrix::from_fn(xs.len(), xs.len(), |a, b| j[(xs[a], xs[b])]);
            let (vals, vecs) = linalg::hermitian_eigen(&block);
            for (col, &lambda) in vals.iter().enumerate() {
                if lambda <= 1e-13 * scale {
                    continue;
                }
                let mut k = CMatrix::zeros(self.output.dim(), din);
                for (a, &x) in xs.iter().enumerate() {
                    k[(x / din, x % din)] = vecs[(a, col)] * lambda.sqrt();
                }
                kraus.push(KrausOperator {
                    matrix: k,
                    shift: shift.clone(),
                });
            }
        }
        CovariantChannel::new(kraus, self.input.clone(), self.output.clone())
    }
}

impl Channel for KrausChannel {
    fn kraus_matrices(&self) -> Vec<&CMatrix> {
        self.ops.iter().collect()
    }
    fn input(&self) -> &LabeledHamiltonian {
        &self.input
    }
    fn output(&self) -> &LabeledHamiltonian {
        &self.output
    }
}

/// Kraus operator with a definite energy shift.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausOperator {
    pub matrix: CMatrix,
    pub shift: EnergyValue,
}

/// Channel in definite-shift Kraus form. Construction enforces the shift
/// structure (off-shift entries above 1e-10 are rejected, smaller ones are
/// zeroed) and completeness within 1e-10.
#[derive(Clone, Debug, PartialEq)]
pub struct CovariantChannel {
    kraus: Vec<KrausOperator>,
    input: LabeledHamiltonian,
    output: LabeledHamiltonian,
}

impl CovariantChannel {
    pub fn new(
        mut kraus: Vec<KrausOperator>,
        input: LabeledHamiltonian,
        output: LabeledHamiltonian,
    ) -> Result<Self> {
        if input.context() != output.context() {
            return Err(Error::ContextMismatch);
        }
        {
            let refs: Vec<&CMatrix> = kraus.iter().map(|k| &k.matrix).collect();
            check_shapes(&refs, input.dim(), output.dim())?;
        }
        for (index, k) in kraus.iter_mut().enumerate() {
            let mut worst = 0.0f64;
            for f in 0..output.dim() {
                for e in 0..input.dim() {
                    if &(output.energy(f) - input.energy(e)) != &k.shift {
                        worst = worst.max(k.matrix[(f, e)].norm());
                        k.matrix[(f, e)] = ZERO;
                    }
                }
            }
            if worst > tol::COVARIANCE {
                return Err(Error::IndefiniteShift {
                    index,
                    magnitude: worst,
                });
            }
        }
        let refs: Vec<&CMatrix> = kraus.iter().map(|k| &k.matrix).collect();
        let defect = completeness_defect(&refs, input.dim());
        if defect > tol::COMPLETENESS {
            return Err(Error::Incomplete(defect));
        }
        Ok(Self {
            kraus,
            input,
            output,
        })
    }

    pub fn identity(h: LabeledHamiltonian) -> Self {
        let d = h.dim();
        Self {
            kraus: alloc::vec![KrausOperator {
                matrix: CMatrix::identity(d, d),
                shift: EnergyValue::zero()
            }],
            input: h.clone(),
            output: h,
        }
    }

    /// Pinching: one shift-0 projector per energy eigenspace.
    pub fn dephasing(h: LabeledHamiltonian) -> Self {
        let d = h.dim();
        let kraus = h
            .blocks()
            .values()
            .map(|idx| {
                let mut p = CMatrix::zeros(d, d);
                for &i in idx {
                    p[(i, i)] = linalg::ONE;
                }
                KrausOperator {
                    matrix: p,
                    shift: EnergyValue::zero(),
                }
            })
            .collect();
        Self {
            kraus,
            input: h.clone(),
            output: h,
        }
    }

    /// `ρ ↦ Tr(ρ)·σ` for an incoherent `σ`. Kraus operators `√σ_f |f⟩⟨e|`
    /// after diagonalizing `σ` within its energy blocks.
    pub fn replacement(input: LabeledHamiltonian, sigma: &DensityMatrix) -> Result<Self> {
        let coh = sigma.max_coherence();
        if coh > tol::COVARIANCE {
            return Err(Error::CoherentAncilla(coh));
        }
        let out = sigma.hamiltonian().clone();
        let mut kraus = Vec::new();
        for (energy, vecs) in block_eigen(sigma) {
            for (lambda, v) in vecs {
                if lambda <= 0.0 {
                    continue;
                }
                for e in 0..input.dim() {
                    let mut k = CMatrix::zeros(out.dim(), input.dim());
                    for f in 0..out.dim() {
                        k[(f, e)] = v[f] * lambda.sqrt();
                    }
                    kraus.push(KrausOperator {
                        matrix: k,
                        shift: &energy - input.energy(e),
                    });
                }
            }
        }
        Self::new(kraus, input, out)
    }

    /// Energy-conserving unitary channel (shift 0).
    pub fn unitary(u: CMatrix, h: LabeledHamiltonian) -> Result<Self> {
        let defect = linalg::unitarity_defect(&u);
        if defect > tol::UNITARITY {
            return Err(Error::NotUnitary(defect));
        }
        Self::new(
            alloc::vec![KrausOperator {
                matrix: u,
                shift: EnergyValue::zero()
            }],
            h.clone(),
            h,
        )
        .map_err(|e| match e {
            Error::IndefiniteShift { magnitude, .. } => Error::NotEnergyConserving(magnitude),
            other => other,
        })
    }

    pub fn kraus(&self) -> &[KrausOperator] {
        &self.kraus
    }

    pub fn into_kraus_channel(self) -> KrausChannel {
        KrausChannel {
            ops: self.kraus.into_iter().map(|k| k.matrix).collect(),
            input: self.input,
            output: self.output,
        }
    }

    /// `Σ K ρ K†`, bound to the output Hamiltonian. The trace is renormalized;
    /// use [`Self::apply_with_deviation`] to see by how much.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.apply_with_deviation(rho).map(|(s, _)| s)
    }

    /// Output state and the trace deviation that was renormalized away.
    pub fn apply_with_deviation(&self, rho: &DensityMatrix) -> Result<(DensityMatrix, f64)> {
        if rho.dim() != self.input.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.input.dim(),
                found: rho.dim(),
            });
        }
        if !rho.hamiltonian().same_spectrum(&self.input) {
            return Err(Error::InvalidFactorization(
                "state Hamiltonian differs from channel input".into(),
            ));
        }
        let refs: Vec<&CMatrix> = self.kraus.iter().map(|k| &k.matrix).collect();
        Ok(DensityMatrix::from_cp_output(
            apply_kraus(&refs, rho.matrix()),
            self.output.clone(),
        ))
    }

    /// `Λ₁ ⊗ Λ₂`; shifts add.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let input = self.input.tensor(&other.input)?;
        let output = self.output.tensor(&other.output)?;
        let mut kraus = Vec::with_capacity(self.kraus.len() * other.kraus.len());
        for a in &self.kraus {
            for b in &other.kraus {
                kraus.push(KrausOperator {
                    matrix: linalg::kron(&a.matrix, &b.matrix),
                    shift: &a.shift + &b.shift,
                });
            }
        }
        Ok(Self {
            kraus,
            input,
            output,
        })
    }

    /// `second ∘ self`.
    pub fn then(&self, second: &Self) -> Result<Self> {
        if !self.output.same_spectrum(&second.input) {
            return Err(Error::DimensionMismatch {
                expected: second.input.dim(),
                found: self.output.dim(),
            });
        }
        let mut kraus = Vec::new();
        for b in &second.kraus {
            for a in &self.kraus {
                let m = &b.matrix * &a.matrix;
                if linalg::max_abs(&m) > 0.0 {
                    kraus.push(KrausOperator {
                        matrix: m,
                        shift: &a.shift + &b.shift,
                    });
                }
            }
        }
        Self::new(kraus, self.input.clone(), second.output.clone())
    }

    /// Same Kraus matrices with new (equal-spectrum) Hamiltonians, e.g. to
    /// restore a factor structure.
    pub fn rebind(&self, input: LabeledHamiltonian, output: LabeledHamiltonian) -> Result<Self> {
        if !input.same_spectrum(&self.input) || !output.same_spectrum(&self.output) {
            return Err(Error::InvalidFactorization(
                "rebinding changes the spectrum".into(),
            ));
        }
        Ok(Self {
            kraus: self.kraus.clone(),
            input,
            output,
        })
    }
}

impl Channel for CovariantChannel {
    fn kraus_matrices(&self) -> Vec<&CMatrix> {
        self.kraus.iter().map(|k| &k.matrix).collect()
    }
    fn input(&self) -> &LabeledHamiltonian {
        &self.input
    }
    fn output(&self) -> &LabeledHamiltonian {
        &self.output
    }
}

/// Eigen-decomposition of a state restricted to each energy block:
/// `energy -> [(λ, full-length eigenvector)]`.
fn block_eigen(state: &DensityMatrix) -> Vec<(EnergyValue, Vec<(f64, Vec<C64>)>)> {
    let d = state.dim();
    state
        .hamiltonian()
        .blocks()
        .into_iter()
        .map(|(energy, idx)| {
            let block = CMatrix::from_fn(idx.len(), idx.len(), |a, b| state.entry(idx[a], idx[b]));
            let (vals, vecs) = linalg::hermitian_eigen(&block);
            let pairs = vals
                .iter()
                .enumerate()
                .map(|(col, &lambda)| {
                    let mut v = alloc::vec![ZERO; d];
                    for (a, &i) in idx.iter().enumerate() {
                        v[i] = vecs[(a, col)];
                    }
                    (lambda.max(0.0), v)
                })
                .collect();
            (energy, pairs)
        })
        .collect()
}

/// `Λ(ρ) = Tr_A[U (ρ ⊗ η) U†]` with `U` energy-conserving on `S ⊗ A` and `η`
/// incoherent. Kraus operators are `√λ_b (⟨a| ⊗ I) U (I ⊗ |v_b⟩)` where
/// `η = Σ λ_b |v_b⟩⟨v_b|` inside energy blocks, each with shift `E_b − E_a`.
pub fn from_dilation(
    u: &CMatrix,
    system: &LabeledHamiltonian,
    eta: &DensityMatrix,
) -> Result<CovariantChannel> {
    let keep: Vec<usize> = (0..system.factors().len()).collect();
    from_dilation_keeping(u, system, eta, &keep)
}

/// As [`from_dilation`], but the output is the subset `keep` of the factors
/// of `S ⊗ A` (system factors first, then ancilla factors).
pub fn from_dilation_keeping(
    u: &CMatrix,
    system: &LabeledHamiltonian,
    eta: &DensityMatrix,
    keep: &[usize],
) -> Result<CovariantChannel> {
    let total = system.tensor(eta.hamiltonian())?;
    let n = total.dim();
    if u.nrows() != n || u.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: u.nrows(),
        });
    }
    let defect = linalg::unitarity_defect(u);
    if defect > tol::UNITARITY {
        return Err(Error::NotUnitary(defect));
    }
    let mut u = u.clone();
    let mut leak = 0.0f64;
    for x in 0..n {
        for y in 0..n {
            if total.energy(x) != total.energy(y) {
                leak = leak.max(u[(x, y)].norm());
                u[(x, y)] = ZERO;
            }
        }
    }
    if leak > tol::COVARIANCE {
        return Err(Error::NotEnergyConserving(leak));
    }
    let coh = eta.max_coherence();
    if coh > tol::COVARIANCE {
        return Err(Error::CoherentAncilla(coh));
    }

    let dims = total.factor_dims();
    crate::hamiltonian::validate_factor_subset(keep, dims.len())?;
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !keep.contains(k)).collect();
    let out_h = total.restrict(keep)?;
    let traced_h = if traced.is_empty() {
        None
    } else {
        Some(total.restrict(&traced)?)
    };
    let split = FactorSplit::new(&dims, keep);
    let mut full_of = alloc::vec![alloc::vec![0usize; split.traced_dim]; split.kept_dim];
    for (full, &(k, t)) in split.parts.iter().enumerate() {
        full_of[k][t] = full;
    }

    let din = system.dim();
    let da = eta.dim();
    let mut kraus = Vec::new();
    for (e_b, vecs) in block_eigen(eta) {
        for (lambda, v) in vecs {
            if lambda <= 1e-15 {
                continue;
            }
            let amp = lambda.sqrt();
            for t in 0..split.traced_dim {
                let mut k = CMatrix::zeros(split.kept_dim, din);
                let mut any = false;
                for o in 0..split.kept_dim {
                    let row = full_of[o][t];
                    for s in 0..din {
                        let mut acc = ZERO;
                        for (a, va) in v.iter().enumerate() {
                            if *va != ZERO {
                                acc += u[(row, s * da + a)] * va;
                            }
                        }
                        if acc != ZERO {
                            any = true;
                        }
                        k[(o, s)] = acc * amp;
                    }
                }
                if !any || linalg::max_abs(&k) <= 1e-15 {
                    continue;
                }
                let e_t = traced_h
                    .as_ref()
                    .map_or(EnergyValue::zero(), |h| h.energy(t).clone());
                kraus.push(KrausOperator {
                    matrix: k,
                    shift: &e_b - &e_t,
                });
            }
        }
    }
    CovariantChannel::new(kraus, system.clone(), out_h)
}

/// Haar-random unitary on each exact-energy block of `h`, identity elsewhere.
pub fn block_haar_unitary<R: Rng + ?Sized>(h: &LabeledHamiltonian, rng: &mut R) -> CMatrix {
    let n = h.dim();
    let mut u = CMatrix::zeros(n, n);
    for idx in h.blocks().values() {
        let b = sample::haar_unitary(idx.len(), rng);
        for (a, &i) in idx.iter().enumerate() {
            for (c, &j) in idx.iter().enumerate() {
                u[(i, j)] = b[(a, c)];
            }
        }
    }
    u
}

/// Random covariant channel from `in_h` to `out_h`, deterministic per seed.
///
/// When input and output coincide the dilation acts on `S ⊗ A`; otherwise on
/// `S ⊗ S′ ⊗ A`, keeping `S′`. `U` is Haar-random on every total-energy block
/// and the ancilla state is a random diagonal state.
pub fn random_covariant(
    in_h: &LabeledHamiltonian,
    out_h: &LabeledHamiltonian,
    ancilla: &LabeledHamiltonian,
    seed: u64,
) -> Result<CovariantChannel> {
    random_covariant_with(in_h, out_h, ancilla, &mut sample::rng(seed))
}

pub fn random_covariant_with<R: Rng + ?Sized>(
    in_h: &LabeledHamiltonian,
    out_h: &LabeledHamiltonian,
    ancilla: &LabeledHamiltonian,
    rng: &mut R,
) -> Result<CovariantChannel> {
    if in_h == out_h {
        let eta = sample::incoherent_state(ancilla, rng)?;
        let total = in_h.tensor(ancilla)?;
        let u = block_haar_unitary(&total, rng);
        from_dilation(&u, in_h, &eta)
    } else {
        let eta = sample::incoherent_state(out_h, rng)?
            .tensor(&sample::incoherent_state(ancilla, rng)?)?;
        let total = in_h.tensor(eta.hamiltonian())?;
        let u = block_haar_unitary(&total, rng);
        let nin = in_h.factors().len();
        let keep: Vec<usize> = (nin..nin + out_h.factors().len()).collect();
        from_dilation_keeping(&u, in_h, &eta, &keep)
    }
}

/// Re-labels the shifts of a channel on a ladder product for new ladder
/// spacings. The Kraus matrices are untouched; each shift is re-synthesized
/// from the lattice-coordinate change `Σ c_j Δ′_j`. Requires the current
/// spacings to be rational-linearly independent (the new ones need not be,
/// so complete degeneration is allowed).
pub fn retune(
    channel: &CovariantChannel,
    system: &LadderSystem,
    new_intervals: &[EnergyValue],
) -> Result<(CovariantChannel, LadderSystem)> {
    let h = system.hamiltonian();
    if !channel.input.same_spectrum(h) || !channel.output.same_spectrum(h) {
        return Err(Error::InvalidFactorization(
            "channel is not on the given ladder system".into(),
        ));
    }
    if !system.has_independent_intervals() {
        return Err(Error::DependentIntervals);
    }
    let retuned = system.with_intervals(new_intervals)?;
    let coords: Vec<Vec<i64>> = (0..h.dim()).map(|i| system.coordinates(i)).collect();
    let mut kraus = Vec::with_capacity(channel.kraus.len());
    for (index, k) in channel.kraus.iter().enumerate() {
        let mut delta: Option<Vec<i64>> = None;
        for f in 0..h.dim() {
            for e in 0..h.dim() {
                if k.matrix[(f, e)] == ZERO {
                    continue;
                }
                let c: Vec<i64> = coords[f]
                    .iter()
                    .zip(&coords[e])
                    .map(|(a, b)| a - b)
                    .collect();
                match &delta {
                    None => delta = Some(c),
                    Some(d) if *d != c => {
                        return Err(Error::IndefiniteShift {
                            index,
                            magnitude: k.matrix[(f, e)].norm(),
                        })
                    }
                    _ => {}
                }
            }
        }
        let shift = crate::lattice::synthesize(&delta.unwrap_or_default(), new_intervals);
        kraus.push(KrausOperator {
            matrix: k.matrix.clone(),
            shift,
        });
    }
    let h2 = retuned.hamiltonian().clone();
    Ok((CovariantChannel::new(kraus, h2.clone(), h2)?, retuned))
}

/// The Stinespring reference value `Tr_A[U(ρ⊗η)U†]`, computed directly.
pub fn dilation_output(
    u: &CMatrix,
    rho: &DensityMatrix,
    eta: &DensityMatrix,
) -> Result<DensityMatrix> {
    let joint = rho.tensor(eta)?;
    let evolved = u * joint.matrix() * u.adjoint();
    let keep: Vec<usize> = (0..rho.hamiltonian().factors().len()).collect();
    DensityMatrix::from_parts_unchecked(evolved, joint.hamiltonian().clone()).partial_trace(&keep)
}
