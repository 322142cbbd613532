//! JSON file formats for states, channels, valuations and catalyst bundles.
//!
//! Rationals are `[num, den]` pairs. Integers that fit in `i64` are written
//! as JSON numbers and larger ones as decimal strings; both are accepted on
//! input. Complex entries are `[re, im]` written with the shortest decimal
//! that round-trips the `f64` exactly. Matrices are flat and row-major.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use coherence_core::hamiltonian::Factor;
use coherence_core::linalg::{c64, CMatrix};
use coherence_core::{
    CovariantChannel, DensityMatrix, EnergyValue, KrausOperator, LabeledHamiltonian, SymbolContext,
    Valuation,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::LabError;
use crate::output::write_atomic;

/// Exact rational serialized as `[num, den]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ratio(pub BigRational);

fn write_int<S: SerializeSeq>(seq: &mut S, n: &BigInt) -> Result<(), S::Error> {
    match n.to_i64() {
        Some(v) => seq.serialize_element(&v),
        None => seq.serialize_element(&n.to_string()),
    }
}

impl Serialize for Ratio {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(2))?;
        write_int(&mut seq, self.0.numer())?;
        write_int(&mut seq, self.0.denom())?;
        seq.end()
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum IntRepr {
    Signed(i64),
    Unsigned(u64),
    Text(String),
}

impl IntRepr {
    fn into_bigint<E: de::Error>(self) -> Result<BigInt, E> {
        match self {
            IntRepr::Signed(v) => Ok(v.into()),
            IntRepr::Unsigned(v) => Ok(v.into()),
            IntRepr::Text(t) => t
                .trim()
                .parse()
                .map_err(|_| E::custom(format!("not an integer: {t:?}"))),
        }
    }
}

impl<'de> Deserialize<'de> for Ratio {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let (n, m): (IntRepr, IntRepr) = Deserialize::deserialize(d)?;
        let den = m.into_bigint::<D::Error>()?;
        if den.is_zero() {
            return Err(de::Error::custom("zero denominator"));
        }
        Ok(Ratio(BigRational::new(n.into_bigint()?, den)))
    }
}

/// Sparse energy: symbol name to coefficient.
pub type EnergyJson = BTreeMap<String, Ratio>;

/// Dense energy: one coefficient per symbol, in context order.
pub type LevelJson = Vec<Ratio>;

pub fn energy_to_json(e: &EnergyValue, ctx: &SymbolContext) -> EnergyJson {
    e.terms()
        .map(|(s, c)| (ctx.name(s).unwrap_or("?").to_string(), Ratio(c.clone())))
        .collect()
}

pub fn energy_from_json(j: &EnergyJson, ctx: &SymbolContext) -> Result<EnergyValue, LabError> {
    let mut terms = Vec::with_capacity(j.len());
    for (name, r) in j {
        let i = ctx
            .index_of(name)
            .ok_or_else(|| LabError::Format(format!("unknown symbol {name:?}")))?;
        terms.push((i, r.0.clone()));
    }
    Ok(EnergyValue::from_coeffs(terms))
}

fn level_to_json(e: &EnergyValue, ctx: &SymbolContext) -> LevelJson {
    e.to_dense(ctx.len()).into_iter().map(Ratio).collect()
}

fn level_from_json(l: &LevelJson, ctx: &SymbolContext) -> Result<EnergyValue, LabError> {
    if l.len() != ctx.len() {
        return Err(LabError::Format(format!(
            "energy has {} coefficients for {} symbols",
            l.len(),
            ctx.len()
        )));
    }
    Ok(EnergyValue::from_dense(
        &l.iter().map(|r| r.0.clone()).collect::<Vec<_>>(),
    ))
}

fn levels_from_json(ls: &[LevelJson], ctx: &SymbolContext) -> Result<Vec<EnergyValue>, LabError> {
    ls.iter().map(|l| level_from_json(l, ctx)).collect()
}

fn matrix_to_json(m: &CMatrix) -> Vec<[f64; 2]> {
    (0..m.nrows())
        .flat_map(|i| (0..m.ncols()).map(move |j| (i, j)))
        .map(|(i, j)| [m[(i, j)].re, m[(i, j)].im])
        .collect()
}

fn matrix_from_json(entries: &[[f64; 2]], rows: usize, cols: usize) -> Result<CMatrix, LabError> {
    if entries.len() != rows * cols {
        return Err(LabError::Format(format!(
            "matrix has {} entries, expected {rows}x{cols}",
            entries.len()
        )));
    }
    Ok(CMatrix::from_row_iterator(
        rows,
        cols,
        entries.iter().map(|&[re, im]| c64(re, im)),
    ))
}

/// Per-factor level lists; absent for a single-factor Hamiltonian.
pub type FactorsJson = Vec<Vec<LevelJson>>;

fn factors_to_json(h: &LabeledHamiltonian) -> Option<FactorsJson> {
    let ctx = h.context();
    (h.factors().len() > 1).then(|| {
        h.factors()
            .iter()
            .map(|f| f.energies.iter().map(|e| level_to_json(e, ctx)).collect())
            .collect()
    })
}

fn hamiltonian_from_json(
    ctx: &SymbolContext,
    energies: &[LevelJson],
    factors: Option<&FactorsJson>,
) -> Result<LabeledHamiltonian, LabError> {
    let flat = levels_from_json(energies, ctx)?;
    let Some(factors) = factors else {
        return Ok(LabeledHamiltonian::new(ctx.clone(), flat)?);
    };
    let factors = factors
        .iter()
        .map(|f| levels_from_json(f, ctx).map(Factor::new))
        .collect::<Result<Vec<_>, _>>()?;
    let h = LabeledHamiltonian::from_factors(ctx.clone(), factors)?;
    if h.energies() != flat.as_slice() {
        return Err(LabError::Format(
            "factor energies do not sum to the listed energies".into(),
        ));
    }
    Ok(h)
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct StateFile {
    pub dim: usize,
    pub symbols: Vec<String>,
    pub energies: Vec<LevelJson>,
    pub matrix: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factors: Option<FactorsJson>,
}

impl StateFile {
    pub fn from_state(rho: &DensityMatrix) -> Self {
        let h = rho.hamiltonian();
        let ctx = h.context();
        Self {
            dim: rho.dim(),
            symbols: ctx.names().to_vec(),
            energies: h.energies().iter().map(|e| level_to_json(e, ctx)).collect(),
            matrix: matrix_to_json(rho.matrix()),
            factors: factors_to_json(h),
        }
    }

    pub fn to_state(&self) -> Result<DensityMatrix, LabError> {
        let ctx = SymbolContext::new(self.symbols.iter().map(String::as_str))?;
        if self.energies.len() != self.dim {
            return Err(LabError::Format(format!(
                "{} energies for dim {}",
                self.energies.len(),
                self.dim
            )));
        }
        let h = hamiltonian_from_json(&ctx, &self.energies, self.factors.as_ref())?;
        let m = matrix_from_json(&self.matrix, self.dim, self.dim)?;
        Ok(DensityMatrix::new(m, h)?)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct KrausJson {
    pub shift: EnergyJson,
    pub matrix: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ChannelFile {
    pub symbols: Vec<String>,
    pub in_energies: Vec<LevelJson>,
    pub out_energies: Vec<LevelJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub in_factors: Option<FactorsJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_factors: Option<FactorsJson>,
    pub kraus: Vec<KrausJson>,
}

impl ChannelFile {
    pub fn from_channel(ch: &CovariantChannel) -> Self {
        use coherence_core::channel::Channel;
        let (hi, ho) = (ch.input(), ch.output());
        let ctx = hi.context();
        Self {
            symbols: ctx.names().to_vec(),
            in_energies: hi
                .energies()
                .iter()
                .map(|e| level_to_json(e, ctx))
                .collect(),
            out_energies: ho
                .energies()
                .iter()
                .map(|e| level_to_json(e, ctx))
                .collect(),
            in_factors: factors_to_json(hi),
            out_factors: factors_to_json(ho),
            kraus: ch
                .kraus()
                .iter()
                .map(|k| KrausJson {
                    shift: energy_to_json(&k.shift, ctx),
                    matrix: matrix_to_json(&k.matrix),
                })
                .collect(),
        }
    }

    pub fn to_channel(&self) -> Result<CovariantChannel, LabError> {
        let ctx = SymbolContext::new(self.symbols.iter().map(String::as_str))?;
        let hi = hamiltonian_from_json(&ctx, &self.in_energies, self.in_factors.as_ref())?;
        let ho = hamiltonian_from_json(&ctx, &self.out_energies, self.out_factors.as_ref())?;
        let kraus = self
            .kraus
            .iter()
            .map(|k| {
                Ok(KrausOperator {
                    matrix: matrix_from_json(&k.matrix, ho.dim(), hi.dim())?,
                    shift: energy_from_json(&k.shift, &ctx)?,
                })
            })
            .collect::<Result<Vec<_>, LabError>>()?;
        Ok(CovariantChannel::new(kraus, hi, ho)?)
    }
}

/// Symbol name to numeric value.
pub type ValuationFile = BTreeMap<String, f64>;

pub fn valuation_from_file(v: &ValuationFile) -> Valuation {
    v.iter()
        .fold(Valuation::new(), |acc, (k, &x)| acc.with(k.clone(), x))
}

/// Catalyst, its channel and the verification outcome.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct BundleFile {
    pub n: usize,
    pub register_dim: usize,
    pub catalyst: StateFile,
    pub channel: ChannelFile,
    pub system_target: StateFile,
    pub catalyst_deviation: f64,
    pub system_deviation: f64,
    pub covariance_norm: f64,
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, LabError> {
    let text = fs::read_to_string(path).map_err(|e| LabError::Io(path.display().to_string(), e))?;
    serde_json::from_str(&text).map_err(|e| LabError::Format(format!("{}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), LabError> {
    let mut text =
        serde_json::to_string_pretty(value).map_err(|e| LabError::Format(e.to_string()))?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

pub fn read_state(path: &Path) -> Result<DensityMatrix, LabError> {
    read_json::<StateFile>(path)?.to_state()
}

pub fn read_channel(path: &Path) -> Result<CovariantChannel, LabError> {
    read_json::<ChannelFile>(path)?.to_channel()
}

/// `p/q` or `p` for a rational.
pub fn fraction(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qubit() -> LabeledHamiltonian {
        let ctx = SymbolContext::new(["1", "w"]).unwrap();
        LabeledHamiltonian::new(ctx, vec![EnergyValue::zero(), EnergyValue::ratio(1, -3, 7)])
            .unwrap()
    }

    #[test]
    fn ratio_accepts_numbers_and_strings() {
        let r: Ratio = serde_json::from_str(r#"["-123456789012345678901234567890", 4]"#).unwrap();
        assert_eq!(r.0.denom(), &BigInt::from(2));
        let back = serde_json::to_string(&r).unwrap();
        assert_eq!(back, r#"["-61728394506172839450617283945",2]"#);
        assert!(serde_json::from_str::<Ratio>("[1, 0]").is_err());
    }

    #[test]
    fn state_round_trip_is_bit_stable() {
        let rho = DensityMatrix::pure(&[c64(0.3, 0.1), c64(1.0 / 3.0, -0.7)], qubit()).unwrap();
        let json = serde_json::to_string(&StateFile::from_state(&rho)).unwrap();
        let back = serde_json::from_str::<StateFile>(&json)
            .unwrap()
            .to_state()
            .unwrap();
        assert_eq!(back, rho);
    }

    #[test]
    fn factored_state_keeps_factors() {
        let h = qubit().tensor(&qubit()).unwrap();
        let rho = DensityMatrix::maximally_mixed(h);
        let file = StateFile::from_state(&rho);
        assert_eq!(file.factors.as_ref().map(Vec::len), Some(2));
        assert_eq!(file.to_state().unwrap(), rho);
    }

    #[test]
    fn channel_round_trip() {
        let ch = CovariantChannel::dephasing(qubit());
        let back = ChannelFile::from_channel(&ch).to_channel().unwrap();
        assert_eq!(back, ch);
    }

    #[test]
    fn wrong_entry_count_is_a_format_error() {
        let mut f = StateFile::from_state(&DensityMatrix::maximally_mixed(qubit()));
        f.matrix.pop();
        assert!(matches!(f.to_state(), Err(LabError::Format(_))));
    }
}
