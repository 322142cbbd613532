//! Exact energies.
//!
//! Every energy is a finite rational combination of opaque basis symbols
//! (`1`, `sqrt2`, ...). The symbols are declared rational-linearly
//! independent; nothing in this crate ever rounds them to floats except
//! [`EnergyValue::evaluate`], which is only used for time evolution and
//! numerical measures.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Ordered list of basis symbol names shared by a family of energies.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SymbolContext(Arc<[String]>);

impl SymbolContext {
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(Error::DuplicateSymbol(n.clone()));
            }
        }
        Ok(Self(names.into()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn name(&self, index: usize) -> Option<&str> {
        self.0.get(index).map(String::as_str)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }
}

impl fmt::Debug for SymbolContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

/// Exact rational coefficient vector over the symbols of a [`SymbolContext`].
///
/// Canonical: zero coefficients are never stored, so structural equality is
/// exact equality of energies.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EnergyValue {
    coeffs: BTreeMap<usize, BigRational>,
}

impl EnergyValue {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `coeff · symbol`.
    pub fn term(symbol: usize, coeff: BigRational) -> Self {
        Self::from_coeffs([(symbol, coeff)])
    }

    /// `num/den · symbol`. Panics if `den == 0`.
    pub fn ratio(symbol: usize, num: i64, den: i64) -> Self {
        Self::term(symbol, BigRational::new(num.into(), den.into()))
    }

    /// `n · symbol`.
    pub fn integer(symbol: usize, n: i64) -> Self {
        Self::ratio(symbol, n, 1)
    }

    pub fn from_coeffs<I>(coeffs: I) -> Self
    where
        I: IntoIterator<Item = (usize, BigRational)>,
    {
        let mut out = Self::zero();
        for (s, c) in coeffs {
            out.add_term(s, &c);
        }
        out
    }

    /// Builds a value from a dense per-symbol coefficient list.
    pub fn from_dense(coeffs: &[BigRational]) -> Self {
        Self::from_coeffs(coeffs.iter().cloned().enumerate())
    }

    fn add_term(&mut self, symbol: usize, c: &BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(symbol).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&symbol);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, symbol: usize) -> BigRational {
        self.coeffs
            .get(&symbol)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// Nonzero `(symbol, coefficient)` pairs in symbol order.
    pub fn terms(&self) -> impl Iterator<Item = (usize, &BigRational)> {
        self.coeffs.iter().map(|(s, c)| (*s, c))
    }

    /// Dense coefficients over the first `len` symbols.
    pub fn to_dense(&self, len: usize) -> Vec<BigRational> {
        (0..len).map(|s| self.coeff(s)).collect()
    }

    /// Largest symbol index with a nonzero coefficient.
    pub fn max_symbol(&self) -> Option<usize> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn scale(&self, factor: &BigRational) -> Self {
        if factor.is_zero() {
            return Self::zero();
        }
        Self {
            coeffs: self.coeffs.iter().map(|(s, c)| (*s, c * factor)).collect(),
        }
    }

    pub fn scale_int(&self, n: i64) -> Self {
        self.scale(&BigRational::from_integer(BigInt::from(n)))
    }

    /// Least common multiple of the coefficient denominators (1 for zero).
    pub fn denominator_lcm(&self) -> BigInt {
        use num_integer::Integer;
        self.coeffs
            .values()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    /// Numeric value under a resolved valuation (one float per symbol).
    pub fn evaluate(&self, values: &[f64]) -> f64 {
        self.coeffs
            .iter()
            .map(|(s, c)| rational_to_f64(c) * values[*s])
            .sum()
    }

    /// Re-expresses the value in another context by symbol name. `None` when a
    /// symbol with nonzero coefficient is absent from `to`.
    pub fn remap(&self, from: &SymbolContext, to: &SymbolContext) -> Option<Self> {
        if from == to {
            return Some(self.clone());
        }
        let mut out = Self::zero();
        for (s, c) in &self.coeffs {
            let idx = to.index_of(from.name(*s)?)?;
            out.add_term(idx, c);
        }
        Some(out)
    }

    pub fn display<'a>(&'a self, ctx: &'a SymbolContext) -> DisplayEnergy<'a> {
        DisplayEnergy { value: self, ctx }
    }
}

pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

impl fmt::Debug for EnergyValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (s, c) in &self.coeffs {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "{}*s{}", c, s)?;
        }
        Ok(())
    }
}

/// Formats an [`EnergyValue`] with symbol names, e.g. `1 - 3/2*sqrt2`.
/// A symbol spelled as an integer literal (`1`) is printed as a plain scale.
pub struct DisplayEnergy<'a> {
    value: &'a EnergyValue,
    ctx: &'a SymbolContext,
}

impl fmt::Display for DisplayEnergy<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.value.is_zero() {
            return f.write_str("0");
        }
        for (i, (s, c)) in self.value.coeffs.iter().enumerate() {
            let name = self
                .ctx
                .name(*s)
                .map(ToString::to_string)
                .unwrap_or_else(|| alloc::format!("s{}", s));
            let mag = c.abs();
            if i == 0 {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else if c.is_negative() {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            if name == "1" {
                write!(f, "{}", mag)?;
            } else if mag.is_one() {
                write!(f, "{}", name)?;
            } else {
                write!(f, "{}*{}", mag, name)?;
            }
        }
        Ok(())
    }
}

impl Add for &EnergyValue {
    type Output = EnergyValue;
    fn add(self, rhs: &EnergyValue) -> EnergyValue {
        let mut out = self.clone();
        for (s, c) in &rhs.coeffs {
            out.add_term(*s, c);
        }
        out
    }
}

impl Sub for &EnergyValue {
    type Output = EnergyValue;
    fn sub(self, rhs: &EnergyValue) -> EnergyValue {
        let mut out = self.clone();
        for (s, c) in &rhs.coeffs {
            out.add_term(*s, &-c);
        }
        out
    }
}

impl Neg for &EnergyValue {
    type Output = EnergyValue;
    fn neg(self) -> EnergyValue {
        EnergyValue {
            coeffs: self.coeffs.iter().map(|(s, c)| (*s, -c)).collect(),
        }
    }
}

impl Add for EnergyValue {
    type Output = EnergyValue;
    fn add(self, rhs: EnergyValue) -> EnergyValue {
        &self + &rhs
    }
}

impl Sub for EnergyValue {
    type Output = EnergyValue;
    fn sub(self, rhs: EnergyValue) -> EnergyValue {
        &self - &rhs
    }
}

impl Neg for EnergyValue {
    type Output = EnergyValue;
    fn neg(self) -> EnergyValue {
        -&self
    }
}

impl Mul<&BigRational> for &EnergyValue {
    type Output = EnergyValue;
    fn mul(self, rhs: &BigRational) -> EnergyValue {
        self.scale(rhs)
    }
}

/// Assignment of a real number to each symbol name.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Valuation {
    values: BTreeMap<String, f64>,
}

impl Valuation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: impl Into<String>, value: f64) -> Self {
        self.values.insert(name.into(), value);
        self
    }

    pub fn insert(&mut self, name: impl Into<String>, value: f64) {
        self.values.insert(name.into(), value);
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.get(name).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.values.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// Values in context order; fails on the first unvalued symbol.
    pub fn resolve(&self, ctx: &SymbolContext) -> Result<Vec<f64>> {
        ctx.names()
            .iter()
            .map(|n| {
                self.values
                    .get(n)
                    .copied()
                    .ok_or_else(|| Error::MissingSymbol(n.clone()))
            })
            .collect()
    }
}

impl<S: Into<String>> FromIterator<(S, f64)> for Valuation {
    fn from_iter<T: IntoIterator<Item = (S, f64)>>(iter: T) -> Self {
        Self {
            values: iter.into_iter().map(|(k, v)| (k.into(), v)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn canonical_form_drops_zeros() {
        let a = EnergyValue::from_coeffs([(0, q(1, 2)), (1, q(0, 1)), (0, q(-1, 2))]);
        assert!(a.is_zero());
        assert_eq!(a, EnergyValue::zero());
        let b = EnergyValue::from_coeffs([(0, q(2, 4))]);
        assert_eq!(b, EnergyValue::ratio(0, 1, 2));
    }

    #[test]
    fn arithmetic_is_exact() {
        let one = EnergyValue::integer(0, 1);
        let r2 = EnergyValue::integer(1, 1);
        let s = &one + &r2;
        assert_eq!(&s - &r2, one);
        assert_eq!(-&(-&s), s);
        assert_eq!(s.scale(&q(3, 2)).coeff(1), q(3, 2));
        assert_eq!(
            EnergyValue::ratio(0, 2, 3).denominator_lcm(),
            BigInt::from(3)
        );
    }

    #[test]
    fn display_uses_symbol_names() {
        let ctx = SymbolContext::new(["1", "sqrt2"]).unwrap();
        let v = EnergyValue::from_coeffs([(0, q(1, 1)), (1, q(-3, 2))]);
        assert_eq!(format!("{}", v.display(&ctx)), "1 - 3/2*sqrt2");
        assert_eq!(format!("{}", EnergyValue::zero().display(&ctx)), "0");
        assert_eq!(
            format!("{}", EnergyValue::integer(1, -1).display(&ctx)),
            "-sqrt2"
        );
    }

    #[test]
    fn valuation_reports_missing_symbol() {
        let ctx = SymbolContext::new(["1", "sqrt2"]).unwrap();
        let v = Valuation::new().with("1", 1.0);
        assert_eq!(v.resolve(&ctx), Err(Error::MissingSymbol("sqrt2".into())));
        let v = v.with("sqrt2", 2f64.sqrt());
        let vals = v.resolve(&ctx).unwrap();
        let e = EnergyValue::from_coeffs([(0, q(1, 1)), (1, q(1, 1))]);
        assert!((e.evaluate(&vals) - (1.0 + 2f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn duplicate_symbols_rejected() {
        assert!(matches!(
            SymbolContext::new(["a", "a"]),
            Err(Error::DuplicateSymbol(_))
        ));
    }

    #[test]
    fn remap_by_name() {
        let a = SymbolContext::new(["1", "sqrt2"]).unwrap();
        let b = SymbolContext::new(["sqrt2", "sqrt3", "1"]).unwrap();
        let v = EnergyValue::integer(1, 5);
        assert_eq!(v.remap(&a, &b), Some(EnergyValue::integer(0, 5)));
        let w = EnergyValue::integer(1, 1);
        assert_eq!(w.remap(&b, &a), None);
    }
}
