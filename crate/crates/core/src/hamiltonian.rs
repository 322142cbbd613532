use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::energy::{EnergyValue, SymbolContext, Valuation};
use crate::error::{Error, Result};

/// One tensor factor: its energies and optional degeneracy labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factor {
    pub energies: Vec<EnergyValue>,
    pub labels: Option<Vec<String>>,
}

impl Factor {
    pub fn new(energies: Vec<EnergyValue>) -> Self {
        Self {
            energies,
            labels: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }
}

/// Diagonal Hamiltonian with exact energies, possibly declared as a tensor
/// product of factors. The basis order is row-major over the factors (first
/// factor most significant), matching the Kronecker product.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledHamiltonian {
    context: SymbolContext,
    factors: Vec<Factor>,
    energies: Vec<EnergyValue>,
}

impl LabeledHamiltonian {
    /// Single-factor Hamiltonian.
    pub fn new(context: SymbolContext, energies: Vec<EnergyValue>) -> Result<Self> {
        Self::from_factors(context, alloc::vec![Factor::new(energies)])
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if self.factors.len() != 1 {
            return Err(Error::InvalidFactorization(
                "labels can only be attached to a single-factor Hamiltonian".into(),
            ));
        }
        if labels.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: labels.len(),
            });
        }
        self.factors[0].labels = Some(labels);
        Ok(self)
    }

    pub fn from_factors(context: SymbolContext, factors: Vec<Factor>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidFactorization("no factors".into()));
        }
        for f in &factors {
            if f.energies.is_empty() {
                return Err(Error::InvalidFactorization("empty factor".into()));
            }
            for e in &f.energies {
                if let Some(s) = e.max_symbol() {
                    if s >= context.len() {
                        return Err(Error::UnknownSymbol(s));
                    }
                }
            }
            if let Some(l) = &f.labels {
                if l.len() != f.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: f.dim(),
                        found: l.len(),
                    });
                }
            }
        }
        let mut energies = alloc::vec![EnergyValue::zero()];
        for f in &factors {
            energies = energies
                .iter()
                .flat_map(|a| f.energies.iter().map(move |b| a + b))
                .collect();
        }
        Ok(Self {
            context,
            factors,
            energies,
        })
    }

    /// Fully degenerate (zero) Hamiltonian of the given dimension.
    pub fn trivial(context: SymbolContext, dim: usize) -> Result<Self> {
        Self::new(context, alloc::vec![EnergyValue::zero(); dim])
    }

    pub fn context(&self) -> &SymbolContext {
        &self.context
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &[EnergyValue] {
        &self.energies
    }

    pub fn energy(&self, i: usize) -> &EnergyValue {
        &self.energies[i]
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn factor_dims(&self) -> Vec<usize> {
        self.factors.iter().map(Factor::dim).collect()
    }

    /// Tensor product; factor lists are concatenated.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        if self.context != other.context {
            return Err(Error::ContextMismatch);
        }
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        Self::from_factors(self.context.clone(), factors)
    }

    /// `self^{⊗n}`.
    pub fn power(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::OutOfRange("tensor power must be at least 1".into()));
        }
        let mut factors = Vec::with_capacity(n * self.factors.len());
        for _ in 0..n {
            factors.extend(self.factors.iter().cloned());
        }
        Self::from_factors(self.context.clone(), factors)
    }

    /// Collapses the factor structure into a single factor with the same energies.
    pub fn flattened(&self) -> Self {
        Self {
            context: self.context.clone(),
            factors: alloc::vec![Factor::new(self.energies.clone())],
            energies: self.energies.clone(),
        }
    }

    /// Hamiltonian of the kept factors, in the order given.
    pub fn restrict(&self, keep: &[usize]) -> Result<Self> {
        validate_factor_subset(keep, self.factors.len())?;
        let factors = keep.iter().map(|&k| self.factors[k].clone()).collect();
        Self::from_factors(self.context.clone(), factors)
    }

    /// Reorders the factors: output factor `i` is input factor `order[i]`.
    pub fn permute(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.factors.len() {
            return Err(Error::InvalidFactorization("permutation length".into()));
        }
        self.restrict(order)
    }

    /// Same Hamiltonian with energies re-expressed in `context`.
    pub fn remap(&self, context: &SymbolContext) -> Option<Self> {
        let factors = self
            .factors
            .iter()
            .map(|f| {
                Some(Factor {
                    energies: f
                        .energies
                        .iter()
                        .map(|e| e.remap(&self.context, context))
                        .collect::<Option<Vec<_>>>()?,
                    labels: f.labels.clone(),
                })
            })
            .collect::<Option<Vec<_>>>()?;
        Self::from_factors(context.clone(), factors).ok()
    }

    /// Exact energy eigenspaces: distinct energies with their basis indices.
    pub fn blocks(&self) -> BTreeMap<EnergyValue, Vec<usize>> {
        let mut out: BTreeMap<EnergyValue, Vec<usize>> = BTreeMap::new();
        for (i, e) in self.energies.iter().enumerate() {
            out.entry(e.clone()).or_default().push(i);
        }
        out
    }

    /// Energies as floats under `valuation`.
    pub fn numeric(&self, valuation: &Valuation) -> Result<Vec<f64>> {
        let vals = valuation.resolve(&self.context)?;
        Ok(self.energies.iter().map(|e| e.evaluate(&vals)).collect())
    }

    /// Same basis and energies, ignoring the factor split.
    pub fn same_spectrum(&self, other: &Self) -> bool {
        self.context == other.context && self.energies == other.energies
    }
}

pub(crate) fn validate_factor_subset(keep: &[usize], nfactors: usize) -> Result<()> {
    for (i, &k) in keep.iter().enumerate() {
        if k >= nfactors {
            return Err(Error::InvalidFactorization(alloc::format!(
                "factor {} out of range (have {})",
                k,
                nfactors
            )));
        }
        if keep[..i].contains(&k) {
            return Err(Error::InvalidFactorization(alloc::format!(
                "factor {} repeated",
                k
            )));
        }
    }
    Ok(())
}
