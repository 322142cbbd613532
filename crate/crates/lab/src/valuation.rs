//! Numeric values for symbol names when no valuation file is given.

use coherence_core::{SymbolContext, Valuation};

const PRIMES: [u32; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// A name that parses as a number takes that value and `sqrtN` takes `√N`.
/// Every other name takes `√p` for the next prime `p` not already used that
/// way, which keeps distinct symbols rationally independent.
pub fn default_valuation(ctx: &SymbolContext) -> Valuation {
    let mut v = Valuation::new();
    let mut used: Vec<u32> = Vec::new();
    let mut pending = Vec::new();
    for name in ctx.names() {
        if let Ok(x) = name.parse::<f64>() {
            v.insert(name.clone(), x);
        } else if let Some(n) = name
            .strip_prefix("sqrt")
            .and_then(|r| r.parse::<u32>().ok())
        {
            used.push(n);
            v.insert(name.clone(), f64::from(n).sqrt());
        } else {
            pending.push(name.clone());
        }
    }
    let mut primes = PRIMES.iter().filter(|p| !used.contains(p));
    for name in pending {
        let p = primes.next().copied().unwrap_or(59);
        v.insert(name, f64::from(p).sqrt());
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_sqrt_and_opaque_names() {
        let ctx = SymbolContext::new(["1", "sqrt2", "w", "0.5", "z"]).unwrap();
        let v = default_valuation(&ctx);
        assert_eq!(v.get("1"), Some(1.0));
        assert_eq!(v.get("0.5"), Some(0.5));
        assert_eq!(v.get("sqrt2"), Some(2f64.sqrt()));
        assert_eq!(v.get("w"), Some(3f64.sqrt()));
        assert_eq!(v.get("z"), Some(5f64.sqrt()));
    }
}
