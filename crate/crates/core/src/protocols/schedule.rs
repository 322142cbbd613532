//! Recombination of marginal catalysts and the resulting rates.
//!
//! `N^k` catalyst sets are labelled by tuples `(n_1, …, n_k) ∈ {1..N}^k`.
//! Round 1 groups the `N` roles of each label. Round `l ≥ 2` groups labels
//! that agree outside position `l − 1`; role `j` of group `g` takes
//! `n_{l−1} = g + j mod N`. Every round gives `N^k` conversions.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// One round: `groups[g][j]` is the label (1-based entries) whose catalyst of
/// role `j + 1` joins group `g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScheduleRound {
    pub index: usize,
    pub groups: Vec<Vec<Vec<usize>>>,
}

fn all_labels(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = alloc::vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (1..=n).map(move |v| {
                    let mut l = prefix.clone();
                    l.push(v);
                    l
                })
            })
            .collect();
    }
    out
}

/// The `k + 1` rounds for `N ≥ 2` roles and `k ≥ 0`.
pub fn recombination_schedule(n: usize, k: usize) -> Result<Vec<ScheduleRound>> {
    if n < 2 {
        return Err(Error::OutOfRange(alloc::format!(
            "N = {n} must be at least 2"
        )));
    }
    let count = n
        .checked_pow(k as u32)
        .ok_or_else(|| Error::OutOfRange("N^k overflows".into()))?;
    if count > 1 << 20 {
        return Err(Error::OutOfRange(alloc::format!(
            "N^k = {count} labels is too many to list"
        )));
    }
    let labels = all_labels(n, k);
    let mut rounds = Vec::with_capacity(k + 1);
    rounds.push(ScheduleRound {
        index: 1,
        groups: labels.iter().map(|l| alloc::vec![l.clone(); n]).collect(),
    });
    for l in 2..=k + 1 {
        let p = l - 2;
        let mut groups = Vec::with_capacity(count);
        // Representatives: labels with n_p = 1, one per assignment outside p.
        for base in labels.iter().filter(|lab| lab[p] == 1) {
            for g in 0..n {
                let group = (1..=n)
                    .map(|j| {
                        let mut lab = base.clone();
                        lab[p] = (g + j - 1) % n + 1;
                        lab
                    })
                    .collect();
                groups.push(group);
            }
        }
        rounds.push(ScheduleRound { index: l, groups });
    }
    Ok(rounds)
}

/// `(k + 1) N^k`.
pub fn total_conversions(n: usize, k: usize) -> BigUint {
    BigUint::from(k + 1) * BigUint::from(n).pow(k as u32)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreshnessReport {
    /// Every round uses each catalyst instance exactly once.
    pub partitions: bool,
    /// Instance pairs co-grouped in more than one round.
    pub repeated_pairs: usize,
    /// Groups containing two instances already correlated, directly or
    /// through earlier rounds.
    pub correlated_groups: usize,
    pub conversions: usize,
}

impl FreshnessReport {
    pub fn passed(&self) -> bool {
        self.partitions && self.repeated_pairs == 0 && self.correlated_groups == 0
    }
}

struct Components(Vec<usize>);

impl Components {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }
}

/// Exhaustive scan of a schedule over `n` roles.
pub fn check_freshness(rounds: &[ScheduleRound], n: usize) -> FreshnessReport {
    let mut ids: BTreeMap<(usize, Vec<usize>), usize> = BTreeMap::new();
    let mut partitions = true;
    let mut pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut repeated_pairs = 0;
    let mut correlated_groups = 0;
    let mut conversions = 0;
    let mut universe: Option<BTreeSet<usize>> = None;
    let mut comps = Components(Vec::new());

    for round in rounds {
        let mut seen = BTreeSet::new();
        let mut members_of_round = Vec::new();
        for group in &round.groups {
            if group.len() != n {
                partitions = false;
            }
            let mut members = Vec::with_capacity(group.len());
            for (j, label) in group.iter().enumerate() {
                let next = ids.len();
                let id = *ids.entry((j, label.clone())).or_insert(next);
                if id == comps.0.len() {
                    comps.0.push(id);
                }
                if !seen.insert(id) {
                    partitions = false;
                }
                members.push(id);
            }
            conversions += 1;
            members_of_round.push(members);
        }
        match &universe {
            None => universe = Some(seen),
            Some(u) => partitions &= *u == seen,
        }
        for members in &members_of_round {
            let roots: BTreeSet<usize> = members.iter().map(|&m| comps.find(m)).collect();
            if roots.len() != members.len() {
                correlated_groups += 1;
            }
            for (a, &x) in members.iter().enumerate() {
                for &y in &members[a + 1..] {
                    if !pairs.insert((x.min(y), x.max(y))) {
                        repeated_pairs += 1;
                    }
                }
            }
        }
        for members in &members_of_round {
            let root = comps.find(members[0]);
            for &m in &members[1..] {
                let r = comps.find(m);
                comps.0[r] = root;
            }
        }
    }
    FreshnessReport {
        partitions,
        repeated_pairs,
        correlated_groups,
        conversions,
    }
}

/// Copies in and out of the recombined marginal-catalytic protocol, with
/// `μ` copies of the input needed per catalyst set.
#[derive(Clone, Debug, PartialEq)]
pub struct RateCertificate {
    pub mu: u64,
    pub n: usize,
    pub k: usize,
    /// `μ N^k`.
    pub copies_in: BigUint,
    /// `(k + 1) N^k`.
    pub copies_out: BigUint,
    /// `(k + 1) / μ`, exact.
    pub ratio: BigRational,
    /// Largest correlation between one output copy and the rest, when measured.
    pub max_correlation: Option<f64>,
}

impl RateCertificate {
    pub fn ratio_f64(&self) -> f64 {
        self.ratio.to_f64().unwrap_or(f64::INFINITY)
    }
}

pub fn rate_certificate(mu: u64, n: usize, k: usize) -> Result<RateCertificate> {
    if mu == 0 {
        return Err(Error::OutOfRange("mu must be at least 1".into()));
    }
    if n < 2 {
        return Err(Error::OutOfRange(alloc::format!(
            "N = {n} must be at least 2"
        )));
    }
    let sets = BigUint::from(n).pow(k as u32);
    let copies_in = BigUint::from(mu) * &sets;
    let copies_out = total_conversions(n, k);
    let ratio = BigRational::new(copies_out.clone().into(), copies_in.clone().into());
    Ok(RateCertificate {
        mu,
        n,
        k,
        copies_in,
        copies_out,
        ratio,
        max_correlation: None,
    })
}

/// Smallest `k` with `(k + 1)/μ ≥ target`.
pub fn minimal_k_for_rate(mu: u64, target: &BigRational) -> Result<BigUint> {
    if mu == 0 {
        return Err(Error::OutOfRange("mu must be at least 1".into()));
    }
    let need = target * BigRational::from_integer(mu.into()) - BigRational::one();
    if need <= BigRational::zero() {
        return Ok(BigUint::zero());
    }
    let (q, r) = need.numer().div_rem(need.denom());
    let k = if r.is_zero() { q } else { q + 1u32 };
    Ok(k.to_biguint().unwrap_or_default())
}
