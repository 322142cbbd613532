//! ℤ-span and ℚ-span membership over exact energies, and the lattice basis
//! used to embed a Hamiltonian into a product of ladder systems.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::energy::EnergyValue;

/// Symbol indices touched by any of the values, sorted.
fn support<'a>(values: impl IntoIterator<Item = &'a EnergyValue>) -> Vec<usize> {
    let mut cols: Vec<usize> = values
        .into_iter()
        .flat_map(|v| v.terms().map(|(s, _)| s))
        .collect();
    cols.sort_unstable();
    cols.dedup();
    cols
}

fn rational_row(v: &EnergyValue, cols: &[usize]) -> Vec<BigRational> {
    cols.iter().map(|&c| v.coeff(c)).collect()
}

/// Integer row of `scale · v` restricted to `cols`. `scale` must clear every
/// denominator of `v`.
fn integer_row(v: &EnergyValue, cols: &[usize], scale: &BigInt) -> Vec<BigInt> {
    cols.iter()
        .map(|&c| {
            let x = v.coeff(c) * BigRational::from_integer(scale.clone());
            debug_assert!(x.is_integer());
            x.to_integer()
        })
        .collect()
}

fn common_denominator<'a>(values: impl IntoIterator<Item = &'a EnergyValue>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(&v.denominator_lcm()))
}

/// Rank over ℚ of a set of rational row vectors, by fraction-exact elimination.
pub fn rational_rank(mut rows: Vec<Vec<BigRational>>) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank][col].clone();
        for r in 0..rows.len() {
            if r != rank && !rows[r][col].is_zero() {
                let f = &rows[r][col] / &pivot;
                for c in col..ncols {
                    let d = &f * &rows[rank][c];
                    rows[r][c] -= d;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Rank over ℚ of a set of energies.
pub fn q_rank(values: &[EnergyValue]) -> usize {
    let cols = support(values);
    rational_rank(values.iter().map(|v| rational_row(v, &cols)).collect())
}

/// True iff `x` is a rational-linear combination of `generators`.
pub fn q_span_member(x: &EnergyValue, generators: &[EnergyValue]) -> bool {
    if x.is_zero() {
        return true;
    }
    let cols = support(generators.iter().chain(core::iter::once(x)));
    let gens: Vec<_> = generators.iter().map(|g| rational_row(g, &cols)).collect();
    let base = rational_rank(gens.clone());
    let mut with_x = gens;
    with_x.push(rational_row(x, &cols));
    rational_rank(with_x) == base
}

/// Row-style Hermite normal form of an integer matrix: nonzero rows only,
/// pivots strictly increasing, pivots positive, entries above each pivot
/// reduced into `[0, pivot)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HermiteForm {
    pub rows: Vec<Vec<BigInt>>,
    pub pivots: Vec<usize>,
}

impl HermiteForm {
    pub fn new(mut m: Vec<Vec<BigInt>>) -> Self {
        let nrows = m.len();
        let ncols = m.first().map_or(0, Vec::len);
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..ncols {
            if r == nrows {
                break;
            }
            loop {
                let Some(p) = (r..nrows)
                    .filter(|&i| !m[i][c].is_zero())
                    .min_by(|&a, &b| m[a][c].abs().cmp(&m[b][c].abs()))
                else {
                    break;
                };
                m.swap(r, p);
                let mut clean = true;
                for i in r + 1..nrows {
                    if m[i][c].is_zero() {
                        continue;
                    }
                    let q = m[i][c].div_floor(&m[r][c]);
                    sub_scaled(&mut m, i, r, &q);
                    if !m[i][c].is_zero() {
                        clean = false;
                    }
                }
                if clean {
                    break;
                }
            }
            if m.get(r).map_or(true, |row| row[c].is_zero()) {
                continue;
            }
            if m[r][c].is_negative() {
                for x in m[r].iter_mut() {
                    *x = -core::mem::take(x);
                }
            }
            for i in 0..r {
                let q = m[i][c].div_floor(&m[r][c]);
                if !q.is_zero() {
                    sub_scaled(&mut m, i, r, &q);
                }
            }
            pivots.push(c);
            r += 1;
        }
        m.truncate(r);
        Self { rows: m, pivots }
    }

    /// Reduces `target` by the rows; `Some(coefficients)` iff it lies in the
    /// integer row span.
    pub fn solve(&self, target: &[BigInt]) -> Option<Vec<BigInt>> {
        let mut t = target.to_vec();
        let mut coeffs = Vec::with_capacity(self.rows.len());
        for (row, &c) in self.rows.iter().zip(&self.pivots) {
            if t[..c].iter().any(|x| !x.is_zero()) {
                return None;
            }
            let (q, rem) = t[c].div_rem(&row[c]);
            if !rem.is_zero() {
                return None;
            }
            for (x, y) in t.iter_mut().zip(row) {
                *x -= &q * y;
            }
            coeffs.push(q);
        }
        t.iter().all(Zero::is_zero).then_some(coeffs)
    }
}

fn sub_scaled(m: &mut [Vec<BigInt>], target: usize, source: usize, q: &BigInt) {
    let (t, s) = if target < source {
        let (a, b) = m.split_at_mut(source);
        (&mut a[target], &b[0])
    } else {
        let (a, b) = m.split_at_mut(target);
        (&mut b[0], &a[source])
    };
    for (x, y) in t.iter_mut().zip(s.iter()) {
        *x -= q * y;
    }
}

/// True iff `x = Σ n_g · g` with integer `n_g`. Exact: denominators are
/// cleared and membership is decided on the Hermite normal form.
pub fn z_span_member(x: &EnergyValue, generators: &[EnergyValue]) -> bool {
    if x.is_zero() {
        return true;
    }
    let all = generators.iter().chain(core::iter::once(x));
    let cols = support(all.clone());
    let scale = common_denominator(all);
    let rows = generators
        .iter()
        .map(|g| integer_row(g, &cols, &scale))
        .collect();
    HermiteForm::new(rows)
        .solve(&integer_row(x, &cols, &scale))
        .is_some()
}

/// Rational-linearly independent set `B` of minimal size such that every
/// input energy is an integer combination of `B`. The output is the Hermite
/// basis of the ℤ-module generated by the inputs, so it is canonical.
pub fn embedding_basis(energies: &[EnergyValue]) -> Vec<EnergyValue> {
    let cols = support(energies);
    let scale = common_denominator(energies);
    let rows = energies
        .iter()
        .map(|e| integer_row(e, &cols, &scale))
        .collect();
    let hnf = HermiteForm::new(rows);
    let inv = BigRational::new(BigInt::one(), scale);
    hnf.rows
        .iter()
        .map(|row| {
            EnergyValue::from_coeffs(
                cols.iter()
                    .zip(row)
                    .map(|(&c, x)| (c, BigRational::from_integer(x.clone()) * &inv)),
            )
        })
        .collect()
}

/// Exact coordinates of `x` in a rational-linearly independent `basis`;
/// `None` if `x` is outside the rational span.
pub fn rational_coordinates(x: &EnergyValue, basis: &[EnergyValue]) -> Option<Vec<BigRational>> {
    let cols = support(basis.iter().chain(core::iter::once(x)));
    let k = basis.len();
    // Augmented system: columns are basis vectors, rows are symbols.
    let mut a: Vec<Vec<BigRational>> = cols
        .iter()
        .map(|&c| {
            let mut row: Vec<BigRational> = basis.iter().map(|b| b.coeff(c)).collect();
            row.push(x.coeff(c));
            row
        })
        .collect();
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for col in 0..k {
        let Some(p) = (r..a.len()).find(|&i| !a[i][col].is_zero()) else {
            return None;
        };
        a.swap(r, p);
        let pivot = a[r][col].clone();
        for x in a[r].iter_mut() {
            *x /= &pivot;
        }
        for i in 0..a.len() {
            if i != r && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                for j in col..=k {
                    let d = &f * &a[r][j];
                    a[i][j] -= d;
                }
            }
        }
        pivot_cols.push(col);
        r += 1;
    }
    if a[r..].iter().any(|row| !row[k].is_zero()) {
        return None;
    }
    let mut out = vec![BigRational::zero(); k];
    for (i, &c) in pivot_cols.iter().enumerate() {
        out[c] = a[i][k].clone();
    }
    Some(out)
}

/// Integer coordinates of `x` in `basis`, if they exist.
pub fn integer_coordinates(x: &EnergyValue, basis: &[EnergyValue]) -> Option<Vec<BigInt>> {
    rational_coordinates(x, basis)?
        .into_iter()
        .map(|c| c.is_integer().then(|| c.to_integer()))
        .collect()
}

/// Re-synthesizes `Σ n_j · basis_j`.
pub fn synthesize(coords: &[i64], basis: &[EnergyValue]) -> EnergyValue {
    coords
        .iter()
        .zip(basis)
        .fold(EnergyValue::zero(), |acc, (&n, b)| &acc + &b.scale_int(n))
}
