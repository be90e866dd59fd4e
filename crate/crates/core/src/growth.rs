//! Growth functions `d_S(n) = |S^{<=n}|` of finitely generated composition
//! semigroups, a heuristic growth classifier, and affine-map semigroups.
//!
//! `S^{<=n}` is the set of products of length 1 through `n`; the empty
//! product is not counted. Every rendered table states this.

use std::fmt::Write as _;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::enumerate::{distinct_by_length, EnumError, Enumerable, ExactBackend, ExactElem, Interner, DEFAULT_SEED};
use crate::ratfun::RatFun;
use crate::scalar::{parse_rational, FieldElem, Rational};

/// Convention line carried by every table.
pub const IDENTITY_CONVENTION: &str = "identity excluded: d_S(n) counts products of length 1..n";
/// Default cap on interned elements.
pub const DEFAULT_BUDGET: usize = 1_000_000;
/// RMS residual a fit must reach to be reported.
pub const RESIDUAL_THRESHOLD: f64 = 1e-2;
/// Distance from 1 within which a polynomial-degree estimate counts as linear.
pub const LINEAR_TOLERANCE: f64 = 0.2;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrowthError {
    #[error("table has {0} entries; classification needs at least 4")]
    TableTooShort(usize),
    #[error("all generators are constant")]
    AllConstant,
    #[error("affine map is malformed: {0}")]
    BadAffineMap(String),
    #[error(transparent)]
    Enum(#[from] EnumError),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthTable {
    pub generators: Vec<String>,
    pub field: String,
    /// `values[n-1] = d_S(n)`.
    pub values: Vec<usize>,
    /// The element budget stopped the enumeration early.
    pub truncated: bool,
    pub convention: &'static str,
}

impl GrowthTable {
    pub fn to_csv(&self) -> String {
        let mut out = format!("# {IDENTITY_CONVENTION}\nn,d_S(n)\n");
        for (i, v) in self.values.iter().enumerate() {
            let _ = writeln!(out, "{},{}", i + 1, v);
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "class", content = "estimate")]
pub enum GrowthClass {
    Bounded,
    Linear,
    Polynomial(f64),
    Exponential(f64),
    Inconclusive,
}

/// Growth table of the semigroup generated by `gens` under composition,
/// for word lengths `1..=n_max`.
///
/// Constant generators are allowed (they are absorbing on the left); the
/// classification should be read off the table of [`absorb_constants`].
pub fn growth_table<K: Enumerable>(gens: &[RatFun<K>], n_max: usize, budget: usize) -> Result<GrowthTable, GrowthError> {
    growth_table_seeded(gens, n_max, budget, DEFAULT_SEED)
}

pub fn growth_table_seeded<K: Enumerable>(
    gens: &[RatFun<K>],
    n_max: usize,
    budget: usize,
    seed: u64,
) -> Result<GrowthTable, GrowthError> {
    let first = gens.first().ok_or(EnumError::NoGenerators)?;
    let field = K::describe(first.ctx());
    let mut interner = Interner::new(K::backend(gens.to_vec(), seed)?);
    let counts = distinct_by_length(&mut interner, n_max, budget)?;
    Ok(GrowthTable {
        generators: gens.iter().map(|g| g.to_string()).collect(),
        field,
        values: counts.counts,
        truncated: counts.truncated,
        convention: IDENTITY_CONVENTION,
    })
}

/// Drops constant generators, reporting whether any were present.
pub fn absorb_constants<K: FieldElem>(gens: &[RatFun<K>]) -> Result<(Vec<RatFun<K>>, bool), GrowthError> {
    let kept: Vec<_> = gens.iter().filter(|g| !g.is_constant()).cloned().collect();
    if kept.is_empty() {
        return Err(GrowthError::AllConstant);
    }
    let had = kept.len() != gens.len();
    Ok((kept, had))
}

fn differences(v: &[f64]) -> Vec<f64> {
    v.windows(2).map(|w| w[1] - w[0]).collect()
}

/// Least-squares line through `(x, y)`: slope and RMS residual.
fn fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    let rms = (x.iter().zip(y).map(|(a, b)| (b - my - slope * (a - mx)).powi(2)).sum::<f64>() / n).sqrt();
    (slope, rms)
}

/// Heuristic classification from the table alone.
///
/// In order: an eventually constant table is `Bounded`; a table whose
/// `k`-th differences are constant and nonzero over the last three entries
/// is polynomial of degree `k` (`Linear` for `k = 1`); a table whose
/// logarithm is linear in `n` over its upper half is `Exponential` with the
/// fitted ratio; a table whose logarithm is linear in `log n` over its upper
/// half is polynomial of the fitted degree. Otherwise `Inconclusive`.
pub fn classify_growth(values: &[usize]) -> Result<GrowthClass, GrowthError> {
    if values.len() < 4 {
        return Err(GrowthError::TableTooShort(values.len()));
    }
    let v: Vec<f64> = values.iter().map(|&x| x as f64).collect();
    let len = v.len();
    if v[len - 3..].windows(2).all(|w| w[0] == w[1]) {
        return Ok(GrowthClass::Bounded);
    }
    let mut diff = v.clone();
    for k in 1..=len - 3 {
        diff = differences(&diff);
        let tail = &diff[diff.len() - 3..];
        if tail[0] != 0.0 && tail.iter().all(|&t| t == tail[0]) {
            return Ok(if k == 1 { GrowthClass::Linear } else { GrowthClass::Polynomial(k as f64) });
        }
        if diff.len() < 4 {
            break;
        }
    }
    let half = len / 2;
    let ns: Vec<f64> = (half..len).map(|i| (i + 1) as f64).collect();
    let logs: Vec<f64> = v[half..].iter().map(|x| x.ln()).collect();
    let (rate, rms) = fit(&ns, &logs);
    if rms <= RESIDUAL_THRESHOLD && rate > 0.05 {
        return Ok(GrowthClass::Exponential(rate.exp()));
    }
    let log_ns: Vec<f64> = ns.iter().map(|n| n.ln()).collect();
    let (degree, rms) = fit(&log_ns, &logs);
    if rms <= RESIDUAL_THRESHOLD {
        if (degree - 1.0).abs() <= LINEAR_TOLERANCE {
            return Ok(GrowthClass::Linear);
        }
        return Ok(GrowthClass::Polynomial(degree));
    }
    Ok(GrowthClass::Inconclusive)
}

/// `x -> A x + t` on `Q^k` with `A` invertible.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct AffineMap {
    matrix: Vec<Vec<Rational>>,
    translation: Vec<Rational>,
}

impl AffineMap {
    pub fn new(matrix: Vec<Vec<Rational>>, translation: Vec<Rational>) -> Result<Self, GrowthError> {
        let k = translation.len();
        if k == 0 || matrix.len() != k || matrix.iter().any(|row| row.len() != k) {
            return Err(GrowthError::BadAffineMap(format!("need a {k}x{k} matrix")));
        }
        if Zero::is_zero(&determinant(&matrix)) {
            return Err(GrowthError::BadAffineMap("matrix is singular".into()));
        }
        Ok(AffineMap { matrix, translation })
    }

    pub fn dimension(&self) -> usize {
        self.translation.len()
    }

    pub fn matrix(&self) -> &[Vec<Rational>] {
        &self.matrix
    }

    pub fn translation(&self) -> &[Rational] {
        &self.translation
    }

    /// `next ∘ self`: `x -> B(Ax + t) + u`.
    pub fn then_map(&self, next: &AffineMap) -> AffineMap {
        let k = self.dimension();
        let matrix = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| (0..k).fold(Rational::zero(), |acc, l| acc + &next.matrix[i][l] * &self.matrix[l][j]))
                    .collect()
            })
            .collect();
        let translation = (0..k)
            .map(|i| (0..k).fold(next.translation[i].clone(), |acc, l| acc + &next.matrix[i][l] * &self.translation[l]))
            .collect();
        AffineMap { matrix, translation }
    }

    /// Parses `A|t` with rows of `A` separated by `;` and entries by `,`,
    /// e.g. `2|0` for `x -> 2x` or `1,1;0,1|0,1` on `Q^2`.
    pub fn parse(s: &str) -> Result<Self, GrowthError> {
        let bad = || GrowthError::BadAffineMap(s.to_string());
        let (a, t) = s.split_once('|').ok_or_else(bad)?;
        let entry = |e: &str| parse_rational(e.trim()).ok_or_else(bad);
        let matrix = a
            .split(';')
            .map(|row| row.split(',').map(entry).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        let translation = t.split(',').map(entry).collect::<Result<Vec<_>, _>>()?;
        Self::new(matrix, translation)
    }
}

impl std::fmt::Display for AffineMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let join = |v: &[Rational]| v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",");
        let rows: Vec<String> = self.matrix.iter().map(|r| join(r)).collect();
        write!(f, "{}|{}", rows.join(";"), join(&self.translation))
    }
}

impl ExactElem for AffineMap {
    fn then(&self, next: &Self) -> Result<Self, EnumError> {
        Ok(self.then_map(next))
    }
}

fn determinant(m: &[Vec<Rational>]) -> Rational {
    let k = m.len();
    let mut a: Vec<Vec<BigRational>> = m.to_vec();
    let mut det = Rational::one();
    for col in 0..k {
        let Some(pivot) = (col..k).find(|&r| !Zero::is_zero(&a[r][col])) else {
            return Rational::zero();
        };
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        det *= &a[col][col];
        for r in col + 1..k {
            let (upper, lower) = a.split_at_mut(r);
            let (pivot_row, row) = (&upper[col], &mut lower[0]);
            let factor = &row[col] / &pivot_row[col];
            for (x, p) in row.iter_mut().zip(pivot_row).skip(col) {
                *x -= &factor * p;
            }
        }
    }
    det
}

/// Growth table of a semigroup of affine maps, interned exactly.
pub fn affine_growth(maps: &[AffineMap], n_max: usize, budget: usize) -> Result<GrowthTable, GrowthError> {
    let first = maps.first().ok_or(EnumError::NoGenerators)?;
    if maps.iter().any(|m| m.dimension() != first.dimension()) {
        return Err(GrowthError::BadAffineMap("maps act on different dimensions".into()));
    }
    let mut interner = Interner::new(ExactBackend::new(maps.to_vec())?);
    let counts = distinct_by_length(&mut interner, n_max, budget)?;
    Ok(GrowthTable {
        generators: maps.iter().map(|m| m.to_string()).collect(),
        field: format!("Q^{}", first.dimension()),
        values: counts.counts,
        truncated: counts.truncated,
        convention: IDENTITY_CONVENTION,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Poly;
    use crate::scalar::{Fp, PrimeModulus};

    fn poly(v: &[i64]) -> RatFun<Rational> {
        RatFun::from_poly(Poly::from_i64s(v, &()))
    }

    #[test]
    fn chebyshev_table() {
        let t = growth_table(&[RatFun::<Rational>::chebyshev(2, &()), RatFun::chebyshev(3, &())], 6, DEFAULT_BUDGET).unwrap();
        assert_eq!(t.values, vec![2, 5, 9, 14, 20, 27]);
    }

    #[test]
    fn single_generator_is_linear() {
        let t = growth_table(&[poly(&[0, 0, 1])], 6, DEFAULT_BUDGET).unwrap();
        assert_eq!(t.values, vec![1, 2, 3, 4, 5, 6]);
        assert_eq!(classify_growth(&t.values).unwrap(), GrowthClass::Linear);
    }

    #[test]
    fn prime_field_counter_example() {
        let p = PrimeModulus(3);
        let gens = [RatFun::from_poly(Poly::<Fp>::from_i64s(&[0, 0, 1], &p)), RatFun::from_poly(Poly::from_i64s(&[0, 1, 1], &p))];
        let t = growth_table(&gens, 5, DEFAULT_BUDGET).unwrap();
        assert_eq!(t.values, vec![2, 6, 14, 30, 62]);
    }

    #[test]
    fn classifier_examples() {
        assert_eq!(classify_growth(&[2, 5, 9, 14, 20, 27, 35, 44]).unwrap(), GrowthClass::Polynomial(2.0));
        assert_eq!(classify_growth(&[1, 2, 3, 4, 5, 6]).unwrap(), GrowthClass::Linear);
        match classify_growth(&[2, 6, 14, 30, 62, 126]).unwrap() {
            GrowthClass::Exponential(r) => assert!((r - 2.0).abs() < 0.1, "{r}"),
            other => panic!("{other:?}"),
        }
        assert_eq!(classify_growth(&[1, 1, 1, 1]).unwrap(), GrowthClass::Bounded);
        assert_eq!(classify_growth(&[1, 2, 3]), Err(GrowthError::TableTooShort(3)));
    }

    #[test]
    fn constants_are_absorbed() {
        let one = RatFun::constant(Rational::one());
        let sq = poly(&[0, 0, 1]);
        assert_eq!(absorb_constants(&[sq.clone(), one.clone()]).unwrap(), (vec![sq.clone()], true));
        assert_eq!(absorb_constants(std::slice::from_ref(&sq)).unwrap(), (vec![sq.clone()], false));
        assert_eq!(absorb_constants(&[RatFun::constant(Rational::zero())]), Err(GrowthError::AllConstant));
        let with = growth_table(&[sq.clone(), one], 6, DEFAULT_BUDGET).unwrap();
        let without = growth_table(&[sq], 6, DEFAULT_BUDGET).unwrap();
        for (a, b) in with.values.iter().zip(&without.values) {
            assert!(*a <= 2 * b);
        }
    }

    #[test]
    fn affine_examples() {
        let shift = AffineMap::parse("1|1").unwrap();
        let double = AffineMap::parse("2|0").unwrap();
        assert_eq!(affine_growth(std::slice::from_ref(&shift), 5, 100).unwrap().values, vec![1, 2, 3, 4, 5]);
        // 2x o (x+1) = (x+1)^2 o 2x, so not every word is distinct; counts
        // from enumerating the pairs (2^a, b) of x -> 2^a x + b
        assert_eq!(affine_growth(&[double.clone(), shift], 6, 1000).unwrap().values, vec![2, 6, 13, 25, 45, 78]);
        // binary expansions: all words distinct
        let odd = AffineMap::parse("2|1").unwrap();
        assert_eq!(affine_growth(&[double, odd], 6, 1000).unwrap().values, vec![2, 6, 14, 30, 62, 126]);
        let id = AffineMap::parse("1,0;0,1|0,0").unwrap();
        assert_eq!(affine_growth(&[id], 4, 100).unwrap().values, vec![1, 1, 1, 1]);
        assert!(AffineMap::parse("1,1;1,1|0,0").is_err());
        assert!(AffineMap::parse("1,2|0").is_err());
    }

    #[test]
    fn csv_has_convention_header() {
        let t = growth_table(&[poly(&[0, 0, 1])], 2, 10).unwrap();
        assert_eq!(t.to_csv(), format!("# {IDENTITY_CONVENTION}\nn,d_S(n)\n1,1\n2,2\n"));
    }
}
