//! Exact scalar fields.
//!
//! Everything algebraic in this crate (polynomials, rational functions,
//! power series, affine maps) is generic over [`FieldElem`]. Elements carry
//! enough context to rebuild `0` and `1` of their own field, which is what
//! lets a prime field with a runtime modulus sit behind the same trait as
//! `BigRational`.

use std::fmt;
use std::hash::Hash;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// An element of an exact field.
pub trait FieldElem:
    Clone
    + PartialEq
    + Eq
    + Hash
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    /// Data needed to construct elements of the field (the modulus for
    /// prime fields, nothing for the rationals).
    type Ctx: Clone + PartialEq + Eq + Hash + fmt::Debug + Send + Sync + 'static;

    fn ctx(&self) -> Self::Ctx;
    fn zero_in(ctx: &Self::Ctx) -> Self;
    fn one_in(ctx: &Self::Ctx) -> Self;
    fn from_bigint(ctx: &Self::Ctx, n: &BigInt) -> Self;
    fn is_zero(&self) -> bool;
    fn inv(&self) -> Option<Self>;

    /// 0 for characteristic zero.
    fn characteristic(ctx: &Self::Ctx) -> u64;

    /// Some `n`-th root of `self` that lies in the field, if one exists and
    /// can be found. For the rationals the positive root is preferred.
    fn nth_root(&self, n: u32) -> Option<Self>;

    /// Whether `self` has finite multiplicative order.
    fn is_root_of_unity(&self) -> bool;

    /// The scalar `c` such that `(c*num, c*den)` is the canonical
    /// representative of the pair. `den` must be nonzero.
    fn canonical_scale(num: &[Self], den: &[Self], ctx: &Self::Ctx) -> Self;

    /// Human readable field name, e.g. `Q` or `F_5`.
    fn describe(ctx: &Self::Ctx) -> String;

    /// Parse a coefficient as written by `Display`.
    fn parse_in(ctx: &Self::Ctx, s: &str) -> Option<Self>;

    fn from_i64(ctx: &Self::Ctx, n: i64) -> Self {
        Self::from_bigint(ctx, &BigInt::from(n))
    }

    fn is_one(&self) -> bool {
        *self == Self::one_in(&self.ctx())
    }

    fn div(&self, rhs: &Self) -> Option<Self> {
        rhs.inv().map(|r| self.clone() * r)
    }

    fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one_in(&self.ctx());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }
}

/// The rationals.
pub type Rational = BigRational;

impl FieldElem for BigRational {
    type Ctx = ();

    fn ctx(&self) {}

    fn zero_in(_: &()) -> Self {
        BigRational::zero()
    }

    fn one_in(_: &()) -> Self {
        BigRational::one()
    }

    fn from_bigint(_: &(), n: &BigInt) -> Self {
        BigRational::from_integer(n.clone())
    }

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }

    fn characteristic(_: &()) -> u64 {
        0
    }

    fn nth_root(&self, n: u32) -> Option<Self> {
        if n == 0 {
            return None;
        }
        if n == 1 || Zero::is_zero(self) {
            return Some(self.clone());
        }
        let negative = self.is_negative();
        if negative && n.is_multiple_of(2) {
            return None;
        }
        let root_of = |v: &BigInt| -> Option<BigInt> {
            let r = v.abs().nth_root(n);
            (num_traits::pow(r.clone(), n as usize) == v.abs()).then_some(r)
        };
        let rn = root_of(self.numer())?;
        let rd = root_of(self.denom())?;
        let r = BigRational::new(rn, rd);
        Some(if negative { -r } else { r })
    }

    fn is_root_of_unity(&self) -> bool {
        self.is_integer() && self.numer().abs().is_one()
    }

    fn canonical_scale(num: &[Self], den: &[Self], _: &()) -> Self {
        let all = || num.iter().chain(den.iter()).filter(|c| !Zero::is_zero(*c));
        let lcm = all().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let content = all().fold(BigInt::zero(), |acc, c| {
            let scaled = c.numer() * (&lcm / c.denom());
            acc.gcd(&scaled)
        });
        let lead_negative = den
            .iter()
            .rev()
            .find(|c| !Zero::is_zero(*c))
            .map(|c| c.is_negative())
            .unwrap_or(false);
        let mut scale = BigRational::new(lcm, content);
        if lead_negative {
            scale = -scale;
        }
        scale
    }

    fn describe(_: &()) -> String {
        "Q".to_string()
    }

    fn parse_in(_: &(), s: &str) -> Option<Self> {
        parse_rational(s)
    }
}

/// Parse `a` or `a/b` with optional leading sign.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((a, b)) => {
            let a = BigInt::from_str(a.trim()).ok()?;
            let b = BigInt::from_str(b.trim()).ok()?;
            if b.is_zero() {
                None
            } else {
                Some(BigRational::new(a, b))
            }
        }
        None => BigInt::from_str(s).ok().map(BigRational::from_integer),
    }
}

/// Element of the prime field `F_p`, `p` below 2^63.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Fp {
    value: u64,
    p: u64,
}

impl Fp {
    pub fn new(value: u64, p: u64) -> Self {
        Fp { value: value % p, p }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    acc
}

pub(crate) fn inv_mod(a: u64, p: u64) -> Option<u64> {
    if a.is_multiple_of(p) {
        None
    } else {
        Some(pow_mod(a, p - 2, p))
    }
}

impl Add for Fp {
    type Output = Fp;
    fn add(self, rhs: Fp) -> Fp {
        debug_assert_eq!(self.p, rhs.p);
        let (s, overflow) = self.value.overflowing_add(rhs.value);
        let s = if overflow || s >= self.p { s.wrapping_sub(self.p) } else { s };
        Fp { value: s, p: self.p }
    }
}

impl Sub for Fp {
    type Output = Fp;
    fn sub(self, rhs: Fp) -> Fp {
        debug_assert_eq!(self.p, rhs.p);
        let v = if self.value >= rhs.value {
            self.value - rhs.value
        } else {
            self.p - (rhs.value - self.value)
        };
        Fp { value: v, p: self.p }
    }
}

impl Mul for Fp {
    type Output = Fp;
    fn mul(self, rhs: Fp) -> Fp {
        debug_assert_eq!(self.p, rhs.p);
        Fp { value: mul_mod(self.value, rhs.value, self.p), p: self.p }
    }
}

impl Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        let v = if self.value == 0 { 0 } else { self.p - self.value };
        Fp { value: v, p: self.p }
    }
}

/// Context for [`Fp`]: the modulus.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct PrimeModulus(pub u64);

impl FieldElem for Fp {
    type Ctx = PrimeModulus;

    fn ctx(&self) -> PrimeModulus {
        PrimeModulus(self.p)
    }

    fn zero_in(ctx: &PrimeModulus) -> Self {
        Fp { value: 0, p: ctx.0 }
    }

    fn one_in(ctx: &PrimeModulus) -> Self {
        Fp { value: 1 % ctx.0, p: ctx.0 }
    }

    fn from_bigint(ctx: &PrimeModulus, n: &BigInt) -> Self {
        let r = n.mod_floor(&BigInt::from(ctx.0));
        Fp { value: r.to_u64().expect("reduced residue fits u64"), p: ctx.0 }
    }

    fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn inv(&self) -> Option<Self> {
        inv_mod(self.value, self.p).map(|v| Fp { value: v, p: self.p })
    }

    fn characteristic(ctx: &PrimeModulus) -> u64 {
        ctx.0
    }

    fn nth_root(&self, n: u32) -> Option<Self> {
        let p = self.p;
        if n == 0 {
            return None;
        }
        if self.value == 0 || n == 1 {
            return Some(*self);
        }
        let n = n as u64;
        let g = n.gcd(&(p - 1));
        if g == 1 {
            // n is invertible modulo p - 1
            let e = inv_mod_general(n % (p - 1), p - 1)?;
            return Some(Fp { value: pow_mod(self.value, e, p), p });
        }
        if pow_mod(self.value, (p - 1) / g, p) != 1 {
            return None;
        }
        if p <= 1 << 22 {
            return (1..p)
                .map(|r| Fp { value: r, p })
                .find(|r| pow_mod(r.value, n, p) == self.value);
        }
        None
    }

    fn is_root_of_unity(&self) -> bool {
        self.value != 0
    }

    fn canonical_scale(_: &[Self], den: &[Self], ctx: &PrimeModulus) -> Self {
        den.iter()
            .rev()
            .find(|c| c.value != 0)
            .and_then(|c| c.inv())
            .unwrap_or_else(|| Fp::one_in(ctx))
    }

    fn describe(ctx: &PrimeModulus) -> String {
        format!("F_{}", ctx.0)
    }

    fn parse_in(ctx: &PrimeModulus, s: &str) -> Option<Self> {
        let q = parse_rational(s)?;
        let num = Fp::from_bigint(ctx, q.numer());
        let den = Fp::from_bigint(ctx, q.denom());
        num.div(&den)
    }
}

fn inv_mod_general(a: u64, m: u64) -> Option<u64> {
    let (a, m) = (a as i128, m as i128);
    let (mut r0, mut r1) = (m, a.rem_euclid(m));
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    (r0 == 1).then(|| t0.rem_euclid(m) as u64)
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for small in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(small) {
            return n == small;
        }
    }
    let d = (n - 1) >> (n - 1).trailing_zeros();
    let s = (n - 1).trailing_zeros();
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Runtime tag for the base field of a computation.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum Field {
    Rationals,
    PrimeField(u64),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FieldParseError {
    #[error("unknown field `{0}` (expected `q` or `fp:<prime>`)")]
    Unknown(String),
    #[error("{0} is not a prime below 2^63")]
    NotPrime(u64),
}

impl FromStr for Field {
    type Err = FieldParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().to_ascii_lowercase();
        if t == "q" || t == "qq" || t == "rationals" {
            return Ok(Field::Rationals);
        }
        if let Some(rest) = t.strip_prefix("fp:") {
            let p: u64 = rest.parse().map_err(|_| FieldParseError::Unknown(s.to_string()))?;
            if p >= 1 << 63 || !is_prime_u64(p) {
                return Err(FieldParseError::NotPrime(p));
            }
            return Ok(Field::PrimeField(p));
        }
        Err(FieldParseError::Unknown(s.to_string()))
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rationals => write!(f, "q"),
            Field::PrimeField(p) => write!(f, "fp:{p}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn rational_roots_prefer_positive() {
        assert_eq!(q(4, 9).nth_root(2), Some(q(2, 3)));
        assert_eq!(q(-8, 27).nth_root(3), Some(q(-2, 3)));
        assert_eq!(q(2, 1).nth_root(2), None);
        assert_eq!(q(-4, 1).nth_root(2), None);
    }

    #[test]
    fn roots_of_unity_in_q() {
        assert!(q(1, 1).is_root_of_unity());
        assert!(q(-1, 1).is_root_of_unity());
        assert!(!q(2, 1).is_root_of_unity());
        assert!(!q(1, 2).is_root_of_unity());
    }

    #[test]
    fn fp_arithmetic() {
        let p = PrimeModulus(7);
        let a = Fp::from_i64(&p, -1);
        assert_eq!(a.value(), 6);
        assert_eq!((a * a).value(), 1);
        assert_eq!(Fp::new(3, 7).inv().unwrap().value(), 5);
        assert_eq!(Fp::parse_in(&p, "1/2").unwrap().value(), 4);
        assert!(Fp::parse_in(&p, "1/7").is_none());
    }

    #[test]
    fn fp_roots() {
        let r = Fp::new(2, 7).nth_root(2).unwrap();
        assert_eq!((r * r).value(), 2);
        assert!(Fp::new(3, 7).nth_root(2).is_none());
        // cube roots are unique when gcd(3, p-1) = 1
        let c = Fp::new(5, 11).nth_root(3).unwrap();
        assert_eq!((c * c * c).value(), 5);
    }

    #[test]
    fn miller_rabin() {
        assert!(is_prime_u64(2));
        assert!(is_prime_u64((1 << 61) - 1));
        assert!(!is_prime_u64(561));
        assert!(!is_prime_u64(1));
    }

    #[test]
    fn field_tags() {
        assert_eq!("q".parse::<Field>().unwrap(), Field::Rationals);
        assert_eq!("fp:3".parse::<Field>().unwrap(), Field::PrimeField(3));
        assert!("fp:4".parse::<Field>().is_err());
        assert!("zz".parse::<Field>().is_err());
    }
}
