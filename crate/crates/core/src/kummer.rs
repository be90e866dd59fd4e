//! Simple radical extensions `K(t)` with `t^k = a`.
//!
//! Only one layer is supported: a `Kummer<Kummer<K>>` is representable but
//! never produced by this crate, since roots of non-base elements are
//! reported as unavailable.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use thiserror::Error;

use crate::poly::Poly;
use crate::scalar::FieldElem;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KummerError {
    #[error("radicand must be nonzero")]
    ZeroRadicand,
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("t^{degree} - ({radicand}) is reducible, so the quotient is not a field")]
    Reducible { degree: usize, radicand: String },
}

/// The field `base[t] / (t^k - a)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct KummerExtension<K: FieldElem> {
    base: K::Ctx,
    degree: usize,
    radicand: K,
}

impl<K: FieldElem> KummerExtension<K> {
    /// Builds the extension, rejecting reducible `t^k - a` (Capelli's
    /// criterion: `a` is not an `l`-th power for primes `l | k`, and not in
    /// `-4 K^4` when `4 | k`).
    pub fn new(radicand: K, degree: usize) -> Result<Arc<Self>, KummerError> {
        if degree == 0 {
            return Err(KummerError::ZeroDegree);
        }
        if radicand.is_zero() {
            return Err(KummerError::ZeroRadicand);
        }
        let reducible = || KummerError::Reducible { degree, radicand: radicand.to_string() };
        let mut k = degree;
        let mut l = 2;
        while k > 1 {
            if k.is_multiple_of(l) {
                if radicand.nth_root(l as u32).is_some() {
                    return Err(reducible());
                }
                while k.is_multiple_of(l) {
                    k /= l;
                }
            }
            l += 1;
        }
        if degree.is_multiple_of(4) {
            let ctx = radicand.ctx();
            let minus_quarter = -(K::from_i64(&ctx, 4).inv().expect("char != 2 for 4 | k"));
            if (radicand.clone() * minus_quarter).nth_root(4).is_some() {
                return Err(reducible());
            }
        }
        Ok(Arc::new(KummerExtension { base: radicand.ctx(), degree, radicand }))
    }

    /// The degree-one extension, isomorphic to the base field.
    pub fn trivial(ctx: &K::Ctx) -> Arc<Self> {
        Arc::new(KummerExtension { base: ctx.clone(), degree: 1, radicand: K::one_in(ctx) })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn radicand(&self) -> &K {
        &self.radicand
    }

    pub fn base(&self) -> &K::Ctx {
        &self.base
    }
}

/// Element of a [`KummerExtension`]: a polynomial in `t` of degree below `k`.
#[derive(Clone, Debug)]
pub struct Kummer<K: FieldElem> {
    coeffs: Vec<K>,
    ext: Arc<KummerExtension<K>>,
}

impl<K: FieldElem> PartialEq for Kummer<K> {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && *self.ext == *other.ext
    }
}

impl<K: FieldElem> Eq for Kummer<K> {}

impl<K: FieldElem> Hash for Kummer<K> {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

impl<K: FieldElem> Kummer<K> {
    pub fn embed(ext: &Arc<KummerExtension<K>>, c: K) -> Self {
        let mut coeffs = vec![K::zero_in(&ext.base); ext.degree];
        coeffs[0] = c;
        Kummer { coeffs, ext: ext.clone() }
    }

    /// The generator `t` (equal to the radicand when `k = 1`).
    pub fn generator(ext: &Arc<KummerExtension<K>>) -> Self {
        if ext.degree == 1 {
            return Self::embed(ext, ext.radicand.clone());
        }
        let mut coeffs = vec![K::zero_in(&ext.base); ext.degree];
        coeffs[1] = K::one_in(&ext.base);
        Kummer { coeffs, ext: ext.clone() }
    }

    pub fn extension(&self) -> &Arc<KummerExtension<K>> {
        &self.ext
    }

    /// Coordinates in the basis `1, t, ..., t^{k-1}`.
    pub fn coords(&self) -> &[K] {
        &self.coeffs
    }

    /// The element as a base-field scalar, if it lies in the base field.
    pub fn to_base(&self) -> Option<K> {
        self.coeffs[1..].iter().all(|c| c.is_zero()).then(|| self.coeffs[0].clone())
    }

    fn as_poly(&self) -> Poly<K> {
        Poly::new(self.coeffs.clone(), self.ext.base.clone())
    }

    fn from_poly(ext: &Arc<KummerExtension<K>>, p: &Poly<K>) -> Self {
        let k = ext.degree;
        let mut coeffs = vec![K::zero_in(&ext.base); k];
        let mut factor = K::one_in(&ext.base);
        for (chunk_index, chunk) in p.coeffs().chunks(k).enumerate() {
            if chunk_index > 0 {
                factor = factor * ext.radicand.clone();
            }
            for (i, c) in chunk.iter().enumerate() {
                let t = coeffs[i].clone() + c.clone() * factor.clone();
                coeffs[i] = t;
            }
        }
        Kummer { coeffs, ext: ext.clone() }
    }

    fn modulus(&self) -> Poly<K> {
        let base = &self.ext.base;
        let mut m = vec![K::zero_in(base); self.ext.degree + 1];
        m[0] = -self.ext.radicand.clone();
        m[self.ext.degree] = K::one_in(base);
        Poly::new(m, base.clone())
    }
}

impl<K: FieldElem> fmt::Display for Kummer<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.as_poly();
        if p.degree().unwrap_or(0) == 0 {
            write!(f, "{}", p.coeff(0))
        } else {
            write!(f, "({})", p.fmt_with("t"))
        }
    }
}

impl<K: FieldElem> Add for Kummer<K> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let coeffs = self.coeffs.into_iter().zip(rhs.coeffs).map(|(a, b)| a + b).collect();
        Kummer { coeffs, ext: self.ext }
    }
}

impl<K: FieldElem> Sub for Kummer<K> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let coeffs = self.coeffs.into_iter().zip(rhs.coeffs).map(|(a, b)| a - b).collect();
        Kummer { coeffs, ext: self.ext }
    }
}

impl<K: FieldElem> Neg for Kummer<K> {
    type Output = Self;
    fn neg(self) -> Self {
        Kummer { coeffs: self.coeffs.into_iter().map(|a| -a).collect(), ext: self.ext }
    }
}

impl<K: FieldElem> Mul for Kummer<K> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let prod = &self.as_poly() * &rhs.as_poly();
        Self::from_poly(&self.ext, &prod)
    }
}

impl<K: FieldElem> FieldElem for Kummer<K> {
    type Ctx = Arc<KummerExtension<K>>;

    fn ctx(&self) -> Self::Ctx {
        self.ext.clone()
    }

    fn zero_in(ctx: &Self::Ctx) -> Self {
        Self::embed(ctx, K::zero_in(&ctx.base))
    }

    fn one_in(ctx: &Self::Ctx) -> Self {
        Self::embed(ctx, K::one_in(&ctx.base))
    }

    fn from_bigint(ctx: &Self::Ctx, n: &BigInt) -> Self {
        Self::embed(ctx, K::from_bigint(&ctx.base, n))
    }

    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let (g, s, _) = self.as_poly().ext_gcd(&self.modulus());
        (g.degree() == Some(0)).then(|| Self::from_poly(&self.ext, &s))
    }

    fn characteristic(ctx: &Self::Ctx) -> u64 {
        K::characteristic(&ctx.base)
    }

    fn nth_root(&self, n: u32) -> Option<Self> {
        if let Some(b) = self.to_base() {
            if let Some(r) = b.nth_root(n) {
                return Some(Self::embed(&self.ext, r));
            }
            if n as usize == self.ext.degree && b == self.ext.radicand {
                return Some(Self::generator(&self.ext));
            }
        }
        None
    }

    fn is_root_of_unity(&self) -> bool {
        if self.is_zero() {
            return false;
        }
        if K::characteristic(&self.ext.base) != 0 {
            // finite field
            return true;
        }
        // phi(r) <= k forces r <= 2 k^2
        let bound = 2 * self.ext.degree * self.ext.degree;
        let one = Self::one_in(&self.ext);
        let mut acc = self.clone();
        for _ in 0..bound.max(2) {
            if acc == one {
                return true;
            }
            acc = acc * self.clone();
        }
        false
    }

    fn canonical_scale(_: &[Self], den: &[Self], ctx: &Self::Ctx) -> Self {
        den.iter()
            .rev()
            .find(|c| !c.is_zero())
            .and_then(|c| c.inv())
            .unwrap_or_else(|| Self::one_in(ctx))
    }

    fn describe(ctx: &Self::Ctx) -> String {
        if ctx.degree == 1 {
            K::describe(&ctx.base)
        } else {
            format!("{}(t), t^{} = {}", K::describe(&ctx.base), ctx.degree, ctx.radicand)
        }
    }

    fn parse_in(ctx: &Self::Ctx, s: &str) -> Option<Self> {
        if s.trim() == "t" {
            return Some(Self::generator(ctx));
        }
        K::parse_in(&ctx.base, s).map(|c| Self::embed(ctx, c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Fp, PrimeModulus, Rational};

    fn q(a: i64) -> Rational {
        Rational::from_integer(a.into())
    }

    #[test]
    fn sqrt_two_arithmetic() {
        let ext = KummerExtension::new(q(2), 2).unwrap();
        let t = Kummer::generator(&ext);
        assert_eq!(t.clone() * t.clone(), Kummer::embed(&ext, q(2)));
        let one_plus_t = Kummer::one_in(&ext) + t.clone();
        let inv = one_plus_t.inv().unwrap();
        assert!((inv * one_plus_t).is_one());
        assert_eq!(Kummer::embed(&ext, q(2)).nth_root(2), Some(t.clone()));
        assert!(!t.is_root_of_unity());
    }

    #[test]
    fn capelli_rejects_reducible() {
        assert!(KummerExtension::new(q(4), 2).is_err());
        assert!(KummerExtension::new(q(-4), 4).is_err());
        assert!(KummerExtension::new(q(8), 3).is_err());
        assert!(KummerExtension::new(q(2), 6).is_ok());
    }

    #[test]
    fn gaussian_unit_is_root_of_unity() {
        let ext = KummerExtension::new(q(-1), 2).unwrap();
        let i = Kummer::generator(&ext);
        assert!(i.is_root_of_unity());
        let one_plus_i = Kummer::one_in(&ext) + i;
        assert!(!one_plus_i.is_root_of_unity());
    }

    #[test]
    fn finite_field_extension() {
        let p = PrimeModulus(7);
        // 3 is not a square mod 7
        let ext = KummerExtension::new(Fp::new(3, 7), 2).unwrap();
        let t = Kummer::generator(&ext);
        assert_eq!(t.clone() * t.clone(), Kummer::embed(&ext, Fp::from_i64(&p, 3)));
        assert!(t.is_root_of_unity());
        assert!(KummerExtension::new(Fp::new(2, 7), 2).is_err());
    }
}
