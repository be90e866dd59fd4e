//! Rational functions in canonical form, viewed as self-maps of the
//! projective line.
//!
//! Canonical form over Q: integer coefficients, joint content 1, positive
//! leading coefficient in the denominator. Over F_p (and extensions) the
//! denominator is monic. In both cases numerator and denominator are coprime,
//! so structural equality is equality of maps.

use std::fmt;

use thiserror::Error;

use crate::poly::Poly;
use crate::scalar::FieldElem;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RatFunError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("operands live over different fields")]
    FieldMismatch,
    #[error("conjugating map must have degree 1, got degree {0}")]
    NotMoebius(usize),
}

/// A point of the projective line.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum ProjPoint<K: FieldElem> {
    Finite(K),
    Infinity,
}

impl<K: FieldElem> ProjPoint<K> {
    pub fn finite(&self) -> Option<&K> {
        match self {
            ProjPoint::Finite(v) => Some(v),
            ProjPoint::Infinity => None,
        }
    }

    /// Parses `p/q`, an integer, or `inf`.
    pub fn parse_in(ctx: &K::Ctx, s: &str) -> Option<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t == "∞" {
            Some(ProjPoint::Infinity)
        } else {
            K::parse_in(ctx, t).map(ProjPoint::Finite)
        }
    }
}

impl<K: FieldElem> fmt::Display for ProjPoint<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProjPoint::Finite(v) => write!(f, "{v}"),
            ProjPoint::Infinity => write!(f, "inf"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RatFun<K: FieldElem> {
    num: Poly<K>,
    den: Poly<K>,
}

impl<K: FieldElem> RatFun<K> {
    /// Reduces `num/den` to canonical form.
    pub fn normalize(num: Poly<K>, den: Poly<K>) -> Result<Self, RatFunError> {
        if den.is_zero() {
            return Err(RatFunError::ZeroDenominator);
        }
        if num.ctx() != den.ctx() {
            return Err(RatFunError::FieldMismatch);
        }
        let ctx = num.ctx().clone();
        if num.is_zero() {
            return Ok(RatFun { num, den: Poly::one(&ctx) });
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_constant() {
            (num, den)
        } else {
            (num.div_rem(&g).0, den.div_rem(&g).0)
        };
        Ok(Self::scaled(num, den))
    }

    /// Applies the canonical scaling to an already coprime pair.
    fn scaled(num: Poly<K>, den: Poly<K>) -> Self {
        let c = K::canonical_scale(num.coeffs(), den.coeffs(), num.ctx());
        RatFun { num: num.scale(&c), den: den.scale(&c) }
    }

    pub fn from_poly(p: Poly<K>) -> Self {
        let ctx = p.ctx().clone();
        Self::scaled(p, Poly::one(&ctx))
    }

    pub fn constant(c: K) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn identity(ctx: &K::Ctx) -> Self {
        Self::from_poly(Poly::x(ctx))
    }

    pub fn num(&self) -> &Poly<K> {
        &self.num
    }

    pub fn den(&self) -> &Poly<K> {
        &self.den
    }

    pub fn ctx(&self) -> &K::Ctx {
        self.num.ctx()
    }

    /// `max(deg num, deg den)`.
    pub fn degree(&self) -> usize {
        self.num.deg0().max(self.den.deg0())
    }

    pub fn is_constant(&self) -> bool {
        self.degree() == 0
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    /// The polynomial `num / den` when the denominator is constant.
    pub fn as_polynomial(&self) -> Option<Poly<K>> {
        if !self.is_polynomial() {
            return None;
        }
        let inv = self.den.coeff(0).inv()?;
        Some(self.num.scale(&inv))
    }

    /// Value of a constant map.
    pub fn constant_value(&self) -> Option<K> {
        if !self.is_constant() {
            return None;
        }
        self.num.coeff(0).div(&self.den.coeff(0))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Result<Self, RatFunError> {
        if self.ctx() != other.ctx() {
            return Err(RatFunError::FieldMismatch);
        }
        if self.is_constant() {
            return Ok(self.clone());
        }
        if let Some(c) = other.constant_value() {
            return match self.evaluate(&ProjPoint::Finite(c)) {
                ProjPoint::Finite(v) => Ok(Self::constant(v)),
                ProjPoint::Infinity => Err(RatFunError::ZeroDenominator),
            };
        }
        // Homogenized substitution: N(a/b) b^d / D(a/b) b^d. Coprimality of
        // (N, D) and (a, b) makes the result coprime, so no gcd is needed.
        let d = self.degree();
        let (a, b) = (&other.num, &other.den);
        let mut b_pows = Vec::with_capacity(d + 1);
        b_pows.push(Poly::one(self.ctx()));
        for i in 1..=d {
            let next = &b_pows[i - 1] * b;
            b_pows.push(next);
        }
        let homog = |p: &Poly<K>| {
            let mut acc = Poly::zero(p.ctx());
            for i in (0..=d).rev() {
                acc = &acc * a;
                let c = p.coeff(i);
                if !c.is_zero() {
                    acc = &acc + &b_pows[d - i].scale(&c);
                }
            }
            acc
        };
        let out = Self::scaled(homog(&self.num), homog(&self.den));
        debug_assert_eq!(out.degree(), d * other.degree());
        Ok(out)
    }

    /// `self` composed with itself `n` times (`n = 0` gives the identity).
    pub fn iterate(&self, n: u32) -> Self {
        let mut acc = Self::identity(self.ctx());
        for _ in 0..n {
            acc = self.compose(&acc).expect("same field");
        }
        acc
    }

    /// Value at a point of the projective line.
    pub fn evaluate(&self, z: &ProjPoint<K>) -> ProjPoint<K> {
        match z {
            ProjPoint::Finite(x) => {
                let d = self.den.eval(x);
                match self.num.eval(x).div(&d) {
                    Some(v) => ProjPoint::Finite(v),
                    None => ProjPoint::Infinity,
                }
            }
            ProjPoint::Infinity => {
                let (dn, dd) = (self.num.deg0(), self.den.deg0());
                if self.num.is_zero() {
                    ProjPoint::Finite(K::zero_in(self.ctx()))
                } else if dn > dd {
                    ProjPoint::Infinity
                } else if dn < dd {
                    ProjPoint::Finite(K::zero_in(self.ctx()))
                } else {
                    let ratio = self.num.leading().unwrap().div(self.den.leading().unwrap());
                    ProjPoint::Finite(ratio.expect("nonzero leading coefficient"))
                }
            }
        }
    }

    /// Formal derivative via the quotient rule.
    pub fn derivative(&self) -> Self {
        let n = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        let d = &self.den * &self.den;
        Self::normalize(n, d).expect("nonzero denominator")
    }

    /// Inverse of a degree-one map.
    pub fn moebius_inverse(&self) -> Result<Self, RatFunError> {
        if self.degree() != 1 {
            return Err(RatFunError::NotMoebius(self.degree()));
        }
        // (a x + b) / (c x + d)  ->  (d x - b) / (-c x + a)
        let (b, a) = (self.num.coeff(0), self.num.coeff(1));
        let (d, c) = (self.den.coeff(0), self.den.coeff(1));
        let ctx = self.ctx().clone();
        Self::normalize(Poly::new(vec![-b, d], ctx.clone()), Poly::new(vec![a, -c], ctx))
    }

    /// `sigma^{-1} ∘ self ∘ sigma`.
    pub fn conjugate(&self, sigma: &Self) -> Result<Self, RatFunError> {
        let inv = sigma.moebius_inverse()?;
        inv.compose(&self.compose(sigma)?)
    }

    /// Chebyshev polynomial with `T_d(z + 1/z) = z^d + z^{-d}`.
    pub fn chebyshev(d: u32, ctx: &K::Ctx) -> Self {
        let x = Poly::x(ctx);
        let mut prev = Poly::constant(K::from_i64(ctx, 2));
        let mut cur = x.clone();
        if d == 0 {
            return Self::from_poly(prev);
        }
        for _ in 1..d {
            let next = &(&x * &cur) - &prev;
            prev = cur;
            cur = next;
        }
        Self::from_poly(cur)
    }

    pub fn add(&self, other: &Self) -> Result<Self, RatFunError> {
        let n = &(&self.num * &other.den) + &(&other.num * &self.den);
        Self::normalize(n, &self.den * &other.den)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, RatFunError> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self, RatFunError> {
        Self::normalize(&self.num * &other.num, &self.den * &other.den)
    }

    pub fn div(&self, other: &Self) -> Result<Self, RatFunError> {
        Self::normalize(&self.num * &other.den, &self.den * &other.num)
    }

    pub fn neg(&self) -> Self {
        RatFun { num: -&self.num, den: self.den.clone() }
    }

    pub fn pow(&self, e: u32) -> Self {
        // coprimality survives powers
        Self::scaled(self.num.pow(e), self.den.pow(e))
    }
}

impl<K: FieldElem> fmt::Display for RatFun<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.degree() == Some(0) && self.den.coeff(0).is_one() {
            return write!(f, "{}", self.num);
        }
        let wrap = |s: String, atomic: bool| if atomic { s } else { format!("({s})") };
        let num = self.num.to_string();
        let den = self.den.to_string();
        let num_atomic = !num.contains(' ') && !num.contains('/');
        let den_atomic = den == "x" || den.chars().all(|c| c.is_ascii_digit());
        write!(f, "{}/{}", wrap(num, num_atomic), wrap(den, den_atomic))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn qp(v: &[i64]) -> Poly<Rational> {
        Poly::from_i64s(v, &())
    }

    fn rf(n: &[i64], d: &[i64]) -> RatFun<Rational> {
        RatFun::normalize(qp(n), qp(d)).unwrap()
    }

    fn q(a: i64, b: i64) -> Rational {
        Rational::new(a.into(), b.into())
    }

    #[test]
    fn normalize_examples() {
        let f = rf(&[2, 0, 2], &[0, 4]);
        assert_eq!((f.num(), f.den()), (&qp(&[1, 0, 1]), &qp(&[0, 2])));
        let f = rf(&[-1, 0, 1], &[-1, 1]);
        assert_eq!((f.num(), f.den()), (&qp(&[1, 1]), &qp(&[1])));
        let f = rf(&[0, 1], &[-2]);
        assert_eq!((f.num(), f.den()), (&qp(&[0, -1]), &qp(&[2])));
        assert_eq!(RatFun::normalize(qp(&[1]), qp(&[])), Err(RatFunError::ZeroDenominator));
    }

    #[test]
    fn rational_coefficients_are_cleared() {
        let f = RatFun::normalize(Poly::new(vec![q(1, 2), q(1, 3)], ()), qp(&[1])).unwrap();
        assert_eq!((f.num(), f.den()), (&qp(&[3, 2]), &qp(&[6])));
    }

    #[test]
    fn compose_examples() {
        assert_eq!(rf(&[0, 0, 1], &[1]).compose(&rf(&[0, 0, 0, 1], &[1])).unwrap(), rf(&[0, 0, 0, 0, 0, 0, 1], &[1]));
        let inv = rf(&[1], &[0, 1]);
        let m = rf(&[1, 1], &[-1, 1]);
        let c = inv.compose(&m).unwrap();
        assert_eq!(c, rf(&[-1, 1], &[1, 1]));
        for z in [3, 5, -7] {
            let z = ProjPoint::Finite(q(z, 1));
            assert_eq!(c.evaluate(&z), inv.evaluate(&m.evaluate(&z)));
        }
        let t2 = rf(&[-2, 0, 1], &[1]);
        assert_eq!(t2.compose(&t2).unwrap(), RatFun::chebyshev(4, &()));
    }

    #[test]
    fn compose_with_constants() {
        let f = rf(&[0, 0, 1], &[1]);
        let c = RatFun::constant(q(3, 1));
        assert_eq!(f.compose(&c).unwrap(), RatFun::constant(q(9, 1)));
        assert_eq!(c.compose(&f).unwrap(), c);
        let pole = rf(&[1], &[0, 1]);
        assert!(pole.compose(&RatFun::constant(q(0, 1))).is_err());
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(rf(&[1], &[0, 1]).evaluate(&ProjPoint::Finite(q(0, 1))), ProjPoint::Infinity);
        assert_eq!(rf(&[0, 0, 1], &[1]).evaluate(&ProjPoint::Finite(q(2, 3))), ProjPoint::Finite(q(4, 9)));
        assert_eq!(rf(&[1, 0, 1], &[-1, 1]).evaluate(&ProjPoint::Infinity), ProjPoint::Infinity);
        assert_eq!(rf(&[1, 2], &[0, 3]).evaluate(&ProjPoint::Infinity), ProjPoint::Finite(q(2, 3)));
        assert_eq!(rf(&[1], &[0, 1]).evaluate(&ProjPoint::Infinity), ProjPoint::Finite(q(0, 1)));
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(rf(&[0, 0, 1], &[1]).derivative(), rf(&[0, 2], &[1]));
        assert_eq!(rf(&[1], &[0, 1]).derivative(), rf(&[-1], &[0, 0, 1]));
        let d = rf(&[-2, 0, 1], &[1]).derivative();
        assert_eq!(d.evaluate(&ProjPoint::Finite(q(2, 1))), ProjPoint::Finite(q(4, 1)));
    }

    #[test]
    fn conjugation_examples() {
        let sq = rf(&[0, 0, 1], &[1]);
        let half = rf(&[0, 1], &[2]);
        assert_eq!(rf(&[0, 0, 2], &[1]).conjugate(&half).unwrap(), sq);
        assert_eq!(sq.conjugate(&RatFun::identity(&())).unwrap(), sq);
        assert_eq!(sq.conjugate(&rf(&[0, 2], &[1])).unwrap(), rf(&[0, 0, 2], &[1]));
        assert_eq!(sq.conjugate(&sq), Err(RatFunError::NotMoebius(2)));
        let sigma = rf(&[1, 2], &[3, 1]);
        let back = sq.conjugate(&sigma).unwrap().conjugate(&sigma.moebius_inverse().unwrap()).unwrap();
        assert_eq!(back, sq);
    }

    #[test]
    fn chebyshev_examples() {
        assert_eq!(RatFun::chebyshev(2, &()), rf(&[-2, 0, 1], &[1]));
        assert_eq!(RatFun::chebyshev(3, &()), rf(&[0, -3, 0, 1], &[1]));
        let c23 = RatFun::<Rational>::chebyshev(2, &()).compose(&RatFun::chebyshev(3, &())).unwrap();
        assert_eq!(c23, RatFun::chebyshev(6, &()));
    }

    #[test]
    fn display() {
        assert_eq!(rf(&[1, 0, 1], &[-1, 1]).to_string(), "(x^2 + 1)/(x - 1)");
        assert_eq!(rf(&[-2, 0, 1], &[1]).to_string(), "x^2 - 2");
        assert_eq!(rf(&[1, 0, 1], &[0, 2]).to_string(), "(x^2 + 1)/(2*x)");
        assert_eq!(rf(&[1, 1], &[2]).to_string(), "(x + 1)/2");
    }
}
