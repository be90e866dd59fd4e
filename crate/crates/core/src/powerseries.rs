//! Truncated power series `sum c_i X^i + O(X^{N+1})` over an exact field.
//!
//! Every operation reports the precision it can actually prove; results are
//! never padded past what the inputs determine.

use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::kummer::{Kummer, KummerError, KummerExtension};
use crate::poly::Poly;
use crate::ratfun::{ProjPoint, RatFun};
use crate::scalar::FieldElem;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("inner series has a nonzero constant term")]
    NonzeroConstantTerm,
    #[error("series is not compositionally invertible (needs c0 = 0 and c1 != 0)")]
    NotInvertible,
    #[error("the required root of {0} is not available")]
    RootUnavailable(String),
    #[error("field characteristic divides the local degree {0}")]
    CharacteristicDividesDegree(usize),
    #[error("point is not fixed by the map")]
    NotFixed,
    #[error("lowest positive-degree term has degree {0}; need at least 2")]
    NotSuperattracting(usize),
    #[error("input precision {0} is too low")]
    PrecisionTooLow(usize),
    #[error("recomposition check failed")]
    VerificationFailed,
    #[error(transparent)]
    Kummer(#[from] KummerError),
}

/// A series known modulo `X^{prec+1}`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Series<K: FieldElem> {
    coeffs: Vec<K>,
    prec: usize,
    ctx: K::Ctx,
}

impl<K: FieldElem> Series<K> {
    /// Truncates or zero-pads `coeffs` to exactly `prec + 1` entries.
    pub fn new(mut coeffs: Vec<K>, prec: usize, ctx: K::Ctx) -> Self {
        coeffs.resize(prec + 1, K::zero_in(&ctx));
        Series { coeffs, prec, ctx }
    }

    pub fn from_poly(p: &Poly<K>, prec: usize) -> Self {
        Self::new(p.coeffs().to_vec(), prec, p.ctx().clone())
    }

    pub fn zero(prec: usize, ctx: &K::Ctx) -> Self {
        Self::new(Vec::new(), prec, ctx.clone())
    }

    pub fn x(prec: usize, ctx: &K::Ctx) -> Self {
        Self::monomial(K::one_in(ctx), 1, prec)
    }

    pub fn monomial(c: K, deg: usize, prec: usize) -> Self {
        let ctx = c.ctx();
        let mut coeffs = vec![K::zero_in(&ctx); deg + 1];
        coeffs[deg] = c;
        Self::new(coeffs, prec, ctx)
    }

    pub fn prec(&self) -> usize {
        self.prec
    }

    pub fn coeffs(&self) -> &[K] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> K {
        self.coeffs.get(i).cloned().unwrap_or_else(|| K::zero_in(&self.ctx))
    }

    pub fn ctx(&self) -> &K::Ctx {
        &self.ctx
    }

    /// Index of the first nonzero coefficient, if any within precision.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Index of the first nonzero coefficient of positive degree.
    pub fn lowest_positive_term(&self) -> Option<usize> {
        self.coeffs.iter().skip(1).position(|c| !c.is_zero()).map(|i| i + 1)
    }

    pub fn truncate(&self, prec: usize) -> Self {
        assert!(prec <= self.prec, "cannot raise precision by truncation");
        Self::new(self.coeffs.clone(), prec, self.ctx.clone())
    }

    fn val_or_past(&self) -> usize {
        self.valuation().unwrap_or(self.prec + 1)
    }

    pub fn add(&self, other: &Self) -> Self {
        let prec = self.prec.min(other.prec);
        let coeffs = (0..=prec).map(|i| self.coeff(i) + other.coeff(i)).collect();
        Self::new(coeffs, prec, self.ctx.clone())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| -c.clone()).collect(), self.prec, self.ctx.clone())
    }

    pub fn scale(&self, c: &K) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect(), self.prec, self.ctx.clone())
    }

    /// Product; an unknown tail of one factor is damped by the valuation of
    /// the other.
    pub fn mul(&self, other: &Self) -> Self {
        let prec = (self.prec + other.val_or_past()).min(other.prec + self.val_or_past());
        Self::new(mul_trunc(&self.coeffs, &other.coeffs, prec, &self.ctx), prec, self.ctx.clone())
    }

    /// Multiplicative inverse; requires a nonzero constant term.
    pub fn recip(&self) -> Option<Self> {
        let c0 = self.coeffs[0].inv()?;
        let mut out = vec![K::zero_in(&self.ctx); self.prec + 1];
        out[0] = c0.clone();
        for k in 1..=self.prec {
            let mut acc = K::zero_in(&self.ctx);
            for i in 1..=k {
                acc = acc + self.coeffs[i].clone() * out[k - i].clone();
            }
            out[k] = -(acc * c0.clone());
        }
        Some(Self::new(out, self.prec, self.ctx.clone()))
    }

    /// Multiplication by `X^k`.
    pub fn shift(&self, k: usize) -> Self {
        let mut coeffs = vec![K::zero_in(&self.ctx); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Self::new(coeffs, self.prec + k, self.ctx.clone())
    }

    /// `self ∘ inner`, to the largest precision the inputs determine.
    pub fn compose(&self, inner: &Self) -> Result<Self, SeriesError> {
        if !inner.coeffs[0].is_zero() {
            return Err(SeriesError::NonzeroConstantTerm);
        }
        let v = inner.val_or_past();
        let u = self.lowest_positive_term().unwrap_or(self.prec + 1);
        let prec = ((self.prec + 1) * v - 1).min(inner.prec + (u - 1) * v);
        let ctx = &self.ctx;
        // Horner on coefficients, truncated at prec
        let mut acc = vec![K::zero_in(ctx); prec + 1];
        for c in self.coeffs.iter().rev() {
            acc = mul_trunc(&acc, &inner.coeffs, prec, ctx);
            acc[0] = acc[0].clone() + c.clone();
        }
        Ok(Self::new(acc, prec, ctx.clone()))
    }

    /// Compositional inverse `M` with `M ∘ self ≡ self ∘ M ≡ X`.
    pub fn inverse(&self) -> Result<Self, SeriesError> {
        if !self.coeffs[0].is_zero() || self.prec < 1 {
            return Err(SeriesError::NotInvertible);
        }
        let l1_inv = self.coeffs[1].inv().ok_or(SeriesError::NotInvertible)?;
        let n = self.prec;
        let ctx = &self.ctx;
        // powers L^k, k = 1..n, truncated at n
        let mut powers = vec![vec![K::zero_in(ctx); n + 1]; n + 1];
        powers[1] = self.coeffs.clone();
        for k in 2..=n {
            powers[k] = mul_trunc(&powers[k - 1], &self.coeffs, n, ctx);
        }
        // M = sum m_k X^k with sum_k m_k L^k = X; triangular in k
        let mut m = vec![K::zero_in(ctx); n + 1];
        let mut lk_lead = l1_inv.clone();
        for k in 1..=n {
            let mut acc = K::zero_in(ctx);
            for (j, pw) in powers.iter().enumerate().take(k).skip(1) {
                acc = acc + m[j].clone() * pw[k].clone();
            }
            let target = if k == 1 { K::one_in(ctx) } else { K::zero_in(ctx) };
            // [L^k]_k = l1^k
            m[k] = (target - acc) * lk_lead.clone();
            lk_lead = lk_lead * l1_inv.clone();
        }
        Ok(Self::new(m, n, ctx.clone()))
    }

    /// Coefficients as display strings, for JSON output.
    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(|c| c.to_string()).collect()
    }

    /// Moves the series into a Kummer extension of its field.
    pub fn embed(&self, ext: &std::sync::Arc<KummerExtension<K>>) -> Series<Kummer<K>> {
        Series::new(self.coeffs.iter().map(|c| Kummer::embed(ext, c.clone())).collect(), self.prec, ext.clone())
    }
}

fn mul_trunc<K: FieldElem>(a: &[K], b: &[K], prec: usize, ctx: &K::Ctx) -> Vec<K> {
    let mut out = vec![K::zero_in(ctx); prec + 1];
    for (i, x) in a.iter().enumerate().take(prec + 1) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(prec + 1 - i) {
            if !y.is_zero() {
                out[i + j] = out[i + j].clone() + x.clone() * y.clone();
            }
        }
    }
    out
}

impl<K: FieldElem> fmt::Display for Series<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = Poly::new(self.coeffs.clone(), self.ctx.clone());
        let o = format!("O(X^{})", self.prec + 1);
        if p.is_zero() {
            write!(f, "{o}")
        } else {
            write!(f, "{} + {o}", p.fmt_ascending("X"))
        }
    }
}

impl<K: FieldElem> Serialize for Series<K> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

/// `Some((xi, n))` iff exactly one coefficient is nonzero within precision.
pub fn monomial_detect<K: FieldElem>(s: &Series<K>) -> Option<(K, usize)> {
    let mut nonzero = s.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero());
    let (n, xi) = nonzero.next()?;
    nonzero.next().is_none().then(|| (xi.clone(), n))
}

/// Expansion of `f` around a fixed point `alpha`, in the coordinate
/// `X = x - alpha` (or `X = 1/x` at infinity), as a series with zero
/// constant term.
pub fn local_series<K: FieldElem>(f: &RatFun<K>, alpha: &ProjPoint<K>, prec: usize) -> Result<Series<K>, SeriesError> {
    if f.evaluate(alpha) != *alpha {
        return Err(SeriesError::NotFixed);
    }
    match alpha {
        ProjPoint::Finite(a) => {
            let num = Series::from_poly(&f.num().taylor_shift(a), prec);
            let den = Series::from_poly(&f.den().taylor_shift(a), prec);
            let q = num.mul(&den.recip().ok_or(SeriesError::NotFixed)?);
            let shifted = q.sub(&Series::new(vec![a.clone()], prec, f.ctx().clone()));
            Ok(shifted)
        }
        ProjPoint::Infinity => {
            let dn = f.num().deg0();
            let dd = f.den().deg0();
            // 1/f(1/X) = X^{dn - dd} rev(den) / rev(num)
            let shift = dn - dd;
            let rden = Series::from_poly(&f.den().reversed(dd), prec);
            let rnum = Series::from_poly(&f.num().reversed(dn), prec);
            let q = rden.mul(&rnum.recip().ok_or(SeriesError::NotFixed)?);
            Ok(q.shift(shift).truncate(prec))
        }
    }
}

/// `e_f(alpha)`: degree of the lowest positive-degree term of the local
/// expansion of `f` at the fixed point `alpha`.
pub fn fixed_point_order<K: FieldElem>(f: &RatFun<K>, alpha: &ProjPoint<K>) -> Result<usize, SeriesError> {
    let prec = 2 * f.degree() + 2;
    let s = local_series(f, alpha, prec)?;
    // a nonconstant map has a nonzero positive-degree term of degree <= deg + 1
    s.lowest_positive_term().ok_or(SeriesError::NotFixed)
}

/// Solves `f(L(X)) = L(X^m)` with `L = l_1 X + ...`, `l_1^{m-1} = 1/c` for
/// `f = c X^m + ...`, over `K` itself. Returns `L` modulo `X^{N+1}`.
pub fn boettcher<K: FieldElem>(f: &Series<K>, n: usize) -> Result<Series<K>, SeriesError> {
    let (m, c) = superattracting_shape(f)?;
    let ctx = f.ctx().clone();
    let c_inv = c.inv().expect("nonzero lead");
    let l1 = c_inv.nth_root((m - 1) as u32).ok_or_else(|| SeriesError::RootUnavailable(c_inv.to_string()))?;
    solve_boettcher(f, m, l1, n)
        .and_then(|l| verify_boettcher(f, &l, m).then_some(l).ok_or(SeriesError::VerificationFailed))
        .inspect(|l| {
            debug_assert_eq!(*l.ctx(), ctx);
        })
}

/// As [`boettcher`], adjoining `(1/c)^{1/(m-1)}` through a single Kummer
/// extension when `K` does not contain it. The result lives in that
/// extension (trivial when no root had to be adjoined).
pub fn boettcher_extended<K: FieldElem>(f: &Series<K>, n: usize) -> Result<Series<Kummer<K>>, SeriesError> {
    let (m, c) = superattracting_shape(f)?;
    let c_inv = c.inv().expect("nonzero lead");
    let ext = match c_inv.nth_root((m - 1) as u32) {
        Some(_) => KummerExtension::trivial(f.ctx()),
        None => {
            let (radicand, degree) = reduce_radical(c_inv.clone(), m - 1)
                .ok_or_else(|| SeriesError::RootUnavailable(c_inv.to_string()))?;
            KummerExtension::new(radicand, degree)?
        }
    };
    let lifted = f.embed(&ext);
    let l1 = Kummer::embed(&ext, c_inv.clone())
        .nth_root((m - 1) as u32)
        .or_else(|| {
            // the generator satisfies t^(m-1) = c_inv by construction
            let t = Kummer::generator(&ext);
            (t.pow((m - 1) as u64) == Kummer::embed(&ext, c_inv.clone())).then_some(t)
        })
        .ok_or_else(|| SeriesError::RootUnavailable(c_inv.to_string()))?;
    let l = solve_boettcher(&lifted, m, l1, n)?;
    if verify_boettcher(&lifted, &l, m) {
        Ok(l)
    } else {
        Err(SeriesError::VerificationFailed)
    }
}

/// Rewrites `t^k = a` as `t^{k'} = a'` with the same solution `t` by taking
/// available `l`-th roots of `a` for primes `l | k`, until `t^{k'} - a'` is
/// irreducible. `None` when only the `-4c^4` obstruction remains.
fn reduce_radical<K: FieldElem>(mut a: K, mut k: usize) -> Option<(K, usize)> {
    loop {
        let mut reduced = false;
        let mut l = 2;
        let mut rest = k;
        while rest > 1 {
            if rest.is_multiple_of(l) {
                if let Some(r) = a.nth_root(l as u32) {
                    // t^k = r^l; any l-th root works for the chosen branch
                    a = r;
                    k /= l;
                    reduced = true;
                    break;
                }
                while rest.is_multiple_of(l) {
                    rest /= l;
                }
            }
            l += 1;
        }
        if !reduced {
            break;
        }
    }
    if k.is_multiple_of(4) {
        let four = K::from_i64(&a.ctx(), 4).inv()?;
        if (a.clone() * -four).nth_root(4).is_some() {
            return None;
        }
    }
    Some((a, k))
}

fn superattracting_shape<K: FieldElem>(f: &Series<K>) -> Result<(usize, K), SeriesError> {
    if !f.coeff(0).is_zero() {
        return Err(SeriesError::NotFixed);
    }
    let m = f.lowest_positive_term().ok_or(SeriesError::PrecisionTooLow(f.prec()))?;
    if m < 2 {
        return Err(SeriesError::NotSuperattracting(m));
    }
    let p = K::characteristic(f.ctx());
    if p != 0 && (m as u64).is_multiple_of(p) {
        return Err(SeriesError::CharacteristicDividesDegree(m));
    }
    Ok((m, f.coeff(m)))
}

fn solve_boettcher<K: FieldElem>(f: &Series<K>, m: usize, l1: K, n: usize) -> Result<Series<K>, SeriesError> {
    let ctx = f.ctx().clone();
    // l_{k+1} needs f up to degree m + k
    let n = n.min(f.prec() + 1 - m);
    if n == 0 {
        return Err(SeriesError::PrecisionTooLow(f.prec()));
    }
    let m_inv = K::from_i64(&ctx, m as i64).inv().expect("char does not divide m");
    let mut l = vec![K::zero_in(&ctx); n + 1];
    l[1] = l1;
    let top = f.truncate((m + n - 1).min(f.prec()));
    for k in 1..n {
        let partial = Series::new(l.clone(), m + k, ctx.clone());
        let fl = top.compose(&partial)?;
        let target = if (m + k).is_multiple_of(m) { l[(m + k) / m].clone() } else { K::zero_in(&ctx) };
        l[k + 1] = (target - fl.coeff(m + k)) * m_inv.clone();
    }
    Ok(Series::new(l, n, ctx))
}

/// `L^{-1} ∘ f ∘ L ≡ X^m` to the precision of `L`.
fn verify_boettcher<K: FieldElem>(f: &Series<K>, l: &Series<K>, m: usize) -> bool {
    let conj = match l.inverse().and_then(|inv| f.compose(l).and_then(|fl| inv.compose(&fl))) {
        Ok(c) => c,
        Err(_) => return false,
    };
    if conj.prec() < l.prec() {
        return false;
    }
    let one = K::one_in(f.ctx());
    conj.coeffs().iter().enumerate().all(|(i, c)| if i == m { *c == one } else { c.is_zero() })
}

/// Conjugates `g` by the Böttcher coordinate of `f`: `L^{-1} ∘ g ∘ L`.
pub fn conjugate_series<K: FieldElem>(g: &Series<K>, l: &Series<K>) -> Result<Series<K>, SeriesError> {
    l.inverse()?.compose(&g.compose(l)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Fp, PrimeModulus, Rational};

    fn q(a: i64) -> Rational {
        Rational::from_integer(a.into())
    }

    fn s(v: &[i64], prec: usize) -> Series<Rational> {
        Series::new(v.iter().map(|&a| q(a)).collect(), prec, ())
    }

    #[test]
    fn compose_examples() {
        let sq = s(&[0, 0, 1], 10);
        let inner = s(&[0, 1, 0, 1], 10);
        assert_eq!(sq.compose(&inner).unwrap().coeffs()[..7], s(&[0, 0, 1, 0, 2, 0, 1], 6).coeffs()[..]);
        let f = s(&[0, 1, 1], 8);
        assert_eq!(f.compose(&s(&[0, 1], 8)).unwrap(), f);
        let ff = f.compose(&f).unwrap();
        assert_eq!(ff.coeffs()[..5], s(&[0, 1, 2, 2, 1], 4).coeffs()[..]);
        assert!(f.compose(&s(&[1, 1], 8)).is_err());
    }

    #[test]
    fn inverse_examples() {
        let x = s(&[0, 1], 6);
        assert_eq!(x.inverse().unwrap(), x);
        let inv = s(&[0, 1, 1], 6).inverse().unwrap();
        assert_eq!(inv, s(&[0, 1, -1, 2, -5, 14, -42], 6));
        let half = Series::new(vec![q(0), Rational::new(1.into(), 2.into())], 4, ());
        assert_eq!(s(&[0, 2], 4).inverse().unwrap(), half);
        assert!(s(&[0, 0, 1], 4).inverse().is_err());
    }

    #[test]
    fn precision_is_not_overstated() {
        // truncating the inputs must not change the claimed coefficients
        let f = s(&[0, 0, 1, 3, -1, 2, 5, 1], 7);
        let g = s(&[0, 2, 1, 0, 4, 1, 1, 2], 7);
        let full = f.compose(&g).unwrap();
        let low = f.truncate(4).compose(&g.truncate(4)).unwrap();
        assert!(low.prec() <= full.prec());
        assert_eq!(low.coeffs(), &full.coeffs()[..=low.prec()]);
    }

    #[test]
    fn boettcher_examples() {
        let sq = s(&[0, 0, 1], 20);
        assert_eq!(boettcher(&sq, 12).unwrap(), s(&[0, 1], 12));
        let two_sq = s(&[0, 0, 2], 20);
        let half = Series::new(vec![q(0), Rational::new(1.into(), 2.into())], 12, ());
        assert_eq!(boettcher(&two_sq, 12).unwrap(), half);
        let cubic = s(&[0, 0, 1, 1], 20);
        let l = boettcher(&cubic, 12).unwrap();
        assert_eq!(l.prec(), 12);
        let conj = conjugate_series(&cubic, &l).unwrap();
        assert_eq!(monomial_detect(&conj), Some((q(1), 2)));
    }

    #[test]
    fn boettcher_adjoins_roots() {
        // 3 X^2: l1 = 1/3 is rational; 2 X^3: l1^2 = 1/2 needs sqrt 2
        let f = s(&[0, 0, 0, 2, 1], 20);
        assert!(matches!(boettcher(&f, 8), Err(SeriesError::RootUnavailable(_))));
        let l = boettcher_extended(&f, 8).unwrap();
        assert_eq!(l.ctx().degree(), 2);
        let t = l.coeff(1);
        assert_eq!(t.clone() * t, Kummer::embed(l.ctx(), Rational::new(1.into(), 2.into())));
    }

    #[test]
    fn characteristic_guard() {
        let p = PrimeModulus(3);
        let f = Series::new(vec![Fp::from_i64(&p, 0), Fp::from_i64(&p, 0), Fp::from_i64(&p, 0), Fp::from_i64(&p, 1)], 10, p);
        assert_eq!(boettcher(&f, 5), Err(SeriesError::CharacteristicDividesDegree(3)));
    }

    #[test]
    fn monomials() {
        assert_eq!(monomial_detect(&s(&[0, 0, 0, 1], 10)), Some((q(1), 3)));
        assert_eq!(monomial_detect(&s(&[0, 0, 0, 2], 10)), Some((q(2), 3)));
        assert_eq!(monomial_detect(&s(&[0, 0, 0, 1, 1], 10)), None);
    }

    #[test]
    fn local_expansions() {
        let sq = RatFun::from_poly(Poly::from_i64s(&[0, 0, 1], &()));
        assert_eq!(fixed_point_order(&sq, &ProjPoint::Finite(q(0))).unwrap(), 2);
        let cheb = RatFun::from_poly(Poly::from_i64s(&[-2, 0, 1], &()));
        assert_eq!(fixed_point_order(&cheb, &ProjPoint::Finite(q(2))).unwrap(), 1);
        let shifted = RatFun::from_poly(Poly::from_i64s(&[1, 0, 1], &()));
        assert_eq!(fixed_point_order(&shifted, &ProjPoint::Infinity).unwrap(), 2);
        assert_eq!(fixed_point_order(&shifted, &ProjPoint::Finite(q(0))), Err(SeriesError::NotFixed));
        // x^2 + 1 at infinity: X^2 / (1 + X^2)
        let loc = local_series(&shifted, &ProjPoint::Infinity, 6).unwrap();
        assert_eq!(loc, s(&[0, 0, 1, 0, -1, 0, 1], 6));
    }

    #[test]
    fn display_and_json() {
        let f = s(&[0, 1, -1], 3);
        assert_eq!(f.to_string(), "X - X^2 + O(X^4)");
        assert_eq!(f.to_strings(), vec!["0", "1", "-1", "0"]);
    }
}
