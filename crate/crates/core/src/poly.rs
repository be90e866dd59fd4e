//! Dense univariate polynomials over an exact field, lowest degree first.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::scalar::FieldElem;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Poly<K: FieldElem> {
    coeffs: Vec<K>,
    ctx: K::Ctx,
}

impl<K: FieldElem> Poly<K> {
    /// Builds a polynomial from coefficients (lowest degree first), trimming
    /// trailing zeros.
    pub fn new(mut coeffs: Vec<K>, ctx: K::Ctx) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs, ctx }
    }

    pub fn zero(ctx: &K::Ctx) -> Self {
        Poly { coeffs: Vec::new(), ctx: ctx.clone() }
    }

    pub fn one(ctx: &K::Ctx) -> Self {
        Self::constant(K::one_in(ctx))
    }

    pub fn constant(c: K) -> Self {
        let ctx = c.ctx();
        Self::new(vec![c], ctx)
    }

    /// The polynomial `x`.
    pub fn x(ctx: &K::Ctx) -> Self {
        Self::monomial(K::one_in(ctx), 1)
    }

    pub fn monomial(c: K, deg: usize) -> Self {
        let ctx = c.ctx();
        let mut coeffs = vec![K::zero_in(&ctx); deg + 1];
        coeffs[deg] = c;
        Self::new(coeffs, ctx)
    }

    pub fn from_i64s(vals: &[i64], ctx: &K::Ctx) -> Self {
        Self::new(vals.iter().map(|&v| K::from_i64(ctx, v)).collect(), ctx.clone())
    }

    pub fn ctx(&self) -> &K::Ctx {
        &self.ctx
    }

    pub fn coeffs(&self) -> &[K] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<K> {
        self.coeffs
    }

    /// Coefficient of `x^i` (zero past the degree).
    pub fn coeff(&self, i: usize) -> K {
        self.coeffs.get(i).cloned().unwrap_or_else(|| K::zero_in(&self.ctx))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial counted as degree 0.
    pub fn deg0(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn leading(&self) -> Option<&K> {
        self.coeffs.last()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn scale(&self, c: &K) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect(), self.ctx.clone())
    }

    pub fn make_monic(&self) -> Self {
        match self.leading() {
            Some(lc) => self.scale(&lc.inv().expect("nonzero leading coefficient")),
            None => self.clone(),
        }
    }

    pub fn eval(&self, x: &K) -> K {
        let mut acc = K::zero_in(&self.ctx);
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        acc
    }

    /// `self(other)`.
    pub fn compose(&self, other: &Self) -> Self {
        let mut acc = Self::zero(&self.ctx);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * other) + &Self::constant(c.clone());
        }
        acc
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(&self.ctx);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.clone() * K::from_i64(&self.ctx, i as i64))
            .collect();
        Self::new(coeffs, self.ctx.clone())
    }

    /// `self(x + a)`.
    pub fn taylor_shift(&self, a: &K) -> Self {
        let shift = Self::new(vec![a.clone(), K::one_in(&self.ctx)], self.ctx.clone());
        self.compose(&shift)
    }

    /// `x^d * self(1/x)`; requires `d >= deg self`.
    pub fn reversed(&self, d: usize) -> Self {
        let mut coeffs = vec![K::zero_in(&self.ctx); d + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[d - i] = c.clone();
        }
        Self::new(coeffs, self.ctx.clone())
    }

    /// Euclidean division. Panics on division by the zero polynomial.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("division by zero polynomial");
        let lc_inv = divisor.leading().and_then(|c| c.inv()).expect("field leading coefficient");
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(&self.ctx), self.clone());
        }
        let mut quot = vec![K::zero_in(&self.ctx); rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = rem[i].clone();
            if c.is_zero() {
                continue;
            }
            let q = c * lc_inv.clone();
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                let t = rem[i - dd + j].clone() - q.clone() * dc.clone();
                rem[i - dd + j] = t;
            }
            quot[i - dd] = q;
        }
        rem.truncate(dd);
        (Self::new(quot, self.ctx.clone()), Self::new(rem, self.ctx.clone()))
    }

    /// Monic gcd (zero if both are zero).
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            // keep intermediate coefficients small over Q
            a = b;
            b = r.make_monic();
        }
        a.make_monic()
    }

    /// Extended gcd: returns `(g, s, t)` with `s*self + t*other = g`, `g` monic.
    pub fn ext_gcd(&self, other: &Self) -> (Self, Self, Self) {
        let ctx = &self.ctx;
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Self::one(ctx), Self::zero(ctx));
        let (mut t0, mut t1) = (Self::zero(ctx), Self::one(ctx));
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s2 = &s0 - &(&q * &s1);
            let t2 = &t0 - &(&q * &t1);
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s2;
            t0 = t1;
            t1 = t2;
        }
        match r0.leading().and_then(|c| c.inv()) {
            Some(inv) => (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv)),
            None => (r0, s0, t0),
        }
    }

    /// Writes the polynomial in the variable `var` using `^` for powers,
    /// highest degree first.
    pub fn fmt_with(&self, var: &str) -> String {
        self.fmt_terms(var, false)
    }

    /// As [`Poly::fmt_with`], lowest degree first.
    pub fn fmt_ascending(&self, var: &str) -> String {
        self.fmt_terms(var, true)
    }

    fn fmt_terms(&self, var: &str, ascending: bool) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        let order: Vec<usize> = if ascending {
            (0..self.coeffs.len()).collect()
        } else {
            (0..self.coeffs.len()).rev().collect()
        };
        for i in order {
            let c = &self.coeffs[i];
            if c.is_zero() {
                continue;
            }
            let s = c.to_string();
            let (neg, mag) = match s.strip_prefix('-') {
                Some(m) => (true, m.to_string()),
                None => (false, s),
            };
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mag = if mag.contains('/') && i > 0 { format!("({mag})") } else { mag };
            match i {
                0 => out.push_str(&mag),
                _ => {
                    if mag != "1" {
                        out.push_str(&mag);
                        out.push('*');
                    }
                    out.push_str(var);
                    if i > 1 {
                        out.push_str(&format!("^{i}"));
                    }
                }
            }
        }
        out
    }
}

impl<K: FieldElem> fmt::Display for Poly<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fmt_with("x"))
    }
}

impl<K: FieldElem> Add for &Poly<K> {
    type Output = Poly<K>;
    fn add(self, rhs: &Poly<K>) -> Poly<K> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n)
            .map(|i| match (self.coeffs.get(i), rhs.coeffs.get(i)) {
                (Some(a), Some(b)) => a.clone() + b.clone(),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            })
            .collect();
        Poly::new(coeffs, self.ctx.clone())
    }
}

impl<K: FieldElem> Neg for &Poly<K> {
    type Output = Poly<K>;
    fn neg(self) -> Poly<K> {
        Poly::new(self.coeffs.iter().map(|c| -c.clone()).collect(), self.ctx.clone())
    }
}

impl<K: FieldElem> Sub for &Poly<K> {
    type Output = Poly<K>;
    fn sub(self, rhs: &Poly<K>) -> Poly<K> {
        self + &(-rhs)
    }
}

impl<K: FieldElem> Mul for &Poly<K> {
    type Output = Poly<K>;
    fn mul(self, rhs: &Poly<K>) -> Poly<K> {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero(&self.ctx);
        }
        let mut out = vec![K::zero_in(&self.ctx); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                let t = out[i + j].clone() + a.clone() * b.clone();
                out[i + j] = t;
            }
        }
        Poly::new(out, self.ctx.clone())
    }
}
