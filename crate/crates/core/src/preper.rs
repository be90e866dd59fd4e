//! Rational preperiodic points of polynomials over Q.
//!
//! A preperiodic point has `ĥ = 0`, so its Weil height is at most
//! `C/(d-1)`. Listing every rational point up to that height and deciding
//! each orbit exactly yields all of `Prep(f) ∩ P^1(Q)`.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Signed;
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::heights::{canonical_height_with, naive_height_int, HeightError, IntPoly, OrbitFate, OrbitTracker};
use crate::heights::{int_poly_bound, CompBound};
use crate::interval::{fmt_directed, HeightInterval};
use crate::ratfun::{ProjPoint, RatFun};
use crate::scalar::Rational;

/// Default cap on the number of candidate points tested.
pub const DEFAULT_PREP_BUDGET: usize = 4_000_000;

/// Extra orbit steps taken past the escape step when reporting a positive
/// canonical height.
const HEIGHT_LOOKAHEAD: usize = 4;

/// Why a point is or is not preperiodic.
#[derive(Clone, Debug, PartialEq)]
pub enum PrepEvidence {
    Cycle { entry: usize, period: usize },
    /// Enclosure of `ĥ_f(z)` with positive lower endpoint.
    PositiveHeight(HeightInterval),
    /// `h(f^step(z)) > C/(d-1)`.
    Escapes { step: usize },
}

pub fn is_preperiodic(f: &RatFun<Rational>, z: &ProjPoint<Rational>) -> Result<(bool, PrepEvidence), HeightError> {
    let mut t = OrbitTracker::new(f, z)?;
    match t.resolve() {
        OrbitFate::Preperiodic { entry, period } => Ok((true, PrepEvidence::Cycle { entry, period })),
        OrbitFate::Escapes { step } => {
            let h = canonical_height_with(&mut t, step + HEIGHT_LOOKAHEAD)?;
            if h.lo() > 0.0 {
                Ok((false, PrepEvidence::PositiveHeight(h)))
            } else {
                Ok((false, PrepEvidence::Escapes { step }))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PrepReport {
    pub f: RatFun<Rational>,
    /// Sorted by naive height, then denominator, then `|p|`, positive first;
    /// infinity last.
    pub points: Vec<ProjPoint<Rational>>,
    /// Every rational point with `ln max(|p|,|q|) <= bound_used` was tested.
    pub bound_used: f64,
    /// `C/(d-1)`; the search is complete when `bound_used` reaches it.
    pub bound_required: f64,
    pub complete: bool,
}

impl PrepReport {
    pub fn contains(&self, z: &ProjPoint<Rational>) -> bool {
        self.points.contains(z)
    }

    pub fn point_strings(&self) -> Vec<String> {
        self.points.iter().map(|p| p.to_string()).collect()
    }
}

impl Serialize for PrepReport {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("PrepReport", 5)?;
        st.serialize_field("f", &self.f.to_string())?;
        st.serialize_field("points", &self.point_strings())?;
        st.serialize_field("bound_used", &fmt_directed(self.bound_used, 15, true))?;
        st.serialize_field("bound_required", &fmt_directed(self.bound_required, 15, true))?;
        st.serialize_field("complete", &self.complete)?;
        st.end()
    }
}

/// Ordering used for reported point lists.
pub fn point_order(a: &ProjPoint<Rational>, b: &ProjPoint<Rational>) -> Ordering {
    match (a, b) {
        (ProjPoint::Infinity, ProjPoint::Infinity) => Ordering::Equal,
        (ProjPoint::Infinity, _) => Ordering::Greater,
        (_, ProjPoint::Infinity) => Ordering::Less,
        (ProjPoint::Finite(x), ProjPoint::Finite(y)) => naive_height_int(a)
            .cmp(&naive_height_int(b))
            .then_with(|| x.denom().cmp(y.denom()))
            .then_with(|| x.numer().abs().cmp(&y.numer().abs()))
            .then_with(|| y.numer().cmp(x.numer())),
    }
}

/// All reduced `p/q` with `max(|p|, q) = h`.
pub(crate) fn level(h: u64) -> Vec<ProjPoint<Rational>> {
    let mk = |p: i64, q: u64| ProjPoint::Finite(Rational::new(BigInt::from(p), BigInt::from(q)));
    if h == 1 {
        return vec![mk(0, 1), mk(1, 1), mk(-1, 1)];
    }
    let hi = h as i64;
    let mut out = Vec::new();
    for q in 1..h {
        if q.gcd(&h) == 1 {
            out.push(mk(hi, q));
            out.push(mk(-hi, q));
        }
    }
    for p in 1..hi {
        if p.gcd(&hi) == 1 {
            out.push(mk(p, h));
            out.push(mk(-p, h));
        }
    }
    out
}

fn search(ip: &IntPoly, bound: &CompBound, max_h: u64) -> Vec<ProjPoint<Rational>> {
    let mut candidates: Vec<ProjPoint<Rational>> = vec![ProjPoint::Infinity];
    for h in 1..=max_h {
        candidates.extend(level(h));
    }
    let mut found: Vec<ProjPoint<Rational>> = candidates
        .par_iter()
        .filter(|z| {
            let mut t = OrbitTracker::with_parts(ip.clone(), bound.clone(), z);
            matches!(t.resolve(), OrbitFate::Preperiodic { .. })
        })
        .cloned()
        .collect();
    found.sort_by(point_order);
    found
}

/// Largest `H` such that every point of naive height `<= H` fits in
/// `budget` candidates.
fn budget_cap(max_h: u64, budget: usize) -> u64 {
    let mut total = 1usize;
    for h in 1..=max_h {
        let n = if h == 1 { 3 } else { 4 * totient(h) as usize };
        if total + n > budget {
            return h - 1;
        }
        total += n;
    }
    max_h
}

fn totient(mut n: u64) -> u64 {
    let mut out = n;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            out -= out / p;
        }
        p += 1;
    }
    if n > 1 {
        out -= out / n;
    }
    out
}

pub fn rational_preperiodic_points(f: &RatFun<Rational>, bound_override: Option<f64>) -> Result<PrepReport, HeightError> {
    rational_preperiodic_points_budgeted(f, bound_override, DEFAULT_PREP_BUDGET)
}

/// Like [`rational_preperiodic_points`], testing at most `budget` candidates.
/// A bound too large for the budget is truncated and the report marked
/// incomplete.
pub fn rational_preperiodic_points_budgeted(
    f: &RatFun<Rational>,
    bound_override: Option<f64>,
    budget: usize,
) -> Result<PrepReport, HeightError> {
    let ip = IntPoly::from_ratfun(f)?;
    let cb = int_poly_bound(&ip);
    let required = cb.tail();
    let bound = bound_override.unwrap_or(required).max(0.0);
    // rounding e^bound upward only adds candidates
    let e = HeightInterval::point(bound).exp();
    let wanted = if e.hi() >= u64::MAX as f64 { u64::MAX } else { e.hi().floor() as u64 };
    let max_h = budget_cap(wanted.max(1), budget).max(1);
    let truncated = max_h < wanted;
    let bound_used = if truncated { HeightInterval::ln_f64(max_h as f64).lo() } else { bound };
    let points = search(&ip, &cb, max_h);
    Ok(PrepReport {
        f: f.clone(),
        points,
        bound_used,
        bound_required: required,
        complete: !truncated && bound >= required,
    })
}

/// A rational point preperiodic for exactly one of `f`, `g`, preferring
/// small height. `None` only means no rational witness exists within the
/// certified bounds.
pub fn prep_difference_witness(f: &RatFun<Rational>, g: &RatFun<Rational>) -> Result<Option<ProjPoint<Rational>>, HeightError> {
    Ok(prep_symmetric_difference(f, g)?.into_iter().next())
}

/// `(Prep(f) Δ Prep(g)) ∩ P^1(Q)` in report order.
pub fn prep_symmetric_difference(f: &RatFun<Rational>, g: &RatFun<Rational>) -> Result<Vec<ProjPoint<Rational>>, HeightError> {
    let pf = rational_preperiodic_points(f, None)?;
    let pg = rational_preperiodic_points(g, None)?;
    let mut out: Vec<_> = pf
        .points
        .iter()
        .filter(|z| !pg.contains(z))
        .chain(pg.points.iter().filter(|z| !pf.contains(z)))
        .cloned()
        .collect();
    out.sort_by(point_order);
    Ok(out)
}
