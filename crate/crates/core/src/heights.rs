//! Weil heights on P^1(Q), certified composition bounds for polynomials over
//! Q, and canonical heights as telescoping limits with rigorous tails.
//!
//! Heights keep an exact integer core: the Weil height of a reduced `p/q` is
//! `ln max(|p|, |q|)` and the integer `max(|p|, |q|)` is available through
//! [`naive_height_int`], so equality and ordering questions never go through
//! floating point.
//!
//! Canonical heights need `h(f^n(z))` for `n` far beyond what exact orbit
//! arithmetic can reach (the numerators grow like `d^n` digits). Once the
//! exact orbit is large, the computation switches to a place-by-place
//! continuation that is exact at the finite places and interval-certified at
//! the archimedean one; see [`OrbitTracker`].

use std::collections::HashSet;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::interval::{round_down, round_up, HeightInterval};
use crate::ratfun::{ProjPoint, RatFun};
use crate::scalar::{is_prime_u64, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HeightError {
    #[error("unsupported map `{0}`: need a polynomial over Q of degree at least 2")]
    UnsupportedMap(String),
    #[error("orbit exceeded the step budget after {steps} exact steps ({bits} bits)")]
    StepBudget { steps: usize, bits: u64 },
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum BoundKind {
    ExactRational,
    ComplexNumeric,
}

/// A constant `C` with `|h(f(z)) - d h(z)| <= C` for all `z`.
#[derive(Clone, Debug, PartialEq)]
pub struct CompBound {
    /// Upper bound for `C`.
    pub value: f64,
    pub degree: u64,
    pub kind: BoundKind,
}

impl CompBound {
    /// Upper bound for `C / (d - 1)`, the tail constant of the telescoping sum.
    pub fn tail(&self) -> f64 {
        HeightInterval::point(self.value).div((self.degree - 1) as f64).hi()
    }
}

/// Soft cap (total bits of numerator and denominator) on exact orbit points
/// before the place-by-place continuation is attempted.
pub const EXACT_SOFT_BITS: u64 = 1 << 20;
/// Hard cap on exact orbit points.
pub const EXACT_HARD_BITS: u64 = 1 << 24;

/// `max(|p|, |q|)` for `z = p/q` in lowest terms; 1 for infinity.
pub fn naive_height_int(z: &ProjPoint<Rational>) -> BigUint {
    match z {
        ProjPoint::Infinity => BigUint::one(),
        ProjPoint::Finite(v) => v.numer().magnitude().max(v.denom().magnitude()).clone(),
    }
}

/// Weil height `ln max(|p|, |q|)`.
pub fn weil_height(z: &ProjPoint<Rational>) -> HeightInterval {
    HeightInterval::ln_biguint(&naive_height_int(z))
}

/// A polynomial over Q written as `(sum A_i x^i) / D` with integer `A_i`,
/// positive integer `D`, joint content 1.
#[derive(Clone, Debug)]
pub(crate) struct IntPoly {
    pub a: Vec<BigInt>,
    pub d_den: BigInt,
}

impl IntPoly {
    pub fn from_ratfun(f: &RatFun<Rational>) -> Result<Self, HeightError> {
        let unsupported = || HeightError::UnsupportedMap(f.to_string());
        if !f.is_polynomial() || f.degree() < 2 {
            return Err(unsupported());
        }
        // canonical form: integer numerator, positive constant denominator
        let a = f.num().coeffs().iter().map(|c| c.to_integer()).collect();
        let d_den = f.den().coeff(0).to_integer();
        Ok(IntPoly { a, d_den })
    }

    pub fn degree(&self) -> usize {
        self.a.len() - 1
    }

    pub fn lead(&self) -> &BigInt {
        self.a.last().expect("nonzero polynomial")
    }

    /// `f(p/q)` in lowest terms with positive denominator.
    pub fn eval_reduced(&self, p: &BigInt, q: &BigInt) -> (BigInt, BigInt) {
        let d = self.degree();
        let mut num = BigInt::zero();
        let mut qpow = BigInt::one();
        // Horner in homogeneous form: N = sum A_i p^i q^{d-i}
        let mut q_pows = Vec::with_capacity(d + 1);
        for _ in 0..=d {
            q_pows.push(qpow.clone());
            qpow *= q;
        }
        for i in (0..=d).rev() {
            num = num * p + &self.a[i] * &q_pows[d - i];
        }
        let den = &self.d_den * &q_pows[d];
        // primes of gcd(N, D q^d) divide D A_d; when q avoids them the gcd
        // divides D and the huge gcd is skipped
        let bad = (&self.d_den * self.lead()).abs();
        let g = if gcd_small(q, &bad).is_one() { gcd_small(&num, &self.d_den) } else { num.gcd(&den) };
        let (mut n, mut dd) = (num / &g, den / &g);
        if dd.is_negative() {
            n = -n;
            dd = -dd;
        }
        (n, dd)
    }
}

/// `gcd(big, small)` for positive `small`, reducing first; the binary gcd
/// is quadratic when the operands differ wildly in size.
fn gcd_small(big: &BigInt, small: &BigInt) -> BigInt {
    small.gcd(&(big % small))
}

fn ln_rational_abs(r: &BigRational) -> HeightInterval {
    HeightInterval::ln_bigint_abs(r.numer()).sub(&HeightInterval::ln_bigint_abs(r.denom()))
}

/// Certified bound for `|h(f(z)) - d h(z)|` over all of P^1(Q).
///
/// Writing `f = (sum A_i x^i)/D` and `z = p/q` reduced, `f(z) = N/(D q^d)`.
/// Upper side: `|N|, D q^d <= max(sum |A_i|, D) H(z)^d`. Lower side:
/// `gcd(N, D q^d)` divides `D A_d^d`, and either `|p| <= kappa q`, giving
/// `H(f(z)) >= q^d / A_d^d`, or `|p| > kappa q` with
/// `kappa = 2 (1 + sum_{i<d} |A_i| / |A_d|)`, giving `|N| >= |A_d| |p|^d / 2`.
pub fn composition_bound(f: &RatFun<Rational>) -> Result<CompBound, HeightError> {
    let ip = IntPoly::from_ratfun(f)?;
    Ok(int_poly_bound(&ip))
}

pub(crate) fn int_poly_bound(ip: &IntPoly) -> CompBound {
    let d = ip.degree();
    let df = d as f64;
    let lead = ip.lead().abs();
    let lower_sum: BigInt = ip.a[..d].iter().map(|c| c.abs()).sum();
    let total = &lower_sum + &lead;

    let upper = HeightInterval::ln_biguint(total.max(ip.d_den.clone()).magnitude());
    let kappa = BigRational::new(BigInt::from(2) * (&lead + &lower_sum), lead.clone());
    let ln_kappa = ln_rational_abs(&kappa);
    let ln_lead = HeightInterval::ln_bigint_abs(&lead);
    let ln_den = HeightInterval::ln_bigint_abs(&ip.d_den);

    let inner = ln_kappa.add(&ln_lead).scale(df);
    let escape = HeightInterval::ln2().add(&ln_den).add(&ln_lead.scale(df - 1.0));
    let value = upper.hi().max(inner.hi()).max(escape.hi()).max(0.0);
    CompBound { value, degree: d as u64, kind: BoundKind::ExactRational }
}

/// What an orbit does: lands in a cycle, or provably escapes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum OrbitFate {
    /// `f^entry(z)` lies on a cycle of length `period`.
    Preperiodic { entry: usize, period: usize },
    /// `h(f^step(z))` exceeds `C/(d-1)`, after which heights strictly grow.
    Escapes { step: usize },
}

type Pt = Option<(BigInt, BigInt)>;

fn pt_from(z: &ProjPoint<Rational>) -> Pt {
    z.finite().map(|v| (v.numer().clone(), v.denom().clone()))
}

fn pt_height(pt: &Pt) -> BigUint {
    match pt {
        None => BigUint::one(),
        Some((p, q)) => p.magnitude().max(q.magnitude()).clone(),
    }
}

fn pt_bits(pt: &Pt) -> u64 {
    match pt {
        None => 1,
        Some((p, q)) => p.bits() + q.bits(),
    }
}

/// Exact orbit of a point under a polynomial over Q, with cycle detection
/// and the escape criterion `h > C/(d-1)`.
pub struct OrbitTracker {
    ip: IntPoly,
    bound: CompBound,
    current: Pt,
    step: usize,
    history: Vec<Pt>,
    seen: HashSet<Pt>,
    fate: Option<OrbitFate>,
    bad_primes: Option<Option<Vec<u64>>>,
}

impl OrbitTracker {
    pub fn new(f: &RatFun<Rational>, z: &ProjPoint<Rational>) -> Result<Self, HeightError> {
        let ip = IntPoly::from_ratfun(f)?;
        let bound = int_poly_bound(&ip);
        Ok(Self::with_parts(ip, bound, z))
    }

    pub(crate) fn with_parts(ip: IntPoly, bound: CompBound, z: &ProjPoint<Rational>) -> Self {
        let mut t = OrbitTracker {
            ip,
            bound,
            current: pt_from(z),
            step: 0,
            history: Vec::new(),
            seen: HashSet::new(),
            fate: None,
            bad_primes: None,
        };
        t.record();
        t
    }

    pub fn bound(&self) -> &CompBound {
        &self.bound
    }

    pub fn fate(&self) -> Option<&OrbitFate> {
        self.fate.as_ref()
    }

    pub fn step(&self) -> usize {
        self.step
    }

    pub fn current(&self) -> ProjPoint<Rational> {
        match &self.current {
            None => ProjPoint::Infinity,
            Some((p, q)) => ProjPoint::Finite(BigRational::new(p.clone(), q.clone())),
        }
    }

    fn record(&mut self) {
        if self.fate.is_some() {
            return;
        }
        let h = HeightInterval::ln_biguint(&pt_height(&self.current));
        if h.lo() > self.bound.tail() {
            self.fate = Some(OrbitFate::Escapes { step: self.step });
            self.history.clear();
            self.seen.clear();
            return;
        }
        if self.seen.contains(&self.current) {
            let entry = self.history.iter().position(|p| *p == self.current).expect("seen");
            self.fate = Some(OrbitFate::Preperiodic { entry, period: self.step - entry });
            return;
        }
        self.seen.insert(self.current.clone());
        self.history.push(self.current.clone());
    }

    pub fn advance(&mut self) {
        self.current = match &self.current {
            None => None,
            Some((p, q)) => Some(self.ip.eval_reduced(p, q)),
        };
        self.step += 1;
        self.record();
    }

    /// Runs until the fate is known. The escape criterion always triggers
    /// for non-preperiodic points, so this terminates.
    pub fn resolve(&mut self) -> OrbitFate {
        while self.fate.is_none() {
            self.advance();
        }
        self.fate.clone().expect("resolved")
    }

    /// Encloses `h(f^n(z)) / d^n`, the truncated telescoping limit. Consumes
    /// orbit steps up to `n` (or fewer if continuation applies).
    fn scaled_height_at(&mut self, n: usize) -> Result<ScaledHeight, HeightError> {
        assert!(self.step <= n, "orbit already past step {n}");
        let df = self.ip.degree() as f64;
        loop {
            if let Some(OrbitFate::Preperiodic { .. }) = self.fate {
                return Ok(ScaledHeight::Preperiodic);
            }
            if self.step == n {
                let h = HeightInterval::ln_biguint(&pt_height(&self.current));
                return Ok(ScaledHeight::Value(h.div(df.powi(n as i32))));
            }
            let bits = pt_bits(&self.current);
            if bits > EXACT_SOFT_BITS {
                if let Some(v) = self.continue_by_places(n) {
                    return Ok(ScaledHeight::Value(v));
                }
                if bits > EXACT_HARD_BITS {
                    return Err(HeightError::StepBudget { steps: self.step, bits });
                }
            }
            self.advance();
        }
    }

    /// Extrapolates `h(f^n(z)) / d^n` from the current (large) orbit point by
    /// tracking each place separately. Returns `None` when some place is not
    /// in a regime where its behaviour is determined.
    fn continue_by_places(&mut self, n: usize) -> Option<HeightInterval> {
        if self.bad_primes.is_none() {
            self.bad_primes = Some(factor_small(&(&self.ip.d_den * self.ip.lead()).abs()));
        }
        let bad = self.bad_primes.clone().flatten()?;
        let (p, q) = self.current.as_ref()?;
        let ip = &self.ip;
        let d = ip.degree();
        let df = d as f64;
        let k = self.step;
        let remaining = n - k;
        let lead = ip.lead();

        // Finite places dividing D * A_d.
        let mut q_good = q.clone();
        let mut finite_part = HeightInterval::zero();
        for &l in &bad {
            let lb = BigInt::from(l);
            let vq = valuation(q, &lb);
            if vq > 0 {
                q_good /= num_traits::pow(lb.clone(), vq as usize);
            }
            let v_z = valuation(p, &lb) as i64 - vq as i64;
            let v_den = valuation(&ip.d_den, &lb) as i64;
            let v_lead = valuation(lead, &lb) as i64;
            if v_z >= 0 {
                if v_den > 0 {
                    return None;
                }
                continue;
            }
            // dominance of the leading term at l, and growth
            for (i, a) in ip.a[..d].iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                let v_a = valuation(a, &lb) as i64;
                if (d - i) as i64 * v_z >= v_a - v_lead {
                    return None;
                }
            }
            let v_ad = v_lead - v_den;
            if v_ad + (d as i64 - 1) * v_z >= 0 {
                return None;
            }
            // v_n = d^r v_k + v(a_d) (d^r - 1)/(d - 1)
            let dr = num_traits::pow(BigInt::from(d), remaining);
            let v_n: BigInt = &dr * BigInt::from(v_z) + BigInt::from(v_ad) * ((&dr - BigInt::one()) / BigInt::from(d - 1));
            let neg = -v_n;
            let mag = HeightInterval::ln_biguint(neg.magnitude()); // ln(-v_n)
            let ln_l = HeightInterval::ln_biguint(&BigUint::from(l));
            // (-v_n) ln l / d^n, computed in log space to avoid overflow
            let log_scaled = mag.add(&ln_l.ln_of_positive()).sub(&HeightInterval::ln_f64(df).scale(n as f64));
            finite_part = finite_part.add(&log_scaled.exp());
        }
        // Good places contribute d^r ln q_good.
        let good = if q_good.is_one() {
            HeightInterval::zero()
        } else {
            HeightInterval::ln_bigint_abs(&q_good).div(df.powi(k as i32))
        };

        // Archimedean place.
        let ln_lead_abs = HeightInterval::ln_bigint_abs(lead).sub(&HeightInterval::ln_bigint_abs(&ip.d_den));
        let lower_sum: BigInt = ip.a[..d].iter().map(|c| c.abs()).sum();
        let s_hi = round_up(round_up(lower_sum.to_f64()?) / round_down(lead.abs().to_f64()?)).max(0.0);
        let log_abs = if p.is_zero() {
            None
        } else {
            Some(HeightInterval::ln_bigint_abs(p).sub(&HeightInterval::ln_bigint_abs(q)))
        };
        let threshold = {
            let escape = if s_hi > 0.0 { HeightInterval::ln2().add(&HeightInterval::ln_f64(s_hi)).hi() } else { 0.0 };
            let growth = HeightInterval::ln2().sub(&ln_lead_abs).div(df - 1.0).hi();
            escape.max(growth).max(0.0)
        };
        let arch = match log_abs {
            Some(l) if l.lo() > threshold => escape_recursion(l, &ln_lead_abs, s_hi, d, remaining)
                .map(|l| l.div(df.powi(n as i32))),
            _ => None,
        };
        let arch = match arch {
            Some(a) => a,
            None => {
                // log+|f(z)| <= d log+|z| + log+ sum |a_i|, telescoped from step k
                let sum_abs = HeightInterval::ln_bigint_abs(&(&lower_sum + lead.abs()))
                    .sub(&HeightInterval::ln_bigint_abs(&ip.d_den))
                    .hi()
                    .max(0.0);
                let start = log_abs.map_or(0.0, |l| l.hi().max(0.0));
                let hi = HeightInterval::point(start)
                    .add(&HeightInterval::point(sum_abs).div(df - 1.0))
                    .div(df.powi(k as i32))
                    .hi();
                HeightInterval::new(0.0, hi)
            }
        };
        Some(arch.add(&good).add(&finite_part))
    }
}

/// Iterates `L -> ln|a_d| + d L + ln|1 + e|` with `|e| <= s e^{-L}`, valid
/// while the leading term dominates.
fn escape_recursion(
    mut log_abs: HeightInterval,
    ln_lead_abs: &HeightInterval,
    s_hi: f64,
    d: usize,
    steps: usize,
) -> Option<HeightInterval> {
    for _ in 0..steps {
        let u = round_up(s_hi * round_up((-log_abs.lo()).exp()));
        if u >= 0.5 {
            return None;
        }
        let err = HeightInterval::new(round_down(round_down((-u).ln_1p())), u);
        log_abs = ln_lead_abs.add(&log_abs.scale(d as f64)).add(&err);
    }
    Some(log_abs)
}

enum ScaledHeight {
    Preperiodic,
    Value(HeightInterval),
}

/// `v_l(n)` for `n != 0`; 0 for `n = 0` (callers never ask).
fn valuation(n: &BigInt, l: &BigInt) -> u64 {
    if n.is_zero() {
        return 0;
    }
    if *l == BigInt::from(2) {
        return n.trailing_zeros().unwrap_or(0);
    }
    let mut pows = vec![l.clone()];
    while (n % pows.last().unwrap()).is_zero() {
        let next = pows.last().unwrap() * pows.last().unwrap();
        if next.bits() > n.bits() + 1 {
            break;
        }
        pows.push(next);
    }
    let mut v = 0u64;
    let mut rest = n.clone();
    for (i, pw) in pows.iter().enumerate().rev() {
        if (&rest % pw).is_zero() {
            rest /= pw;
            v += 1 << i;
        }
    }
    // the loop above found one representation; finish greedily
    while (&rest % l).is_zero() {
        rest /= l;
        v += 1;
    }
    v
}

/// Prime factors of `n` by trial division; `None` if a cofactor resists.
fn factor_small(n: &BigInt) -> Option<Vec<u64>> {
    let mut rest = n.abs();
    let mut out = Vec::new();
    let mut l = 2u64;
    while l < (1 << 20) && BigInt::from(l) * BigInt::from(l) <= rest {
        let lb = BigInt::from(l);
        if (&rest % &lb).is_zero() {
            out.push(l);
            while (&rest % &lb).is_zero() {
                rest /= &lb;
            }
        }
        l += if l == 2 { 1 } else { 2 };
    }
    if rest.is_one() {
        return Some(out);
    }
    if rest.bits() <= 40 {
        // trial division reached sqrt(rest)
        out.push(rest.to_u64()?);
        return Some(out);
    }
    let r = rest.to_u64()?;
    if is_prime_u64(r) {
        out.push(r);
        Some(out)
    } else {
        None
    }
}

/// Encloses the canonical height `lim h(f^n(z))/d^n` by
/// `h(f^n(z))/d^n ± C'/d^n` with `C' = C/(d-1)`. Points whose orbit is
/// detected to cycle get the exact interval `[0, 0]`.
pub fn canonical_height(f: &RatFun<Rational>, z: &ProjPoint<Rational>, n: usize) -> Result<HeightInterval, HeightError> {
    let mut t = OrbitTracker::new(f, z)?;
    canonical_height_with(&mut t, n)
}

pub(crate) fn canonical_height_with(t: &mut OrbitTracker, n: usize) -> Result<HeightInterval, HeightError> {
    let df = t.ip.degree() as f64;
    let tail = HeightInterval::point(t.bound.tail()).div(df.powi(n as i32)).hi();
    match t.scaled_height_at(n)? {
        ScaledHeight::Preperiodic => Ok(HeightInterval::zero()),
        ScaledHeight::Value(v) => Ok(v.widen(tail)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Poly;

    fn poly(v: &[i64]) -> RatFun<Rational> {
        RatFun::from_poly(Poly::from_i64s(v, &()))
    }

    fn pt(a: i64, b: i64) -> ProjPoint<Rational> {
        ProjPoint::Finite(Rational::new(a.into(), b.into()))
    }

    #[test]
    fn weil_height_examples() {
        assert!(weil_height(&pt(2, 3)).contains(3f64.ln()));
        assert_eq!(weil_height(&ProjPoint::Infinity), HeightInterval::zero());
        assert!(weil_height(&pt(-7, 2)).contains(7f64.ln()));
    }

    #[test]
    fn composition_bound_contract() {
        assert!(composition_bound(&poly(&[-2, 0, 1])).unwrap().value >= 2f64.ln());
        assert!(composition_bound(&poly(&[0, 0, 1])).unwrap().value >= 0.0);
        let mobius = RatFun::normalize(Poly::from_i64s(&[1, 1], &()), Poly::from_i64s(&[-1, 1], &())).unwrap();
        assert!(matches!(composition_bound(&mobius), Err(HeightError::UnsupportedMap(_))));
        assert!(composition_bound(&poly(&[1, 1])).is_err());
    }

    #[test]
    fn valuations_and_factors() {
        assert_eq!(valuation(&BigInt::from(48), &BigInt::from(2)), 4);
        assert_eq!(valuation(&BigInt::from(3i64.pow(13) * 5), &BigInt::from(3)), 13);
        assert_eq!(valuation(&BigInt::from(7), &BigInt::from(3)), 0);
        assert_eq!(factor_small(&BigInt::from(360)).unwrap(), vec![2, 3, 5]);
        assert_eq!(factor_small(&BigInt::from(1)).unwrap(), Vec::<u64>::new());
    }

    #[test]
    fn orbit_fates() {
        let mut t = OrbitTracker::new(&poly(&[-2, 0, 1]), &pt(0, 1)).unwrap();
        assert_eq!(t.resolve(), OrbitFate::Preperiodic { entry: 2, period: 1 });
        let mut t = OrbitTracker::new(&poly(&[0, 0, 1]), &pt(2, 1)).unwrap();
        assert!(matches!(t.resolve(), OrbitFate::Escapes { .. }));
        let mut t = OrbitTracker::new(&poly(&[0, 0, 1]), &ProjPoint::Infinity).unwrap();
        assert_eq!(t.resolve(), OrbitFate::Preperiodic { entry: 0, period: 1 });
    }

    #[test]
    fn canonical_height_square_map() {
        let f = poly(&[0, 0, 1]);
        let iv = canonical_height(&f, &pt(2, 1), 30).unwrap();
        assert!(iv.contains(2f64.ln()));
        let c = composition_bound(&f).unwrap().value;
        assert!(iv.width() <= 2.0 * c / 2f64.powi(30) + 1e-12);
    }

    #[test]
    fn canonical_height_fixed_point_is_zero() {
        let iv = canonical_height(&poly(&[-2, 0, 1]), &pt(2, 1), 10).unwrap();
        assert!(iv.contains(0.0));
    }

    fn exact_scaled(f: &RatFun<Rational>, z: &ProjPoint<Rational>, n: usize) -> HeightInterval {
        let mut t = OrbitTracker::new(f, z).unwrap();
        for _ in 0..n {
            t.advance();
        }
        let d = f.degree() as f64;
        HeightInterval::ln_biguint(&pt_height(&t.current)).div(d.powi(n as i32))
    }

    fn continued(f: &RatFun<Rational>, z: &ProjPoint<Rational>, from: usize, n: usize) -> HeightInterval {
        let mut t = OrbitTracker::new(f, z).unwrap();
        for _ in 0..from {
            t.advance();
        }
        t.continue_by_places(n).expect("continuation applies")
    }

    #[test]
    fn continuation_in_escape_regime_is_sharp() {
        let f = poly(&[-1, 0, 1]);
        let z = pt(5, 2);
        let exact = exact_scaled(&f, &z, 12);
        let cont = continued(&f, &z, 6, 12);
        assert!(cont.overlaps(&exact), "{cont} vs {exact}");
        assert!(cont.width() < 1e-9);
    }

    #[test]
    fn continuation_with_bounded_real_orbit_encloses() {
        // 3/2 under x^2 - 1 stays in [-1, 1] after two steps
        let f = poly(&[-1, 0, 1]);
        let z = pt(3, 2);
        let exact = exact_scaled(&f, &z, 12);
        let cont = continued(&f, &z, 6, 12);
        assert!(cont.contains_interval(&exact) || cont.overlaps(&exact), "{cont} vs {exact}");
        assert!(cont.width() < 0.05);
    }

    #[test]
    fn continuation_at_bad_primes() {
        // denominator 2 makes 2 a bad prime; 1/2 has negative 2-adic valuation
        let f = RatFun::from_poly(Poly::new(vec![Rational::from_integer(1.into()), Rational::from_integer(0.into()), Rational::new(1.into(), 2.into())], ()));
        let z = pt(1, 2);
        let exact = exact_scaled(&f, &z, 12);
        let cont = continued(&f, &z, 5, 12);
        assert!(cont.overlaps(&exact), "{cont} vs {exact}");
    }
}
