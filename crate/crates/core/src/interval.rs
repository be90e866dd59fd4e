//! Closed real intervals with outward-rounded `f64` endpoints.
//!
//! Every operation widens its result by a couple of ulps on each side, which
//! covers the rounding of the basic operations and of `ln`/`exp` (assumed
//! accurate to within one ulp, as for every mainstream libm).

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Serialize, Serializer};

/// Decimal digits after the point in serialized interval endpoints.
pub const DECIMAL_DIGITS: usize = 15;

#[derive(Clone, Copy, PartialEq, Debug)]
pub struct HeightInterval {
    lo: f64,
    hi: f64,
}

fn down(x: f64) -> f64 {
    if x == 0.0 {
        // keep exact zero exact on one side only
        -f64::from_bits(1)
    } else {
        x.next_down().next_down()
    }
}

fn up(x: f64) -> f64 {
    if x == 0.0 {
        f64::from_bits(1)
    } else {
        x.next_up().next_up()
    }
}

impl HeightInterval {
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "empty interval [{lo}, {hi}]");
        assert!(lo.is_finite() && hi.is_finite(), "non-finite interval endpoint");
        HeightInterval { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Self::new(x, x)
    }

    pub fn zero() -> Self {
        Self::point(0.0)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        self.lo + (self.hi - self.lo) / 2.0
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_interval(&self, other: &Self) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn overlaps(&self, other: &Self) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// A lower bound for the distance between the two intervals; zero when
    /// they overlap.
    pub fn gap(&self, other: &Self) -> f64 {
        let g = if self.hi < other.lo {
            other.lo - self.hi
        } else if other.hi < self.lo {
            self.lo - other.hi
        } else {
            return 0.0;
        };
        down(g).max(0.0)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(down(self.lo + other.lo), up(self.hi + other.hi))
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(down(self.lo - other.hi), up(self.hi - other.lo))
    }

    /// `[lo - r, hi + r]`.
    pub fn widen(&self, r: f64) -> Self {
        debug_assert!(r >= 0.0);
        Self::new(down(self.lo - r), up(self.hi + r))
    }

    /// Multiplication by a nonnegative scalar.
    pub fn scale(&self, c: f64) -> Self {
        debug_assert!(c >= 0.0);
        let (a, b) = (self.lo * c, self.hi * c);
        if c.fract() == 0.0 && c.log2().fract() == 0.0 {
            Self::new(a, b)
        } else {
            Self::new(down(a), up(b))
        }
    }

    /// Division by a positive scalar.
    pub fn div(&self, c: f64) -> Self {
        debug_assert!(c > 0.0);
        let (a, b) = (self.lo / c, self.hi / c);
        if c.log2().fract() == 0.0 {
            Self::new(a, b)
        } else {
            Self::new(down(a), up(b))
        }
    }

    /// Intersection with `[floor, +inf)`, for quantities known to be at least
    /// `floor`.
    pub fn clamp_below(&self, floor: f64) -> Self {
        Self::new(self.lo.max(floor), self.hi.max(floor))
    }

    pub fn hull(&self, other: &Self) -> Self {
        Self::new(self.lo.min(other.lo), self.hi.max(other.hi))
    }

    /// Encloses `ln(n)` for `n >= 1`.
    pub fn ln_biguint(n: &BigUint) -> Self {
        assert!(!n.is_zero(), "logarithm of zero");
        let bits = n.bits();
        if bits <= 53 {
            let x = n.to_f64().expect("fits");
            if x == 1.0 {
                return Self::zero();
            }
            return Self::new(down(x.ln()), up(x.ln()));
        }
        let shift = bits - 53;
        let m = (n >> shift).to_f64().expect("53-bit mantissa");
        let e = shift as f64;
        let ln2 = Self::ln2();
        let lo = down(down(m.ln()) + down(e * ln2.lo));
        let hi = up(up((m + 1.0).ln()) + up(e * ln2.hi));
        Self::new(lo, hi)
    }

    pub fn ln_bigint_abs(n: &BigInt) -> Self {
        Self::ln_biguint(n.magnitude())
    }

    /// Encloses `ln(x)` for a positive `f64` known exactly.
    pub fn ln_f64(x: f64) -> Self {
        assert!(x > 0.0);
        if x == 1.0 {
            return Self::zero();
        }
        let l = x.ln();
        Self::new(down(l), up(l))
    }

    pub fn ln2() -> Self {
        Self::new(std::f64::consts::LN_2.next_down(), std::f64::consts::LN_2.next_up())
    }

    /// `ln` of an interval of positive values.
    pub fn ln_of_positive(&self) -> Self {
        assert!(self.lo > 0.0, "logarithm of a nonpositive interval");
        Self::new(down(self.lo.ln()), up(self.hi.ln()))
    }

    pub fn exp(&self) -> Self {
        Self::new(down(self.lo.exp()).max(0.0), up(self.hi.exp()))
    }

    /// Endpoints as decimal strings, rounded outward.
    pub fn to_decimal_strings(&self) -> (String, String) {
        (fmt_directed(self.lo, DECIMAL_DIGITS, false), fmt_directed(self.hi, DECIMAL_DIGITS, true))
    }
}

impl fmt::Display for HeightInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (lo, hi) = self.to_decimal_strings();
        write!(f, "[{lo}, {hi}]")
    }
}

impl Serialize for HeightInterval {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let (lo, hi) = self.to_decimal_strings();
        let mut st = s.serialize_struct("HeightInterval", 2)?;
        st.serialize_field("lo", &lo)?;
        st.serialize_field("hi", &hi)?;
        st.end()
    }
}

pub(crate) fn round_up(x: f64) -> f64 {
    up(x)
}

pub(crate) fn round_down(x: f64) -> f64 {
    down(x)
}

/// Formats `x` with `digits` decimals, rounding toward +inf when `upward`
/// and toward -inf otherwise. The comparison is exact.
pub fn fmt_directed(x: f64, digits: usize, upward: bool) -> String {
    let s = format!("{x:.digits$}");
    let exact = BigRational::from_float(x).expect("finite");
    let dec = decimal_to_rational(&s);
    let off = (upward && dec < exact) || (!upward && dec > exact);
    if !off {
        return s;
    }
    let unit = BigRational::new(BigInt::from(1), num_traits::pow(BigInt::from(10), digits));
    let adjusted = if upward { dec + unit } else { dec - unit };
    rational_to_decimal(&adjusted, digits)
}

fn decimal_to_rational(s: &str) -> BigRational {
    let neg = s.starts_with('-');
    let t = s.trim_start_matches('-');
    let (int, frac) = t.split_once('.').unwrap_or((t, ""));
    let digits: BigInt = format!("{int}{frac}").parse().expect("decimal digits");
    let r = BigRational::new(digits, num_traits::pow(BigInt::from(10), frac.len()));
    if neg {
        -r
    } else {
        r
    }
}

fn rational_to_decimal(r: &BigRational, digits: usize) -> String {
    // r is an exact multiple of 10^-digits
    let scaled = (r * BigRational::from_integer(num_traits::pow(BigInt::from(10), digits))).to_integer();
    let neg = scaled < BigInt::zero();
    let mag = scaled.magnitude().to_string();
    let mag = format!("{mag:0>width$}", width = digits + 1);
    let (int, frac) = mag.split_at(mag.len() - digits);
    format!("{}{int}.{frac}", if neg { "-" } else { "" })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_encloses() {
        let n = BigUint::from(3u32);
        assert!(HeightInterval::ln_biguint(&n).contains(3f64.ln()));
        let big = BigUint::from(2u32).pow(1000);
        let iv = HeightInterval::ln_biguint(&big);
        assert!(iv.contains(1000.0 * std::f64::consts::LN_2));
        assert!(iv.width() < 1e-10);
        assert_eq!(HeightInterval::ln_biguint(&BigUint::from(1u32)), HeightInterval::zero());
    }

    #[test]
    fn gap_is_lower_bound() {
        let a = HeightInterval::new(0.0, 1.0);
        let b = HeightInterval::new(1.5, 2.0);
        assert!(a.gap(&b) <= 0.5 && a.gap(&b) > 0.49);
        assert_eq!(a.gap(&HeightInterval::new(0.5, 3.0)), 0.0);
    }

    #[test]
    fn directed_decimal() {
        let third = 1.0 / 3.0;
        let lo = fmt_directed(third, 5, false);
        let hi = fmt_directed(third, 5, true);
        assert_eq!(lo, "0.33333");
        assert_eq!(hi, "0.33334");
        assert_eq!(fmt_directed(-third, 5, false), "-0.33334");
        assert_eq!(fmt_directed(0.5, 3, true), "0.500");
        assert_eq!(fmt_directed(0.0004, 3, true), "0.001");
    }
}
