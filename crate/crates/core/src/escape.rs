//! Escape rate `G_f(z) = lim log+|f^n(z)| / d^n` of a complex polynomial.
//!
//! The orbit is iterated in the float type `F` with a certified error radius.
//! Once the orbit provably sits in the region where the leading term
//! dominates, the computation continues on `ln|w|` with interval arithmetic,
//! which does not lose precision however large the orbit gets.
//!
//! Results are advisory: the bound here is derived from float coefficients
//! and is reported as [`BoundKind::ComplexNumeric`](crate::heights::BoundKind).

use num_complex::Complex;
use num_traits::Float;
use thiserror::Error;

use crate::heights::{BoundKind, CompBound};
use crate::interval::{round_down, round_up, HeightInterval};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EscapeError {
    #[error("need a polynomial of degree at least 2 with finite coefficients")]
    UnsupportedMap,
    #[error("starting point is not finite")]
    NonFinitePoint,
    #[error("float noise exceeded the escape radius at step {step}; best interval {best}")]
    PrecisionExhausted { step: usize, best: HeightInterval },
    #[error("precision of {0} bits is not available (at most 53)")]
    UnsupportedPrecision(u32),
}

fn f64_of<F: Float>(x: F) -> f64 {
    x.to_f64().expect("float converts to f64")
}

/// Degree and the absolute values needed by the bounds, all as `f64`.
struct Shape {
    d: usize,
    abs: Vec<f64>,
    lead: f64,
    /// `sum_{i<d} |a_i| / |a_d|`, rounded up.
    s: f64,
}

impl Shape {
    fn new<F: Float>(coeffs: &[Complex<F>]) -> Result<Self, EscapeError> {
        let mut abs: Vec<f64> = coeffs.iter().map(|c| f64_of(c.norm())).collect();
        while abs.last() == Some(&0.0) {
            abs.pop();
        }
        if abs.len() < 3 || abs.iter().any(|a| !a.is_finite()) {
            return Err(EscapeError::UnsupportedMap);
        }
        // norms are correctly rounded to within an ulp or two
        let abs: Vec<f64> = abs.into_iter().map(round_up).collect();
        let d = abs.len() - 1;
        let lead = round_down(round_down(abs[d]));
        let lower: f64 = abs[..d].iter().fold(0.0, |acc, a| round_up(acc + a));
        Ok(Shape { d, s: round_up(lower / lead), lead, abs })
    }

    /// `ln|a_d|`, enclosed.
    fn ln_lead(&self) -> HeightInterval {
        HeightInterval::new(round_down(self.lead.ln()), round_up(round_up(self.abs[self.d]).ln()))
    }

    /// `C_inf` with `|log+|f(w)| - d log+|w|| <= C_inf` for all complex `w`.
    fn bound(&self) -> f64 {
        let df = self.d as f64;
        let total: f64 = self.abs.iter().fold(0.0, |acc, a| round_up(acc + a));
        let upper = if total > 1.0 { round_up(total.ln()) } else { 0.0 };
        let rho = round_up(2.0 * round_up(1.0 + self.s));
        let inner = round_up(df * round_up(rho.ln()));
        let outer = round_up(HeightInterval::ln2().hi() - self.ln_lead().lo());
        upper.max(inner).max(outer).max(0.0)
    }

    /// `ln|w|` beyond which the leading term dominates and the orbit grows.
    fn log_threshold(&self) -> f64 {
        let escape = if self.s > 0.0 { round_up(HeightInterval::ln2().hi() + round_up(self.s.ln())) } else { 0.0 };
        let growth = round_up((HeightInterval::ln2().hi() - self.ln_lead().lo()) / (self.d as f64 - 1.0));
        escape.max(growth).max(0.0)
    }

    fn escape_radius(&self) -> f64 {
        round_up(2.0 * round_up(1.0 + self.s))
    }
}

/// Numeric composition bound for a complex polynomial.
pub fn complex_composition_bound<F: Float>(coeffs: &[Complex<F>]) -> Result<CompBound, EscapeError> {
    let shape = Shape::new(coeffs)?;
    Ok(CompBound { value: shape.bound(), degree: shape.d as u64, kind: BoundKind::ComplexNumeric })
}

/// Horner evaluation in `F`.
fn horner<F: Float>(coeffs: &[Complex<F>], w: Complex<F>) -> Complex<F> {
    coeffs.iter().rev().fold(Complex::new(F::zero(), F::zero()), |acc, c| acc * w + c)
}

/// Encloses `G_f(z)` after `n` iterations, computing in `F`.
pub fn escape_rate_complex<F: Float>(coeffs: &[Complex<F>], z: Complex<F>, n: usize) -> Result<HeightInterval, EscapeError> {
    let shape = Shape::new(coeffs)?;
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(EscapeError::NonFinitePoint);
    }
    let d = shape.d;
    let df = d as f64;
    let tail = round_up(shape.bound() / (df - 1.0));
    let eps = f64_of(F::epsilon());
    // relative Horner error for degree d, with slack for the complex products
    let gamma = round_up(4.0 * (2 * d + 2) as f64 * eps / (1.0 - 4.0 * (2 * d + 2) as f64 * eps));
    let threshold = shape.log_threshold();
    let radius_cap = shape.escape_radius();

    let mut w = z;
    let mut r = 0.0f64;
    let mut best = HeightInterval::new(0.0, f64::MAX / 4.0);
    for k in 0..=n {
        let m = f64_of(w.norm());
        let lo_abs = round_down(m * (1.0 - 2.0 * eps) - r);
        // switch once the dominance error is below float noise, or before
        // the float iteration could overflow
        let dominant = lo_abs > 0.0 && round_down(lo_abs.ln()) > threshold;
        let negligible = shape.s / lo_abs <= eps;
        let near_overflow = m.ln() * df > 0.5 * f64_of(F::max_value()).ln();
        if dominant && (negligible || near_overflow) {
            let start = HeightInterval::new(round_down(lo_abs.ln()), round_up(round_up(m * (1.0 + 2.0 * eps) + r).ln()));
            return Ok(escaped(&shape, start, k, n, tail));
        }
        // bounded so far: 0 <= G <= (log+|w_k| + tail) / d^k
        let hi_abs = round_up(m * (1.0 + 2.0 * eps) + r);
        let log_plus = if hi_abs > 1.0 { round_up(hi_abs.ln()) } else { 0.0 };
        let candidate = HeightInterval::new(0.0, HeightInterval::point(round_up(log_plus + tail)).div(df.powi(k as i32)).hi());
        if candidate.hi() < best.hi() {
            best = candidate;
        }
        if k == n {
            return Ok(best);
        }
        // propagate: |f(w + e) - f(w)| <= sum |a_i| ((m + r)^i - m^i)
        let mut spread = 0.0;
        let mut magnitude = 0.0;
        let (mut pr, mut pm) = (1.0f64, 1.0f64);
        for a in &shape.abs {
            spread = round_up(spread + round_up(a * round_up(pr - round_down(pm))));
            magnitude = round_up(magnitude + round_up(a * pm));
            pr = round_up(pr * round_up(m + r));
            pm = round_up(pm * m);
        }
        r = round_up(spread + round_up(gamma * magnitude));
        w = horner(coeffs, w);
        let scale_now = f64_of(w.norm()) / 2.0;
        if !r.is_finite() || r > radius_cap.max(scale_now) || !w.re.is_finite() || !w.im.is_finite() {
            return Err(EscapeError::PrecisionExhausted { step: k + 1, best });
        }
    }
    Ok(best)
}

/// Log-domain continuation from step `k` to step `n` for an escaped orbit.
fn escaped(shape: &Shape, mut log_abs: HeightInterval, k: usize, n: usize, tail: f64) -> HeightInterval {
    let df = shape.d as f64;
    let ln_lead = shape.ln_lead();
    for _ in k..n {
        let u = round_up(shape.s * round_up((-log_abs.lo()).exp()));
        debug_assert!(u < 0.5, "escape regime is forward invariant");
        let err = HeightInterval::new(round_down(round_down((-u).ln_1p())), u);
        log_abs = ln_lead.add(&log_abs.scale(df)).add(&err);
    }
    let scale = df.powi(n as i32);
    log_abs.div(scale).widen(HeightInterval::point(tail).div(scale).hi()).clamp_below(0.0)
}

/// Escape rate with the working precision chosen from `prec` bits: `f32`
/// up to 24 bits, `f64` up to 53.
pub fn escape_rate_with_precision(
    coeffs: &[Complex<f64>],
    z: Complex<f64>,
    n: usize,
    prec: u32,
) -> Result<HeightInterval, EscapeError> {
    match prec {
        0..=24 => {
            let narrow: Vec<Complex<f32>> = coeffs.iter().map(|c| Complex::new(c.re as f32, c.im as f32)).collect();
            escape_rate_complex(&narrow, Complex::new(z.re as f32, z.im as f32), n)
        }
        25..=53 => escape_rate_complex(coeffs, z, n),
        _ => Err(EscapeError::UnsupportedPrecision(prec)),
    }
}
