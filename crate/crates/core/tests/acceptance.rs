//! Acceptance suite. Each criterion prints one `PASS` or `FAIL` line and the
//! target exits nonzero if any criterion fails. Runs without the libtest
//! harness so the report is always shown:
//! `cargo test -p dynfree-core --test acceptance`.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use dynfree_core::escape::escape_rate_complex;
use dynfree_core::freeness::{
    brute_force_relation_search, freeness_certificate, jz_free_test, verify_certificate, word_inequality_check, CertOutcome,
    JzVerdict, DEFAULT_N_ITER, DEFAULT_WORD_BUDGET,
};
use dynfree_core::growth::{classify_growth, growth_table, GrowthClass, DEFAULT_BUDGET};
use dynfree_core::heights::{canonical_height, composition_bound};
use dynfree_core::poly::Poly;
use dynfree_core::powerseries::{boettcher, Series};
use dynfree_core::preper::rational_preperiodic_points;
use dynfree_core::{Fp, PointQ, PrimeModulus, ProjPoint, RatFun, RatFunFp, RatFunQ, Rational, Word};
use num_bigint::BigInt;
use num_complex::Complex;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, t: Instant) -> Result<(), String> {
    let el = t.elapsed();
    ensure(el < limit, || format!("took {el:.2?}, limit {limit:?}"))
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn poly(c: &[i64]) -> RatFunQ {
    RatFun::from_poly(Poly::from_i64s(c, &()))
}

fn poly_fp(c: &[i64], p: u64) -> RatFunFp {
    RatFun::from_poly(Poly::from_i64s(c, &PrimeModulus(p)))
}

fn at(n: i64) -> PointQ {
    ProjPoint::Finite(q(n, 1))
}

// ---------------------------------------------------------------------------
// oracles

/// `ln |n|` from the leading bits.
fn ln_abs(n: &BigInt) -> f64 {
    let n = n.abs();
    let shift = n.bits().saturating_sub(60);
    (&n >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

fn weil(z: &PointQ) -> f64 {
    match z {
        ProjPoint::Infinity => 0.0,
        ProjPoint::Finite(r) => ln_abs(r.numer()).max(ln_abs(r.denom())),
    }
}

/// `a ∘ b` modulo `X^{n+1}` by expanding powers of `b`.
fn naive_compose(a: &[Rational], b: &[Rational], n: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); n + 1];
    let mut power = vec![Rational::zero(); n + 1];
    power[0] = q(1, 1);
    for c in a.iter().take(n + 1) {
        for (o, p) in out.iter_mut().zip(&power) {
            *o += c * p;
        }
        let mut next = vec![Rational::zero(); n + 1];
        for (i, x) in power.iter().enumerate() {
            for (j, y) in b.iter().enumerate().take(n + 1 - i) {
                next[i + j] += x * y;
            }
        }
        power = next;
    }
    out
}

fn prep_set(f: &RatFunQ) -> Result<(BTreeSet<String>, bool), String> {
    let r = rational_preperiodic_points(f, None).map_err(|e| e.to_string())?;
    Ok((r.point_strings().into_iter().collect(), r.complete))
}

// ---------------------------------------------------------------------------
// criteria

fn c1_canonical_height_exactness() -> Check {
    let t = Instant::now();
    let f = poly(&[0, 0, 1]);
    let iv = canonical_height(&f, &at(2), 30).map_err(|e| e.to_string())?;
    within(Duration::from_secs(1), t)?;
    let c = composition_bound(&f).map_err(|e| e.to_string())?.value;
    let limit = 2.0 * c / 2f64.powi(30) + 1e-12;
    ensure(iv.contains(std::f64::consts::LN_2), || format!("{iv} misses log 2"))?;
    ensure(iv.width() <= limit, || format!("width {:e} > {limit:e}", iv.width()))?;
    Ok(format!("{iv}, width {:.2e} <= {limit:.2e}", iv.width()))
}

fn square_chebyshev_certificate() -> Result<dynfree_core::freeness::FreenessCertificate, String> {
    let outcome = freeness_certificate(&poly(&[0, 0, 1]), &poly(&[-2, 0, 1]), None, DEFAULT_N_ITER).map_err(|e| e.to_string())?;
    match outcome {
        CertOutcome::Certified(c) => Ok(*c),
        CertOutcome::NoWitnessFound { best_gap, .. } => Err(format!("no witness, best gap {best_gap}")),
    }
}

fn c2_end_to_end_certificate() -> Check {
    let t = Instant::now();
    let cert = square_chebyshev_certificate()?;
    ensure(cert.beta == at(2), || format!("witness {}", cert.beta))?;
    ensure(cert.eps_lo >= 0.6, || format!("eps_lo {}", cert.eps_lo))?;
    ensure(verify_certificate(&cert), || "verification failed".into())?;
    let (fj, gj) = cert.powers();
    let report = brute_force_relation_search(&[fj, gj], 6).map_err(|e| e.to_string())?;
    within(Duration::from_secs(60), t)?;
    ensure(report.distinct_count == 126, || format!("{} distinct", report.distinct_count))?;
    ensure(report.relations.is_empty(), || format!("{} relations", report.relations.len()))?;
    Ok(format!("beta = 2, eps_lo = {:.4}, j = {}, 126 distinct words", cert.eps_lo, cert.j))
}

fn c3_inequality_audit() -> Check {
    let cert = square_chebyshev_certificate()?;
    let ok = word_inequality_check(&cert, 3, DEFAULT_WORD_BUDGET).map_err(|e| e.to_string())?;
    ensure(ok, || "a·f^j(β) = b·g^j(β) for some equal-degree pair".into())?;
    Ok("all equal-degree pairs up to length 3 differ".into())
}

fn c4_negative_control() -> Check {
    let (f, g) = (poly(&[0, 0, 1]), poly(&[0, 0, 0, 1]));
    let outcome = freeness_certificate(&f, &g, None, DEFAULT_N_ITER).map_err(|e| e.to_string())?;
    ensure(matches!(outcome, CertOutcome::NoWitnessFound { .. }), || "unexpected certificate".into())?;
    let report = brute_force_relation_search(&[f, g], 2).map_err(|e| e.to_string())?;
    let commutation = (Word(vec![0, 1]), Word(vec![1, 0]));
    ensure(report.relations.contains(&commutation), || format!("relations {:?}", report.relations))?;
    Ok("NoWitnessFound; f.g = g.f".into())
}

fn c5_chebyshev_growth() -> Check {
    let gens = [RatFun::<Rational>::chebyshev(2, &()), RatFun::chebyshev(3, &())];
    let table = growth_table(&gens, 10, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    let expect: Vec<usize> = (1..=10).map(|n| n * (n + 3) / 2).collect();
    ensure(table.values == expect, || format!("{:?}", table.values))?;
    let class = classify_growth(&table.values).map_err(|e| e.to_string())?;
    match class {
        GrowthClass::Polynomial(d) if (1.8..=2.2).contains(&d) => Ok(format!("{:?}, Polynomial({d})", table.values)),
        other => Err(format!("classified {other:?}")),
    }
}

fn c6_p_counter() -> Check {
    let gens = [poly_fp(&[0, 0, 1], 3), poly_fp(&[0, 1, 1], 3)];
    let table = growth_table(&gens, 8, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    let expect: Vec<usize> = (1..=8).map(|n| (1 << (n + 1)) - 2).collect();
    ensure(table.values == expect, || format!("{:?}", table.values))?;
    let class = classify_growth(&table.values).map_err(|e| e.to_string())?;
    ensure(matches!(class, GrowthClass::Exponential(_)), || format!("classified {class:?}"))?;
    let v = jz_free_test(&gens[0], &gens[1], &ProjPoint::<Fp>::Infinity, 16).map_err(|e| e.to_string())?;
    ensure(matches!(v, JzVerdict::Free(_)), || format!("jz verdict {v:?}"))?;
    Ok(format!("{:?}, {class:?}, {v:?}", table.values))
}

fn c7_boettcher_identity() -> Check {
    let n = 12;
    let f = Series::new(vec![q(0, 1), q(0, 1), q(1, 1), q(1, 1)], 2 * n, ());
    let l = boettcher(&f, n).map_err(|e| e.to_string())?;
    let l_inv = l.inverse().map_err(|e| e.to_string())?;
    let mut x = vec![q(0, 1); n + 1];
    x[1] = q(1, 1);
    ensure(naive_compose(l_inv.coeffs(), l.coeffs(), n) == x, || "L^-1 is not an inverse".into())?;
    let fl = naive_compose(f.coeffs(), l.coeffs(), n);
    let recomposed = naive_compose(l_inv.coeffs(), &fl, n);
    let mut x2 = vec![q(0, 1); n + 1];
    x2[2] = q(1, 1);
    ensure(recomposed == x2, || format!("L^-1 f L = {recomposed:?}"))?;
    Ok("L^-1 ∘ f ∘ L = X^2 mod X^13".into())
}

fn c8_scaled_squares() -> Check {
    let report = brute_force_relation_search(&[poly(&[0, 0, 4]), poly(&[0, 0, 2])], 8).map_err(|e| e.to_string())?;
    ensure(report.relations.is_empty(), || format!("{} relations", report.relations.len()))?;
    ensure(report.distinct_count == 510, || format!("{} distinct", report.distinct_count))?;
    Ok("510 distinct maps, no relations".into())
}

fn c9_preperiodic_enumeration() -> Check {
    let cases: [(&[i64], &[&str]); 3] = [
        (&[0, 0, 1], &["0", "1", "-1", "inf"]),
        (&[-2, 0, 1], &["0", "1", "-1", "2", "-2", "inf"]),
        (&[1, 0, 1], &["inf"]),
    ];
    let mut times = Vec::new();
    for (c, expect) in cases {
        let f = poly(c);
        let t = Instant::now();
        let (got, complete) = prep_set(&f)?;
        within(Duration::from_secs(30), t)?;
        times.push(format!("{:.2?}", t.elapsed()));
        let expect: BTreeSet<String> = expect.iter().map(|s| s.to_string()).collect();
        ensure(got == expect, || format!("{f}: {got:?}"))?;
        ensure(complete, || format!("{f}: incomplete"))?;
    }
    Ok(format!("all complete ({})", times.join(", ")))
}

fn c10_bound_soundness() -> Check {
    let corpus = [
        poly(&[0, 0, 1]),
        poly(&[-2, 0, 1]),
        poly(&[1, 0, 1]),
        poly(&[-1, 0, 1]),
        poly(&[0, -3, 0, 1]),
        poly(&[0, 0, 4]),
        poly(&[0, 0, 2]),
        poly(&[0, 0, 1, 1]),
        RatFun::from_poly(Poly::new(vec![q(-3, 4), q(1, 2), q(5, 3)], ())),
    ];
    let mut rng = StdRng::seed_from_u64(0xACCE);
    let mut worst = 0.0f64;
    for f in &corpus {
        let c = composition_bound(f).map_err(|e| e.to_string())?.value;
        let d = f.degree() as f64;
        for _ in 0..10_000 {
            let den: i64 = rng.random_range(1..=1_000_000);
            let num: i64 = rng.random_range(-1_000_000..=1_000_000);
            let z = ProjPoint::Finite(q(num, den));
            let slack = (weil(&f.evaluate(&z)) - d * weil(&z)).abs();
            ensure(slack <= c + 1e-9, || format!("{f} at {z}: {slack} > {c}"))?;
            worst = worst.max(slack / c);
        }
    }
    Ok(format!("0 violations in {} samples, max |Δ|/C = {worst:.3}", corpus.len() * 10_000))
}

fn c11_constant_generator() -> Check {
    let s = [poly(&[0, 0, 1])];
    let s1 = [poly(&[0, 0, 1]), poly(&[1])];
    let a = growth_table(&s, 8, DEFAULT_BUDGET).map_err(|e| e.to_string())?.values;
    let b = growth_table(&s1, 8, DEFAULT_BUDGET).map_err(|e| e.to_string())?.values;
    for n in 0..8 {
        ensure(b[n] <= 2 * a[n], || format!("n = {}: {} > 2·{}", n + 1, b[n], a[n]))?;
    }
    Ok(format!("|S1| = {b:?}, |S| = {a:?}"))
}

fn c12_cross_module() -> Check {
    let coeffs = [Complex::new(-2.0, 0.0), Complex::new(0.0, 0.0), Complex::new(1.0, 0.0)];
    let n = 20;
    let g = escape_rate_complex(&coeffs, Complex::new(3.0, 0.0), n).map_err(|e| e.to_string())?;
    let h = canonical_height(&poly(&[-2, 0, 1]), &at(3), n).map_err(|e| e.to_string())?;
    // 3 = w + 1/w with w = (3 + sqrt 5)/2
    let truth = ((3.0 + 5f64.sqrt()) / 2.0).ln();
    ensure(g.overlaps(&h), || format!("{g} and {h} are disjoint"))?;
    ensure(g.contains(truth) && h.contains(truth), || format!("{g}, {h} vs {truth}"))?;
    ensure((g.mid() - 0.9624).abs() < 5e-5 && (h.mid() - 0.9624).abs() < 5e-5, || "midpoints drift from 0.9624".into())?;
    Ok(format!("G = {g}, ĥ = {h}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("canonical height exactness", c1_canonical_height_exactness),
        ("end-to-end certificate", c2_end_to_end_certificate),
        ("word inequality audit", c3_inequality_audit),
        ("negative control", c4_negative_control),
        ("Chebyshev growth", c5_chebyshev_growth),
        ("p-counter over F_3", c6_p_counter),
        ("Böttcher identity", c7_boettcher_identity),
        ("{4x^2, 2x^2} is free to length 8", c8_scaled_squares),
        ("preperiodic enumeration", c9_preperiodic_enumeration),
        ("height bound soundness", c10_bound_soundness),
        ("constant generator audit", c11_constant_generator),
        ("escape rate vs canonical height", c12_cross_module),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let el = t.elapsed();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{el:.2?}]", i + 1),
            Err(why) => {
                println!("FAIL {:>2} {name}: {why} [{el:.2?}]", i + 1);
                failed.push(i + 1);
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: 12/12 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
