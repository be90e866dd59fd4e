use std::fmt;

use dynfree_core::enumerate::Enumerable;
use dynfree_core::escape::{escape_rate_with_precision, EscapeError};
use dynfree_core::expr::{parse_expression, parse_polynomial};
use dynfree_core::freeness::{
    brute_force_relation_search_with, freeness_certificate, jz_free_test, verify_certificate, word_inequality_check, CertOutcome,
    JzVerdict,
};
use dynfree_core::growth::{affine_growth as affine_table, classify_growth, growth_table_seeded, AffineMap, GrowthClass, GrowthTable};
use dynfree_core::kummer::Kummer;
use dynfree_core::powerseries::{boettcher_extended, fixed_point_order, local_series};
use dynfree_core::preper::rational_preperiodic_points_budgeted;
use dynfree_core::{Field, FieldElem, Fp, PrimeModulus, ProjPoint, RatFun, Rational};
use num_complex::Complex;
use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::{json, Value};

use crate::Format;

/// Word length of the `a f^j(β) ≠ b g^j(β)` audit run with every certificate.
const INEQUALITY_LEN: usize = 3;

pub struct Output {
    pub text: String,
    pub code: u8,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, code: 0 }
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Domain(m) => f.write_str(m),
        }
    }
}

fn domain(e: impl fmt::Display) -> CliError {
    CliError::Domain(e.to_string())
}

fn to_json(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("documents serialize");
    s.push('\n');
    s
}

fn json_only(fmt: Option<Format>) -> Result<(), CliError> {
    match fmt {
        Some(Format::Csv) => Err(CliError::Usage("this command has no csv output".into())),
        _ => Ok(()),
    }
}

fn require_q(field: Field) -> Result<(), CliError> {
    match field {
        Field::Rationals => Ok(()),
        other => Err(CliError::Usage(format!("this command works over q only, not {other}"))),
    }
}

fn map_in<K: FieldElem>(src: &str, ctx: &K::Ctx) -> Result<RatFun<K>, CliError> {
    parse_expression(src, ctx).map_err(|e| CliError::Usage(format!("`{src}`: {e}")))
}

fn gens_in<K: FieldElem>(src: &str, ctx: &K::Ctx) -> Result<Vec<RatFun<K>>, CliError> {
    let gens: Vec<RatFun<K>> = src.split(';').map(str::trim).filter(|s| !s.is_empty()).map(|s| map_in(s, ctx)).collect::<Result<_, _>>()?;
    if gens.is_empty() {
        return Err(CliError::Usage("no generators given".into()));
    }
    Ok(gens)
}

fn point_in<K: FieldElem>(src: &str, ctx: &K::Ctx) -> Result<ProjPoint<K>, CliError> {
    ProjPoint::parse_in(ctx, src).ok_or_else(|| CliError::Usage(format!("`{src}` is not a point (use p/q or inf)")))
}

pub fn parse(field: Field, expr: &str, fmt: Option<Format>) -> Result<Output, CliError> {
    json_only(fmt)?;
    match field {
        Field::Rationals => parse_in::<Rational>(expr, &()),
        Field::PrimeField(p) => parse_in::<Fp>(expr, &PrimeModulus(p)),
    }
}

fn parse_in<K: FieldElem>(expr: &str, ctx: &K::Ctx) -> Result<Output, CliError> {
    let f = map_in::<K>(expr, ctx)?;
    let strings = |cs: &[K]| cs.iter().map(|c| c.to_string()).collect::<Vec<_>>();
    Ok(Output::ok(to_json(&json!({
        "input": expr,
        "field": K::describe(ctx),
        "map": f.to_string(),
        "numerator": strings(f.num().coeffs()),
        "denominator": strings(f.den().coeffs()),
        "degree": f.degree(),
    }))))
}

#[allow(clippy::too_many_arguments)]
pub fn free_cert(
    field: Field,
    f: &str,
    g: &str,
    witness: Option<&str>,
    n_iter: usize,
    audit_len: usize,
    budget: usize,
    seed: u64,
    fmt: Option<Format>,
) -> Result<Output, CliError> {
    json_only(fmt)?;
    require_q(field)?;
    let f = map_in::<Rational>(f, &())?;
    let g = map_in::<Rational>(g, &())?;
    let hint = witness.map(|w| point_in::<Rational>(w, &())).transpose()?;
    let outcome = freeness_certificate(&f, &g, hint.as_ref(), n_iter).map_err(domain)?;
    let mut doc = serde_json::to_value(&outcome).expect("serializable");
    let CertOutcome::Certified(cert) = &outcome else {
        return Ok(Output::ok(to_json(&doc)));
    };
    let verified = verify_certificate(cert);
    let unequal = word_inequality_check(cert, INEQUALITY_LEN, budget).map_err(domain)?;
    let obj = doc.as_object_mut().expect("object");
    obj.insert("verified".into(), Value::Bool(verified));
    obj.insert("inequality_check".into(), json!({ "max_len": INEQUALITY_LEN, "passed": unequal }));
    let mut clean = verified && unequal;
    if audit_len > 0 {
        let (fj, gj) = cert.powers();
        let report = brute_force_relation_search_with(&[fj, gj], audit_len, budget, seed).map_err(domain)?;
        clean &= report.relations.is_empty();
        obj.insert("audit".into(), serde_json::to_value(&report).expect("serializable"));
    }
    Ok(Output { text: to_json(&doc), code: if clean { 0 } else { 1 } })
}

#[derive(Serialize)]
struct TableDoc<'a> {
    #[serde(flatten)]
    table: &'a GrowthTable,
    classification: Option<GrowthClass>,
}

fn emit_table(table: &GrowthTable, fmt: Option<Format>) -> Output {
    match fmt {
        Some(Format::Csv) => Output::ok(table.to_csv()),
        _ => Output::ok(to_json(&TableDoc { table, classification: classify_growth(&table.values).ok() })),
    }
}

pub fn growth(field: Field, gens: &str, max_len: usize, budget: usize, seed: u64, fmt: Option<Format>) -> Result<Output, CliError> {
    let table = match field {
        Field::Rationals => growth_in::<Rational>(gens, &(), max_len, budget, seed)?,
        Field::PrimeField(p) => growth_in::<Fp>(gens, &PrimeModulus(p), max_len, budget, seed)?,
    };
    Ok(emit_table(&table, fmt))
}

fn growth_in<K: Enumerable>(gens: &str, ctx: &K::Ctx, max_len: usize, budget: usize, seed: u64) -> Result<GrowthTable, CliError> {
    let gens = gens_in::<K>(gens, ctx)?;
    growth_table_seeded(&gens, max_len, budget, seed).map_err(domain)
}

pub fn affine_growth(maps: &[String], max_len: usize, budget: usize, fmt: Option<Format>) -> Result<Output, CliError> {
    let maps: Vec<AffineMap> = maps
        .iter()
        .map(|m| AffineMap::parse(m).map_err(|e| CliError::Usage(format!("`{m}`: {e}"))))
        .collect::<Result<_, _>>()?;
    let table = affine_table(&maps, max_len, budget).map_err(domain)?;
    Ok(emit_table(&table, fmt))
}

pub fn prep(field: Field, f: &str, bound: Option<f64>, budget: usize, fmt: Option<Format>) -> Result<Output, CliError> {
    json_only(fmt)?;
    require_q(field)?;
    let f = map_in::<Rational>(f, &())?;
    let report = rational_preperiodic_points_budgeted(&f, bound, budget).map_err(domain)?;
    Ok(Output::ok(to_json(&report)))
}

pub fn boettcher(field: Field, f: &str, alpha: &str, prec: usize, g: Option<&str>, fmt: Option<Format>) -> Result<Output, CliError> {
    json_only(fmt)?;
    match field {
        Field::Rationals => boettcher_in::<Rational>(f, alpha, prec, g, &()),
        Field::PrimeField(p) => boettcher_in::<Fp>(f, alpha, prec, g, &PrimeModulus(p)),
    }
}

fn boettcher_in<K: FieldElem>(f: &str, alpha: &str, prec: usize, g: Option<&str>, ctx: &K::Ctx) -> Result<Output, CliError> {
    let f = map_in::<K>(f, ctx)?;
    let alpha = point_in::<K>(alpha, ctx)?;
    let m = fixed_point_order(&f, &alpha).map_err(domain)?;
    let fs = local_series(&f, &alpha, prec + m).map_err(domain)?;
    let l = boettcher_extended(&fs, prec).map_err(domain)?;
    let mut doc = json!({
        "f": f.to_string(),
        "field": K::describe(ctx),
        "alpha": alpha.to_string(),
        "m": m,
        "local_series": fs.to_string(),
        "extension": <Kummer<K> as FieldElem>::describe(l.ctx()),
        "L": l,
        "L_display": l.to_string(),
    });
    if let Some(g) = g {
        let g = map_in::<K>(g, ctx)?;
        let verdict = match jz_free_test(&f, &g, &alpha, prec).map_err(domain)? {
            JzVerdict::Free(reason) => json!({ "verdict": "free", "reason": reason }),
            JzVerdict::MonomialObstruction { xi, n } => json!({ "verdict": "monomial_obstruction", "xi": xi.to_string(), "n": n }),
            JzVerdict::Unknown => json!({ "verdict": "unknown" }),
        };
        let obj = doc.as_object_mut().expect("object");
        obj.insert("g".into(), Value::String(g.to_string()));
        obj.insert("jz".into(), verdict);
    }
    Ok(Output::ok(to_json(&doc)))
}

pub fn relations(field: Field, gens: &str, max_len: usize, budget: usize, seed: u64, fmt: Option<Format>) -> Result<Output, CliError> {
    json_only(fmt)?;
    match field {
        Field::Rationals => relations_in::<Rational>(gens, &(), max_len, budget, seed),
        Field::PrimeField(p) => relations_in::<Fp>(gens, &PrimeModulus(p), max_len, budget, seed),
    }
}

fn relations_in<K: Enumerable>(gens: &str, ctx: &K::Ctx, max_len: usize, budget: usize, seed: u64) -> Result<Output, CliError> {
    let gens = gens_in::<K>(gens, ctx)?;
    let report = brute_force_relation_search_with(&gens, max_len, budget, seed).map_err(domain)?;
    Ok(Output::ok(to_json(&report)))
}

fn floats<T: std::str::FromStr>(src: &str, n: usize, what: &str) -> Result<Vec<T>, CliError> {
    let bad = || CliError::Usage(format!("{what} needs {n} comma-separated numbers, got `{src}`"));
    let v: Vec<T> = src.split(',').map(|s| s.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>()?;
    if v.len() == n {
        Ok(v)
    } else {
        Err(bad())
    }
}

fn axis(lo: f64, hi: f64, n: usize, i: usize) -> f64 {
    if n == 1 {
        lo
    } else {
        lo + (hi - lo) * i as f64 / (n - 1) as f64
    }
}

pub fn escape_grid(field: Field, f: &str, window: &str, res: &str, n_iter: usize, prec: u32, fmt: Option<Format>) -> Result<Output, CliError> {
    if fmt == Some(Format::Json) {
        return Err(CliError::Usage("escape-grid emits csv only".into()));
    }
    require_q(field)?;
    let p = parse_polynomial::<Rational>(f, &()).map_err(|e| CliError::Usage(format!("`{f}`: {e}")))?;
    let coeffs: Vec<Complex<f64>> = p.coeffs().iter().map(|c| Complex::new(c.to_f64().unwrap_or(f64::NAN), 0.0)).collect();
    let w: Vec<f64> = floats(window, 4, "--window")?;
    let r: Vec<usize> = floats(res, 2, "--res")?;
    if r[0] == 0 || r[1] == 0 {
        return Err(CliError::Usage("--res entries must be positive".into()));
    }
    let mut out = String::from("re,im,G\n");
    for j in 0..r[1] {
        let im = axis(w[2], w[3], r[1], j);
        for i in 0..r[0] {
            let re = axis(w[0], w[1], r[0], i);
            let g = match escape_rate_with_precision(&coeffs, Complex::new(re, im), n_iter, prec) {
                Ok(iv) => iv.mid(),
                Err(EscapeError::PrecisionExhausted { best, .. }) => best.mid(),
                Err(e @ EscapeError::UnsupportedPrecision(_)) => return Err(CliError::Usage(e.to_string())),
                Err(e) => return Err(domain(e)),
            };
            out.push_str(&format!("{re},{im},{g}\n"));
        }
    }
    Ok(Output::ok(out))
}
