//! Word enumeration with element interning, shared by growth tables and
//! relation searches.
//!
//! Elements are interned through a [`Backend`], which supplies a hashable key
//! and a confirmation step for key collisions. Exact backends key on the
//! element itself. The rational-function backend keys on the degree plus the
//! values of the map at a few points of `P^1(F_P)` for large primes `P` of
//! good reduction. Distinct keys prove distinct maps; equal keys are
//! confirmed either by rewriting with relations already proven, or by exact
//! composition when the degree is small enough. Anything else is reported as
//! [`EnumError::Undecided`] rather than guessed.

use std::collections::{HashMap, HashSet, VecDeque};
use std::hash::Hash;

use num_bigint::BigUint;
use rayon::prelude::*;
use thiserror::Error;

use crate::poly::Poly;
use crate::ratfun::{RatFun, RatFunError};
use crate::scalar::{is_prime_u64, FieldElem, Fp, PrimeModulus, Rational};
use crate::words::{evaluate_word, Word, WordError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumError {
    #[error("could not decide whether {left} and {right} define the same map")]
    Undecided { left: Word, right: Word },
    #[error("no generators")]
    NoGenerators,
    #[error("no prime of good reduction found for the generators")]
    NoGoodPrime,
    #[error("budget of {0} exceeded")]
    BudgetExceeded(usize),
    #[error(transparent)]
    RatFun(#[from] RatFunError),
    #[error(transparent)]
    Word(#[from] WordError),
}

/// Outcome of comparing two words whose keys coincide.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Decision {
    Equal,
    Distinct,
    Undecided,
}

pub trait Backend: Sync {
    type Elem: Clone + Send + Sync;
    type Key: Hash + Eq + Clone + Send + Sync;

    fn alphabet(&self) -> usize;
    fn generator(&self, letter: usize) -> Self::Elem;
    /// The element `letter ∘ e`.
    fn extend(&self, e: &Self::Elem, letter: usize) -> Result<Self::Elem, EnumError>;
    fn key(&self, e: &Self::Elem) -> Self::Key;
    /// Decides equality of the maps of two words with equal keys.
    fn confirm(&mut self, a: &Word, b: &Word) -> Result<Decision, EnumError>;
}

/// A type whose values are composed exactly and interned by value.
pub trait ExactElem: Clone + Hash + Eq + Send + Sync {
    /// `next ∘ self`.
    fn then(&self, next: &Self) -> Result<Self, EnumError>;
}

impl<K: FieldElem> ExactElem for RatFun<K> {
    fn then(&self, next: &Self) -> Result<Self, EnumError> {
        Ok(next.compose(self)?)
    }
}

pub struct ExactBackend<T: ExactElem> {
    gens: Vec<T>,
}

impl<T: ExactElem> ExactBackend<T> {
    pub fn new(gens: Vec<T>) -> Result<Self, EnumError> {
        if gens.is_empty() {
            return Err(EnumError::NoGenerators);
        }
        Ok(ExactBackend { gens })
    }
}

impl<T: ExactElem> Backend for ExactBackend<T> {
    type Elem = T;
    type Key = T;

    fn alphabet(&self) -> usize {
        self.gens.len()
    }

    fn generator(&self, letter: usize) -> T {
        self.gens[letter].clone()
    }

    fn extend(&self, e: &T, letter: usize) -> Result<T, EnumError> {
        e.then(&self.gens[letter])
    }

    fn key(&self, e: &T) -> T {
        e.clone()
    }

    fn confirm(&mut self, _: &Word, _: &Word) -> Result<Decision, EnumError> {
        Ok(Decision::Equal)
    }
}

/// Fields whose rational functions can be enumerated, with the interning
/// strategy each one uses.
pub trait Enumerable: FieldElem {
    type Backend: Backend;
    fn backend(gens: Vec<RatFun<Self>>, seed: u64) -> Result<Self::Backend, EnumError>;
}

impl Enumerable for Rational {
    type Backend = FingerprintBackend;
    fn backend(gens: Vec<RatFun<Self>>, seed: u64) -> Result<FingerprintBackend, EnumError> {
        FingerprintBackend::new(gens, seed)
    }
}

impl Enumerable for Fp {
    type Backend = ExactBackend<RatFun<Fp>>;
    fn backend(gens: Vec<RatFun<Self>>, _: u64) -> Result<Self::Backend, EnumError> {
        ExactBackend::new(gens)
    }
}

/// Seed for fingerprint sample points. Outcomes never depend on it except
/// through which collisions need confirmation.
pub const DEFAULT_SEED: u64 = 0x5EED;

/// Degree cap for confirming a fingerprint collision by exact composition.
pub const EXACT_CONFIRM_DEGREE: u64 = 512;
/// Cap on words visited while searching for a rewriting proof.
pub const REWRITE_STATES: usize = 50_000;

const FINGERPRINT_PRIMES: usize = 3;
const POINTS_PER_PRIME: usize = 4;

/// A generator reduced modulo a prime: homogeneous coefficients of degree
/// `d`, numerator and denominator.
#[derive(Clone, Debug)]
struct Reduced {
    num: Vec<u64>,
    den: Vec<u64>,
}

#[derive(Clone, Debug)]
struct PrimeData {
    p: u64,
    maps: Vec<Reduced>,
    points: Vec<u64>,
}

/// Element of the fingerprint backend: word degree and the values at the
/// sample points (`p` encodes infinity).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Fingerprint {
    degree: BigUint,
    values: Vec<u64>,
}

pub struct FingerprintBackend {
    gens: Vec<RatFun<Rational>>,
    degrees: Vec<u64>,
    primes: Vec<PrimeData>,
    proven: Vec<(Vec<usize>, Vec<usize>)>,
}

fn splitmix(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Reduction of `f` modulo `p` if `f` has good reduction there.
fn reduce_map(f: &RatFun<Rational>, p: u64) -> Option<Reduced> {
    let ctx = PrimeModulus(p);
    let to_fp = |poly: &Poly<Rational>| -> Poly<Fp> {
        let c = poly.coeffs().iter().map(|c| Fp::from_bigint(&ctx, &c.to_integer())).collect();
        Poly::new(c, ctx)
    };
    let num = to_fp(f.num());
    let den = to_fp(f.den());
    let d = f.degree();
    if den.is_zero() {
        return None;
    }
    if num.is_zero() {
        // the zero map only reduces well when it is constant
        if d != 0 {
            return None;
        }
    } else if num.deg0().max(den.deg0()) != d || !num.gcd(&den).is_constant() {
        return None;
    }
    let pad = |poly: &Poly<Fp>| -> Vec<u64> {
        let mut v: Vec<u64> = poly.coeffs().iter().map(|c| c.value()).collect();
        v.resize(d + 1, 0);
        v
    };
    Some(Reduced { num: pad(&num), den: pad(&den) })
}

fn horner_mod(coeffs: &[u64], x: u64, p: u64) -> u64 {
    coeffs.iter().rev().fold(0u64, |acc, &c| ((acc as u128 * x as u128 + c as u128) % p as u128) as u64)
}

fn inv_mod(a: u64, p: u64) -> u64 {
    // p prime, a != 0
    let mut result = 1u128;
    let mut base = a as u128;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p as u128;
        }
        base = base * base % p as u128;
        e >>= 1;
    }
    result as u64
}

fn apply_reduced(m: &Reduced, x: u64, p: u64) -> u64 {
    let (n, d) = if x == p {
        (*m.num.last().unwrap(), *m.den.last().unwrap())
    } else {
        (horner_mod(&m.num, x, p), horner_mod(&m.den, x, p))
    };
    if d == 0 {
        p
    } else {
        (n as u128 * inv_mod(d, p) as u128 % p as u128) as u64
    }
}

impl FingerprintBackend {
    pub fn new(gens: Vec<RatFun<Rational>>, seed: u64) -> Result<Self, EnumError> {
        if gens.is_empty() {
            return Err(EnumError::NoGenerators);
        }
        let mut primes = Vec::new();
        let mut candidate = (1u64 << 61) - 1;
        let mut rng = seed;
        let mut tried = 0;
        while primes.len() < FINGERPRINT_PRIMES {
            if is_prime_u64(candidate) {
                if let Some(maps) = gens.iter().map(|g| reduce_map(g, candidate)).collect::<Option<Vec<_>>>() {
                    let points = (0..POINTS_PER_PRIME).map(|_| splitmix(&mut rng) % candidate).collect();
                    primes.push(PrimeData { p: candidate, maps, points });
                }
                tried += 1;
                if tried > 1000 {
                    return Err(EnumError::NoGoodPrime);
                }
            }
            candidate -= 2;
        }
        let degrees = gens.iter().map(|g| g.degree() as u64).collect();
        Ok(FingerprintBackend { gens, degrees, primes, proven: Vec::new() })
    }

    /// Relations proven so far, as pairs of words.
    pub fn proven_relations(&self) -> impl Iterator<Item = (Word, Word)> + '_ {
        self.proven.iter().map(|(a, b)| (Word(a.clone()), Word(b.clone())))
    }

    fn word_degree(&self, w: &Word) -> BigUint {
        w.letters().iter().fold(BigUint::from(1u32), |acc, &i| acc * self.degrees[i])
    }
}

/// Searches for a chain of rewrites, using the two-sided relations in
/// `rules`, from `from` to `to`.
pub(crate) fn rewrite_reachable(from: &[usize], to: &[usize], rules: &[(Vec<usize>, Vec<usize>)], cap: usize) -> bool {
    if from == to {
        return true;
    }
    if rules.is_empty() {
        return false;
    }
    let longest = rules.iter().map(|(l, r)| l.len().abs_diff(r.len())).max().unwrap_or(0);
    let max_len = from.len().max(to.len()) + longest;
    let mut seen: HashSet<Vec<usize>> = HashSet::from([from.to_vec()]);
    let mut queue = VecDeque::from([from.to_vec()]);
    while let Some(w) = queue.pop_front() {
        for (l, r) in rules {
            for (pat, rep) in [(l, r), (r, l)] {
                if pat.is_empty() || pat.len() > w.len() {
                    continue;
                }
                for i in 0..=w.len() - pat.len() {
                    if w[i..i + pat.len()] != pat[..] {
                        continue;
                    }
                    let mut next = Vec::with_capacity(w.len() - pat.len() + rep.len());
                    next.extend_from_slice(&w[..i]);
                    next.extend_from_slice(rep);
                    next.extend_from_slice(&w[i + pat.len()..]);
                    if next == to {
                        return true;
                    }
                    if next.len() <= max_len && seen.insert(next.clone()) {
                        if seen.len() > cap {
                            return false;
                        }
                        queue.push_back(next);
                    }
                }
            }
        }
    }
    false
}

impl Backend for FingerprintBackend {
    type Elem = Fingerprint;
    type Key = Fingerprint;

    fn alphabet(&self) -> usize {
        self.gens.len()
    }

    fn generator(&self, letter: usize) -> Fingerprint {
        let values = self
            .primes
            .iter()
            .flat_map(|pd| pd.points.iter().map(move |&x| apply_reduced(&pd.maps[letter], x, pd.p)))
            .collect();
        Fingerprint { degree: BigUint::from(self.degrees[letter]), values }
    }

    fn extend(&self, e: &Fingerprint, letter: usize) -> Result<Fingerprint, EnumError> {
        let mut values = Vec::with_capacity(e.values.len());
        let mut it = e.values.iter();
        for pd in &self.primes {
            for _ in 0..pd.points.len() {
                let x = *it.next().expect("fingerprint length");
                values.push(apply_reduced(&pd.maps[letter], x, pd.p));
            }
        }
        Ok(Fingerprint { degree: &e.degree * self.degrees[letter], values })
    }

    fn key(&self, e: &Fingerprint) -> Fingerprint {
        e.clone()
    }

    fn confirm(&mut self, a: &Word, b: &Word) -> Result<Decision, EnumError> {
        if rewrite_reachable(a.letters(), b.letters(), &self.proven, REWRITE_STATES) {
            return Ok(Decision::Equal);
        }
        let deg = self.word_degree(a);
        if deg <= BigUint::from(EXACT_CONFIRM_DEGREE) {
            let fa = evaluate_word(a, &self.gens)?;
            let fb = evaluate_word(b, &self.gens)?;
            if fa == fb {
                self.proven.push((a.0.clone(), b.0.clone()));
                return Ok(Decision::Equal);
            }
            return Ok(Decision::Distinct);
        }
        Ok(Decision::Undecided)
    }
}

/// Where an inserted word landed.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Slot {
    New(usize),
    Existing(usize),
}

/// Interning store: one representative word per distinct element.
pub struct Interner<B: Backend> {
    backend: B,
    buckets: HashMap<B::Key, Vec<usize>>,
    reps: Vec<Word>,
    elems: Vec<B::Elem>,
}

impl<B: Backend> Interner<B> {
    pub fn new(backend: B) -> Self {
        Interner { backend, buckets: HashMap::new(), reps: Vec::new(), elems: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn rep(&self, id: usize) -> &Word {
        &self.reps[id]
    }

    pub fn backend(&self) -> &B {
        &self.backend
    }

    pub fn insert(&mut self, word: Word, elem: B::Elem) -> Result<Slot, EnumError> {
        let key = self.backend.key(&elem);
        let candidates = self.buckets.get(&key).cloned().unwrap_or_default();
        for id in candidates {
            match self.backend.confirm(&self.reps[id], &word)? {
                Decision::Equal => return Ok(Slot::Existing(id)),
                Decision::Distinct => continue,
                Decision::Undecided => return Err(EnumError::Undecided { left: self.reps[id].clone(), right: word }),
            }
        }
        let id = self.reps.len();
        self.buckets.entry(key).or_default().push(id);
        self.reps.push(word);
        self.elems.push(elem);
        Ok(Slot::New(id))
    }
}

/// Cumulative distinct-element counts by word length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelCounts {
    /// `counts[n-1]` is the number of distinct elements of length `1..=n`.
    pub counts: Vec<usize>,
    /// True when the budget stopped the enumeration before `n_max`.
    pub truncated: bool,
}

/// Breadth-first enumeration of distinct elements of word length `1..=n_max`.
/// Only elements first reached at length `n` are extended to length `n+1`;
/// the others were already extended at a shorter length.
pub fn distinct_by_length<B: Backend>(interner: &mut Interner<B>, n_max: usize, budget: usize) -> Result<LevelCounts, EnumError> {
    let alphabet = interner.backend.alphabet();
    let mut counts = Vec::new();
    let mut frontier: Vec<usize> = Vec::new();
    for n in 1..=n_max {
        let candidates: Vec<(Word, B::Elem)> = if n == 1 {
            (0..alphabet).map(|s| (Word(vec![s]), interner.backend.generator(s))).collect()
        } else {
            let backend = &interner.backend;
            let reps = &interner.reps;
            let elems = &interner.elems;
            let jobs: Vec<(usize, usize)> = frontier.iter().flat_map(|&id| (0..alphabet).map(move |s| (id, s))).collect();
            jobs.par_iter()
                .map(|&(id, s)| backend.extend(&elems[id], s).map(|e| (reps[id].push(s), e)))
                .collect::<Result<_, _>>()?
        };
        let mut next = Vec::new();
        for (word, elem) in candidates {
            if let Slot::New(id) = interner.insert(word, elem)? {
                next.push(id);
                if interner.len() > budget {
                    return Ok(LevelCounts { counts, truncated: true });
                }
            }
        }
        counts.push(interner.len());
        frontier = next;
    }
    Ok(LevelCounts { counts, truncated: false })
}

/// Every word of length `1..=max_len` and the earlier word it coincides
/// with, if any.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordCensus {
    pub relations: Vec<(Word, Word)>,
    pub distinct: usize,
    pub words: usize,
}

/// Interns every word (not just new elements) up to `max_len`.
pub fn all_words<B: Backend>(interner: &mut Interner<B>, max_len: usize, budget: usize) -> Result<WordCensus, EnumError> {
    let alphabet = interner.backend.alphabet();
    let mut relations = Vec::new();
    let mut words = 0usize;
    let mut level: Vec<(Word, B::Elem)> = Vec::new();
    for n in 1..=max_len {
        level = if n == 1 {
            (0..alphabet).map(|s| (Word(vec![s]), interner.backend.generator(s))).collect()
        } else {
            let backend = &interner.backend;
            level
                .par_iter()
                .flat_map_iter(|(w, e)| (0..alphabet).map(move |s| backend.extend(e, s).map(|c| (w.push(s), c))))
                .collect::<Result<_, _>>()?
        };
        words += level.len();
        if words > budget {
            return Err(EnumError::BudgetExceeded(budget));
        }
        for (w, e) in &level {
            if let Slot::Existing(id) = interner.insert(w.clone(), e.clone())? {
                relations.push((interner.reps[id].clone(), w.clone()));
            }
        }
    }
    Ok(WordCensus { relations, distinct: interner.len(), words })
}
