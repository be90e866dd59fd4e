//! Words over a generator alphabet.
//!
//! Letters are stored in the order they act: `[a, b, c]` is the map
//! `c ∘ b ∘ a`. Prefixes of the stored sequence are therefore the partial
//! compositions `s_i` that appear in telescoping height estimates.

use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use thiserror::Error;

use crate::ratfun::{RatFun, RatFunError};
use crate::scalar::FieldElem;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("letter {index} out of range for {alphabet} generators")]
    IndexOutOfRange { index: usize, alphabet: usize },
    #[error("unknown generator name `{0}`")]
    UnknownName(String),
    #[error("empty generator set")]
    NoGenerators,
    #[error(transparent)]
    RatFun(#[from] RatFunError),
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Default, PartialOrd, Ord)]
pub struct Word(pub Vec<usize>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `self` followed by `other`: `other` acts after `self`.
    pub fn concat(&self, other: &Word) -> Word {
        Word(self.0.iter().chain(other.0.iter()).copied().collect())
    }

    pub fn push(&self, letter: usize) -> Word {
        let mut v = self.0.clone();
        v.push(letter);
        Word(v)
    }

    /// Renders as generator names joined by `.`, first-acting first.
    pub fn to_named(&self, names: &[String]) -> String {
        self.0
            .iter()
            .map(|&i| names.get(i).cloned().unwrap_or_else(|| format!("s{i}")))
            .collect::<Vec<_>>()
            .join(".")
    }

    pub fn parse_named(s: &str, names: &[String]) -> Result<Word, WordError> {
        if s.trim().is_empty() {
            return Ok(Word::empty());
        }
        s.split('.')
            .map(|part| {
                let part = part.trim();
                names
                    .iter()
                    .position(|n| n == part)
                    .ok_or_else(|| WordError::UnknownName(part.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Word)
    }

    /// All words of length exactly `len` over `alphabet` letters, in
    /// lexicographic order.
    pub fn all_of_length(alphabet: usize, len: usize) -> impl Iterator<Item = Word> {
        let total = (alphabet as u128).checked_pow(len as u32).unwrap_or(u128::MAX);
        (0..total).map(move |mut code| {
            let mut letters = vec![0; len];
            for slot in letters.iter_mut().rev() {
                *slot = (code % alphabet as u128) as usize;
                code /= alphabet as u128;
            }
            Word(letters)
        })
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = default_names(self.0.iter().max().map_or(0, |m| m + 1));
        f.write_str(&self.to_named(&names))
    }
}

/// `f`, `g`, `h`, then `s3`, `s4`, ...
pub fn default_names(n: usize) -> Vec<String> {
    (0..n)
        .map(|i| match i {
            0 => "f".to_string(),
            1 => "g".to_string(),
            2 => "h".to_string(),
            _ => format!("s{i}"),
        })
        .collect()
}

/// Product of the letter degrees (1 for the empty word).
pub fn word_degree(w: &Word, degrees: &[u64]) -> Result<BigUint, WordError> {
    w.0.iter().try_fold(BigUint::one(), |acc, &i| {
        degrees
            .get(i)
            .map(|&d| acc * d)
            .ok_or(WordError::IndexOutOfRange { index: i, alphabet: degrees.len() })
    })
}

/// The composition denoted by `w`; the empty word is the identity.
pub fn evaluate_word<K: FieldElem>(w: &Word, gens: &[RatFun<K>]) -> Result<RatFun<K>, WordError> {
    let first = gens.first().ok_or(WordError::NoGenerators)?;
    let mut acc = RatFun::identity(first.ctx());
    for &i in &w.0 {
        let g = gens.get(i).ok_or(WordError::IndexOutOfRange { index: i, alphabet: gens.len() })?;
        acc = g.compose(&acc)?;
    }
    Ok(acc)
}
