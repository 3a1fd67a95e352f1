//! ROUGE-1, ROUGE-2 and ROUGE-L (precision / recall / F1).
//!
//! The same engine backs both candidate ranking and final evaluation, so all
//! scores produced by this crate are computed under one tokenizer.
//!
//! * Tokens are lowercased and split on every maximal run of
//!   non-alphanumeric characters. Stemming (Snowball English) is opt-in.
//! * ROUGE-N uses clipped n-gram overlap.
//! * ROUGE-L is the summary-level single-sequence LCS variant.
//! * F-measure is plain F1.

use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use rust_stemmers::{Algorithm, Stemmer};
use serde::{Deserialize, Serialize};

/// A lowercased token sequence, the operand of every ROUGE computation.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct TokenSeq(Vec<String>);

impl TokenSeq {
    pub fn new(tokens: Vec<String>) -> Self {
        Self(tokens)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[String] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<String> {
        self.0
    }
}

impl<S: Into<String>> FromIterator<S> for TokenSeq {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        Self(iter.into_iter().map(Into::into).collect())
    }
}

impl AsRef<[String]> for TokenSeq {
    fn as_ref(&self) -> &[String] {
        &self.0
    }
}

fn english_stemmer() -> &'static Stemmer {
    static STEMMER: OnceLock<Stemmer> = OnceLock::new();
    STEMMER.get_or_init(|| Stemmer::create(Algorithm::English))
}

/// Lowercasing, non-alphanumeric-splitting tokenizer.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tokenizer {
    pub stem: bool,
}

impl Tokenizer {
    pub fn new(stem: bool) -> Self {
        Self { stem }
    }

    pub fn tokenize(&self, text: &str) -> TokenSeq {
        let lower = text.to_lowercase();
        let pieces = lower.split(|c: char| !c.is_alphanumeric()).filter(|t| !t.is_empty());
        if self.stem {
            let stemmer = english_stemmer();
            pieces
                .map(|t| stemmer.stem(t).into_owned())
                .filter(|t| !t.is_empty())
                .collect()
        } else {
            pieces.collect()
        }
    }
}

/// Tokenize with the default (non-stemming) tokenizer.
pub fn tokenize(text: &str) -> TokenSeq {
    Tokenizer::default().tokenize(text)
}

/// Precision / recall / F1 for one ROUGE variant. All components lie in `[0, 1]`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RougeScore {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl RougeScore {
    pub const ZERO: RougeScore = RougeScore { precision: 0.0, recall: 0.0, f1: 0.0 };

    pub fn new(precision: f64, recall: f64) -> Self {
        Self { precision, recall, f1: f1(precision, recall) }
    }

    /// Build a score from a match count and the two operand sizes. An empty
    /// operand zeroes its own component.
    pub fn from_counts(matches: usize, candidate_total: usize, reference_total: usize) -> Self {
        let ratio = |total: usize| if total == 0 { 0.0 } else { matches as f64 / total as f64 };
        Self::new(ratio(candidate_total), ratio(reference_total))
    }
}

impl fmt::Display for RougeScore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "P={:.2} R={:.2} F1={:.2}",
            self.precision * 100.0,
            self.recall * 100.0,
            self.f1 * 100.0
        )
    }
}

/// Harmonic mean, 0 when both inputs are 0.
pub fn f1(precision: f64, recall: f64) -> f64 {
    if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    }
}

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], usize> {
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for gram in tokens.windows(n) {
            *counts.entry(gram).or_insert(0) += 1;
        }
    }
    counts
}

/// Clipped n-gram overlap score.
///
/// Panics if `n == 0`.
pub fn rouge_n(candidate: &TokenSeq, reference: &TokenSeq, n: usize) -> RougeScore {
    assert!(n >= 1, "rouge_n requires n >= 1");
    let cand = ngram_counts(candidate.as_slice(), n);
    let refs = ngram_counts(reference.as_slice(), n);
    let (small, large) = if cand.len() <= refs.len() { (&cand, &refs) } else { (&refs, &cand) };
    let overlap: usize = small
        .iter()
        .map(|(gram, &count)| large.get(gram).map_or(0, |&other| count.min(other)))
        .sum();
    let cand_total = candidate.len().saturating_sub(n - 1);
    let ref_total = reference.len().saturating_sub(n - 1);
    RougeScore::from_counts(overlap, cand_total, ref_total)
}

/// Length of the longest common subsequence, in `O(|a|·|b|)` time and
/// `O(min(|a|, |b|))` memory.
pub fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let (outer, inner) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    if inner.is_empty() {
        return 0;
    }
    let mut row = vec![0usize; inner.len() + 1];
    for x in outer {
        let mut diag = 0;
        for (j, y) in inner.iter().enumerate() {
            let up = row[j + 1];
            row[j + 1] = if x == y { diag + 1 } else { up.max(row[j]) };
            diag = up;
        }
    }
    row[inner.len()]
}

/// Map both sequences onto dense integer ids, `a` first, so ids below the
/// number of distinct tokens in `a` are exactly the tokens `a` contains.
fn intern(a: &[String], b: &[String]) -> (Vec<u32>, Vec<u32>, usize) {
    let mut ids: HashMap<&str, u32> = HashMap::new();
    let mut out = (Vec::with_capacity(a.len()), Vec::with_capacity(b.len()));
    let mut in_a = 0;
    for (tokens, dest) in [(a, &mut out.0), (b, &mut out.1)] {
        for t in tokens {
            let next = ids.len() as u32;
            dest.push(*ids.entry(t.as_str()).or_insert(next));
        }
        if in_a == 0 {
            in_a = ids.len();
        }
    }
    (out.0, out.1, in_a)
}

/// Bit-parallel LCS length (Hyyrö's variant of Allison-Dix). `short` holds
/// ids below `alphabet`; ids in `long` at or above it never match.
fn bit_lcs_len(short: &[u32], long: &[u32], alphabet: usize) -> usize {
    let words = short.len().div_ceil(64);
    let mut masks = vec![0u64; alphabet * words];
    for (i, &id) in short.iter().enumerate() {
        masks[id as usize * words + i / 64] |= 1 << (i % 64);
    }
    let mut v = vec![u64::MAX; words];
    for &id in long {
        let id = id as usize;
        if id >= alphabet {
            continue;
        }
        let m = &masks[id * words..(id + 1) * words];
        let mut carry = false;
        for (vk, &mk) in v.iter_mut().zip(m) {
            let (sum, c1) = vk.overflowing_add(*vk & mk);
            let (sum, c2) = sum.overflowing_add(carry as u64);
            carry = c1 || c2;
            *vk = sum | (*vk & !mk);
        }
    }
    let tail = short.len() % 64;
    v.iter()
        .enumerate()
        .map(|(k, &w)| {
            let zeros = !w;
            let zeros = if k == words - 1 && tail != 0 { zeros & ((1u64 << tail) - 1) } else { zeros };
            zeros.count_ones() as usize
        })
        .sum()
}

/// LCS length of two token sequences.
pub fn token_lcs_len(a: &TokenSeq, b: &TokenSeq) -> usize {
    let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    if short.is_empty() {
        return 0;
    }
    let (short_ids, long_ids, alphabet) = intern(short.as_slice(), long.as_slice());
    bit_lcs_len(&short_ids, &long_ids, alphabet)
}

/// Summary-level ROUGE-L over the two flat token sequences.
pub fn rouge_l(candidate: &TokenSeq, reference: &TokenSeq) -> RougeScore {
    if candidate.is_empty() || reference.is_empty() {
        return RougeScore::ZERO;
    }
    let lcs = token_lcs_len(candidate, reference);
    RougeScore::from_counts(lcs, candidate.len(), reference.len())
}

/// ROUGE-1, ROUGE-2 and ROUGE-L for one pair.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RougeTriple {
    pub rouge1: RougeScore,
    pub rouge2: RougeScore,
    pub rouge_l: RougeScore,
}

pub fn rouge_all(candidate: &TokenSeq, reference: &TokenSeq) -> RougeTriple {
    RougeTriple {
        rouge1: rouge_n(candidate, reference, 1),
        rouge2: rouge_n(candidate, reference, 2),
        rouge_l: rouge_l(candidate, reference),
    }
}
