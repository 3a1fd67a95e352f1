//! Argument-aware candidate scoring.
//!
//! A document's argumentative sentences, concatenated in order, form an
//! extractive argument reference. Each candidate is scored by ROUGE F1
//! against that reference (mu) and the pool is ranked by mu, descending,
//! with ties kept in pool order. The top entry is the selected summary.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{join_texts, CandidatePool, CandidateSummary, Document};
use crate::marker::strip_markers;
use crate::rouge::{rouge_l, rouge_n, TokenSeq, Tokenizer};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RankError {
    #[error("empty candidate pool for {doc_id:?}")]
    EmptyPool { doc_id: String },
    #[error("pool for {pool_id:?} ranked against document {doc_id:?}")]
    DocIdMismatch { pool_id: String, doc_id: String },
}

/// ROUGE variant used as mu.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RankingMetric {
    #[default]
    R1,
    R2,
    RL,
}

impl RankingMetric {
    pub fn as_str(self) -> &'static str {
        match self {
            RankingMetric::R1 => "R1",
            RankingMetric::R2 => "R2",
            RankingMetric::RL => "RL",
        }
    }

    pub fn f1(self, candidate: &TokenSeq, reference: &TokenSeq) -> f64 {
        match self {
            RankingMetric::R1 => rouge_n(candidate, reference, 1).f1,
            RankingMetric::R2 => rouge_n(candidate, reference, 2).f1,
            RankingMetric::RL => rouge_l(candidate, reference).f1,
        }
    }
}

impl fmt::Display for RankingMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RankingMetric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "").as_str() {
            "r1" | "rouge1" => Ok(RankingMetric::R1),
            "r2" | "rouge2" => Ok(RankingMetric::R2),
            "rl" | "rougel" => Ok(RankingMetric::RL),
            _ => Err(format!("unknown ranking metric {s:?} (expected R1, R2 or RL)")),
        }
    }
}

/// Extractive argument reference for one document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArgReference {
    pub text: String,
    /// Number of argumentative sentences used (0 when falling back).
    pub sentences: usize,
    /// True when the document had no argumentative sentences and the full
    /// text was used instead.
    pub fallback: bool,
}

pub fn build_arg_reference(doc: &Document) -> ArgReference {
    let args: Vec<&str> = doc
        .sentences
        .iter()
        .filter(|s| s.role.is_argumentative())
        .map(|s| s.text.as_str())
        .collect();
    if args.is_empty() {
        ArgReference { text: doc.full_text(), sentences: 0, fallback: true }
    } else {
        ArgReference { sentences: args.len(), text: join_texts(args.into_iter()), fallback: false }
    }
}

/// mu for one candidate, plus how many literal marker tokens were removed
/// from the candidate text before tokenizing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CandidateScore {
    pub mu: f64,
    pub markers_stripped: usize,
}

/// Scores candidates against a pre-tokenized argument reference.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scorer {
    pub metric: RankingMetric,
    pub tokenizer: Tokenizer,
}

impl Scorer {
    pub fn new(metric: RankingMetric, tokenizer: Tokenizer) -> Self {
        Self { metric, tokenizer }
    }

    pub fn score(&self, candidate_text: &str, reference: &TokenSeq) -> CandidateScore {
        let (clean, markers_stripped) = strip_markers(candidate_text);
        let tokens = self.tokenizer.tokenize(&clean);
        CandidateScore { mu: self.metric.f1(&tokens, reference), markers_stripped }
    }

    pub fn rank_pool(&self, pool: &CandidatePool, doc: &Document) -> Result<RankedResult, RankError> {
        if pool.doc_id != doc.doc_id {
            return Err(RankError::DocIdMismatch { pool_id: pool.doc_id.clone(), doc_id: doc.doc_id.clone() });
        }
        if pool.is_empty() {
            return Err(RankError::EmptyPool { doc_id: pool.doc_id.clone() });
        }
        let arg_reference = build_arg_reference(doc);
        let reference = self.tokenizer.tokenize(&arg_reference.text);
        let scores: Vec<CandidateScore> = pool.candidates.par_iter().map(|c| self.score(&c.text, &reference)).collect();
        let mut entries: Vec<RankedEntry> = pool
            .candidates
            .iter()
            .zip(scores)
            .enumerate()
            .map(|(pool_index, (candidate, score))| RankedEntry {
                candidate: candidate.clone(),
                pool_index,
                mu: score.mu,
                markers_stripped: score.markers_stripped,
            })
            .collect();
        // stable: equal mu keeps pool order
        entries.sort_by(|a, b| b.mu.total_cmp(&a.mu));
        Ok(RankedResult { doc_id: doc.doc_id.clone(), entries, selected: 0, arg_reference })
    }
}

/// mu between a candidate text and an argument reference text.
pub fn score_candidate(candidate_text: &str, arg_reference: &str, metric: RankingMetric) -> f64 {
    let scorer = Scorer::new(metric, Tokenizer::default());
    scorer.score(candidate_text, &scorer.tokenizer.tokenize(arg_reference)).mu
}

pub fn rank_pool(pool: &CandidatePool, doc: &Document, metric: RankingMetric) -> Result<RankedResult, RankError> {
    Scorer::new(metric, Tokenizer::default()).rank_pool(pool, doc)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedEntry {
    pub candidate: CandidateSummary,
    /// Position in the original pool.
    pub pool_index: usize,
    pub mu: f64,
    pub markers_stripped: usize,
}

/// A scored pool, sorted by descending mu.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedResult {
    pub doc_id: String,
    pub entries: Vec<RankedEntry>,
    /// Index into `entries` of the selected candidate.
    pub selected: usize,
    pub arg_reference: ArgReference,
}

impl RankedResult {
    pub fn selected(&self) -> &RankedEntry {
        &self.entries[self.selected]
    }
}
