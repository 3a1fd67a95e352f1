//! Pool assembly, per-document reranking, evaluation and system comparison.

mod pool;
mod report;
mod significance;

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::argscore::{RankError, RankedResult, Scorer};
use crate::corpus::{CandidateSummary, CorpusError, Document, InputFormat};

pub use pool::{assemble_pool, PoolPolicy};
pub use report::{
    evaluate, DocScores, Evaluator, ExtraMetric, FoldMeans, MetricMeans, ReportHeader, SelectedSummary, SystemReport,
};
pub use significance::{compare_systems, MetricComparison, SignificanceRecord, DEFAULT_TRIALS, MIN_TRIALS};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Rank(#[from] RankError),
    #[error("invalid pool policy: {0}")]
    InvalidPolicy(String),
    #[error("no candidates match the pool policy for {doc_id:?}")]
    NoCandidates { doc_id: String },
    #[error("no reference summary for {doc_id:?}")]
    MissingReference { doc_id: String },
    #[error("duplicate selection for {doc_id:?}")]
    DuplicateSelection { doc_id: String },
    #[error("reports cover different documents: {0}")]
    DocSetMismatch(String),
    #[error("bootstrap needs at least {MIN_TRIALS} trials, got {0}")]
    TooFewTrials(usize),
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

/// Run `f` on a dedicated pool of `jobs` threads, or the global pool when
/// `jobs` is `None`.
pub fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, PipelineError> {
    match jobs {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| PipelineError::ThreadPool(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

/// Rank every document's pool. Results are sorted by doc_id.
pub fn run_reranking(
    docs: &[Document],
    candidates: &[CandidateSummary],
    policy: &PoolPolicy,
    scorer: &Scorer,
) -> Result<Vec<RankedResult>, PipelineError> {
    policy.validate()?;
    let mut by_doc: HashMap<&str, Vec<&CandidateSummary>> = HashMap::new();
    for c in candidates {
        by_doc.entry(c.doc_id.as_str()).or_default().push(c);
    }
    let mut results = docs
        .par_iter()
        .map(|doc| {
            let cands = by_doc.get(doc.doc_id.as_str()).map(Vec::as_slice).unwrap_or_default();
            let pool = assemble_pool(cands.iter().copied(), &doc.doc_id, policy)?;
            Ok(scorer.rank_pool(&pool, doc)?)
        })
        .collect::<Result<Vec<_>, PipelineError>>()?;
    results.sort_by(|a, b| a.doc_id.cmp(&b.doc_id));
    Ok(results)
}

/// One line of the selections file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub doc_id: String,
    pub text: String,
    pub input_format: InputFormat,
    pub beam_width: u32,
    pub generator_id: String,
    pub mu: f64,
    pub pool_size: usize,
    pub arg_reference_fallback: bool,
    pub markers_stripped: usize,
}

impl From<&RankedResult> for Selection {
    fn from(r: &RankedResult) -> Self {
        let top = r.selected();
        Selection {
            doc_id: r.doc_id.clone(),
            text: top.candidate.text.clone(),
            input_format: top.candidate.input_format,
            beam_width: top.candidate.beam_width,
            generator_id: top.candidate.generator_id.clone(),
            mu: top.mu,
            pool_size: r.entries.len(),
            arg_reference_fallback: r.arg_reference.fallback,
            markers_stripped: top.markers_stripped,
        }
    }
}

/// One line of the per-candidate score dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRow {
    pub doc_id: String,
    pub rank: usize,
    pub pool_index: usize,
    pub input_format: InputFormat,
    pub beam_width: u32,
    pub generator_id: String,
    pub mu: f64,
    pub markers_stripped: usize,
}

pub fn score_rows(r: &RankedResult) -> impl Iterator<Item = ScoreRow> + '_ {
    r.entries.iter().enumerate().map(move |(rank, e)| ScoreRow {
        doc_id: r.doc_id.clone(),
        rank,
        pool_index: e.pool_index,
        input_format: e.candidate.input_format,
        beam_width: e.candidate.beam_width,
        generator_id: e.candidate.generator_id.clone(),
        mu: e.mu,
        markers_stripped: e.markers_stripped,
    })
}
