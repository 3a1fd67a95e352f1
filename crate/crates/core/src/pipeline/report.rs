use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::corpus::{FoldSpec, ReferenceSummary};
use crate::rouge::{rouge_all, Tokenizer};

/// Additional per-document metric (e.g. an externally computed BERTScore).
/// Scores are expected in `[0, 1]`.
pub trait ExtraMetric: Send + Sync {
    fn name(&self) -> &str;
    fn score(&self, candidate: &str, reference: &str) -> f64;
}

/// The part of a selections line that evaluation reads.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectedSummary {
    pub doc_id: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocScores {
    pub doc_id: String,
    pub r1: f64,
    pub r2: f64,
    pub rl: f64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, f64>,
}

/// Mean F1 per metric, in `[0, 1]`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricMeans {
    pub r1: f64,
    pub r2: f64,
    pub rl: f64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, f64>,
}

impl MetricMeans {
    fn of_docs<'a>(docs: impl IntoIterator<Item = &'a DocScores>) -> Self {
        Self::mean_of(docs.into_iter().map(|d| (d.r1, d.r2, d.rl, &d.extra)))
    }

    fn of_means<'a>(means: impl IntoIterator<Item = &'a MetricMeans>) -> Self {
        Self::mean_of(means.into_iter().map(|m| (m.r1, m.r2, m.rl, &m.extra)))
    }

    fn mean_of<'a>(rows: impl Iterator<Item = (f64, f64, f64, &'a BTreeMap<String, f64>)>) -> Self {
        let mut n = 0usize;
        let mut acc = MetricMeans::default();
        for (r1, r2, rl, extra) in rows {
            n += 1;
            acc.r1 += r1;
            acc.r2 += r2;
            acc.rl += rl;
            for (k, v) in extra {
                *acc.extra.entry(k.clone()).or_insert(0.0) += v;
            }
        }
        if n > 0 {
            let n = n as f64;
            acc.r1 /= n;
            acc.r2 /= n;
            acc.rl /= n;
            acc.extra.values_mut().for_each(|v| *v /= n);
        }
        acc
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldMeans {
    pub fold_id: u8,
    pub documents: usize,
    pub means: MetricMeans,
}

/// Settings that determine how the numbers in a report were produced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportHeader {
    pub tool: String,
    pub version: String,
    pub tokenizer: String,
    pub rouge_l: String,
    pub f_measure: String,
    pub aggregation: String,
    pub significance_test: String,
}

impl ReportHeader {
    pub fn new(tokenizer: &Tokenizer, folds: bool) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            tokenizer: format!(
                "lowercase, split on non-alphanumeric runs, stemming {}",
                if tokenizer.stem { "on" } else { "off" }
            ),
            rouge_l: "summary-level LCS".into(),
            f_measure: "F1".into(),
            aggregation: if folds { "unweighted mean of fold means" } else { "mean over documents" }.into(),
            significance_test: super::significance::TEST_NAME.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemReport {
    pub system_id: String,
    pub header: ReportHeader,
    /// Sorted by doc_id.
    pub documents: Vec<DocScores>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub folds: Vec<FoldMeans>,
    pub corpus: MetricMeans,
}

fn pct(x: f64) -> String {
    format!("{:.2}", x * 100.0)
}

impl SystemReport {
    pub fn extra_names(&self) -> Vec<String> {
        self.corpus.extra.keys().cloned().collect()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Aligned text table, scores ×100 with two decimals.
    pub fn render_table(&self) -> String {
        let extras = self.extra_names();
        let mut header = vec!["system".to_owned(), "fold".into(), "docs".into(), "R-1".into(), "R-2".into(), "R-L".into()];
        header.extend(extras.iter().cloned());
        let row = |fold: String, docs: usize, m: &MetricMeans| {
            let mut cells = vec![self.system_id.clone(), fold, docs.to_string(), pct(m.r1), pct(m.r2), pct(m.rl)];
            cells.extend(extras.iter().map(|k| m.extra.get(k).map_or_else(|| "-".into(), |v| pct(*v))));
            cells
        };
        let mut rows = vec![header];
        for f in &self.folds {
            rows.push(row(f.fold_id.to_string(), f.documents, &f.means));
        }
        rows.push(row("all".into(), self.documents.len(), &self.corpus));

        let widths: Vec<usize> =
            (0..rows[0].len()).map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0)).collect();
        let mut out = String::new();
        for r in &rows {
            let cells: Vec<String> = r
                .iter()
                .enumerate()
                .map(|(c, cell)| if c == 0 { format!("{cell:<w$}", w = widths[c]) } else { format!("{cell:>w$}", w = widths[c]) })
                .collect();
            let _ = writeln!(out, "{}", cells.join("  "));
        }
        out
    }
}

/// Scores selected summaries against references.
#[derive(Default)]
pub struct Evaluator {
    pub tokenizer: Tokenizer,
    pub extras: Vec<Box<dyn ExtraMetric>>,
}

impl Evaluator {
    pub fn new(tokenizer: Tokenizer) -> Self {
        Self { tokenizer, extras: Vec::new() }
    }

    pub fn with_extra(mut self, metric: Box<dyn ExtraMetric>) -> Self {
        self.extras.push(metric);
        self
    }

    pub fn score_doc(&self, doc_id: &str, candidate: &str, reference: &str) -> DocScores {
        let scores = rouge_all(&self.tokenizer.tokenize(candidate), &self.tokenizer.tokenize(reference));
        DocScores {
            doc_id: doc_id.to_owned(),
            r1: scores.rouge1.f1,
            r2: scores.rouge2.f1,
            rl: scores.rouge_l.f1,
            extra: self.extras.iter().map(|m| (m.name().to_owned(), m.score(candidate, reference))).collect(),
        }
    }

    /// Per-document scores, then per-fold means over each fold's test split
    /// and a corpus mean (mean of fold means when folds are given).
    pub fn evaluate(
        &self,
        system_id: &str,
        selections: &[SelectedSummary],
        references: &[ReferenceSummary],
        folds: Option<&[FoldSpec]>,
    ) -> Result<SystemReport, PipelineError> {
        let refs: HashMap<&str, &ReferenceSummary> = references.iter().map(|r| (r.doc_id.as_str(), r)).collect();
        let mut seen = HashSet::new();
        let mut documents = Vec::with_capacity(selections.len());
        for sel in selections {
            if !seen.insert(sel.doc_id.as_str()) {
                return Err(PipelineError::DuplicateSelection { doc_id: sel.doc_id.clone() });
            }
            let reference =
                refs.get(sel.doc_id.as_str()).ok_or_else(|| PipelineError::MissingReference { doc_id: sel.doc_id.clone() })?;
            documents.push(self.score_doc(&sel.doc_id, &sel.text, &reference.text));
        }
        documents.sort_by(|a, b| a.doc_id.cmp(&b.doc_id));

        let mut fold_means = Vec::new();
        if let Some(folds) = folds {
            let by_id: HashMap<&str, &DocScores> = documents.iter().map(|d| (d.doc_id.as_str(), d)).collect();
            let mut ordered: Vec<&FoldSpec> = folds.iter().collect();
            ordered.sort_by_key(|f| f.fold_id);
            let mut covered = HashSet::new();
            for fold in ordered {
                let members: Vec<&DocScores> =
                    fold.test.iter().filter_map(|id| by_id.get(id.as_str()).copied()).collect();
                if members.is_empty() {
                    log::warn!("fold {}: no evaluated documents in the test split", fold.fold_id);
                    continue;
                }
                covered.extend(members.iter().map(|d| d.doc_id.as_str()));
                fold_means.push(FoldMeans {
                    fold_id: fold.fold_id,
                    documents: members.len(),
                    means: MetricMeans::of_docs(members),
                });
            }
            let uncovered = documents.len() - covered.len();
            if uncovered > 0 {
                log::warn!("{uncovered} evaluated documents are not in any fold's test split");
            }
        }
        let corpus = if fold_means.is_empty() {
            MetricMeans::of_docs(&documents)
        } else {
            MetricMeans::of_means(fold_means.iter().map(|f| &f.means))
        };
        Ok(SystemReport {
            system_id: system_id.to_owned(),
            header: ReportHeader::new(&self.tokenizer, !fold_means.is_empty()),
            documents,
            folds: fold_means,
            corpus,
        })
    }
}

pub fn evaluate(
    system_id: &str,
    selections: &[SelectedSummary],
    references: &[ReferenceSummary],
    folds: Option<&[FoldSpec]>,
) -> Result<SystemReport, PipelineError> {
    Evaluator::default().evaluate(system_id, selections, references, folds)
}
