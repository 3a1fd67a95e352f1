//! Three-format training set: every (document, reference) pair becomes a
//! raw, a binary-marked and a fine-grained-marked example sharing the same
//! target summary.

use std::collections::HashMap;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Document, FoldSpec, InputFormat, ReferenceSummary, RoleSource, Split};
use crate::io::{jsonl, write_atomic};
use crate::marker::{Marker, MarkerError};

pub const TRAIN_FILE: &str = "train.jsonl";
pub const VALIDATION_FILE: &str = "validation.jsonl";

#[derive(Debug, Error)]
pub enum AugmentError {
    #[error("document {doc_id:?} paired with reference for {ref_id:?}")]
    DocIdMismatch { doc_id: String, ref_id: String },
    #[error("document {doc_id:?} has no role labels")]
    Unlabeled { doc_id: String },
    #[error("document {doc_id:?} carries predicted labels; enable predicted labels to use it for training")]
    PredictedLabels { doc_id: String },
    #[error("fold {fold_id}: unknown doc_id {doc_id:?}")]
    UnknownDoc { fold_id: u8, doc_id: String },
    #[error(transparent)]
    Marker(#[from] MarkerError),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainingExample {
    pub doc_id: String,
    pub input_format: InputFormat,
    #[serde(rename = "input")]
    pub input_text: String,
    #[serde(rename = "target")]
    pub target_text: String,
}

impl TrainingExample {
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("training example serializes")
    }
}

/// Rendering options for the training set.
#[derive(Debug, Clone, Default)]
pub struct Augmenter {
    pub marker: Marker,
    /// Accept documents whose labels came from a classifier.
    pub allow_predicted: bool,
}

impl Augmenter {
    pub fn augment_pair(&self, doc: &Document, reference: &ReferenceSummary) -> Result<[TrainingExample; 3], AugmentError> {
        if doc.doc_id != reference.doc_id {
            return Err(AugmentError::DocIdMismatch { doc_id: doc.doc_id.clone(), ref_id: reference.doc_id.clone() });
        }
        match doc.role_source {
            RoleSource::None => return Err(AugmentError::Unlabeled { doc_id: doc.doc_id.clone() }),
            RoleSource::Predicted if !self.allow_predicted => {
                return Err(AugmentError::PredictedLabels { doc_id: doc.doc_id.clone() })
            }
            _ => {}
        }
        let example = |format: InputFormat| -> Result<TrainingExample, AugmentError> {
            Ok(TrainingExample {
                doc_id: doc.doc_id.clone(),
                input_format: format,
                input_text: self.marker.render(doc, format.into())?,
                target_text: reference.text.clone(),
            })
        };
        Ok([example(InputFormat::Raw)?, example(InputFormat::Binary)?, example(InputFormat::FineGrained)?])
    }

    /// Augment every pair, in input order.
    pub fn augment_all<'a>(
        &self,
        pairs: impl IntoIterator<Item = (&'a Document, &'a ReferenceSummary)>,
    ) -> Result<Vec<TrainingExample>, AugmentError> {
        let mut out = Vec::new();
        for (doc, reference) in pairs {
            out.extend(self.augment_pair(doc, reference)?);
        }
        Ok(out)
    }

    /// Write `train.jsonl` and `validation.jsonl` for one fold into `out_dir`.
    /// Pairs are emitted in input order; test-split documents are skipped.
    pub fn export_training_set(
        &self,
        pairs: &[(&Document, &ReferenceSummary)],
        fold: &FoldSpec,
        out_dir: &Path,
    ) -> Result<ExportCounts, AugmentError> {
        let known: HashMap<&str, usize> = pairs.iter().enumerate().map(|(i, (d, _))| (d.doc_id.as_str(), i)).collect();
        if let Some(id) = fold.doc_ids().find(|id| !known.contains_key(id)) {
            return Err(AugmentError::UnknownDoc { fold_id: fold.fold_id, doc_id: id.to_owned() });
        }
        let assignments = fold.assignments();
        let mut train = Vec::new();
        let mut validation = Vec::new();
        for (doc, reference) in pairs {
            let bucket = match assignments.get(doc.doc_id.as_str()) {
                Some(Split::Train) => &mut train,
                Some(Split::Validation) => &mut validation,
                _ => continue,
            };
            bucket.extend(self.augment_pair(doc, reference)?.iter().map(TrainingExample::to_line));
        }
        if validation.is_empty() {
            log::warn!("fold {}: validation split is empty", fold.fold_id);
        }
        let write = |name: &str, lines: &[String]| {
            let path = out_dir.join(name);
            write_atomic(&path, jsonl(lines).as_bytes()).map_err(|source| AugmentError::Io { path, source })
        };
        write(TRAIN_FILE, &train)?;
        write(VALIDATION_FILE, &validation)?;
        Ok(ExportCounts { fold_id: fold.fold_id, train: train.len(), validation: validation.len() })
    }
}

/// Lines written per split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExportCounts {
    pub fold_id: u8,
    pub train: usize,
    pub validation: usize,
}

pub fn augment_pair(doc: &Document, reference: &ReferenceSummary) -> Result<[TrainingExample; 3], AugmentError> {
    Augmenter::default().augment_pair(doc, reference)
}

/// Pair documents with their references by doc_id, keeping document order.
/// Documents without a reference are skipped.
pub fn pair_up<'a>(docs: &'a [Document], refs: &'a [ReferenceSummary]) -> Vec<(&'a Document, &'a ReferenceSummary)> {
    let by_id = crate::corpus::reference_map(refs);
    docs.iter().filter_map(|d| by_id.get(d.doc_id.as_str()).map(|r| (d, *r))).collect()
}
