use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::corpus::{CandidatePool, CandidateSummary, InputFormat, DEFAULT_MAX_BEAM};
use crate::marker::normalize_whitespace;

/// Which generator outputs enter a document's candidate pool.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoolPolicy {
    pub formats: BTreeSet<InputFormat>,
    pub beam_widths: BTreeSet<u32>,
    /// Drop candidates whose whitespace-normalized text repeats an earlier one.
    pub dedupe: bool,
    /// Keep every returned beam per (format, width) rather than only the top one.
    pub all_beams: bool,
    pub max_beam: u32,
}

impl Default for PoolPolicy {
    fn default() -> Self {
        Self {
            formats: InputFormat::ALL.into_iter().collect(),
            beam_widths: (1..=DEFAULT_MAX_BEAM).collect(),
            dedupe: false,
            all_beams: false,
            max_beam: DEFAULT_MAX_BEAM,
        }
    }
}

impl PoolPolicy {
    pub fn new(formats: impl IntoIterator<Item = InputFormat>, beam_widths: impl IntoIterator<Item = u32>) -> Self {
        Self {
            formats: formats.into_iter().collect(),
            beam_widths: beam_widths.into_iter().collect(),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        if self.formats.is_empty() {
            return Err(PipelineError::InvalidPolicy("no input formats selected".into()));
        }
        if self.beam_widths.is_empty() {
            return Err(PipelineError::InvalidPolicy("no beam widths selected".into()));
        }
        if let Some(b) = self.beam_widths.iter().find(|&&b| b < 1 || b > self.max_beam) {
            return Err(PipelineError::InvalidPolicy(format!("beam width {b} outside 1..={}", self.max_beam)));
        }
        Ok(())
    }

    pub fn admits(&self, c: &CandidateSummary) -> bool {
        self.formats.contains(&c.input_format) && self.beam_widths.contains(&c.beam_width)
    }

    /// Every policy obtained by keeping a non-empty subset of formats and a
    /// non-empty subset of beam widths.
    pub fn subsets(&self) -> Vec<PoolPolicy> {
        let formats: Vec<_> = self.formats.iter().copied().collect();
        let beams: Vec<_> = self.beam_widths.iter().copied().collect();
        let mut out = Vec::new();
        for fmask in 1u32..(1 << formats.len()) {
            for bmask in 1u32..(1 << beams.len()) {
                let pick = |mask: u32, i: usize| mask & (1 << i) != 0;
                out.push(PoolPolicy {
                    formats: formats.iter().enumerate().filter(|(i, _)| pick(fmask, *i)).map(|(_, f)| *f).collect(),
                    beam_widths: beams.iter().enumerate().filter(|(i, _)| pick(bmask, *i)).map(|(_, b)| *b).collect(),
                    ..self.clone()
                });
            }
        }
        out
    }
}

/// Build the pool for `doc_id`. Candidates are ordered by format
/// (raw, binary, finegrained) then beam width; within one (format, width)
/// slot the first candidate in input order is the top-decoded one.
pub fn assemble_pool<'a>(
    candidates: impl IntoIterator<Item = &'a CandidateSummary>,
    doc_id: &str,
    policy: &PoolPolicy,
) -> Result<CandidatePool, PipelineError> {
    let mut picked: Vec<&CandidateSummary> =
        candidates.into_iter().filter(|c| c.doc_id == doc_id && policy.admits(c)).collect();
    picked.sort_by_key(|c| (c.input_format, c.beam_width));
    if !policy.all_beams {
        picked.dedup_by_key(|c| (c.input_format, c.beam_width));
    }
    if policy.dedupe {
        let mut seen = HashSet::new();
        picked.retain(|c| seen.insert(normalize_whitespace(&c.text)));
    }
    if picked.is_empty() {
        return Err(PipelineError::NoCandidates { doc_id: doc_id.to_owned() });
    }
    Ok(CandidatePool::new(doc_id, picked.into_iter().cloned().collect())?)
}
