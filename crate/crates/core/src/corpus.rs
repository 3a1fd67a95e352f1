//! Data model and JSONL ingestion for documents, reference summaries,
//! candidate summaries and cross-validation folds.
//!
//! Every loader validates the whole file before returning; a collection
//! that comes back from here satisfies all of the invariants documented on
//! its types. Text fields are normalized to Unicode NFC on load.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::fs;
use std::io::{self, BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

use crate::marker;
use crate::rouge::Tokenizer;

/// Largest beam width accepted by default.
pub const DEFAULT_MAX_BEAM: u32 = 5;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("line {line}: malformed record: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: invalid role {role:?} (expected Issue, Reason, Conclusion or NonArgument)")]
    InvalidRole { line: usize, role: String },
    #[error("line {line}: duplicate doc_id {doc_id:?}")]
    DuplicateId { line: usize, doc_id: String },
    #[error("line {line}: {message}")]
    Invalid { line: usize, message: String },
    #[error("{context}: unknown doc_id {doc_id:?}")]
    DanglingId { doc_id: String, context: String },
    #[error("invalid document {doc_id:?}: {message}")]
    InvalidDocument { doc_id: String, message: String },
    #[error("invalid fold {fold_id}: {message}")]
    InvalidFold { fold_id: u8, message: String },
    #[error("empty collection")]
    Empty,
}

/// Argument role of one sentence under the Issue / Reason / Conclusion scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ArgRole {
    Issue,
    Reason,
    Conclusion,
    NonArgument,
}

impl ArgRole {
    pub const ALL: [ArgRole; 4] = [ArgRole::Issue, ArgRole::Reason, ArgRole::Conclusion, ArgRole::NonArgument];

    pub fn as_str(self) -> &'static str {
        match self {
            ArgRole::Issue => "Issue",
            ArgRole::Reason => "Reason",
            ArgRole::Conclusion => "Conclusion",
            ArgRole::NonArgument => "NonArgument",
        }
    }

    pub fn is_argumentative(self) -> bool {
        self != ArgRole::NonArgument
    }
}

impl fmt::Display for ArgRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ArgRole {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ArgRole::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| s.to_owned())
    }
}

/// Where a document's role labels came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RoleSource {
    Oracle,
    Predicted,
    None,
}

impl RoleSource {
    pub fn as_str(self) -> &'static str {
        match self {
            RoleSource::Oracle => "oracle",
            RoleSource::Predicted => "predicted",
            RoleSource::None => "none",
        }
    }
}

impl FromStr for RoleSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [RoleSource::Oracle, RoleSource::Predicted, RoleSource::None]
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| format!("unknown role source {s:?}"))
    }
}

/// Input representation a candidate was decoded from. Ordering follows the
/// pool order: raw < binary < finegrained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum InputFormat {
    #[serde(rename = "raw")]
    Raw,
    #[serde(rename = "binary")]
    Binary,
    #[serde(rename = "finegrained")]
    FineGrained,
}

impl InputFormat {
    pub const ALL: [InputFormat; 3] = [InputFormat::Raw, InputFormat::Binary, InputFormat::FineGrained];

    pub fn as_str(self) -> &'static str {
        match self {
            InputFormat::Raw => "raw",
            InputFormat::Binary => "binary",
            InputFormat::FineGrained => "finegrained",
        }
    }
}

impl fmt::Display for InputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for InputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "raw" => Ok(InputFormat::Raw),
            "binary" => Ok(InputFormat::Binary),
            "finegrained" | "fine-grained" | "fine_grained" => Ok(InputFormat::FineGrained),
            _ => Err(format!("unknown input format {s:?} (expected raw, binary or finegrained)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub index: usize,
    pub text: String,
    pub role: ArgRole,
}

/// A sentence-split opinion with one role label per sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub doc_id: String,
    pub sentences: Vec<Sentence>,
    pub role_source: RoleSource,
}

impl Document {
    /// Build and validate a document. Sentence indices are assigned in order.
    pub fn new<I, S>(doc_id: impl Into<String>, role_source: RoleSource, sentences: I) -> Result<Self, CorpusError>
    where
        I: IntoIterator<Item = (S, ArgRole)>,
        S: Into<String>,
    {
        let doc = Document {
            doc_id: doc_id.into(),
            role_source,
            sentences: sentences
                .into_iter()
                .enumerate()
                .map(|(index, (text, role))| Sentence { index, text: text.into(), role })
                .collect(),
        };
        doc.validate()?;
        Ok(doc)
    }

    pub fn validate(&self) -> Result<(), CorpusError> {
        let fail = |message: String| CorpusError::InvalidDocument { doc_id: self.doc_id.clone(), message };
        if self.doc_id.is_empty() {
            return Err(fail("doc_id is empty".into()));
        }
        for (i, s) in self.sentences.iter().enumerate() {
            if s.index != i {
                return Err(fail(format!("sentence index {} at position {i}", s.index)));
            }
            if s.text.trim().is_empty() {
                return Err(fail(format!("sentence {i} has empty text")));
            }
            if let Some(token) = marker::find_marker(&s.text) {
                return Err(fail(format!("sentence {i} contains reserved marker token {token}")));
            }
            if self.role_source == RoleSource::None && s.role.is_argumentative() {
                return Err(fail(format!("sentence {i} has role {} but role_source is none", s.role)));
            }
        }
        Ok(())
    }

    pub fn roles(&self) -> impl Iterator<Item = ArgRole> + '_ {
        self.sentences.iter().map(|s| s.role)
    }

    /// All sentence texts joined by single spaces.
    pub fn full_text(&self) -> String {
        join_texts(self.sentences.iter().map(|s| s.text.as_str()))
    }
}

pub(crate) fn join_texts<'a>(texts: impl Iterator<Item = &'a str>) -> String {
    texts.collect::<Vec<_>>().join(" ")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReferenceSummary {
    pub doc_id: String,
    pub text: String,
}

/// One decoded summary and its provenance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateSummary {
    pub doc_id: String,
    pub text: String,
    pub input_format: InputFormat,
    pub beam_width: u32,
    pub generator_id: String,
}

/// The candidates competing for one document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidatePool {
    pub doc_id: String,
    pub candidates: Vec<CandidateSummary>,
}

impl CandidatePool {
    pub fn new(doc_id: impl Into<String>, candidates: Vec<CandidateSummary>) -> Result<Self, CorpusError> {
        let doc_id = doc_id.into();
        if let Some(stray) = candidates.iter().find(|c| c.doc_id != doc_id) {
            return Err(CorpusError::InvalidDocument {
                doc_id: doc_id.clone(),
                message: format!("pool contains a candidate for {:?}", stray.doc_id),
            });
        }
        Ok(Self { doc_id, candidates })
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Validation,
    Test,
}

/// One cross-validation fold: every listed doc_id belongs to exactly one split.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldSpec {
    pub fold_id: u8,
    pub train: Vec<String>,
    pub validation: Vec<String>,
    pub test: Vec<String>,
}

impl FoldSpec {
    pub fn validate(&self) -> Result<(), CorpusError> {
        if self.fold_id > 4 {
            return Err(CorpusError::InvalidFold { fold_id: self.fold_id, message: "fold_id must be in 0..=4".into() });
        }
        let mut seen = HashSet::new();
        for id in self.train.iter().chain(&self.validation).chain(&self.test) {
            if !seen.insert(id.as_str()) {
                return Err(CorpusError::InvalidFold {
                    fold_id: self.fold_id,
                    message: format!("doc_id {id:?} assigned more than once"),
                });
            }
        }
        Ok(())
    }

    pub fn split_of(&self, doc_id: &str) -> Option<Split> {
        let has = |ids: &[String]| ids.iter().any(|d| d == doc_id);
        if has(&self.train) {
            Some(Split::Train)
        } else if has(&self.validation) {
            Some(Split::Validation)
        } else if has(&self.test) {
            Some(Split::Test)
        } else {
            None
        }
    }

    pub fn assignments(&self) -> BTreeMap<&str, Split> {
        let mut out = BTreeMap::new();
        for (ids, split) in [(&self.train, Split::Train), (&self.validation, Split::Validation), (&self.test, Split::Test)] {
            out.extend(ids.iter().map(|d| (d.as_str(), split)));
        }
        out
    }

    pub fn doc_ids(&self) -> impl Iterator<Item = &str> {
        self.train.iter().chain(&self.validation).chain(&self.test).map(String::as_str)
    }
}

// On-disk record shapes.

#[derive(Serialize, Deserialize)]
struct SentenceRecord {
    text: String,
    role: String,
}

#[derive(Serialize, Deserialize)]
struct DocumentRecord {
    doc_id: String,
    role_source: RoleSource,
    sentences: Vec<SentenceRecord>,
}

fn nfc(s: &str) -> String {
    s.nfc().collect()
}

fn parse_document(line_no: usize, line: &str) -> Result<Document, CorpusError> {
    let record: DocumentRecord = serde_json::from_str(line)
        .map_err(|e| CorpusError::Malformed { line: line_no, message: e.to_string() })?;
    let mut sentences = Vec::with_capacity(record.sentences.len());
    for s in record.sentences {
        let role = s
            .role
            .parse::<ArgRole>()
            .map_err(|role| CorpusError::InvalidRole { line: line_no, role })?;
        sentences.push((nfc(&s.text), role));
    }
    Document::new(nfc(&record.doc_id), record.role_source, sentences)
        .map_err(|e| CorpusError::Invalid { line: line_no, message: e.to_string() })
}

/// Canonical one-line JSON encoding of a document.
pub fn document_to_line(doc: &Document) -> String {
    let record = DocumentRecord {
        doc_id: doc.doc_id.clone(),
        role_source: doc.role_source,
        sentences: doc
            .sentences
            .iter()
            .map(|s| SentenceRecord { text: s.text.clone(), role: s.role.as_str().to_owned() })
            .collect(),
    };
    serde_json::to_string(&record).expect("document serializes")
}

pub fn reference_to_line(reference: &ReferenceSummary) -> String {
    serde_json::to_string(reference).expect("reference serializes")
}

pub fn candidate_to_line(candidate: &CandidateSummary) -> String {
    serde_json::to_string(candidate).expect("candidate serializes")
}

pub fn fold_to_line(fold: &FoldSpec) -> String {
    serde_json::to_string(fold).expect("fold serializes")
}

/// Iterate non-blank lines with 1-based line numbers.
fn for_each_line<R: BufRead>(
    reader: R,
    mut f: impl FnMut(usize, &str) -> Result<(), CorpusError>,
) -> Result<(), CorpusError> {
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| CorpusError::Malformed { line: line_no, message: e.to_string() })?;
        if line.trim().is_empty() {
            continue;
        }
        f(line_no, &line)?;
    }
    Ok(())
}

/// Read arbitrary JSONL records, reporting the line of the first malformed one.
pub fn read_records<T: serde::de::DeserializeOwned, R: BufRead>(reader: R) -> Result<Vec<T>, CorpusError> {
    let mut out = Vec::new();
    for_each_line(reader, |line_no, line| {
        out.push(serde_json::from_str(line).map_err(|e| CorpusError::Malformed { line: line_no, message: e.to_string() })?);
        Ok(())
    })?;
    Ok(out)
}

pub fn load_records<T: serde::de::DeserializeOwned>(path: impl AsRef<Path>) -> Result<Vec<T>, CorpusError> {
    read_records(open(path.as_ref())?)
}

fn check_unique(seen: &mut HashSet<String>, line: usize, doc_id: &str) -> Result<(), CorpusError> {
    if !seen.insert(doc_id.to_owned()) {
        return Err(CorpusError::DuplicateId { line, doc_id: doc_id.to_owned() });
    }
    Ok(())
}

pub fn read_documents<R: BufRead>(reader: R) -> Result<Vec<Document>, CorpusError> {
    let mut docs = Vec::new();
    let mut seen = HashSet::new();
    for_each_line(reader, |line_no, line| {
        let doc = parse_document(line_no, line)?;
        check_unique(&mut seen, line_no, &doc.doc_id)?;
        docs.push(doc);
        Ok(())
    })?;
    Ok(docs)
}

pub fn read_references<R: BufRead>(reader: R) -> Result<Vec<ReferenceSummary>, CorpusError> {
    let mut refs = Vec::new();
    let mut seen = HashSet::new();
    for_each_line(reader, |line_no, line| {
        let r: ReferenceSummary = serde_json::from_str(line)
            .map_err(|e| CorpusError::Malformed { line: line_no, message: e.to_string() })?;
        let r = ReferenceSummary { doc_id: nfc(&r.doc_id), text: nfc(&r.text) };
        if r.text.trim().is_empty() {
            return Err(CorpusError::Invalid { line: line_no, message: "reference text is empty".into() });
        }
        check_unique(&mut seen, line_no, &r.doc_id)?;
        refs.push(r);
        Ok(())
    })?;
    Ok(refs)
}

pub fn read_candidates<R: BufRead>(reader: R, max_beam: u32) -> Result<Vec<CandidateSummary>, CorpusError> {
    let mut cands = Vec::new();
    for_each_line(reader, |line_no, line| {
        let c: CandidateSummary = serde_json::from_str(line)
            .map_err(|e| CorpusError::Malformed { line: line_no, message: e.to_string() })?;
        if c.beam_width < 1 || c.beam_width > max_beam {
            return Err(CorpusError::Invalid {
                line: line_no,
                message: format!("beam_width {} outside 1..={max_beam}", c.beam_width),
            });
        }
        cands.push(CandidateSummary { doc_id: nfc(&c.doc_id), text: nfc(&c.text), ..c });
        Ok(())
    })?;
    Ok(cands)
}

pub fn read_folds<R: BufRead>(reader: R) -> Result<Vec<FoldSpec>, CorpusError> {
    let mut folds = Vec::new();
    let mut seen = HashSet::new();
    for_each_line(reader, |line_no, line| {
        let f: FoldSpec = serde_json::from_str(line)
            .map_err(|e| CorpusError::Malformed { line: line_no, message: e.to_string() })?;
        f.validate().map_err(|e| CorpusError::Invalid { line: line_no, message: e.to_string() })?;
        if !seen.insert(f.fold_id) {
            return Err(CorpusError::Invalid { line: line_no, message: format!("duplicate fold_id {}", f.fold_id) });
        }
        folds.push(f);
        Ok(())
    })?;
    Ok(folds)
}

fn open(path: &Path) -> Result<BufReader<fs::File>, CorpusError> {
    fs::File::open(path)
        .map(BufReader::new)
        .map_err(|source| CorpusError::Io { path: path.to_owned(), source })
}

pub fn load_documents(path: impl AsRef<Path>) -> Result<Vec<Document>, CorpusError> {
    read_documents(open(path.as_ref())?)
}

pub fn load_references(path: impl AsRef<Path>) -> Result<Vec<ReferenceSummary>, CorpusError> {
    read_references(open(path.as_ref())?)
}

pub fn load_candidates(path: impl AsRef<Path>, max_beam: u32) -> Result<Vec<CandidateSummary>, CorpusError> {
    read_candidates(open(path.as_ref())?, max_beam)
}

pub fn load_folds(path: impl AsRef<Path>) -> Result<Vec<FoldSpec>, CorpusError> {
    read_folds(open(path.as_ref())?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusKind {
    Documents,
    References,
    Candidates,
    Folds,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Collection {
    Documents(Vec<Document>),
    References(Vec<ReferenceSummary>),
    Candidates(Vec<CandidateSummary>),
    Folds(Vec<FoldSpec>),
}

impl Collection {
    pub fn len(&self) -> usize {
        match self {
            Collection::Documents(v) => v.len(),
            Collection::References(v) => v.len(),
            Collection::Candidates(v) => v.len(),
            Collection::Folds(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Load any of the four record kinds. Candidates use [`DEFAULT_MAX_BEAM`].
pub fn load_corpus(path: impl AsRef<Path>, kind: CorpusKind) -> Result<Collection, CorpusError> {
    let path = path.as_ref();
    Ok(match kind {
        CorpusKind::Documents => Collection::Documents(load_documents(path)?),
        CorpusKind::References => Collection::References(load_references(path)?),
        CorpusKind::Candidates => Collection::Candidates(load_candidates(path, DEFAULT_MAX_BEAM)?),
        CorpusKind::Folds => Collection::Folds(load_folds(path)?),
    })
}

fn known_ids(docs: &[Document]) -> HashSet<&str> {
    docs.iter().map(|d| d.doc_id.as_str()).collect()
}

/// Check that every reference points at a loaded document.
pub fn check_references(refs: &[ReferenceSummary], docs: &[Document]) -> Result<(), CorpusError> {
    let known = known_ids(docs);
    match refs.iter().find(|r| !known.contains(r.doc_id.as_str())) {
        Some(r) => Err(CorpusError::DanglingId { doc_id: r.doc_id.clone(), context: "references".into() }),
        None => Ok(()),
    }
}

pub fn check_candidates(cands: &[CandidateSummary], docs: &[Document]) -> Result<(), CorpusError> {
    let known = known_ids(docs);
    match cands.iter().find(|c| !known.contains(c.doc_id.as_str())) {
        Some(c) => Err(CorpusError::DanglingId { doc_id: c.doc_id.clone(), context: "candidates".into() }),
        None => Ok(()),
    }
}

pub fn check_folds(folds: &[FoldSpec], docs: &[Document]) -> Result<(), CorpusError> {
    let known = known_ids(docs);
    for fold in folds {
        if let Some(id) = fold.doc_ids().find(|id| !known.contains(id)) {
            return Err(CorpusError::DanglingId { doc_id: id.to_owned(), context: format!("fold {}", fold.fold_id) });
        }
    }
    Ok(())
}

/// Index references by doc_id.
pub fn reference_map(refs: &[ReferenceSummary]) -> HashMap<&str, &ReferenceSummary> {
    refs.iter().map(|r| (r.doc_id.as_str(), r)).collect()
}

/// Corpus size and length summary, in tokenizer words.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub count: usize,
    pub mean_words: f64,
    pub max_words: usize,
}

pub fn document_word_count(doc: &Document, tokenizer: &Tokenizer) -> usize {
    doc.sentences.iter().map(|s| tokenizer.tokenize(&s.text).len()).sum()
}

pub fn corpus_stats(docs: &[Document]) -> Result<CorpusStats, CorpusError> {
    if docs.is_empty() {
        return Err(CorpusError::Empty);
    }
    let tokenizer = Tokenizer::default();
    let counts: Vec<usize> = docs.iter().map(|d| document_word_count(d, &tokenizer)).collect();
    Ok(CorpusStats {
        count: docs.len(),
        mean_words: counts.iter().sum::<usize>() as f64 / docs.len() as f64,
        max_words: counts.iter().copied().max().unwrap_or(0),
    })
}
