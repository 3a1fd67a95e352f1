//! Python bindings for the `argsum` core crate.

use argsum::argscore::{self, RankingMetric};
use argsum::corpus::{self, ArgRole, CandidatePool, CandidateSummary, InputFormat, RoleSource};
use argsum::marker::{Marker, MarkerScheme};
use argsum::rouge::{self, TokenSeq, Tokenizer};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn tokens(text: &str, stem: bool) -> TokenSeq {
    Tokenizer { stem }.tokenize(text)
}

#[pyclass(name = "RougeScore", frozen, eq, skip_from_py_object)]
#[derive(Clone, Copy, PartialEq)]
struct PyRougeScore {
    #[pyo3(get)]
    precision: f64,
    #[pyo3(get)]
    recall: f64,
    #[pyo3(get)]
    f1: f64,
}

#[pymethods]
impl PyRougeScore {
    fn __repr__(&self) -> String {
        format!("RougeScore(precision={}, recall={}, f1={})", self.precision, self.recall, self.f1)
    }
}

impl From<rouge::RougeScore> for PyRougeScore {
    fn from(s: rouge::RougeScore) -> Self {
        Self { precision: s.precision, recall: s.recall, f1: s.f1 }
    }
}

/// A sentence-split document with one role per sentence.
#[pyclass(name = "Document", frozen)]
struct PyDocument {
    inner: corpus::Document,
}

#[pymethods]
impl PyDocument {
    /// `sentences` is a list of `(text, role)` pairs; roles are
    /// Issue, Reason, Conclusion or NonArgument.
    #[new]
    #[pyo3(signature = (doc_id, sentences, role_source = "oracle"))]
    fn new(doc_id: String, sentences: Vec<(String, String)>, role_source: &str) -> PyResult<Self> {
        let source: RoleSource = role_source.parse().map_err(value_err)?;
        let sentences = sentences
            .into_iter()
            .map(|(text, role)| role.parse::<ArgRole>().map(|r| (text, r)))
            .collect::<Result<Vec<_>, _>>()
            .map_err(value_err)?;
        let inner = corpus::Document::new(doc_id, source, sentences).map_err(value_err)?;
        Ok(Self { inner })
    }

    /// Parse one line of a documents JSONL file.
    #[staticmethod]
    fn from_json(line: &str) -> PyResult<Self> {
        let mut docs = corpus::read_documents(line.as_bytes()).map_err(value_err)?;
        match docs.len() {
            1 => Ok(Self { inner: docs.remove(0) }),
            n => Err(PyValueError::new_err(format!("expected one document, got {n}"))),
        }
    }

    fn to_json(&self) -> String {
        corpus::document_to_line(&self.inner)
    }

    #[getter]
    fn doc_id(&self) -> &str {
        &self.inner.doc_id
    }

    #[getter]
    fn role_source(&self) -> &'static str {
        self.inner.role_source.as_str()
    }

    #[getter]
    fn sentences(&self) -> Vec<(String, &'static str)> {
        self.inner.sentences.iter().map(|s| (s.text.clone(), s.role.as_str())).collect()
    }

    fn __len__(&self) -> usize {
        self.inner.sentences.len()
    }

    fn __repr__(&self) -> String {
        format!("Document(doc_id={:?}, sentences={})", self.inner.doc_id, self.inner.sentences.len())
    }
}

#[pyfunction]
#[pyo3(signature = (text, stem = false))]
fn tokenize(text: &str, stem: bool) -> Vec<String> {
    tokens(text, stem).into_inner()
}

#[pyfunction]
#[pyo3(signature = (candidate, reference, n = 1, stem = false))]
fn rouge_n(candidate: &str, reference: &str, n: usize, stem: bool) -> PyResult<PyRougeScore> {
    if n == 0 {
        return Err(PyValueError::new_err("n must be at least 1"));
    }
    Ok(rouge::rouge_n(&tokens(candidate, stem), &tokens(reference, stem), n).into())
}

#[pyfunction]
#[pyo3(signature = (candidate, reference, stem = false))]
fn rouge_l(candidate: &str, reference: &str, stem: bool) -> PyRougeScore {
    rouge::rouge_l(&tokens(candidate, stem), &tokens(reference, stem)).into()
}

#[pyfunction]
fn lcs_len(a: Vec<String>, b: Vec<String>) -> usize {
    rouge::lcs_len(&a, &b)
}

/// Render a document as raw, binary or finegrained marked text.
#[pyfunction]
#[pyo3(signature = (doc, scheme, separator = " "))]
fn render(doc: &PyDocument, scheme: &str, separator: &str) -> PyResult<String> {
    let scheme: MarkerScheme = scheme.parse().map_err(value_err)?;
    Marker::with_separator(separator).render(&doc.inner, scheme).map_err(value_err)
}

/// Recover `(text, role)` pairs from marked text given the sentence texts.
#[pyfunction]
#[pyo3(signature = (marked, scheme, sentences, separator = " "))]
fn parse(marked: &str, scheme: &str, sentences: Vec<String>, separator: &str) -> PyResult<Vec<(String, &'static str)>> {
    let scheme: MarkerScheme = scheme.parse().map_err(value_err)?;
    let parsed = Marker::with_separator(separator).parse(marked, scheme, &sentences).map_err(value_err)?;
    Ok(parsed.into_iter().map(|(t, r)| (t, r.as_str())).collect())
}

/// Returns `(text, fallback)`.
#[pyfunction]
fn build_arg_reference(doc: &PyDocument) -> (String, bool) {
    let r = argscore::build_arg_reference(&doc.inner);
    (r.text, r.fallback)
}

#[pyfunction]
#[pyo3(signature = (candidate, arg_reference, metric = "R1"))]
fn score_candidate(candidate: &str, arg_reference: &str, metric: &str) -> PyResult<f64> {
    let metric: RankingMetric = metric.parse().map_err(value_err)?;
    Ok(argscore::score_candidate(candidate, arg_reference, metric))
}

/// Rank candidate texts for one document. Returns `(index, mu)` pairs,
/// best first; ties keep input order.
#[pyfunction]
#[pyo3(signature = (doc, candidates, metric = "R1"))]
fn rank(py: Python<'_>, doc: &PyDocument, candidates: Vec<String>, metric: &str) -> PyResult<Vec<(usize, f64)>> {
    let metric: RankingMetric = metric.parse().map_err(value_err)?;
    let pool: Vec<CandidateSummary> = candidates
        .into_iter()
        .map(|text| CandidateSummary {
            doc_id: doc.inner.doc_id.clone(),
            text,
            input_format: InputFormat::Raw,
            beam_width: 1,
            generator_id: "python".into(),
        })
        .collect();
    let pool = CandidatePool::new(doc.inner.doc_id.clone(), pool).map_err(value_err)?;
    let ranked = py.detach(|| argscore::rank_pool(&pool, &doc.inner, metric)).map_err(value_err)?;
    Ok(ranked.entries.iter().map(|e| (e.pool_index, e.mu)).collect())
}

#[pymodule]
#[pyo3(name = "argsum")]
fn argsum_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDocument>()?;
    m.add_class::<PyRougeScore>()?;
    m.add_function(wrap_pyfunction!(tokenize, m)?)?;
    m.add_function(wrap_pyfunction!(rouge_n, m)?)?;
    m.add_function(wrap_pyfunction!(rouge_l, m)?)?;
    m.add_function(wrap_pyfunction!(lcs_len, m)?)?;
    m.add_function(wrap_pyfunction!(render, m)?)?;
    m.add_function(wrap_pyfunction!(parse, m)?)?;
    m.add_function(wrap_pyfunction!(build_arg_reference, m)?)?;
    m.add_function(wrap_pyfunction!(score_candidate, m)?)?;
    m.add_function(wrap_pyfunction!(rank, m)?)?;
    Ok(())
}
