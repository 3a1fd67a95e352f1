//! Test-only oracles and fixtures. Nothing here calls into the code paths it
//! is used to check.

#![allow(dead_code)]

use std::path::{Path, PathBuf};

use argsum::corpus::{self, ArgRole, CandidateSummary, Document, FoldSpec, ReferenceSummary, RoleSource};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("fixtures")
}

pub fn fixture(name: &str) -> PathBuf {
    fixtures().join(name)
}

pub fn golden(name: &str) -> PathBuf {
    fixtures().join("golden").join(name)
}

pub fn load_fixture_corpus() -> (Vec<Document>, Vec<ReferenceSummary>, Vec<CandidateSummary>, Vec<FoldSpec>) {
    (
        corpus::load_documents(fixture("documents.jsonl")).unwrap(),
        corpus::load_references(fixture("references.jsonl")).unwrap(),
        corpus::load_candidates(fixture("candidates.jsonl"), 5).unwrap(),
        corpus::load_folds(fixture("folds.jsonl")).unwrap(),
    )
}

/// When `ARGSUM_UPDATE_GOLDEN` is set, overwrite the golden file instead of
/// comparing against it.
pub fn check_golden(name: &str, actual: &[u8]) -> Result<(), String> {
    let path = golden(name);
    if std::env::var_os("ARGSUM_UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, actual).unwrap();
        return Ok(());
    }
    let expected = std::fs::read(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    if expected == actual {
        Ok(())
    } else {
        Err(format!("{} differs from output ({} vs {} bytes)", path.display(), expected.len(), actual.len()))
    }
}

// ---- tokenizer / ROUGE oracles ------------------------------------------------

/// Regex-split reference tokenizer, valid for ASCII input.
pub fn regex_tokenize(text: &str) -> Vec<String> {
    let re = regex::Regex::new(r"[^a-z0-9]+").unwrap();
    re.split(&text.to_ascii_lowercase()).filter(|t| !t.is_empty()).map(str::to_owned).collect()
}

/// Multiset n-gram intersection by pairwise matching with a used-flag per
/// reference n-gram.
pub fn naive_overlap(cand: &[String], reference: &[String], n: usize) -> (usize, usize, usize) {
    let grams = |s: &[String]| -> Vec<Vec<String>> {
        if s.len() < n {
            vec![]
        } else {
            (0..=s.len() - n).map(|i| s[i..i + n].to_vec()).collect()
        }
    };
    let cg = grams(cand);
    let rg = grams(reference);
    let mut used = vec![false; rg.len()];
    let mut overlap = 0;
    for g in &cg {
        for (j, h) in rg.iter().enumerate() {
            if !used[j] && g == h {
                used[j] = true;
                overlap += 1;
                break;
            }
        }
    }
    (overlap, cg.len(), rg.len())
}

/// (precision, recall, f1) from the naive intersector.
pub fn naive_rouge_n(cand: &[String], reference: &[String], n: usize) -> (f64, f64, f64) {
    let (overlap, c, r) = naive_overlap(cand, reference, n);
    prf(overlap, c, r)
}

pub fn prf(hits: usize, c: usize, r: usize) -> (f64, f64, f64) {
    let p = if c == 0 { 0.0 } else { hits as f64 / c as f64 };
    let rec = if r == 0 { 0.0 } else { hits as f64 / r as f64 };
    let f = if p + rec > 0.0 { 2.0 * p * rec / (p + rec) } else { 0.0 };
    (p, rec, f)
}

/// Plain exponential LCS recursion, no memo.
pub fn recursive_lcs<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    if a.is_empty() || b.is_empty() {
        0
    } else if a[0] == b[0] {
        1 + recursive_lcs(&a[1..], &b[1..])
    } else {
        recursive_lcs(&a[1..], b).max(recursive_lcs(a, &b[1..]))
    }
}

/// mu computed from scratch: regex tokenizer + naive intersector, or
/// recursion-free LCS table for RL (sequences here are long).
pub fn oracle_mu(candidate: &str, reference: &str, metric: &str) -> f64 {
    let c = regex_tokenize(candidate);
    let r = regex_tokenize(reference);
    match metric {
        "R1" => naive_rouge_n(&c, &r, 1).2,
        "R2" => naive_rouge_n(&c, &r, 2).2,
        _ => {
            if c.is_empty() || r.is_empty() {
                return 0.0;
            }
            let mut t = vec![vec![0usize; r.len() + 1]; c.len() + 1];
            for i in 1..=c.len() {
                for j in 1..=r.len() {
                    t[i][j] = if c[i - 1] == r[j - 1] { t[i - 1][j - 1] + 1 } else { t[i - 1][j].max(t[i][j - 1]) };
                }
            }
            prf(t[c.len()][r.len()], c.len(), r.len()).2
        }
    }
}

/// One-line filter: argumentative sentence texts joined by spaces.
pub fn oracle_arg_reference(doc: &Document) -> String {
    doc.sentences.iter().filter(|s| s.role != ArgRole::NonArgument).map(|s| s.text.as_str()).collect::<Vec<_>>().join(" ")
}

// ---- synthetic data -----------------------------------------------------------

pub const WORDS: &[&str] = &[
    "court", "appeal", "judge", "trial", "evidence", "statute", "duty", "care", "contract", "tenant", "landlord",
    "claim", "limitation", "period", "costs", "order", "review", "standard", "error", "law", "fact", "finding",
    "party", "notice", "breach", "damages", "motion", "hearing", "record", "section",
];

pub fn random_sentence(rng: &mut StdRng, min_words: usize, max_words: usize) -> String {
    let n = rng.random_range(min_words..=max_words);
    let mut words: Vec<&str> = (0..n).map(|_| WORDS[rng.random_range(0..WORDS.len())]).collect();
    words[0] = "The";
    format!("{}.", words.join(" "))
}

pub fn random_role(rng: &mut StdRng) -> ArgRole {
    ArgRole::ALL[rng.random_range(0..4)]
}

/// Sentence text with punctuation, digits, non-ASCII and stray angle
/// brackets, but never a reserved marker token.
pub fn messy_sentence(rng: &mut StdRng) -> String {
    const PIECES: &[&str] = &[
        "Court", "s.12(3)", "<", ">", "</", "<Iss", "ue>", "Québec", "\u{2014}", "$4,000", "R. v. Smith", "IRC", "Issue", "«", "»",
        "appeal", "  ", "\t", ";", "2019 ONCA 123",
    ];
    let n = rng.random_range(1..=8);
    let mut s: String = (0..n).map(|_| PIECES[rng.random_range(0..PIECES.len())]).collect::<Vec<_>>().join(" ");
    if s.trim().is_empty() || argsum::marker::find_marker(&s).is_some() {
        s = "Fallback sentence.".into();
    }
    s
}

pub fn synthetic_document(rng: &mut StdRng, id: &str, sentences: usize) -> Document {
    Document::new(id, RoleSource::Oracle, (0..sentences).map(|_| (random_sentence(rng, 4, 18), random_role(rng)))).unwrap()
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

// ---- bootstrap oracle -----------------------------------------------------------

/// Straightforward paired bootstrap: fraction of resamples where the mean of
/// `b` does not exceed the mean of `a`. Uses StdRng, not the library's
/// ChaCha stream layout.
pub fn bootstrap_oracle(a: &[f64], b: &[f64], trials: usize, seed: u64) -> f64 {
    let mut rng = StdRng::seed_from_u64(seed);
    let n = a.len();
    let mut not_better = 0;
    for _ in 0..trials {
        let mut mean_a = 0.0;
        let mut mean_b = 0.0;
        for _ in 0..n {
            let i = rng.random_range(0..n);
            mean_a += a[i];
            mean_b += b[i];
        }
        if mean_b / n as f64 <= mean_a / n as f64 {
            not_better += 1;
        }
    }
    not_better as f64 / trials as f64
}
