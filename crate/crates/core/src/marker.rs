//! Argument-marker rendering and parsing.
//!
//! A marked sentence is written as `<Tag> sentence text </Tag>`; unmarked
//! sentences are emitted verbatim, and sentences are joined by a configurable
//! separator (a single space by default). Marker tokens are reserved words:
//! they never appear inside stored sentence text, and tags never nest.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{ArgRole, Document, InputFormat};

pub const IRC_OPEN: &str = "<IRC>";
pub const IRC_CLOSE: &str = "</IRC>";
pub const ISSUE_OPEN: &str = "<Issue>";
pub const ISSUE_CLOSE: &str = "</Issue>";
pub const REASON_OPEN: &str = "<Reason>";
pub const REASON_CLOSE: &str = "</Reason>";
pub const CONCLUSION_OPEN: &str = "<Conclusion>";
pub const CONCLUSION_CLOSE: &str = "</Conclusion>";

/// Full reserved marker inventory.
pub const MARKER_TOKENS: [&str; 8] = [
    IRC_OPEN,
    IRC_CLOSE,
    ISSUE_OPEN,
    ISSUE_CLOSE,
    REASON_OPEN,
    REASON_CLOSE,
    CONCLUSION_OPEN,
    CONCLUSION_CLOSE,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MarkerScheme {
    Raw,
    Binary,
    FineGrained,
}

impl MarkerScheme {
    pub const ALL: [MarkerScheme; 3] = [MarkerScheme::Raw, MarkerScheme::Binary, MarkerScheme::FineGrained];

    /// Open/close pair wrapping a sentence with `role`, or `None` if the
    /// sentence is emitted unmarked.
    pub fn tags(self, role: ArgRole) -> Option<(&'static str, &'static str)> {
        if !role.is_argumentative() {
            return None;
        }
        match (self, role) {
            (MarkerScheme::Raw, _) => None,
            (MarkerScheme::Binary, _) => Some((IRC_OPEN, IRC_CLOSE)),
            (MarkerScheme::FineGrained, ArgRole::Issue) => Some((ISSUE_OPEN, ISSUE_CLOSE)),
            (MarkerScheme::FineGrained, ArgRole::Reason) => Some((REASON_OPEN, REASON_CLOSE)),
            (MarkerScheme::FineGrained, ArgRole::Conclusion) => Some((CONCLUSION_OPEN, CONCLUSION_CLOSE)),
            (MarkerScheme::FineGrained, ArgRole::NonArgument) => None,
        }
    }
}

impl From<InputFormat> for MarkerScheme {
    fn from(f: InputFormat) -> Self {
        match f {
            InputFormat::Raw => MarkerScheme::Raw,
            InputFormat::Binary => MarkerScheme::Binary,
            InputFormat::FineGrained => MarkerScheme::FineGrained,
        }
    }
}

impl From<MarkerScheme> for InputFormat {
    fn from(s: MarkerScheme) -> Self {
        match s {
            MarkerScheme::Raw => InputFormat::Raw,
            MarkerScheme::Binary => InputFormat::Binary,
            MarkerScheme::FineGrained => InputFormat::FineGrained,
        }
    }
}

impl fmt::Display for MarkerScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(InputFormat::from(*self).as_str())
    }
}

impl FromStr for MarkerScheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.parse::<InputFormat>().map(Into::into)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MarkerError {
    #[error("sentence {sentence} contains reserved marker token {token}")]
    ReservedToken { sentence: usize, token: &'static str },
    #[error("unbalanced marker at byte {offset}")]
    Unbalanced { offset: usize },
    #[error("nested marker at byte {offset}")]
    Nested { offset: usize },
    #[error("close marker {found} at byte {offset} does not match open marker {expected}")]
    Mismatched { offset: usize, expected: &'static str, found: &'static str },
    #[error("marker {token} at byte {offset} is not part of the {scheme} scheme")]
    ForeignMarker { offset: usize, token: &'static str, scheme: MarkerScheme },
    #[error("text at byte {offset} does not match sentence {sentence}")]
    Misaligned { offset: usize, sentence: usize },
    #[error("unexpected trailing text at byte {offset}")]
    TrailingText { offset: usize },
}

/// First reserved marker token occurring in `text`.
pub fn find_marker(text: &str) -> Option<&'static str> {
    lex_markers(text).next().map(|(_, t)| t)
}

/// Every marker token in `text`, with its byte offset.
pub fn lex_markers(text: &str) -> impl Iterator<Item = (usize, &'static str)> + '_ {
    text.match_indices('<').filter_map(move |(i, _)| {
        let rest = &text[i..];
        MARKER_TOKENS.iter().find(|t| rest.starts_with(**t)).map(|t| (i, *t))
    })
}

/// Remove every marker token and collapse whitespace runs to single spaces.
/// Returns the cleaned text and the number of tokens removed.
pub fn strip_markers(text: &str) -> (String, usize) {
    let mut out = String::with_capacity(text.len());
    let mut removed = 0;
    let mut last = 0;
    for (offset, token) in lex_markers(text) {
        out.push_str(&text[last..offset]);
        out.push(' ');
        last = offset + token.len();
        removed += 1;
    }
    out.push_str(&text[last..]);
    (normalize_whitespace(&out), removed)
}

pub fn normalize_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn role_of_tag(open: &str) -> Option<ArgRole> {
    match open {
        ISSUE_OPEN => Some(ArgRole::Issue),
        REASON_OPEN => Some(ArgRole::Reason),
        CONCLUSION_OPEN => Some(ArgRole::Conclusion),
        _ => None,
    }
}

fn close_of(open: &str) -> &'static str {
    match open {
        IRC_OPEN => IRC_CLOSE,
        ISSUE_OPEN => ISSUE_CLOSE,
        REASON_OPEN => REASON_CLOSE,
        _ => CONCLUSION_CLOSE,
    }
}

fn is_open(token: &str) -> bool {
    !token.starts_with("</")
}

fn scheme_tokens(scheme: MarkerScheme) -> &'static [&'static str] {
    match scheme {
        MarkerScheme::Raw => &[],
        MarkerScheme::Binary => &MARKER_TOKENS[..2],
        MarkerScheme::FineGrained => &MARKER_TOKENS[2..],
    }
}

/// Renders and parses marker-annotated text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Marker {
    /// String placed between consecutive sentences.
    pub separator: String,
    /// Role assigned to argumentative sentences recovered from binary markup.
    pub binary_role: ArgRole,
}

impl Default for Marker {
    fn default() -> Self {
        Self { separator: " ".into(), binary_role: ArgRole::Issue }
    }
}

impl Marker {
    pub fn with_separator(separator: impl Into<String>) -> Self {
        Self { separator: separator.into(), ..Self::default() }
    }

    pub fn render(&self, doc: &Document, scheme: MarkerScheme) -> Result<String, MarkerError> {
        self.render_sentences(doc.sentences.iter().map(|s| (s.text.as_str(), s.role)), scheme)
    }

    pub fn render_sentences<'a>(
        &self,
        sentences: impl IntoIterator<Item = (&'a str, ArgRole)>,
        scheme: MarkerScheme,
    ) -> Result<String, MarkerError> {
        let mut out = String::new();
        for (i, (text, role)) in sentences.into_iter().enumerate() {
            if let Some(token) = find_marker(text) {
                return Err(MarkerError::ReservedToken { sentence: i, token });
            }
            if i > 0 {
                out.push_str(&self.separator);
            }
            match scheme.tags(role) {
                Some((open, close)) => {
                    out.push_str(open);
                    out.push(' ');
                    out.push_str(text);
                    out.push(' ');
                    out.push_str(close);
                }
                None => out.push_str(text),
            }
        }
        Ok(out)
    }

    /// Check marker structure alone: tokens belong to `scheme`, tags are
    /// balanced, never nested, and every close matches its open.
    pub fn check_structure(&self, marked: &str, scheme: MarkerScheme) -> Result<(), MarkerError> {
        let allowed = scheme_tokens(scheme);
        let mut open: Option<(usize, &'static str)> = None;
        for (offset, token) in lex_markers(marked) {
            if !allowed.contains(&token) {
                return Err(MarkerError::ForeignMarker { offset, token, scheme });
            }
            if is_open(token) {
                if open.is_some() {
                    return Err(MarkerError::Nested { offset });
                }
                open = Some((offset, token));
            } else {
                match open.take() {
                    None => return Err(MarkerError::Unbalanced { offset }),
                    Some((_, o)) if close_of(o) != token => {
                        return Err(MarkerError::Mismatched { offset, expected: close_of(o), found: token });
                    }
                    Some(_) => {}
                }
            }
        }
        match open {
            Some((offset, _)) => Err(MarkerError::Unbalanced { offset }),
            None => Ok(()),
        }
    }

    /// Recover `(text, role)` pairs from marked text, aligned against the
    /// known raw sentence texts.
    pub fn parse<S: AsRef<str>>(
        &self,
        marked: &str,
        scheme: MarkerScheme,
        sentence_boundaries: &[S],
    ) -> Result<Vec<(String, ArgRole)>, MarkerError> {
        self.check_structure(marked, scheme)?;
        let mut pos = 0;
        let mut out = Vec::with_capacity(sentence_boundaries.len());
        for (i, sentence) in sentence_boundaries.iter().enumerate() {
            let sentence = sentence.as_ref();
            if let Some(token) = find_marker(sentence) {
                return Err(MarkerError::ReservedToken { sentence: i, token });
            }
            if i > 0 {
                pos = expect(marked, pos, &self.separator, i)?;
            }
            let rest = &marked[pos..];
            let open = scheme_tokens(scheme).iter().copied().find(|t| is_open(t) && rest.starts_with(t));
            match open {
                Some(open) => {
                    pos = expect(marked, pos + open.len(), " ", i)?;
                    pos = expect(marked, pos, sentence, i)?;
                    pos = expect(marked, pos, " ", i)?;
                    pos = expect(marked, pos, close_of(open), i)?;
                    let role = role_of_tag(open).unwrap_or(self.binary_role);
                    out.push((sentence.to_owned(), role));
                }
                None => {
                    pos = expect(marked, pos, sentence, i)?;
                    out.push((sentence.to_owned(), ArgRole::NonArgument));
                }
            }
        }
        if pos != marked.len() {
            return Err(MarkerError::TrailingText { offset: pos });
        }
        Ok(out)
    }
}

fn expect(marked: &str, pos: usize, want: &str, sentence: usize) -> Result<usize, MarkerError> {
    if marked[pos..].starts_with(want) {
        Ok(pos + want.len())
    } else {
        Err(MarkerError::Misaligned { offset: pos, sentence })
    }
}

/// Render with the default separator.
pub fn render(doc: &Document, scheme: MarkerScheme) -> Result<String, MarkerError> {
    Marker::default().render(doc, scheme)
}

/// Parse with the default separator and binary placeholder role.
pub fn parse<S: AsRef<str>>(
    marked: &str,
    scheme: MarkerScheme,
    sentence_boundaries: &[S],
) -> Result<Vec<(String, ArgRole)>, MarkerError> {
    Marker::default().parse(marked, scheme, sentence_boundaries)
}
