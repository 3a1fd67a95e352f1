//! Argument-aware reranking of abstractive summary candidates.
//!
//! The crate covers the full generate-then-rank loop except the generator
//! itself:
//!
//! * [`corpus`]: JSONL data model for documents, references, candidates and folds.
//! * [`marker`]: rendering documents with argument-role markers and parsing them back.
//! * [`augment`]: the raw / binary / fine-grained training set.
//! * [`rouge`]: tokenizer and ROUGE-1/2/L scores.
//! * [`argscore`]: argument reference construction, mu, and pool ranking.
//! * [`pipeline`]: pooling policy, batch reranking, evaluation reports and
//!   bootstrap significance.
//! * [`cli`]: the `argsum` command-line tool.

pub mod argscore;
pub mod augment;
pub mod cli;
pub mod config;
pub mod corpus;
pub mod io;
pub mod marker;
pub mod pipeline;
pub mod rouge;

pub use argscore::{build_arg_reference, rank_pool, score_candidate, RankedResult, RankingMetric, Scorer};
pub use corpus::{ArgRole, CandidatePool, CandidateSummary, Document, InputFormat, ReferenceSummary, RoleSource};
pub use marker::{Marker, MarkerScheme};
pub use rouge::{lcs_len, rouge_l, rouge_n, tokenize, RougeScore, TokenSeq, Tokenizer};
