//! `argsum` command-line interface.
//!
//! Subcommands follow the pipeline stages: `mark` and `augment` prepare
//! generator inputs, `rank` selects one candidate per document, `eval`
//! scores the selections, `compare` tests two reports for significance and
//! `stats` summarizes a document corpus.
//!
//! Exit codes: 0 ok, 1 usage, 2 data error, 3 I/O error.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use thiserror::Error;

use crate::argscore::{RankingMetric, Scorer};
use crate::augment::{pair_up, AugmentError, Augmenter};
use crate::config::{ConfigError, ConfigFile, RunConfig};
use crate::corpus::{self, CorpusError, InputFormat};
use crate::io::{jsonl, write_atomic};
use crate::marker::{Marker, MarkerScheme};
use crate::pipeline::{self, PipelineError, SelectedSummary, Selection, SystemReport};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> Self {
        match e {
            CorpusError::Io { .. } => CliError::Io(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<AugmentError> for CliError {
    fn from(e: AugmentError) -> Self {
        match e {
            AugmentError::Io { .. } => CliError::Io(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Corpus(c) => c.into(),
            PipelineError::InvalidPolicy(_) | PipelineError::TooFewTrials(_) => CliError::Usage(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Io { .. } => CliError::Io(e.to_string()),
            ConfigError::Parse { .. } => CliError::Usage(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "argsum", version, about = "Argument-aware reranking of summary candidates")]
pub struct Cli {
    /// TOML config file (formats, beams, dedupe, all_beams, max_beam, metric, seed, trials, stem, separator, jobs)
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed for all randomness
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Maximum worker threads
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Enable stemming in the ROUGE tokenizer
    #[arg(long, global = true)]
    pub stem: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Render documents with argument markers
    Mark(MarkArgs),
    /// Export the three-format training set per fold
    Augment(AugmentArgs),
    /// Select the best candidate per document
    Rank(RankArgs),
    /// Score selected summaries against references
    Eval(EvalArgs),
    /// Paired bootstrap comparison of two eval reports
    Compare(CompareArgs),
    /// Corpus size and length statistics
    Stats(StatsArgs),
}

#[derive(Debug, Args)]
pub struct MarkArgs {
    #[arg(long)]
    pub documents: PathBuf,
    /// raw, binary or finegrained
    #[arg(long)]
    pub scheme: MarkerScheme,
    #[arg(long)]
    pub output: PathBuf,
    /// String placed between sentences
    #[arg(long)]
    pub separator: Option<String>,
}

#[derive(Debug, Args)]
pub struct AugmentArgs {
    #[arg(long)]
    pub documents: PathBuf,
    #[arg(long)]
    pub references: PathBuf,
    #[arg(long)]
    pub folds: PathBuf,
    /// Output directory; one `fold_<id>` subdirectory per fold
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Export a single fold
    #[arg(long)]
    pub fold: Option<u8>,
    /// Accept documents whose labels were predicted
    #[arg(long)]
    pub allow_predicted: bool,
    #[arg(long)]
    pub separator: Option<String>,
}

#[derive(Debug, Args)]
pub struct RankArgs {
    #[arg(long)]
    pub documents: PathBuf,
    #[arg(long)]
    pub candidates: PathBuf,
    /// Selections JSONL
    #[arg(long)]
    pub output: PathBuf,
    /// Per-candidate score dump JSONL
    #[arg(long)]
    pub scores: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    pub formats: Option<Vec<InputFormat>>,
    #[arg(long, value_delimiter = ',')]
    pub beams: Option<Vec<u32>>,
    #[arg(long)]
    pub dedupe: bool,
    /// Keep every returned beam instead of the top one per (format, width)
    #[arg(long)]
    pub all_beams: bool,
    #[arg(long)]
    pub max_beam: Option<u32>,
    /// R1, R2 or RL
    #[arg(long)]
    pub metric: Option<RankingMetric>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub selections: PathBuf,
    #[arg(long)]
    pub references: PathBuf,
    #[arg(long)]
    pub folds: Option<PathBuf>,
    /// Report JSON
    #[arg(long)]
    pub output: PathBuf,
    /// Text table
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Defaults to the selections file stem
    #[arg(long)]
    pub system_id: Option<String>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long)]
    pub report_a: PathBuf,
    #[arg(long)]
    pub report_b: PathBuf,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub documents: PathBuf,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Parse `args` and run; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn resolve_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &cli.config {
        cfg = cfg.merge_file(&ConfigFile::load(path)?).map_err(CliError::Usage)?;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if cli.jobs.is_some() {
        cfg.jobs = cli.jobs;
    }
    if cli.stem {
        cfg.tokenizer.stem = true;
    }
    match &cli.command {
        Command::Mark(a) => override_separator(&mut cfg, &a.separator),
        Command::Augment(a) => override_separator(&mut cfg, &a.separator),
        Command::Rank(a) => {
            if let Some(f) = &a.formats {
                cfg.policy.formats = f.iter().copied().collect();
            }
            if let Some(b) = &a.beams {
                cfg.policy.beam_widths = b.iter().copied().collect();
            }
            cfg.policy.dedupe |= a.dedupe;
            cfg.policy.all_beams |= a.all_beams;
            if let Some(m) = a.max_beam {
                cfg.policy.max_beam = m;
            }
            if let Some(m) = a.metric {
                cfg.metric = m;
            }
        }
        Command::Compare(a) => {
            if let Some(t) = a.trials {
                cfg.trials = t;
            }
        }
        Command::Eval(_) | Command::Stats(_) => {}
    }
    Ok(cfg)
}

fn override_separator(cfg: &mut RunConfig, separator: &Option<String>) {
    if let Some(s) = separator {
        cfg.separator = s.clone();
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    write_atomic(path, contents.as_bytes()).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn to_line<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("record serializes")
}

pub fn execute(cli: &Cli) -> Result<(), CliError> {
    let cfg = resolve_config(cli)?;
    log::info!("argsum {:?}", cli.command);
    log::info!("resolved config: {}", cfg.to_json());
    pipeline::with_jobs(cfg.jobs, || match &cli.command {
        Command::Mark(a) => cmd_mark(a, &cfg),
        Command::Augment(a) => cmd_augment(a, &cfg),
        Command::Rank(a) => cmd_rank(a, &cfg),
        Command::Eval(a) => cmd_eval(a, &cfg),
        Command::Compare(a) => cmd_compare(a, &cfg),
        Command::Stats(a) => cmd_stats(a),
    })?
}

#[derive(Serialize)]
struct MarkedRecord<'a> {
    doc_id: &'a str,
    input_format: InputFormat,
    input: String,
}

fn cmd_mark(args: &MarkArgs, cfg: &RunConfig) -> Result<(), CliError> {
    let docs = corpus::load_documents(&args.documents)?;
    let marker = Marker::with_separator(cfg.separator.clone());
    let mut lines = Vec::with_capacity(docs.len());
    for doc in &docs {
        let input = marker.render(doc, args.scheme).map_err(|e| CliError::Data(format!("{}: {e}", doc.doc_id)))?;
        lines.push(to_line(&MarkedRecord { doc_id: &doc.doc_id, input_format: args.scheme.into(), input }));
    }
    write_file(&args.output, &jsonl(lines))
}

fn cmd_augment(args: &AugmentArgs, cfg: &RunConfig) -> Result<(), CliError> {
    let docs = corpus::load_documents(&args.documents)?;
    let refs = corpus::load_references(&args.references)?;
    let folds = corpus::load_folds(&args.folds)?;
    corpus::check_references(&refs, &docs)?;
    corpus::check_folds(&folds, &docs)?;
    let selected: Vec<_> = match args.fold {
        Some(id) => {
            let f: Vec<_> = folds.iter().filter(|f| f.fold_id == id).collect();
            if f.is_empty() {
                return Err(CliError::Usage(format!("fold {id} not found in {}", args.folds.display())));
            }
            f
        }
        None => folds.iter().collect(),
    };
    let augmenter = Augmenter { marker: Marker::with_separator(cfg.separator.clone()), allow_predicted: args.allow_predicted };
    let pairs = pair_up(&docs, &refs);
    for fold in selected {
        let dir = args.out_dir.join(format!("fold_{}", fold.fold_id));
        let counts = augmenter.export_training_set(&pairs, fold, &dir)?;
        println!("{}", to_line(&counts));
    }
    Ok(())
}

fn cmd_rank(args: &RankArgs, cfg: &RunConfig) -> Result<(), CliError> {
    let docs = corpus::load_documents(&args.documents)?;
    let cands = corpus::load_candidates(&args.candidates, cfg.policy.max_beam)?;
    corpus::check_candidates(&cands, &docs)?;
    let scorer = Scorer::new(cfg.metric, cfg.tokenizer);
    let results = pipeline::run_reranking(&docs, &cands, &cfg.policy, &scorer)?;
    let fallbacks = results.iter().filter(|r| r.arg_reference.fallback).count();
    if fallbacks > 0 {
        log::warn!("{fallbacks} documents had no argumentative sentences; scored against full text");
    }
    write_file(&args.output, &jsonl(results.iter().map(|r| to_line(&Selection::from(r)))))?;
    if let Some(path) = &args.scores {
        write_file(path, &jsonl(results.iter().flat_map(pipeline::score_rows).map(|row| to_line(&row))))?;
    }
    Ok(())
}

fn cmd_eval(args: &EvalArgs, cfg: &RunConfig) -> Result<(), CliError> {
    let selections: Vec<SelectedSummary> = corpus::load_records(&args.selections)?;
    let refs = corpus::load_references(&args.references)?;
    let folds = args.folds.as_ref().map(corpus::load_folds).transpose()?;
    let system_id = args.system_id.clone().unwrap_or_else(|| {
        args.selections.file_stem().map_or_else(|| "system".into(), |s| s.to_string_lossy().into_owned())
    });
    let report = pipeline::Evaluator::new(cfg.tokenizer).evaluate(&system_id, &selections, &refs, folds.as_deref())?;
    write_file(&args.output, &report.to_json())?;
    let table = report.render_table();
    if let Some(path) = &args.table {
        write_file(path, &table)?;
    }
    print!("{table}");
    Ok(())
}

fn load_report(path: &Path) -> Result<SystemReport, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn cmd_compare(args: &CompareArgs, cfg: &RunConfig) -> Result<(), CliError> {
    let a = load_report(&args.report_a)?;
    let b = load_report(&args.report_b)?;
    let record = pipeline::compare_systems(&a, &b, cfg.trials, cfg.seed)?;
    let json = record.to_json();
    match &args.output {
        Some(path) => write_file(path, &json)?,
        None => print!("{json}"),
    }
    Ok(())
}

fn cmd_stats(args: &StatsArgs) -> Result<(), CliError> {
    let docs = corpus::load_documents(&args.documents)?;
    let stats = corpus::corpus_stats(&docs)?;
    let json = format!("{}\n", to_line(&stats));
    match &args.output {
        Some(path) => write_file(path, &json),
        None => {
            print!("{json}");
            Ok(())
        }
    }
}
