//! Acceptance suite. One line per criterion, non-zero exit if any fails.
//!
//! Run with `cargo test -p argsum --test acceptance`.

mod common;

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use argsum::argscore::{build_arg_reference, rank_pool, score_candidate, RankingMetric};
use argsum::augment::{pair_up, Augmenter};
use argsum::corpus::{ArgRole, CandidatePool, CandidateSummary, Document, FoldSpec, InputFormat, ReferenceSummary, RoleSource};
use argsum::marker::{normalize_whitespace, strip_markers, Marker, MarkerScheme};
use argsum::pipeline::{
    compare_systems, evaluate, run_reranking, DocScores, MetricMeans, PoolPolicy, ReportHeader, SelectedSummary, SystemReport,
};
use argsum::rouge::{lcs_len, rouge_l, rouge_n, TokenSeq};
use argsum::Scorer;
use common::*;
use rand::rngs::StdRng;
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || format!("took {elapsed:.2?}, limit {limit:?}"))
}

fn symbols(rng: &mut StdRng, max_len: usize) -> TokenSeq {
    const AB: [&str; 5] = ["a", "b", "c", "d", "e"];
    (0..rng.random_range(0..=max_len)).map(|_| AB[rng.random_range(0..5)]).collect()
}

fn rouge_oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = rng(571);
    for i in 0..500 {
        let (a, b) = (symbols(&mut rng, 12), symbols(&mut rng, 12));
        for n in [1, 2] {
            let s = rouge_n(&a, &b, n);
            let o = naive_rouge_n(a.as_slice(), b.as_slice(), n);
            ensure((s.precision, s.recall, s.f1) == o, || format!("pair {i} n={n}: {s:?} vs {o:?}"))?;
        }
        let (l, r) = (lcs_len(a.as_slice(), b.as_slice()), recursive_lcs(a.as_slice(), b.as_slice()));
        ensure(l == r, || format!("pair {i}: lcs {l} vs {r}"))?;
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(5))?;
    Ok(format!("500 pairs exact, {elapsed:.2?}"))
}

fn rouge_properties() -> Outcome {
    let start = Instant::now();
    let mut rng = rng(572);
    let empty = TokenSeq::default();
    for i in 0..1000 {
        let (a, b) = (symbols(&mut rng, 20), symbols(&mut rng, 20));
        let scores = [
            (rouge_n(&a, &b, 1), rouge_n(&b, &a, 1)),
            (rouge_n(&a, &b, 2), rouge_n(&b, &a, 2)),
            (rouge_l(&a, &b), rouge_l(&b, &a)),
        ];
        for (ab, ba) in scores {
            ensure(ab.f1 == ba.f1, || format!("pair {i}: asymmetric F1 {} vs {}", ab.f1, ba.f1))?;
            for x in [ab.precision, ab.recall, ab.f1] {
                ensure((0.0..=1.0).contains(&x), || format!("pair {i}: {x} out of [0,1]"))?;
            }
        }
        for s in [&a, &b] {
            let selfs = [
                (!s.is_empty(), rouge_n(s, s, 1).f1),
                (s.len() >= 2, rouge_n(s, s, 2).f1),
                (!s.is_empty(), rouge_l(s, s).f1),
            ];
            for (defined, f) in selfs {
                ensure(!defined || f == 1.0, || format!("pair {i}: self-F1 {f}"))?;
            }
            for f in [rouge_n(s, &empty, 1).f1, rouge_n(&empty, s, 2).f1, rouge_l(s, &empty).f1, rouge_l(&empty, s).f1] {
                ensure(f == 0.0, || format!("pair {i}: empty operand gave {f}"))?;
            }
        }
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(5))?;
    Ok(format!("1000 pairs, {elapsed:.2?}"))
}

fn marker_round_trip() -> Outcome {
    let mut rng = rng(573);
    let docs: Vec<Document> = (0..200)
        .map(|i| {
            let n = rng.random_range(1..=40);
            let sentences: Vec<(String, ArgRole)> = (0..n).map(|_| (messy_sentence(&mut rng), random_role(&mut rng))).collect();
            Document::new(format!("d{i}"), RoleSource::Oracle, sentences).unwrap()
        })
        .collect();
    let marker = Marker::default();
    let start = Instant::now();
    let mut sentences = 0;
    for doc in &docs {
        let texts: Vec<&str> = doc.sentences.iter().map(|s| s.text.as_str()).collect();
        let raw = marker.render(doc, MarkerScheme::Raw).map_err(|e| e.to_string())?;
        for scheme in [MarkerScheme::Binary, MarkerScheme::FineGrained] {
            let marked = marker.render(doc, scheme).map_err(|e| e.to_string())?;
            let parsed = marker.parse(&marked, scheme, &texts).map_err(|e| format!("{}: {e}", doc.doc_id))?;
            ensure(parsed.len() == doc.sentences.len(), || format!("{}: sentence count", doc.doc_id))?;
            for (s, (text, role)) in doc.sentences.iter().zip(&parsed) {
                let role_ok = match scheme {
                    MarkerScheme::FineGrained => s.role == *role,
                    _ => s.role.is_argumentative() == role.is_argumentative(),
                };
                ensure(&s.text == text && role_ok, || format!("{} {scheme}: sentence {} differs", doc.doc_id, s.index))?;
            }
            ensure(strip_markers(&marked).0 == normalize_whitespace(&raw), || format!("{} {scheme}: strip != raw", doc.doc_id))?;
        }
        sentences += doc.sentences.len();
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(2))?;
    Ok(format!("200 docs, {sentences} sentences, both schemes, {elapsed:.2?}"))
}

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_argsum"));
    c.env("RUST_LOG", "error");
    c
}

fn run(cmd: &mut Command) -> Result<(), String> {
    let out = cmd.output().map_err(|e| e.to_string())?;
    ensure(out.status.success(), || format!("{:?} exited {:?}: {}", cmd, out.status.code(), String::from_utf8_lossy(&out.stderr)))
}

fn read(path: &Path) -> Result<Vec<u8>, String> {
    std::fs::read(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn augmentation() -> Outcome {
    let (docs, refs, _, folds) = load_fixture_corpus();
    let pairs = pair_up(&docs, &refs);
    let examples = Augmenter::default().augment_all(pairs.iter().copied()).map_err(|e| e.to_string())?;
    ensure(pairs.len() == 20 && examples.len() == 60, || format!("{} pairs gave {} examples", pairs.len(), examples.len()))?;

    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    run(bin()
        .arg("augment")
        .arg("--documents")
        .arg(fixture("documents.jsonl"))
        .arg("--references")
        .arg(fixture("references.jsonl"))
        .arg("--folds")
        .arg(fixture("folds.jsonl"))
        .arg("--out-dir")
        .arg(tmp.path()))?;
    let mut files = 0;
    for fold in &folds {
        for name in ["train.jsonl", "validation.jsonl"] {
            let rel = format!("fold_{}/{name}", fold.fold_id);
            check_golden(&format!("augment/{rel}"), &read(&tmp.path().join(&rel))?)?;
            files += 1;
        }
    }
    Ok(format!("20 pairs -> 60 examples, {files} exported files match goldens"))
}

fn reranking_argmax() -> Outcome {
    let (docs, _, cands, _) = load_fixture_corpus();
    let mut planted_hits = 0;
    for doc in &docs {
        let mut pool: Vec<CandidateSummary> = cands.iter().filter(|c| c.doc_id == doc.doc_id).cloned().collect();
        ensure(pool.len() == 15, || format!("{}: pool of {}", doc.doc_id, pool.len()))?;
        pool.sort_by_key(|c| (c.input_format, c.beam_width));
        let reference = if doc.roles().any(|r| r.is_argumentative()) { oracle_arg_reference(doc) } else { doc.full_text() };

        let pool_struct = CandidatePool::new(doc.doc_id.clone(), pool.clone()).unwrap();
        let ranked = rank_pool(&pool_struct, doc, RankingMetric::R1).map_err(|e| e.to_string())?;
        let mus: Vec<f64> = pool.iter().map(|c| oracle_mu(&c.text, &reference, "R1")).collect();
        let best = mus.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let argmax = mus.iter().position(|&m| m == best).unwrap();
        ensure(ranked.selected().candidate == pool[argmax], || format!("{}: selected pool[{}], oracle pool[{argmax}]", doc.doc_id, ranked.selected().pool_index))?;
        ensure((ranked.selected().mu - best).abs() < 1e-12, || format!("{}: mu {} vs {best}", doc.doc_id, ranked.selected().mu))?;

        pool.push(CandidateSummary {
            doc_id: doc.doc_id.clone(),
            text: reference.clone(),
            input_format: InputFormat::FineGrained,
            beam_width: 5,
            generator_id: "planted".into(),
        });
        let planted = rank_pool(&CandidatePool::new(doc.doc_id.clone(), pool).unwrap(), doc, RankingMetric::R1)
            .map_err(|e| e.to_string())?;
        let sel = planted.selected();
        ensure(sel.candidate.generator_id == "planted" && sel.mu == 1.0, || {
            format!("{}: planted not selected (got {} with mu {})", doc.doc_id, sel.candidate.generator_id, sel.mu)
        })?;
        planted_hits += 1;
    }
    Ok(format!("20/20 match brute force, planted selected {planted_hits}/20 with mu = 1.0"))
}

fn pool_subset_dominance() -> Outcome {
    let (docs, _, cands, _) = load_fixture_corpus();
    let scorer = Scorer::default();
    let full = PoolPolicy::default();
    let best = run_reranking(&docs, &cands, &full, &scorer).map_err(|e| e.to_string())?;
    let subsets = full.subsets();
    for policy in &subsets {
        let sub = run_reranking(&docs, &cands, policy, &scorer).map_err(|e| e.to_string())?;
        for (s, f) in sub.iter().zip(&best) {
            ensure(s.doc_id == f.doc_id && s.selected().mu <= f.selected().mu, || {
                format!("{}: subset {:?}/{:?} mu {} > full {}", s.doc_id, policy.formats, policy.beam_widths, s.selected().mu, f.selected().mu)
            })?;
        }
    }
    Ok(format!("{} subsets x 20 docs", subsets.len()))
}

fn rank_and_eval(dir: &Path, jobs: &str) -> Result<Vec<Vec<u8>>, String> {
    let sel = dir.join("selections.jsonl");
    let scores = dir.join("scores.jsonl");
    let report = dir.join("report.json");
    let table = dir.join("report.txt");
    run(bin()
        .args(["--seed", "42", "--jobs", jobs, "rank", "--documents"])
        .arg(fixture("documents.jsonl"))
        .arg("--candidates")
        .arg(fixture("candidates.jsonl"))
        .arg("--output")
        .arg(&sel)
        .arg("--scores")
        .arg(&scores))?;
    run(bin()
        .args(["--seed", "42", "--jobs", jobs, "eval", "--system-id", "fixture", "--selections"])
        .arg(&sel)
        .arg("--references")
        .arg(fixture("references.jsonl"))
        .arg("--folds")
        .arg(fixture("folds.jsonl"))
        .arg("--output")
        .arg(&report)
        .arg("--table")
        .arg(&table))?;
    [sel, scores, report, table].iter().map(|p| read(p)).collect()
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let dirs: Vec<_> = ["a", "b", "c"].iter().map(|d| tmp.path().join(d)).collect();
    for d in &dirs {
        std::fs::create_dir(d).map_err(|e| e.to_string())?;
    }
    let first = rank_and_eval(&dirs[0], "8")?;
    let second = rank_and_eval(&dirs[1], "8")?;
    let single = rank_and_eval(&dirs[2], "1")?;
    ensure(first == second, || "two identical runs differ".into())?;
    ensure(first == single, || "--jobs 1 differs from --jobs 8".into())?;
    let bytes: usize = first.iter().map(Vec::len).sum();
    Ok(format!("4 outputs ({bytes} bytes) identical across runs and job counts"))
}

fn long_document_throughput() -> Outcome {
    const TARGET: usize = 62_786;
    let mut rng = rng(578);
    let mut words_left = TARGET;
    let mut sentences = Vec::new();
    while words_left > 0 {
        let n = rng.random_range(8..=30).min(words_left);
        let text: Vec<&str> = (0..n).map(|_| WORDS[rng.random_range(0..WORDS.len())]).collect();
        sentences.push((text.join(" "), ArgRole::ALL[rng.random_range(0..3)]));
        words_left -= n;
    }
    let doc = Document::new("long", RoleSource::Oracle, sentences).unwrap();
    let words: usize = doc.sentences.iter().map(|s| s.text.split_whitespace().count()).sum();
    ensure(words == TARGET, || format!("document has {words} words"))?;
    // every sentence is argumentative, so the reference is the whole document
    let reference = build_arg_reference(&doc);
    let candidates: Vec<String> = (0..3)
        .map(|_| {
            let picked: Vec<&str> = doc.sentences.iter().filter(|_| rng.random_bool(0.01)).map(|s| s.text.as_str()).collect();
            picked.join(" ")
        })
        .collect();
    let mut worst = Duration::ZERO;
    let mut worst_metric = RankingMetric::R1;
    for metric in [RankingMetric::R1, RankingMetric::R2, RankingMetric::RL] {
        for c in &candidates {
            let start = Instant::now();
            let mu = score_candidate(c, &reference.text, metric);
            let elapsed = start.elapsed();
            ensure(mu > 0.0 && mu < 1.0, || format!("{metric}: implausible mu {mu}"))?;
            if elapsed > worst {
                worst = elapsed;
                worst_metric = metric;
            }
        }
    }
    within(worst, Duration::from_secs(1))?;
    let cand_words = candidates.iter().map(|c| c.split_whitespace().count()).max().unwrap_or(0);
    Ok(format!("{TARGET}-word reference, candidates up to {cand_words} words, slowest {worst:.2?} ({worst_metric})"))
}

fn fold(id: u8, test: &[&str]) -> FoldSpec {
    FoldSpec { fold_id: id, train: vec![], validation: vec![], test: test.iter().map(|s| s.to_string()).collect() }
}

fn evaluation_sanity() -> Outcome {
    let (_, refs, _, folds) = load_fixture_corpus();
    let selections: Vec<SelectedSummary> =
        refs.iter().map(|r| SelectedSummary { doc_id: r.doc_id.clone(), text: r.text.clone() }).collect();
    let report = evaluate("oracle", &selections, &refs, Some(&folds)).map_err(|e| e.to_string())?;
    let c = &report.corpus;
    ensure(c.r1 == 1.0 && c.r2 == 1.0 && c.rl == 1.0, || format!("corpus means {c:?}"))?;
    let table = report.render_table();
    let all_row = table.lines().last().unwrap_or_default();
    ensure(all_row.matches("100.00").count() == 3, || format!("table row {all_row:?}"))?;

    // fold 0: one doc at R-1 40.00; fold 1: three docs at 50.00. Unweighted mean is 45.00.
    let refs = vec![
        ReferenceSummary { doc_id: "a".into(), text: "w1 w2 x1 x2 x3".into() },
        ReferenceSummary { doc_id: "b".into(), text: "w1 w2 y1 y2".into() },
        ReferenceSummary { doc_id: "c".into(), text: "w3 w4 y3 y4".into() },
        ReferenceSummary { doc_id: "d".into(), text: "w5 w6 y5 y6".into() },
    ];
    let sel = |id: &str, text: &str| SelectedSummary { doc_id: id.into(), text: text.into() };
    let selections = vec![
        sel("a", "w1 w2 z1 z2 z3"),
        sel("b", "w1 w2 z1 z2"),
        sel("c", "w3 w4 z3 z4"),
        sel("d", "w5 w6 z5 z6"),
    ];
    let folds = vec![fold(0, &["a"]), fold(1, &["b", "c", "d"])];
    let report: SystemReport = evaluate("toy", &selections, &refs, Some(&folds)).map_err(|e| e.to_string())?;
    let fold_r1: Vec<String> = report.folds.iter().map(|f| format!("{:.2}", f.means.r1 * 100.0)).collect();
    ensure(fold_r1 == ["40.00", "50.00"], || format!("fold means {fold_r1:?}"))?;
    let corpus = format!("{:.2}", report.corpus.r1 * 100.0);
    ensure(corpus == "45.00", || format!("corpus R-1 {corpus}"))?;
    let all_row = report.render_table().lines().last().unwrap_or_default().to_owned();
    ensure(all_row.split_whitespace().nth(3) == Some("45.00"), || format!("table row {all_row:?}"))?;
    Ok("identity 100.00/100.00/100.00, fold means {40.00, 50.00} -> 45.00".into())
}

fn toy_report(id: &str, values: &[f64]) -> SystemReport {
    SystemReport {
        system_id: id.into(),
        header: ReportHeader::new(&Default::default(), false),
        documents: values
            .iter()
            .enumerate()
            .map(|(i, &v)| DocScores { doc_id: format!("d{i:02}"), r1: v, r2: v, rl: v, extra: Default::default() })
            .collect(),
        folds: vec![],
        corpus: MetricMeans::default(),
    }
}

fn bootstrap() -> Outcome {
    let mut rng = rng(580);
    let a: Vec<f64> = (0..50).map(|_| rng.random_range(0.2..0.6)).collect();
    let dominant: Vec<f64> = a.iter().map(|v| v + rng.random_range(0.01..0.05)).collect();
    let rec = compare_systems(&toy_report("a", &a), &toy_report("b", &dominant), 10_000, 42).map_err(|e| e.to_string())?;
    ensure(rec.metrics.iter().all(|m| m.p_value == 0.0), || format!("dominance p {:?}", rec.metrics))?;

    let rec = compare_systems(&toy_report("a", &a), &toy_report("a2", &a), 10_000, 42).map_err(|e| e.to_string())?;
    let p_same = rec.metrics[0].p_value;
    ensure(rec.metrics.iter().all(|m| m.p_value > 0.05), || format!("identical systems p {:?}", rec.metrics))?;

    let delta: Vec<f64> = a.iter().map(|v| v + rng.random_range(-0.06..0.08)).collect();
    let rec = compare_systems(&toy_report("a", &a), &toy_report("b", &delta), 10_000, 42).map_err(|e| e.to_string())?;
    let p = rec.metrics[0].p_value;
    let oracle = bootstrap_oracle(&a, &delta, 10_000, 42);
    ensure((p - oracle).abs() <= 0.02, || format!("library p {p} vs independent {oracle}"))?;
    Ok(format!("dominance p = 0.0, identical p = {p_same}, delta set p = {p:.4} vs independent {oracle:.4}"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("rouge oracle equivalence", rouge_oracle_equivalence),
        ("rouge property suite", rouge_properties),
        ("marker round trip", marker_round_trip),
        ("augmentation cardinality and goldens", augmentation),
        ("reranking argmax correctness", reranking_argmax),
        ("pool-subset dominance", pool_subset_dominance),
        ("determinism", determinism),
        ("long-document throughput", long_document_throughput),
        ("evaluation sanity", evaluation_sanity),
        ("bootstrap comparison", bootstrap),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
