//! Paired bootstrap comparison of two systems over the same documents.
//!
//! Each trial resamples document indices with replacement and checks
//! whether system B's mean fails to exceed system A's. The p-value is the
//! fraction of such trials (one-sided, B claimed better). Trial `t` draws
//! from ChaCha8 stream `t` of the configured seed, so results do not depend
//! on how trials are spread across threads.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{DocScores, PipelineError, SystemReport};

pub const DEFAULT_TRIALS: usize = 10_000;
pub const MIN_TRIALS: usize = 1_000;
pub(crate) const TEST_NAME: &str = "paired bootstrap over documents, one-sided (B > A)";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricComparison {
    pub metric: String,
    pub mean_a: f64,
    pub mean_b: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignificanceRecord {
    pub test: String,
    pub system_a: String,
    pub system_b: String,
    pub documents: usize,
    pub trials: usize,
    pub seed: u64,
    pub metrics: Vec<MetricComparison>,
}

impl SignificanceRecord {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("record serializes");
        s.push('\n');
        s
    }
}

type Column = (String, Box<dyn Fn(&DocScores) -> f64>);

fn metric_columns(a: &SystemReport, b: &SystemReport) -> Vec<Column> {
    let mut cols: Vec<Column> = vec![
        ("R1".into(), Box::new(|d| d.r1)),
        ("R2".into(), Box::new(|d| d.r2)),
        ("RL".into(), Box::new(|d| d.rl)),
    ];
    for name in a.extra_names() {
        if b.corpus.extra.contains_key(&name) {
            let key = name.clone();
            cols.push((name, Box::new(move |d| d.extra.get(&key).copied().unwrap_or(0.0))));
        }
    }
    cols
}

pub fn compare_systems(
    a: &SystemReport,
    b: &SystemReport,
    trials: usize,
    seed: u64,
) -> Result<SignificanceRecord, PipelineError> {
    if trials < MIN_TRIALS {
        return Err(PipelineError::TooFewTrials(trials));
    }
    let ids_a: Vec<&str> = a.documents.iter().map(|d| d.doc_id.as_str()).collect();
    let ids_b: Vec<&str> = b.documents.iter().map(|d| d.doc_id.as_str()).collect();
    if ids_a != ids_b {
        let only_a = ids_a.iter().find(|id| !ids_b.contains(id));
        let only_b = ids_b.iter().find(|id| !ids_a.contains(id));
        return Err(PipelineError::DocSetMismatch(format!(
            "{} vs {} documents; first only in A: {:?}, first only in B: {:?}",
            ids_a.len(),
            ids_b.len(),
            only_a,
            only_b
        )));
    }
    if ids_a.is_empty() {
        return Err(PipelineError::DocSetMismatch("no documents".into()));
    }

    let n = ids_a.len();
    let columns = metric_columns(a, b);
    let values: Vec<(Vec<f64>, Vec<f64>)> = columns
        .iter()
        .map(|(_, get)| (a.documents.iter().map(get).collect(), b.documents.iter().map(get).collect()))
        .collect();

    let not_better: Vec<usize> = (0..trials as u64)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial);
            let sample: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
            values
                .iter()
                .map(|(va, vb)| {
                    let sum_a: f64 = sample.iter().map(|&i| va[i]).sum();
                    let sum_b: f64 = sample.iter().map(|&i| vb[i]).sum();
                    usize::from(sum_b <= sum_a)
                })
                .collect::<Vec<usize>>()
        })
        .reduce(
            || vec![0; values.len()],
            |mut acc, x| {
                acc.iter_mut().zip(x).for_each(|(a, b)| *a += b);
                acc
            },
        );

    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let metrics = columns
        .iter()
        .zip(&values)
        .zip(not_better)
        .map(|(((name, _), (va, vb)), count)| MetricComparison {
            metric: name.clone(),
            mean_a: mean(va),
            mean_b: mean(vb),
            p_value: count as f64 / trials as f64,
        })
        .collect();

    Ok(SignificanceRecord {
        test: TEST_NAME.into(),
        system_a: a.system_id.clone(),
        system_b: b.system_id.clone(),
        documents: n,
        trials,
        seed,
        metrics,
    })
}
