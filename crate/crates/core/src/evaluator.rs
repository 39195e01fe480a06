//! Scoring concept pairs and computing precision / recall / F1.
//!
//! Inference is deterministic: the latent is the encoder mean (noise off),
//! and a pair `(p, q)` is positive when `sigmoid(z_p . R . z_q)` reaches the
//! decision threshold (`>=`, so an uninformative 0.5 score counts as
//! positive at the default threshold).

use thiserror::Error;

use crate::dataset::Relation;
use crate::graph::ConceptGraph;
use crate::model::{distmult_scores, encode_deterministic, ModelParams};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("concept id {0} is not a node of this graph")]
    UnknownNode(usize),
    #[error("evaluation needs a non-empty test set")]
    EmptyTestSet,
    #[error(transparent)]
    Model(#[from] crate::model::ModelError),
}

pub type Result<T> = std::result::Result<T, EvalError>;

/// Classification counts and derived metrics for one evaluation run.
///
/// Zero-denominator metrics are defined as 0 so reports stay total.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricReport {
    pub f1: f64,
    pub precision: f64,
    pub recall: f64,
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub true_negatives: usize,
    pub threshold: f64,
    pub seed: u64,
}

impl MetricReport {
    /// Derive metrics from raw counts.
    pub fn from_counts(
        true_positives: usize,
        false_positives: usize,
        false_negatives: usize,
        true_negatives: usize,
        threshold: f64,
        seed: u64,
    ) -> Self {
        let precision = if true_positives + false_positives > 0 {
            true_positives as f64 / (true_positives + false_positives) as f64
        } else {
            0.0
        };
        let recall = if true_positives + false_negatives > 0 {
            true_positives as f64 / (true_positives + false_negatives) as f64
        } else {
            0.0
        };
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        Self {
            f1,
            precision,
            recall,
            true_positives,
            false_positives,
            false_negatives,
            true_negatives,
            threshold,
            seed,
        }
    }
}

/// One scored pair, in vocabulary-id space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairPrediction {
    pub from: usize,
    pub to: usize,
    pub label: u8,
    pub probability: f64,
    pub predicted: bool,
}

/// Mean and standard deviation of each metric over seeds.
///
/// Each metric is averaged per seed (mean F1 is *not* recomputed from mean
/// precision and recall; the harmonic mean of the averages is a different,
/// generally larger quantity).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricAggregate {
    pub mean_f1: f64,
    pub mean_precision: f64,
    pub mean_recall: f64,
    pub std_f1: f64,
    pub std_precision: f64,
    pub std_recall: f64,
    pub runs: usize,
}

/// Probability and decision for a single directed pair of vocabulary
/// concept ids, scored deterministically (`Z = mu`).
pub fn predict_pair(
    params: &ModelParams,
    graph: &ConceptGraph,
    from: usize,
    to: usize,
    threshold: f64,
) -> Result<(f64, bool)> {
    let enc = encode_deterministic(graph, &params.encoder)?;
    let logits = distmult_scores(&enc.z, &params.distmult)?;
    let p = graph.node_index(from).ok_or(EvalError::UnknownNode(from))?;
    let q = graph.node_index(to).ok_or(EvalError::UnknownNode(to))?;
    let probability = sigmoid(logits.get(p, q));
    Ok((probability, probability >= threshold))
}

/// Score every labeled pair and assemble a [`MetricReport`] plus the
/// per-pair prediction dump. Pairs are given in vocabulary-id space and must
/// all resolve to nodes of `graph`.
pub fn evaluate(
    params: &ModelParams,
    graph: &ConceptGraph,
    pairs: &[Relation],
    threshold: f64,
    seed: u64,
) -> Result<(MetricReport, Vec<PairPrediction>)> {
    if pairs.is_empty() {
        return Err(EvalError::EmptyTestSet);
    }
    let enc = encode_deterministic(graph, &params.encoder)?;
    let logits = distmult_scores(&enc.z, &params.distmult)?;
    let mut predictions = Vec::with_capacity(pairs.len());
    let (mut tp, mut fp, mut fn_count, mut tn) = (0usize, 0usize, 0usize, 0usize);
    for r in pairs {
        let p = graph.node_index(r.from).ok_or(EvalError::UnknownNode(r.from))?;
        let q = graph.node_index(r.to).ok_or(EvalError::UnknownNode(r.to))?;
        let probability = sigmoid(logits.get(p, q));
        let predicted = probability >= threshold;
        match (r.label == 1, predicted) {
            (true, true) => tp += 1,
            (true, false) => fn_count += 1,
            (false, true) => fp += 1,
            (false, false) => tn += 1,
        }
        predictions.push(PairPrediction {
            from: r.from,
            to: r.to,
            label: r.label,
            probability,
            predicted,
        });
    }
    Ok((
        MetricReport::from_counts(tp, fp, fn_count, tn, threshold, seed),
        predictions,
    ))
}

/// Per-metric mean and population standard deviation over seed reports.
pub fn aggregate(reports: &[MetricReport]) -> MetricAggregate {
    assert!(!reports.is_empty(), "aggregate needs at least one report");
    let n = reports.len() as f64;
    let mean = |f: fn(&MetricReport) -> f64| reports.iter().map(f).sum::<f64>() / n;
    let stddev = |f: fn(&MetricReport) -> f64, m: f64| {
        (reports.iter().map(|r| (f(r) - m).powi(2)).sum::<f64>() / n).sqrt()
    };
    let mean_f1 = mean(|r| r.f1);
    let mean_precision = mean(|r| r.precision);
    let mean_recall = mean(|r| r.recall);
    MetricAggregate {
        mean_f1,
        mean_precision,
        mean_recall,
        std_f1: stddev(|r| r.f1, mean_f1),
        std_precision: stddev(|r| r.precision, mean_precision),
        std_recall: stddev(|r| r.recall, mean_recall),
        runs: reports.len(),
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Render reports and their aggregate as a results TSV
/// (`method<TAB>f1<TAB>precision<TAB>recall<TAB>seed`).
pub fn render_results_tsv(method: &str, reports: &[MetricReport], agg: &MetricAggregate) -> String {
    let mut out = String::from("method\tf1\tprecision\trecall\tseed\n");
    for r in reports {
        out.push_str(&format!(
            "{method}\t{:.6}\t{:.6}\t{:.6}\t{}\n",
            r.f1, r.precision, r.recall, r.seed
        ));
    }
    out.push_str(&format!(
        "{method}\t{:.6}\t{:.6}\t{:.6}\tmean\n",
        agg.mean_f1, agg.mean_precision, agg.mean_recall
    ));
    out.push_str(&format!(
        "{method}\t{:.6}\t{:.6}\t{:.6}\tstddev\n",
        agg.std_f1, agg.std_precision, agg.std_recall
    ));
    out
}

/// Render the per-pair prediction dump as TSV. `name_of` maps vocabulary ids
/// to display names.
pub fn render_prediction_dump(
    predictions: &[PairPrediction],
    name_of: impl Fn(usize) -> String,
) -> String {
    let mut out = String::from("from\tto\tlabel\tprobability\tpredicted\n");
    for p in predictions {
        out.push_str(&format!(
            "{}\t{}\t{}\t{:.6}\t{}\n",
            name_of(p.from),
            name_of(p.to),
            p.label,
            p.probability,
            p.predicted as u8
        ));
    }
    out
}
