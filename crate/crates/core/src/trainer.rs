//! Data splitting, balanced negative sampling, the epoch loop and parameter
//! updates.
//!
//! Positive relations are partitioned 85/5/10 (floor on validation and test,
//! remainder to train) and each partition receives an equal number of
//! sampled negatives that collide with no positive in either direction.
//! Only the training positives are embedded into the adjacency, so held-out
//! pairs are never visible to message passing.
//!
//! Training feeds whole graphs: the cross-domain graph every epoch, or, in
//! single-domain mode, the source graph on odd epochs and the target graph
//! on even epochs. Updates use adaptive moment estimation over the flattened
//! parameter vector. Everything is a pure function of `(seed, config, data)`
//! down to the bit level.

use std::collections::HashSet;

use thiserror::Error;

use crate::dataset::{Concept, ConceptVocab, CooccurrenceCounts, DomainTag, Relation, RelationSet};
use crate::evaluator::{self, MetricAggregate, MetricReport, PairPrediction};
use crate::graph::{
    build_cross_domain_graph, build_single_domain_graphs, ConceptGraph, EdgePolicy,
};
use crate::model::{
    backward, compute_loss, discriminate, distmult_scores, encode_with_noise, Dims, EncoderKind,
    LossBreakdown, ModelParams,
};
use crate::numeric::RngState;

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("need at least 20 positive relations to split (got {0}); the validation slice would be empty")]
    TooFewPositives(usize),
    #[error("relation set passed to split_relations contains label-0 pairs")]
    UnexpectedNegatives,
    #[error("split contains concepts from both domains; negatives must be sampled within one domain")]
    MixedDomains,
    #[error("vocabulary too small: {available} candidate pairs cannot supply {needed} negatives")]
    InsufficientNegatives { needed: usize, available: usize },
    #[error("config: {0}")]
    BadConfig(String),
    #[error("non-finite {term} loss at epoch {epoch}; aborting")]
    NonFiniteLoss { epoch: usize, term: &'static str },
    #[error(transparent)]
    Graph(#[from] crate::graph::GraphError),
    #[error(transparent)]
    Model(#[from] crate::model::ModelError),
    #[error(transparent)]
    Eval(#[from] crate::evaluator::EvalError),
    #[error("relations: {0}")]
    Relations(String),
}

pub type Result<T> = std::result::Result<T, TrainError>;

/// RNG stream ids, one per randomness consumer.
mod streams {
    pub const SPLIT: u64 = 1;
    pub const NEGATIVES: u64 = 2;
    pub const INIT: u64 = 3;
    pub const NOISE: u64 = 4;
}

/// Which graphs an epoch loop consumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphMode {
    Cross,
    Single,
}

impl std::fmt::Display for GraphMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            GraphMode::Cross => "cross",
            GraphMode::Single => "single",
        })
    }
}

/// Directed labeled pairs partitioned into train / validation / test.
/// Immediately after [`split_relations`] the lists hold only positives;
/// [`sample_negatives`] appends the balancing negatives to each partition.
#[derive(Debug, Clone)]
pub struct RelationSplit {
    pub train: Vec<Relation>,
    pub val: Vec<Relation>,
    pub test: Vec<Relation>,
    pub seed: u64,
}

impl RelationSplit {
    pub fn positives(part: &[Relation]) -> Vec<Relation> {
        part.iter().copied().filter(|r| r.label == 1).collect()
    }

    pub fn train_positives(&self) -> Vec<Relation> {
        Self::positives(&self.train)
    }
}

/// Full training configuration with every default materialized.
#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub adam_epsilon: f64,
    pub grl_lambda: f64,
    pub encoder: EncoderKind,
    pub mode: GraphMode,
    pub policy: EdgePolicy,
    pub hidden: usize,
    pub latent: usize,
    pub disc_hidden: usize,
    pub diagonal_r: bool,
    /// Decision threshold for validation selection and evaluation.
    pub threshold: f64,
    pub seeds: Vec<u64>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 200,
            learning_rate: 0.01,
            beta1: 0.9,
            beta2: 0.999,
            adam_epsilon: 1e-8,
            grl_lambda: 1.0,
            encoder: EncoderKind::Gcn,
            mode: GraphMode::Single,
            policy: EdgePolicy::default_policy(),
            hidden: 32,
            latent: 16,
            disc_hidden: 16,
            diagonal_r: false,
            threshold: 0.5,
            seeds: vec![0, 1, 2, 3, 4],
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs < 1 {
            return Err(TrainError::BadConfig("epochs must be at least 1".into()));
        }
        if !(self.learning_rate > 0.0) {
            return Err(TrainError::BadConfig("learning rate must be positive".into()));
        }
        if self.seeds.is_empty() {
            return Err(TrainError::BadConfig("at least one seed is required".into()));
        }
        if self.hidden == 0 || self.latent == 0 || self.disc_hidden == 0 {
            return Err(TrainError::BadConfig("layer widths must be positive".into()));
        }
        Ok(())
    }

    /// Flat key=value rendering, embedded into checkpoints and manifests.
    pub fn config_echo(&self) -> String {
        let cosine = match self.policy.cosine {
            crate::graph::CosineRule::Threshold(t) => format!("cos-threshold={t}"),
            crate::graph::CosineRule::TopK(k) => format!("cos-top-k={k}"),
        };
        format!(
            "epochs={}\nlr={}\nbeta1={}\nbeta2={}\nadam-epsilon={}\ngrl-lambda={}\nencoder={}\nmode={}\n{cosine}\npmi-threshold={}\nuse-pmi={}\nweighted-edges={}\nhidden={}\nlatent={}\ndisc-hidden={}\ndiagonal-r={}\nthreshold={}\nseeds={}\n",
            self.epochs,
            self.learning_rate,
            self.beta1,
            self.beta2,
            self.adam_epsilon,
            self.grl_lambda,
            self.encoder,
            self.mode,
            self.policy.pmi_threshold,
            self.policy.use_pmi,
            self.policy.weighted,
            self.hidden,
            self.latent,
            self.disc_hidden,
            self.diagonal_r,
            self.threshold,
            self.seeds.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(","),
        )
    }

    /// Method label for result tables, e.g. `gcn+cos+davgae`.
    pub fn method_name(&self) -> String {
        let mut name = self.encoder.to_string();
        name.push_str("+cos");
        if self.policy.use_pmi {
            name.push_str("+pmi");
        }
        if self.grl_lambda != 0.0 {
            name.push_str("+davgae");
        } else {
            name.push_str("+vgae");
        }
        name
    }
}

/// Partition positive relations 85/5/10 by count, deterministically per seed.
/// Validation and test sizes are floored; the remainder trains.
pub fn split_relations(relations: &RelationSet, seed: u64) -> Result<RelationSplit> {
    if relations.relations().iter().any(|r| r.label != 1) {
        return Err(TrainError::UnexpectedNegatives);
    }
    let mut positives = relations.positives();
    let n = positives.len();
    if n < 20 {
        return Err(TrainError::TooFewPositives(n));
    }
    let n_test = n / 10;
    let n_val = n / 20;
    let mut rng = RngState::new(seed).fork(streams::SPLIT);
    rng.shuffle(&mut positives);
    let test = positives[..n_test].to_vec();
    let val = positives[n_test..n_test + n_val].to_vec();
    let train = positives[n_test + n_val..].to_vec();
    Ok(RelationSplit { train, val, test, seed })
}

/// Append balanced negatives to every partition.
///
/// Negatives are ordered pairs within the positives' own domain that avoid
/// self-pairs, avoid every positive in either direction, and are globally
/// unique across the three partitions.
pub fn sample_negatives(
    split: &RelationSplit,
    vocab: &ConceptVocab,
    rng: &mut RngState,
) -> Result<RelationSplit> {
    let all_pos: Vec<Relation> = split
        .train
        .iter()
        .chain(&split.val)
        .chain(&split.test)
        .copied()
        .filter(|r| r.label == 1)
        .collect();
    let domain = domain_of_positives(vocab, &all_pos)?;
    let domain_ids = vocab.domain_ids(domain);
    let n_d = domain_ids.len();

    let mut forbidden: HashSet<(usize, usize)> = HashSet::new();
    for r in &all_pos {
        forbidden.insert((r.from, r.to));
        forbidden.insert((r.to, r.from));
    }
    let ordered_pairs = n_d.saturating_mul(n_d.saturating_sub(1));
    let available = ordered_pairs.saturating_sub(forbidden.len());
    let needed =
        count_positives(&split.train) + count_positives(&split.val) + count_positives(&split.test);
    if available < needed {
        return Err(TrainError::InsufficientNegatives { needed, available });
    }

    let mut chosen: Vec<(usize, usize)> = Vec::with_capacity(needed);
    if needed * 2 > available {
        // Dense regime: enumerate the whole candidate pool and shuffle.
        let mut pool: Vec<(usize, usize)> = Vec::with_capacity(available);
        for &p in &domain_ids {
            for &q in &domain_ids {
                if p != q && !forbidden.contains(&(p, q)) {
                    pool.push((p, q));
                }
            }
        }
        rng.shuffle(&mut pool);
        chosen.extend(pool.into_iter().take(needed));
    } else {
        // Sparse regime: rejection sampling terminates quickly.
        let mut taken: HashSet<(usize, usize)> = HashSet::new();
        while chosen.len() < needed {
            let p = domain_ids[rng.next_index(n_d)];
            let q = domain_ids[rng.next_index(n_d)];
            if p == q || forbidden.contains(&(p, q)) || !taken.insert((p, q)) {
                continue;
            }
            chosen.push((p, q));
        }
    }

    let negative = |&(from, to): &(usize, usize)| Relation { from, to, label: 0 };
    let mut out = split.clone();
    let mut cursor = chosen.iter();
    out.train
        .extend(cursor.by_ref().take(count_positives(&split.train)).map(negative));
    out.val
        .extend(cursor.by_ref().take(count_positives(&split.val)).map(negative));
    out.test.extend(cursor.map(negative));
    Ok(out)
}

fn count_positives(part: &[Relation]) -> usize {
    part.iter().filter(|r| r.label == 1).count()
}

fn domain_of_positives(vocab: &ConceptVocab, positives: &[Relation]) -> Result<DomainTag> {
    let mut domain: Option<DomainTag> = None;
    for r in positives {
        for id in [r.from, r.to] {
            let tag = vocab
                .get(id)
                .map(|c: &Concept| c.domain)
                .ok_or_else(|| TrainError::Relations(format!("unknown concept id {id}")))?;
            match domain {
                None => domain = Some(tag),
                Some(d) if d != tag => return Err(TrainError::MixedDomains),
                _ => {}
            }
        }
    }
    domain.ok_or(TrainError::MixedDomains)
}

/// Graphs an epoch loop runs over.
#[derive(Debug, Clone)]
pub enum TrainGraphs {
    Cross(ConceptGraph),
    Single { source: ConceptGraph, target: ConceptGraph },
}

impl TrainGraphs {
    /// Graph carrying the source-domain nodes (validation pairs live here).
    pub fn source_view(&self) -> &ConceptGraph {
        match self {
            TrainGraphs::Cross(g) => g,
            TrainGraphs::Single { source, .. } => source,
        }
    }

    /// Graph carrying the target-domain nodes (prediction queries live here).
    pub fn target_view(&self) -> &ConceptGraph {
        match self {
            TrainGraphs::Cross(g) => g,
            TrainGraphs::Single { target, .. } => target,
        }
    }
}

/// Which graph an epoch consumed, for the loss log.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFed {
    Cross,
    Source,
    Target,
}

impl GraphFed {
    pub fn as_str(self) -> &'static str {
        match self {
            GraphFed::Cross => "cross",
            GraphFed::Source => "src",
            GraphFed::Target => "tgt",
        }
    }
}

/// One loss-log row.
#[derive(Debug, Clone, Copy)]
pub struct EpochRecord {
    pub epoch: usize,
    pub loss: LossBreakdown,
    pub graph_fed: GraphFed,
}

/// Result of one training run.
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    /// Parameters selected by validation F1 (final-epoch parameters when no
    /// validation pairs were supplied).
    pub params: ModelParams,
    pub log: Vec<EpochRecord>,
    /// 1-based epoch whose parameters were selected, if selection ran.
    pub best_epoch: Option<usize>,
    pub best_val_f1: Option<f64>,
}

/// Adaptive moment estimation over one flat parameter vector.
struct AdamState {
    m: Vec<f64>,
    v: Vec<f64>,
    step: usize,
}

impl AdamState {
    fn new(len: usize) -> Self {
        Self {
            m: vec![0.0; len],
            v: vec![0.0; len],
            step: 0,
        }
    }

    fn update(&mut self, params: &mut [f64], grads: &[f64], config: &TrainConfig) {
        self.step += 1;
        let t = self.step as i32;
        let correction = (1.0 - config.beta2.powi(t)).sqrt() / (1.0 - config.beta1.powi(t));
        let lr_t = config.learning_rate * correction;
        for i in 0..params.len() {
            let g = grads[i];
            self.m[i] = config.beta1 * self.m[i] + (1.0 - config.beta1) * g;
            self.v[i] = config.beta2 * self.v[i] + (1.0 - config.beta2) * g * g;
            params[i] -= lr_t * self.m[i] / (self.v[i].sqrt() + config.adam_epsilon);
        }
    }
}

fn check_finite(loss: &LossBreakdown, epoch: usize) -> Result<()> {
    for (value, term) in [
        (loss.recon, "reconstruction"),
        (loss.kl, "kl"),
        (loss.dis, "discriminator"),
        (loss.total, "total"),
    ] {
        if !value.is_finite() {
            return Err(TrainError::NonFiniteLoss { epoch, term });
        }
    }
    Ok(())
}

/// Run `config.epochs` epochs on `graphs`, selecting parameters by
/// validation F1 when the split carries validation pairs.
///
/// Single-domain alternation: source graph on odd epochs (1-based), target
/// graph on even epochs.
pub fn train(
    graphs: &TrainGraphs,
    config: &TrainConfig,
    split: &RelationSplit,
    seed: u64,
) -> Result<TrainOutcome> {
    config.validate()?;
    let feature_dim = graphs.source_view().features().cols();
    let dims = Dims::new(feature_dim, config.hidden, config.latent, config.disc_hidden);
    let mut init_rng = RngState::new(seed).fork(streams::INIT);
    let mut params = ModelParams::init(
        dims,
        config.encoder,
        config.diagonal_r,
        config.grl_lambda,
        &mut init_rng,
    );
    let mut noise_rng = RngState::new(seed).fork(streams::NOISE);
    let mut adam = AdamState::new(params.flatten().len());
    let mut log = Vec::with_capacity(config.epochs);
    let mut best: Option<(usize, f64, ModelParams)> = None;

    for epoch in 1..=config.epochs {
        let (graph, fed) = match (config.mode, graphs) {
            (GraphMode::Cross, TrainGraphs::Cross(g)) => (g, GraphFed::Cross),
            (GraphMode::Single, TrainGraphs::Single { source, target }) => {
                if epoch % 2 == 1 {
                    (source, GraphFed::Source)
                } else {
                    (target, GraphFed::Target)
                }
            }
            _ => {
                return Err(TrainError::BadConfig(
                    "graph mode does not match the supplied graphs".into(),
                ))
            }
        };
        let eps = noise_rng.standard_normal_matrix(graph.node_count(), config.latent);
        let enc = encode_with_noise(graph, &params.encoder, &eps)?;
        let logits = distmult_scores(&enc.z, &params.distmult)?;
        let dis_probs = discriminate(&enc.z, &params.discriminator)?;
        let loss = compute_loss(graph, &enc, &logits, &dis_probs)?;
        check_finite(&loss, epoch)?;
        let grads = backward(graph, &params, &enc)?;
        let mut flat = params.flatten();
        adam.update(&mut flat, &grads.flatten(), config);
        params.set_flat(&flat);
        log.push(EpochRecord { epoch, loss, graph_fed: fed });

        if !split.val.is_empty() {
            let (report, _) = evaluator::evaluate(
                &params,
                graphs.source_view(),
                &split.val,
                config.threshold,
                seed,
            )?;
            let improved = best.as_ref().map_or(true, |(_, f1, _)| report.f1 > *f1);
            if improved {
                best = Some((epoch, report.f1, params.clone()));
            }
        }
    }

    let (params, best_epoch, best_val_f1) = match best {
        Some((epoch, f1, p)) => (p, Some(epoch), Some(f1)),
        None => (params, None, None),
    };
    Ok(TrainOutcome {
        params,
        log,
        best_epoch,
        best_val_f1,
    })
}

/// Everything one experiment consumes.
#[derive(Debug, Clone, Copy)]
pub struct DomainData<'a> {
    pub vocab: &'a ConceptVocab,
    pub embeddings: &'a crate::dataset::EmbeddingTable,
    pub source_relations: &'a RelationSet,
    /// Target-domain ground truth, used only to build the evaluation split.
    pub target_relations: Option<&'a RelationSet>,
    pub counts: Option<&'a CooccurrenceCounts>,
}

/// One seed's artifacts.
#[derive(Debug, Clone)]
pub struct SeedRun {
    pub seed: u64,
    pub report: MetricReport,
    pub predictions: Vec<PairPrediction>,
    pub params: ModelParams,
    pub log: Vec<EpochRecord>,
    pub best_epoch: Option<usize>,
    pub source_split: RelationSplit,
    pub target_split: Option<RelationSplit>,
}

/// All seeds plus the metric aggregate.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub runs: Vec<SeedRun>,
    pub aggregate: MetricAggregate,
}

/// Build the training graphs for one seed: annotation edges come from the
/// training positives only.
pub fn build_training_graphs(
    data: &DomainData<'_>,
    config: &TrainConfig,
    split: &RelationSplit,
) -> Result<TrainGraphs> {
    let train_rel =
        RelationSet::from_relations(split.train_positives()).map_err(TrainError::Relations)?;
    Ok(match config.mode {
        GraphMode::Cross => TrainGraphs::Cross(build_cross_domain_graph(
            data.vocab,
            data.embeddings,
            &train_rel,
            &config.policy,
            data.counts,
        )?),
        GraphMode::Single => {
            let (source, target) =
                build_single_domain_graphs(data.vocab, data.embeddings, &train_rel, &config.policy)?;
            TrainGraphs::Single { source, target }
        }
    })
}

/// Split, sample, train and evaluate one seed.
pub fn run_seed(data: &DomainData<'_>, config: &TrainConfig, seed: u64) -> Result<SeedRun> {
    let source_split = split_relations(data.source_relations, seed)?;
    let mut neg_rng = RngState::new(seed).fork(streams::NEGATIVES);
    let source_split = sample_negatives(&source_split, data.vocab, &mut neg_rng)?;

    let target_split = match data.target_relations {
        Some(rels) => {
            let split = split_relations(rels, seed)?;
            Some(sample_negatives(&split, data.vocab, &mut neg_rng)?)
        }
        None => None,
    };

    let graphs = build_training_graphs(data, config, &source_split)?;
    let outcome = train(&graphs, config, &source_split, seed)?;

    // Evaluate on the target test partition when target ground truth exists;
    // otherwise fall back to the held-out source test partition.
    let (eval_graph, eval_pairs) = match &target_split {
        Some(split) => (graphs.target_view(), split.test.as_slice()),
        None => (graphs.source_view(), source_split.test.as_slice()),
    };
    let (report, predictions) =
        evaluator::evaluate(&outcome.params, eval_graph, eval_pairs, config.threshold, seed)?;

    Ok(SeedRun {
        seed,
        report,
        predictions,
        params: outcome.params,
        log: outcome.log,
        best_epoch: outcome.best_epoch,
        source_split,
        target_split,
    })
}

/// Execute the whole per-seed pipeline for every configured seed and
/// aggregate the metrics in seed order.
pub fn run_seeds(data: &DomainData<'_>, config: &TrainConfig) -> Result<RunSummary> {
    config.validate()?;
    let mut runs = Vec::with_capacity(config.seeds.len());
    for &seed in &config.seeds {
        runs.push(run_seed(data, config, seed)?);
    }
    let reports: Vec<MetricReport> = runs.iter().map(|r| r.report).collect();
    let aggregate = evaluator::aggregate(&reports);
    Ok(RunSummary { runs, aggregate })
}

/// Render the per-epoch loss log as TSV
/// (`epoch<TAB>recon<TAB>kl<TAB>dis<TAB>total<TAB>graph_fed`).
pub fn render_loss_log(log: &[EpochRecord]) -> String {
    let mut out = String::from("epoch\trecon\tkl\tdis\ttotal\tgraph_fed\n");
    for row in log {
        out.push_str(&format!(
            "{}\t{:.9}\t{:.9}\t{:.9}\t{:.9}\t{}\n",
            row.epoch,
            row.loss.recon,
            row.loss.kl,
            row.loss.dis,
            row.loss.total,
            row.graph_fed.as_str()
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::EmbeddingTable;

    fn positives(n: usize) -> RelationSet {
        // A dense-enough synthetic positive set over the smallest concept
        // count whose upper triangle can hold n pairs.
        let mut relations = Vec::new();
        let mut width = 2;
        while width * (width - 1) / 2 < n {
            width += 1;
        }
        'outer: for p in 0..width {
            for q in (p + 1)..width {
                if relations.len() == n {
                    break 'outer;
                }
                relations.push(Relation { from: p, to: q, label: 1 });
            }
        }
        RelationSet::from_relations(relations).unwrap()
    }

    fn vocab_of(n: usize, domain: DomainTag) -> ConceptVocab {
        ConceptVocab::from_entries((0..n).map(|i| (format!("c{i}"), domain)).collect()).unwrap()
    }

    #[test]
    fn split_follows_floor_rule_at_paper_scale() {
        // 1551 positives -> 155 test, 77 val, 1319 train.
        let rels = positives(1551);
        let split = split_relations(&rels, 0).unwrap();
        assert_eq!(split.test.len(), 155);
        assert_eq!(split.val.len(), 77);
        assert_eq!(split.train.len(), 1319);
    }

    #[test]
    fn split_of_twenty_gives_one_val_two_test() {
        let rels = positives(20);
        let split = split_relations(&rels, 3).unwrap();
        assert_eq!(split.val.len(), 1);
        assert_eq!(split.test.len(), 2);
        assert_eq!(split.train.len(), 17);
    }

    #[test]
    fn split_is_deterministic_and_partitions() {
        let rels = positives(100);
        let a = split_relations(&rels, 7).unwrap();
        let b = split_relations(&rels, 7).unwrap();
        assert_eq!(a.train, b.train);
        assert_eq!(a.val, b.val);
        assert_eq!(a.test, b.test);
        let mut all: Vec<Relation> =
            a.train.iter().chain(&a.val).chain(&a.test).copied().collect();
        all.sort_by_key(|r| (r.from, r.to));
        let mut orig = rels.positives();
        orig.sort_by_key(|r| (r.from, r.to));
        assert_eq!(all, orig);
        let c = split_relations(&rels, 8).unwrap();
        assert_ne!(a.train, c.train);
    }

    #[test]
    fn split_rejects_small_sets_and_negatives() {
        assert!(matches!(
            split_relations(&positives(19), 0),
            Err(TrainError::TooFewPositives(19))
        ));
        let with_neg =
            RelationSet::from_relations(vec![Relation { from: 0, to: 1, label: 0 }]).unwrap();
        assert!(matches!(
            split_relations(&with_neg, 0),
            Err(TrainError::UnexpectedNegatives)
        ));
    }

    #[test]
    fn negatives_balance_and_avoid_positives() {
        let rels = positives(60);
        let vocab = vocab_of(40, DomainTag::Source);
        let split = split_relations(&rels, 1).unwrap();
        let with_neg = sample_negatives(&split, &vocab, &mut RngState::new(1)).unwrap();
        let positives_set: HashSet<(usize, usize)> = rels
            .positives()
            .iter()
            .flat_map(|r| [(r.from, r.to), (r.to, r.from)])
            .collect();
        let mut seen = HashSet::new();
        for (part, pos_count) in [
            (&with_neg.train, split.train.len()),
            (&with_neg.val, split.val.len()),
            (&with_neg.test, split.test.len()),
        ] {
            let negs: Vec<&Relation> = part.iter().filter(|r| r.label == 0).collect();
            assert_eq!(negs.len(), pos_count, "negatives balance positives");
            for r in negs {
                assert_ne!(r.from, r.to);
                assert!(!positives_set.contains(&(r.from, r.to)), "collision with a positive");
                assert!(seen.insert((r.from, r.to)), "duplicate negative");
            }
        }
    }

    #[test]
    fn negative_sampling_is_deterministic_per_rng() {
        let rels = positives(50);
        let vocab = vocab_of(30, DomainTag::Source);
        let split = split_relations(&rels, 2).unwrap();
        let a = sample_negatives(&split, &vocab, &mut RngState::new(9)).unwrap();
        let b = sample_negatives(&split, &vocab, &mut RngState::new(9)).unwrap();
        assert_eq!(a.train, b.train);
        assert_eq!(a.test, b.test);
    }

    #[test]
    fn two_concept_vocab_cannot_supply_negatives() {
        let vocab = vocab_of(2, DomainTag::Source);
        let split = RelationSplit {
            train: vec![
                Relation { from: 0, to: 1, label: 1 },
                Relation { from: 1, to: 0, label: 1 },
            ],
            val: vec![],
            test: vec![],
            seed: 0,
        };
        let err = sample_negatives(&split, &vocab, &mut RngState::new(0)).unwrap_err();
        assert!(matches!(err, TrainError::InsufficientNegatives { .. }));
    }

    #[test]
    fn dense_pool_enumeration_path_works() {
        // 5 concepts: 20 ordered pairs, 4 positives forbid 8, pool = 12.
        // Asking for 8 negatives trips the dense enumerate-and-shuffle path.
        let vocab = vocab_of(5, DomainTag::Source);
        let split = RelationSplit {
            train: (0..4).map(|i| Relation { from: i, to: i + 1 % 5, label: 1 }).collect(),
            val: vec![],
            test: vec![],
            seed: 0,
        };
        let doubled = RelationSplit {
            train: split
                .train
                .iter()
                .copied()
                .chain((0..4).map(|i| Relation { from: i + 1, to: i, label: 1 }))
                .collect(),
            val: vec![],
            test: vec![],
            seed: 0,
        };
        let _ = doubled;
        let out = sample_negatives(&split, &vocab, &mut RngState::new(4)).unwrap();
        let negs: Vec<&Relation> = out.train.iter().filter(|r| r.label == 0).collect();
        assert_eq!(negs.len(), 4);
        let unique: HashSet<(usize, usize)> = negs.iter().map(|r| (r.from, r.to)).collect();
        assert_eq!(unique.len(), 4);
    }

    #[test]
    fn config_validation_rejects_bad_values() {
        let config = TrainConfig { epochs: 0, ..TrainConfig::default() };
        assert!(config.validate().is_err());
        let config = TrainConfig { learning_rate: 0.0, ..TrainConfig::default() };
        assert!(config.validate().is_err());
        let config = TrainConfig { seeds: vec![], ..TrainConfig::default() };
        assert!(config.validate().is_err());
    }

    #[test]
    fn method_name_reflects_configuration() {
        let mut config = TrainConfig::default();
        assert_eq!(config.method_name(), "gcn+cos+davgae");
        config.grl_lambda = 0.0;
        assert_eq!(config.method_name(), "gcn+cos+vgae");
        config.encoder = EncoderKind::Gat;
        config.policy.use_pmi = true;
        config.grl_lambda = 1.0;
        assert_eq!(config.method_name(), "gat+cos+pmi+davgae");
    }

    fn tiny_data() -> (ConceptVocab, EmbeddingTable, RelationSet) {
        let mut entries: Vec<(String, DomainTag)> =
            (0..12).map(|i| (format!("s{i}"), DomainTag::Source)).collect();
        entries.extend((0..6).map(|i| (format!("t{i}"), DomainTag::Target)));
        let vocab = ConceptVocab::from_entries(entries).unwrap();
        let mut rng = RngState::new(5);
        let emb = EmbeddingTable::from_vectors(
            (0..18).map(|_| (0..6).map(|_| rng.next_standard_normal()).collect()).collect(),
        )
        .unwrap();
        // One direction per unordered pair, as prerequisite annotations are.
        let mut relations = Vec::new();
        for p in 0..12usize {
            for q in (p + 1)..12usize {
                if (p + q) % 3 == 0 {
                    relations.push(Relation { from: p, to: q, label: 1 });
                }
            }
        }
        let rels = RelationSet::from_relations(relations).unwrap();
        (vocab, emb, rels)
    }

    #[test]
    fn training_runs_are_bit_for_bit_deterministic() {
        let (vocab, emb, rels) = tiny_data();
        let data = DomainData {
            vocab: &vocab,
            embeddings: &emb,
            source_relations: &rels,
            target_relations: None,
            counts: None,
        };
        let config = TrainConfig {
            epochs: 6,
            seeds: vec![0],
            mode: GraphMode::Cross,
            hidden: 6,
            latent: 4,
            disc_hidden: 4,
            ..TrainConfig::default()
        };
        let a = run_seeds(&data, &config).unwrap();
        let b = run_seeds(&data, &config).unwrap();
        assert_eq!(a.runs[0].params.flatten(), b.runs[0].params.flatten());
        for (ra, rb) in a.runs[0].log.iter().zip(&b.runs[0].log) {
            assert_eq!(ra.loss.total.to_bits(), rb.loss.total.to_bits());
        }
        assert_eq!(a.aggregate, b.aggregate);
    }

    #[test]
    fn single_domain_mode_alternates_graphs_evenly() {
        let (vocab, emb, rels) = tiny_data();
        let data = DomainData {
            vocab: &vocab,
            embeddings: &emb,
            source_relations: &rels,
            target_relations: None,
            counts: None,
        };
        let config = TrainConfig {
            epochs: 10,
            seeds: vec![0],
            mode: GraphMode::Single,
            hidden: 6,
            latent: 4,
            disc_hidden: 4,
            ..TrainConfig::default()
        };
        let summary = run_seeds(&data, &config).unwrap();
        let log = &summary.runs[0].log;
        assert_eq!(log.len(), 10);
        let src = log.iter().filter(|r| r.graph_fed == GraphFed::Source).count();
        let tgt = log.iter().filter(|r| r.graph_fed == GraphFed::Target).count();
        assert_eq!(src, 5);
        assert_eq!(tgt, 5);
        assert_eq!(log[0].graph_fed, GraphFed::Source, "odd epochs feed the source graph");
        assert_eq!(log[1].graph_fed, GraphFed::Target);
    }

    #[test]
    fn held_out_positives_never_enter_training_adjacency() {
        let (vocab, emb, rels) = tiny_data();
        let config = TrainConfig { mode: GraphMode::Cross, ..TrainConfig::default() };
        let split = split_relations(&rels, 9).unwrap();
        let data = DomainData {
            vocab: &vocab,
            embeddings: &emb,
            source_relations: &rels,
            target_relations: None,
            counts: None,
        };
        let graphs = build_training_graphs(&data, &config, &split).unwrap();
        let graph = graphs.source_view();
        let annotation_edges: HashSet<(usize, usize)> = graph
            .edges()
            .iter()
            .filter(|e| e.origin == crate::graph::EdgeOrigin::Annotation)
            .map(|e| (e.p, e.q))
            .collect();
        for r in split.val.iter().chain(&split.test) {
            let p = graph.node_index(r.from).unwrap();
            let q = graph.node_index(r.to).unwrap();
            let key = if p < q { (p, q) } else { (q, p) };
            assert!(!annotation_edges.contains(&key), "held-out pair leaked into adjacency");
        }
    }
}
