//! Deterministic synthetic datasets.
//!
//! Two generators:
//!
//! * [`fixture_dataset`] produces LectureBankCD-shaped vocabularies,
//!   relation sets, and embeddings at exact requested counts; embeddings are
//!   high-dimensional Gaussians, so pairwise cosines stay far below common
//!   similarity thresholds.
//! * [`transfer_dataset`] builds the two-domain transfer benchmark: both
//!   domains draw concept latents from one distribution and share one
//!   bilinear prerequisite rule, while target features are displaced by a
//!   domain shift. Source labels are for training, target labels only for
//!   evaluation.
//!
//! The TSV writers emit files the loaders in [`crate::dataset`] read back,
//! giving the CLI something to run end to end without LectureBankCD.

use std::collections::HashSet;
use std::io::Write;
use std::path::Path;

use crate::dataset::{ConceptVocab, DomainTag, EmbeddingTable, Relation, RelationSet};
use crate::graph::{build_cross_domain_graph, ConceptGraph, CosineRule, EdgePolicy};
use crate::numeric::{DenseMatrix, RngState};

/// A complete in-memory two-domain dataset.
#[derive(Debug, Clone)]
pub struct SynthDataset {
    pub vocab: ConceptVocab,
    pub embeddings: EmbeddingTable,
    pub source_relations: RelationSet,
    pub target_relations: RelationSet,
}

/// Parameters of the synthetic transfer benchmark.
#[derive(Debug, Clone, Copy)]
pub struct TransferSpec {
    pub concepts_per_domain: usize,
    pub latent_dim: usize,
    /// Fraction of ordered concept pairs that become positive prerequisites.
    pub positive_fraction: f64,
    /// Magnitude of the constant feature offset applied to the target domain.
    pub domain_shift: f64,
    /// Standard deviation of per-feature observation noise.
    pub feature_noise: f64,
    /// When true, target concept i reuses source concept i's latent vector
    /// (same underlying concepts observed through a shifted feature space);
    /// when false, the target domain draws fresh latents from the same
    /// distribution and rule.
    pub shared_latents: bool,
    pub seed: u64,
}

impl Default for TransferSpec {
    fn default() -> Self {
        Self {
            concepts_per_domain: 60,
            latent_dim: 8,
            positive_fraction: 0.08,
            domain_shift: 3.0,
            feature_noise: 0.1,
            shared_latents: true,
            seed: 7,
        }
    }
}

fn names(prefix: &str, n: usize, domain: DomainTag) -> Vec<(String, DomainTag)> {
    (0..n).map(|i| (format!("{prefix}_{i:03}"), domain)).collect()
}

/// Directed prerequisite edges over `latents`: the most related unordered
/// pairs (by latent dot product) become edges, each oriented by the sign of
/// the shared skew form `v_i . S . v_j - v_j . S . v_i`.
///
/// Relatedness makes cosine similarity on (noisy, shifted) features an
/// informative undirected skeleton, the way concept-embedding similarity is
/// for real prerequisite data, while the direction is carried by an
/// antisymmetric bilinear rule that a DistMult decoder can represent
/// exactly. One direction per pair, so a held-out pair never enters the
/// symmetrized adjacency through its reverse.
fn rule_edges(latents: &[Vec<f64>], skew: &DenseMatrix, fraction: f64) -> Vec<(usize, usize)> {
    let n = latents.len();
    let mut scored: Vec<(f64, usize, usize)> = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            let relatedness: f64 = latents[i].iter().zip(&latents[j]).map(|(&a, &b)| a * b).sum();
            scored.push((relatedness, i, j));
        }
    }
    let keep = (((n * (n - 1)) as f64) * fraction).round() as usize;
    scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then((a.1, a.2).cmp(&(b.1, b.2))));
    let mut edges: Vec<(usize, usize)> = scored
        .into_iter()
        .take(keep)
        .map(|(_, i, j)| {
            let mut forward = 0.0;
            for a in 0..skew.rows() {
                for b in 0..skew.cols() {
                    forward += latents[i][a] * skew.get(a, b) * latents[j][b]
                        - latents[j][a] * skew.get(a, b) * latents[i][b];
                }
            }
            if forward >= 0.0 {
                (i, j)
            } else {
                (j, i)
            }
        })
        .collect();
    edges.sort_unstable();
    edges
}

/// Generate the two-domain transfer benchmark.
///
/// Both domains draw latents from `N(0, I)` and share one prerequisite rule;
/// target features are the latents plus a fixed shift vector of magnitude
/// `domain_shift`, so the domains are linearly separable in feature space
/// while their relational structure is identical in distribution.
pub fn transfer_dataset(spec: &TransferSpec) -> SynthDataset {
    let n = spec.concepts_per_domain;
    let k = spec.latent_dim;
    let mut latent_rng = RngState::new(spec.seed).fork(11);
    let mut rule_rng = RngState::new(spec.seed).fork(12);
    let mut noise_rng = RngState::new(spec.seed).fork(13);
    let mut shift_rng = RngState::new(spec.seed).fork(14);

    let draw_latents = |rng: &mut RngState| -> Vec<Vec<f64>> {
        (0..n).map(|_| (0..k).map(|_| rng.next_standard_normal()).collect()).collect()
    };
    let src_latents = draw_latents(&mut latent_rng);
    let tgt_latents = if spec.shared_latents {
        src_latents.clone()
    } else {
        draw_latents(&mut latent_rng)
    };

    let skew = rule_rng.standard_normal_matrix(k, k);
    let src_edges = rule_edges(&src_latents, &skew, spec.positive_fraction);
    let tgt_edges = rule_edges(&tgt_latents, &skew, spec.positive_fraction);

    let mut shift: Vec<f64> = (0..k).map(|_| shift_rng.next_standard_normal()).collect();
    let norm = shift.iter().map(|v| v * v).sum::<f64>().sqrt();
    for v in &mut shift {
        *v *= spec.domain_shift / norm;
    }

    let mut entries = names("src", n, DomainTag::Source);
    entries.extend(names("tgt", n, DomainTag::Target));
    let vocab = ConceptVocab::from_entries(entries).expect("generated names are unique");

    let mut vectors = Vec::with_capacity(2 * n);
    for v in &src_latents {
        vectors.push(
            v.iter().map(|&x| x + spec.feature_noise * noise_rng.next_standard_normal()).collect(),
        );
    }
    for v in &tgt_latents {
        vectors.push(
            v.iter()
                .zip(&shift)
                .map(|(&x, &s)| x + s + spec.feature_noise * noise_rng.next_standard_normal())
                .collect(),
        );
    }
    let embeddings = EmbeddingTable::from_vectors(vectors).expect("noisy gaussians are non-zero");

    let source_relations = RelationSet::from_relations(
        src_edges.iter().map(|&(i, j)| Relation { from: i, to: j, label: 1 }).collect(),
    )
    .expect("rule edges are unique non-self pairs");
    let target_relations = RelationSet::from_relations(
        tgt_edges.iter().map(|&(i, j)| Relation { from: n + i, to: n + j, label: 1 }).collect(),
    )
    .expect("rule edges are unique non-self pairs");

    SynthDataset {
        vocab,
        embeddings,
        source_relations,
        target_relations,
    }
}

/// Generate a dataset with exact vocabulary and positive-relation counts per
/// domain. Directed positives never include both orientations of a pair, so
/// the undirected training adjacency cannot contain a held-out pair through
/// its reverse.
pub fn fixture_dataset(
    n_source: usize,
    source_positives: usize,
    n_target: usize,
    target_positives: usize,
    dim: usize,
    seed: u64,
) -> SynthDataset {
    let mut entries = names("src", n_source, DomainTag::Source);
    entries.extend(names("tgt", n_target, DomainTag::Target));
    let vocab = ConceptVocab::from_entries(entries).expect("generated names are unique");

    let mut emb_rng = RngState::new(seed).fork(21);
    let vectors: Vec<Vec<f64>> = (0..n_source + n_target)
        .map(|_| (0..dim).map(|_| emb_rng.next_standard_normal()).collect())
        .collect();
    let embeddings = EmbeddingTable::from_vectors(vectors).expect("gaussian vectors are non-zero");

    let mut rel_rng = RngState::new(seed).fork(22);
    let mut sample_relations = |count: usize, offset: usize, width: usize| -> RelationSet {
        assert!(
            count <= width * (width - 1) / 2,
            "not enough unordered pairs for {count} positives over {width} concepts"
        );
        let mut used: HashSet<(usize, usize)> = HashSet::new();
        let mut relations = Vec::with_capacity(count);
        while relations.len() < count {
            let a = rel_rng.next_index(width);
            let b = rel_rng.next_index(width);
            if a == b {
                continue;
            }
            let key = (a.min(b), a.max(b));
            if !used.insert(key) {
                continue;
            }
            relations.push(Relation { from: offset + a, to: offset + b, label: 1 });
        }
        relations.sort_by_key(|r| (r.from, r.to));
        RelationSet::from_relations(relations).expect("sampled pairs are unique non-self")
    };
    let source_relations = sample_relations(source_positives, 0, n_source);
    let target_relations = sample_relations(target_positives, n_source, n_target);

    SynthDataset {
        vocab,
        embeddings,
        source_relations,
        target_relations,
    }
}

/// Small random two-domain concept graph (annotation chain over the source
/// block plus whatever cosine edges the random features produce); the
/// gradient-check harness runs on these.
pub fn random_concept_graph(n_source: usize, n_target: usize, dim: usize, seed: u64) -> ConceptGraph {
    let mut entries = names("s", n_source, DomainTag::Source);
    entries.extend(names("t", n_target, DomainTag::Target));
    let vocab = ConceptVocab::from_entries(entries).expect("generated names are unique");
    let mut rng = RngState::new(seed);
    let vectors = (0..n_source + n_target)
        .map(|_| (0..dim).map(|_| rng.next_standard_normal()).collect())
        .collect();
    let embeddings = EmbeddingTable::from_vectors(vectors).expect("gaussians are non-zero");
    let relations = RelationSet::from_relations(
        (1..n_source).map(|i| Relation { from: i - 1, to: i, label: 1 }).collect(),
    )
    .expect("chain is duplicate-free");
    let policy = EdgePolicy::new(CosineRule::Threshold(0.95), 0.0, false, false)
        .expect("static policy is valid");
    build_cross_domain_graph(&vocab, &embeddings, &relations, &policy, None)
        .expect("synthetic inputs satisfy the builder contract")
}

fn write_file(path: &Path, content: &str) -> std::io::Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(content.as_bytes())
}

/// Write a vocabulary as `id<TAB>name<TAB>domain` lines.
pub fn write_vocab_tsv(vocab: &ConceptVocab, path: &Path) -> std::io::Result<()> {
    let mut out = String::new();
    for c in vocab.concepts() {
        out.push_str(&format!("{}\t{}\t{}\n", c.id, c.name, c.domain));
    }
    write_file(path, &out)
}

/// Write relations as `from_name<TAB>to_name<TAB>label` lines.
pub fn write_relations_tsv(
    vocab: &ConceptVocab,
    relations: &RelationSet,
    path: &Path,
) -> std::io::Result<()> {
    let mut out = String::new();
    for r in relations.relations() {
        out.push_str(&format!(
            "{}\t{}\t{}\n",
            vocab.get(r.from).expect("relation ids resolve").name,
            vocab.get(r.to).expect("relation ids resolve").name,
            r.label
        ));
    }
    write_file(path, &out)
}

/// Write embeddings as `name<TAB>v1<TAB>...<TAB>vd` lines. Floats use the
/// shortest round-trip representation, so loading reproduces exact values.
pub fn write_embeddings_tsv(
    vocab: &ConceptVocab,
    embeddings: &EmbeddingTable,
    path: &Path,
) -> std::io::Result<()> {
    let mut out = String::new();
    for c in vocab.concepts() {
        out.push_str(&c.name);
        for v in embeddings.vector(c.id) {
            out.push_str(&format!("\t{v}"));
        }
        out.push('\n');
    }
    write_file(path, &out)
}

/// Write a whole dataset into `dir` as `vocab.tsv`, `source_relations.tsv`,
/// `target_relations.tsv` and `embeddings.tsv`.
pub fn write_dataset(dataset: &SynthDataset, dir: &Path) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    write_vocab_tsv(&dataset.vocab, &dir.join("vocab.tsv"))?;
    write_relations_tsv(&dataset.vocab, &dataset.source_relations, &dir.join("source_relations.tsv"))?;
    write_relations_tsv(&dataset.vocab, &dataset.target_relations, &dir.join("target_relations.tsv"))?;
    write_embeddings_tsv(&dataset.vocab, &dataset.embeddings, &dir.join("embeddings.tsv"))
}
