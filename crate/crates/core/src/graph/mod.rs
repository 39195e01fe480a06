//! Concept graph construction.
//!
//! A concept graph couples node features `X` (embedding rows) with a
//! symmetric binary adjacency `A` assembled from three edge sources:
//! annotated prerequisite relations (source domain only), cosine-similarity
//! pairs, and optionally positive-PMI source-target pairs. Message passing
//! uses the renormalized form `D^{-1/2} (A + I) D^{-1/2}`.
//!
//! Prerequisite direction is deliberately absent from `A`: edges are
//! symmetrized here and direction is recovered by the asymmetric decoder.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::dataset::{ConceptVocab, CooccurrenceCounts, DomainTag, EmbeddingTable, RelationSet};
use crate::numeric::{DenseMatrix, SparseMatrix};

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("cosine similarity undefined for a zero-norm vector")]
    ZeroNormVector,
    #[error("cosine similarity needs equal dimensions, got {0} and {1}")]
    DimensionMismatch(usize, usize),
    #[error("edge policy: {0}")]
    BadPolicy(String),
    #[error("relation ({from}, {to}) references the target-domain concept '{name}'; target labels are unknown")]
    RelationOutsideSource { from: usize, to: usize, name: String },
    #[error("PMI edges requested but no co-occurrence counts were supplied")]
    MissingCounts,
    #[error(transparent)]
    Numeric(#[from] crate::numeric::NumericError),
}

pub type Result<T> = std::result::Result<T, GraphError>;

/// Where an edge came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeOrigin {
    Annotation,
    Cosine,
    Pmi,
}

impl EdgeOrigin {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeOrigin::Annotation => "annot",
            EdgeOrigin::Cosine => "cos",
            EdgeOrigin::Pmi => "pmi",
        }
    }
}

/// One undirected edge with provenance, canonicalized as `p < q` over graph
/// node indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeRecord {
    pub p: usize,
    pub q: usize,
    pub weight: f64,
    pub origin: EdgeOrigin,
}

/// Similarity-edge selection rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CosineRule {
    /// Keep pairs with cosine `>= tau`. Values `>= 1` effectively disable
    /// cosine edges (useful for annotation-only graphs).
    Threshold(f64),
    /// Keep each node's `k` highest-cosine partners (ties broken by node
    /// index), symmetrized.
    TopK(usize),
}

/// Knobs controlling which non-annotation edges enter the adjacency.
#[derive(Debug, Clone, Copy)]
pub struct EdgePolicy {
    pub cosine: CosineRule,
    /// Minimum PMI for a source-target pair to become an edge (positive-PMI
    /// convention by default).
    pub pmi_threshold: f64,
    pub use_pmi: bool,
    /// When true, cosine edges carry their similarity as the adjacency value
    /// instead of being binarized. Annotation and PMI edges stay at 1.
    pub weighted: bool,
}

impl EdgePolicy {
    pub fn new(cosine: CosineRule, pmi_threshold: f64, use_pmi: bool, weighted: bool) -> Result<Self> {
        match cosine {
            CosineRule::Threshold(tau) if !(tau > 0.0) || !tau.is_finite() => {
                return Err(GraphError::BadPolicy(format!(
                    "cosine threshold must be a positive finite value, got {tau}"
                )));
            }
            CosineRule::TopK(0) => {
                return Err(GraphError::BadPolicy("top-k must be at least 1".into()));
            }
            _ => {}
        }
        if !pmi_threshold.is_finite() {
            return Err(GraphError::BadPolicy("PMI threshold must be finite".into()));
        }
        Ok(Self {
            cosine,
            pmi_threshold,
            use_pmi,
            weighted,
        })
    }

    /// Cosine threshold 0.9, positive PMI only, PMI off, binarized edges.
    pub fn default_policy() -> Self {
        Self {
            cosine: CosineRule::Threshold(0.9),
            pmi_threshold: 0.0,
            use_pmi: false,
            weighted: false,
        }
    }
}

/// A concept graph: features, adjacency, its normalized form, and per-node
/// domain labels (source = 1, target = 0). Immutable after construction.
#[derive(Debug, Clone)]
pub struct ConceptGraph {
    /// Vocabulary concept id of each graph node, in node order.
    node_ids: Vec<usize>,
    x: DenseMatrix,
    a: SparseMatrix,
    a_norm: SparseMatrix,
    domain_labels: Vec<f64>,
    edges: Vec<EdgeRecord>,
    index_of: HashMap<usize, usize>,
}

impl ConceptGraph {
    pub fn node_count(&self) -> usize {
        self.node_ids.len()
    }

    pub fn node_ids(&self) -> &[usize] {
        &self.node_ids
    }

    pub fn features(&self) -> &DenseMatrix {
        &self.x
    }

    pub fn adjacency(&self) -> &SparseMatrix {
        &self.a
    }

    pub fn normalized_adjacency(&self) -> &SparseMatrix {
        &self.a_norm
    }

    pub fn domain_labels(&self) -> &[f64] {
        &self.domain_labels
    }

    pub fn edges(&self) -> &[EdgeRecord] {
        &self.edges
    }

    /// Graph node index of a vocabulary concept id.
    pub fn node_index(&self, concept_id: usize) -> Option<usize> {
        self.index_of.get(&concept_id).copied()
    }

    /// Count of edges per origin: `(annotation, cosine, pmi)`.
    pub fn edge_counts_by_origin(&self) -> (usize, usize, usize) {
        let mut counts = (0, 0, 0);
        for e in &self.edges {
            match e.origin {
                EdgeOrigin::Annotation => counts.0 += 1,
                EdgeOrigin::Cosine => counts.1 += 1,
                EdgeOrigin::Pmi => counts.2 += 1,
            }
        }
        counts
    }

    fn assemble(
        node_ids: Vec<usize>,
        x: DenseMatrix,
        domain_labels: Vec<f64>,
        edge_map: BTreeMap<(usize, usize), (f64, EdgeOrigin)>,
    ) -> Result<Self> {
        let n = node_ids.len();
        let edges: Vec<EdgeRecord> = edge_map
            .into_iter()
            .map(|((p, q), (weight, origin))| EdgeRecord { p, q, weight, origin })
            .collect();
        let triplets = edges.iter().flat_map(|e| {
            [(e.p, e.q, e.weight), (e.q, e.p, e.weight)]
        });
        let a = SparseMatrix::from_triplets(n, n, triplets)?;
        let a_norm = normalize_adjacency(&a)?;
        let index_of = node_ids.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        Ok(Self {
            node_ids,
            x,
            a,
            a_norm,
            domain_labels,
            edges,
            index_of,
        })
    }
}

/// Cosine similarity of two equal-dimension non-zero vectors.
pub fn cosine_similarity(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(GraphError::DimensionMismatch(u.len(), v.len()));
    }
    let mut dot = 0.0;
    let mut nu = 0.0;
    let mut nv = 0.0;
    for (&a, &b) in u.iter().zip(v) {
        dot += a * b;
        nu += a * a;
        nv += b * b;
    }
    if nu == 0.0 || nv == 0.0 {
        return Err(GraphError::ZeroNormVector);
    }
    Ok(dot / (nu.sqrt() * nv.sqrt()))
}

/// Pointwise mutual information `log((c_pq / N) / ((c_p / N) * (c_q / N)))`.
///
/// A zero pair count yields negative infinity, which never clears any finite
/// edge threshold.
pub fn pmi(pair_count: u64, marginal_p: u64, marginal_q: u64, total_docs: u64) -> f64 {
    if pair_count == 0 {
        return f64::NEG_INFINITY;
    }
    let n = total_docs as f64;
    let joint = pair_count as f64 / n;
    let independent = (marginal_p as f64 / n) * (marginal_q as f64 / n);
    (joint / independent).ln()
}

/// Renormalized adjacency `D^{-1/2} (A + I) D^{-1/2}` with `D` the degree of
/// `A + I`. Isolated nodes keep a self-loop weight of exactly 1.
pub fn normalize_adjacency(a: &SparseMatrix) -> Result<SparseMatrix> {
    debug_assert!(a.is_symmetric(), "adjacency must be symmetric");
    let n = a.rows();
    let mut degree = vec![1.0f64; n]; // self-loop from A + I
    for r in 0..n {
        for (_, v) in a.row(r) {
            degree[r] += v;
        }
    }
    let inv_sqrt: Vec<f64> = degree.iter().map(|&d| 1.0 / d.sqrt()).collect();
    let mut triplets = Vec::with_capacity(a.nnz() + n);
    for r in 0..n {
        triplets.push((r, r, inv_sqrt[r] * inv_sqrt[r]));
        for (c, v) in a.row(r) {
            triplets.push((r, c, v * inv_sqrt[r] * inv_sqrt[c]));
        }
    }
    Ok(SparseMatrix::from_triplets(n, n, triplets)?)
}

/// Cosine edges among `nodes` (graph indices), deduplicated as `p < q`.
fn cosine_edges(
    features: &DenseMatrix,
    nodes: &[usize],
    rule: CosineRule,
) -> Result<Vec<(usize, usize, f64)>> {
    match rule {
        CosineRule::Threshold(tau) => {
            let mut out = Vec::new();
            for (i, &p) in nodes.iter().enumerate() {
                for &q in &nodes[i + 1..] {
                    let sim = cosine_similarity(features.row(p), features.row(q))?;
                    if sim >= tau {
                        out.push((p, q, sim));
                    }
                }
            }
            Ok(out)
        }
        CosineRule::TopK(k) => {
            let mut out = Vec::new();
            for &p in nodes {
                let mut sims: Vec<(usize, f64)> = Vec::with_capacity(nodes.len() - 1);
                for &q in nodes {
                    if q == p {
                        continue;
                    }
                    sims.push((q, cosine_similarity(features.row(p), features.row(q))?));
                }
                // Highest similarity first; ties broken by smaller node index.
                sims.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
                for &(q, sim) in sims.iter().take(k) {
                    let (lo, hi) = if p < q { (p, q) } else { (q, p) };
                    out.push((lo, hi, sim));
                }
            }
            out.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
            out.dedup_by_key(|e| (e.0, e.1));
            Ok(out)
        }
    }
}

fn insert_edge(
    map: &mut BTreeMap<(usize, usize), (f64, EdgeOrigin)>,
    p: usize,
    q: usize,
    weight: f64,
    origin: EdgeOrigin,
) {
    if p == q {
        return;
    }
    let key = if p < q { (p, q) } else { (q, p) };
    // Annotation provenance wins over similarity edges for the same pair.
    map.entry(key).or_insert((weight, origin));
}

fn check_relations_in_source(vocab: &ConceptVocab, relations: &RelationSet) -> Result<()> {
    for r in relations.relations() {
        for id in [r.from, r.to] {
            let concept = vocab.get(id).ok_or_else(|| GraphError::RelationOutsideSource {
                from: r.from,
                to: r.to,
                name: format!("id {id}"),
            })?;
            if concept.domain != DomainTag::Source {
                return Err(GraphError::RelationOutsideSource {
                    from: r.from,
                    to: r.to,
                    name: concept.name.clone(),
                });
            }
        }
    }
    Ok(())
}

fn stack_features(embeddings: &EmbeddingTable, node_ids: &[usize]) -> Result<DenseMatrix> {
    let d = embeddings.dim();
    let mut values = Vec::with_capacity(node_ids.len() * d);
    for &id in node_ids {
        values.extend_from_slice(embeddings.vector(id));
    }
    Ok(DenseMatrix::from_vec(node_ids.len(), d, values)?)
}

/// Build the single joint graph over both domains.
///
/// `A` unions symmetrized positive source annotations, cosine pairs over all
/// nodes, and (when enabled) source-target pairs whose PMI clears the
/// threshold; PMI requires `counts`.
pub fn build_cross_domain_graph(
    vocab: &ConceptVocab,
    embeddings: &EmbeddingTable,
    source_relations: &RelationSet,
    policy: &EdgePolicy,
    counts: Option<&CooccurrenceCounts>,
) -> Result<ConceptGraph> {
    check_relations_in_source(vocab, source_relations)?;
    let node_ids: Vec<usize> = (0..vocab.len()).collect();
    let x = stack_features(embeddings, &node_ids)?;
    let domain_labels: Vec<f64> = vocab
        .concepts()
        .iter()
        .map(|c| if c.domain == DomainTag::Source { 1.0 } else { 0.0 })
        .collect();

    let mut edge_map = BTreeMap::new();
    for r in source_relations.positives() {
        insert_edge(&mut edge_map, r.from, r.to, 1.0, EdgeOrigin::Annotation);
    }
    for (p, q, sim) in cosine_edges(&x, &node_ids, policy.cosine)? {
        let weight = if policy.weighted { sim } else { 1.0 };
        insert_edge(&mut edge_map, p, q, weight, EdgeOrigin::Cosine);
    }
    if policy.use_pmi {
        let counts = counts.ok_or(GraphError::MissingCounts)?;
        let source_ids = vocab.domain_ids(DomainTag::Source);
        let target_ids = vocab.domain_ids(DomainTag::Target);
        for &p in &source_ids {
            for &q in &target_ids {
                let (name_p, name_q) = (&vocab.get(p).unwrap().name, &vocab.get(q).unwrap().name);
                let pair = counts.pair(name_p, name_q);
                let (Some(mp), Some(mq)) = (counts.marginal(name_p), counts.marginal(name_q))
                else {
                    continue;
                };
                let value = pmi(pair, mp, mq, counts.total_docs());
                if value >= policy.pmi_threshold {
                    insert_edge(&mut edge_map, p, q, 1.0, EdgeOrigin::Pmi);
                }
            }
        }
    }
    ConceptGraph::assemble(node_ids, x, domain_labels, edge_map)
}

/// Build the per-domain graph pair `(G_src, G_tgt)`.
///
/// The source graph unions annotations with cosine edges over source
/// concepts; the target adjacency comes from cosine similarity alone.
pub fn build_single_domain_graphs(
    vocab: &ConceptVocab,
    embeddings: &EmbeddingTable,
    source_relations: &RelationSet,
    policy: &EdgePolicy,
) -> Result<(ConceptGraph, ConceptGraph)> {
    check_relations_in_source(vocab, source_relations)?;

    let src = build_domain_graph(vocab, embeddings, DomainTag::Source, Some(source_relations), policy)?;
    let tgt = build_domain_graph(vocab, embeddings, DomainTag::Target, None, policy)?;
    Ok((src, tgt))
}

fn build_domain_graph(
    vocab: &ConceptVocab,
    embeddings: &EmbeddingTable,
    domain: DomainTag,
    relations: Option<&RelationSet>,
    policy: &EdgePolicy,
) -> Result<ConceptGraph> {
    let node_ids = vocab.domain_ids(domain);
    let x = stack_features(embeddings, &node_ids)?;
    let label = if domain == DomainTag::Source { 1.0 } else { 0.0 };
    let domain_labels = vec![label; node_ids.len()];
    let to_local: HashMap<usize, usize> =
        node_ids.iter().enumerate().map(|(i, &c)| (c, i)).collect();

    let mut edge_map = BTreeMap::new();
    if let Some(relations) = relations {
        for r in relations.positives() {
            insert_edge(
                &mut edge_map,
                to_local[&r.from],
                to_local[&r.to],
                1.0,
                EdgeOrigin::Annotation,
            );
        }
    }
    let local_nodes: Vec<usize> = (0..node_ids.len()).collect();
    for (p, q, sim) in cosine_edges(&x, &local_nodes, policy.cosine)? {
        let weight = if policy.weighted { sim } else { 1.0 };
        insert_edge(&mut edge_map, p, q, weight, EdgeOrigin::Cosine);
    }
    ConceptGraph::assemble(node_ids, x, domain_labels, edge_map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Relation;

    fn two_domain_vocab() -> ConceptVocab {
        ConceptVocab::from_entries(vec![
            ("s0".into(), DomainTag::Source),
            ("s1".into(), DomainTag::Source),
            ("s2".into(), DomainTag::Source),
            ("t0".into(), DomainTag::Target),
            ("t1".into(), DomainTag::Target),
        ])
        .unwrap()
    }

    fn orthogonal_embeddings(n: usize) -> EmbeddingTable {
        let vectors = (0..n)
            .map(|i| {
                let mut v = vec![0.0; n];
                v[i] = 1.0;
                v
            })
            .collect();
        EmbeddingTable::from_vectors(vectors).unwrap()
    }

    #[test]
    fn cosine_similarity_known_values() {
        assert!((cosine_similarity(&[2.0, 1.0], &[2.0, 1.0]).unwrap() - 1.0).abs() < 1e-12);
        assert!(cosine_similarity(&[1.0, 0.0], &[0.0, 3.0]).unwrap().abs() < 1e-12);
        let c = cosine_similarity(&[1.0, 0.0], &[1.0, 1.0]).unwrap();
        assert!((c - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9, "got {c}");
        assert!(cosine_similarity(&[0.0, 0.0], &[1.0, 0.0]).is_err());
    }

    #[test]
    fn pmi_known_values() {
        // Saturation: everything co-occurs everywhere.
        assert!(pmi(100, 100, 100, 100).abs() < 1e-12);
        // Independence: c(p)=c(q)=N/2, c(p,q)=N/4.
        assert!(pmi(25, 50, 50, 100).abs() < 1e-12);
        assert_eq!(pmi(0, 50, 50, 100), f64::NEG_INFINITY);
        // Positive association.
        assert!(pmi(50, 50, 50, 100) > 0.0);
    }

    #[test]
    fn normalize_single_node_no_edges() {
        let a = SparseMatrix::empty(1, 1);
        let norm = normalize_adjacency(&a).unwrap();
        assert_eq!(norm.get(0, 0), 1.0);
    }

    #[test]
    fn normalize_two_nodes_one_edge() {
        let a = SparseMatrix::from_triplets(2, 2, [(0, 1, 1.0), (1, 0, 1.0)]).unwrap();
        let norm = normalize_adjacency(&a).unwrap();
        for (r, c) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            assert!((norm.get(r, c) - 0.5).abs() < 1e-12, "({r},{c})");
        }
    }

    #[test]
    fn normalize_empty_graph_is_identity() {
        let a = SparseMatrix::empty(3, 3);
        let norm = normalize_adjacency(&a).unwrap();
        assert_eq!(norm.to_dense(), DenseMatrix::identity(3));
    }

    #[test]
    fn cross_domain_graph_with_no_edges_normalizes_to_identity() {
        let vocab = two_domain_vocab();
        let emb = orthogonal_embeddings(5);
        let rels = RelationSet::default();
        let policy = EdgePolicy::new(CosineRule::Threshold(1.5), 0.0, false, false).unwrap();
        let g = build_cross_domain_graph(&vocab, &emb, &rels, &policy, None).unwrap();
        assert_eq!(g.node_count(), 5);
        assert_eq!(g.adjacency().nnz(), 0);
        assert_eq!(g.normalized_adjacency().to_dense(), DenseMatrix::identity(5));
        assert_eq!(g.domain_labels(), &[1.0, 1.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn annotation_edge_is_symmetrized() {
        let vocab = two_domain_vocab();
        let emb = orthogonal_embeddings(5);
        let rels =
            RelationSet::from_relations(vec![Relation { from: 0, to: 2, label: 1 }]).unwrap();
        let policy = EdgePolicy::new(CosineRule::Threshold(1.5), 0.0, false, false).unwrap();
        let g = build_cross_domain_graph(&vocab, &emb, &rels, &policy, None).unwrap();
        assert_eq!(g.adjacency().get(0, 2), 1.0);
        assert_eq!(g.adjacency().get(2, 0), 1.0);
        assert_eq!(g.adjacency().get(0, 1), 0.0);
    }

    #[test]
    fn negative_annotations_do_not_become_edges() {
        let vocab = two_domain_vocab();
        let emb = orthogonal_embeddings(5);
        let rels =
            RelationSet::from_relations(vec![Relation { from: 0, to: 2, label: 0 }]).unwrap();
        let policy = EdgePolicy::new(CosineRule::Threshold(1.5), 0.0, false, false).unwrap();
        let g = build_cross_domain_graph(&vocab, &emb, &rels, &policy, None).unwrap();
        assert_eq!(g.adjacency().nnz(), 0);
    }

    #[test]
    fn relation_touching_target_concept_is_rejected() {
        let vocab = two_domain_vocab();
        let emb = orthogonal_embeddings(5);
        let rels =
            RelationSet::from_relations(vec![Relation { from: 0, to: 3, label: 1 }]).unwrap();
        let policy = EdgePolicy::default_policy();
        let err = build_cross_domain_graph(&vocab, &emb, &rels, &policy, None).unwrap_err();
        assert!(matches!(err, GraphError::RelationOutsideSource { .. }));
    }

    #[test]
    fn single_domain_graphs_have_per_domain_node_counts() {
        let vocab = two_domain_vocab();
        let emb = orthogonal_embeddings(5);
        let rels =
            RelationSet::from_relations(vec![Relation { from: 0, to: 1, label: 1 }]).unwrap();
        let policy = EdgePolicy::default_policy();
        let (src, tgt) = build_single_domain_graphs(&vocab, &emb, &rels, &policy).unwrap();
        assert_eq!(src.node_count(), 3);
        assert_eq!(tgt.node_count(), 2);
        // Annotated edge symmetrized inside the source graph.
        assert_eq!(src.adjacency().get(0, 1), 1.0);
        assert_eq!(src.adjacency().get(1, 0), 1.0);
        // Orthogonal embeddings leave the target graph empty.
        assert_eq!(tgt.adjacency().nnz(), 0);
        // Node id mapping round-trips through vocabulary ids.
        assert_eq!(tgt.node_ids(), &[3, 4]);
        assert_eq!(tgt.node_index(4), Some(1));
    }

    #[test]
    fn cosine_edges_appear_at_low_threshold() {
        let vocab = two_domain_vocab();
        let vectors = vec![
            vec![1.0, 0.0],
            vec![0.9, 0.1],
            vec![0.0, 1.0],
            vec![1.0, 0.05],
            vec![-1.0, 0.0],
        ];
        let emb = EmbeddingTable::from_vectors(vectors).unwrap();
        let rels = RelationSet::default();
        let policy = EdgePolicy::new(CosineRule::Threshold(0.95), 0.0, false, false).unwrap();
        let g = build_cross_domain_graph(&vocab, &emb, &rels, &policy, None).unwrap();
        // Node 0 and node 3 are nearly parallel (cross-domain cosine edge).
        assert_eq!(g.adjacency().get(0, 3), 1.0);
        let (annot, cos, pmi_edges) = g.edge_counts_by_origin();
        assert_eq!(annot, 0);
        assert!(cos >= 1);
        assert_eq!(pmi_edges, 0);
    }

    #[test]
    fn pmi_requires_counts() {
        let vocab = two_domain_vocab();
        let emb = orthogonal_embeddings(5);
        let rels = RelationSet::default();
        let policy = EdgePolicy::new(CosineRule::Threshold(1.5), 0.0, true, false).unwrap();
        let err = build_cross_domain_graph(&vocab, &emb, &rels, &policy, None).unwrap_err();
        assert!(matches!(err, GraphError::MissingCounts));
    }

    #[test]
    fn pmi_edges_connect_source_to_target_only() {
        let vocab = two_domain_vocab();
        let emb = orthogonal_embeddings(5);
        let rels = RelationSet::default();
        let mut marginals = std::collections::HashMap::new();
        for name in ["s0", "s1", "s2", "t0", "t1"] {
            marginals.insert(name.to_string(), 50u64);
        }
        let mut pairs = std::collections::HashMap::new();
        pairs.insert(("s0".to_string(), "t0".to_string()), 50u64); // strongly associated
        pairs.insert(("s1".to_string(), "t1".to_string()), 25u64); // independent at N=100
        let counts = CooccurrenceCounts::from_counts(100, marginals, pairs).unwrap();
        let policy = EdgePolicy::new(CosineRule::Threshold(1.5), 0.5, true, false).unwrap();
        let g = build_cross_domain_graph(&vocab, &emb, &rels, &policy, Some(&counts)).unwrap();
        assert_eq!(g.adjacency().get(0, 3), 1.0, "positive-PMI pair becomes an edge");
        assert_eq!(g.adjacency().get(1, 4), 0.0, "independent pair stays out");
        let (_, _, pmi_edges) = g.edge_counts_by_origin();
        assert_eq!(pmi_edges, 1);
    }

    #[test]
    fn top_k_rule_keeps_nearest_neighbor() {
        let vocab = two_domain_vocab();
        let vectors = vec![
            vec![1.0, 0.0],
            vec![0.8, 0.6],
            vec![0.0, 1.0],
            vec![0.9, 0.43],
            vec![-1.0, 0.2],
        ];
        let emb = EmbeddingTable::from_vectors(vectors).unwrap();
        let rels = RelationSet::default();
        let policy = EdgePolicy::new(CosineRule::TopK(1), 0.0, false, false).unwrap();
        let g = build_cross_domain_graph(&vocab, &emb, &rels, &policy, None).unwrap();
        // Every node contributes its single nearest neighbor, so each node has
        // degree >= 1 after symmetrization.
        for r in 0..5 {
            assert!(g.adjacency().row(r).count() >= 1, "node {r} isolated");
        }
    }
}
