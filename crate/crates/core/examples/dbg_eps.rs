use davgae_core::model::*;
use davgae_core::numeric::*;
use davgae_core::dataset::{ConceptVocab, DomainTag, EmbeddingTable, Relation, RelationSet};
use davgae_core::graph::{build_cross_domain_graph, CosineRule, EdgePolicy};

fn small_graph(n_source: usize, n_target: usize, dim: usize, seed: u64) -> davgae_core::graph::ConceptGraph {
    let mut entries = Vec::new();
    for i in 0..n_source { entries.push((format!("s{i}"), DomainTag::Source)); }
    for i in 0..n_target { entries.push((format!("t{i}"), DomainTag::Target)); }
    let vocab = ConceptVocab::from_entries(entries).unwrap();
    let mut rng = RngState::new(seed);
    let vectors = (0..n_source + n_target).map(|_| (0..dim).map(|_| rng.next_standard_normal()).collect()).collect();
    let embeddings = EmbeddingTable::from_vectors(vectors).unwrap();
    let mut relations = Vec::new();
    for i in 1..n_source { relations.push(Relation { from: i - 1, to: i, label: 1 }); }
    let relations = RelationSet::from_relations(relations).unwrap();
    let policy = EdgePolicy::new(CosineRule::Threshold(0.95), 0.0, false, false).unwrap();
    build_cross_domain_graph(&vocab, &embeddings, &relations, &policy, None).unwrap()
}

fn main() {
    for (kind, seed) in [(EncoderKind::Gcn, 11u64), (EncoderKind::Gat, 4), (EncoderKind::Gat, 10), (EncoderKind::Gcn, 5)] {
        let graph = small_graph(3, 3, 4, seed);
        let dims = Dims::new(4, 8, 4, 4);
        let mut rng = RngState::new(seed + 100);
        let params = ModelParams::init(dims, kind, false, 1.0, &mut rng);
        let eps_noise = RngState::new(seed + 200).standard_normal_matrix(6, 4);
        let enc = encode_with_noise(&graph, &params.encoder, &eps_noise).unwrap();
        let max_lv = enc.logvar.values().iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        let max_z = enc.z.values().iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        let logits = distmult_scores(&enc.z, &params.distmult).unwrap();
        let max_logit = logits.values().iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        print!("{kind:?} seed={seed}: max|lv|={max_lv:.2} max|z|={max_z:.2} max|logit|={max_logit:.2} errs:");
        for fd in [1e-4, 1e-5, 1e-6, 3e-7] {
            let r = gradient_check(&graph, &params, &eps_noise, fd).unwrap();
            print!(" {:.2e}@{}", r.max_rel_err, r.worst_index);
        }
        println!();
    }
}
