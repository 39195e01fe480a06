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
    // Survey: how often do random configs sit near kinks, and do margins explain the spikes?
    for kind in [EncoderKind::Gcn, EncoderKind::Gat] {
        for seed in 1u64..=20 {
            let graph = small_graph(3, 3, 4, seed);
            let dims = Dims::new(4, 8, 4, 4);
            let mut rng = RngState::new(seed + 100);
            let params = ModelParams::init(dims, kind, false, 1.0, &mut rng);
            let eps_noise = RngState::new(seed + 200).standard_normal_matrix(6, 4);
            let m = kink_margin(&graph, &params, &eps_noise).unwrap();
            let r = gradient_check(&graph, &params, &eps_noise, 1e-5).unwrap();
            println!("{kind:?} seed={seed}: margin={m:.3e} maxerr={:.3e} {}", r.max_rel_err, if m < KINK_MARGIN {"SKIP"} else if r.passes(1e-4) {"pass"} else {"FAIL"});
        }
    }
}
