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
    for kind in [EncoderKind::Gcn, EncoderKind::Gat] {
        for lambda in [0.0, 1.0] {
            for seed in 1u64..=6 {
                let graph = small_graph(3, 3, 4, seed);
                let dims = Dims::new(4, 8, 4, 4);
                let mut rng = RngState::new(seed + 100);
                let params = ModelParams::init(dims, kind, false, lambda, &mut rng);
                let eps_noise = RngState::new(seed + 200).standard_normal_matrix(6, 4);
                let report = gradient_check(&graph, &params, &eps_noise, 1e-5).unwrap();
                let enc = encode_with_noise(&graph, &params.encoder, &eps_noise).unwrap();
                let analytic = backward(&graph, &params, &enc).unwrap().flatten();
                let flat = params.flatten();
                let encoder_len = params.encoder_flat_len();
                let mut scratch = params.clone();
                let mut loss_for = |fp: &[f64], enc_block: bool| -> f64 {
                    scratch.set_flat(fp);
                    let b = loss_with_fixed_noise(&graph, &scratch, &eps_noise).unwrap();
                    if enc_block { b.recon + b.kl - lambda * b.dis } else { b.total }
                };
                let wi = report.worst_index;
                let oracle_block = wi < encoder_len;
                let mut p2 = flat.clone();
                let h = 1e-5;
                p2[wi] += h; let up = loss_for(&p2, oracle_block);
                p2[wi] -= 2.0*h; let down = loss_for(&p2, oracle_block);
                let num = (up - down) / (2.0*h);
                println!("{kind:?} lambda={lambda} seed={seed}: maxerr={:.3e} at {} (enc_len={}) analytic={:.6e} numeric={:.6e}",
                    report.max_rel_err, wi, encoder_len, analytic[wi], num);
            }
        }
    }
}
