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
    let (kind, seed) = (EncoderKind::Gcn, 11u64);
    let graph = small_graph(3, 3, 4, seed);
    let dims = Dims::new(4, 8, 4, 4);
    let mut rng = RngState::new(seed + 100);
    let params = ModelParams::init(dims, kind, false, 1.0, &mut rng);
    let eps_noise = RngState::new(seed + 200).standard_normal_matrix(6, 4);
    let enc = encode_with_noise(&graph, &params.encoder, &eps_noise).unwrap();
    let analytic = backward(&graph, &params, &enc).unwrap().flatten();
    let flat = params.flatten();
    let lambda = 1.0;
    let mut scratch = params.clone();
    let mut loss_enc = |fp: &[f64]| -> f64 {
        scratch.set_flat(fp);
        let b = loss_with_fixed_noise(&graph, &scratch, &eps_noise).unwrap();
        b.recon + b.kl - lambda * b.dis
    };
    // logits: how many entries are saturated / clamped?
    let logits = distmult_scores(&enc.z, &params.distmult).unwrap();
    let mut clamped = 0; let mut near = 0;
    for &l in logits.values() { let p = 1.0/(1.0+(-l as f64).exp()); if p <= 1e-12 || p >= 1.0-1e-12 { clamped += 1; } else if l.abs() > 20.0 { near += 1; } }
    println!("clamped logits: {clamped}, |l|>20 unclamped: {near}, total {}", logits.values().len());
    for &wi in &[66usize, 48, 59, 33] {
        let mut p2 = flat.clone();
        for h in [1e-4, 1e-5, 1e-6] {
            p2[wi] = flat[wi] + h; let up = loss_enc(&p2);
            p2[wi] = flat[wi] - h; let down = loss_enc(&p2);
            p2[wi] = flat[wi];
            let num = (up - down) / (2.0 * h);
            println!("  idx {wi} h={h:.0e}: analytic={:+.9e} numeric={:+.9e} f+={:.12} f-={:.12}", analytic[wi], num, up, down);
        }
    }
}
