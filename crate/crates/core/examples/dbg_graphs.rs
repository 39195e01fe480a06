use davgae_core::synth::{transfer_dataset, TransferSpec};
use davgae_core::trainer::*;
use davgae_core::graph::{CosineRule, EdgePolicy};
use davgae_core::dataset::DomainTag;
use davgae_core::numeric::RngState;

fn main() {
    let spec = TransferSpec::default();
    let d = transfer_dataset(&spec);
    // How informative is cosine about true target edges?
    let tgt_ids = d.vocab.domain_ids(DomainTag::Target);
    let mut cosines = Vec::new();
    for (i, &p) in tgt_ids.iter().enumerate() {
        for &q in &tgt_ids[i+1..] {
            let u = d.embeddings.vector(p);
            let v = d.embeddings.vector(q);
            let c = davgae_core::graph::cosine_similarity(u, v).unwrap();
            cosines.push(((c * 1000.0) as i64, p, q));
        }
    }
    cosines.sort();
    let n = cosines.len();
    println!("target pairwise cosines: min={:.3} p25={:.3} median={:.3} p75={:.3} p95={:.3} max={:.3}",
        cosines[0].0 as f64/1000.0, cosines[n/4].0 as f64/1000.0, cosines[n/2].0 as f64/1000.0,
        cosines[3*n/4].0 as f64/1000.0, cosines[(95*n)/100].0 as f64/1000.0, cosines[n-1].0 as f64/1000.0);
    // overlap of top-283 cosine pairs with true target edges (undirected)
    let true_edges: std::collections::HashSet<(usize,usize)> = d.target_relations.relations().iter()
        .map(|r| (r.from.min(r.to), r.from.max(r.to))).collect();
    let top: Vec<(usize,usize)> = cosines.iter().rev().take(true_edges.len()).map(|&(_,p,q)| (p.min(q), p.max(q))).collect();
    let hits = top.iter().filter(|e| true_edges.contains(e)).count();
    println!("top-{} cosine pairs vs true undirected edges: {} hits ({:.1}%)", true_edges.len(), hits, 100.0*hits as f64/true_edges.len() as f64);

    for (tag, split_seed) in [("current tau=0.9", 0u64)] {
        let _ = split_seed;
        let config = TrainConfig { mode: GraphMode::Single, ..TrainConfig::default() };
        let split = split_relations(&d.source_relations, 0).unwrap();
        let mut neg = RngState::new(0).fork(2);
        let split = sample_negatives(&split, &d.vocab, &mut neg).unwrap();
        let data = DomainData { vocab: &d.vocab, embeddings: &d.embeddings, source_relations: &d.source_relations, target_relations: Some(&d.target_relations), counts: None };
        let graphs = build_training_graphs(&data, &config, &split).unwrap();
        if let TrainGraphs::Single { source, target } = &graphs {
            let (sa, sc, _) = source.edge_counts_by_origin();
            let (ta, tc, _) = target.edge_counts_by_origin();
            println!("{tag}: G_src edges annot={sa} cos={sc}; G_tgt edges annot={ta} cos={tc} (true tgt positives: {})", d.target_relations.len());
        }
    }
    // sweep tau and top-k for target cosine edge counts
    for tau in [0.5, 0.6, 0.7, 0.8] {
        let policy = EdgePolicy::new(CosineRule::Threshold(tau), 0.0, false, false).unwrap();
        let config = TrainConfig { mode: GraphMode::Single, policy, ..TrainConfig::default() };
        let split = split_relations(&d.source_relations, 0).unwrap();
        let mut neg = RngState::new(0).fork(2);
        let split = sample_negatives(&split, &d.vocab, &mut neg).unwrap();
        let data = DomainData { vocab: &d.vocab, embeddings: &d.embeddings, source_relations: &d.source_relations, target_relations: Some(&d.target_relations), counts: None };
        let graphs = build_training_graphs(&data, &config, &split).unwrap();
        if let TrainGraphs::Single { source, target } = &graphs {
            let (_, sc, _) = source.edge_counts_by_origin();
            let (_, tc, _) = target.edge_counts_by_origin();
            println!("tau={tau}: src cos={sc} tgt cos={tc}");
        }
    }
}
