use davgae_core::evaluator::evaluate;
use davgae_core::model::EncoderKind;
use davgae_core::synth::{transfer_dataset, TransferSpec};
use davgae_core::trainer::*;
use davgae_core::numeric::RngState;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let seed: u64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(4);
    let lambda: f64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(1.0);
    let spec = TransferSpec::default();
    let data_set = transfer_dataset(&spec);
    let data = DomainData {
        vocab: &data_set.vocab,
        embeddings: &data_set.embeddings,
        source_relations: &data_set.source_relations,
        target_relations: Some(&data_set.target_relations),
        counts: None,
    };
    let config = TrainConfig {
        grl_lambda: lambda,
        epochs: 800,
        mode: GraphMode::Single,
        encoder: EncoderKind::Gcn,
        ..TrainConfig::default()
    };
    // Manual pipeline for per-epoch diagnostics: re-train in segments.
    let src_split = split_relations(&data_set.source_relations, seed).unwrap();
    let mut neg_rng = RngState::new(seed).fork(2);
    let src_split = sample_negatives(&src_split, &data_set.vocab, &mut neg_rng).unwrap();
    let tgt_split = split_relations(&data_set.target_relations, seed).unwrap();
    let tgt_split = sample_negatives(&tgt_split, &data_set.vocab, &mut neg_rng).unwrap();
    let graphs = build_training_graphs(&data, &config, &src_split).unwrap();
    for epochs in [50, 100, 200, 400, 800] {
        let cfg = TrainConfig { epochs, ..config.clone() };
        let out = train(&graphs, &cfg, &src_split, seed).unwrap();
        // final-epoch params vs val-selected params
        let (val_rep, _) = evaluate(&out.params, graphs.source_view(), &src_split.val, 0.5, seed).unwrap();
        let (tgt_rep, _) = evaluate(&out.params, graphs.target_view(), &tgt_split.test, 0.5, seed).unwrap();
        println!("seed={seed} lambda={lambda} epochs={epochs}: best={:?} valF1={:.3} tgt F1={:.3} P={:.3} R={:.3}",
            out.best_epoch, val_rep.f1, tgt_rep.f1, tgt_rep.precision, tgt_rep.recall);
    }
}
