use davgae_core::model::EncoderKind;
use davgae_core::synth::{transfer_dataset, TransferSpec};
use davgae_core::trainer::{run_seeds, DomainData, GraphMode, TrainConfig};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let shared = args.get(1).map(|s| s == "shared").unwrap_or(true);
    let epochs: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(200);
    let spec = TransferSpec { shared_latents: shared, ..TransferSpec::default() };
    let data_set = transfer_dataset(&spec);
    let data = DomainData {
        vocab: &data_set.vocab,
        embeddings: &data_set.embeddings,
        source_relations: &data_set.source_relations,
        target_relations: Some(&data_set.target_relations),
        counts: None,
    };
    println!("shared={shared} epochs={epochs} positives src={} tgt={}", data_set.source_relations.len(), data_set.target_relations.len());
    let t0 = std::time::Instant::now();
    for mode in [GraphMode::Cross, GraphMode::Single] {
        for lambda in [0.0, 1.0] {
            let config = TrainConfig {
                grl_lambda: lambda,
                epochs,
                mode,
                encoder: EncoderKind::Gcn,
                ..TrainConfig::default()
            };
            let s = run_seeds(&data, &config).unwrap();
            println!("mode={mode:?} lambda={lambda}: target F1 mean={:.3} per-seed {:?}",
                s.aggregate.mean_f1,
                s.runs.iter().map(|r| (r.report.f1 * 100.0).round() / 100.0).collect::<Vec<_>>());
        }
    }
    println!("elapsed {:.1?}", t0.elapsed());
}
