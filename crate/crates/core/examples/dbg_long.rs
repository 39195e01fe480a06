use davgae_core::model::EncoderKind;
use davgae_core::synth::{transfer_dataset, TransferSpec};
use davgae_core::trainer::{run_seed, DomainData, GraphMode, TrainConfig};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let epochs: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(2000);
    let lr: f64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(0.01);
    let spec = TransferSpec::default();
    let data_set = transfer_dataset(&spec);
    let data = DomainData {
        vocab: &data_set.vocab,
        embeddings: &data_set.embeddings,
        source_relations: &data_set.source_relations,
        target_relations: Some(&data_set.target_relations),
        counts: None,
    };
    let start = std::time::Instant::now();
    for lambda in [0.0] {
        let config = TrainConfig {
            grl_lambda: lambda,
            learning_rate: lr,
            epochs,
            mode: GraphMode::Cross,
            encoder: EncoderKind::Gcn,
            ..TrainConfig::default()
        };
        let run = run_seed(&data, &config, 0).unwrap();
        for row in run.log.iter().step_by(epochs / 10) {
            println!("epoch {:5}: recon={:.4} kl={:.4} dis={:.4}", row.epoch, row.loss.recon, row.loss.kl, row.loss.dis);
        }
        println!("lambda={lambda}: F1={:.3} best_epoch={:?} elapsed={:.1?}", run.report.f1, run.best_epoch, start.elapsed());
    }
}
