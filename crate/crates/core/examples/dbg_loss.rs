use davgae_core::model::EncoderKind;
use davgae_core::synth::{transfer_dataset, TransferSpec};
use davgae_core::trainer::{run_seed, DomainData, GraphMode, TrainConfig};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let lambda: f64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(1.0);
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
        mode: GraphMode::Cross,
        encoder: EncoderKind::Gcn,
        ..TrainConfig::default()
    };
    let run = run_seed(&data, &config, 0).unwrap();
    for row in run.log.iter().step_by(20) {
        println!("epoch {:3}: recon={:.4} kl={:.4} dis={:.4} total={:.4}", row.epoch, row.loss.recon, row.loss.kl, row.loss.dis, row.loss.total);
    }
    let last = run.log.last().unwrap();
    println!("epoch {:3}: recon={:.4} kl={:.4} dis={:.4} total={:.4}", last.epoch, last.loss.recon, last.loss.kl, last.loss.dis, last.loss.total);
    println!("best epoch: {:?}, F1={:.4} P={:.4} R={:.4}", run.best_epoch, run.report.f1, run.report.precision, run.report.recall);
}
