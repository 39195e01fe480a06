use davgae_core::model::EncoderKind;
use davgae_core::synth::{transfer_dataset, TransferSpec};
use davgae_core::trainer::{run_seed, DomainData, GraphMode, TrainConfig};

fn main() {
    let spec = TransferSpec::default();
    let data_set = transfer_dataset(&spec);
    let data = DomainData {
        vocab: &data_set.vocab,
        embeddings: &data_set.embeddings,
        source_relations: &data_set.source_relations,
        target_relations: Some(&data_set.target_relations),
        counts: None,
    };
    for lr in [0.01, 0.03, 0.1, 0.3] {
        for lambda in [0.0, 1.0] {
            let config = TrainConfig {
                grl_lambda: lambda,
                learning_rate: lr,
                mode: GraphMode::Cross,
                encoder: EncoderKind::Gcn,
                ..TrainConfig::default()
            };
            let run = run_seed(&data, &config, 0).unwrap();
            let first = run.log.first().unwrap().loss;
            let mid = run.log[99].loss;
            let last = run.log.last().unwrap().loss;
            println!("lr={lr} lambda={lambda}: e1 recon={:.3} kl={:.3} dis={:.3} | e100 recon={:.3} kl={:.3} dis={:.3} | e200 recon={:.3} kl={:.3} dis={:.3} | F1={:.3}",
                first.recon, first.kl, first.dis, mid.recon, mid.kl, mid.dis, last.recon, last.kl, last.dis, run.report.f1);
        }
    }
}
