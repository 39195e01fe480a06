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
    for lambda in [0.0, 1.0] {
        let config = TrainConfig {
            grl_lambda: lambda,
            mode: GraphMode::Cross,
            encoder: EncoderKind::Gcn,
            ..TrainConfig::default()
        };
        let run = run_seed(&data, &config, 0).unwrap();
        let pos: Vec<f64> = run.predictions.iter().filter(|p| p.label == 1).map(|p| p.probability).collect();
        let neg: Vec<f64> = run.predictions.iter().filter(|p| p.label == 0).map(|p| p.probability).collect();
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let above = |v: &[f64]| v.iter().filter(|&&x| x >= 0.5).count();
        println!("lambda={lambda}: best_epoch={:?} F1={:.3} P={:.3} R={:.3}", run.best_epoch, run.report.f1, run.report.precision, run.report.recall);
        println!("  target pos probs: mean={:.3} >=0.5: {}/{}", mean(&pos), above(&pos), pos.len());
        println!("  target neg probs: mean={:.3} >=0.5: {}/{}", mean(&neg), above(&neg), neg.len());
        // Also evaluate source test pairs for reference
        use davgae_core::evaluator::evaluate;
        use davgae_core::trainer::{build_training_graphs};
        let graphs = build_training_graphs(&data, &config, &run.source_split).unwrap();
        let (src_report, _) = evaluate(&run.params, graphs.source_view(), &run.source_split.test, 0.5, 0).unwrap();
        println!("  source test: F1={:.3} P={:.3} R={:.3}", src_report.f1, src_report.precision, src_report.recall);
    }
}
