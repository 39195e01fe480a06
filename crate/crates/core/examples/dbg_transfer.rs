use davgae_core::dataset::DomainTag;
use davgae_core::evaluator;
use davgae_core::model::{encode_deterministic, EncoderKind};
use davgae_core::numeric::{DenseMatrix, RngState};
use davgae_core::synth::{transfer_dataset, TransferSpec};
use davgae_core::trainer::{run_seeds, DomainData, GraphMode, TrainConfig, TrainGraphs, build_training_graphs, split_relations, sample_negatives};

/// Freshly trained 2-layer probe on (Z, domain labels); returns train accuracy.
fn probe_accuracy(z: &DenseMatrix, labels: &[f64], seed: u64) -> f64 {
    let k = z.cols();
    let m = 16usize;
    let n = z.rows();
    let mut rng = RngState::new(seed);
    let lim1 = (6.0 / (k + m) as f64).sqrt();
    let lim2 = (6.0 / (m + 1) as f64).sqrt();
    let mut w1: Vec<f64> = (0..k * m).map(|_| rng.next_uniform(-lim1, lim1)).collect();
    let mut b1 = vec![0.0f64; m];
    let mut w2: Vec<f64> = (0..m).map(|_| rng.next_uniform(-lim2, lim2)).collect();
    let mut b2 = 0.0f64;
    let (beta1, beta2, eps, lr) = (0.9, 0.999, 1e-8, 0.05);
    let plen = w1.len() + m + m + 1;
    let (mut mm, mut vv) = (vec![0.0; plen], vec![0.0; plen]);
    for step in 1..=400 {
        // forward + grads
        let mut gw1 = vec![0.0; w1.len()];
        let mut gb1 = vec![0.0; m];
        let mut gw2 = vec![0.0; m];
        let mut gb2 = 0.0;
        for p in 0..n {
            let zp = z.row(p);
            let mut h = vec![0.0; m];
            for j in 0..m {
                let mut s = b1[j];
                for c in 0..k { s += zp[c] * w1[c * m + j]; }
                h[j] = s;
            }
            let mut s = b2;
            for j in 0..m { s += h[j].max(0.0) * w2[j]; }
            let prob = 1.0 / (1.0 + (-s).exp());
            let ds = (prob - labels[p]) / n as f64;
            gb2 += ds;
            for j in 0..m {
                gw2[j] += h[j].max(0.0) * ds;
                if h[j] > 0.0 {
                    let dg = ds * w2[j];
                    gb1[j] += dg;
                    for c in 0..k { gw1[c * m + j] += zp[c] * dg; }
                }
            }
        }
        let grads: Vec<f64> = gw1.iter().chain(&gb1).chain(&gw2).chain(std::iter::once(&gb2)).copied().collect();
        let mut params: Vec<f64> = w1.iter().chain(&b1).chain(&w2).chain(std::iter::once(&b2)).copied().collect();
        let t = step as i32;
        let lr_t = lr * (1.0 - beta2f(beta2, t)).sqrt() / (1.0 - beta1f(beta1, t));
        for i in 0..plen {
            mm[i] = beta1 * mm[i] + (1.0 - beta1) * grads[i];
            vv[i] = beta2 * vv[i] + (1.0 - beta2) * grads[i] * grads[i];
            params[i] -= lr_t * mm[i] / (vv[i].sqrt() + eps);
        }
        w1.copy_from_slice(&params[..k * m]);
        b1.copy_from_slice(&params[k * m..k * m + m]);
        w2.copy_from_slice(&params[k * m + m..k * m + 2 * m]);
        b2 = params[plen - 1];
    }
    // accuracy
    let mut correct = 0usize;
    for p in 0..n {
        let zp = z.row(p);
        let mut s = b2;
        for j in 0..m {
            let mut g = b1[j];
            for c in 0..k { g += zp[c] * w1[c * m + j]; }
            s += g.max(0.0) * w2[j];
        }
        let prob = 1.0 / (1.0 + (-s).exp());
        if (prob >= 0.5) == (labels[p] == 1.0) { correct += 1; }
    }
    correct as f64 / n as f64
}

fn beta1f(b: f64, t: i32) -> f64 { b.powi(t) }
fn beta2f(b: f64, t: i32) -> f64 { b.powi(t) }

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let shift: f64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(3.0);
    let mode = if args.get(2).map(|s| s == "cross").unwrap_or(false) { GraphMode::Cross } else { GraphMode::Single };
    let spec = TransferSpec { domain_shift: shift, ..TransferSpec::default() };
    let data_set = transfer_dataset(&spec);
    println!("positives: src={} tgt={}", data_set.source_relations.len(), data_set.target_relations.len());
    let data = DomainData {
        vocab: &data_set.vocab,
        embeddings: &data_set.embeddings,
        source_relations: &data_set.source_relations,
        target_relations: Some(&data_set.target_relations),
        counts: None,
    };
    let start = std::time::Instant::now();
    for lambda in [1.0, 0.0] {
        let config = TrainConfig {
            grl_lambda: lambda,
            mode,
            encoder: EncoderKind::Gcn,
            ..TrainConfig::default()
        };
        let summary = run_seeds(&data, &config).unwrap();
        // probe on final Z per seed
        let mut accs = Vec::new();
        for run in &summary.runs {
            let split = split_relations(&data_set.source_relations, run.seed).unwrap();
            let mut neg_rng = RngState::new(run.seed).fork(2);
            let split = sample_negatives(&split, &data_set.vocab, &mut neg_rng).unwrap();
            let graphs = build_training_graphs(&data, &config, &split).unwrap();
            let (z_all, labels_all): (DenseMatrix, Vec<f64>) = match &graphs {
                TrainGraphs::Cross(g) => {
                    let enc = encode_deterministic(g, &run.params.encoder).unwrap();
                    (enc.z, g.domain_labels().to_vec())
                }
                TrainGraphs::Single { source, target } => {
                    let enc_s = encode_deterministic(source, &run.params.encoder).unwrap();
                    let enc_t = encode_deterministic(target, &run.params.encoder).unwrap();
                    let k = enc_s.z.cols();
                    let mut vals = enc_s.z.values().to_vec();
                    vals.extend_from_slice(enc_t.z.values());
                    let z = DenseMatrix::from_vec(enc_s.z.rows() + enc_t.z.rows(), k, vals).unwrap();
                    let mut labels = source.domain_labels().to_vec();
                    labels.extend_from_slice(target.domain_labels());
                    (z, labels)
                }
            };
            accs.push(probe_accuracy(&z_all, &labels_all, 1000 + run.seed));
        }
        let mean_acc = accs.iter().sum::<f64>() / accs.len() as f64;
        let max_acc = accs.iter().fold(0.0f64, |a, &b| a.max(b));
        let min_acc = accs.iter().fold(1.0f64, |a, &b| a.min(b));
        println!("lambda={lambda} mode={mode:?}: F1 mean={:.4} (per-seed {:?}) probe acc mean={:.3} min={:.3} max={:.3}",
            summary.aggregate.mean_f1,
            summary.runs.iter().map(|r| (r.report.f1 * 1000.0).round() / 1000.0).collect::<Vec<_>>(),
            mean_acc, min_acc, max_acc);
    }
    println!("elapsed: {:.1?}", start.elapsed());
    let _ = DomainTag::Source;
    let _ = evaluator::aggregate;
}
