//! Single-head graph attention layers.
//!
//! Each of the three adjacency multiplications of the GCN encoder is
//! replaced by an attention aggregation: for node `p` and neighbor `q`
//! (self included), the raw score is
//! `LeakyReLU(a_l . t_p + a_r . t_q)` over transformed features `t = F W`,
//! normalized per node with a softmax, and the output is the
//! attention-weighted sum of the neighbors' `t` rows.

use crate::graph::ConceptGraph;
use crate::numeric::DenseMatrix;

use super::{EncoderParams, GatParams, ModelError, Result};

/// Per-edge attention state: `(neighbor, alpha, leaky_gate)` where
/// `leaky_gate` is the LeakyReLU derivative at the raw score.
type AttnRow = Vec<(usize, f64, f64)>;

/// Cached activations of one attention layer.
#[derive(Debug, Clone)]
pub(crate) struct GatLayerCache {
    /// Transformed features `F W`, one row per node.
    pub(crate) transformed: DenseMatrix,
    /// Attention entries per node, neighbors in ascending index order.
    pub(crate) attn: Vec<AttnRow>,
    /// Aggregated output (pre-activation for the hidden layer).
    pub(crate) out: DenseMatrix,
}

/// Caches of the three layers (hidden, mu head, logvar head).
#[derive(Debug, Clone)]
pub(crate) struct GatCache {
    pub(crate) hidden: GatLayerCache,
    pub(crate) mu: GatLayerCache,
    pub(crate) logvar: GatLayerCache,
}

/// Sorted neighborhood of each node under the binary adjacency, with the
/// node itself always included.
pub(crate) fn neighborhoods(graph: &ConceptGraph) -> Vec<Vec<usize>> {
    let n = graph.node_count();
    let mut out = Vec::with_capacity(n);
    for p in 0..n {
        let mut nbrs: Vec<usize> = graph.adjacency().row(p).map(|(q, _)| q).collect();
        match nbrs.binary_search(&p) {
            Ok(_) => {}
            Err(pos) => nbrs.insert(pos, p),
        }
        out.push(nbrs);
    }
    out
}

/// One attention layer forward pass.
pub(crate) fn gat_layer_forward(
    features: &DenseMatrix,
    weight: &DenseMatrix,
    attn: &[f64],
    slope: f64,
    neighbors: &[Vec<usize>],
) -> Result<GatLayerCache> {
    let transformed = features.matmul(weight)?;
    let fout = transformed.cols();
    if attn.len() != 2 * fout {
        return Err(ModelError::Shape {
            context: "gat attention vector",
            expected: format!("{}", 2 * fout),
            got: format!("{}", attn.len()),
        });
    }
    let (a_left, a_right) = attn.split_at(fout);
    let n = features.rows();
    let mut out = DenseMatrix::zeros(n, fout);
    let mut attn_rows = Vec::with_capacity(n);
    for p in 0..n {
        let left: f64 = a_left
            .iter()
            .zip(transformed.row(p))
            .map(|(&a, &t)| a * t)
            .sum();
        let mut scores = Vec::with_capacity(neighbors[p].len());
        for &q in &neighbors[p] {
            let right: f64 = a_right
                .iter()
                .zip(transformed.row(q))
                .map(|(&a, &t)| a * t)
                .sum();
            let raw = left + right;
            let (score, gate) = if raw > 0.0 {
                (raw, 1.0)
            } else {
                (slope * raw, slope)
            };
            scores.push((q, score, gate));
        }
        // Softmax over the neighborhood, max-shifted for stability.
        let max_score = scores
            .iter()
            .map(|&(_, s, _)| s)
            .fold(f64::NEG_INFINITY, f64::max);
        let mut denom = 0.0;
        let mut exps = Vec::with_capacity(scores.len());
        for &(_, s, _) in &scores {
            let e = (s - max_score).exp();
            denom += e;
            exps.push(e);
        }
        let mut row: AttnRow = Vec::with_capacity(scores.len());
        for ((q, _, gate), e) in scores.into_iter().zip(exps) {
            let alpha = e / denom;
            for c in 0..fout {
                let v = out.get(p, c) + alpha * transformed.get(q, c);
                out.set(p, c, v);
            }
            row.push((q, alpha, gate));
        }
        attn_rows.push(row);
    }
    Ok(GatLayerCache {
        transformed,
        attn: attn_rows,
        out,
    })
}

/// Backward pass of one attention layer.
///
/// Returns `(d_weight, d_attn, d_features)` for an upstream gradient on the
/// layer output.
pub(crate) fn gat_layer_backward(
    features: &DenseMatrix,
    weight: &DenseMatrix,
    attn: &[f64],
    cache: &GatLayerCache,
    d_out: &DenseMatrix,
) -> Result<(DenseMatrix, Vec<f64>, DenseMatrix)> {
    let fout = cache.transformed.cols();
    let (a_left, a_right) = attn.split_at(fout);
    let n = features.rows();
    let mut d_transformed = DenseMatrix::zeros(n, fout);
    let mut d_attn = vec![0.0; 2 * fout];
    for p in 0..n {
        let entries = &cache.attn[p];
        let d_out_p = d_out.row(p);
        // d alpha_pq = dOut_p . t_q
        let d_alphas: Vec<f64> = entries
            .iter()
            .map(|&(q, _, _)| {
                d_out_p
                    .iter()
                    .zip(cache.transformed.row(q))
                    .map(|(&g, &t)| g * t)
                    .sum()
            })
            .collect();
        // Softmax Jacobian: d e_pq = alpha_pq (d alpha_pq - sum_q' alpha d alpha).
        let weighted_sum: f64 = entries
            .iter()
            .zip(&d_alphas)
            .map(|(&(_, alpha, _), &da)| alpha * da)
            .sum();
        let mut sum_d_raw = 0.0;
        for (&(q, alpha, gate), &da) in entries.iter().zip(&d_alphas) {
            let d_score = alpha * (da - weighted_sum);
            let d_raw = d_score * gate;
            sum_d_raw += d_raw;
            for c in 0..fout {
                // Aggregation term plus the right-hand attention term.
                let v = d_transformed.get(q, c) + alpha * d_out_p[c] + d_raw * a_right[c];
                d_transformed.set(q, c, v);
                d_attn[fout + c] += d_raw * cache.transformed.get(q, c);
            }
        }
        for c in 0..fout {
            let v = d_transformed.get(p, c) + sum_d_raw * a_left[c];
            d_transformed.set(p, c, v);
            d_attn[c] += sum_d_raw * cache.transformed.get(p, c);
        }
    }
    let d_weight = features.transpose().matmul(&d_transformed)?;
    let d_features = d_transformed.matmul(&weight.transpose())?;
    Ok((d_weight, d_attn, d_features))
}

/// Full GAT encoder forward: three attention layers producing
/// `(mu, logvar, caches, hidden_pre, hidden)`.
pub(crate) fn gat_forward(
    graph: &ConceptGraph,
    params: &EncoderParams,
    gat: &GatParams,
) -> Result<(DenseMatrix, DenseMatrix, GatCache, DenseMatrix, DenseMatrix)> {
    let neighbors = neighborhoods(graph);
    let hidden_layer = gat_layer_forward(
        graph.features(),
        &params.w0,
        &gat.attn_hidden,
        gat.leaky_slope,
        &neighbors,
    )?;
    let hidden_pre = hidden_layer.out.clone();
    let hidden = hidden_pre.map(|v| v.max(0.0));
    let mu_layer = gat_layer_forward(&hidden, &params.w_mu, &gat.attn_mu, gat.leaky_slope, &neighbors)?;
    let logvar_layer = gat_layer_forward(
        &hidden,
        &params.w_logvar,
        &gat.attn_logvar,
        gat.leaky_slope,
        &neighbors,
    )?;
    let mu = mu_layer.out.clone();
    let logvar = logvar_layer.out.clone();
    Ok((
        mu,
        logvar,
        GatCache {
            hidden: hidden_layer,
            mu: mu_layer,
            logvar: logvar_layer,
        },
        hidden_pre,
        hidden,
    ))
}

#[cfg(test)]
mod tests {
    use super::super::test_support::small_graph;
    use super::*;
    use crate::numeric::RngState;

    #[test]
    fn isolated_node_attends_only_to_itself() {
        // Node with no edges: the neighborhood is just the self-loop, so the
        // single attention weight must be exactly 1.
        let graph = small_graph(2, 1, 3, 4); // target node t0 is isolated at high tau
        let nbrs = neighborhoods(&graph);
        let isolated = (0..graph.node_count())
            .find(|&p| nbrs[p].len() == 1)
            .expect("expected an isolated node");
        let mut rng = RngState::new(3);
        let w = rng.standard_normal_matrix(3, 2);
        let attn: Vec<f64> = (0..4).map(|_| rng.next_standard_normal()).collect();
        let cache = gat_layer_forward(graph.features(), &w, &attn, 0.2, &nbrs).unwrap();
        assert_eq!(cache.attn[isolated].len(), 1);
        assert_eq!(cache.attn[isolated][0].1, 1.0);
    }

    #[test]
    fn uniform_features_give_uniform_attention() {
        let graph = small_graph(4, 0, 3, 5);
        let nbrs = neighborhoods(&graph);
        // Constant features make every raw score identical per node.
        let features = DenseMatrix::from_vec(4, 3, vec![0.7; 12]).unwrap();
        let mut rng = RngState::new(4);
        let w = rng.standard_normal_matrix(3, 2);
        let attn: Vec<f64> = (0..4).map(|_| rng.next_standard_normal()).collect();
        let cache = gat_layer_forward(&features, &w, &attn, 0.2, &nbrs).unwrap();
        for p in 0..4 {
            let expected = 1.0 / nbrs[p].len() as f64;
            for &(_, alpha, _) in &cache.attn[p] {
                assert!((alpha - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn attention_coefficients_sum_to_one() {
        let graph = small_graph(3, 3, 4, 9);
        let nbrs = neighborhoods(&graph);
        let mut rng = RngState::new(10);
        let w = rng.standard_normal_matrix(4, 3);
        let attn: Vec<f64> = (0..6).map(|_| rng.next_standard_normal()).collect();
        let cache = gat_layer_forward(graph.features(), &w, &attn, 0.2, &nbrs).unwrap();
        for p in 0..graph.node_count() {
            let total: f64 = cache.attn[p].iter().map(|&(_, a, _)| a).sum();
            assert!((total - 1.0).abs() < 1e-12, "node {p}: {total}");
        }
    }
}
