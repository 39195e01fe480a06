//! Hand-derived gradients of the total loss for every trainable parameter.
//!
//! The discriminator's own weights receive the true gradient of the domain
//! loss; the gradient flowing from the discriminator back into the latents
//! is multiplied by `-grl_lambda` (gradient reversal) before entering the
//! encoder, so the encoder is pushed to *remove* domain information while
//! the discriminator keeps trying to find it.

use crate::graph::ConceptGraph;
use crate::numeric::DenseMatrix;

use super::gat::{gat_layer_backward, GatCache};
use super::{
    bce_grads, discriminate_detailed, distmult_scores, encode_with_cache, EncoderKind,
    EncoderOutput, ModelError, ModelParams, Result,
};

/// Gradients mirroring [`ModelParams`], same flatten layout.
#[derive(Debug, Clone)]
pub struct ModelGrads {
    pub w0: DenseMatrix,
    pub w_mu: DenseMatrix,
    pub w_logvar: DenseMatrix,
    pub attn_hidden: Vec<f64>,
    pub attn_mu: Vec<f64>,
    pub attn_logvar: Vec<f64>,
    pub r: DenseMatrix,
    pub w1: DenseMatrix,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: f64,
    diagonal_r: bool,
}

impl ModelGrads {
    fn zeros_like(params: &ModelParams) -> Self {
        let (ah, am, al) = match &params.encoder.gat {
            Some(g) => (g.attn_hidden.len(), g.attn_mu.len(), g.attn_logvar.len()),
            None => (0, 0, 0),
        };
        Self {
            w0: DenseMatrix::zeros(params.encoder.w0.rows(), params.encoder.w0.cols()),
            w_mu: DenseMatrix::zeros(params.encoder.w_mu.rows(), params.encoder.w_mu.cols()),
            w_logvar: DenseMatrix::zeros(
                params.encoder.w_logvar.rows(),
                params.encoder.w_logvar.cols(),
            ),
            attn_hidden: vec![0.0; ah],
            attn_mu: vec![0.0; am],
            attn_logvar: vec![0.0; al],
            r: DenseMatrix::zeros(params.distmult.r.rows(), params.distmult.r.cols()),
            w1: DenseMatrix::zeros(params.discriminator.w1.rows(), params.discriminator.w1.cols()),
            b1: vec![0.0; params.discriminator.b1.len()],
            w2: vec![0.0; params.discriminator.w2.len()],
            b2: 0.0,
            diagonal_r: params.distmult.diagonal,
        }
    }

    /// Same coordinate order as [`ModelParams::flatten`].
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::new();
        out.extend_from_slice(self.w0.values());
        out.extend_from_slice(self.w_mu.values());
        out.extend_from_slice(self.w_logvar.values());
        out.extend_from_slice(&self.attn_hidden);
        out.extend_from_slice(&self.attn_mu);
        out.extend_from_slice(&self.attn_logvar);
        if self.diagonal_r {
            for i in 0..self.r.rows() {
                out.push(self.r.get(i, i));
            }
        } else {
            out.extend_from_slice(self.r.values());
        }
        out.extend_from_slice(self.w1.values());
        out.extend_from_slice(&self.b1);
        out.extend_from_slice(&self.w2);
        out.push(self.b2);
        out
    }
}

/// Gradient of the reconstruction loss with respect to the logits:
/// `(1/n^2) * (w * a * (sigmoid - 1) + (1 - a) * sigmoid)` per entry, each
/// side zeroed wherever the forward loss was capped by the probability clamp
/// (the clamped loss is flat there). Reduces to `w * (sigmoid - a)` for
/// binary targets.
fn recon_logit_grad(graph: &ConceptGraph, logits: &DenseMatrix) -> DenseMatrix {
    let n = graph.node_count();
    let adjacency = graph.adjacency();
    let total_entries = (n * n) as f64;
    let nnz = adjacency.nnz();
    let w_pos = if nnz == 0 {
        1.0
    } else {
        (total_entries - nnz as f64) / nnz as f64
    };
    let mut grad = DenseMatrix::zeros(n, n);
    let mut target_row = vec![0.0f64; n];
    for p in 0..n {
        for (c, v) in adjacency.row(p) {
            target_row[c] = v;
        }
        for q in 0..n {
            let target = target_row[q];
            let (d_pos, d_neg) = bce_grads(logits.get(p, q));
            let weight = if target > 0.0 { w_pos } else { 1.0 };
            let g = weight * target * d_pos + (1.0 - target) * d_neg;
            grad.set(p, q, g / total_entries);
        }
        for (c, _) in adjacency.row(p) {
            target_row[c] = 0.0;
        }
    }
    grad
}

/// Gradient of the total loss for every parameter.
///
/// Activations are recomputed from `(graph, params)` and the stored noise in
/// `encoder_out`, so the result is an exact derivative of
/// [`super::loss_with_fixed_noise`] at these parameters (with the
/// discriminator-to-encoder path reversed as described above).
pub fn backward(
    graph: &ConceptGraph,
    params: &ModelParams,
    encoder_out: &EncoderOutput,
) -> Result<ModelGrads> {
    let eps = encoder_out.eps.as_ref().ok_or(ModelError::MissingEps)?;
    let (enc, cache) = encode_with_cache(graph, &params.encoder, eps)?;
    let n = graph.node_count();
    let latent = enc.z.cols();
    let mut grads = ModelGrads::zeros_like(params);

    // --- decoder path ---
    let logits = distmult_scores(&enc.z, &params.distmult)?;
    let m = recon_logit_grad(graph, &logits);
    // dR = Z^T M Z; in diagonal mode only the diagonal is exposed.
    let zt_m = enc.z.transpose().matmul(&m)?;
    grads.r = zt_m.matmul(&enc.z)?;
    // dZ from reconstruction: M Z R^T + M^T Z R.
    let mut d_z = m.matmul(&enc.z.matmul(&params.distmult.r.transpose())?)?;
    d_z.add_scaled_in_place(&m.transpose().matmul(&enc.z.matmul(&params.distmult.r)?)?, 1.0)?;

    // --- discriminator path ---
    let (hidden_pre, scores, _probs) = discriminate_detailed(&enc.z, &params.discriminator)?;
    let labels = graph.domain_labels();
    let m_disc = params.discriminator.b1.len();
    let mut d_scores = vec![0.0; n];
    for p in 0..n {
        let (d_pos, d_neg) = bce_grads(scores[p]);
        d_scores[p] = (labels[p] * d_pos + (1.0 - labels[p]) * d_neg) / n as f64;
    }
    let mut d_g1 = DenseMatrix::zeros(n, m_disc);
    for p in 0..n {
        grads.b2 += d_scores[p];
        for j in 0..m_disc {
            let act = hidden_pre.get(p, j).max(0.0);
            grads.w2[j] += act * d_scores[p];
            if hidden_pre.get(p, j) > 0.0 {
                d_g1.set(p, j, d_scores[p] * params.discriminator.w2[j]);
            }
        }
    }
    grads.w1 = enc.z.transpose().matmul(&d_g1)?;
    for j in 0..m_disc {
        for p in 0..n {
            grads.b1[j] += d_g1.get(p, j);
        }
    }
    let d_z_disc = d_g1.matmul(&params.discriminator.w1.transpose())?;
    // Gradient reversal into the encoder; discriminator weights above keep
    // the unreversed gradient.
    d_z.add_scaled_in_place(&d_z_disc, -params.discriminator.grl_lambda)?;

    // --- reparameterization and KL ---
    let inv_n = 1.0 / (n * n) as f64; // EXPERIMENT
    let mut d_mu = d_z.clone();
    for i in 0..d_mu.values().len() {
        d_mu.values_mut()[i] += inv_n * enc.mu.values()[i];
    }
    let mut d_logvar = DenseMatrix::zeros(n, latent);
    for i in 0..d_logvar.values().len() {
        let lv = enc.logvar.values()[i];
        let sample_path = 0.5 * d_z.values()[i] * eps.values()[i] * (0.5 * lv).exp();
        let kl_path = 0.5 * inv_n * lv.exp_m1();
        d_logvar.values_mut()[i] = sample_path + kl_path;
    }

    // --- encoder path ---
    match params.encoder.kind {
        EncoderKind::Gcn => {
            let a_norm = graph.normalized_adjacency();
            let q = cache
                .propagated_hidden
                .as_ref()
                .expect("gcn cache carries propagated hidden");
            grads.w_mu = q.transpose().matmul(&d_mu)?;
            grads.w_logvar = q.transpose().matmul(&d_logvar)?;
            let mut d_q = d_mu.matmul(&params.encoder.w_mu.transpose())?;
            d_q.add_scaled_in_place(&d_logvar.matmul(&params.encoder.w_logvar.transpose())?, 1.0)?;
            // A_norm is symmetric, so A^T dQ = A dQ.
            let d_hidden = a_norm.matmul_dense(&d_q)?;
            let d_hidden_pre = mask_relu(&d_hidden, &cache.hidden_pre);
            let p = cache
                .propagated_x
                .as_ref()
                .expect("gcn cache carries propagated features");
            grads.w0 = p.transpose().matmul(&d_hidden_pre)?;
        }
        EncoderKind::Gat => {
            let gat_params = params.encoder.gat.as_ref().ok_or(ModelError::MissingGatParams)?;
            let gat_cache: &GatCache = cache.gat.as_ref().expect("gat cache present");
            let (d_w_mu, d_attn_mu, d_hidden_mu) = gat_layer_backward(
                &cache.hidden,
                &params.encoder.w_mu,
                &gat_params.attn_mu,
                &gat_cache.mu,
                &d_mu,
            )?;
            let (d_w_logvar, d_attn_logvar, d_hidden_logvar) = gat_layer_backward(
                &cache.hidden,
                &params.encoder.w_logvar,
                &gat_params.attn_logvar,
                &gat_cache.logvar,
                &d_logvar,
            )?;
            grads.w_mu = d_w_mu;
            grads.w_logvar = d_w_logvar;
            grads.attn_mu = d_attn_mu;
            grads.attn_logvar = d_attn_logvar;
            let mut d_hidden = d_hidden_mu;
            d_hidden.add_scaled_in_place(&d_hidden_logvar, 1.0)?;
            let d_hidden_pre = mask_relu(&d_hidden, &cache.hidden_pre);
            let (d_w0, d_attn_hidden, _d_x) = gat_layer_backward(
                graph.features(),
                &params.encoder.w0,
                &gat_params.attn_hidden,
                &gat_cache.hidden,
                &d_hidden_pre,
            )?;
            grads.w0 = d_w0;
            grads.attn_hidden = d_attn_hidden;
        }
    }
    Ok(grads)
}

fn mask_relu(grad: &DenseMatrix, pre_activation: &DenseMatrix) -> DenseMatrix {
    let mut out = grad.clone();
    for i in 0..out.values().len() {
        if pre_activation.values()[i] <= 0.0 {
            out.values_mut()[i] = 0.0;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::test_support::small_graph;
    use super::super::{encode_with_noise, Dims};
    use super::*;
    use crate::numeric::RngState;

    #[test]
    fn backward_requires_stored_noise() {
        let graph = small_graph(3, 3, 4, 2);
        let params =
            ModelParams::init(Dims::new(4, 5, 3, 4), EncoderKind::Gcn, false, 1.0, &mut RngState::new(1));
        let mut rng = RngState::new(2);
        let mut enc = super::super::encode(&graph, &params.encoder, &mut rng).unwrap();
        enc.eps = None;
        let err = backward(&graph, &params, &enc).unwrap_err();
        assert!(matches!(err, ModelError::MissingEps));
    }

    #[test]
    fn grl_zero_matches_plain_vgae_encoder_gradients() {
        let graph = small_graph(3, 3, 4, 7);
        let mut rng = RngState::new(3);
        let mut params =
            ModelParams::init(Dims::new(4, 5, 3, 4), EncoderKind::Gcn, false, 0.0, &mut rng);
        let eps = RngState::new(4).standard_normal_matrix(6, 3);
        let enc = encode_with_noise(&graph, &params.encoder, &eps).unwrap();
        let with_zero = backward(&graph, &params, &enc).unwrap();
        // Re-run with a wildly different lambda: encoder grads must change,
        // but with lambda = 0 the discriminator path cannot leak in, so the
        // two lambda = 0 runs agree exactly.
        params.discriminator.grl_lambda = 0.0;
        let again = backward(&graph, &params, &enc).unwrap();
        assert_eq!(with_zero.w0, again.w0);
        assert_eq!(with_zero.w_mu, again.w_mu);
        assert_eq!(with_zero.w_logvar, again.w_logvar);
        params.discriminator.grl_lambda = 2.5;
        let reversed = backward(&graph, &params, &enc).unwrap();
        assert_ne!(with_zero.w0, reversed.w0);
        // Discriminator's own gradient is independent of lambda.
        assert_eq!(with_zero.w1, reversed.w1);
        assert_eq!(with_zero.b2, reversed.b2);
    }
}
