//! The DAVGAE network.
//!
//! A variational graph encoder (GCN by default, single-head GAT as an
//! alternative) produces per-node Gaussian latents; a bilinear decoder with
//! a full trainable relation matrix scores directed links; a two-layer
//! discriminator predicts each node's domain. The total loss is
//! `recon + kl + dis`, with the discriminator coupled to the encoder through
//! a gradient-reversal factor so the latents drift toward domain invariance.
//!
//! Every gradient is derived by hand in [`backward`]; the finite-difference
//! harness in [`gradcheck`] validates all of them.

mod backward;
mod gat;
mod gradcheck;

pub use backward::{backward, ModelGrads};
pub use gradcheck::{gradient_check, kink_margin, GradCheckReport, KINK_MARGIN};

use thiserror::Error;

use crate::graph::ConceptGraph;
use crate::numeric::{DenseMatrix, RngState, SparseMatrix};

/// Probability clamp applied before any `ln` in the losses.
pub const PROB_CLAMP: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("shape mismatch in {context}: expected {expected}, got {got}")]
    Shape {
        context: &'static str,
        expected: String,
        got: String,
    },
    #[error("encoder kind is {actual:?} but {expected:?} was required")]
    WrongEncoderKind { expected: EncoderKind, actual: EncoderKind },
    #[error("GAT encoder selected but attention parameters are missing")]
    MissingGatParams,
    #[error("encoder output carries no stored noise; the reparameterization path cannot be reconstructed")]
    MissingEps,
    #[error(transparent)]
    Numeric(#[from] crate::numeric::NumericError),
}

pub type Result<T> = std::result::Result<T, ModelError>;

/// Layer widths of the network.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dims {
    /// Input feature dimension (embedding width).
    pub feature: usize,
    /// Hidden layer width.
    pub hidden: usize,
    /// Latent dimension of the Gaussian code.
    pub latent: usize,
    /// Discriminator hidden width.
    pub disc_hidden: usize,
}

impl Dims {
    pub fn new(feature: usize, hidden: usize, latent: usize, disc_hidden: usize) -> Self {
        Self {
            feature,
            hidden,
            latent,
            disc_hidden,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EncoderKind {
    Gcn,
    Gat,
}

impl std::fmt::Display for EncoderKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EncoderKind::Gcn => "gcn",
            EncoderKind::Gat => "gat",
        })
    }
}

/// Single-head attention parameters, one vector per aggregation layer.
#[derive(Debug, Clone, PartialEq)]
pub struct GatParams {
    /// Attention vector of the hidden layer, length `2 * hidden`.
    pub attn_hidden: Vec<f64>,
    /// Attention vector of the mean head, length `2 * latent`.
    pub attn_mu: Vec<f64>,
    /// Attention vector of the log-variance head, length `2 * latent`.
    pub attn_logvar: Vec<f64>,
    /// LeakyReLU slope for attention scores (fixed, not trained).
    pub leaky_slope: f64,
}

/// Encoder weights. Shapes chain `feature -> hidden -> latent`.
#[derive(Debug, Clone, PartialEq)]
pub struct EncoderParams {
    pub kind: EncoderKind,
    pub w0: DenseMatrix,
    pub w_mu: DenseMatrix,
    pub w_logvar: DenseMatrix,
    /// Present iff `kind == Gat`.
    pub gat: Option<GatParams>,
}

/// Bilinear decoder weights.
#[derive(Debug, Clone, PartialEq)]
pub struct DistMultParams {
    /// Relation matrix, `latent x latent`, unconstrained (asymmetry is the
    /// point: prerequisite direction lives here).
    pub r: DenseMatrix,
    /// Ablation mode: only the diagonal is trainable and the off-diagonal
    /// entries stay at zero.
    pub diagonal: bool,
}

/// Two-layer domain discriminator plus the gradient-reversal coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscriminatorParams {
    pub w1: DenseMatrix,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: f64,
    /// Scale of the reversed discriminator gradient entering the encoder.
    /// Zero disables the adversarial coupling; -1 recovers a plain summed
    /// loss where the encoder helps the discriminator.
    pub grl_lambda: f64,
}

/// All trainable weights.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub encoder: EncoderParams,
    pub distmult: DistMultParams,
    pub discriminator: DiscriminatorParams,
}

/// Encoder forward result. `eps` is retained so the exact reparameterized
/// sample can be reconstructed during backprop.
#[derive(Debug, Clone)]
pub struct EncoderOutput {
    pub mu: DenseMatrix,
    pub logvar: DenseMatrix,
    pub z: DenseMatrix,
    pub eps: Option<DenseMatrix>,
}

impl EncoderOutput {
    /// Largest deviation from `Z = mu + exp(logvar / 2) * eps`.
    pub fn reparam_residual(&self) -> f64 {
        let Some(eps) = &self.eps else {
            return f64::INFINITY;
        };
        let mut worst = 0.0f64;
        for i in 0..self.z.values().len() {
            let expected =
                self.mu.values()[i] + (0.5 * self.logvar.values()[i]).exp() * eps.values()[i];
            worst = worst.max((self.z.values()[i] - expected).abs());
        }
        worst
    }
}

/// Loss components of one forward pass. `total` is exactly the sum of the
/// three parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossBreakdown {
    pub recon: f64,
    pub kl: f64,
    pub dis: f64,
    pub total: f64,
}

pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Cross-entropy pieces of one logit under the probability clamp:
/// `(-ln(clamp(sigmoid(l))), -ln(1 - clamp(sigmoid(l))))`.
///
/// Evaluated through softplus so saturated logits lose no precision; the
/// clamp appears as a cap at `-ln(PROB_CLAMP)`, which is exactly where the
/// clamped probability would have frozen the log.
pub(crate) fn bce_terms(logit: f64) -> (f64, f64) {
    let cap = -PROB_CLAMP.ln();
    (softplus(-logit).min(cap), softplus(logit).min(cap))
}

/// Derivatives of the two [`bce_terms`] pieces with respect to the logit;
/// zero on the capped (clamped) side where the loss is flat.
pub(crate) fn bce_grads(logit: f64) -> (f64, f64) {
    let cap = -PROB_CLAMP.ln();
    let s = sigmoid(logit);
    let d_pos = if softplus(-logit) < cap { s - 1.0 } else { 0.0 };
    let d_neg = if softplus(logit) < cap { s } else { 0.0 };
    (d_pos, d_neg)
}

fn glorot_limit(fan_in: usize, fan_out: usize) -> f64 {
    (6.0 / (fan_in + fan_out) as f64).sqrt()
}

fn glorot_matrix(rng: &mut RngState, rows: usize, cols: usize) -> DenseMatrix {
    let limit = glorot_limit(rows, cols);
    let mut m = DenseMatrix::zeros(rows, cols);
    for v in m.values_mut() {
        *v = rng.next_uniform(-limit, limit);
    }
    m
}

fn glorot_vector(rng: &mut RngState, len: usize, fan_in: usize) -> Vec<f64> {
    let limit = glorot_limit(fan_in, 1);
    (0..len).map(|_| rng.next_uniform(-limit, limit)).collect()
}

impl ModelParams {
    /// Glorot-uniform initialization. The draw order (w0, w_mu, w_logvar,
    /// attention vectors, R, W1, W2) is fixed so a seed pins every weight.
    pub fn init(
        dims: Dims,
        kind: EncoderKind,
        diagonal_r: bool,
        grl_lambda: f64,
        rng: &mut RngState,
    ) -> Self {
        let w0 = glorot_matrix(rng, dims.feature, dims.hidden);
        let w_mu = glorot_matrix(rng, dims.hidden, dims.latent);
        let w_logvar = glorot_matrix(rng, dims.hidden, dims.latent);
        let gat = match kind {
            EncoderKind::Gcn => None,
            EncoderKind::Gat => Some(GatParams {
                attn_hidden: glorot_vector(rng, 2 * dims.hidden, 2 * dims.hidden),
                attn_mu: glorot_vector(rng, 2 * dims.latent, 2 * dims.latent),
                attn_logvar: glorot_vector(rng, 2 * dims.latent, 2 * dims.latent),
                leaky_slope: 0.2,
            }),
        };
        let r = if diagonal_r {
            let mut r = DenseMatrix::zeros(dims.latent, dims.latent);
            let limit = glorot_limit(dims.latent, dims.latent);
            for i in 0..dims.latent {
                r.set(i, i, rng.next_uniform(-limit, limit));
            }
            r
        } else {
            glorot_matrix(rng, dims.latent, dims.latent)
        };
        let w1 = glorot_matrix(rng, dims.latent, dims.disc_hidden);
        let w2 = glorot_vector(rng, dims.disc_hidden, dims.disc_hidden);
        Self {
            encoder: EncoderParams {
                kind,
                w0,
                w_mu,
                w_logvar,
                gat,
            },
            distmult: DistMultParams {
                r,
                diagonal: diagonal_r,
            },
            discriminator: DiscriminatorParams {
                w1,
                b1: vec![0.0; dims.disc_hidden],
                w2,
                b2: 0.0,
                grl_lambda,
            },
        }
    }

    pub fn dims(&self) -> Dims {
        Dims {
            feature: self.encoder.w0.rows(),
            hidden: self.encoder.w0.cols(),
            latent: self.encoder.w_mu.cols(),
            disc_hidden: self.discriminator.b1.len(),
        }
    }

    /// Number of flattened entries contributed by the encoder; encoder
    /// parameters occupy the leading `encoder_flat_len()` coordinates of
    /// [`ModelParams::flatten`].
    pub fn encoder_flat_len(&self) -> usize {
        let mut n = self.encoder.w0.values().len()
            + self.encoder.w_mu.values().len()
            + self.encoder.w_logvar.values().len();
        if let Some(gat) = &self.encoder.gat {
            n += gat.attn_hidden.len() + gat.attn_mu.len() + gat.attn_logvar.len();
        }
        n
    }

    /// Flatten every trainable value into one vector. Order: w0, w_mu,
    /// w_logvar, attention vectors (GAT only), R (diagonal only in diagonal
    /// mode), W1, b1, W2, b2.
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::new();
        out.extend_from_slice(self.encoder.w0.values());
        out.extend_from_slice(self.encoder.w_mu.values());
        out.extend_from_slice(self.encoder.w_logvar.values());
        if let Some(gat) = &self.encoder.gat {
            out.extend_from_slice(&gat.attn_hidden);
            out.extend_from_slice(&gat.attn_mu);
            out.extend_from_slice(&gat.attn_logvar);
        }
        if self.distmult.diagonal {
            for i in 0..self.distmult.r.rows() {
                out.push(self.distmult.r.get(i, i));
            }
        } else {
            out.extend_from_slice(self.distmult.r.values());
        }
        out.extend_from_slice(self.discriminator.w1.values());
        out.extend_from_slice(&self.discriminator.b1);
        out.extend_from_slice(&self.discriminator.w2);
        out.push(self.discriminator.b2);
        out
    }

    /// Inverse of [`ModelParams::flatten`]. Panics on length mismatch.
    pub fn set_flat(&mut self, flat: &[f64]) {
        fn take(flat: &[f64], cursor: &mut usize, dst: &mut [f64]) {
            dst.copy_from_slice(&flat[*cursor..*cursor + dst.len()]);
            *cursor += dst.len();
        }
        let mut cursor = 0usize;
        take(flat, &mut cursor, self.encoder.w0.values_mut());
        take(flat, &mut cursor, self.encoder.w_mu.values_mut());
        take(flat, &mut cursor, self.encoder.w_logvar.values_mut());
        if let Some(gat) = &mut self.encoder.gat {
            take(flat, &mut cursor, &mut gat.attn_hidden);
            take(flat, &mut cursor, &mut gat.attn_mu);
            take(flat, &mut cursor, &mut gat.attn_logvar);
        }
        if self.distmult.diagonal {
            for i in 0..self.distmult.r.rows() {
                self.distmult.r.set(i, i, flat[cursor]);
                cursor += 1;
            }
        } else {
            take(flat, &mut cursor, self.distmult.r.values_mut());
        }
        take(flat, &mut cursor, self.discriminator.w1.values_mut());
        take(flat, &mut cursor, &mut self.discriminator.b1);
        take(flat, &mut cursor, &mut self.discriminator.w2);
        self.discriminator.b2 = flat[cursor];
        cursor += 1;
        assert_eq!(cursor, flat.len(), "flat parameter length mismatch");
    }
}

fn relu(m: &DenseMatrix) -> DenseMatrix {
    m.map(|v| v.max(0.0))
}

fn check_encoder_shapes(graph: &ConceptGraph, params: &EncoderParams) -> Result<()> {
    if graph.features().cols() != params.w0.rows() {
        return Err(ModelError::Shape {
            context: "encoder input",
            expected: format!("features with {} columns", params.w0.rows()),
            got: format!("{} columns", graph.features().cols()),
        });
    }
    if params.w0.cols() != params.w_mu.rows() || params.w0.cols() != params.w_logvar.rows() {
        return Err(ModelError::Shape {
            context: "encoder weights",
            expected: format!("hidden width {}", params.w0.cols()),
            got: format!("{} / {}", params.w_mu.rows(), params.w_logvar.rows()),
        });
    }
    if params.w_mu.cols() != params.w_logvar.cols() {
        return Err(ModelError::Shape {
            context: "encoder heads",
            expected: format!("latent width {}", params.w_mu.cols()),
            got: format!("{}", params.w_logvar.cols()),
        });
    }
    Ok(())
}

/// Intermediate activations kept for the backward pass.
#[derive(Debug, Clone)]
pub(crate) struct EncoderCache {
    /// GCN: `A_norm * X`; unused by GAT.
    pub(crate) propagated_x: Option<DenseMatrix>,
    /// Pre-ReLU hidden activations.
    pub(crate) hidden_pre: DenseMatrix,
    /// Post-ReLU hidden activations.
    pub(crate) hidden: DenseMatrix,
    /// GCN: `A_norm * hidden`; unused by GAT.
    pub(crate) propagated_hidden: Option<DenseMatrix>,
    /// GAT-only attention caches for the three layers.
    pub(crate) gat: Option<gat::GatCache>,
}

pub(crate) fn encode_with_cache(
    graph: &ConceptGraph,
    params: &EncoderParams,
    eps: &DenseMatrix,
) -> Result<(EncoderOutput, EncoderCache)> {
    check_encoder_shapes(graph, params)?;
    let (mu, logvar, cache) = match params.kind {
        EncoderKind::Gcn => {
            let a_norm = graph.normalized_adjacency();
            let propagated_x = a_norm.matmul_dense(graph.features())?;
            let hidden_pre = propagated_x.matmul(&params.w0)?;
            let hidden = relu(&hidden_pre);
            let propagated_hidden = a_norm.matmul_dense(&hidden)?;
            let mu = propagated_hidden.matmul(&params.w_mu)?;
            let logvar = propagated_hidden.matmul(&params.w_logvar)?;
            let cache = EncoderCache {
                propagated_x: Some(propagated_x),
                hidden_pre,
                hidden,
                propagated_hidden: Some(propagated_hidden),
                gat: None,
            };
            (mu, logvar, cache)
        }
        EncoderKind::Gat => {
            let gat_params = params.gat.as_ref().ok_or(ModelError::MissingGatParams)?;
            let (mu, logvar, gat_cache, hidden_pre, hidden) =
                gat::gat_forward(graph, params, gat_params)?;
            let cache = EncoderCache {
                propagated_x: None,
                hidden_pre,
                hidden,
                propagated_hidden: None,
                gat: Some(gat_cache),
            };
            (mu, logvar, cache)
        }
    };
    if eps.rows() != mu.rows() || eps.cols() != mu.cols() {
        return Err(ModelError::Shape {
            context: "reparameterization noise",
            expected: format!("{}x{}", mu.rows(), mu.cols()),
            got: format!("{}x{}", eps.rows(), eps.cols()),
        });
    }
    let mut z = mu.clone();
    for i in 0..z.values().len() {
        z.values_mut()[i] += (0.5 * logvar.values()[i]).exp() * eps.values()[i];
    }
    Ok((
        EncoderOutput {
            mu,
            logvar,
            z,
            eps: Some(eps.clone()),
        },
        cache,
    ))
}

/// All pre-activation values feeding a kinked nonlinearity in the encoder:
/// the hidden-layer ReLU inputs, plus the raw attention scores of each GAT
/// layer. Used by the gradient-check harness to measure kink proximity.
pub(crate) fn encode_pre_activations(
    graph: &ConceptGraph,
    params: &EncoderParams,
) -> Result<Vec<f64>> {
    let eps = DenseMatrix::zeros(graph.node_count(), params.w_mu.cols());
    let (_, cache) = encode_with_cache(graph, params, &eps)?;
    let mut out = cache.hidden_pre.values().to_vec();
    if let Some(gat_cache) = &cache.gat {
        let gat_params = params.gat.as_ref().ok_or(ModelError::MissingGatParams)?;
        for (layer, attn) in [
            (&gat_cache.hidden, &gat_params.attn_hidden),
            (&gat_cache.mu, &gat_params.attn_mu),
            (&gat_cache.logvar, &gat_params.attn_logvar),
        ] {
            let fout = layer.transformed.cols();
            let (a_left, a_right) = attn.split_at(fout);
            for p in 0..graph.node_count() {
                let left: f64 = a_left
                    .iter()
                    .zip(layer.transformed.row(p))
                    .map(|(&a, &t)| a * t)
                    .sum();
                for &(q, _, _) in &layer.attn[p] {
                    let right: f64 = a_right
                        .iter()
                        .zip(layer.transformed.row(q))
                        .map(|(&a, &t)| a * t)
                        .sum();
                    out.push(left + right);
                }
            }
        }
    }
    Ok(out)
}

/// Encode with explicit noise (tests and backprop reconstruction).
pub fn encode_with_noise(
    graph: &ConceptGraph,
    params: &EncoderParams,
    eps: &DenseMatrix,
) -> Result<EncoderOutput> {
    encode_with_cache(graph, params, eps).map(|(out, _)| out)
}

/// Encode by sampling the reparameterization noise from `rng`.
pub fn encode(graph: &ConceptGraph, params: &EncoderParams, rng: &mut RngState) -> Result<EncoderOutput> {
    check_encoder_shapes(graph, params)?;
    let eps = rng.standard_normal_matrix(graph.node_count(), params.w_mu.cols());
    encode_with_noise(graph, params, &eps)
}

/// Deterministic encode with the noise forced to zero (`Z = mu`).
pub fn encode_deterministic(graph: &ConceptGraph, params: &EncoderParams) -> Result<EncoderOutput> {
    check_encoder_shapes(graph, params)?;
    let eps = DenseMatrix::zeros(graph.node_count(), params.w_mu.cols());
    encode_with_noise(graph, params, &eps)
}

/// GCN encoder forward pass.
pub fn gcn_encode(graph: &ConceptGraph, params: &EncoderParams, rng: &mut RngState) -> Result<EncoderOutput> {
    if params.kind != EncoderKind::Gcn {
        return Err(ModelError::WrongEncoderKind {
            expected: EncoderKind::Gcn,
            actual: params.kind,
        });
    }
    encode(graph, params, rng)
}

/// Single-head GAT encoder forward pass.
pub fn gat_encode(graph: &ConceptGraph, params: &EncoderParams, rng: &mut RngState) -> Result<EncoderOutput> {
    if params.kind != EncoderKind::Gat {
        return Err(ModelError::WrongEncoderKind {
            expected: EncoderKind::Gat,
            actual: params.kind,
        });
    }
    encode(graph, params, rng)
}

/// Bilinear link logits: `logits[p][q] = z_p . R . z_q` for nodes as rows.
pub fn distmult_scores(z: &DenseMatrix, params: &DistMultParams) -> Result<DenseMatrix> {
    if z.cols() != params.r.rows() {
        return Err(ModelError::Shape {
            context: "distmult",
            expected: format!("latent width {}", params.r.rows()),
            got: format!("{}", z.cols()),
        });
    }
    let zr = z.matmul(&params.r)?;
    Ok(zr.matmul(&z.transpose())?)
}

/// Domain probabilities: `sigmoid(relu(Z W1 + b1) W2 + b2)` per node.
pub fn discriminate(z: &DenseMatrix, params: &DiscriminatorParams) -> Result<Vec<f64>> {
    Ok(discriminate_detailed(z, params)?.2)
}

/// Discriminator forward returning pre-activations for backprop:
/// `(hidden_pre, scores, probabilities)`.
pub(crate) fn discriminate_detailed(
    z: &DenseMatrix,
    params: &DiscriminatorParams,
) -> Result<(DenseMatrix, Vec<f64>, Vec<f64>)> {
    if z.cols() != params.w1.rows() {
        return Err(ModelError::Shape {
            context: "discriminator",
            expected: format!("latent width {}", params.w1.rows()),
            got: format!("{}", z.cols()),
        });
    }
    let m = params.w1.cols();
    let mut hidden_pre = z.matmul(&params.w1)?;
    for r in 0..hidden_pre.rows() {
        for c in 0..m {
            let v = hidden_pre.get(r, c) + params.b1[c];
            hidden_pre.set(r, c, v);
        }
    }
    let mut scores = Vec::with_capacity(z.rows());
    for r in 0..hidden_pre.rows() {
        let mut s = params.b2;
        for c in 0..m {
            s += hidden_pre.get(r, c).max(0.0) * params.w2[c];
        }
        scores.push(s);
    }
    let probs = scores.iter().map(|&s| sigmoid(s)).collect();
    Ok((hidden_pre, scores, probs))
}

/// Assemble the loss from forward quantities.
///
/// * `recon`: binary cross-entropy between `sigmoid(logits)` and the
///   adjacency over all `n^2` entries, positives up-weighted by
///   `(n^2 - |edges|) / |edges|`, the whole sum scaled by `1 / n^2`.
/// * `kl`: per-node average of the closed-form Gaussian KL to `N(0, I)`.
/// * `dis`: mean binary cross-entropy of the domain probabilities.
///
/// Probabilities are clamped to `[1e-12, 1 - 1e-12]` before any log.
pub fn compute_loss(
    graph: &ConceptGraph,
    encoder_out: &EncoderOutput,
    logits: &DenseMatrix,
    dis_probs: &[f64],
) -> Result<LossBreakdown> {
    let n = graph.node_count();
    if logits.rows() != n || logits.cols() != n {
        return Err(ModelError::Shape {
            context: "loss logits",
            expected: format!("{n}x{n}"),
            got: format!("{}x{}", logits.rows(), logits.cols()),
        });
    }
    if dis_probs.len() != n {
        return Err(ModelError::Shape {
            context: "loss discriminator probabilities",
            expected: format!("{n}"),
            got: format!("{}", dis_probs.len()),
        });
    }

    let recon = reconstruction_loss(graph.adjacency(), logits);

    // KL written as mu^2/2 + (expm1(lv) - lv)/2, which is non-negative
    // termwise even under floating-point rounding near lv = 0.
    let mut kl = 0.0;
    for i in 0..encoder_out.mu.values().len() {
        let mu = encoder_out.mu.values()[i];
        let lv = encoder_out.logvar.values()[i];
        kl += 0.5 * (mu * mu + (lv.exp_m1() - lv));
    }
    kl /= (n * n) as f64; // EXPERIMENT

    let labels = graph.domain_labels();
    let mut dis = 0.0;
    for (p, &prob) in dis_probs.iter().enumerate() {
        // Recover the logit so the cross-entropy can be evaluated stably even
        // for saturated probabilities.
        let c = prob.clamp(PROB_CLAMP, 1.0 - PROB_CLAMP);
        let logit = (c / (1.0 - c)).ln();
        let (pos, neg) = bce_terms(logit);
        dis += labels[p] * pos + (1.0 - labels[p]) * neg;
    }
    dis /= n as f64;

    Ok(LossBreakdown {
        recon,
        kl,
        dis,
        total: recon + kl + dis,
    })
}

fn reconstruction_loss(adjacency: &SparseMatrix, logits: &DenseMatrix) -> f64 {
    let n = adjacency.rows();
    let total_entries = (n * n) as f64;
    let nnz = adjacency.nnz();
    let w_pos = if nnz == 0 {
        1.0
    } else {
        (total_entries - nnz as f64) / nnz as f64
    };
    let mut sum = 0.0;
    let mut target_row = vec![0.0f64; n];
    for p in 0..n {
        for (c, v) in adjacency.row(p) {
            target_row[c] = v;
        }
        for q in 0..n {
            let target = target_row[q];
            let (pos, neg) = bce_terms(logits.get(p, q));
            let weight = if target > 0.0 { w_pos } else { 1.0 };
            sum += weight * target * pos + (1.0 - target) * neg;
        }
        for (c, _) in adjacency.row(p) {
            target_row[c] = 0.0;
        }
    }
    sum / total_entries
}

/// Total loss as a pure function of `(graph, params, eps)`: one forward pass
/// with the given reparameterization noise. This is the quantity the
/// finite-difference oracle probes.
pub fn loss_with_fixed_noise(
    graph: &ConceptGraph,
    params: &ModelParams,
    eps: &DenseMatrix,
) -> Result<LossBreakdown> {
    let enc = encode_with_noise(graph, &params.encoder, eps)?;
    let logits = distmult_scores(&enc.z, &params.distmult)?;
    let dis_probs = discriminate(&enc.z, &params.discriminator)?;
    compute_loss(graph, &enc, &logits, &dis_probs)
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;

    /// Small two-domain graph with a chain of annotation edges; features are
    /// random but deterministic per seed.
    pub(crate) fn small_graph(n_source: usize, n_target: usize, dim: usize, seed: u64) -> ConceptGraph {
        crate::synth::random_concept_graph(n_source, n_target, dim, seed)
    }
}

#[cfg(test)]
mod tests {
    use super::test_support::small_graph;
    use super::*;

    fn one_node_graph(feature: f64) -> ConceptGraph {
        use crate::dataset::{ConceptVocab, DomainTag, EmbeddingTable, RelationSet};
        use crate::graph::{build_cross_domain_graph, CosineRule, EdgePolicy};
        let vocab =
            ConceptVocab::from_entries(vec![("only".into(), DomainTag::Source)]).unwrap();
        let embeddings = EmbeddingTable::from_vectors(vec![vec![feature]]).unwrap();
        let policy = EdgePolicy::new(CosineRule::Threshold(1.5), 0.0, false, false).unwrap();
        build_cross_domain_graph(&vocab, &embeddings, &RelationSet::default(), &policy, None)
            .unwrap()
    }

    fn unit_params_1d() -> ModelParams {
        // Every weight is a 1x1 identity-like unit; biases zero.
        ModelParams {
            encoder: EncoderParams {
                kind: EncoderKind::Gcn,
                w0: DenseMatrix::from_vec(1, 1, vec![1.0]).unwrap(),
                w_mu: DenseMatrix::from_vec(1, 1, vec![1.0]).unwrap(),
                w_logvar: DenseMatrix::from_vec(1, 1, vec![0.0]).unwrap(),
                gat: None,
            },
            distmult: DistMultParams {
                r: DenseMatrix::from_vec(1, 1, vec![1.0]).unwrap(),
                diagonal: false,
            },
            discriminator: DiscriminatorParams {
                w1: DenseMatrix::from_vec(1, 1, vec![0.0]).unwrap(),
                b1: vec![0.0],
                w2: vec![0.0],
                b2: 0.0,
                grl_lambda: 1.0,
            },
        }
    }

    #[test]
    fn gcn_hand_trace_single_node() {
        // A_norm = [[1]], x = 2, unit weights, eps forced to zero:
        // hidden = relu(2) = 2, mu = 2, logvar = 0, z = mu = 2.
        let graph = one_node_graph(2.0);
        let params = unit_params_1d();
        let eps = DenseMatrix::zeros(1, 1);
        let enc = encode_with_noise(&graph, &params.encoder, &eps).unwrap();
        assert!((enc.mu.get(0, 0) - 2.0).abs() < 1e-12);
        assert!((enc.z.get(0, 0) - 2.0).abs() < 1e-12);
        assert_eq!(enc.logvar.get(0, 0), 0.0);
    }

    #[test]
    fn zero_features_propagate_to_z_equals_eps() {
        let graph = small_graph(3, 3, 4, 11);
        // Kill the input by zeroing w0: hidden = 0, mu = 0, logvar = 0, z = eps.
        let mut params =
            ModelParams::init(Dims::new(4, 5, 3, 4), EncoderKind::Gcn, false, 1.0, &mut RngState::new(1));
        for v in params.encoder.w0.values_mut() {
            *v = 0.0;
        }
        let mut rng = RngState::new(5);
        let eps = rng.standard_normal_matrix(6, 3);
        let enc = encode_with_noise(&graph, &params.encoder, &eps).unwrap();
        for i in 0..enc.z.values().len() {
            assert!((enc.z.values()[i] - eps.values()[i]).abs() < 1e-12);
            assert_eq!(enc.mu.values()[i], 0.0);
        }
    }

    #[test]
    fn encode_is_deterministic_per_seed() {
        let graph = small_graph(4, 3, 4, 3);
        let params =
            ModelParams::init(Dims::new(4, 6, 3, 4), EncoderKind::Gcn, false, 1.0, &mut RngState::new(2));
        let a = encode(&graph, &params.encoder, &mut RngState::new(77)).unwrap();
        let b = encode(&graph, &params.encoder, &mut RngState::new(77)).unwrap();
        assert_eq!(a.z, b.z);
        assert!(a.reparam_residual() < 1e-15);
    }

    #[test]
    fn distmult_identity_case() {
        let z = DenseMatrix::identity(2);
        let params = DistMultParams {
            r: DenseMatrix::identity(2),
            diagonal: false,
        };
        let logits = distmult_scores(&z, &params).unwrap();
        assert_eq!(logits, DenseMatrix::identity(2));
    }

    #[test]
    fn distmult_asymmetry_witness() {
        // z_p = (1,0), z_q = (0,1), R = [[0,1],[0,0]]:
        // logits[p][q] = 1, logits[q][p] = 0.
        let z = DenseMatrix::from_rows(&[&[1.0, 0.0], &[0.0, 1.0]]).unwrap();
        let params = DistMultParams {
            r: DenseMatrix::from_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap(),
            diagonal: false,
        };
        let logits = distmult_scores(&z, &params).unwrap();
        assert_eq!(logits.get(0, 1), 1.0);
        assert_eq!(logits.get(1, 0), 0.0);
    }

    #[test]
    fn distmult_zero_relation_gives_half_probability() {
        let mut rng = RngState::new(3);
        let z = rng.standard_normal_matrix(4, 3);
        let params = DistMultParams {
            r: DenseMatrix::zeros(3, 3),
            diagonal: false,
        };
        let logits = distmult_scores(&z, &params).unwrap();
        assert!(logits.values().iter().all(|&v| v == 0.0));
        assert_eq!(sigmoid(0.0), 0.5);
    }

    #[test]
    fn distmult_matches_scalar_triple_loop() {
        let mut rng = RngState::new(9);
        let z = rng.standard_normal_matrix(5, 4);
        let r = rng.standard_normal_matrix(4, 4);
        let params = DistMultParams { r: r.clone(), diagonal: false };
        let logits = distmult_scores(&z, &params).unwrap();
        for p in 0..5 {
            for q in 0..5 {
                let mut expect = 0.0;
                for a in 0..4 {
                    for b in 0..4 {
                        expect += z.get(p, a) * r.get(a, b) * z.get(q, b);
                    }
                }
                assert!((logits.get(p, q) - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn discriminator_all_zero_weights_gives_half() {
        let z = RngState::new(4).standard_normal_matrix(3, 2);
        let params = DiscriminatorParams {
            w1: DenseMatrix::zeros(2, 4),
            b1: vec![0.0; 4],
            w2: vec![0.0; 4],
            b2: 0.0,
            grl_lambda: 1.0,
        };
        let probs = discriminate(&z, &params).unwrap();
        assert!(probs.iter().all(|&p| p == 0.5));
    }

    #[test]
    fn discriminator_matches_scalar_recomputation() {
        let mut rng = RngState::new(21);
        let z = rng.standard_normal_matrix(6, 3);
        let w1 = rng.standard_normal_matrix(3, 4);
        let b1: Vec<f64> = (0..4).map(|_| rng.next_standard_normal()).collect();
        let w2: Vec<f64> = (0..4).map(|_| rng.next_standard_normal()).collect();
        let b2 = rng.next_standard_normal();
        let params = DiscriminatorParams {
            w1: w1.clone(),
            b1: b1.clone(),
            w2: w2.clone(),
            b2,
            grl_lambda: 0.0,
        };
        let probs = discriminate(&z, &params).unwrap();
        for p in 0..6 {
            let mut s = b2;
            for j in 0..4 {
                let mut pre = b1[j];
                for c in 0..3 {
                    pre += z.get(p, c) * w1.get(c, j);
                }
                s += pre.max(0.0) * w2[j];
            }
            assert!((probs[p] - sigmoid(s)).abs() < 1e-12);
        }
    }

    #[test]
    fn kl_closed_forms() {
        let graph = one_node_graph(1.0);
        // mu = 0, logvar = 0 -> KL = 0.
        let enc = EncoderOutput {
            mu: DenseMatrix::zeros(1, 1),
            logvar: DenseMatrix::zeros(1, 1),
            z: DenseMatrix::zeros(1, 1),
            eps: Some(DenseMatrix::zeros(1, 1)),
        };
        let logits = DenseMatrix::zeros(1, 1);
        let loss = compute_loss(&graph, &enc, &logits, &[0.5]).unwrap();
        assert!(loss.kl.abs() < 1e-12);
        // Single node, k = 1, mu = 1, logvar = 0 -> KL = 0.5.
        let enc = EncoderOutput {
            mu: DenseMatrix::from_vec(1, 1, vec![1.0]).unwrap(),
            logvar: DenseMatrix::zeros(1, 1),
            z: DenseMatrix::from_vec(1, 1, vec![1.0]).unwrap(),
            eps: Some(DenseMatrix::zeros(1, 1)),
        };
        let loss = compute_loss(&graph, &enc, &logits, &[0.5]).unwrap();
        assert!((loss.kl - 0.5).abs() < 1e-12, "kl = {}", loss.kl);
        // Chance-level discriminator: dis = ln 2.
        assert!((loss.dis - std::f64::consts::LN_2).abs() < 1e-12);
        assert_eq!(loss.total, loss.recon + loss.kl + loss.dis);
    }

    #[test]
    fn kl_nonnegative_on_random_inputs() {
        let graph = small_graph(3, 2, 3, 6);
        let mut rng = RngState::new(8);
        for _ in 0..200 {
            let mu = rng.standard_normal_matrix(5, 4);
            let logvar = rng.standard_normal_matrix(5, 4).scale(2.0);
            let enc = EncoderOutput {
                z: mu.clone(),
                eps: Some(DenseMatrix::zeros(5, 4)),
                mu,
                logvar,
            };
            let logits = DenseMatrix::zeros(5, 5);
            let loss = compute_loss(&graph, &enc, &logits, &[0.5; 5]).unwrap();
            assert!(loss.kl >= 0.0, "kl = {}", loss.kl);
        }
    }

    #[test]
    fn flatten_round_trips() {
        for kind in [EncoderKind::Gcn, EncoderKind::Gat] {
            for diagonal in [false, true] {
                let mut rng = RngState::new(12);
                let params = ModelParams::init(Dims::new(3, 4, 2, 3), kind, diagonal, 1.0, &mut rng);
                let flat = params.flatten();
                let mut other =
                    ModelParams::init(Dims::new(3, 4, 2, 3), kind, diagonal, 1.0, &mut RngState::new(99));
                other.set_flat(&flat);
                assert_eq!(other.flatten(), flat);
                assert!(params.encoder_flat_len() < flat.len());
            }
        }
    }

    #[test]
    fn wrong_encoder_kind_is_rejected() {
        let graph = small_graph(2, 2, 3, 1);
        let params =
            ModelParams::init(Dims::new(3, 4, 2, 3), EncoderKind::Gcn, false, 1.0, &mut RngState::new(0));
        let err = gat_encode(&graph, &params.encoder, &mut RngState::new(1)).unwrap_err();
        assert!(matches!(err, ModelError::WrongEncoderKind { .. }));
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let graph = small_graph(2, 2, 5, 1); // feature dim 5
        let params =
            ModelParams::init(Dims::new(3, 4, 2, 3), EncoderKind::Gcn, false, 1.0, &mut RngState::new(0));
        let err = encode(&graph, &params.encoder, &mut RngState::new(1)).unwrap_err();
        assert!(matches!(err, ModelError::Shape { .. }));
    }
}
