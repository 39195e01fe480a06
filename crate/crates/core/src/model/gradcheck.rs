//! Finite-difference validation of the hand-derived gradients.
//!
//! The analytic backward pass reverses the discriminator gradient on its way
//! into the encoder, so the scalar objective probed by the oracle differs by
//! parameter block: encoder coordinates differentiate
//! `recon + kl - grl_lambda * dis`, all remaining coordinates differentiate
//! the plain total `recon + kl + dis`. Everything else (noise included) is
//! held fixed while each coordinate is perturbed.

use crate::graph::ConceptGraph;
use crate::numeric::{finite_diff_grad, gradient_rel_err, DenseMatrix};

use super::{backward, loss_with_fixed_noise, ModelParams, Result};

/// Outcome of one gradient check.
#[derive(Debug, Clone)]
pub struct GradCheckReport {
    pub max_rel_err: f64,
    /// Flat index of the worst coordinate.
    pub worst_index: usize,
    pub param_count: usize,
}

impl GradCheckReport {
    pub fn passes(&self, tolerance: f64) -> bool {
        self.max_rel_err < tolerance
    }
}

/// Smallest distance of any piecewise-linear activation from its kink.
///
/// Central differences are only a valid derivative oracle when the loss is
/// differentiable across the whole perturbation interval. ReLU and the
/// attention LeakyReLU introduce kinks; when a pre-activation sits within
/// roughly `fd_eps * |local slope|` of zero, the two-sided difference
/// straddles the kink and disagrees with the (one-sided) analytic gradient.
/// Suites should skip configurations whose margin is below a safety bound
/// (see [`KINK_MARGIN`]) and draw a fresh seed instead.
pub fn kink_margin(
    graph: &ConceptGraph,
    params: &ModelParams,
    eps_noise: &DenseMatrix,
) -> Result<f64> {
    let enc = super::encode_with_noise(graph, &params.encoder, eps_noise)?;
    let mut margin = f64::INFINITY;
    // Hidden-layer ReLU.
    for &v in super::encode_pre_activations(graph, &params.encoder)?.iter() {
        margin = margin.min(v.abs());
    }
    // Discriminator ReLU.
    let (hidden_pre, _, _) = super::discriminate_detailed(&enc.z, &params.discriminator)?;
    for &v in hidden_pre.values() {
        margin = margin.min(v.abs());
    }
    Ok(margin)
}

/// Pre-activation distance below which a configuration is considered to sit
/// on a kink for gradient-checking purposes.
pub const KINK_MARGIN: f64 = 1e-3;

/// Compare [`backward`] with central finite differences at `params`.
pub fn gradient_check(
    graph: &ConceptGraph,
    params: &ModelParams,
    eps_noise: &DenseMatrix,
    fd_eps: f64,
) -> Result<GradCheckReport> {
    let enc = super::encode_with_noise(graph, &params.encoder, eps_noise)?;
    let analytic = backward(graph, params, &enc)?.flatten();

    let flat = params.flatten();
    let encoder_len = params.encoder_flat_len();
    let grl_lambda = params.discriminator.grl_lambda;
    let mut scratch = params.clone();

    // Two oracles over the same forward pass, selected per coordinate below.
    let mut loss_for = |flat_params: &[f64], encoder_block: bool| -> f64 {
        scratch.set_flat(flat_params);
        let breakdown =
            loss_with_fixed_noise(graph, &scratch, eps_noise).expect("forward during gradcheck");
        if encoder_block {
            breakdown.recon + breakdown.kl - grl_lambda * breakdown.dis
        } else {
            breakdown.total
        }
    };

    let numeric_encoder = finite_diff_grad(|p| loss_for(p, true), &flat, fd_eps)?;
    let numeric_rest = finite_diff_grad(|p| loss_for(p, false), &flat, fd_eps)?;

    let mut max_rel_err = 0.0;
    let mut worst_index = 0;
    for i in 0..flat.len() {
        let numeric = if i < encoder_len {
            numeric_encoder[i]
        } else {
            numeric_rest[i]
        };
        let err = gradient_rel_err(analytic[i], numeric);
        if err > max_rel_err {
            max_rel_err = err;
            worst_index = i;
        }
    }
    Ok(GradCheckReport {
        max_rel_err,
        worst_index,
        param_count: flat.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::super::test_support::small_graph;
    use super::super::{Dims, EncoderKind};
    use super::*;
    use crate::numeric::RngState;

    /// First seed at or after `start` whose configuration keeps every
    /// pre-activation clear of a kink, then run the check there.
    fn check(kind: EncoderKind, grl_lambda: f64, diagonal: bool, start: u64) -> GradCheckReport {
        for seed in start.. {
            let graph = small_graph(3, 3, 4, seed);
            let dims = Dims::new(4, 8, 4, 4);
            let mut rng = RngState::new(seed.wrapping_add(100));
            let params = ModelParams::init(dims, kind, diagonal, grl_lambda, &mut rng);
            let eps_noise = RngState::new(seed.wrapping_add(200)).standard_normal_matrix(6, 4);
            if kink_margin(&graph, &params, &eps_noise).unwrap() < KINK_MARGIN {
                continue;
            }
            return gradient_check(&graph, &params, &eps_noise, 1e-5).unwrap();
        }
        unreachable!()
    }

    #[test]
    fn gcn_gradients_match_finite_differences() {
        for (lambda, seed) in [(0.0, 1u64), (1.0, 2)] {
            let report = check(EncoderKind::Gcn, lambda, false, seed);
            assert!(
                report.passes(1e-4),
                "lambda {lambda}: max rel err {} at {}",
                report.max_rel_err,
                report.worst_index
            );
        }
    }

    #[test]
    fn gat_gradients_match_finite_differences() {
        for (lambda, seed) in [(0.0, 3u64), (1.0, 4)] {
            let report = check(EncoderKind::Gat, lambda, false, seed);
            assert!(
                report.passes(1e-4),
                "lambda {lambda}: max rel err {} at {}",
                report.max_rel_err,
                report.worst_index
            );
        }
    }

    #[test]
    fn diagonal_relation_matrix_gradients_match() {
        let report = check(EncoderKind::Gcn, 1.0, true, 5);
        assert!(report.passes(1e-4), "max rel err {}", report.max_rel_err);
    }

    #[test]
    fn literal_summed_loss_via_negative_lambda_matches() {
        // grl_lambda = -1 couples the encoder to *help* the discriminator,
        // which is the literal unreversed sum; gradients must still check out.
        let report = check(EncoderKind::Gcn, -1.0, false, 6);
        assert!(report.passes(1e-4), "max rel err {}", report.max_rel_err);
    }

    #[test]
    fn kink_margin_flags_exact_zero_pre_activation() {
        let graph = small_graph(3, 3, 4, 1);
        let mut rng = RngState::new(50);
        let mut params = ModelParams::init(Dims::new(4, 8, 4, 4), EncoderKind::Gcn, false, 1.0, &mut rng);
        // Zeroing w0 parks every hidden pre-activation exactly on the ReLU kink.
        for v in params.encoder.w0.values_mut() {
            *v = 0.0;
        }
        let eps_noise = RngState::new(51).standard_normal_matrix(6, 4);
        assert_eq!(kink_margin(&graph, &params, &eps_noise).unwrap(), 0.0);
    }
}
