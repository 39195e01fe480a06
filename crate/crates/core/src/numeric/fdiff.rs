//! Central-difference gradient oracle.
//!
//! Used by the test suites and the `gradcheck` command to validate every
//! hand-derived gradient in the model.

use super::{NumericError, Result};

/// Central finite differences of `loss` at `params`:
/// `(loss(p + eps*e_i) - loss(p - eps*e_i)) / (2*eps)` per coordinate.
///
/// Fails if `eps <= 0` or `loss` ever returns a non-finite value.
pub fn finite_diff_grad(
    mut loss: impl FnMut(&[f64]) -> f64,
    params: &[f64],
    eps: f64,
) -> Result<Vec<f64>> {
    if !(eps > 0.0) {
        return Err(NumericError::InvalidArgument {
            context: "finite_diff_grad",
            message: format!("eps must be positive, got {eps}"),
        });
    }
    let mut work = params.to_vec();
    let mut grad = Vec::with_capacity(params.len());
    for i in 0..params.len() {
        let orig = work[i];
        work[i] = orig + eps;
        let up = loss(&work);
        work[i] = orig - eps;
        let down = loss(&work);
        work[i] = orig;
        if !up.is_finite() || !down.is_finite() {
            return Err(NumericError::NonFinite {
                context: "finite_diff_grad",
            });
        }
        grad.push((up - down) / (2.0 * eps));
    }
    Ok(grad)
}

/// Relative error between an analytic and a numerical gradient entry.
///
/// `|a - b| / max(|a|, |b|, 1e-6)`; the floor keeps near-zero pairs from
/// amplifying finite-difference round-off into spurious mismatches.
pub fn gradient_rel_err(analytic: f64, numerical: f64) -> f64 {
    (analytic - numerical).abs() / analytic.abs().max(numerical.abs()).max(1e-6)
}

/// Largest per-coordinate [`gradient_rel_err`] over two gradient vectors.
pub fn max_gradient_rel_err(analytic: &[f64], numerical: &[f64]) -> f64 {
    assert_eq!(analytic.len(), numerical.len());
    analytic
        .iter()
        .zip(numerical)
        .map(|(&a, &n)| gradient_rel_err(a, n))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_matches_analytic_derivative() {
        // d/dp p^2 = 2p = 6 at p = 3.
        let grad = finite_diff_grad(|p| p[0] * p[0], &[3.0], 1e-5).unwrap();
        assert!((grad[0] - 6.0).abs() < 1e-6, "got {}", grad[0]);
    }

    #[test]
    fn constant_loss_has_zero_gradient() {
        let grad = finite_diff_grad(|_| 4.25, &[1.0, -2.0, 0.5], 1e-5).unwrap();
        assert!(grad.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn sum_loss_has_unit_gradient() {
        let grad = finite_diff_grad(|p| p.iter().sum(), &[0.3, -1.0, 7.0, 2.0], 1e-5).unwrap();
        for g in grad {
            assert!((g - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_non_positive_eps() {
        assert!(finite_diff_grad(|p| p[0], &[1.0], 0.0).is_err());
        assert!(finite_diff_grad(|p| p[0], &[1.0], -1e-5).is_err());
    }

    #[test]
    fn rejects_non_finite_loss() {
        let err = finite_diff_grad(|p| (p[0] - 1.0).ln(), &[1.0], 1e-5).unwrap_err();
        assert!(matches!(err, NumericError::NonFinite { .. }));
    }

    #[test]
    fn trig_matches_analytic_within_spec_tolerance() {
        // d/dx sin(x) = cos(x), checked at a few points with eps = 1e-5.
        for &x in &[0.3, 1.2, -2.4] {
            let grad = finite_diff_grad(|p| p[0].sin(), &[x], 1e-5).unwrap();
            assert!(gradient_rel_err(x.cos(), grad[0]) < 1e-4);
        }
    }
}
