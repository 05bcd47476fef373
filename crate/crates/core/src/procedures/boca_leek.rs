//! Boca-Leek covariate-conditional null-proportion estimation.
//!
//! For a grid of thresholds lambda, the indicator `p_i > lambda` is regressed
//! on the covariates by logistic regression; dividing the fitted values by
//! `1 - lambda` estimates pi0 conditional on the covariates. The estimates
//! are smoothed over lambda per hypothesis and plugged into the BH adjusted
//! p-values to form a covariate-aware FDR estimate.

use crate::data::{DiscoveryResult, HypothesisSet, MethodExtras};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::numerics::logistic::logistic_fit;
use crate::par;
use crate::procedures::{polyfit_weights, step_up};
use crate::CovariateMatrix;

/// Configuration for [`boca_leek`].
#[derive(Debug, Clone)]
pub struct BocaLeekConfig {
    /// Thresholds used for the indicator regressions; strictly increasing,
    /// inside (0, 1).
    pub lambda_grid: Vec<f64>,
    /// Degree of the per-hypothesis polynomial smoother over lambda.
    pub smoothing_degree: usize,
    /// Nominal FDR level.
    pub alpha: f64,
}

impl Default for BocaLeekConfig {
    fn default() -> Self {
        BocaLeekConfig {
            lambda_grid: (1..=19).map(|i| i as f64 * 0.05).collect(),
            smoothing_degree: 3,
            alpha: 0.05,
        }
    }
}

/// Run the Boca-Leek procedure with covariates `x`.
///
/// `x` may hold a single column (the per-axis sweeps used in evaluation) or
/// several. Non-converged threshold regressions are tolerated: predictions
/// are clamped and the affected lambda is flagged in the extras.
pub fn boca_leek(
    h: &HypothesisSet,
    x: &CovariateMatrix,
    cfg: &BocaLeekConfig,
) -> Result<DiscoveryResult> {
    let m = h.len();
    if x.n_rows() != m {
        return Err(Error::Dimension(format!(
            "covariate rows {} != m = {}",
            x.n_rows(),
            m
        )));
    }
    if !(cfg.alpha > 0.0 && cfg.alpha < 1.0) {
        return Err(Error::Validation(format!(
            "alpha must lie in (0, 1), got {}",
            cfg.alpha
        )));
    }
    if cfg.lambda_grid.is_empty() {
        return Err(Error::Validation("lambda grid is empty".into()));
    }
    if cfg
        .lambda_grid
        .windows(2)
        .any(|w| w[1] <= w[0])
        || cfg.lambda_grid.iter().any(|&l| !(0.0 < l && l < 1.0))
    {
        return Err(Error::Validation(
            "lambda grid must be strictly increasing inside (0, 1)".into(),
        ));
    }
    if m == 0 {
        return Ok(DiscoveryResult {
            rejected: vec![],
            adjusted: vec![],
            alpha: cfg.alpha,
            method_tag: "boca_leek".into(),
            extras: MethodExtras::BocaLeek {
                pi0: vec![],
                lambda_fits_converged: vec![],
            },
        });
    }

    let p = h.p_values();
    let design: &Matrix = x.values();

    // One logistic regression per lambda; the fits are independent.
    let n_lambda = cfg.lambda_grid.len();
    let grid = &cfg.lambda_grid;
    let fits: Vec<Result<(Vec<f64>, bool)>> = par::map_indexed(n_lambda, |j| {
        let lambda = grid[j];
        let y: Vec<u8> = p.iter().map(|&pi| u8::from(pi > lambda)).collect();
        let fit = logistic_fit(design, &y)?;
        let scale = 1.0 / (1.0 - lambda);
        let pi0_lambda: Vec<f64> = fit
            .predict_rows(design)
            .into_iter()
            .map(|mu| mu * scale)
            .collect();
        Ok((pi0_lambda, fit.converged))
    });

    let mut per_lambda = Vec::with_capacity(n_lambda);
    let mut converged = Vec::with_capacity(n_lambda);
    for fit in fits {
        let (values, ok) = fit?;
        per_lambda.push(values);
        converged.push(ok);
    }

    // Per-hypothesis smoothing over lambda reduces to one shared coefficient
    // vector: the least-squares evaluation at the largest lambda is linear in
    // the responses.
    let degree = cfg.smoothing_degree.min(n_lambda - 1);
    let eval_at = *grid.last().unwrap();
    let coeffs = polyfit_weights(grid, degree, eval_at)?;

    let floor = 1.0 / m as f64;
    let pi0: Vec<f64> = (0..m)
        .map(|i| {
            let v: f64 = coeffs
                .iter()
                .zip(&per_lambda)
                .map(|(c, col)| c * col[i])
                .sum();
            v.clamp(floor, 1.0)
        })
        .collect();

    let (_, bh_adjusted) = step_up(p, cfg.alpha);
    let adjusted: Vec<f64> = bh_adjusted
        .iter()
        .zip(&pi0)
        .map(|(&a, &z)| (z * a).min(1.0))
        .collect();
    let rejected = adjusted.iter().map(|&f| f <= cfg.alpha).collect();

    Ok(DiscoveryResult {
        rejected,
        adjusted,
        alpha: cfg.alpha,
        method_tag: "boca_leek".into(),
        extras: MethodExtras::BocaLeek {
            pi0,
            lambda_fits_converged: converged,
        },
    })
}
