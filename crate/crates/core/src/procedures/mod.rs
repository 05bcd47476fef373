//! Multiple-testing procedures: Bonferroni, Benjamini-Hochberg, Storey
//! q-values, weighted BH, naive independent hypothesis weighting, and
//! Boca-Leek regression-based null-proportion estimation.
//!
//! All procedures are pure functions of their inputs and return vectors in
//! input order. The step-up threshold is always computed as
//! `alpha * k / m` with the same expression so rejection sets nest exactly
//! (Bonferroni within BH within Storey) down to the bit level.

mod boca_leek;
mod ihw;

pub use boca_leek::{boca_leek, BocaLeekConfig};
pub use ihw::{ihw_naive, IhwConfig};

use crate::data::{DiscoveryResult, HypothesisSet, MethodExtras};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Step-up rejection plus monotone adjusted values for scores `q`.
///
/// Returns vectors in input order. Infinite scores (zero-weight hypotheses)
/// are never rejected and get adjusted value 1.
pub(crate) fn step_up(q: &[f64], alpha: f64) -> (Vec<bool>, Vec<f64>) {
    let m = q.len();
    if m == 0 {
        return (vec![], vec![]);
    }
    let mf = m as f64;
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| q[i].total_cmp(&q[j]));

    // Adjusted values: cumulative minimum of m*q/rank from the largest rank.
    let mut adjusted = vec![0.0; m];
    let mut running = 1.0_f64;
    for k in (0..m).rev() {
        let idx = order[k];
        let raw = mf * q[idx] / (k + 1) as f64;
        running = running.min(raw.min(1.0));
        adjusted[idx] = running;
    }

    // k* = max { k : q_(k) <= alpha*k/m }; reject everything at or below q_(k*).
    let mut threshold = None;
    for k in (1..=m).rev() {
        let t = alpha * k as f64 / mf;
        if q[order[k - 1]] <= t {
            threshold = Some(q[order[k - 1]]);
            break;
        }
    }
    let rejected = match threshold {
        Some(t) => q.iter().map(|&qi| qi <= t).collect(),
        None => vec![false; m],
    };
    (rejected, adjusted)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Validation(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    Ok(())
}

/// Bonferroni FWER control: reject `p_i <= alpha/m`.
pub fn bonferroni(h: &HypothesisSet, alpha: f64) -> Result<DiscoveryResult> {
    check_alpha(alpha)?;
    let p = h.p_values();
    let mf = p.len() as f64;
    let cut = alpha * 1.0 / mf;
    Ok(DiscoveryResult {
        rejected: p.iter().map(|&pi| pi <= cut).collect(),
        adjusted: p.iter().map(|&pi| (mf * pi).min(1.0)).collect(),
        alpha,
        method_tag: "bonferroni".into(),
        extras: MethodExtras::None,
    })
}

/// Benjamini-Hochberg step-up FDR control.
pub fn bh(h: &HypothesisSet, alpha: f64) -> Result<DiscoveryResult> {
    check_alpha(alpha)?;
    let (rejected, adjusted) = step_up(h.p_values(), alpha);
    Ok(DiscoveryResult {
        rejected,
        adjusted,
        alpha,
        method_tag: "bh".into(),
        extras: MethodExtras::None,
    })
}

/// BH on weighted scores `p_i / w_i`.
///
/// Weights must be nonnegative with mean 1 (the weight budget). A zero weight
/// sends the score to infinity: that hypothesis is never rejected, even at
/// `p = 0`.
pub fn weighted_bh(h: &HypothesisSet, weights: &[f64], alpha: f64) -> Result<DiscoveryResult> {
    check_alpha(alpha)?;
    let p = h.p_values();
    if weights.len() != p.len() {
        return Err(Error::Dimension(format!(
            "{} weights for {} hypotheses",
            weights.len(),
            p.len()
        )));
    }
    if let Some(bad) = weights.iter().position(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::Validation(format!(
            "weight at index {bad} is {}, must be finite and >= 0",
            weights[bad]
        )));
    }
    if !p.is_empty() {
        let mean = weights.iter().sum::<f64>() / p.len() as f64;
        if (mean - 1.0).abs() > 1e-9 {
            return Err(Error::Validation(format!(
                "weight budget violated: mean weight {mean} != 1"
            )));
        }
    }
    let q: Vec<f64> = p
        .iter()
        .zip(weights)
        .map(|(&pi, &wi)| if wi == 0.0 { f64::INFINITY } else { pi / wi })
        .collect();
    let (rejected, adjusted) = step_up(&q, alpha);
    Ok(DiscoveryResult {
        rejected,
        adjusted,
        alpha,
        method_tag: "weighted_bh".into(),
        extras: MethodExtras::None,
    })
}

fn check_lambda_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Validation("lambda grid is empty".into()));
    }
    for w in grid.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::Validation(
                "lambda grid must be strictly increasing".into(),
            ));
        }
    }
    if grid.iter().any(|&l| !(0.0 < l && l < 1.0)) {
        return Err(Error::Validation("lambda grid must lie in (0, 1)".into()));
    }
    Ok(())
}

/// Default Storey lambda grid `{0.05, 0.10, ..., 0.90}`.
pub fn storey_lambda_grid() -> Vec<f64> {
    (1..=18).map(|i| i as f64 * 0.05).collect()
}

/// Estimate the global null proportion from the p-value tail.
///
/// On a single-point grid this is the raw `#{p > lambda} / (m (1 - lambda))`
/// estimate; on a longer grid the estimates are smoothed with a cubic
/// least-squares fit in lambda and read off at the largest grid point.
/// Clamped to `[1/m, 1]`.
pub fn storey_pi0(h: &HypothesisSet, lambda_grid: &[f64]) -> Result<f64> {
    check_lambda_grid(lambda_grid)?;
    let p = h.p_values();
    let m = p.len();
    if m == 0 {
        return Err(Error::Validation("no hypotheses".into()));
    }
    let mf = m as f64;
    let raw: Vec<f64> = lambda_grid
        .iter()
        .map(|&l| p.iter().filter(|&&pi| pi > l).count() as f64 / (mf * (1.0 - l)))
        .collect();
    let floor = 1.0 / mf;
    if lambda_grid.len() == 1 {
        return Ok(raw[0].clamp(floor, 1.0));
    }
    let degree = 3.min(lambda_grid.len() - 1);
    let value = polyfit_eval(lambda_grid, &raw, degree, *lambda_grid.last().unwrap())?;
    Ok(value.clamp(floor, 1.0))
}

/// Storey q-values: BH adjusted values rescaled by the estimated pi0.
pub fn storey_qvalues(
    h: &HypothesisSet,
    alpha: f64,
    lambda_grid: &[f64],
) -> Result<DiscoveryResult> {
    check_alpha(alpha)?;
    if h.is_empty() {
        return Ok(DiscoveryResult {
            rejected: vec![],
            adjusted: vec![],
            alpha,
            method_tag: "storey".into(),
            extras: MethodExtras::Storey { pi0: 1.0 },
        });
    }
    let pi0 = storey_pi0(h, lambda_grid)?;
    let (_, bh_adjusted) = step_up(h.p_values(), alpha);
    // pi0 <= 1, so this keeps the BH monotone ordering and only shrinks.
    let adjusted: Vec<f64> = bh_adjusted.iter().map(|&a| (pi0 * a).min(1.0)).collect();
    let rejected = adjusted.iter().map(|&qv| qv <= alpha).collect();
    Ok(DiscoveryResult {
        rejected,
        adjusted,
        alpha,
        method_tag: "storey".into(),
        extras: MethodExtras::Storey { pi0 },
    })
}

/// Least-squares polynomial fit of `(xs, ys)` evaluated at `at`.
pub(crate) fn polyfit_eval(xs: &[f64], ys: &[f64], degree: usize, at: f64) -> Result<f64> {
    let coeffs = polyfit_weights(xs, degree, at)?;
    Ok(coeffs.iter().zip(ys).map(|(c, y)| c * y).sum())
}

/// Weights `c_j` such that the fitted polynomial value at `at` equals
/// `sum_j c_j * y_j` for any response vector. One linear solve, reusable
/// across many response series sharing the same grid.
pub(crate) fn polyfit_weights(xs: &[f64], degree: usize, at: f64) -> Result<Vec<f64>> {
    let n = xs.len();
    let k = degree + 1;
    if n < k {
        return Err(Error::Validation(format!(
            "{n} points cannot support a degree-{degree} fit"
        )));
    }
    // Design matrix T with rows (1, x, x^2, ...).
    let mut t = Matrix::zeros(n, k);
    for (i, &x) in xs.iter().enumerate() {
        let mut pow = 1.0;
        for j in 0..k {
            t.set(i, j, pow);
            pow *= x;
        }
    }
    let tt = t.transpose().matmul(&t)?;
    let mut e = Vec::with_capacity(k);
    let mut pow = 1.0;
    for _ in 0..k {
        e.push(pow);
        pow *= at;
    }
    let u = tt.solve_spd(&e)?;
    Ok((0..n).map(|i| crate::matrix::dot(t.row(i), &u)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hs(p: &[f64]) -> HypothesisSet {
        HypothesisSet::new(p.to_vec()).unwrap()
    }

    #[test]
    fn bonferroni_threshold_arithmetic() {
        // GWAS-scale threshold: 0.05 / 71994 ~ 6.945e-7.
        let m = 71_994;
        let mut p = vec![0.5; m];
        p[10] = 5e-7;
        let r = bonferroni(&hs(&p), 0.05).unwrap();
        assert!(r.rejected[10]);
        assert_eq!(r.discoveries(), 1);
    }

    #[test]
    fn bonferroni_boundary_is_inclusive() {
        let r = bonferroni(&hs(&[0.05]), 0.05).unwrap();
        assert!(r.rejected[0]);
    }

    #[test]
    fn bonferroni_null_case() {
        let r = bonferroni(&hs(&[0.5; 10]), 0.05).unwrap();
        assert_eq!(r.discoveries(), 0);
        assert!(r.adjusted.iter().all(|&a| a == 1.0));
    }

    #[test]
    fn bh_step_up_by_hand() {
        // p_(4) = 0.04 <= 4*0.05/5, so the first four are rejected.
        let r = bh(&hs(&[0.001, 0.01, 0.02, 0.04, 0.9]), 0.05).unwrap();
        assert_eq!(r.rejected, vec![true, true, true, true, false]);
    }

    #[test]
    fn bh_all_ones() {
        let r = bh(&hs(&[1.0; 6]), 0.05).unwrap();
        assert_eq!(r.discoveries(), 0);
        assert!(r.adjusted.iter().all(|&a| a == 1.0));
    }

    #[test]
    fn bh_dominates_bonferroni() {
        let p = [0.0001, 0.004, 0.009, 0.03, 0.2, 0.7];
        let b = bonferroni(&hs(&p), 0.05).unwrap();
        let s = bh(&hs(&p), 0.05).unwrap();
        for i in 0..p.len() {
            assert!(!b.rejected[i] || s.rejected[i]);
        }
    }

    #[test]
    fn bh_handles_ties_together() {
        let r = bh(&hs(&[0.02, 0.02, 0.02, 0.9]), 0.05).unwrap();
        assert_eq!(r.rejected, vec![true, true, true, false]);
        assert_eq!(r.adjusted[0], r.adjusted[1]);
        assert_eq!(r.adjusted[1], r.adjusted[2]);
    }

    #[test]
    fn weighted_bh_uniform_matches_bh() {
        let p = [0.001, 0.2, 0.04, 0.7, 0.03];
        let plain = bh(&hs(&p), 0.05).unwrap();
        let weighted = weighted_bh(&hs(&p), &[1.0; 5], 0.05).unwrap();
        assert_eq!(plain.rejected, weighted.rejected);
        // Bit-identical adjusted values.
        for (a, b) in plain.adjusted.iter().zip(&weighted.adjusted) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn weighted_bh_zero_weight_never_rejects() {
        // q = (0.02, inf): index 0 is rejected at rank 1 (0.02 <= 0.05/2).
        let r = weighted_bh(&hs(&[0.04, 0.5]), &[2.0, 0.0], 0.05).unwrap();
        assert_eq!(r.rejected, vec![true, false]);
        // Even p = 0 stays unrejected under weight 0.
        let r0 = weighted_bh(&hs(&[0.0, 0.0]), &[0.0, 2.0], 0.05).unwrap();
        assert_eq!(r0.rejected, vec![false, true]);
    }

    #[test]
    fn weighted_bh_contrast_with_uniform() {
        // Same p-values, uniform weights: nothing survives the step-up.
        let r = weighted_bh(&hs(&[0.04, 0.5]), &[1.0, 1.0], 0.05).unwrap();
        assert_eq!(r.discoveries(), 0);
    }

    #[test]
    fn weighted_bh_enforces_budget() {
        let r = weighted_bh(&hs(&[0.1, 0.2]), &[2.0, 1.5], 0.05);
        assert!(matches!(r, Err(Error::Validation(_))));
    }

    #[test]
    fn storey_pi0_fixed_lambda_count() {
        // 4/(4*0.5) = 2, clamped to 1.
        let pi0 = storey_pi0(&hs(&[0.6, 0.7, 0.8, 0.9]), &[0.5]).unwrap();
        assert_eq!(pi0, 1.0);
    }

    #[test]
    fn storey_pi0_floor_clamp() {
        // Everything below the smallest lambda: estimate collapses to 1/m.
        let p = [0.001, 0.002, 0.003, 0.004];
        let pi0 = storey_pi0(&hs(&p), &storey_lambda_grid()).unwrap();
        assert_eq!(pi0, 1.0 / 4.0);
    }

    #[test]
    fn storey_pi0_uniform_null_near_one() {
        let m = 10_000;
        let p: Vec<f64> = (1..=m).map(|i| i as f64 / (m + 1) as f64).collect();
        let pi0 = storey_pi0(&hs(&p), &storey_lambda_grid()).unwrap();
        assert!((pi0 - 1.0).abs() < 0.02, "pi0 = {pi0}");
    }

    #[test]
    fn storey_reduces_to_bh_when_pi0_is_one() {
        // Uniform grid p-values force pi0 to clamp at 1.
        let p: Vec<f64> = (1..=200).map(|i| i as f64 / 201.0).collect();
        let q = storey_qvalues(&hs(&p), 0.05, &storey_lambda_grid()).unwrap();
        let b = bh(&hs(&p), 0.05).unwrap();
        assert_eq!(q.rejected, b.rejected);
    }

    #[test]
    fn storey_rejections_contain_bh() {
        let p = [0.001, 0.004, 0.011, 0.03, 0.5, 0.6, 0.9, 0.95, 0.2, 0.7];
        let q = storey_qvalues(&hs(&p), 0.05, &storey_lambda_grid()).unwrap();
        let b = bh(&hs(&p), 0.05).unwrap();
        for i in 0..p.len() {
            assert!(!b.rejected[i] || q.rejected[i]);
        }
        if let MethodExtras::Storey { pi0 } = q.extras {
            assert!(pi0 <= 1.0 && pi0 >= 1.0 / p.len() as f64);
        } else {
            panic!("wrong extras");
        }
    }

    #[test]
    fn empty_and_single_hypothesis() {
        let empty = hs(&[]);
        assert_eq!(bh(&empty, 0.05).unwrap().discoveries(), 0);
        assert_eq!(bonferroni(&empty, 0.05).unwrap().discoveries(), 0);
        let one = hs(&[0.01]);
        assert!(bh(&one, 0.05).unwrap().rejected[0]);
        assert!(bonferroni(&one, 0.05).unwrap().rejected[0]);
        assert!(
            storey_qvalues(&one, 0.05, &storey_lambda_grid())
                .unwrap()
                .rejected[0]
        );
    }

    #[test]
    fn alpha_is_validated() {
        let h = hs(&[0.1]);
        assert!(bh(&h, 0.0).is_err());
        assert!(bh(&h, 1.0).is_err());
        assert!(storey_qvalues(&h, 0.05, &[]).is_err());
        assert!(storey_pi0(&h, &[0.5, 0.4]).is_err());
    }

    #[test]
    fn polyfit_reproduces_exact_polynomial() {
        let xs: Vec<f64> = (0..10).map(|i| 0.05 + 0.1 * i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| 2.0 - x + 0.5 * x * x * x).collect();
        let v = polyfit_eval(&xs, &ys, 3, 0.95).unwrap();
        let want = 2.0 - 0.95 + 0.5 * 0.95_f64.powi(3);
        assert!((v - want).abs() < 1e-10);
    }
}
