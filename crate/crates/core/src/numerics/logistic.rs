//! Logistic regression by iteratively reweighted least squares.

use crate::error::{Error, Result};
use crate::matrix::Matrix;

const MAX_ITERATIONS: usize = 100;
const SCORE_TOL: f64 = 1e-8;
const STEP_TOL: f64 = 1e-10;
// Ridge jitter on the weighted normal equations; LD-score covariates are
// collinear by construction and would otherwise make the solve singular.
const RIDGE: f64 = 1e-10;
// Coefficients running past this while the likelihood still improves means
// the classes are (quasi-)separable and the MLE does not exist.
const SEPARATION_NORM: f64 = 1e3;

const PROB_FLOOR: f64 = 1e-6;

/// Fitted logistic model. `coefficients[0]` is the intercept.
#[derive(Debug, Clone)]
pub struct LogisticFit {
    pub coefficients: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
}

impl LogisticFit {
    /// Fitted probability for one covariate row (without intercept entry).
    ///
    /// Probabilities are clamped to `[1e-6, 1 - 1e-6]`, which also covers the
    /// degenerate all-0/all-1 responses where the unclamped fit diverges.
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut eta = self.coefficients[0];
        for (b, v) in self.coefficients[1..].iter().zip(x) {
            eta += b * v;
        }
        sigmoid(eta).clamp(PROB_FLOOR, 1.0 - PROB_FLOOR)
    }

    /// Fitted probabilities for every row of `x`.
    pub fn predict_rows(&self, x: &Matrix) -> Vec<f64> {
        (0..x.rows()).map(|i| self.predict(x.row(i))).collect()
    }
}

#[inline]
fn sigmoid(eta: f64) -> f64 {
    if eta >= 0.0 {
        1.0 / (1.0 + (-eta).exp())
    } else {
        let e = eta.exp();
        e / (1.0 + e)
    }
}

fn log_likelihood(x: &Matrix, y: &[f64], beta: &[f64]) -> f64 {
    let mut ll = 0.0;
    for (i, &yi) in y.iter().enumerate() {
        let mut eta = beta[0];
        for (b, v) in beta[1..].iter().zip(x.row(i)) {
            eta += b * v;
        }
        // log sigma(eta) = -log(1 + exp(-eta)), stable in both tails
        let log_mu = -softplus(-eta);
        let log_one_minus = -softplus(eta);
        ll += yi * log_mu + (1.0 - yi) * log_one_minus;
    }
    ll
}

#[inline]
fn softplus(x: f64) -> f64 {
    if x > 30.0 {
        x
    } else {
        x.exp().ln_1p()
    }
}

/// Fit `y ~ intercept + x` by IRLS with step halving.
///
/// Converges when the score max-norm drops below 1e-8 or the step max-norm
/// below 1e-10. Separated data comes back flagged `converged: false` rather
/// than as an error; predictions stay usable through clamping.
pub fn logistic_fit(x: &Matrix, y: &[u8]) -> Result<LogisticFit> {
    let m = x.rows();
    let d = x.cols();
    if y.len() != m {
        return Err(Error::Dimension(format!(
            "response length {} != {} rows",
            y.len(),
            m
        )));
    }
    if m <= d + 1 {
        return Err(Error::Validation(format!(
            "need m > d + 1 rows, got m = {m}, d = {d}"
        )));
    }
    if y.iter().any(|&v| v > 1) {
        return Err(Error::Validation("response must be 0/1".into()));
    }
    let yf: Vec<f64> = y.iter().map(|&v| v as f64).collect();

    // A constant response has no finite MLE; pin the intercept at the clamped
    // mean and report the fit as not converged.
    let mean_y = yf.iter().sum::<f64>() / m as f64;
    if mean_y == 0.0 || mean_y == 1.0 {
        let clamped = mean_y.clamp(PROB_FLOOR, 1.0 - PROB_FLOOR);
        let mut coefficients = vec![0.0; d + 1];
        coefficients[0] = (clamped / (1.0 - clamped)).ln();
        return Ok(LogisticFit {
            coefficients,
            converged: false,
            iterations: 0,
        });
    }

    let p = d + 1;
    let mut beta = vec![0.0; p];
    let mut ll = log_likelihood(x, &yf, &beta);
    let mut converged = false;
    let mut iterations = 0;

    for iter in 1..=MAX_ITERATIONS {
        iterations = iter;

        // Score g = X^T (y - mu) and information X^T W X, accumulated rowwise.
        let mut score = vec![0.0; p];
        let mut info = Matrix::zeros(p, p);
        let mut xrow = vec![0.0; p];
        for i in 0..m {
            xrow[0] = 1.0;
            xrow[1..].copy_from_slice(x.row(i));
            let mut eta = 0.0;
            for (b, v) in beta.iter().zip(&xrow) {
                eta += b * v;
            }
            let mu = sigmoid(eta);
            let w = (mu * (1.0 - mu)).max(1e-10);
            let resid = yf[i] - mu;
            for a in 0..p {
                score[a] += xrow[a] * resid;
                for b in a..p {
                    info.set(a, b, info.get(a, b) + w * xrow[a] * xrow[b]);
                }
            }
        }
        for a in 0..p {
            for b in 0..a {
                info.set(a, b, info.get(b, a));
            }
            // Jitter scales with the diagonal so it dominates rounding noise
            // even when covariates are collinear.
            info.set(a, a, info.get(a, a) + RIDGE * info.get(a, a).max(1.0));
        }

        let score_norm = score.iter().fold(0.0_f64, |acc, s| acc.max(s.abs()));
        if score_norm <= SCORE_TOL {
            converged = true;
            break;
        }

        let delta = match info.solve_spd(&score) {
            Ok(d) => d,
            Err(_) => {
                // Escalate once for pathologically conditioned designs.
                let mut bumped = info.clone();
                for a in 0..p {
                    bumped.set(a, a, bumped.get(a, a) + 1e-6 * bumped.get(a, a).max(1.0));
                }
                bumped.solve_spd(&score)?
            }
        };

        // Step halving keeps the likelihood nondecreasing.
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..32 {
            let trial: Vec<f64> = beta
                .iter()
                .zip(&delta)
                .map(|(b, d)| b + step * d)
                .collect();
            let trial_ll = log_likelihood(x, &yf, &trial);
            if trial_ll >= ll - 1e-12 {
                let step_norm = delta
                    .iter()
                    .fold(0.0_f64, |acc, d| acc.max((step * d).abs()));
                beta = trial;
                ll = trial_ll;
                accepted = true;
                if step_norm <= STEP_TOL {
                    converged = true;
                }
                break;
            }
            step *= 0.5;
        }
        if !accepted || converged {
            break;
        }

        let norm = beta.iter().map(|b| b * b).sum::<f64>().sqrt();
        if norm > SEPARATION_NORM {
            converged = false;
            break;
        }
    }

    Ok(LogisticFit {
        coefficients: beta,
        converged,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn intercept_only_closed_form() {
        // A zero covariate column leaves only the intercept; the MLE is
        // logit(mean(y)).
        let m = 400;
        let x = Matrix::zeros(m, 1);
        let y: Vec<u8> = (0..m).map(|i| u8::from(i % 4 == 0)).collect();
        let fit = logistic_fit(&x, &y).unwrap();
        assert!(fit.converged);
        let expected = (0.25_f64 / 0.75).ln();
        assert!(
            (fit.coefficients[0] - expected).abs() < 1e-6,
            "intercept {} vs {}",
            fit.coefficients[0],
            expected
        );
        assert!(fit.coefficients[1].abs() < 1e-6);
    }

    #[test]
    fn degenerate_response_flags_not_converged() {
        let m = 50;
        let mut x = Matrix::zeros(m, 1);
        for i in 0..m {
            x.set(i, 0, i as f64 / m as f64);
        }
        let y = vec![0u8; m];
        let fit = logistic_fit(&x, &y).unwrap();
        assert!(!fit.converged);
        for i in 0..m {
            let p = fit.predict(x.row(i));
            assert!((1e-6..=1.0 - 1e-6).contains(&p));
        }
    }

    #[test]
    fn recovers_planted_coefficients() {
        let m = 50_000;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut x = Matrix::zeros(m, 2);
        let mut y = vec![0u8; m];
        let (b0, b1, b2) = (0.25, 0.5, -1.0);
        for i in 0..m {
            let x1: f64 = rng.random::<f64>() * 2.0 - 1.0;
            let x2: f64 = rng.random::<f64>() * 2.0 - 1.0;
            x.set(i, 0, x1);
            x.set(i, 1, x2);
            let p = sigmoid(b0 + b1 * x1 + b2 * x2);
            y[i] = u8::from(rng.random::<f64>() < p);
        }
        let fit = logistic_fit(&x, &y).unwrap();
        assert!(fit.converged);
        assert!((fit.coefficients[0] - b0).abs() < 0.05);
        assert!((fit.coefficients[1] - b1).abs() < 0.05);
        assert!((fit.coefficients[2] - b2).abs() < 0.05);
    }

    #[test]
    fn separable_data_is_flagged() {
        let m = 60;
        let mut x = Matrix::zeros(m, 1);
        let mut y = vec![0u8; m];
        for i in 0..m {
            let v = i as f64 - 30.0;
            x.set(i, 0, v);
            y[i] = u8::from(v > 0.0);
        }
        let fit = logistic_fit(&x, &y).unwrap();
        assert!(!fit.converged);
        for i in 0..m {
            let p = fit.predict(x.row(i));
            assert!(p.is_finite() && (1e-6..=1.0 - 1e-6).contains(&p));
        }
    }

    #[test]
    fn likelihood_nondecreasing_over_iterations() {
        // Re-run the fit manually, checking the invariant step by step.
        let m = 500;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut x = Matrix::zeros(m, 2);
        let mut y = vec![0u8; m];
        for i in 0..m {
            let x1: f64 = rng.random::<f64>() * 2.0 - 1.0;
            let x2: f64 = rng.random::<f64>() * 2.0 - 1.0;
            x.set(i, 0, x1);
            x.set(i, 1, x2);
            y[i] = u8::from(rng.random::<f64>() < sigmoid(0.3 + x1 - 0.5 * x2));
        }
        let yf: Vec<f64> = y.iter().map(|&v| v as f64).collect();
        let fit = logistic_fit(&x, &y).unwrap();
        // Fitted likelihood dominates the null model.
        assert!(log_likelihood(&x, &yf, &fit.coefficients) >= log_likelihood(&x, &yf, &[0.0; 3]));

        let err_small = logistic_fit(&Matrix::zeros(2, 2), &[0, 1]);
        assert!(err_small.is_err());
    }
}
