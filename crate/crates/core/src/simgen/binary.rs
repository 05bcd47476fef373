//! Correlated binary sampling by dichotomizing a latent Gaussian.
//!
//! Each pairwise latent correlation is solved so that thresholding the latent
//! normals at the marginal quantiles reproduces the requested binary
//! correlation. The assembled latent matrix is nudged to the nearest positive
//! definite matrix when the pairwise solves leave it slightly indefinite.

use std::collections::HashMap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::numerics::eigen::sym_eigen;
use crate::numerics::normal::{bivariate_norm_cdf, norm_quantile};
use crate::numerics::sample_std_normal;

/// Marginals and target correlation for the binary vector.
#[derive(Debug, Clone)]
pub struct BinaryGenSpec {
    pub marginals: Vec<f64>,
    pub target_corr: Matrix,
}

impl BinaryGenSpec {
    pub fn new(marginals: Vec<f64>, target_corr: Matrix) -> Result<Self> {
        let d = marginals.len();
        if d == 0 {
            return Err(Error::Validation("need at least one component".into()));
        }
        if marginals.iter().any(|&p| !(0.0 < p && p < 1.0)) {
            return Err(Error::Validation("marginals must lie in (0, 1)".into()));
        }
        if target_corr.rows() != d || target_corr.cols() != d {
            return Err(Error::Dimension(format!(
                "correlation matrix is {}x{}, expected {d}x{d}",
                target_corr.rows(),
                target_corr.cols()
            )));
        }
        if target_corr.asymmetry() > 1e-12 {
            return Err(Error::Validation("correlation matrix not symmetric".into()));
        }
        for i in 0..d {
            if (target_corr.get(i, i) - 1.0).abs() > 1e-12 {
                return Err(Error::Validation("correlation diagonal must be 1".into()));
            }
            for j in 0..d {
                if i != j && target_corr.get(i, j).abs() >= 1.0 {
                    return Err(Error::Validation(
                        "off-diagonal correlations must lie in (-1, 1)".into(),
                    ));
                }
            }
        }
        Ok(BinaryGenSpec {
            marginals,
            target_corr,
        })
    }

    /// `d` components with identical marginal `p` and geometrically decaying
    /// correlation `base^|j - k|`.
    pub fn decaying(d: usize, p: f64, base: f64) -> Result<Self> {
        let mut corr = Matrix::identity(d);
        for i in 0..d {
            for j in 0..d {
                if i != j {
                    corr.set(i, j, base.powi((i as i32 - j as i32).abs()));
                }
            }
        }
        BinaryGenSpec::new(vec![p; d], corr)
    }
}

/// Latent Gaussian correlation reproducing binary correlation `r_target`
/// between `Bernoulli(p_j)` and `Bernoulli(p_k)` after dichotomization.
///
/// Bisection on the bivariate normal orthant probability, to 1e-8 on the
/// probability scale.
pub fn latent_corr_solve(p_j: f64, p_k: f64, r_target: f64) -> Result<f64> {
    if !(0.0 < p_j && p_j < 1.0 && 0.0 < p_k && p_k < 1.0) {
        return Err(Error::Domain("marginals must lie in (0, 1)".into()));
    }
    if r_target == 0.0 {
        return Ok(0.0);
    }
    let q_j = 1.0 - p_j;
    let q_k = 1.0 - p_k;
    let scale = (p_j * q_j * p_k * q_k).sqrt();
    // Frechet bounds on the joint success probability limit the attainable
    // correlation.
    let lower = ((p_j + p_k - 1.0).max(0.0) - p_j * p_k) / scale;
    let upper = (p_j.min(p_k) - p_j * p_k) / scale;
    if r_target <= lower || r_target >= upper {
        return Err(Error::Feasibility(format!(
            "correlation {r_target} outside the attainable range ({lower:.6}, {upper:.6}) \
             for marginals ({p_j}, {p_k})"
        )));
    }

    let target_p11 = r_target * scale + p_j * p_k;
    let z_j = norm_quantile(p_j)?;
    let z_k = norm_quantile(p_k)?;

    let mut lo = -1.0 + 1e-12;
    let mut hi = 1.0 - 1e-12;
    let mut mid = 0.0;
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        let value = bivariate_norm_cdf(z_j, z_k, mid)?;
        let err = value - target_p11;
        if err.abs() <= 1e-8 && (hi - lo) < 1e-9 {
            return Ok(mid);
        }
        // The orthant probability is increasing in the latent correlation.
        if err < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(mid)
}

/// Sampled binary matrix plus PSD-repair metadata.
#[derive(Debug, Clone)]
pub struct BinarySample {
    n_rows: usize,
    d: usize,
    data: Vec<u8>,
    /// Largest entry shift applied by the PSD repair (0 when none needed).
    pub max_latent_shift: f64,
    /// Set when the repair moved some latent entry by more than 0.05.
    pub repair_warning: bool,
}

impl BinarySample {
    #[inline]
    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u8] {
        &self.data[i * self.d..(i + 1) * self.d]
    }
}

/// Precomputed latent threshold/Cholesky pair, reusable across draws.
#[derive(Debug, Clone)]
pub struct LatentModel {
    thresholds: Vec<f64>,
    chol: Matrix,
    max_shift: f64,
}

/// Solve all pairwise latent correlations and factor the latent matrix.
pub fn build_latent_model(spec: &BinaryGenSpec) -> Result<LatentModel> {
    let d = spec.marginals.len();
    let mut latent = Matrix::identity(d);
    // Identical (p_j, p_k, r) pairs share one bisection; the decaying-lag
    // matrix has only d-1 distinct targets.
    let mut cache: HashMap<(u64, u64, u64), f64> = HashMap::new();
    for i in 0..d {
        for j in (i + 1)..d {
            let (p_a, p_b) = (spec.marginals[i], spec.marginals[j]);
            let r = spec.target_corr.get(i, j);
            let key = (p_a.to_bits(), p_b.to_bits(), r.to_bits());
            let rho = match cache.get(&key) {
                Some(&v) => v,
                None => {
                    let v = latent_corr_solve(p_a, p_b, r)?;
                    cache.insert(key, v);
                    v
                }
            };
            latent.set(i, j, rho);
            latent.set(j, i, rho);
        }
    }

    // Pairwise solves do not guarantee joint positive definiteness; clip the
    // spectrum and restore the unit diagonal if needed.
    let eig = sym_eigen(&latent)?;
    let mut max_shift = 0.0_f64;
    let repaired = if eig.eigenvalues.iter().any(|&l| l < 1e-8) {
        let mut fixed = Matrix::zeros(d, d);
        for a in 0..d {
            for b in 0..d {
                let mut v = 0.0;
                for (k, &l) in eig.eigenvalues.iter().enumerate() {
                    v += eig.eigenvectors.get(a, k)
                        * l.max(1e-8)
                        * eig.eigenvectors.get(b, k);
                }
                fixed.set(a, b, v);
            }
        }
        let diag: Vec<f64> = (0..d).map(|i| fixed.get(i, i).sqrt()).collect();
        for a in 0..d {
            for b in 0..d {
                let v = fixed.get(a, b) / (diag[a] * diag[b]);
                fixed.set(a, b, v);
                max_shift = max_shift.max((v - latent.get(a, b)).abs());
            }
        }
        fixed
    } else {
        latent
    };

    let chol = repaired.cholesky()?;
    let thresholds = spec
        .marginals
        .iter()
        .map(|&p| norm_quantile(p))
        .collect::<Result<Vec<f64>>>()?;
    Ok(LatentModel {
        thresholds,
        chol,
        max_shift,
    })
}

impl LatentModel {
    /// Draw one binary row into `out`, consuming `d` standard normals.
    pub fn draw_row<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [u8]) {
        let d = self.thresholds.len();
        let g: Vec<f64> = (0..d).map(|_| sample_std_normal(rng)).collect();
        for j in 0..d {
            let mut z = 0.0;
            for k in 0..=j {
                z += self.chol.get(j, k) * g[k];
            }
            out[j] = u8::from(z <= self.thresholds[j]);
        }
    }
}

/// Draw `n_rows` correlated binary vectors.
pub fn gen_correlated_binary<R: Rng + ?Sized>(
    spec: &BinaryGenSpec,
    n_rows: usize,
    rng: &mut R,
) -> Result<BinarySample> {
    let model = build_latent_model(spec)?;
    let d = spec.marginals.len();
    let mut data = vec![0u8; n_rows * d];
    for i in 0..n_rows {
        model.draw_row(rng, &mut data[i * d..(i + 1) * d]);
    }
    Ok(BinarySample {
        n_rows,
        d,
        data,
        max_latent_shift: model.max_shift,
        repair_warning: model.max_shift > 0.05,
    })
}
