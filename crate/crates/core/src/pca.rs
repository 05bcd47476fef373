//! Covariance-based PCA of the covariate matrix.
//!
//! Simulation work uses centered (covariance) PCA; real covariates such as
//! LD scores have wildly different scales, so the analysis pipeline defaults
//! to standardized (correlation) PCA. Reproducibility across platforms comes
//! from the deterministic eigenvector sign convention in `numerics::eigen`.

use serde::Serialize;

use crate::data::CovariateMatrix;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::numerics::eigen::sym_eigen;

/// Whether columns are centered only or centered and scaled to unit variance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PcaMode {
    Covariance,
    Standardized,
}

#[derive(Debug, Clone)]
pub struct PcaModel {
    pub means: Vec<f64>,
    /// Per-column divisors; all 1 in covariance mode.
    pub scales: Vec<f64>,
    /// Columns are principal axes ordered by descending eigenvalue.
    pub loadings: Matrix,
    pub eigenvalues: Vec<f64>,
    /// Projected training data, `m x d`.
    pub scores: Matrix,
    /// Columns whose variance was below 1e-12 when standardizing; their
    /// scale was left at 1.
    pub zero_variance_columns: Vec<usize>,
}

/// Fit PCA on the covariate matrix.
///
/// The covariance is computed with denominator `m - 1` and requires `m > d`.
pub fn pca_fit(x: &CovariateMatrix, mode: PcaMode) -> Result<PcaModel> {
    let m = x.n_rows();
    let d = x.n_cols();
    if m <= d {
        return Err(Error::Validation(format!(
            "PCA needs more rows than columns, got m = {m}, d = {d}"
        )));
    }
    let values = x.values();

    let mut means = vec![0.0; d];
    for i in 0..m {
        for (mean, v) in means.iter_mut().zip(values.row(i)) {
            *mean += v;
        }
    }
    for mean in &mut means {
        *mean /= m as f64;
    }

    let mut variances = vec![0.0; d];
    for i in 0..m {
        for j in 0..d {
            let c = values.get(i, j) - means[j];
            variances[j] += c * c;
        }
    }
    for v in &mut variances {
        *v /= (m - 1) as f64;
    }

    let mut zero_variance_columns = Vec::new();
    let scales: Vec<f64> = match mode {
        PcaMode::Covariance => vec![1.0; d],
        PcaMode::Standardized => variances
            .iter()
            .enumerate()
            .map(|(j, &v)| {
                if v > 1e-12 {
                    v.sqrt()
                } else {
                    zero_variance_columns.push(j);
                    1.0
                }
            })
            .collect(),
    };

    // Centered/scaled data, reused for the covariance and the scores.
    let mut centered = Matrix::zeros(m, d);
    for i in 0..m {
        for j in 0..d {
            centered.set(i, j, (values.get(i, j) - means[j]) / scales[j]);
        }
    }

    let mut cov = Matrix::zeros(d, d);
    for i in 0..m {
        let row = centered.row(i);
        for a in 0..d {
            let ra = row[a];
            for b in a..d {
                cov.set(a, b, cov.get(a, b) + ra * row[b]);
            }
        }
    }
    let denom = (m - 1) as f64;
    for a in 0..d {
        for b in a..d {
            let v = cov.get(a, b) / denom;
            cov.set(a, b, v);
            cov.set(b, a, v);
        }
    }

    let eig = sym_eigen(&cov)?;
    let scores = centered.matmul(&eig.eigenvectors)?;

    Ok(PcaModel {
        means,
        scales,
        loadings: eig.eigenvectors,
        eigenvalues: eig.eigenvalues,
        scores,
        zero_variance_columns,
    })
}

impl PcaModel {
    pub fn n_components(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Score of a new observation on component `j` (1-based, as reported in
    /// the PC1..PCd labelling).
    pub fn pc_score(&self, x: &[f64], j: usize) -> Result<f64> {
        let d = self.means.len();
        if x.len() != d {
            return Err(Error::Dimension(format!(
                "observation length {} != d = {d}",
                x.len()
            )));
        }
        if j == 0 || j > d {
            return Err(Error::Index(format!(
                "component {j} outside 1..={d}"
            )));
        }
        let col = j - 1;
        let mut s = 0.0;
        for i in 0..d {
            s += (x[i] - self.means[i]) / self.scales[i] * self.loadings.get(i, col);
        }
        Ok(s)
    }

    /// Score column for component `j` (1-based) over the training data.
    pub fn score_column(&self, j: usize) -> Result<Vec<f64>> {
        if j == 0 || j > self.n_components() {
            return Err(Error::Index(format!(
                "component {j} outside 1..={}",
                self.n_components()
            )));
        }
        Ok(self.scores.column(j - 1))
    }
}
