//! Shared domain types: hypothesis sets, covariates, discovery results, and
//! the confusion-count metrics used when ground truth is known.
//!
//! All types are immutable after construction and safe to share across
//! workers. Hypothesis order is positional: every procedure returns its
//! vectors in input order, so results from different methods can be compared
//! index by index.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// A batch of `m` hypotheses: p-values plus optional ground-truth labels
/// (simulations) and identifiers (real data).
#[derive(Debug, Clone)]
pub struct HypothesisSet {
    p_values: Vec<f64>,
    truth: Option<Vec<u8>>,
    ids: Option<Vec<String>>,
}

impl HypothesisSet {
    pub fn new(p_values: Vec<f64>) -> Result<Self> {
        for (i, &p) in p_values.iter().enumerate() {
            if !(0.0..=1.0).contains(&p) || p.is_nan() {
                return Err(Error::Validation(format!(
                    "p-value at index {i} is {p}, outside [0, 1]"
                )));
            }
        }
        Ok(HypothesisSet {
            p_values,
            truth: None,
            ids: None,
        })
    }

    /// Attach ground-truth labels (1 = alternative is true).
    pub fn with_truth(mut self, truth: Vec<u8>) -> Result<Self> {
        if truth.len() != self.p_values.len() {
            return Err(Error::Dimension(format!(
                "truth length {} != m = {}",
                truth.len(),
                self.p_values.len()
            )));
        }
        if let Some(bad) = truth.iter().position(|&t| t > 1) {
            return Err(Error::Validation(format!(
                "truth label at index {bad} is not 0/1"
            )));
        }
        self.truth = Some(truth);
        Ok(self)
    }

    pub fn with_ids(mut self, ids: Vec<String>) -> Result<Self> {
        if ids.len() != self.p_values.len() {
            return Err(Error::Dimension(format!(
                "ids length {} != m = {}",
                ids.len(),
                self.p_values.len()
            )));
        }
        self.ids = Some(ids);
        Ok(self)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.p_values.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.p_values.is_empty()
    }

    #[inline]
    pub fn p_values(&self) -> &[f64] {
        &self.p_values
    }

    pub fn truth(&self) -> Option<&[u8]> {
        self.truth.as_deref()
    }

    pub fn ids(&self) -> Option<&[String]> {
        self.ids.as_deref()
    }

    /// Number of true alternatives, if truth labels are present.
    pub fn n_alternatives(&self) -> Option<usize> {
        self.truth
            .as_ref()
            .map(|t| t.iter().map(|&h| h as usize).sum())
    }
}

/// An `m x d` matrix of per-hypothesis covariates with column labels.
#[derive(Debug, Clone)]
pub struct CovariateMatrix {
    values: Matrix,
    names: Vec<String>,
}

impl CovariateMatrix {
    pub fn new(values: Matrix, names: Vec<String>) -> Result<Self> {
        if values.cols() == 0 {
            return Err(Error::Validation("covariate matrix needs d >= 1".into()));
        }
        if names.len() != values.cols() {
            return Err(Error::Dimension(format!(
                "{} column names for {} columns",
                names.len(),
                values.cols()
            )));
        }
        if let Some(bad) = values.data().iter().position(|v| !v.is_finite()) {
            let (i, j) = (bad / values.cols(), bad % values.cols());
            return Err(Error::Validation(format!(
                "non-finite covariate at row {i}, column {}",
                names[j]
            )));
        }
        Ok(CovariateMatrix { values, names })
    }

    /// Numbered column names `x1..xd`.
    pub fn unnamed(values: Matrix) -> Result<Self> {
        let names = (1..=values.cols()).map(|j| format!("x{j}")).collect();
        CovariateMatrix::new(values, names)
    }

    #[inline]
    pub fn n_rows(&self) -> usize {
        self.values.rows()
    }

    #[inline]
    pub fn n_cols(&self) -> usize {
        self.values.cols()
    }

    pub fn values(&self) -> &Matrix {
        &self.values
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.values.column(j)
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

/// Method-specific payload attached to a [`DiscoveryResult`].
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MethodExtras {
    None,
    Storey {
        pi0: f64,
    },
    Ihw {
        /// Covariate values at the group boundaries (len = groups - 1).
        group_edges: Vec<f64>,
        /// Chosen per-group weights after budget renormalization.
        weights: Vec<f64>,
        /// Rejections per group under the chosen weights.
        per_group_rejections: Vec<usize>,
        n_groups: usize,
    },
    BocaLeek {
        /// Per-hypothesis estimated null proportion.
        pi0: Vec<f64>,
        /// One flag per lambda in the grid.
        lambda_fits_converged: Vec<bool>,
    },
}

/// Output of one testing procedure on one hypothesis set.
#[derive(Debug, Clone, Serialize)]
pub struct DiscoveryResult {
    /// Rejection indicator per hypothesis, in input order.
    pub rejected: Vec<bool>,
    /// Adjusted p-values or estimated FDR values, in `[0, 1]`.
    pub adjusted: Vec<f64>,
    /// Nominal level the procedure was run at.
    pub alpha: f64,
    /// Label identifying the method (and configuration where relevant).
    pub method_tag: String,
    pub extras: MethodExtras,
}

impl DiscoveryResult {
    /// Number of rejections (`P` in the usual notation).
    pub fn discoveries(&self) -> usize {
        self.rejected.iter().filter(|&&r| r).count()
    }
}

/// Confusion counts of one result against ground truth.
///
/// `tpr` uses `max(m1, 1)` and `fdp` uses `max(P, 1)` in the denominator so
/// both are defined (and zero) when there are no alternatives or no
/// rejections.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConfusionCounts {
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub true_negatives: usize,
    pub tpr: f64,
    pub fdp: f64,
}

/// Tally a rejection vector against 0/1 truth labels.
pub fn confusion(result: &DiscoveryResult, truth: &[u8]) -> Result<ConfusionCounts> {
    confusion_from_rejections(&result.rejected, truth)
}

pub fn confusion_from_rejections(rejected: &[bool], truth: &[u8]) -> Result<ConfusionCounts> {
    if rejected.len() != truth.len() {
        return Err(Error::Dimension(format!(
            "rejected length {} != truth length {}",
            rejected.len(),
            truth.len()
        )));
    }
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut fneg = 0usize;
    let mut tn = 0usize;
    for (&r, &h) in rejected.iter().zip(truth) {
        match (r, h) {
            (true, 1) => tp += 1,
            (true, 0) => fp += 1,
            (false, 1) => fneg += 1,
            (false, 0) => tn += 1,
            _ => return Err(Error::Validation("truth labels must be 0/1".into())),
        }
    }
    let m1 = tp + fneg;
    let p = tp + fp;
    Ok(ConfusionCounts {
        true_positives: tp,
        false_positives: fp,
        false_negatives: fneg,
        true_negatives: tn,
        tpr: tp as f64 / m1.max(1) as f64,
        fdp: fp as f64 / p.max(1) as f64,
    })
}
