//! Covariate-aware false discovery rate control.
//!
//! This crate implements the classical multiple-testing baselines (Bonferroni,
//! Benjamini-Hochberg, Storey q-values) together with two covariate-driven
//! procedures: naive independent hypothesis weighting (grid search over group
//! weights) and regression-based null-proportion estimation (Boca-Leek). A PCA
//! module reduces high-dimensional covariates (e.g. per-SNP LD scores) to
//! principal-component scores, and the pipeline module sweeps procedures over
//! covariate or PC axes, selecting the axis with the most discoveries.
//!
//! Two fully specified Monte Carlo generators ([`simgen`]) produce GWAS-like
//! datasets for evaluating the procedures: one with a covariate-dependent null
//! proportion, one with covariate-dependent effect sizes ("size investing").
//!
//! With the default `parallel` feature the replicate loop, the IHW weight
//! search, and the per-threshold regressions run on rayon; results are
//! identical to the sequential build because all randomness is derived from
//! per-replicate seeds and reductions are order-independent.

pub mod data;
pub mod error;
pub mod io;
pub mod matrix;
pub mod numerics;
pub mod pca;
pub mod pipeline;
pub mod procedures;
pub mod simgen;

pub(crate) mod par;

pub use data::{ConfusionCounts, CovariateMatrix, DiscoveryResult, HypothesisSet};
pub use error::{Error, Result};

/// Configure the global thread pool used by the `parallel` feature.
///
/// No-op in sequential builds. Calling it more than once keeps the first pool.
pub fn configure_threads(n_threads: usize) {
    #[cfg(feature = "parallel")]
    {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n_threads)
            .build_global();
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = n_threads;
    }
}
