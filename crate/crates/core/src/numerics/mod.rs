//! Self-contained numerical kernels: symmetric eigendecomposition, logistic
//! regression, normal distribution functions, and seedable samplers.

pub mod eigen;
pub mod logistic;
pub mod normal;
pub mod sampling;

pub use eigen::{sym_eigen, EigenDecomposition};
pub use logistic::{logistic_fit, LogisticFit};
pub use normal::{bivariate_norm_cdf, norm_cdf, norm_pdf, norm_quantile};
pub use sampling::{derive_seed, rng_from_seed, sample_beta, sample_std_normal, SimRng};
