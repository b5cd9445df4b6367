//! Estimation of the lognormal squared coefficient of variation from the ratio
//! of sample arithmetic to harmonic means.
//!
//! For `X ~ LN(mu_y, sigma2_y)` the population relative ratio
//! `k = alpha / h - 1` equals `C_v^2 = exp(sigma2_y) - 1`. Its sample
//! counterpart `K_n = A_n / H_n - 1` has mean `(n-1)/n * k`, so
//! `k_hat = n/(n-1) * K_n` is unbiased for `C_v^2`.
//!
//! * [`model`]: moments, densities and seeded sampling.
//! * [`estimator`]: streaming accumulator, point estimates and closed-form
//!   mean/variance predictions.
//! * [`oracle`]: exact `E(K_n)` and `Var(K_n)` from the covariance term
//!   decomposition, used to check the closed forms.
//! * [`montecarlo`]: seeded simulation grid and the efficiency curve.

pub mod error;
pub mod estimator;
pub mod model;
pub mod montecarlo;
pub mod oracle;
pub mod rng;
pub mod summation;

pub use error::{Error, Result};
pub use estimator::{
    accumulate, expected_k_n, large_sample_efficiency, measurement_cost, merge, sd_k_hat, sd_k_n,
    var_k_hat, var_k_n, CostMode, EstimateReport, SampleAccumulator,
};
pub use model::{
    derive_moments, params_from_gk, pdf, pdf_gk, sample, DerivedMoments, LogNormalParams,
    LogNormalSampler,
};
pub use montecarlo::{
    efficiency_curve, run_cell, run_grid, CellSpec, GridConfig, SimulationCell, Spacing, Statistic,
};
pub use oracle::{
    covariance_term, exact_mean_kn, exact_var_kn, term_multiplicity, TermClass, TermKind,
};
