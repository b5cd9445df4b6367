//! Seeded simulation of the sampling distribution of `k_hat` and the
//! large-sample efficiency curve.
//!
//! A cell draws `runs` independent samples of size `n` from
//! `LN(mu_y, ln(1 + cv^2))`, evaluates the estimator on each, and reports the
//! empirical mean and standard deviation next to their closed-form
//! predictions. Cells are independent: each owns a ChaCha8 stream seeded by
//! [`crate::rng::derive_seed`] from the master seed and its row-major index in
//! the grid, so a grid can run cells in parallel and still reproduce
//! bit-for-bit.

use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::estimator::{self, SampleAccumulator};
use crate::model::{params_from_gk, LogNormalSampler};
use crate::rng::derive_seed;
use crate::summation::CompensatedSum;

/// Default runs for a cell are this divided by `n - 1`.
pub const DEFAULT_RUNS_NUMERATOR: u64 = 10_000_000;

/// Cells above this population C_v are flagged as slow to converge.
pub const SLOW_CONVERGENCE_CV: f64 = 2.0;

/// Default cap on `runs * n` for one cell.
pub const DEFAULT_MAX_DRAWS: u128 = 2_000_000_000;

/// Seed used by the default grid.
pub const DEFAULT_MASTER_SEED: u64 = 0x6B68_6174;

/// Default runs for sample size `n`: `floor(10^7 / (n - 1))`.
pub fn default_runs(n: u64) -> u64 {
    DEFAULT_RUNS_NUMERATOR / (n - 1).max(1)
}

/// Which per-run statistic a cell averages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Statistic {
    /// Bias-corrected `k_hat = n/(n-1) K_n`.
    #[default]
    KHat,
    /// Uncorrected relative ratio `K_n`.
    KN,
}

/// Inputs of one simulation cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellSpec {
    pub n: u64,
    pub cv: f64,
    pub runs: u64,
    pub seed: u64,
    pub mu_y: f64,
}

impl CellSpec {
    pub fn new(n: u64, cv: f64, runs: u64, seed: u64) -> Self {
        Self {
            n,
            cv,
            runs,
            seed,
            mu_y: 0.0,
        }
    }

    pub fn with_mu_y(mut self, mu_y: f64) -> Self {
        self.mu_y = mu_y;
        self
    }

    /// Variates the cell will draw.
    pub fn cost(&self) -> u128 {
        u128::from(self.runs) * u128::from(self.n)
    }

    fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(domain(format!(
                "cell sample size must be >= 2, got {}",
                self.n
            )));
        }
        if !(self.cv.is_finite() && self.cv > 0.0) {
            return Err(domain(format!(
                "cell cv must be finite and > 0, got {}",
                self.cv
            )));
        }
        if self.runs < 2 {
            return Err(domain(format!("cell runs must be >= 2, got {}", self.runs)));
        }
        if !self.mu_y.is_finite() {
            return Err(domain(format!("mu_y must be finite, got {}", self.mu_y)));
        }
        Ok(())
    }
}

/// Empirical and predicted summary of one cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationCell {
    pub n: u64,
    pub cv: f64,
    pub runs: u64,
    pub seed: u64,
    pub mean_khat: f64,
    /// Sample sd over runs, `runs - 1` divisor.
    pub sd_khat: f64,
    pub pred_mean: f64,
    pub pred_sd: f64,
    /// `sd_khat / sqrt(runs)`.
    pub se_mean: f64,
    pub slow_convergence: bool,
}

fn check_budget(spec: &CellSpec, max_draws: u128) -> Result<()> {
    let cost = spec.cost();
    if cost > max_draws {
        return Err(Error::Budget {
            cost,
            budget: max_draws,
        });
    }
    Ok(())
}

/// Runs one cell of the `k_hat` simulation.
pub fn run_cell(spec: &CellSpec, max_draws: u128) -> Result<SimulationCell> {
    run_cell_statistic(spec, Statistic::KHat, max_draws)
}

/// Runs one cell averaging `statistic`; the predictions follow the statistic.
pub fn run_cell_statistic(
    spec: &CellSpec,
    statistic: Statistic,
    max_draws: u128,
) -> Result<SimulationCell> {
    spec.validate()?;
    check_budget(spec, max_draws)?;

    let k = spec.cv * spec.cv;
    let params = params_from_gk(spec.mu_y.exp(), k)?;
    let mut sampler = LogNormalSampler::new(params, spec.seed);
    let n = spec.n as f64;
    let scale = match statistic {
        Statistic::KHat => n / (n - 1.0),
        Statistic::KN => 1.0,
    };

    let mut sum = CompensatedSum::ZERO;
    let (mut mean, mut m2) = (0.0f64, 0.0f64);
    for run in 0..spec.runs {
        let mut acc = SampleAccumulator::new();
        for _ in 0..spec.n {
            acc.push_unchecked(sampler.draw());
        }
        let value = scale * acc.relative_ratio()?;
        sum += value;
        let delta = value - mean;
        mean += delta / (run + 1) as f64;
        m2 += delta * (value - mean);
    }

    let runs = spec.runs as f64;
    let mean_khat = sum.value() / runs;
    let sd_khat = (m2 / (runs - 1.0)).max(0.0).sqrt();
    let (pred_mean, pred_sd) = match statistic {
        Statistic::KHat => (k, estimator::sd_k_hat(spec.n, k)?),
        Statistic::KN => (
            estimator::expected_k_n(spec.n, k)?,
            estimator::sd_k_n(spec.n, k)?,
        ),
    };
    Ok(SimulationCell {
        n: spec.n,
        cv: spec.cv,
        runs: spec.runs,
        seed: spec.seed,
        mean_khat,
        sd_khat,
        pred_mean,
        pred_sd,
        se_mean: sd_khat / runs.sqrt(),
        slow_convergence: spec.cv > SLOW_CONVERGENCE_CV,
    })
}

/// A rectangular `(n, cv)` simulation grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridConfig {
    pub n_values: Vec<u64>,
    pub cv_values: Vec<f64>,
    /// Fixed runs for every cell; overrides the default rule and the cap.
    pub runs_override: Option<u64>,
    /// Upper bound applied to the default `floor(10^7 / (n - 1))` rule.
    pub runs_cap: Option<u64>,
    pub master_seed: u64,
    pub mu_y: f64,
}

impl Default for GridConfig {
    /// `n in {2, 10, 100}`, `cv in {0.1, 0.5, 1.0}`, runs capped at `10^6`.
    fn default() -> Self {
        Self {
            n_values: vec![2, 10, 100],
            cv_values: vec![0.1, 0.5, 1.0],
            runs_override: None,
            runs_cap: Some(1_000_000),
            master_seed: DEFAULT_MASTER_SEED,
            mu_y: 0.0,
        }
    }
}

impl GridConfig {
    pub fn runs_for(&self, n: u64) -> u64 {
        match (self.runs_override, self.runs_cap) {
            (Some(runs), _) => runs,
            (None, Some(cap)) => default_runs(n).min(cap),
            (None, None) => default_runs(n),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_values.is_empty() || self.cv_values.is_empty() {
            return Err(domain("grid needs at least one n and one cv value"));
        }
        if let Some(&n) = self.n_values.iter().find(|&&n| n < 2) {
            return Err(domain(format!("grid sample sizes must be >= 2, got {n}")));
        }
        if let Some(&cv) = self
            .cv_values
            .iter()
            .find(|cv| !(cv.is_finite() && **cv > 0.0))
        {
            return Err(domain(format!(
                "grid cv values must be finite and > 0, got {cv}"
            )));
        }
        if !self.mu_y.is_finite() {
            return Err(domain(format!("mu_y must be finite, got {}", self.mu_y)));
        }
        Ok(())
    }

    /// Cell specs in row-major order (`n` outer, `cv` inner).
    pub fn cells(&self) -> Result<Vec<CellSpec>> {
        self.validate()?;
        let mut index = 0u64;
        let mut out = Vec::with_capacity(self.n_values.len() * self.cv_values.len());
        for &n in &self.n_values {
            for &cv in &self.cv_values {
                let seed = derive_seed(self.master_seed, index);
                out.push(CellSpec::new(n, cv, self.runs_for(n), seed).with_mu_y(self.mu_y));
                index += 1;
            }
        }
        Ok(out)
    }
}

/// Runs every cell of the grid, in parallel, returning them in row-major order.
///
/// All cells are validated and budget-checked before any work starts.
pub fn run_grid(cfg: &GridConfig, max_draws: u128) -> Result<Vec<SimulationCell>> {
    let specs = cfg.cells()?;
    for spec in &specs {
        spec.validate()?;
        check_budget(spec, max_draws)?;
    }
    specs
        .par_iter()
        .map(|spec| run_cell(spec, max_draws))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

/// `(sigma2_y, efficiency)` pairs on `points` grid values from `min` to `max`.
pub fn efficiency_curve(
    sigma2_min: f64,
    sigma2_max: f64,
    points: usize,
    spacing: Spacing,
) -> Result<Vec<(f64, f64)>> {
    if !(sigma2_min.is_finite() && sigma2_max.is_finite()) {
        return Err(domain("efficiency range must be finite"));
    }
    if !(sigma2_min > 0.0 && sigma2_min < sigma2_max) {
        return Err(domain(format!(
            "efficiency range needs 0 < min < max, got min={sigma2_min}, max={sigma2_max}"
        )));
    }
    if points < 2 {
        return Err(domain(format!(
            "efficiency curve needs >= 2 points, got {points}"
        )));
    }
    let last = (points - 1) as f64;
    (0..points)
        .map(|i| {
            let t = i as f64 / last;
            let s2 = if i == 0 {
                sigma2_min
            } else if i == points - 1 {
                sigma2_max
            } else {
                match spacing {
                    Spacing::Linear => sigma2_min + (sigma2_max - sigma2_min) * t,
                    Spacing::Log => (sigma2_min.ln() + (sigma2_max / sigma2_min).ln() * t).exp(),
                }
            };
            Ok((s2, estimator::large_sample_efficiency(s2)?))
        })
        .collect()
}
