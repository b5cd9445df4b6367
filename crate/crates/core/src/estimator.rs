//! Streaming sample accumulator, the arithmetic/harmonic-mean estimators and
//! the closed-form predictions for their mean and variance.

use crate::error::{domain, Error, Result};
use crate::summation::CompensatedSum;

/// Mergeable running sums over a sample of positive reals.
///
/// Sums of `x` and `1/x` are compensated so that heavy-tailed samples do not
/// bias the harmonic mean. The running minimum and maximum detect constant
/// samples exactly, where `A_n = H_n` must hold without rounding residue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleAccumulator {
    n: u64,
    sum_x: CompensatedSum,
    sum_inv_x: CompensatedSum,
    sum_x2: CompensatedSum,
    min: f64,
    max: f64,
}

impl Default for SampleAccumulator {
    fn default() -> Self {
        Self::new()
    }
}

impl SampleAccumulator {
    pub const fn new() -> Self {
        Self {
            n: 0,
            sum_x: CompensatedSum::ZERO,
            sum_inv_x: CompensatedSum::ZERO,
            sum_x2: CompensatedSum::ZERO,
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
        }
    }

    /// Accumulates every element of `xs`, stopping at the first invalid one.
    pub fn from_slice(xs: &[f64]) -> Result<Self> {
        let mut acc = Self::new();
        for &x in xs {
            acc.push(x)?;
        }
        Ok(acc)
    }

    pub fn push(&mut self, x: f64) -> Result<()> {
        if !x.is_finite() {
            return Err(domain(format!("observation must be finite, got {x}")));
        }
        if x <= 0.0 {
            return Err(domain(format!(
                "lognormal support is positive reals, got {x}"
            )));
        }
        self.push_unchecked(x);
        Ok(())
    }

    /// Hot-path update for values already known to be finite and positive.
    #[inline]
    pub(crate) fn push_unchecked(&mut self, x: f64) {
        self.n += 1;
        self.sum_x.add(x);
        self.sum_inv_x.add(x.recip());
        self.sum_x2.add(x * x);
        self.min = self.min.min(x);
        self.max = self.max.max(x);
    }

    pub fn merge(&self, other: &Self) -> Self {
        Self {
            n: self.n + other.n,
            sum_x: self.sum_x + other.sum_x,
            sum_inv_x: self.sum_inv_x + other.sum_inv_x,
            sum_x2: self.sum_x2 + other.sum_x2,
            min: self.min.min(other.min),
            max: self.max.max(other.max),
        }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn sum_x(&self) -> f64 {
        self.sum_x.value()
    }

    pub fn sum_inv_x(&self) -> f64 {
        self.sum_inv_x.value()
    }

    pub fn sum_x2(&self) -> f64 {
        self.sum_x2.value()
    }

    /// Smallest observation; `None` when empty.
    pub fn min(&self) -> Option<f64> {
        (self.n > 0).then_some(self.min)
    }

    pub fn max(&self) -> Option<f64> {
        (self.n > 0).then_some(self.max)
    }

    fn is_constant(&self) -> bool {
        self.n > 0 && self.min == self.max
    }

    fn require(&self, required: u64) -> Result<()> {
        match self.n {
            0 => Err(Error::EmptySample),
            n if n < required => Err(Error::SampleTooSmall { n, required }),
            _ => Ok(()),
        }
    }

    /// `A_n = sum(x) / n`.
    pub fn arithmetic_mean(&self) -> Result<f64> {
        self.require(1)?;
        if self.is_constant() {
            return Ok(self.min);
        }
        Ok(self.sum_x() / self.n as f64)
    }

    /// `H_n = n / sum(1/x)`.
    pub fn harmonic_mean(&self) -> Result<f64> {
        self.require(1)?;
        if self.is_constant() {
            return Ok(self.min);
        }
        Ok(self.n as f64 / self.sum_inv_x())
    }

    /// Sample relative ratio `K_n = A_n / H_n - 1`.
    ///
    /// Zero exactly for constant samples; rounding residue below zero is
    /// clamped since `A_n >= H_n` always.
    pub fn relative_ratio(&self) -> Result<f64> {
        self.require(1)?;
        if self.is_constant() {
            return Ok(0.0);
        }
        let n = self.n as f64;
        let ratio = (self.sum_x() / n) * (self.sum_inv_x() / n);
        Ok((ratio - 1.0).max(0.0))
    }

    /// Unbiased estimate of `k = C_v^2`: `n/(n-1) * K_n`.
    pub fn k_hat(&self) -> Result<f64> {
        self.require(2)?;
        let n = self.n as f64;
        Ok(n / (n - 1.0) * self.relative_ratio()?)
    }

    /// Geometric-mean estimate `sqrt(A_n * H_n)`.
    pub fn g_hat(&self) -> Result<f64> {
        let a = self.arithmetic_mean()?;
        let h = self.harmonic_mean()?;
        if self.is_constant() {
            return Ok(a);
        }
        Ok((a * h).sqrt().clamp(a.min(h), a.max(h)))
    }

    /// Moment-based comparison estimate: unbiased sample variance over `A_n^2`.
    pub fn cv2_conventional(&self) -> Result<f64> {
        self.require(2)?;
        if self.is_constant() {
            return Ok(0.0);
        }
        let n = self.n as f64;
        let a = self.sum_x() / n;
        let var = (self.sum_x2() - n * a * a) / (n - 1.0);
        Ok((var / (a * a)).max(0.0))
    }
}

/// Functional form of [`SampleAccumulator::push`].
pub fn accumulate(mut acc: SampleAccumulator, x: f64) -> Result<SampleAccumulator> {
    acc.push(x)?;
    Ok(acc)
}

pub fn merge(a: &SampleAccumulator, b: &SampleAccumulator) -> SampleAccumulator {
    a.merge(b)
}

fn check_nk(n: u64, k: f64) -> Result<(f64, f64)> {
    if n < 2 {
        return Err(domain(format!("sample size must be >= 2, got {n}")));
    }
    if !(k.is_finite() && k >= 0.0) {
        return Err(domain(format!("k must be finite and >= 0, got {k}")));
    }
    Ok((n as f64, k))
}

/// `E(K_n) = (n-1)/n * k`.
pub fn expected_k_n(n: u64, k: f64) -> Result<f64> {
    let (n, k) = check_nk(n, k)?;
    Ok((n - 1.0) / n * k)
}

/// Shared factor `k^2 (1 + k + k^2/(2n))`.
fn variance_core(n: f64, k: f64) -> f64 {
    k * k * (1.0 + k + k * k / (2.0 * n))
}

/// `Var(K_n) = 2(n-1)/n^2 * k^2 (1 + k + k^2/(2n))`.
pub fn var_k_n(n: u64, k: f64) -> Result<f64> {
    let (n, k) = check_nk(n, k)?;
    Ok(2.0 * (n - 1.0) / (n * n) * variance_core(n, k))
}

pub fn sd_k_n(n: u64, k: f64) -> Result<f64> {
    var_k_n(n, k).map(f64::sqrt)
}

/// `Var(k_hat) = 2/(n-1) * k^2 (1 + k + k^2/(2n))`.
pub fn var_k_hat(n: u64, k: f64) -> Result<f64> {
    let (n, k) = check_nk(n, k)?;
    Ok(2.0 / (n - 1.0) * variance_core(n, k))
}

pub fn sd_k_hat(n: u64, k: f64) -> Result<f64> {
    var_k_hat(n, k).map(f64::sqrt)
}

/// Below this log-variance the efficiency is reported as its limit, 1.
pub const EFFICIENCY_LIMIT_THRESHOLD: f64 = 1e-12;

/// Large-sample efficiency of `k_hat` relative to the UMVUE:
/// `sigma^4 / (exp(sigma^2) - 1)^2`.
///
/// Underflows to 0 once `exp(sigma2_y)` overflows (about `sigma2_y > 709`).
pub fn large_sample_efficiency(sigma2_y: f64) -> Result<f64> {
    if !(sigma2_y.is_finite() && sigma2_y > 0.0) {
        return Err(domain(format!(
            "sigma2_y must be finite and > 0, got {sigma2_y}"
        )));
    }
    if sigma2_y < EFFICIENCY_LIMIT_THRESHOLD {
        return Ok(1.0);
    }
    let ratio = sigma2_y / sigma2_y.exp_m1();
    Ok(ratio * ratio)
}

/// How the sample means are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CostMode {
    /// Every replicate is measured individually.
    Conventional,
    /// `A_n` and `H_n` are each read in one collective measurement.
    Collective,
}

/// Number of physical measurements needed for a sample of size `n`.
pub fn measurement_cost(n: u64, mode: CostMode) -> u64 {
    match mode {
        CostMode::Conventional => n,
        CostMode::Collective => 2,
    }
}

/// Point estimates and cost figures for one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateReport {
    pub n: u64,
    pub a_n: f64,
    pub h_n: f64,
    pub k_n: f64,
    pub k_hat: f64,
    pub g_hat: f64,
    pub cv2_conventional: f64,
    /// Plug-in diagnostic: the population sd formula evaluated at `k = k_hat`.
    /// Not an unbiased estimate of `sd(k_hat)`.
    pub predicted_sd_k_hat: f64,
    pub cost_collective: u64,
    pub cost_conventional: u64,
}

impl EstimateReport {
    pub fn from_accumulator(acc: &SampleAccumulator) -> Result<Self> {
        let k_hat = acc.k_hat()?;
        let n = acc.n();
        Ok(Self {
            n,
            a_n: acc.arithmetic_mean()?,
            h_n: acc.harmonic_mean()?,
            k_n: acc.relative_ratio()?,
            k_hat,
            g_hat: acc.g_hat()?,
            cv2_conventional: acc.cv2_conventional()?,
            predicted_sd_k_hat: sd_k_hat(n, k_hat)?,
            cost_collective: measurement_cost(n, CostMode::Collective),
            cost_conventional: measurement_cost(n, CostMode::Conventional),
        })
    }
}
