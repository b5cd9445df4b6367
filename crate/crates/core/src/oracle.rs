//! Exact mean and variance of `K_n` assembled from covariance term classes.
//!
//! `n^2 (K_n + 1) = n + sum_{i != j} X_i / X_j`, so `Var(K_n)` is `1/n^4` times
//! the sum of `Cov(X_i/X_j, X_p/X_q)` over all ordered pairs of ordered index
//! pairs. Every such covariance falls into one of seven classes determined by
//! which indices the two ratios share, and each class covariance is a
//! polynomial in `omega = exp(sigma2_y)`. This module computes the result from
//! that decomposition, independently of the closed forms in
//! [`crate::estimator`], and also by brute-force index enumeration.

use std::fmt;

use crate::error::{domain, Result};
use crate::estimator;

/// Index-sharing pattern between `X_i/X_j` and `X_p/X_q` (`i != j`, `p != q`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TermKind {
    /// `(p, q) = (i, j)`: `Cov(X1/X2, X1/X2)`.
    SelfPair,
    /// `(p, q) = (j, i)`: `Cov(X1/X2, X2/X1)`.
    ReciprocalPair,
    /// `q = j` only: `Cov(X1/X2, X3/X2)`.
    SharedDenominator,
    /// `q = i` only: `Cov(X1/X2, X3/X1)`.
    NumIsOtherDen,
    /// `p = j` only: `Cov(X1/X2, X2/X3)`.
    DenIsOtherNum,
    /// `p = i` only: `Cov(X1/X2, X1/X3)`.
    SharedNumerator,
    /// Four distinct indices: `Cov(X1/X2, X3/X4)`.
    Disjoint,
}

impl TermKind {
    pub const ALL: [TermKind; 7] = [
        TermKind::SelfPair,
        TermKind::ReciprocalPair,
        TermKind::SharedDenominator,
        TermKind::NumIsOtherDen,
        TermKind::DenIsOtherNum,
        TermKind::SharedNumerator,
        TermKind::Disjoint,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TermKind::SelfPair => "SelfPair",
            TermKind::ReciprocalPair => "ReciprocalPair",
            TermKind::SharedDenominator => "SharedDenominator",
            TermKind::NumIsOtherDen => "NumIsOtherDen",
            TermKind::DenIsOtherNum => "DenIsOtherNum",
            TermKind::SharedNumerator => "SharedNumerator",
            TermKind::Disjoint => "Disjoint",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for TermKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for TermKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        TermKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| domain(format!("unknown term class {s:?}")))
    }
}

/// One class of the decomposition evaluated at a given `(n, omega)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TermClass {
    pub kind: TermKind,
    pub multiplicity: u64,
    pub covariance_value: f64,
}

fn check_omega(omega: f64) -> Result<()> {
    if omega.is_finite() && omega >= 1.0 {
        Ok(())
    } else {
        Err(domain(format!(
            "omega must be finite and >= 1, got {omega}"
        )))
    }
}

fn check_n(n: u64) -> Result<()> {
    if n >= 2 {
        Ok(())
    } else {
        Err(domain(format!("sample size must be >= 2, got {n}")))
    }
}

/// Covariance of the class representative pair, as a polynomial in `omega`.
///
/// The forms are factored through `omega - 1` so that they vanish exactly at
/// `omega = 1` and keep their relative accuracy near it.
pub fn covariance_term(kind: TermKind, omega: f64) -> Result<f64> {
    check_omega(omega)?;
    let d = omega - 1.0;
    Ok(match kind {
        // omega^4 - omega^2
        TermKind::SelfPair => omega * omega * d * (omega + 1.0),
        // 1 - omega^2
        TermKind::ReciprocalPair => -d * (omega + 1.0),
        // omega^3 - omega^2
        TermKind::SharedDenominator | TermKind::SharedNumerator => omega * omega * d,
        // omega - omega^2
        TermKind::NumIsOtherDen | TermKind::DenIsOtherNum => -omega * d,
        TermKind::Disjoint => 0.0,
    })
}

/// Number of `(X_i/X_j, X_p/X_q)` pairs in class `kind` for a sample of size `n`.
///
/// Classes needing more distinct indices than `n` provides count zero.
pub fn term_multiplicity(kind: TermKind, n: u64) -> u64 {
    let falling = |terms: u64| -> u64 {
        if n < terms {
            0
        } else {
            (0..terms).map(|t| n - t).product()
        }
    };
    match kind {
        TermKind::SelfPair | TermKind::ReciprocalPair => falling(2),
        TermKind::SharedDenominator
        | TermKind::NumIsOtherDen
        | TermKind::DenIsOtherNum
        | TermKind::SharedNumerator => falling(3),
        TermKind::Disjoint => falling(4),
    }
}

pub fn term_classes(n: u64, omega: f64) -> Result<Vec<TermClass>> {
    check_n(n)?;
    TermKind::ALL
        .into_iter()
        .map(|kind| {
            Ok(TermClass {
                kind,
                multiplicity: term_multiplicity(kind, n),
                covariance_value: covariance_term(kind, omega)?,
            })
        })
        .collect()
}

pub(crate) fn var_kn_with(
    n: u64,
    omega: f64,
    multiplicity: impl Fn(TermKind, u64) -> u64,
) -> Result<f64> {
    check_n(n)?;
    check_omega(omega)?;
    let mut total = 0.0;
    for kind in TermKind::ALL {
        total += multiplicity(kind, n) as f64 * covariance_term(kind, omega)?;
    }
    let n = n as f64;
    Ok(total / (n * n * n * n))
}

/// `Var(K_n)` as `1/n^4 * sum(multiplicity * covariance)` over the seven classes.
pub fn exact_var_kn(n: u64, omega: f64) -> Result<f64> {
    var_kn_with(n, omega, term_multiplicity)
}

/// `E(K_n) = (n + n(n-1) E(X_1/X_2)) / n^2 - 1` with `E(X_1/X_2) = omega`.
pub fn exact_mean_kn(n: u64, omega: f64) -> Result<f64> {
    check_n(n)?;
    check_omega(omega)?;
    let n = n as f64;
    let diagonal = n;
    let off_diagonal = n * (n - 1.0) * omega;
    Ok((diagonal + off_diagonal) / (n * n) - 1.0)
}

/// Class of the ordered pair `(X_i/X_j, X_p/X_q)`; `None` if `i == j` or `p == q`.
pub fn classify(i: u64, j: u64, p: u64, q: u64) -> Option<TermKind> {
    if i == j || p == q {
        return None;
    }
    Some(match (p == i, p == j, q == i, q == j) {
        (true, _, _, true) => TermKind::SelfPair,
        (_, true, true, _) => TermKind::ReciprocalPair,
        (false, false, false, true) => TermKind::SharedDenominator,
        (false, false, true, false) => TermKind::NumIsOtherDen,
        (false, true, false, false) => TermKind::DenIsOtherNum,
        (true, false, false, false) => TermKind::SharedNumerator,
        (false, false, false, false) => TermKind::Disjoint,
        _ => unreachable!("p == q excluded"),
    })
}

/// Largest `n` the verification suite enumerates index tuples for.
pub const BRUTE_FORCE_MAX_N: u64 = 8;

/// Per-class counts by walking every `(i, j, p, q)` with `i != j`, `p != q`.
/// Order `[SelfPair, ..., Disjoint]` as in [`TermKind::ALL`]. Cost is `O(n^4)`.
pub fn enumerate_multiplicities(n: u64) -> [u64; 7] {
    let mut counts = [0u64; 7];
    for i in 0..n {
        for j in 0..n {
            for p in 0..n {
                for q in 0..n {
                    if let Some(kind) = classify(i, j, p, q) {
                        counts[kind.index()] += 1;
                    }
                }
            }
        }
    }
    counts
}

/// `Var(K_n)` by brute-force enumeration, without the class table.
///
/// Each ratio `X_i/X_j` is an exponent vector `e_i - e_j`; for lognormal
/// variates `E(prod X^e) = omega^(|e|^2 / 2)` when the exponents sum to zero.
/// So `Cov(X_i/X_j, X_p/X_q) = omega^(|e1 + e2|^2 / 2) - omega^2`, and the
/// tuples are tallied by that integer power before any floating-point work.
pub fn brute_force_var_kn(n: u64, omega: f64) -> Result<f64> {
    check_n(n)?;
    check_omega(omega)?;
    let mut by_power = [0u64; 5];
    let mut exps = vec![0i64; n as usize];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            for p in 0..n {
                for q in 0..n {
                    if p == q {
                        continue;
                    }
                    exps.iter_mut().for_each(|e| *e = 0);
                    exps[i as usize] += 1;
                    exps[j as usize] -= 1;
                    exps[p as usize] += 1;
                    exps[q as usize] -= 1;
                    let sq: i64 = exps.iter().map(|e| e * e).sum();
                    by_power[(sq / 2) as usize] += 1;
                }
            }
        }
    }
    let omega2 = omega * omega;
    let total: f64 = by_power
        .iter()
        .enumerate()
        .map(|(m, &count)| count as f64 * (omega.powi(m as i32) - omega2))
        .sum();
    let n = n as f64;
    Ok(total / (n * n * n * n))
}

/// Settings for [`verify`].
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub max_n: u64,
    pub omegas: Vec<f64>,
    /// Relative tolerance for oracle vs closed form.
    pub tolerance: f64,
    /// Test hook: add one to this class's multiplicity everywhere.
    pub fault: Option<TermKind>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            max_n: 12,
            omegas: vec![1.0, 1.1, 2.0, 5.0, 10.0],
            tolerance: 1e-12,
            fault: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mismatch {
    pub check: &'static str,
    pub n: u64,
    pub omega: Option<f64>,
    pub class: Option<TermKind>,
    pub expected: f64,
    pub actual: f64,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mismatch at n={}", self.check, self.n)?;
        if let Some(omega) = self.omega {
            write!(f, ", omega={omega}")?;
        }
        if let Some(class) = self.class {
            write!(f, ", class={class}")?;
        }
        write!(f, ": expected {:e}, got {:e}", self.expected, self.actual)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct VerifyReport {
    pub checks: usize,
    pub mismatches: Vec<Mismatch>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }

    pub fn first_mismatch(&self) -> Option<&Mismatch> {
        self.mismatches.first()
    }
}

pub(crate) fn rel_close(actual: f64, expected: f64, tol: f64) -> bool {
    actual == expected || (actual - expected).abs() <= tol * actual.abs().max(expected.abs())
}

/// Oracle-vs-closed-form suite for the mean and variance of `K_n`.
///
/// For each `n` in `2..=max_n`, in order: class counts against brute-force
/// enumeration (`n <= BRUTE_FORCE_MAX_N`), total count against `(n(n-1))^2`,
/// then for every omega the class-sum mean and variance against the closed
/// forms in [`estimator`].
pub fn verify(cfg: &VerifyConfig) -> Result<VerifyReport> {
    check_n(cfg.max_n)?;
    for &omega in &cfg.omegas {
        check_omega(omega)?;
    }
    let multiplicity = |kind: TermKind, n: u64| -> u64 {
        term_multiplicity(kind, n) + u64::from(cfg.fault == Some(kind))
    };
    let mut report = VerifyReport::default();
    let mut record = |ok: bool, m: Mismatch| {
        report.checks += 1;
        if !ok {
            report.mismatches.push(m);
        }
    };

    for n in 2..=cfg.max_n {
        if n <= BRUTE_FORCE_MAX_N {
            let counted = enumerate_multiplicities(n);
            for kind in TermKind::ALL {
                let (expected, actual) = (counted[kind.index()], multiplicity(kind, n));
                record(
                    expected == actual,
                    Mismatch {
                        check: "multiplicity",
                        n,
                        omega: None,
                        class: Some(kind),
                        expected: expected as f64,
                        actual: actual as f64,
                    },
                );
            }
        }
        let total: u64 = TermKind::ALL.into_iter().map(|k| multiplicity(k, n)).sum();
        let pairs = n * (n - 1);
        record(
            total == pairs * pairs,
            Mismatch {
                check: "multiplicity total",
                n,
                omega: None,
                class: None,
                expected: (pairs * pairs) as f64,
                actual: total as f64,
            },
        );
        for &omega in &cfg.omegas {
            let k = omega - 1.0;
            let expected = estimator::expected_k_n(n, k)?;
            let actual = exact_mean_kn(n, omega)?;
            record(
                rel_close(actual, expected, cfg.tolerance),
                Mismatch {
                    check: "mean",
                    n,
                    omega: Some(omega),
                    class: None,
                    expected,
                    actual,
                },
            );
            let expected = estimator::var_k_n(n, k)?;
            let actual = var_kn_with(n, omega, multiplicity)?;
            record(
                rel_close(actual, expected, cfg.tolerance),
                Mismatch {
                    check: "variance",
                    n,
                    omega: Some(omega),
                    class: None,
                    expected,
                    actual,
                },
            );
        }
    }
    Ok(report)
}
