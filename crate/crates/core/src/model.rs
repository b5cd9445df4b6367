//! Closed-form lognormal mathematics: parameter conversions, the two density
//! parameterizations and seeded sampling.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{domain, Error, Result};
use crate::rng::{self, StreamRng};

/// Log-space parameters of `LN(mu_y, sigma2_y)`: `ln X ~ N(mu_y, sigma2_y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogNormalParams {
    mu_y: f64,
    sigma2_y: f64,
}

impl LogNormalParams {
    pub fn new(mu_y: f64, sigma2_y: f64) -> Result<Self> {
        if !mu_y.is_finite() || !sigma2_y.is_finite() {
            return Err(domain(format!(
                "lognormal parameters must be finite (mu_y={mu_y}, sigma2_y={sigma2_y})"
            )));
        }
        if sigma2_y < 0.0 {
            return Err(domain(format!("sigma2_y must be >= 0, got {sigma2_y}")));
        }
        Ok(Self { mu_y, sigma2_y })
    }

    pub fn mu_y(&self) -> f64 {
        self.mu_y
    }

    pub fn sigma2_y(&self) -> f64 {
        self.sigma2_y
    }

    pub fn sigma_y(&self) -> f64 {
        self.sigma2_y.sqrt()
    }
}

/// Real-space population quantities of a lognormal distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedMoments {
    /// Arithmetic mean `E[X]`.
    pub alpha: f64,
    /// Harmonic mean `1 / E[1/X]`.
    pub h: f64,
    /// Geometric mean `exp(mu_y)`.
    pub g: f64,
    /// Variance `E[(X - alpha)^2]`.
    pub beta2: f64,
    /// Squared coefficient of variation.
    pub cv2: f64,
    /// `alpha / h`.
    pub omega: f64,
    /// `omega - 1`.
    pub k: f64,
}

pub fn derive_moments(p: LogNormalParams) -> Result<DerivedMoments> {
    let (mu, s2) = (p.mu_y, p.sigma2_y);
    let check = |field: &'static str, v: f64| -> Result<f64> {
        if v.is_finite() && v > 0.0 {
            Ok(v)
        } else {
            Err(Error::NonFinite {
                field,
                mu_y: mu,
                sigma2_y: s2,
            })
        }
    };
    let alpha = check("alpha", (mu + 0.5 * s2).exp())?;
    let h = check("h", (mu - 0.5 * s2).exp())?;
    let g = check("g", mu.exp())?;
    let k = s2.exp_m1();
    if !k.is_finite() {
        return Err(Error::NonFinite {
            field: "k",
            mu_y: mu,
            sigma2_y: s2,
        });
    }
    let omega = k + 1.0;
    let beta2 = (2.0 * mu + s2).exp() * k;
    if !beta2.is_finite() {
        return Err(Error::NonFinite {
            field: "beta2",
            mu_y: mu,
            sigma2_y: s2,
        });
    }
    Ok(DerivedMoments {
        alpha,
        h,
        g,
        beta2,
        cv2: k,
        omega,
        k,
    })
}

/// Parameters from the geometric mean `g` and relative ratio `k`:
/// `mu_y = ln g`, `sigma2_y = ln(1 + k)`.
pub fn params_from_gk(g: f64, k: f64) -> Result<LogNormalParams> {
    if !(g.is_finite() && g > 0.0) {
        return Err(domain(format!(
            "geometric mean g must be finite and > 0, got {g}"
        )));
    }
    if !(k.is_finite() && k >= 0.0) {
        return Err(domain(format!(
            "relative ratio k must be finite and >= 0, got {k}"
        )));
    }
    LogNormalParams::new(g.ln(), k.ln_1p())
}

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

fn check_x(x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(domain(format!(
            "lognormal support is positive reals, got x={x}"
        )))
    }
}

/// Lognormal density in `(mu_y, sigma2_y)` form.
pub fn pdf(x: f64, p: LogNormalParams) -> Result<f64> {
    check_x(x)?;
    if p.sigma2_y == 0.0 {
        return Err(Error::Degenerate("density undefined for sigma2_y = 0"));
    }
    let z = x.ln() - p.mu_y;
    Ok(INV_SQRT_2PI / (x * p.sigma_y()) * (-z * z / (2.0 * p.sigma2_y)).exp())
}

/// Lognormal density in `(g, k)` form.
pub fn pdf_gk(x: f64, g: f64, k: f64) -> Result<f64> {
    check_x(x)?;
    if !(g.is_finite() && g > 0.0) {
        return Err(domain(format!(
            "geometric mean g must be finite and > 0, got {g}"
        )));
    }
    if !(k.is_finite() && k >= 0.0) {
        return Err(domain(format!(
            "relative ratio k must be finite and >= 0, got {k}"
        )));
    }
    if k == 0.0 {
        return Err(Error::Degenerate("density undefined for k = 0"));
    }
    let log_omega = k.ln_1p();
    let r = (x / g).ln();
    Ok((-r * r / (2.0 * log_omega)).exp() / (x * (2.0 * PI * log_omega).sqrt()))
}

/// Stateful lognormal variate source.
///
/// Gaussian variates come from `rand_distr::StandardNormal` (Ziggurat method)
/// and are mapped to `exp(mu_y + sigma_y * z)`.
#[derive(Debug, Clone)]
pub struct LogNormalSampler {
    mu_y: f64,
    sigma_y: f64,
    rng: StreamRng,
}

impl LogNormalSampler {
    pub fn new(p: LogNormalParams, seed: u64) -> Self {
        Self {
            mu_y: p.mu_y,
            sigma_y: p.sigma_y(),
            rng: rng::stream(seed),
        }
    }

    #[inline]
    pub fn draw(&mut self) -> f64 {
        let z: f64 = self.rng.sample(StandardNormal);
        (self.mu_y + self.sigma_y * z).exp()
    }

    pub fn fill(&mut self, out: &mut [f64]) {
        for x in out {
            *x = self.draw();
        }
    }
}

/// `n` i.i.d. lognormal variates, deterministic in `(p, n, seed)`.
pub fn sample(p: LogNormalParams, n: usize, seed: u64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(domain("sample size must be >= 1"));
    }
    let mut sampler = LogNormalSampler::new(p, seed);
    let mut out = vec![0.0; n];
    sampler.fill(&mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, LN_2, SQRT_2};

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn degenerate_moments() {
        let m = derive_moments(LogNormalParams::new(0.0, 0.0).unwrap()).unwrap();
        assert_eq!((m.alpha, m.h, m.g, m.beta2), (1.0, 1.0, 1.0, 0.0));
        assert_eq!((m.cv2, m.omega, m.k), (0.0, 1.0, 0.0));
    }

    #[test]
    fn moments_at_ln2() {
        let m = derive_moments(LogNormalParams::new(0.0, LN_2).unwrap()).unwrap();
        assert!(close(m.omega, 2.0, 1e-15));
        assert!(close(m.k, 1.0, 1e-15));
        assert!(close(m.cv2, 1.0, 1e-15));
        assert_eq!(m.g, 1.0);
        assert!(close(m.alpha, SQRT_2, 1e-15));
        assert!(close(m.h, 1.0 / SQRT_2, 1e-15));

        let m = derive_moments(LogNormalParams::new(1.0, LN_2).unwrap()).unwrap();
        assert!(close(m.g, E, 1e-15));
        assert!(close(m.alpha, E * SQRT_2, 1e-15));
        assert!(close(m.h, E / SQRT_2, 1e-15));
        assert!(close(m.k, 1.0, 1e-15));
    }

    #[test]
    fn omega_is_k_plus_one() {
        for s2 in [0.0, 1e-9, 0.3, 1.0, 7.5] {
            let m = derive_moments(LogNormalParams::new(-0.4, s2).unwrap()).unwrap();
            assert_eq!(m.omega, m.k + 1.0);
            assert_eq!(m.cv2, m.k);
        }
    }

    #[test]
    fn overflow_names_field() {
        let err = derive_moments(LogNormalParams::new(0.0, 2000.0).unwrap()).unwrap_err();
        assert!(
            matches!(err, Error::NonFinite { field: "alpha", .. }),
            "{err:?}"
        );
        let err = derive_moments(LogNormalParams::new(-700.0, 100.0).unwrap()).unwrap_err();
        assert!(
            matches!(err, Error::NonFinite { field: "h", .. }),
            "{err:?}"
        );
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(LogNormalParams::new(0.0, -1e-3).is_err());
        assert!(LogNormalParams::new(f64::NAN, 1.0).is_err());
        assert!(LogNormalParams::new(0.0, f64::INFINITY).is_err());
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn gk_conversion() {
        let p = params_from_gk(1.0, 0.0).unwrap();
        assert_eq!((p.mu_y(), p.sigma2_y()), (0.0, 0.0));
        let p = params_from_gk(1.0, 1.0).unwrap();
        assert_eq!(p.mu_y(), 0.0);
        assert!(close(p.sigma2_y(), LN_2, 1e-15));
        let p = params_from_gk(2.718282, E - 1.0).unwrap();
        assert!((p.mu_y() - 1.0).abs() < 1e-6);
        assert!(close(p.sigma2_y(), 1.0, 1e-15));

        assert!(matches!(params_from_gk(0.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(params_from_gk(-1.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(params_from_gk(1.0, -0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn pdf_values() {
        let p = LogNormalParams::new(0.0, 1.0).unwrap();
        assert!(close(pdf(1.0, p).unwrap(), 0.398_942_280_401_432_7, 1e-14));
        // mpmath: exp(-1)/sqrt(2*pi)*exp(-1/2)
        assert!(close(pdf(E, p).unwrap(), 0.089_016_054_915_951_47, 1e-13));
        assert!(matches!(pdf(0.0, p), Err(Error::Domain(_))));
        assert!(matches!(pdf(-1.0, p), Err(Error::Domain(_))));
        let point = LogNormalParams::new(0.0, 0.0).unwrap();
        assert!(matches!(pdf(1.0, point), Err(Error::Degenerate(_))));
    }

    #[test]
    fn pdf_gk_values() {
        assert!(close(
            pdf_gk(1.0, 1.0, E - 1.0).unwrap(),
            0.398_942_280_401_432_7,
            1e-14
        ));
        for (g, k) in [(0.5, 0.2), (3.0, 4.0), (1.0, 1e-3)] {
            let expected = 1.0 / (g * (2.0 * PI * f64::ln_1p(k)).sqrt());
            assert!(close(pdf_gk(g, g, k).unwrap(), expected, 1e-14));
        }
        let direct = pdf(2.0, params_from_gk(1.5, 0.4).unwrap()).unwrap();
        assert!(close(pdf_gk(2.0, 1.5, 0.4).unwrap(), direct, 1e-12));
        // mpmath reference
        assert!(close(direct, 0.304_084_621_074_330_4, 1e-13));
        assert!(matches!(pdf_gk(1.0, 1.0, 0.0), Err(Error::Degenerate(_))));
        assert!(matches!(pdf_gk(0.0, 1.0, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn point_mass_samples_are_exact() {
        let p = LogNormalParams::new(0.0, 0.0).unwrap();
        for seed in [0, 1, u64::MAX] {
            assert_eq!(sample(p, 5, seed).unwrap(), vec![1.0; 5]);
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let p = LogNormalParams::new(0.2, 0.8).unwrap();
        let a = sample(p, 1000, 77).unwrap();
        let b = sample(p, 1000, 77).unwrap();
        assert!(a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits()));
        assert!(a.iter().all(|&x| x > 0.0));
        assert_ne!(a, sample(p, 1000, 78).unwrap());
        assert!(sample(p, 0, 1).is_err());
    }

    #[test]
    fn log_sample_mean_converges() {
        let p = LogNormalParams::new(0.0, 0.25).unwrap();
        let xs = sample(p, 1_000_000, 0x5EED).unwrap();
        let mean_log = xs.iter().map(|x| x.ln()).sum::<f64>() / xs.len() as f64;
        assert!(
            mean_log.abs() < 4.0 * 0.5 / 1e3,
            "mean of ln x = {mean_log}"
        );
    }
}
