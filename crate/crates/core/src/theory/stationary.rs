use std::fmt;
use std::sync::Arc;

use crate::error::{AvError, Result};
use crate::grid::ScaleGrid;
use crate::kernel::CovarianceKernel;
use crate::spectrum::{AllanSpectrum, SpectrumEntry, SpectrumKind};

type Autocorrelation = Arc<dyn Fn(usize) -> f64 + Send + Sync>;

/// Autocovariance of a weakly stationary process: `γ(h) = σ² ρ(h)`.
///
/// Also usable directly as a [`CovarianceKernel`], with `cov(s, t) = γ(|s - t|)`.
#[derive(Clone)]
pub struct StationaryAcvf {
    sigma2: f64,
    rho: Autocorrelation,
}

impl StationaryAcvf {
    /// `rho` is queried for lags `h >= 1`; `ρ(0) = 1` is implied.
    pub fn new<F>(sigma2: f64, rho: F) -> Result<Self>
    where
        F: Fn(usize) -> f64 + Send + Sync + 'static,
    {
        if !(sigma2.is_finite() && sigma2 >= 0.0) {
            return Err(AvError::Config(format!(
                "process variance must be finite and non-negative, got {sigma2}"
            )));
        }
        Ok(Self {
            sigma2,
            rho: Arc::new(rho),
        })
    }

    pub fn white_noise(sigma2: f64) -> Result<Self> {
        Self::new(sigma2, |_| 0.0)
    }

    /// Stationary AR(1) `X_t = φ X_{t-1} + ε_t`, `ε_t ~ N(0, innovation_variance)`.
    pub fn ar1(phi: f64, innovation_variance: f64) -> Result<Self> {
        if !(phi.abs() < 1.0) {
            return Err(AvError::Config(format!(
                "AR(1) requires |phi| < 1, got {phi}"
            )));
        }
        if !(innovation_variance.is_finite() && innovation_variance > 0.0) {
            return Err(AvError::Config(format!(
                "innovation variance must be positive, got {innovation_variance}"
            )));
        }
        Self::new(innovation_variance / (1.0 - phi * phi), move |h| {
            phi.powi(h as i32)
        })
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn rho(&self, h: usize) -> f64 {
        if h == 0 {
            return 1.0;
        }
        let r = (self.rho)(h);
        debug_assert!(r.abs() <= 1.0 + 1e-12, "|rho({h})| = {} > 1", r.abs());
        r
    }

    pub fn gamma(&self, h: usize) -> f64 {
        self.sigma2 * self.rho(h)
    }
}

impl fmt::Debug for StationaryAcvf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StationaryAcvf")
            .field("sigma2", &self.sigma2)
            .field("rho(1)", &self.rho(1))
            .finish_non_exhaustive()
    }
}

impl CovarianceKernel for StationaryAcvf {
    fn cov(&self, s: usize, t: usize) -> f64 {
        self.gamma(s.abs_diff(t))
    }
}

/// Classical Allan variance of a weakly stationary process at window `n`:
///
/// `σ²/n² · ( n[1 - ρ(n)] + Σ_{i=1..n-1} i [2ρ(n-i) - ρ(i) - ρ(2n-i)] )`
pub fn av_stationary(acvf: &StationaryAcvf, n: usize) -> f64 {
    assert!(n >= 1, "window length must be positive");
    let nf = n as f64;
    let cross: f64 = (1..n)
        .map(|i| i as f64 * (2.0 * acvf.rho(n - i) - acvf.rho(i) - acvf.rho(2 * n - i)))
        .sum();
    acvf.sigma2() / (nf * nf) * (nf * (1.0 - acvf.rho(n)) + cross)
}

/// [`av_stationary`] over the dyadic grid for a series of length `len`.
pub fn stationary_spectrum(acvf: &StationaryAcvf, len: usize) -> Result<AllanSpectrum> {
    let entries = ScaleGrid::dyadic(len)?
        .iter()
        .map(|n| SpectrumEntry {
            n,
            av: av_stationary(acvf, n),
        })
        .collect();
    AllanSpectrum::new(entries, SpectrumKind::StationaryTheoretical, "stationary")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn white_noise_is_sigma2_over_n() {
        let wn = StationaryAcvf::white_noise(1.0).unwrap();
        assert_eq!(av_stationary(&wn, 1), 1.0);
        assert_eq!(av_stationary(&wn, 4), 0.25);
        let wn = StationaryAcvf::white_noise(2.5).unwrap();
        for n in [1, 2, 8, 64, 1024] {
            assert_relative_eq!(av_stationary(&wn, n), 2.5 / n as f64, max_relative = 1e-12);
        }
    }

    #[test]
    fn ar1_at_unit_window() {
        // n = 1 leaves only the first term: σ_X² (1 - φ).
        let ar = StationaryAcvf::ar1(0.9, 1.0).unwrap();
        assert_relative_eq!(ar.sigma2(), 1.0 / 0.19, max_relative = 1e-15);
        assert_relative_eq!(av_stationary(&ar, 1), 0.1 / 0.19, max_relative = 1e-14);
        assert!((av_stationary(&ar, 1) - 0.526316).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(StationaryAcvf::ar1(1.0, 1.0).is_err());
        assert!(StationaryAcvf::ar1(0.5, 0.0).is_err());
        assert!(StationaryAcvf::white_noise(-1.0).is_err());
    }

    #[test]
    fn acvf_is_a_kernel() {
        let ar = StationaryAcvf::ar1(0.5, 0.75).unwrap();
        assert_eq!(ar.cov(3, 3), 1.0);
        assert_eq!(ar.cov(5, 3), 0.25);
        assert_eq!(ar.cov(3, 5), 0.25);
    }
}
