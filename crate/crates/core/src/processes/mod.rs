//! Case-study processes: seeded simulators and their exact covariance kernels.
//!
//! All models have constant mean zero. Random draws come from
//! [`ChaCha20Rng`] seeded with [`SeedableRng::seed_from_u64`], with standard
//! normal variates from `rand_distr::StandardNormal`; a given
//! `(model, length, seed)` always produces the same series.

mod mle;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

pub use mle::{ar1_log_likelihood, ar1_mle_fit, Ar1Fit, AR1_MIN_LEN, PHI_MARGIN};

use crate::error::{AvError, Result};
use crate::kernel::CovarianceKernel;
use crate::series::TimeSeries;
use crate::theory::StationaryAcvf;

/// A parameterized constant-mean process.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ProcessModel {
    /// Independent `X_t ~ N(0, σ_t²)`. Without explicit `variances` the
    /// profile is `σ_t² = t`.
    NsWhiteNoise {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        variances: Option<Vec<f64>>,
    },
    WhiteNoise {
        sigma2: f64,
    },
    /// Piecewise-constant process: block `i` repeats one draw `C_i ~ N(0, σ²)`.
    BiasInstability {
        sigma2: f64,
        block_length: usize,
        num_blocks: usize,
    },
    /// Mutually independent AR(1) segments sharing `(φ, σ²)`, each started
    /// from its stationary distribution `N(0, σ²/(1 - φ²))`.
    BlockAr1 {
        phi: f64,
        sigma2: f64,
        block_length: usize,
        num_blocks: usize,
    },
    /// Stationary AR(1) `X_t = φ X_{t-1} + ε_t`, `ε_t ~ N(0, σ²)`.
    #[serde(rename = "ar1")]
    StationaryAr1 {
        phi: f64,
        sigma2: f64,
    },
}

fn positive_variance(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(AvError::Config(format!(
            "{name} must be finite and non-negative, got {v}"
        )))
    }
}

fn ar1_params(phi: f64, sigma2: f64) -> Result<()> {
    if !(phi.abs() < 1.0) {
        return Err(AvError::Config(format!(
            "phi must lie in (-1, 1), got {phi}"
        )));
    }
    if !(sigma2.is_finite() && sigma2 > 0.0) {
        return Err(AvError::Config(format!(
            "sigma2 must be positive, got {sigma2}"
        )));
    }
    Ok(())
}

impl ProcessModel {
    /// Non-stationary white noise with `σ_t² = t`.
    pub fn ns_white_noise() -> Self {
        ProcessModel::NsWhiteNoise { variances: None }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ProcessModel::NsWhiteNoise { .. } => "ns-white-noise",
            ProcessModel::WhiteNoise { .. } => "white-noise",
            ProcessModel::BiasInstability { .. } => "bias-instability",
            ProcessModel::BlockAr1 { .. } => "block-ar1",
            ProcessModel::StationaryAr1 { .. } => "ar1",
        }
    }

    /// The only admissible length, for models that pin it.
    pub fn fixed_len(&self) -> Option<usize> {
        match self {
            ProcessModel::NsWhiteNoise { variances } => variances.as_ref().map(Vec::len),
            ProcessModel::BiasInstability {
                block_length,
                num_blocks,
                ..
            }
            | ProcessModel::BlockAr1 {
                block_length,
                num_blocks,
                ..
            } => Some(block_length * num_blocks),
            _ => None,
        }
    }

    /// Checks parameters and that `len` fits the model.
    pub fn validate(&self, len: usize) -> Result<()> {
        match self {
            ProcessModel::NsWhiteNoise { variances } => {
                if let Some(v) = variances {
                    for (i, &s) in v.iter().enumerate() {
                        positive_variance(&format!("variance at t = {}", i + 1), s)?;
                    }
                }
            }
            ProcessModel::WhiteNoise { sigma2 } => positive_variance("sigma2", *sigma2)?,
            ProcessModel::BiasInstability {
                sigma2,
                block_length,
                num_blocks,
            } => {
                positive_variance("sigma2", *sigma2)?;
                if *block_length == 0 || *num_blocks == 0 {
                    return Err(AvError::Config(
                        "block_length and num_blocks must be at least 1".into(),
                    ));
                }
            }
            ProcessModel::BlockAr1 {
                phi,
                sigma2,
                block_length,
                num_blocks,
            } => {
                ar1_params(*phi, *sigma2)?;
                if *block_length == 0 || *num_blocks == 0 {
                    return Err(AvError::Config(
                        "block_length and num_blocks must be at least 1".into(),
                    ));
                }
            }
            ProcessModel::StationaryAr1 { phi, sigma2 } => ar1_params(*phi, *sigma2)?,
        }
        if let Some(fixed) = self.fixed_len() {
            if fixed != len {
                return Err(AvError::Config(format!(
                    "{} model fixes the series length to {fixed}, requested {len}",
                    self.name()
                )));
            }
        }
        Ok(())
    }

    /// Whether the covariance depends only on the lag.
    pub fn is_stationary(&self) -> bool {
        matches!(
            self,
            ProcessModel::WhiteNoise { .. } | ProcessModel::StationaryAr1 { .. }
        )
    }

    /// Autocovariance for the stationary models.
    pub fn stationary_acvf(&self) -> Option<StationaryAcvf> {
        match *self {
            ProcessModel::WhiteNoise { sigma2 } => StationaryAcvf::white_noise(sigma2).ok(),
            ProcessModel::StationaryAr1 { phi, sigma2 } => StationaryAcvf::ar1(phi, sigma2).ok(),
            _ => None,
        }
    }

    /// `σ_t²` at 1-based `t`.
    pub fn variance_at(&self, t: usize) -> f64 {
        match self {
            ProcessModel::NsWhiteNoise { variances: None } => t as f64,
            ProcessModel::NsWhiteNoise { variances: Some(v) } => v[t - 1],
            ProcessModel::WhiteNoise { sigma2 } | ProcessModel::BiasInstability { sigma2, .. } => {
                *sigma2
            }
            ProcessModel::BlockAr1 { phi, sigma2, .. }
            | ProcessModel::StationaryAr1 { phi, sigma2 } => sigma2 / (1.0 - phi * phi),
        }
    }

    /// `(1/T) Σ_t σ_t²`.
    pub fn mean_variance(&self, len: usize) -> f64 {
        (1..=len).map(|t| self.variance_at(t)).sum::<f64>() / len as f64
    }
}

/// Draws one realization of length `len`.
pub fn simulate(model: &ProcessModel, len: usize, seed: u64) -> Result<TimeSeries> {
    model.validate(len)?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut z = move || -> f64 { rng.sample(StandardNormal) };
    let values: Vec<f64> = match *model {
        ProcessModel::NsWhiteNoise { .. } | ProcessModel::WhiteNoise { .. } => (1..=len)
            .map(|t| model.variance_at(t).sqrt() * z())
            .collect(),
        ProcessModel::BiasInstability {
            sigma2,
            block_length,
            num_blocks,
        } => {
            let sd = sigma2.sqrt();
            let mut out = Vec::with_capacity(len);
            for _ in 0..num_blocks {
                let c = sd * z();
                out.extend(std::iter::repeat_n(c, block_length));
            }
            out
        }
        ProcessModel::BlockAr1 {
            phi,
            sigma2,
            block_length,
            num_blocks,
        } => {
            let mut out = Vec::with_capacity(len);
            for _ in 0..num_blocks {
                ar1_segment(phi, sigma2, block_length, &mut z, &mut out);
            }
            out
        }
        ProcessModel::StationaryAr1 { phi, sigma2 } => {
            let mut out = Vec::with_capacity(len);
            ar1_segment(phi, sigma2, len, &mut z, &mut out);
            out
        }
    };
    TimeSeries::new(values)
}

fn ar1_segment(phi: f64, sigma2: f64, len: usize, z: &mut impl FnMut() -> f64, out: &mut Vec<f64>) {
    let sd = sigma2.sqrt();
    let mut x = (sigma2 / (1.0 - phi * phi)).sqrt() * z();
    out.push(x);
    for _ in 1..len {
        x = phi * x + sd * z();
        out.push(x);
    }
}

/// Exact covariance kernel of a [`ProcessModel`] on `1..=len`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelKernel {
    model: ProcessModel,
    len: usize,
}

impl ModelKernel {
    pub fn model(&self) -> &ProcessModel {
        &self.model
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}

pub fn exact_kernel(model: &ProcessModel, len: usize) -> Result<ModelKernel> {
    model.validate(len)?;
    Ok(ModelKernel {
        model: model.clone(),
        len,
    })
}

fn same_block(s: usize, t: usize, block_length: usize) -> bool {
    (s - 1) / block_length == (t - 1) / block_length
}

impl CovarianceKernel for ModelKernel {
    fn cov(&self, s: usize, t: usize) -> f64 {
        match self.model {
            ProcessModel::NsWhiteNoise { .. } | ProcessModel::WhiteNoise { .. } => {
                if s == t {
                    self.model.variance_at(t)
                } else {
                    0.0
                }
            }
            ProcessModel::BiasInstability {
                sigma2,
                block_length,
                ..
            } => {
                if same_block(s, t, block_length) {
                    sigma2
                } else {
                    0.0
                }
            }
            ProcessModel::BlockAr1 {
                phi,
                sigma2,
                block_length,
                ..
            } => {
                if same_block(s, t, block_length) {
                    sigma2 / (1.0 - phi * phi) * phi.powi(s.abs_diff(t) as i32)
                } else {
                    0.0
                }
            }
            ProcessModel::StationaryAr1 { phi, sigma2 } => {
                sigma2 / (1.0 - phi * phi) * phi.powi(s.abs_diff(t) as i32)
            }
        }
    }

    fn domain(&self) -> Option<usize> {
        Some(self.len)
    }
}
