//! Monte Carlo harness: replicate simulation, empirical spectra, the
//! theoretical curve for the exact kernel and an optional stationary
//! comparison curve.
//!
//! Replicate `r` (0-based) is simulated with seed `base_seed + r`, so the
//! output does not depend on how many worker threads run the replicates.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{AvError, Result};
use crate::estimators::empirical_spectrum;
use crate::grid::ScaleGrid;
use crate::processes::{ar1_mle_fit, exact_kernel, simulate, Ar1Fit, ProcessModel};
use crate::spectrum::{AllanSpectrum, SpectrumEntry, SpectrumKind, Variant};
use crate::theory::{av_stationary, stationary_spectrum, theoretical_spectrum, StationaryAcvf};

pub const DEFAULT_REPLICATES: usize = 50;

/// Stationary curve plotted against the non-stationary theory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Comparison {
    /// White noise with the time-averaged variance `σ̄² = (1/T) Σ σ_t²`.
    StationaryAverageVariance,
    /// Stationary AR(1) fitted by maximum likelihood to each replicate;
    /// the theoretical curves (not the parameters) are averaged.
    FittedAr1,
    /// Stationary AR(1) with the model's own `(φ, σ²)`, ignoring blocks.
    StationaryAr1NoBlocks,
    None,
}

impl Comparison {
    pub fn as_str(self) -> &'static str {
        match self {
            Comparison::StationaryAverageVariance => "stationary-average-variance",
            Comparison::FittedAr1 => "fitted-ar1",
            Comparison::StationaryAr1NoBlocks => "stationary-ar1-no-blocks",
            Comparison::None => "none",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub model: ProcessModel,
    pub length: usize,
    pub replicates: usize,
    pub base_seed: u64,
    pub variant: Variant,
    pub comparison: Comparison,
}

/// The built-in case studies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Non-stationary white noise `σ_t² = t`, `T = 1000`.
    Fig1,
    /// Bias-instability, `σ² = 1`, 250 blocks of 10, `T = 2500`.
    Fig2,
    /// Block AR(1), `φ = 0.9`, `σ² = 1`, 100 blocks of 10, `T = 1000`.
    Fig3,
}

impl Preset {
    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "fig1" => Some(Preset::Fig1),
            "fig2" => Some(Preset::Fig2),
            "fig3" => Some(Preset::Fig3),
            _ => None,
        }
    }

    pub fn config(self, base_seed: u64) -> ExperimentConfig {
        let (model, length, comparison) = match self {
            Preset::Fig1 => (
                ProcessModel::ns_white_noise(),
                1000,
                Comparison::StationaryAverageVariance,
            ),
            Preset::Fig2 => (
                ProcessModel::BiasInstability {
                    sigma2: 1.0,
                    block_length: 10,
                    num_blocks: 250,
                },
                2500,
                Comparison::FittedAr1,
            ),
            Preset::Fig3 => (
                ProcessModel::BlockAr1 {
                    phi: 0.9,
                    sigma2: 1.0,
                    block_length: 10,
                    num_blocks: 100,
                },
                1000,
                Comparison::StationaryAr1NoBlocks,
            ),
        };
        ExperimentConfig {
            model,
            length,
            replicates: DEFAULT_REPLICATES,
            base_seed,
            variant: Variant::Moav,
            comparison,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(AvError::Config("replicates must be at least 1".into()));
        }
        self.model.validate(self.length)?;
        ScaleGrid::dyadic(self.length)?;
        let compatible = match self.comparison {
            Comparison::StationaryAverageVariance => matches!(
                self.model,
                ProcessModel::NsWhiteNoise { .. } | ProcessModel::WhiteNoise { .. }
            ),
            Comparison::FittedAr1 => self.length >= crate::processes::AR1_MIN_LEN,
            Comparison::StationaryAr1NoBlocks => matches!(
                self.model,
                ProcessModel::BlockAr1 { .. } | ProcessModel::StationaryAr1 { .. }
            ),
            Comparison::None => true,
        };
        if !compatible {
            return Err(AvError::Config(format!(
                "comparison '{}' does not apply to a {} model of length {}",
                self.comparison.as_str(),
                self.model.name(),
                self.length
            )));
        }
        Ok(())
    }

    pub fn replicate_seed(&self, r: usize) -> u64 {
        self.base_seed.wrapping_add(r as u64)
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub grid: ScaleGrid,
    /// Empirical spectra, in replicate order.
    pub replicates: Vec<AllanSpectrum>,
    /// Theoretical Allan variance of the exact kernel.
    pub theory: AllanSpectrum,
    pub comparison: Option<AllanSpectrum>,
    /// AR(1) fits per replicate (fitted-AR1 comparison only).
    pub fits: Vec<Option<Ar1Fit>>,
    /// Replicates whose AR(1) fit failed; they are left out of the
    /// comparison average but kept everywhere else.
    pub fit_failures: Vec<(usize, AvError)>,
}

struct Replicate {
    spectrum: AllanSpectrum,
    fit: Option<Result<Ar1Fit>>,
}

fn run_replicate(cfg: &ExperimentConfig, r: usize) -> Result<Replicate> {
    let seed = cfg.replicate_seed(r);
    let x = simulate(&cfg.model, cfg.length, seed)?;
    let spectrum = empirical_spectrum(&x, cfg.variant)?
        .with_provenance(format!("{}/seed={seed}", cfg.model.name()));
    let fit = (cfg.comparison == Comparison::FittedAr1).then(|| ar1_mle_fit(&x));
    Ok(Replicate { spectrum, fit })
}

fn average_fitted_curve(grid: &ScaleGrid, fits: &[Ar1Fit]) -> Result<AllanSpectrum> {
    let mut sums = vec![0.0; grid.len()];
    for fit in fits {
        let acvf = StationaryAcvf::ar1(fit.phi, fit.sigma2)?;
        for (acc, n) in sums.iter_mut().zip(grid.iter()) {
            *acc += av_stationary(&acvf, n);
        }
    }
    let entries = grid
        .iter()
        .zip(sums)
        .map(|(n, s)| SpectrumEntry {
            n,
            av: s / fits.len() as f64,
        })
        .collect();
    AllanSpectrum::new(
        entries,
        SpectrumKind::StationaryTheoretical,
        "fitted-ar1-average",
    )
}

/// Runs the experiment on the current rayon pool.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let grid = ScaleGrid::dyadic(cfg.length)?;
    let kernel = exact_kernel(&cfg.model, cfg.length)?;
    let theory = theoretical_spectrum(&kernel, cfg.length, cfg.variant)?
        .with_provenance(format!("{}/exact-kernel", cfg.model.name()));

    let outcomes = (0..cfg.replicates)
        .into_par_iter()
        .map(|r| run_replicate(cfg, r))
        .collect::<Result<Vec<_>>>()?;

    let mut replicates = Vec::with_capacity(outcomes.len());
    let mut fits = Vec::with_capacity(outcomes.len());
    let mut fit_failures = Vec::new();
    for (r, rep) in outcomes.into_iter().enumerate() {
        replicates.push(rep.spectrum);
        match rep.fit {
            Some(Ok(fit)) => fits.push(Some(fit)),
            Some(Err(e)) => {
                fits.push(None);
                fit_failures.push((r, e));
            }
            None => {}
        }
    }

    let comparison = match cfg.comparison {
        Comparison::StationaryAverageVariance => {
            let acvf = StationaryAcvf::white_noise(cfg.model.mean_variance(cfg.length))?;
            Some(stationary_spectrum(&acvf, cfg.length)?.with_provenance("average-variance"))
        }
        Comparison::FittedAr1 => {
            let ok: Vec<Ar1Fit> = fits.iter().flatten().copied().collect();
            if ok.is_empty() {
                return Err(AvError::Data("every replicate's AR(1) fit failed".into()));
            }
            Some(average_fitted_curve(&grid, &ok)?)
        }
        Comparison::StationaryAr1NoBlocks => {
            let (phi, sigma2) = match cfg.model {
                ProcessModel::BlockAr1 { phi, sigma2, .. }
                | ProcessModel::StationaryAr1 { phi, sigma2 } => (phi, sigma2),
                _ => unreachable!("validated above"),
            };
            let acvf = StationaryAcvf::ar1(phi, sigma2)?;
            Some(stationary_spectrum(&acvf, cfg.length)?.with_provenance("ar1-no-blocks"))
        }
        Comparison::None => None,
    };

    Ok(ExperimentResult {
        config: cfg.clone(),
        grid,
        replicates,
        theory,
        comparison,
        fits,
        fit_failures,
    })
}

/// Runs the experiment on a dedicated pool of `jobs` workers (all cores if `None`).
pub fn run_experiment_with_jobs(
    cfg: &ExperimentConfig,
    jobs: Option<usize>,
) -> Result<ExperimentResult> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = jobs {
        if jobs == 0 {
            return Err(AvError::Config("jobs must be at least 1".into()));
        }
        builder = builder.num_threads(jobs);
    }
    let pool = builder
        .build()
        .map_err(|e| AvError::Config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| run_experiment(cfg))
}

/// Per-scale summary of an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SummaryRow {
    pub n: usize,
    pub theory_ns: f64,
    pub comparison: Option<f64>,
    pub emp_mean: f64,
    /// Sample standard deviation across replicates; undefined for one replicate.
    pub emp_sd: Option<f64>,
    pub emp_se: Option<f64>,
    /// `(emp_mean - theory_ns) / theory_ns`; zero when both vanish.
    pub rel_gap: Option<f64>,
}

pub fn summarize(result: &ExperimentResult) -> Vec<SummaryRow> {
    let r = result.replicates.len();
    result
        .grid
        .iter()
        .enumerate()
        .map(|(j, n)| {
            let values: Vec<f64> = result
                .replicates
                .iter()
                .map(|s| s.entries()[j].av)
                .collect();
            let emp_mean = values.iter().sum::<f64>() / r as f64;
            let emp_sd = (r > 1).then(|| {
                let ss: f64 = values.iter().map(|v| (v - emp_mean).powi(2)).sum();
                (ss / (r - 1) as f64).sqrt()
            });
            let emp_se = emp_sd.map(|sd| sd / (r as f64).sqrt());
            let theory_ns = result.theory.entries()[j].av;
            let rel_gap = if theory_ns != 0.0 {
                Some((emp_mean - theory_ns) / theory_ns)
            } else if emp_mean == 0.0 {
                Some(0.0)
            } else {
                None
            };
            SummaryRow {
                n,
                theory_ns,
                comparison: result.comparison.as_ref().map(|c| c.entries()[j].av),
                emp_mean,
                emp_sd,
                emp_se,
                rel_gap,
            }
        })
        .collect()
}
