//! Theoretical Allan variance.
//!
//! Three independent routes are provided:
//!
//! * [`av_stationary`]: the classical closed form for weakly stationary
//!   processes, driven by an autocorrelation function;
//! * [`moav_ns`] / [`noav_ns`]: the closed form for any constant-mean
//!   process, driven by time-averaged autocovariances of its kernel;
//! * [`moav_oracle`] / [`noav_oracle`] and [`block_moments`]: direct
//!   evaluation of the definition from the covariance matrix.

mod generalized;
mod oracle;
mod stationary;

use rayon::prelude::*;

pub use generalized::{
    gamma_star_mo, gamma_star_no, gamma_tilde_mo, gamma_tilde_no, moav_ns, noav_ns, pair_count,
    theoretical_av, GeneralizedAcvf,
};
pub use oracle::{
    block_moments, moav_oracle, noav_oracle, BlockMoments, DenseOracle, ORACLE_MAX_LEN,
};
pub use stationary::{av_stationary, stationary_spectrum, StationaryAcvf};

use crate::error::Result;
use crate::grid::ScaleGrid;
use crate::kernel::CovarianceKernel;
use crate::spectrum::{AllanSpectrum, SpectrumEntry, SpectrumKind, Variant};

/// Theoretical Allan variance of `kernel` over the dyadic grid for `len`.
pub fn theoretical_spectrum<K: CovarianceKernel + ?Sized>(
    kernel: &K,
    len: usize,
    variant: Variant,
) -> Result<AllanSpectrum> {
    let grid = ScaleGrid::dyadic(len)?;
    let entries = grid
        .windows()
        .par_iter()
        .map(|&n| theoretical_av(kernel, len, n, variant).map(|av| SpectrumEntry { n, av }))
        .collect::<Result<Vec<_>>>()?;
    AllanSpectrum::new(entries, SpectrumKind::theoretical(variant), "kernel")
}

/// The same spectrum evaluated through the dense oracle.
pub fn oracle_spectrum<K: CovarianceKernel + ?Sized>(
    kernel: &K,
    len: usize,
    variant: Variant,
) -> Result<AllanSpectrum> {
    let grid = ScaleGrid::dyadic(len)?;
    let oracle = DenseOracle::new(kernel, len)?;
    let entries = grid
        .windows()
        .par_iter()
        .map(|&n| {
            oracle
                .allan_variance(n, variant)
                .map(|av| SpectrumEntry { n, av })
        })
        .collect::<Result<Vec<_>>>()?;
    AllanSpectrum::new(entries, SpectrumKind::theoretical(variant), "oracle")
}
