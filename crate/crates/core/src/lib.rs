//! Allan variance for constant-mean processes whose covariance structure
//! may change over time.
//!
//! The crate computes
//!
//! * the empirical maximum-overlap (MOAV) and non-overlapping (NOAV)
//!   Allan variance of a signal ([`estimators`]);
//! * the theoretical Allan variance of any covariance kernel, through a
//!   closed form in time-averaged autocovariances, the classical
//!   stationary formula, and a brute-force oracle that evaluates the
//!   definition on the dense covariance matrix ([`theory`]);
//! * simulators and exact kernels for non-stationary white noise,
//!   bias-instability and block-structured AR(1) processes ([`processes`]);
//! * a seeded Monte Carlo harness comparing the three ([`experiments`]).
//!
//! Time indices are 1-based throughout, as in the formulas.
//!
//! ```
//! use avlab::{processes::{exact_kernel, ProcessModel}, theory::{moav_ns, moav_oracle}};
//!
//! let model = ProcessModel::BiasInstability { sigma2: 1.0, block_length: 10, num_blocks: 6 };
//! let kernel = exact_kernel(&model, 60).unwrap();
//! let closed_form = moav_ns(&kernel, 60, 4).unwrap();
//! let brute_force = moav_oracle(&kernel, 60, 4).unwrap();
//! assert!((closed_form - brute_force).abs() < 1e-12);
//! ```

// Parameter checks are written as `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod estimators;
pub mod experiments;
pub mod grid;
pub mod kernel;
pub mod processes;
pub mod series;
pub mod spectrum;
pub mod theory;

pub use error::{AvError, Result};
pub use grid::{make_scale_grid, ScaleGrid};
pub use kernel::{kernel_materialize, CovarianceKernel};
pub use series::TimeSeries;
pub use spectrum::{AllanSpectrum, SpectrumEntry, SpectrumKind, Variant};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/estimators.md")]
    mod estimators {}
    #[doc = include_str!("../../../book/src/stationary.md")]
    mod stationary {}
    #[doc = include_str!("../../../book/src/nonstationary.md")]
    mod nonstationary {}
    #[doc = include_str!("../../../book/src/processes.md")]
    mod processes {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
