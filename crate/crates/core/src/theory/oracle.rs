//! Definition-level evaluation of the Allan variance.
//!
//! The oracle materializes the full covariance matrix and evaluates each
//! expected squared difference of window averages as a quadratic form
//! `wᵀ M w`. It shares nothing with the generalized-autocovariance path
//! and exists to check it.

use nalgebra::DMatrix;

use crate::error::{AvError, Result};
use crate::kernel::{check_domain, kernel_materialize, CovarianceKernel};
use crate::spectrum::Variant;

use super::generalized::{check_scale, pair_count};

/// Largest series length the dense oracle accepts (a 4096² matrix is 128 MiB).
pub const ORACLE_MAX_LEN: usize = 4096;

/// A materialized covariance matrix, shared across window lengths.
#[derive(Debug, Clone)]
pub struct DenseOracle {
    matrix: DMatrix<f64>,
}

impl DenseOracle {
    pub fn new<K: CovarianceKernel + ?Sized>(kernel: &K, len: usize) -> Result<Self> {
        if len > ORACLE_MAX_LEN {
            return Err(AvError::Resource {
                len,
                cap: ORACLE_MAX_LEN,
            });
        }
        Ok(Self {
            matrix: kernel_materialize(kernel, len)?,
        })
    }

    pub fn len(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.matrix.nrows() == 0
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// `E[(x̄_later - x̄_earlier)²]` for two windows of length `n` whose
    /// first observations are at 1-based `earlier` and `later`.
    fn expected_square_difference(&self, earlier: usize, later: usize, n: usize) -> f64 {
        let inv = 1.0 / n as f64;
        let mut idx = Vec::with_capacity(2 * n);
        let mut w = Vec::with_capacity(2 * n);
        for i in 0..n {
            idx.push(earlier - 1 + i);
            w.push(-inv);
        }
        for i in 0..n {
            idx.push(later - 1 + i);
            w.push(inv);
        }
        let mut q = 0.0;
        for (a, &i) in idx.iter().enumerate() {
            let row: f64 = idx
                .iter()
                .zip(&w)
                .map(|(&j, wj)| self.matrix[(i, j)] * wj)
                .sum();
            q += w[a] * row;
        }
        q
    }

    pub fn moav(&self, n: usize) -> Result<f64> {
        let len = self.len();
        check_scale(len, n)?;
        let m = pair_count(len, n, Variant::Moav);
        let total: f64 = (2 * n..=len)
            .map(|k| self.expected_square_difference(k - 2 * n + 1, k - n + 1, n))
            .sum();
        Ok(total / (2.0 * m as f64))
    }

    pub fn noav(&self, n: usize) -> Result<f64> {
        let len = self.len();
        check_scale(len, n)?;
        let m = pair_count(len, n, Variant::Noav);
        let total: f64 = (1..=m)
            .map(|k| self.expected_square_difference((2 * k - 2) * n + 1, (2 * k - 1) * n + 1, n))
            .sum();
        Ok(total / (2.0 * m as f64))
    }

    pub fn allan_variance(&self, n: usize, variant: Variant) -> Result<f64> {
        match variant {
            Variant::Moav => self.moav(n),
            Variant::Noav => self.noav(n),
        }
    }
}

/// Maximum-overlap Allan variance straight from its definition.
pub fn moav_oracle<K: CovarianceKernel + ?Sized>(kernel: &K, len: usize, n: usize) -> Result<f64> {
    check_scale(len, n)?;
    DenseOracle::new(kernel, len)?.moav(n)
}

/// Non-overlapping Allan variance straight from its definition.
pub fn noav_oracle<K: CovarianceKernel + ?Sized>(kernel: &K, len: usize, n: usize) -> Result<f64> {
    check_scale(len, n)?;
    DenseOracle::new(kernel, len)?.noav(n)
}

/// Averages of the within-window and cross-window covariance blocks.
///
/// `σ̄_t` is the variance of a window average (the mean of the `n x n`
/// covariance block of that window) and `γ̄_t` the covariance of the two
/// averages that are differenced. The Allan variance is `σ̄ - γ̄`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMoments {
    variant: Variant,
    n: usize,
    /// MOAV: `σ̄_t` for `t = n..T`; NOAV: `σ̄_j` for blocks `j = 1..2m`.
    sigma_bar_t: Vec<f64>,
    /// MOAV: `γ̄_t` for `t = 2n..T`; NOAV: `γ̄_k` for pairs `k = 1..m`.
    gamma_bar_t: Vec<f64>,
    sigma_bar: f64,
    gamma_bar: f64,
}

impl BlockMoments {
    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn window(&self) -> usize {
        self.n
    }

    fn sigma_offset(&self) -> usize {
        match self.variant {
            Variant::Moav => self.n,
            Variant::Noav => 1,
        }
    }

    fn gamma_offset(&self) -> usize {
        match self.variant {
            Variant::Moav => 2 * self.n,
            Variant::Noav => 1,
        }
    }

    /// `σ̄_t` (MOAV, window ending at `t`) or `σ̄_j` (NOAV, block `j`).
    pub fn sigma_bar_at(&self, t: usize) -> Option<f64> {
        t.checked_sub(self.sigma_offset())
            .and_then(|i| self.sigma_bar_t.get(i))
            .copied()
    }

    /// `γ̄_t` (MOAV, later window ending at `t`) or `γ̄_k` (NOAV, pair `k`).
    pub fn gamma_bar_at(&self, t: usize) -> Option<f64> {
        t.checked_sub(self.gamma_offset())
            .and_then(|i| self.gamma_bar_t.get(i))
            .copied()
    }

    pub fn sigma_bar(&self) -> f64 {
        self.sigma_bar
    }

    pub fn gamma_bar(&self) -> f64 {
        self.gamma_bar
    }

    pub fn allan_variance(&self) -> f64 {
        self.sigma_bar - self.gamma_bar
    }
}

/// Mean of `cov(X_i, X_j)` over `i` in the window starting at `a` and `j` in
/// the window starting at `b` (1-based, both of length `n`).
fn block_mean<K: CovarianceKernel + ?Sized>(kernel: &K, a: usize, b: usize, n: usize) -> f64 {
    let mut acc = 0.0;
    for i in a..a + n {
        for j in b..b + n {
            acc += kernel.cov(i, j);
        }
    }
    acc / (n * n) as f64
}

pub fn block_moments<K: CovarianceKernel + ?Sized>(
    kernel: &K,
    len: usize,
    n: usize,
    variant: Variant,
) -> Result<BlockMoments> {
    check_scale(len, n)?;
    check_domain(kernel, len)?;
    let m = pair_count(len, n, variant) as f64;
    let (sigma_bar_t, gamma_bar_t, sigma_bar, gamma_bar) = match variant {
        Variant::Moav => {
            let sigma: Vec<f64> = (n..=len)
                .map(|t| block_mean(kernel, t + 1 - n, t + 1 - n, n))
                .collect();
            let gamma: Vec<f64> = (2 * n..=len)
                .map(|t| block_mean(kernel, t + 1 - 2 * n, t + 1 - n, n))
                .collect();
            let sigma_at = |t: usize| sigma[t - n];
            let sigma_bar = (2 * n..=len)
                .map(|t| sigma_at(t) + sigma_at(t - n))
                .sum::<f64>()
                / (2.0 * m);
            let gamma_bar = gamma.iter().sum::<f64>() / m;
            (sigma, gamma, sigma_bar, gamma_bar)
        }
        Variant::Noav => {
            let pairs = pair_count(len, n, variant);
            let sigma: Vec<f64> = (1..=2 * pairs)
                .map(|j| block_mean(kernel, (j - 1) * n + 1, (j - 1) * n + 1, n))
                .collect();
            let gamma: Vec<f64> = (1..=pairs)
                .map(|k| block_mean(kernel, (2 * k - 2) * n + 1, (2 * k - 1) * n + 1, n))
                .collect();
            let sigma_bar = sigma.iter().sum::<f64>() / (2.0 * m);
            let gamma_bar = gamma.iter().sum::<f64>() / m;
            (sigma, gamma, sigma_bar, gamma_bar)
        }
    };
    Ok(BlockMoments {
        variant,
        n,
        sigma_bar_t,
        gamma_bar_t,
        sigma_bar,
        gamma_bar,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{FnKernel, ZeroKernel};
    use crate::theory::StationaryAcvf;

    #[test]
    fn unit_white_noise_by_brute_force() {
        let wn = StationaryAcvf::white_noise(1.0).unwrap();
        assert!((moav_oracle(&wn, 16, 2).unwrap() - 0.5).abs() < 1e-15);
        assert!((noav_oracle(&wn, 16, 2).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn zero_kernel() {
        assert_eq!(moav_oracle(&ZeroKernel, 16, 4).unwrap(), 0.0);
        assert_eq!(noav_oracle(&ZeroKernel, 16, 4).unwrap(), 0.0);
        let bm = block_moments(&ZeroKernel, 16, 4, Variant::Moav).unwrap();
        assert_eq!((bm.sigma_bar(), bm.gamma_bar()), (0.0, 0.0));
    }

    #[test]
    fn cap_is_a_resource_error() {
        assert_eq!(
            moav_oracle(&ZeroKernel, ORACLE_MAX_LEN + 1, 1).unwrap_err(),
            AvError::Resource {
                len: ORACLE_MAX_LEN + 1,
                cap: ORACLE_MAX_LEN
            }
        );
    }

    #[test]
    fn block_moments_of_white_noise() {
        let wn = StationaryAcvf::white_noise(1.0).unwrap();
        let bm = block_moments(&wn, 12, 2, Variant::Moav).unwrap();
        assert!((2..=12).all(|t| bm.sigma_bar_at(t) == Some(0.5)));
        assert!((4..=12).all(|t| bm.gamma_bar_at(t) == Some(0.0)));
        assert_eq!(bm.sigma_bar_at(1), None);
        assert_eq!(bm.allan_variance(), 0.5);
        let bm = block_moments(&wn, 12, 2, Variant::Noav).unwrap();
        assert!((1..=6).all(|j| bm.sigma_bar_at(j) == Some(0.5)));
        assert!((1..=3).all(|k| bm.gamma_bar_at(k) == Some(0.0)));
        assert_eq!(bm.gamma_bar_at(4), None);
        assert_eq!(bm.allan_variance(), 0.5);
    }

    #[test]
    fn bias_instability_windows_inside_a_block() {
        // Constant within blocks of 10: a window pair lying in one block has
        // an all-ones cross block, so γ̄_t = σ².
        let k = FnKernel::new(|s: usize, t: usize| f64::from((s - 1) / 10 == (t - 1) / 10));
        let bm = block_moments(&k, 40, 2, Variant::Moav).unwrap();
        for t in [4, 5, 10, 14, 20, 40] {
            assert_eq!(bm.gamma_bar_at(t), Some(1.0), "t = {t}");
        }
        // [8,9] vs [10,11]: half the cross pairs share block 1.
        assert_eq!(bm.gamma_bar_at(11), Some(0.5));
        // [9,10] vs [11,12]: no shared block.
        assert_eq!(bm.gamma_bar_at(12), Some(0.0));
        assert_eq!(bm.gamma_bar_at(3), None);
        assert_eq!(bm.sigma_bar_at(2), Some(1.0));
        assert_eq!(bm.sigma_bar_at(11), Some(0.5));
    }
}
