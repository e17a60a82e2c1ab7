//! Time-averaged ("generalized") autocovariances and the closed-form
//! Allan variance built from them.
//!
//! For a window length `n` the covariances that enter the Allan variance
//! fall into three groups:
//!
//! * `γ̃(h)`, `0 <= h < n`: pairs at lag `h` inside one window average,
//!   averaged over every window that enters the variance;
//! * `γ̃*(h)`, `1 <= h < n`: pairs at lag `h` that straddle the boundary
//!   between the two adjacent windows;
//! * `γ̃(h)`, `n <= h <= 2n - 1`: pairs at lag `h`, necessarily across the
//!   two windows.
//!
//! The overlapping (MOAV) and non-overlapping (NOAV) variants differ only
//! in which windows are averaged over. For a weakly stationary kernel all
//! three quantities reduce to `γ(h)`.

use crate::error::{AvError, Result};
use crate::kernel::{check_domain, CovarianceKernel};
use crate::spectrum::Variant;

pub(crate) fn check_scale(len: usize, n: usize) -> Result<()> {
    if n == 0 || 2 * n > len {
        return Err(AvError::InvalidScale { n, len });
    }
    Ok(())
}

/// `m* = T - 2n + 1` for MOAV, `m = floor(T / 2n)` for NOAV.
pub fn pair_count(len: usize, n: usize, variant: Variant) -> usize {
    match variant {
        Variant::Moav => len + 1 - 2 * n,
        Variant::Noav => len / (2 * n),
    }
}

fn check_tilde_lag(n: usize, h: usize) -> Result<()> {
    if h > 2 * n - 1 {
        return Err(AvError::InvalidLag {
            lag: h,
            n,
            min: 0,
            max: 2 * n - 1,
        });
    }
    Ok(())
}

fn check_star_lag(n: usize, h: usize) -> Result<()> {
    if h == 0 || h >= n {
        return Err(AvError::InvalidLag {
            lag: h,
            n,
            min: 1,
            max: n - 1,
        });
    }
    Ok(())
}

fn prepare<K: CovarianceKernel + ?Sized>(kernel: &K, len: usize, n: usize) -> Result<()> {
    check_scale(len, n)?;
    check_domain(kernel, len)
}

/// `γ̃(h)` for the overlapping variant, evaluated as the literal double sum.
pub fn gamma_tilde_mo<K: CovarianceKernel + ?Sized>(
    kernel: &K,
    len: usize,
    n: usize,
    h: usize,
) -> Result<f64> {
    prepare(kernel, len, n)?;
    check_tilde_lag(n, h)?;
    let m = pair_count(len, n, Variant::Moav) as f64;
    let mut acc = 0.0;
    if h < n {
        for t in 2 * n..=len {
            for s in 0..n - h {
                acc += kernel.cov(t - n - s - h, t - n - s) + kernel.cov(t - s - h, t - s);
            }
        }
        Ok(acc / (2.0 * m * (n - h) as f64))
    } else {
        for t in 2 * n..=len {
            for s in 0..2 * n - h {
                acc += kernel.cov(t - s - h, t - s);
            }
        }
        Ok(acc / (m * (2 * n - h) as f64))
    }
}

/// `γ̃*(h)` for the overlapping variant, evaluated as the literal double sum.
pub fn gamma_star_mo<K: CovarianceKernel + ?Sized>(
    kernel: &K,
    len: usize,
    n: usize,
    h: usize,
) -> Result<f64> {
    prepare(kernel, len, n)?;
    check_star_lag(n, h)?;
    let m = pair_count(len, n, Variant::Moav) as f64;
    let mut acc = 0.0;
    for t in 2 * n..=len {
        for s in 1..=h {
            acc += kernel.cov(t - n + s - h, t - n + s);
        }
    }
    Ok(acc / (m * h as f64))
}

/// `γ̃(h)` for the non-overlapping variant, evaluated as the literal double sum.
///
/// Far lags (`h >= n`) pair block `2k - 1` with block `2k`, so the earlier
/// index of the k-th pair starts at `2(k-1)n + 1`.
pub fn gamma_tilde_no<K: CovarianceKernel + ?Sized>(
    kernel: &K,
    len: usize,
    n: usize,
    h: usize,
) -> Result<f64> {
    prepare(kernel, len, n)?;
    check_tilde_lag(n, h)?;
    let m = pair_count(len, n, Variant::Noav);
    let mut acc = 0.0;
    if h < n {
        for k in 1..=2 * m {
            for s in 1..=n - h {
                acc += kernel.cov((k - 1) * n + s, (k - 1) * n + s + h);
            }
        }
        Ok(acc / (2.0 * m as f64 * (n - h) as f64))
    } else {
        for k in 1..=m {
            for s in 1..=2 * n - h {
                acc += kernel.cov(2 * (k - 1) * n + s, 2 * (k - 1) * n + s + h);
            }
        }
        Ok(acc / (m as f64 * (2 * n - h) as f64))
    }
}

/// `γ̃*(h)` for the non-overlapping variant, evaluated as the literal double sum.
pub fn gamma_star_no<K: CovarianceKernel + ?Sized>(
    kernel: &K,
    len: usize,
    n: usize,
    h: usize,
) -> Result<f64> {
    prepare(kernel, len, n)?;
    check_star_lag(n, h)?;
    let m = pair_count(len, n, Variant::Noav);
    let mut acc = 0.0;
    for k in 1..=m {
        for s in 1..=h {
            acc += kernel.cov((2 * k - 1) * n + s - h, (2 * k - 1) * n + s);
        }
    }
    Ok(acc / (m as f64 * h as f64))
}

/// Number of integers in `[lo, hi] ∩ [a, b]` (signed to allow empty ranges).
fn overlap(lo: isize, hi: isize, a: isize, b: isize) -> usize {
    (hi.min(b) - lo.max(a) + 1).max(0) as usize
}

/// Multiplicities with which each lag-`h` covariance `cov(X_{u-h}, X_u)`
/// enters the three defining sums. Each double sum `Σ_t Σ_s cov(...)`
/// is rewritten as `Σ_u w(u) cov(X_{u-h}, X_u)`.
struct LagWeights {
    len: usize,
    n: usize,
    variant: Variant,
}

impl LagWeights {
    /// Weight of `u` in the within-window sum for `γ̃(h)`, `h < n`.
    fn near(&self, u: usize, h: usize) -> usize {
        let (n, len) = (self.n as isize, self.len as isize);
        let (u, h) = (u as isize, h as isize);
        match self.variant {
            // t in [2n, T]; earlier window u = t - n - s, later u = t - s, s in [0, n-h-1]
            Variant::Moav => {
                overlap(2 * n, len, u + n, u + n + (n - h - 1))
                    + overlap(2 * n, len, u, u + (n - h - 1))
            }
            // u = (k-1)n + s + h, k in [1, 2m], s in [1, n-h]
            Variant::Noav => {
                let m = self.len / (2 * self.n);
                let pos = (u as usize - 1) % self.n;
                usize::from(u as usize <= 2 * m * self.n && pos >= h as usize)
            }
        }
    }

    /// Weight of `u` in the straddling sum for `γ̃*(h)`.
    fn star(&self, u: usize, h: usize) -> usize {
        match self.variant {
            // u = t - n + s, s in [1, h]
            Variant::Moav => {
                let (n, len) = (self.n as isize, self.len as isize);
                let (u, h) = (u as isize, h as isize);
                overlap(2 * n, len, u + n - h, u + n - 1)
            }
            // u = (2k-1)n + s, s in [1, h], k in [1, m]
            Variant::Noav => {
                let m = self.len / (2 * self.n);
                let block = (u - 1) / self.n + 1;
                let pos = (u - 1) % self.n + 1;
                usize::from(block.is_multiple_of(2) && block <= 2 * m && pos <= h)
            }
        }
    }

    /// Weight of `u` in the cross-window sum for `γ̃(h)`, `h >= n`.
    fn far(&self, u: usize, h: usize) -> usize {
        match self.variant {
            // u = t - s, s in [0, 2n-h-1]
            Variant::Moav => {
                let (n, len) = (self.n as isize, self.len as isize);
                let (u, h) = (u as isize, h as isize);
                overlap(2 * n, len, u, u + (2 * n - h - 1))
            }
            // u = 2(k-1)n + s + h, s in [1, 2n-h], k in [1, m]
            Variant::Noav => {
                let m = self.len / (2 * self.n);
                let pos = (u - 1) % (2 * self.n) + 1;
                usize::from(u <= 2 * m * self.n && pos > h)
            }
        }
    }
}

type LagSum<K> = fn(&K, usize, usize, usize) -> Result<f64>;

/// The generalized autocovariances at one window length.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedAcvf {
    variant: Variant,
    len: usize,
    n: usize,
    pairs: usize,
    /// `γ̃(h)` for `h = 0..2n-1`.
    tilde: Vec<f64>,
    /// `γ̃*(h)` for `h = 1..n-1`, stored at `h - 1`.
    star: Vec<f64>,
}

impl GeneralizedAcvf {
    /// All generalized autocovariances at window `n`, in `O(T n)` kernel
    /// evaluations.
    pub fn new<K: CovarianceKernel + ?Sized>(
        kernel: &K,
        len: usize,
        n: usize,
        variant: Variant,
    ) -> Result<Self> {
        prepare(kernel, len, n)?;
        let pairs = pair_count(len, n, variant);
        let weights = LagWeights { len, n, variant };
        let m = pairs as f64;
        let mut tilde = Vec::with_capacity(2 * n);
        let mut star = Vec::with_capacity(n.saturating_sub(1));
        let mut lagged = Vec::with_capacity(len);
        for h in 0..2 * n {
            lagged.clear();
            lagged.extend((h + 1..=len).map(|u| (u, kernel.cov(u - h, u))));
            let weighted = |w: &dyn Fn(usize) -> usize| -> f64 {
                lagged
                    .iter()
                    .map(|&(u, c)| match w(u) {
                        0 => 0.0,
                        k => k as f64 * c,
                    })
                    .sum()
            };
            if h < n {
                let near = weighted(&|u| weights.near(u, h));
                tilde.push(near / (2.0 * m * (n - h) as f64));
                if h > 0 {
                    star.push(weighted(&|u| weights.star(u, h)) / (m * h as f64));
                }
            } else {
                let far = weighted(&|u| weights.far(u, h));
                tilde.push(far / (m * (2 * n - h) as f64));
            }
        }
        Ok(Self {
            variant,
            len,
            n,
            pairs,
            tilde,
            star,
        })
    }

    /// Same quantities from the literal double sums, `O(T n²)`.
    pub fn direct<K: CovarianceKernel + ?Sized>(
        kernel: &K,
        len: usize,
        n: usize,
        variant: Variant,
    ) -> Result<Self> {
        prepare(kernel, len, n)?;
        let (tilde_fn, star_fn): (LagSum<K>, LagSum<K>) = match variant {
            Variant::Moav => (gamma_tilde_mo::<K>, gamma_star_mo::<K>),
            Variant::Noav => (gamma_tilde_no::<K>, gamma_star_no::<K>),
        };
        let tilde = (0..2 * n)
            .map(|h| tilde_fn(kernel, len, n, h))
            .collect::<Result<Vec<_>>>()?;
        let star = (1..n)
            .map(|h| star_fn(kernel, len, n, h))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            variant,
            len,
            n,
            pairs: pair_count(len, n, variant),
            tilde,
            star,
        })
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn series_len(&self) -> usize {
        self.len
    }

    pub fn window(&self) -> usize {
        self.n
    }

    /// `m*` or `m`, depending on the variant.
    pub fn pairs(&self) -> usize {
        self.pairs
    }

    pub fn gamma_tilde(&self, h: usize) -> Result<f64> {
        check_tilde_lag(self.n, h)?;
        Ok(self.tilde[h])
    }

    pub fn gamma_star(&self, h: usize) -> Result<f64> {
        check_star_lag(self.n, h)?;
        Ok(self.star[h - 1])
    }

    /// Closed-form Allan variance from the generalized autocovariances:
    ///
    /// `1/(2 m n²) · { 2 n m γ̃(0) + 2 [ Σ_{h=1..n-1} (2 m (n-h) γ̃(h) - m h γ̃*(h))
    ///                                 - Σ_{h=n..2n-1} m (2n-h) γ̃(h) ] }`
    ///
    /// with `m` the pair count of the variant. The `m` factors cancel
    /// analytically but are kept so the expression reads term by term.
    pub fn allan_variance(&self) -> f64 {
        let n = self.n;
        let nf = n as f64;
        let m = self.pairs as f64;
        let within: f64 = (1..n)
            .map(|h| 2.0 * m * (n - h) as f64 * self.tilde[h] - m * h as f64 * self.star[h - 1])
            .sum();
        let across: f64 = (n..2 * n)
            .map(|h| m * (2 * n - h) as f64 * self.tilde[h])
            .sum();
        (2.0 * nf * m * self.tilde[0] + 2.0 * (within - across)) / (2.0 * m * nf * nf)
    }
}

/// Theoretical maximum-overlap Allan variance of any constant-mean process.
pub fn moav_ns<K: CovarianceKernel + ?Sized>(kernel: &K, len: usize, n: usize) -> Result<f64> {
    GeneralizedAcvf::new(kernel, len, n, Variant::Moav).map(|g| g.allan_variance())
}

/// Theoretical non-overlapping Allan variance of any constant-mean process.
pub fn noav_ns<K: CovarianceKernel + ?Sized>(kernel: &K, len: usize, n: usize) -> Result<f64> {
    GeneralizedAcvf::new(kernel, len, n, Variant::Noav).map(|g| g.allan_variance())
}

pub fn theoretical_av<K: CovarianceKernel + ?Sized>(
    kernel: &K,
    len: usize,
    n: usize,
    variant: Variant,
) -> Result<f64> {
    match variant {
        Variant::Moav => moav_ns(kernel, len, n),
        Variant::Noav => noav_ns(kernel, len, n),
    }
}
