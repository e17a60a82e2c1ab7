//! Covariance kernels `γ(s, t) = cov(X_s, X_t)` over 1-based time indices.
//!
//! A kernel is the complete second-order description of a constant-mean
//! process and is all the theoretical Allan variance needs. Kernels are
//! pure: the same `(s, t)` always yields the same value.

use nalgebra::DMatrix;

use crate::error::{AvError, Result};

pub trait CovarianceKernel: Send + Sync {
    /// `cov(X_s, X_t)` for 1-based indices `s, t`.
    fn cov(&self, s: usize, t: usize) -> f64;

    /// Largest admissible index, if the kernel is only defined on `1..=T`.
    fn domain(&self) -> Option<usize> {
        None
    }
}

impl<K: CovarianceKernel + ?Sized> CovarianceKernel for &K {
    fn cov(&self, s: usize, t: usize) -> f64 {
        (**self).cov(s, t)
    }

    fn domain(&self) -> Option<usize> {
        (**self).domain()
    }
}

impl<K: CovarianceKernel + ?Sized> CovarianceKernel for Box<K> {
    fn cov(&self, s: usize, t: usize) -> f64 {
        (**self).cov(s, t)
    }

    fn domain(&self) -> Option<usize> {
        (**self).domain()
    }
}

impl<K: CovarianceKernel + ?Sized> CovarianceKernel for std::sync::Arc<K> {
    fn cov(&self, s: usize, t: usize) -> f64 {
        (**self).cov(s, t)
    }

    fn domain(&self) -> Option<usize> {
        (**self).domain()
    }
}

/// Fails if `len` lies outside the kernel's domain.
pub fn check_domain<K: CovarianceKernel + ?Sized>(kernel: &K, len: usize) -> Result<()> {
    match kernel.domain() {
        Some(domain) if domain < len => Err(AvError::Domain { domain, len }),
        _ => Ok(()),
    }
}

/// The degenerate kernel of a deterministic (constant) process.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroKernel;

impl CovarianceKernel for ZeroKernel {
    fn cov(&self, _s: usize, _t: usize) -> f64 {
        0.0
    }
}

/// Kernel backed by a closure. The closure must be symmetric in its arguments.
pub struct FnKernel<F> {
    f: F,
    domain: Option<usize>,
}

impl<F> FnKernel<F>
where
    F: Fn(usize, usize) -> f64 + Send + Sync,
{
    pub fn new(f: F) -> Self {
        Self { f, domain: None }
    }

    pub fn with_domain(f: F, domain: usize) -> Self {
        Self {
            f,
            domain: Some(domain),
        }
    }
}

impl<F> CovarianceKernel for FnKernel<F>
where
    F: Fn(usize, usize) -> f64 + Send + Sync,
{
    fn cov(&self, s: usize, t: usize) -> f64 {
        (self.f)(s, t)
    }

    fn domain(&self) -> Option<usize> {
        self.domain
    }
}

/// `a · γ(s, t)`; a valid kernel for `a >= 0`.
#[derive(Debug, Clone)]
pub struct ScaledKernel<K> {
    pub factor: f64,
    pub inner: K,
}

impl<K: CovarianceKernel> CovarianceKernel for ScaledKernel<K> {
    fn cov(&self, s: usize, t: usize) -> f64 {
        self.factor * self.inner.cov(s, t)
    }

    fn domain(&self) -> Option<usize> {
        self.inner.domain()
    }
}

/// Kernel of the sum of two independent processes.
#[derive(Debug, Clone)]
pub struct SumKernel<A, B> {
    pub left: A,
    pub right: B,
}

impl<A: CovarianceKernel, B: CovarianceKernel> CovarianceKernel for SumKernel<A, B> {
    fn cov(&self, s: usize, t: usize) -> f64 {
        self.left.cov(s, t) + self.right.cov(s, t)
    }

    fn domain(&self) -> Option<usize> {
        match (self.left.domain(), self.right.domain()) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }
}

/// Dense `T x T` covariance matrix; entry `(i, j)` (0-based) is `γ(i+1, j+1)`.
pub fn kernel_materialize<K: CovarianceKernel + ?Sized>(
    kernel: &K,
    len: usize,
) -> Result<DMatrix<f64>> {
    check_domain(kernel, len)?;
    let mut m = DMatrix::zeros(len, len);
    for j in 0..len {
        for i in 0..=j {
            let v = kernel.cov(i + 1, j + 1);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    Ok(m)
}
