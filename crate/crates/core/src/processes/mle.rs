//! Exact maximum likelihood for a zero-mean Gaussian AR(1).

use crate::error::{AvError, Result};
use crate::series::TimeSeries;

/// Shortest series the fitter accepts.
pub const AR1_MIN_LEN: usize = 10;

/// The search interval for `φ` is `(-1 + PHI_MARGIN, 1 - PHI_MARGIN)`.
pub const PHI_MARGIN: f64 = 1e-6;

const GRID_POINTS: usize = 4001;
const GOLDEN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ar1Fit {
    pub phi: f64,
    /// Innovation variance.
    pub sigma2: f64,
    pub log_likelihood: f64,
    /// `φ̂` sits at the edge of the search interval; the fit is unreliable.
    pub at_boundary: bool,
}

/// Sufficient statistics: `S(φ) = (1 - φ²) x_1² + Σ_{t>=2} (x_t - φ x_{t-1})²`
/// is quadratic in `φ`.
struct Ar1Stats {
    len: f64,
    first_sq: f64,
    tail_sq: f64,
    cross: f64,
    lagged_sq: f64,
}

impl Ar1Stats {
    fn new(x: &[f64]) -> Self {
        let first_sq = x[0] * x[0];
        let mut tail_sq = 0.0;
        let mut cross = 0.0;
        let mut lagged_sq = 0.0;
        for w in x.windows(2) {
            tail_sq += w[1] * w[1];
            cross += w[1] * w[0];
            lagged_sq += w[0] * w[0];
        }
        Self {
            len: x.len() as f64,
            first_sq,
            tail_sq,
            cross,
            lagged_sq,
        }
    }

    fn residual_ss(&self, phi: f64) -> f64 {
        (1.0 - phi * phi) * self.first_sq + self.tail_sq - 2.0 * phi * self.cross
            + phi * phi * self.lagged_sq
    }

    /// Profile log-likelihood with `σ²` replaced by `S(φ)/T`.
    fn profile(&self, phi: f64) -> (f64, f64) {
        let sigma2 = self.residual_ss(phi) / self.len;
        let ll = -0.5 * self.len * ((2.0 * std::f64::consts::PI).ln() + sigma2.ln() + 1.0)
            + 0.5 * (1.0 - phi * phi).ln();
        (ll, sigma2)
    }
}

/// Exact Gaussian log-likelihood of a zero-mean AR(1) with innovation
/// variance `sigma2`, the first observation drawn from the stationary law.
pub fn ar1_log_likelihood(x: &[f64], phi: f64, sigma2: f64) -> f64 {
    let stats = Ar1Stats::new(x);
    let ss = stats.residual_ss(phi);
    -0.5 * stats.len * (2.0 * std::f64::consts::PI * sigma2).ln() + 0.5 * (1.0 - phi * phi).ln()
        - ss / (2.0 * sigma2)
}

/// Maximizes the exact likelihood: `σ²` is profiled out in closed form and
/// `φ` is located by a grid scan refined with golden-section search.
pub fn ar1_mle_fit(x: &TimeSeries) -> Result<Ar1Fit> {
    if x.len() < AR1_MIN_LEN {
        return Err(AvError::InvalidLength {
            len: x.len(),
            min: AR1_MIN_LEN,
        });
    }
    let stats = Ar1Stats::new(x.values());
    if stats.first_sq + stats.tail_sq == 0.0 {
        return Err(AvError::Data("AR(1) fit of an all-zero series".into()));
    }
    let lo = -1.0 + PHI_MARGIN;
    let hi = 1.0 - PHI_MARGIN;
    let step = (hi - lo) / (GRID_POINTS - 1) as f64;
    let grid_phi = |i: usize| lo + step * i as f64;

    let objective = |phi: f64| stats.profile(phi).0;
    let best = (0..GRID_POINTS)
        .map(|i| (i, objective(grid_phi(i))))
        .filter(|(_, ll)| ll.is_finite())
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(i, _)| i)
        .ok_or_else(|| AvError::Data("AR(1) likelihood is not finite anywhere".into()))?;

    let mut a = grid_phi(best.saturating_sub(1));
    let mut b = grid_phi((best + 1).min(GRID_POINTS - 1));
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (objective(c), objective(d));
    while b - a > GOLDEN_TOL {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = objective(d);
        }
    }
    let mut phi = 0.5 * (a + b);
    let grid_best = grid_phi(best);
    if objective(grid_best) > objective(phi) {
        phi = grid_best;
    }
    let (log_likelihood, sigma2) = stats.profile(phi);
    if !(sigma2 > 0.0) {
        return Err(AvError::Data(format!(
            "AR(1) innovation variance collapsed to {sigma2}"
        )));
    }
    Ok(Ar1Fit {
        phi,
        sigma2,
        log_likelihood,
        at_boundary: phi.abs() >= 1.0 - 2.0 * PHI_MARGIN,
    })
}
