//! Empirical Allan variance from a realized signal.

use crate::error::{AvError, Result};
use crate::grid::ScaleGrid;
use crate::series::TimeSeries;
use crate::spectrum::{AllanSpectrum, SpectrumEntry, SpectrumKind, Variant};

/// Trailing means `x̄_t = (1/n) Σ_{i=1..n} x_{t-n+i}` for `t = n..T`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalAverages {
    n: usize,
    values: Vec<f64>,
}

impl LocalAverages {
    pub fn window(&self) -> usize {
        self.n
    }

    /// Averages in time order; entry `0` is `x̄_n`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `x̄_t` for a 1-based end index `t` in `n..=T`.
    pub fn at(&self, t: usize) -> Option<f64> {
        t.checked_sub(self.n)
            .and_then(|i| self.values.get(i))
            .copied()
    }
}

/// Running sums of the mean-centred signal; `prefix[i] = Σ_{j<i} (x_j - x̄)`.
///
/// Centring keeps the prefix sums small so differences of window sums
/// do not lose precision on signals with a large offset.
struct CenteredPrefix {
    mean: f64,
    prefix: Vec<f64>,
}

impl CenteredPrefix {
    fn new(x: &[f64]) -> Self {
        let mean = x.iter().sum::<f64>() / x.len() as f64;
        let mut prefix = Vec::with_capacity(x.len() + 1);
        let mut acc = 0.0;
        prefix.push(acc);
        for v in x {
            acc += v - mean;
            prefix.push(acc);
        }
        Self { mean, prefix }
    }

    /// Centred mean of the window of length `n` ending at 1-based `t`.
    fn centered_average(&self, t: usize, n: usize) -> f64 {
        (self.prefix[t] - self.prefix[t - n]) / n as f64
    }
}

pub fn local_averages(x: &TimeSeries, n: usize) -> Result<LocalAverages> {
    let len = x.len();
    if n == 0 || n > len {
        return Err(AvError::InvalidScale { n, len });
    }
    let p = CenteredPrefix::new(x.values());
    let values = (n..=len)
        .map(|t| p.mean + p.centered_average(t, n))
        .collect();
    Ok(LocalAverages { n, values })
}

fn check_difference_scale(len: usize, n: usize) -> Result<()> {
    if n == 0 || 2 * n > len {
        return Err(AvError::InvalidScale { n, len });
    }
    Ok(())
}

/// Sum of squared overlapping differences and the number of terms.
pub(crate) fn moav_sum(x: &[f64], n: usize) -> (f64, usize) {
    let p = CenteredPrefix::new(x);
    let mut sum = 0.0;
    let mut count = 0;
    for k in 2 * n..=x.len() {
        let d = p.centered_average(k, n) - p.centered_average(k - n, n);
        sum += d * d;
        count += 1;
    }
    (sum, count)
}

/// Sum of squared non-overlapping differences and the number of pairs.
pub(crate) fn noav_sum(x: &[f64], n: usize) -> (f64, usize) {
    let p = CenteredPrefix::new(x);
    let m = x.len() / (2 * n);
    let mut sum = 0.0;
    for k in 1..=m {
        let d = p.centered_average(2 * k * n, n) - p.centered_average((2 * k - 1) * n, n);
        sum += d * d;
    }
    (sum, m)
}

/// Maximum-overlap estimator `(1/2m*) Σ_{k=2n..T} (x̄_k - x̄_{k-n})²`, `m* = T - 2n + 1`.
pub fn moav_estimate(x: &TimeSeries, n: usize) -> Result<f64> {
    check_difference_scale(x.len(), n)?;
    let (sum, count) = moav_sum(x.values(), n);
    Ok(sum / (2.0 * count as f64))
}

/// Non-overlapping estimator over `m = floor(T / 2n)` disjoint pairs of blocks.
///
/// Observations past index `2nm` do not enter; see [`noav_dropped`].
pub fn noav_estimate(x: &TimeSeries, n: usize) -> Result<f64> {
    check_difference_scale(x.len(), n)?;
    let (sum, m) = noav_sum(x.values(), n);
    Ok(sum / (2.0 * m as f64))
}

/// Number of trailing observations the NOAV estimator ignores at window `n`.
pub fn noav_dropped(len: usize, n: usize) -> usize {
    if n == 0 {
        return 0;
    }
    len - 2 * n * (len / (2 * n))
}

pub fn estimate(x: &TimeSeries, n: usize, variant: Variant) -> Result<f64> {
    match variant {
        Variant::Moav => moav_estimate(x, n),
        Variant::Noav => noav_estimate(x, n),
    }
}

/// Estimator evaluated at every window of the dyadic grid for `x`.
pub fn empirical_spectrum(x: &TimeSeries, variant: Variant) -> Result<AllanSpectrum> {
    let grid = ScaleGrid::dyadic(x.len())?;
    let entries = grid
        .iter()
        .map(|n| estimate(x, n, variant).map(|av| SpectrumEntry { n, av }))
        .collect::<Result<Vec<_>>>()?;
    AllanSpectrum::new(entries, SpectrumKind::empirical(variant), "signal")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ts(v: &[f64]) -> TimeSeries {
        TimeSeries::new(v.to_vec()).unwrap()
    }

    fn naive_local_averages(x: &[f64], n: usize) -> Vec<f64> {
        (n..=x.len())
            .map(|t| x[t - n..t].iter().sum::<f64>() / n as f64)
            .collect()
    }

    #[test]
    fn local_averages_examples() {
        let x = ts(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(local_averages(&x, 2).unwrap().values(), &[1.5, 2.5, 3.5]);
        assert_eq!(local_averages(&x, 1).unwrap().values(), x.values());
        assert_eq!(local_averages(&x, 2).unwrap().at(2), Some(1.5));
        assert_eq!(local_averages(&x, 2).unwrap().at(1), None);
        let c = ts(&[3.25; 9]);
        for n in 1..=9 {
            assert!(local_averages(&c, n)
                .unwrap()
                .values()
                .iter()
                .all(|&v| v == 3.25));
        }
        assert_eq!(
            local_averages(&x, 5).unwrap_err(),
            AvError::InvalidScale { n: 5, len: 4 }
        );
    }

    #[test]
    fn moav_examples() {
        assert_eq!(moav_estimate(&ts(&[2.0; 10]), 3).unwrap(), 0.0);
        let alt = ts(&[1.0, -1.0, 1.0, -1.0, 1.0, -1.0]);
        assert_eq!(moav_estimate(&alt, 1).unwrap(), 2.0);
        assert_eq!(moav_estimate(&ts(&[0.0, 1.0, 0.0, 1.0]), 2).unwrap(), 0.0);
        assert!(matches!(
            moav_estimate(&ts(&[0.0; 5]), 3),
            Err(AvError::InvalidScale { n: 3, len: 5 })
        ));
    }

    #[test]
    fn noav_examples() {
        assert_eq!(noav_estimate(&ts(&[1.0, 2.0, 3.0, 4.0]), 1).unwrap(), 0.5);
        assert_eq!(noav_estimate(&ts(&[7.0; 8]), 2).unwrap(), 0.0);
        assert_eq!(
            noav_estimate(&ts(&[1.0, 2.0, 3.0, 4.0, 9.0]), 1).unwrap(),
            0.5
        );
        assert_eq!(noav_dropped(5, 1), 1);
        assert_eq!(noav_dropped(1000, 256), 488);
        assert!(noav_estimate(&ts(&[0.0; 5]), 3).is_err());
    }

    #[test]
    fn term_counts() {
        let x: Vec<f64> = (0..37).map(|i| (i as f64).sin()).collect();
        for n in 1..=18 {
            assert_eq!(moav_sum(&x, n).1, 37 - 2 * n + 1);
            assert_eq!(noav_sum(&x, n).1, 37 / (2 * n));
        }
    }

    #[test]
    fn spectrum_of_constant_is_zero() {
        let s = empirical_spectrum(&ts(&[1.5; 64]), Variant::Noav).unwrap();
        assert_eq!(s.len(), 6);
        assert!(s.values().all(|v| v == 0.0));
        assert_eq!(s.kind(), SpectrumKind::NoavEmpirical);
    }

    proptest! {
        #[test]
        fn prefix_sums_match_naive(
            x in prop::collection::vec(-1e3f64..1e3, 4..120),
            offset in -1e4f64..1e4,
            n_frac in 0.0f64..1.0,
        ) {
            let x: Vec<f64> = x.into_iter().map(|v| v + offset).collect();
            let n = 1 + ((x.len() - 1) as f64 * n_frac) as usize;
            let fast = local_averages(&ts(&x), n).unwrap();
            let slow = naive_local_averages(&x, n);
            for (a, b) in fast.values().iter().zip(&slow) {
                prop_assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0) * 10.0);
            }
        }

        #[test]
        fn shift_and_scale(
            x in prop::collection::vec(-10f64..10.0, 4..80),
            c in -100f64..100.0,
            a in -5f64..5.0,
        ) {
            let base = ts(&x);
            let shifted = ts(&x.iter().map(|v| v + c).collect::<Vec<_>>());
            let scaled = ts(&x.iter().map(|v| a * v).collect::<Vec<_>>());
            for n in ScaleGrid::dyadic(x.len()).unwrap().iter() {
                for variant in [Variant::Moav, Variant::Noav] {
                    let v = estimate(&base, n, variant).unwrap();
                    prop_assert!(v >= 0.0);
                    let vs = estimate(&shifted, n, variant).unwrap();
                    prop_assert!((vs - v).abs() <= 1e-9 * v.max(1.0));
                    let va = estimate(&scaled, n, variant).unwrap();
                    prop_assert!((va - a * a * v).abs() <= 1e-9 * (a * a * v).max(1.0));
                }
            }
        }

        #[test]
        fn variants_agree_at_full_overlap(x in prop::collection::vec(-10f64..10.0, 2..40)) {
            let n = x.len();
            let mut doubled = x.clone();
            doubled.extend(x.iter().map(|v| v * 0.5 - 1.0));
            let series = ts(&doubled);
            let mo = moav_estimate(&series, n).unwrap();
            let no = noav_estimate(&series, n).unwrap();
            prop_assert!((mo - no).abs() <= 1e-12 * mo.max(1.0));
        }
    }
}
