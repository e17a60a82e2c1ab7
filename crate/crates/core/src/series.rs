use crate::error::{AvError, Result};

/// Smallest length for which both estimators admit `n = 1`.
pub const MIN_SERIES_LEN: usize = 4;

/// A finite, regularly sampled real signal `x_1..x_T`.
///
/// Values are stored 0-based; formulas elsewhere in the crate speak of
/// `x_t` with `t` starting at 1.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < MIN_SERIES_LEN {
            return Err(AvError::InvalidLength {
                len: values.len(),
                min: MIN_SERIES_LEN,
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(AvError::NonFinite { index: index + 1 });
        }
        Ok(Self { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.values
    }
}

impl TryFrom<Vec<f64>> for TimeSeries {
    type Error = AvError;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl AsRef<[f64]> for TimeSeries {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_short_series() {
        assert_eq!(
            TimeSeries::new(vec![1.0, 2.0, 3.0]),
            Err(AvError::InvalidLength { len: 3, min: 4 })
        );
    }

    #[test]
    fn rejects_non_finite_with_one_based_index() {
        let err = TimeSeries::new(vec![0.0, 1.0, f64::NAN, 2.0]).unwrap_err();
        assert_eq!(err, AvError::NonFinite { index: 3 });
        assert!(TimeSeries::new(vec![0.0, f64::INFINITY, 1.0, 2.0]).is_err());
    }
}
