use crate::error::{AvError, Result};
use crate::series::MIN_SERIES_LEN;

/// Dyadic window lengths `n_j = 2^(j-1)`, `j = 1..J`, with `2 n_J <= T`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaleGrid {
    windows: Vec<usize>,
}

impl ScaleGrid {
    /// Build the grid for a series of length `len`.
    ///
    /// `J` is the largest integer with `2^J <= len`, so every window length
    /// admits at least one overlapping difference and one disjoint pair.
    pub fn dyadic(len: usize) -> Result<Self> {
        if len < MIN_SERIES_LEN {
            return Err(AvError::InvalidLength {
                len,
                min: MIN_SERIES_LEN,
            });
        }
        let windows = std::iter::successors(Some(1usize), |n| n.checked_mul(2))
            .take_while(|n| n.checked_mul(2).is_some_and(|w| w <= len))
            .collect();
        Ok(Self { windows })
    }

    pub fn windows(&self) -> &[usize] {
        &self.windows
    }

    /// `J`, the number of scales.
    pub fn len(&self) -> usize {
        self.windows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.windows.is_empty()
    }

    pub fn max_window(&self) -> usize {
        *self.windows.last().expect("a dyadic grid is never empty")
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.windows.iter().copied()
    }
}

/// Shorthand for [`ScaleGrid::dyadic`].
pub fn make_scale_grid(len: usize) -> Result<ScaleGrid> {
    ScaleGrid::dyadic(len)
}
