//! The 1-norm used for every error and noise bound in the crate.

use crate::error::{Error, Result};

/// Sum of absolute values of the components.
pub fn norm1(v: &[f64]) -> Result<f64> {
    if v.is_empty() {
        return Err(Error::Domain("norm of an empty vector".into()));
    }
    Ok(norm1_unchecked(v))
}

#[inline]
pub(crate) fn norm1_unchecked(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

/// `norm1(x - y)` without allocating.
#[inline]
pub(crate) fn dist1(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b).abs()).sum()
}
