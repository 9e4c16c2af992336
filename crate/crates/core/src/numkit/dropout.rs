//! Inverted dropout masks.

use alloc::format;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};

/// Samples an inverted-dropout mask: each entry is 0 with probability `rate`,
/// otherwise `1/(1-rate)`, so masked activations keep their expectation and
/// inference runs with no rescaling.
pub fn dropout_mask<R: Rng + ?Sized>(width: usize, rate: f64, rng: &mut R) -> Result<Vec<f64>> {
    if !(0.0..1.0).contains(&rate) {
        return Err(Error::Param(format!("dropout rate {rate} outside [0, 1)")));
    }
    let keep = 1.0 / (1.0 - rate);
    Ok((0..width)
        .map(|_| if rng.gen::<f64>() < rate { 0.0 } else { keep })
        .collect())
}
