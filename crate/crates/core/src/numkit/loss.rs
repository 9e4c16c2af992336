//! Training losses: MAE, MSE, and the commuter-overlap loss.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Loss selector.
///
/// `Cpc` is the overlap loss `1 - 2*sum(min(p, t)) / (sum(p) + sum(t))`,
/// which lies in `[0, 1]` for nonnegative inputs and is 0 exactly when the
/// two sequences are identical. A time series is treated as one flat
/// collection of values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum LossKind {
    Mae,
    Mse,
    Cpc,
}

fn check_lengths(predicted: &[f64], target: &[f64]) -> Result<()> {
    if predicted.len() != target.len() || predicted.is_empty() {
        return Err(Error::Shape(format!(
            "loss over sequences of length {} and {}",
            predicted.len(),
            target.len()
        )));
    }
    Ok(())
}

/// Loss averaged (MAE/MSE) or pooled (CPC) over the sequence.
pub fn loss_value(kind: LossKind, predicted: &[f64], target: &[f64]) -> Result<f64> {
    check_lengths(predicted, target)?;
    let n = predicted.len() as f64;
    let v = match kind {
        LossKind::Mae => {
            predicted.iter().zip(target).map(|(p, t)| (p - t).abs()).sum::<f64>() / n
        }
        LossKind::Mse => {
            predicted.iter().zip(target).map(|(p, t)| (p - t) * (p - t)).sum::<f64>() / n
        }
        LossKind::Cpc => {
            let overlap: f64 = predicted.iter().zip(target).map(|(p, t)| p.min(*t)).sum();
            let total: f64 = predicted.iter().sum::<f64>() + target.iter().sum::<f64>();
            if total == 0.0 {
                // Both sequences all-zero: identical empty flows.
                0.0
            } else {
                1.0 - 2.0 * overlap / total
            }
        }
    };
    Ok(v)
}

/// Gradient of [`loss_value`] with respect to each predicted entry.
///
/// At MAE kinks (predicted equal to target) the subgradient 0 is returned,
/// so exact fits are stationary.
pub fn loss_gradient(kind: LossKind, predicted: &[f64], target: &[f64]) -> Result<Vec<f64>> {
    check_lengths(predicted, target)?;
    let n = predicted.len() as f64;
    let g = match kind {
        LossKind::Mae => predicted
            .iter()
            .zip(target)
            .map(|(p, t)| {
                if p > t {
                    1.0 / n
                } else if p < t {
                    -1.0 / n
                } else {
                    0.0
                }
            })
            .collect(),
        LossKind::Mse => predicted.iter().zip(target).map(|(p, t)| 2.0 * (p - t) / n).collect(),
        LossKind::Cpc => {
            let overlap: f64 = predicted.iter().zip(target).map(|(p, t)| p.min(*t)).sum();
            let total: f64 = predicted.iter().sum::<f64>() + target.iter().sum::<f64>();
            if total == 0.0 {
                vec![0.0; predicted.len()]
            } else {
                // d/dp of 1 - 2*M/S with dM/dp = [p < t], dS/dp = 1.
                predicted
                    .iter()
                    .zip(target)
                    .map(|(p, t)| {
                        let dmin = if p < t { 1.0 } else { 0.0 };
                        -2.0 * (dmin * total - overlap) / (total * total)
                    })
                    .collect()
            }
        }
    };
    Ok(g)
}
