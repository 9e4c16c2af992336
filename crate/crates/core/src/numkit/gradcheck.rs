//! Finite-difference gradient verification.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::numkit::Matrix;

/// Central-difference step.
const STEP: f64 = 1e-5;

/// Coordinate budget; larger parameter sets are strided down to roughly this
/// many probes (coordinates `0, s, 2s, ...` with `s = ceil(total / 10_000)`).
const MAX_COORDS: usize = 10_000;

/// Compares `analytic` against central finite differences of `f` and returns
/// the maximum relative error `|a - n| / max(1e-8, |a| + |n|)` over the
/// checked coordinates.
pub fn grad_check<F>(mut f: F, params: &[Matrix], analytic: &[Matrix]) -> Result<f64>
where
    F: FnMut(&[Matrix]) -> f64,
{
    if params.len() != analytic.len()
        || params.iter().zip(analytic).any(|(p, a)| !p.same_shape(a))
    {
        return Err(Error::Shape("grad_check: analytic gradients do not match parameters".into()));
    }
    let total: usize = params.iter().map(Matrix::len).sum();
    let stride = total.div_ceil(MAX_COORDS).max(1);

    let mut work: Vec<Matrix> = params.to_vec();
    let mut max_rel = 0.0f64;
    let mut coord = 0usize;
    for (mi, m) in params.iter().enumerate() {
        for i in 0..m.len() {
            let checked = coord % stride == 0;
            coord += 1;
            if !checked {
                continue;
            }
            let orig = m.as_slice()[i];
            work[mi].as_mut_slice()[i] = orig + STEP;
            let plus = f(&work);
            work[mi].as_mut_slice()[i] = orig - STEP;
            let minus = f(&work);
            work[mi].as_mut_slice()[i] = orig;
            if !plus.is_finite() || !minus.is_finite() {
                return Err(Error::Numerical(format!(
                    "non-finite objective at probe (matrix {mi}, entry {i})"
                )));
            }
            let numeric = (plus - minus) / (2.0 * STEP);
            let a = analytic[mi].as_slice()[i];
            let rel = (a - numeric).abs() / (a.abs() + numeric.abs()).max(1e-8);
            if rel > max_rel {
                max_rel = rel;
            }
        }
    }
    Ok(max_rel)
}
