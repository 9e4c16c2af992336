//! Weight initialization.

use rand::Rng;

use crate::numkit::Matrix;

#[allow(unused_imports)]
use num_traits::Float;

/// Uniform in `±sqrt(6 / (fan_in + fan_out))` for an `out x in` matrix.
pub fn xavier_uniform<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Matrix {
    let bound = (6.0 / (rows + cols) as f64).sqrt();
    let mut m = Matrix::zeros(rows, cols);
    for v in m.as_mut_slice() {
        *v = rng.gen_range(-bound..bound);
    }
    m
}
