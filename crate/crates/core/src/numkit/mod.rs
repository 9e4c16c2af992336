//! Dense numerical kernels shared by every model: matrices, the Adam
//! optimizer, loss functions, dropout, and a finite-difference gradient
//! checker. Everything is double precision.

mod adam;
mod dropout;
mod gradcheck;
mod loss;
mod matrix;

pub use adam::{adam_step, AdamConfig, AdamState};
pub use dropout::dropout_mask;
pub use gradcheck::grad_check;
pub use loss::{loss_gradient, loss_value, LossKind};
pub use matrix::Matrix;
