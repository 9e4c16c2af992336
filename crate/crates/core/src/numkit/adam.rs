//! Adam optimizer with bias correction.

use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::numkit::Matrix;

/// Adam hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self { learning_rate: 1e-3, beta1: 0.9, beta2: 0.999, epsilon: 1e-8 }
    }
}

/// Optimizer state: step counter plus first/second moment accumulators,
/// one matrix per parameter matrix.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AdamState {
    step: u64,
    m: Vec<Matrix>,
    v: Vec<Matrix>,
    cfg: AdamConfig,
}

impl AdamState {
    /// Zero-initialized state shaped like `params`.
    pub fn new(params: &[&Matrix], cfg: AdamConfig) -> Result<Self> {
        if !(cfg.beta1 > 0.0 && cfg.beta1 < 1.0 && cfg.beta2 > 0.0 && cfg.beta2 < 1.0) {
            return Err(Error::Param(format!(
                "adam betas must lie in (0, 1), got {} / {}",
                cfg.beta1, cfg.beta2
            )));
        }
        let m: Vec<Matrix> = params.iter().map(|p| Matrix::zeros(p.rows(), p.cols())).collect();
        let v = m.clone();
        Ok(Self { step: 0, m, v, cfg })
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    pub fn config(&self) -> &AdamConfig {
        &self.cfg
    }
}

/// One Adam update.
///
/// With step count `t` and gradient `g`:
/// `m = b1*m + (1-b1)*g`, `v = b2*v + (1-b2)*g^2`, then the bias-corrected
/// `m/(1-b1^t)` and `v/(1-b2^t)` drive `p -= lr * m_hat / (sqrt(v_hat) + eps)`.
pub fn adam_step(
    params: &mut [&mut Matrix],
    grads: &[&Matrix],
    state: &mut AdamState,
) -> Result<()> {
    if params.len() != grads.len() || params.len() != state.m.len() {
        return Err(Error::Shape(format!(
            "adam_step: {} params, {} grads, {} state slots",
            params.len(),
            grads.len(),
            state.m.len()
        )));
    }
    for ((p, g), m) in params.iter().zip(grads).zip(&state.m) {
        if !p.same_shape(g) || !p.same_shape(m) {
            return Err(Error::Shape("adam_step: parameter/gradient/state shapes differ".into()));
        }
    }

    state.step += 1;
    let t = state.step as i32;
    let cfg = state.cfg;
    let bc1 = 1.0 - cfg.beta1.powi(t);
    let bc2 = 1.0 - cfg.beta2.powi(t);

    for ((p, g), (m, v)) in params
        .iter_mut()
        .zip(grads)
        .zip(state.m.iter_mut().zip(state.v.iter_mut()))
    {
        let pd = p.as_mut_slice();
        let gd = g.as_slice();
        let md = m.as_mut_slice();
        let vd = v.as_mut_slice();
        for i in 0..pd.len() {
            let gi = gd[i];
            md[i] = cfg.beta1 * md[i] + (1.0 - cfg.beta1) * gi;
            vd[i] = cfg.beta2 * vd[i] + (1.0 - cfg.beta2) * gi * gi;
            let m_hat = md[i] / bc1;
            let v_hat = vd[i] / bc2;
            pd[i] -= cfg.learning_rate * m_hat / (v_hat.sqrt() + cfg.epsilon);
        }
    }
    Ok(())
}
