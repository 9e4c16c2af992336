//! Feedforward baseline: two ReLU hidden layers and a linear scalar head.

use alloc::format;
use alloc::vec::Vec;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numkit::{dropout_mask, AdamConfig, AdamState, Matrix};
use crate::neural::init::xavier_uniform;
use crate::neural::TrainConfig;

/// Paper hidden width (both layers).
pub const ANN_HIDDEN_WIDTH: usize = 200;

/// Densely connected regression net `relu(W2 relu(W1 x + b1) + b2)` with a
/// linear scalar output; inverted-dropout masks sit between layers during
/// training only.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AnnModel {
    input_dim: usize,
    h1: usize,
    h2: usize,
    dropout: f64,
    w1: Matrix,
    b1: Matrix,
    w2: Matrix,
    b2: Matrix,
    w3: Matrix,
    b3: Matrix,
    adam: AdamState,
}

pub(crate) struct AnnCache {
    pub a1: Vec<f64>,
    pub a1_m: Vec<f64>,
    pub a2: Vec<f64>,
    pub a2_m: Vec<f64>,
    pub mask1: Option<Vec<f64>>,
    pub mask2: Option<Vec<f64>>,
    pub output: f64,
}

pub(crate) struct AnnGrads {
    pub w1: Matrix,
    pub b1: Matrix,
    pub w2: Matrix,
    pub b2: Matrix,
    pub w3: Matrix,
    pub b3: Matrix,
}

impl AnnGrads {
    pub fn zeros(model: &AnnModel) -> Self {
        Self {
            w1: Matrix::zeros(model.h1, model.input_dim),
            b1: Matrix::zeros(1, model.h1),
            w2: Matrix::zeros(model.h2, model.h1),
            b2: Matrix::zeros(1, model.h2),
            w3: Matrix::zeros(1, model.h2),
            b3: Matrix::zeros(1, 1),
        }
    }

    pub fn as_refs(&self) -> [&Matrix; 6] {
        [&self.w1, &self.b1, &self.w2, &self.b2, &self.w3, &self.b3]
    }
}

impl AnnModel {
    pub fn new(input_dim: usize, h1: usize, h2: usize, cfg: &TrainConfig) -> Result<Self> {
        if input_dim == 0 || h1 == 0 || h2 == 0 {
            return Err(Error::Param("ann dimensions must be positive".into()));
        }
        cfg.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let w1 = xavier_uniform(h1, input_dim, &mut rng);
        let b1 = Matrix::zeros(1, h1);
        let w2 = xavier_uniform(h2, h1, &mut rng);
        let b2 = Matrix::zeros(1, h2);
        let w3 = xavier_uniform(1, h2, &mut rng);
        let b3 = Matrix::zeros(1, 1);
        let adam = AdamState::new(
            &[&w1, &b1, &w2, &b2, &w3, &b3],
            AdamConfig { learning_rate: cfg.learning_rate, ..AdamConfig::default() },
        )?;
        Ok(Self { input_dim, h1, h2, dropout: cfg.dropout, w1, b1, w2, b2, w3, b3, adam })
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn hidden_widths(&self) -> (usize, usize) {
        (self.h1, self.h2)
    }

    pub fn dropout_rate(&self) -> f64 {
        self.dropout
    }

    pub fn optimizer_steps(&self) -> u64 {
        self.adam.step_count()
    }

    pub fn params(&self) -> [&Matrix; 6] {
        [&self.w1, &self.b1, &self.w2, &self.b2, &self.w3, &self.b3]
    }

    /// Replaces all parameters (shape-checked); used by gradient checks.
    pub fn set_params(&mut self, params: &[Matrix]) -> Result<()> {
        if params.len() != 6 {
            return Err(Error::Shape(format!("expected 6 parameter matrices, got {}", params.len())));
        }
        for (new, old) in params.iter().zip(self.params()) {
            if !new.same_shape(old) {
                return Err(Error::Shape("parameter shape mismatch".into()));
            }
        }
        self.w1 = params[0].clone();
        self.b1 = params[1].clone();
        self.w2 = params[2].clone();
        self.b2 = params[3].clone();
        self.w3 = params[4].clone();
        self.b3 = params[5].clone();
        Ok(())
    }

    pub(crate) fn apply_grads(&mut self, grads: &AnnGrads) -> Result<()> {
        let Self { w1, b1, w2, b2, w3, b3, adam, .. } = self;
        crate::numkit::adam_step(&mut [w1, b1, w2, b2, w3, b3], &grads.as_refs(), adam)
    }

    /// Scalar forecast for one scaled feature row.
    pub fn forward<R: Rng + ?Sized>(&self, x: &[f64], training: bool, rng: &mut R) -> Result<f64> {
        Ok(self.forward_cached(x, training, rng)?.output)
    }

    pub(crate) fn forward_cached<R: Rng + ?Sized>(
        &self,
        x: &[f64],
        training: bool,
        rng: &mut R,
    ) -> Result<AnnCache> {
        if x.len() != self.input_dim {
            return Err(Error::Shape(format!(
                "input width {} does not match model width {}",
                x.len(),
                self.input_dim
            )));
        }
        let mut a1 = self.w1.matvec(x);
        for (a, b) in a1.iter_mut().zip(self.b1.as_slice()) {
            *a = (*a + b).max(0.0);
        }
        let (mask1, a1_m) = if training {
            let m = dropout_mask(self.h1, self.dropout, rng)?;
            let masked = a1.iter().zip(&m).map(|(a, b)| a * b).collect();
            (Some(m), masked)
        } else {
            (None, a1.clone())
        };

        let mut a2 = self.w2.matvec(&a1_m);
        for (a, b) in a2.iter_mut().zip(self.b2.as_slice()) {
            *a = (*a + b).max(0.0);
        }
        let (mask2, a2_m) = if training {
            let m = dropout_mask(self.h2, self.dropout, rng)?;
            let masked = a2.iter().zip(&m).map(|(a, b)| a * b).collect();
            (Some(m), masked)
        } else {
            (None, a2.clone())
        };

        let output = self.w3.row(0).iter().zip(&a2_m).map(|(w, v)| w * v).sum::<f64>()
            + self.b3.get(0, 0);
        Ok(AnnCache { a1, a1_m, a2, a2_m, mask1, mask2, output })
    }

    /// Accumulates parameter gradients for one sample given `d_loss/d_output`.
    pub(crate) fn backward_into(
        &self,
        x: &[f64],
        cache: &AnnCache,
        dy: f64,
        grads: &mut AnnGrads,
    ) {
        grads.w3.add_outer(&[dy], &cache.a2_m);
        let b3 = grads.b3.get(0, 0);
        grads.b3.set(0, 0, b3 + dy);

        // back through the masked ReLU of layer 2
        let mut dz2 = alloc::vec![0.0; self.h2];
        for k in 0..self.h2 {
            let mut d = self.w3.get(0, k) * dy;
            if let Some(m) = &cache.mask2 {
                d *= m[k];
            }
            dz2[k] = if cache.a2[k] > 0.0 { d } else { 0.0 };
        }
        grads.w2.add_outer(&dz2, &cache.a1_m);
        for (acc, d) in grads.b2.as_mut_slice().iter_mut().zip(&dz2) {
            *acc += d;
        }

        let mut da1m = alloc::vec![0.0; self.h1];
        self.w2.matvec_transpose_acc(&dz2, &mut da1m);
        let mut dz1 = alloc::vec![0.0; self.h1];
        for k in 0..self.h1 {
            let mut d = da1m[k];
            if let Some(m) = &cache.mask1 {
                d *= m[k];
            }
            dz1[k] = if cache.a1[k] > 0.0 { d } else { 0.0 };
        }
        grads.w1.add_outer(&dz1, x);
        for (acc, d) in grads.b1.as_mut_slice().iter_mut().zip(&dz1) {
            *acc += d;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::{grad_check, loss_gradient, loss_value, LossKind};

    fn cfg(seed: u64) -> TrainConfig {
        TrainConfig { dropout: 0.0, ..TrainConfig::ann_defaults(seed) }
    }

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(77)
    }

    #[test]
    fn zero_parameters_output_zero() {
        let mut model = AnnModel::new(3, 4, 4, &cfg(0)).unwrap();
        let zeroed: Vec<Matrix> =
            model.params().iter().map(|p| Matrix::zeros(p.rows(), p.cols())).collect();
        model.set_params(&zeroed).unwrap();
        assert_eq!(model.forward(&[1.0, -2.0, 3.0], false, &mut rng()).unwrap(), 0.0);
    }

    #[test]
    fn inference_has_no_stochasticity() {
        let model = AnnModel::new(5, 16, 16, &cfg(1)).unwrap();
        let x = [0.1, 0.9, -0.4, 0.0, 2.0];
        let a = model.forward(&x, false, &mut rng()).unwrap();
        let b = model.forward(&x, false, &mut rng()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn width_mismatch_rejected() {
        let model = AnnModel::new(5, 4, 4, &cfg(2)).unwrap();
        assert!(model.forward(&[1.0], false, &mut rng()).is_err());
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut r = ChaCha8Rng::seed_from_u64(9);
        let model = AnnModel::new(6, 8, 8, &cfg(3)).unwrap();
        let xs: Vec<Vec<f64>> =
            (0..4).map(|_| (0..6).map(|_| r.gen_range(-1.0..1.0)).collect()).collect();
        let outputs: Vec<f64> =
            xs.iter().map(|x| model.forward(x, false, &mut rng()).unwrap()).collect();
        let targets: Vec<f64> = outputs.iter().map(|y| y + 0.5).collect();

        for kind in [LossKind::Mae, LossKind::Mse] {
            let mut grads = AnnGrads::zeros(&model);
            let ograds = loss_gradient(kind, &outputs, &targets).unwrap();
            for (x, dy) in xs.iter().zip(&ograds) {
                let cache = model.forward_cached(x, false, &mut rng()).unwrap();
                model.backward_into(x, &cache, *dy, &mut grads);
            }
            let params: Vec<Matrix> = model.params().iter().map(|&p| p.clone()).collect();
            let analytic: Vec<Matrix> = grads.as_refs().iter().map(|&g| g.clone()).collect();
            let mut probe = model.clone();
            let f = |p: &[Matrix]| {
                probe.set_params(p).unwrap();
                let out: Vec<f64> =
                    xs.iter().map(|x| probe.forward(x, false, &mut rng()).unwrap()).collect();
                loss_value(kind, &out, &targets).unwrap()
            };
            let err = grad_check(f, &params, &analytic).unwrap();
            assert!(err < 1e-4, "{kind:?}: max relative error {err}");
        }
    }
}
