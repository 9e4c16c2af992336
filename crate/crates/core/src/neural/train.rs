//! Training loops and the shared evaluation protocol.
//!
//! The LSTM trains series by series: one origin-destination pair's full year
//! sequence is one batch, the loss covers every timestep forecast, gradients
//! flow back through the whole unrolled sequence, and the optimizer steps
//! once per series. The feedforward baseline pools rows from all pairs and
//! shuffles them into fixed-size batches. Both loops are deterministic under
//! the config seed.

use alloc::format;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::metrics::{pair_axes, FlowMatrix};
use crate::neural::ann::{AnnGrads, AnnModel};
use crate::neural::lstm::LstmModel;
use crate::numkit::{loss_gradient, LossKind};
use crate::panel::ScaledSeries;

/// Global-norm ceiling applied to BPTT gradients before each step.
pub const BPTT_CLIP_NORM: f64 = 5.0;

/// Training hyperparameters. The defaults are the tuned optima: MAE loss with
/// Adam for both models, 50 epochs and dropout 0.15 for the LSTM, 170 epochs,
/// batch size 32, and dropout 0.1 for the feedforward net.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrainConfig {
    pub loss: LossKind,
    pub epochs: usize,
    pub learning_rate: f64,
    pub dropout: f64,
    /// Rows per optimizer step; used by the feedforward loop only (the LSTM
    /// batch is always one full series).
    pub batch_size: usize,
    pub seed: u64,
}

impl TrainConfig {
    pub fn lstm_defaults(seed: u64) -> Self {
        Self { loss: LossKind::Mae, epochs: 50, learning_rate: 1e-3, dropout: 0.15, batch_size: 1, seed }
    }

    pub fn ann_defaults(seed: u64) -> Self {
        Self { loss: LossKind::Mae, epochs: 170, learning_rate: 1e-3, dropout: 0.1, batch_size: 32, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::Param(format!("learning rate {} must be positive", self.learning_rate)));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(Error::Param(format!("dropout {} outside [0, 1)", self.dropout)));
        }
        if self.batch_size == 0 {
            return Err(Error::Param("batch size must be at least 1".into()));
        }
        Ok(())
    }
}

fn check_collection(series: &[ScaledSeries], input_dim: usize) -> Result<()> {
    if series.is_empty() {
        return Err(Error::Param("cannot train on an empty series collection".into()));
    }
    for s in series {
        if s.is_empty() {
            return Err(Error::Param(format!("empty series {}->{}", s.origin, s.destination)));
        }
        if s.input_width() != input_dim {
            return Err(Error::Shape(format!(
                "series {}->{} width {} does not match model width {input_dim}",
                s.origin,
                s.destination,
                s.input_width()
            )));
        }
    }
    Ok(())
}

/// Trains the LSTM: per epoch, pairs are visited in shuffled order and each
/// pair's series is one batch and one Adam step, so the optimizer step count
/// grows by `series.len()` per epoch.
pub fn train_lstm(model: &mut LstmModel, series: &[ScaledSeries], cfg: &TrainConfig) -> Result<()> {
    cfg.validate()?;
    check_collection(series, model.input_dim())?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..series.len()).collect();
    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        for &idx in &order {
            let s = &series[idx];
            let cache = model.forward_cached(&s.inputs, true, &mut rng)?;
            let output_grads = loss_gradient(cfg.loss, &cache.outputs, &s.targets)?;
            let mut grads = model.backward(&s.inputs, &cache, &output_grads);
            grads.clip_global_norm(BPTT_CLIP_NORM);
            model.apply_grads(&grads)?;
        }
    }
    Ok(())
}

/// Trains the feedforward baseline on rows pooled from every series and
/// shuffled into batches of `cfg.batch_size`; one Adam step per batch.
pub fn train_ann(model: &mut AnnModel, series: &[ScaledSeries], cfg: &TrainConfig) -> Result<()> {
    cfg.validate()?;
    check_collection(series, model.input_dim())?;
    let rows: Vec<(&[f64], f64)> = series
        .iter()
        .flat_map(|s| s.inputs.iter().map(|x| x.as_slice()).zip(s.targets.iter().copied()))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..rows.len()).collect();
    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        for batch in order.chunks(cfg.batch_size) {
            let mut outputs = Vec::with_capacity(batch.len());
            let mut caches = Vec::with_capacity(batch.len());
            for &k in batch {
                let cache = model.forward_cached(rows[k].0, true, &mut rng)?;
                outputs.push(cache.output);
                caches.push(cache);
            }
            let targets: Vec<f64> = batch.iter().map(|&k| rows[k].1).collect();
            let output_grads = loss_gradient(cfg.loss, &outputs, &targets)?;
            let mut grads = AnnGrads::zeros(model);
            for ((&k, cache), dy) in batch.iter().zip(&caches).zip(&output_grads) {
                model.backward_into(rows[k].0, cache, *dy, &mut grads);
            }
            model.apply_grads(&grads)?;
        }
    }
    Ok(())
}

/// A trained model that can forecast the next flow from a scaled history.
pub trait SeriesForecaster {
    /// Scaled forecast for the final timestep of `series`.
    fn forecast_scaled(&self, series: &ScaledSeries) -> Result<f64>;
}

impl SeriesForecaster for LstmModel {
    fn forecast_scaled(&self, series: &ScaledSeries) -> Result<f64> {
        // Dropout is disabled, so the generator is never consumed.
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let outputs = self.forward(&series.inputs, false, &mut rng)?;
        Ok(*outputs.last().unwrap())
    }
}

impl SeriesForecaster for AnnModel {
    fn forecast_scaled(&self, series: &ScaledSeries) -> Result<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        self.forward(series.inputs.last().unwrap(), false, &mut rng)
    }
}

/// Forecast matrix plus the count of series that were masked out for lacking
/// features at the horizon year.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub forecast: FlowMatrix,
    pub skipped: usize,
}

/// Runs each pair's history up to `horizon_year` through the model with
/// dropout disabled, takes the final timestep's output, inverts the scaling,
/// clamps at zero, and assembles the masked forecast matrix. Series without
/// features at the horizon year are masked out and counted.
pub fn evaluate<F: SeriesForecaster>(
    forecaster: &F,
    series: &[ScaledSeries],
    horizon_year: i32,
) -> Result<Evaluation> {
    if series.is_empty() {
        return Err(Error::Param("cannot evaluate an empty series collection".into()));
    }
    let (origins, destinations) =
        pair_axes(series.iter().map(|s| (s.origin, s.destination)));
    let mut forecast = FlowMatrix::new(origins.clone(), destinations.clone());
    let mut skipped = 0usize;
    for s in series {
        let prefix = s.prefix(horizon_year);
        if prefix.years.last() != Some(&horizon_year) {
            skipped += 1;
            continue;
        }
        let scaled = forecaster.forecast_scaled(&prefix)?;
        let count = prefix.unscale_flow(scaled).max(0.0);
        let oi = origins.binary_search(&s.origin).unwrap();
        let di = destinations.binary_search(&s.destination).unwrap();
        forecast.set(oi, di, count)?;
    }
    Ok(Evaluation { forecast, skipped })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::panel::CountryCode;

    fn code(s: &str) -> CountryCode {
        CountryCode::new(s).unwrap()
    }

    /// Synthetic scaled series: a pair one-hot plus the scaled current flow,
    /// targets following a fixed affine recurrence.
    fn toy_series(n_pairs: usize, len: usize) -> Vec<ScaledSeries> {
        let names = ["AAA", "BBB", "CCC", "DDD", "EEE", "FFF", "GGG", "HHH"];
        (0..n_pairs)
            .map(|p| {
                let mut flow = 0.1 + 0.08 * p as f64;
                let mut inputs = Vec::new();
                let mut targets = Vec::new();
                for _ in 0..len {
                    let mut x = alloc::vec![0.0; n_pairs + 1];
                    x[p] = 1.0;
                    x[n_pairs] = flow;
                    let next = 0.8 * flow + 0.1;
                    inputs.push(x);
                    targets.push(next);
                    flow = next;
                }
                ScaledSeries {
                    origin: code(names[p]),
                    destination: code("ZZZ"),
                    years: (0..len as i32).map(|k| 2004 + k).collect(),
                    inputs,
                    targets,
                    flow_min: 0.0,
                    flow_max: 1.0,
                }
            })
            .collect()
    }

    #[test]
    fn zero_epochs_leave_parameters_unchanged() {
        let series = toy_series(3, 6);
        let cfg = TrainConfig { epochs: 0, ..TrainConfig::lstm_defaults(4) };
        let mut model = LstmModel::new(4, 8, &cfg).unwrap();
        let before = model.clone();
        train_lstm(&mut model, &series, &cfg).unwrap();
        assert_eq!(model, before);
    }

    #[test]
    fn one_step_per_pair_per_epoch() {
        let series = toy_series(4, 5);
        let cfg = TrainConfig { epochs: 3, ..TrainConfig::lstm_defaults(4) };
        let mut model = LstmModel::new(5, 6, &cfg).unwrap();
        train_lstm(&mut model, &series, &cfg).unwrap();
        assert_eq!(model.optimizer_steps(), 4 * 3);
    }

    #[test]
    fn training_is_bit_deterministic() {
        let series = toy_series(3, 6);
        let cfg = TrainConfig { epochs: 5, ..TrainConfig::lstm_defaults(21) };
        let run = || {
            let mut model = LstmModel::new(4, 8, &cfg).unwrap();
            train_lstm(&mut model, &series, &cfg).unwrap();
            model
        };
        assert_eq!(run(), run());

        let acfg = TrainConfig { epochs: 5, ..TrainConfig::ann_defaults(21) };
        let arun = || {
            let mut model = AnnModel::new(4, 8, 8, &acfg).unwrap();
            train_ann(&mut model, &series, &acfg).unwrap();
            model
        };
        assert_eq!(arun(), arun());
    }

    #[test]
    fn empty_collection_rejected() {
        let cfg = TrainConfig::lstm_defaults(0);
        let mut model = LstmModel::new(4, 8, &cfg).unwrap();
        assert!(matches!(train_lstm(&mut model, &[], &cfg), Err(Error::Param(_))));
    }

    #[test]
    fn lstm_fits_the_toy_recurrence() {
        let series = toy_series(3, 8);
        let cfg = TrainConfig {
            epochs: 300,
            dropout: 0.0,
            ..TrainConfig::lstm_defaults(5)
        };
        let mut model = LstmModel::new(4, 12, &cfg).unwrap();
        train_lstm(&mut model, &series, &cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut worst = 0.0f64;
        for s in &series {
            let out = model.forward(&s.inputs, false, &mut rng).unwrap();
            for (y, t) in out.iter().zip(&s.targets) {
                worst = worst.max((y - t).abs());
            }
        }
        assert!(worst < 0.05, "worst absolute error {worst}");
    }

    #[test]
    fn evaluate_masks_missing_horizon() {
        let series = toy_series(3, 6); // years 2004..=2009
        let cfg = TrainConfig::lstm_defaults(0);
        let model = LstmModel::new(4, 6, &cfg).unwrap();
        let mut shorter = series.clone();
        shorter[2] = shorter[2].prefix(2007);
        let eval = evaluate(&model, &shorter, 2009).unwrap();
        assert_eq!(eval.skipped, 1);
        assert_eq!(eval.forecast.observed_count(), 2);
    }

    #[test]
    fn evaluate_clamps_negative_outputs() {
        // A head bias of -5 on zeroed weights forecasts a negative scaled
        // value; counts must clamp to zero.
        let series = toy_series(1, 4);
        let cfg = TrainConfig::lstm_defaults(0);
        let mut model = LstmModel::new(2, 4, &cfg).unwrap();
        let mut zeroed: Vec<crate::numkit::Matrix> = model
            .params()
            .iter()
            .map(|p| crate::numkit::Matrix::zeros(p.rows(), p.cols()))
            .collect();
        zeroed[4].set(0, 0, -5.0);
        model.set_params(&zeroed).unwrap();
        let eval = evaluate(&model, &series, 2007).unwrap();
        let (i, j) = (0, 0);
        assert_eq!(eval.forecast.get(i, j), Some(0.0));
    }

    #[test]
    fn evaluate_ignores_dropout_flag() {
        let series = toy_series(2, 5);
        let cfg = TrainConfig::lstm_defaults(3);
        let model = LstmModel::new(3, 6, &cfg).unwrap();
        let a = evaluate(&model, &series, 2008).unwrap();
        let b = evaluate(&model, &series, 2008).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn ann_reaches_low_error_on_pooled_rows() {
        let series = toy_series(3, 8);
        let cfg = TrainConfig {
            epochs: 400,
            dropout: 0.0,
            batch_size: 8,
            ..TrainConfig::ann_defaults(6)
        };
        let mut model = AnnModel::new(4, 16, 16, &cfg).unwrap();
        train_ann(&mut model, &series, &cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut worst = 0.0f64;
        for s in &series {
            for (x, t) in s.inputs.iter().zip(&s.targets) {
                let y = model.forward(x, false, &mut rng).unwrap();
                worst = worst.max((y - t).abs());
            }
        }
        assert!(worst < 0.05, "worst absolute error {worst}");
    }

    #[test]
    fn invalid_config_rejected() {
        let mut cfg = TrainConfig::lstm_defaults(0);
        cfg.dropout = 1.0;
        assert!(cfg.validate().is_err());
        cfg.dropout = 0.1;
        cfg.learning_rate = 0.0;
        assert!(cfg.validate().is_err());
    }
}
