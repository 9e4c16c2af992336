//! The two learned forecasters: a feedforward baseline and the LSTM with
//! per-series training and backpropagation through time.

mod ann;
mod init;
mod lstm;
mod train;

pub use ann::{AnnModel, ANN_HIDDEN_WIDTH};
pub use lstm::{LstmModel, LSTM_HIDDEN_WIDTH};
pub use train::{
    evaluate, train_ann, train_lstm, Evaluation, SeriesForecaster, TrainConfig, BPTT_CLIP_NORM,
};
