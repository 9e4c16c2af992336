//! Numeric core for bilateral migration-flow forecasting.
//!
//! The crate is organized around the stages of a forecasting run:
//!
//! - [`numkit`] — dense matrix kernels, the Adam optimizer, loss functions,
//!   dropout, and a finite-difference gradient checker;
//! - [`panel`] — the panel data model: flow observations, feature rows,
//!   per-pair series, min-max scaling, and year-based splits;
//! - [`gti`] — search-trend index construction: keyword universe, annual
//!   aggregation, and per-pair feature assembly;
//! - [`gravity`] — the log-linear gravity baseline fitted by QR least squares;
//! - [`neural`] — the feedforward and LSTM forecasters with per-series
//!   training and backpropagation through time;
//! - [`metrics`] — the five evaluation metrics over flow matrices.
//!
//! Everything here is pure computation over owned buffers; file formats,
//! transports, and orchestration live in the companion `migcast` crate.
//! The crate is `no_std`-compatible (with `alloc`) when built without the
//! default `std` feature.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod error;
pub mod gravity;
pub mod gti;
pub mod metrics;
pub mod neural;
pub mod numkit;
pub mod panel;

pub use error::{Error, Result};
