//! Panel data model: flow observations, feature rows, per-pair series,
//! min-max scaling, and year-based splits.
//!
//! File ingestion lives in the companion crate; this module owns the types,
//! the invariants, and the pure transforms.

mod scale;
mod split;
mod summary;
mod types;

pub use scale::{fit_scaler, transform, ScaledSeries, ScalerStats};
pub use split::{split, PanelSplit, SeriesSlice, SplitSpec};
pub use summary::{summarize_flows, FlowSummary};
pub use types::{
    one_hot, CountryCode, CountryRegistry, FeatureRow, FlowObservation, OneHot, PairSeries,
    YearRegistry, FIRST_YEAR, LAST_FEATURE_YEAR, LAST_YEAR,
};
