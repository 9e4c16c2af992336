//! Year-based train/validation/test partitioning.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::panel::types::PairSeries;

/// Disjoint year sets assigning each feature year to a partition.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SplitSpec {
    train: BTreeSet<i32>,
    validation: BTreeSet<i32>,
    test: BTreeSet<i32>,
}

impl SplitSpec {
    pub fn new(
        train: impl IntoIterator<Item = i32>,
        validation: impl IntoIterator<Item = i32>,
        test: impl IntoIterator<Item = i32>,
    ) -> Result<Self> {
        let train: BTreeSet<i32> = train.into_iter().collect();
        let validation: BTreeSet<i32> = validation.into_iter().collect();
        let test: BTreeSet<i32> = test.into_iter().collect();
        for (a, b, what) in [
            (&train, &validation, "train/validation"),
            (&train, &test, "train/test"),
            (&validation, &test, "validation/test"),
        ] {
            if let Some(y) = a.intersection(b).next() {
                return Err(Error::Param(format!("split years overlap ({what} share {y})")));
            }
        }
        Ok(Self { train, validation, test })
    }

    /// Feature years 2004-2012 / 2013 / 2014, giving target years
    /// 2005-2013 / 2014 / 2015.
    pub fn paper_default() -> Self {
        Self::new(2004..=2012, [2013], [2014]).unwrap()
    }

    pub fn train_years(&self) -> &BTreeSet<i32> {
        &self.train
    }

    pub fn validation_years(&self) -> &BTreeSet<i32> {
        &self.validation
    }

    pub fn test_years(&self) -> &BTreeSet<i32> {
        &self.test
    }

    pub fn max_train_year(&self) -> Option<i32> {
        self.train.iter().next_back().copied()
    }

    /// Largest year of train ∪ validation (the final-fit horizon).
    pub fn max_fit_year(&self) -> Option<i32> {
        self.train
            .iter()
            .chain(self.validation.iter())
            .next_back()
            .copied()
    }

    pub fn max_test_year(&self) -> Option<i32> {
        self.test.iter().next_back().copied()
    }
}

/// Row indices of one series falling inside a partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesSlice {
    pub series_index: usize,
    pub row_indices: Vec<usize>,
}

/// Partition views over a series collection. Views are disjoint and their
/// union is exactly the set of rows whose feature year appears in the spec.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PanelSplit {
    pub train: Vec<SeriesSlice>,
    pub validation: Vec<SeriesSlice>,
    pub test: Vec<SeriesSlice>,
}

impl PanelSplit {
    pub fn row_count(slices: &[SeriesSlice]) -> usize {
        slices.iter().map(|s| s.row_indices.len()).sum()
    }
}

/// Assigns every (row, target) to the partition containing its feature year.
pub fn split(series: &[PairSeries], spec: &SplitSpec) -> PanelSplit {
    let mut out = PanelSplit::default();
    for (idx, s) in series.iter().enumerate() {
        let mut tr = Vec::new();
        let mut va = Vec::new();
        let mut te = Vec::new();
        for (k, y) in s.years.iter().enumerate() {
            if spec.train.contains(y) {
                tr.push(k);
            } else if spec.validation.contains(y) {
                va.push(k);
            } else if spec.test.contains(y) {
                te.push(k);
            }
        }
        for (rows, bucket) in [(tr, &mut out.train), (va, &mut out.validation), (te, &mut out.test)]
        {
            if !rows.is_empty() {
                bucket.push(SeriesSlice { series_index: idx, row_indices: rows });
            }
        }
    }
    out
}
