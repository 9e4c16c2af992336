//! Panel domain types: country codes, flow observations, feature rows, and
//! per-pair series.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// First calendar year with usable search-trend data.
pub const FIRST_YEAR: i32 = 2004;
/// Last calendar year covered by the migration database.
pub const LAST_YEAR: i32 = 2015;
/// Last feature year (targets are next-year flows, so features stop one short).
pub const LAST_FEATURE_YEAR: i32 = LAST_YEAR - 1;

/// Three-letter uppercase ISO country code.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "String", into = "String"))]
pub struct CountryCode([u8; 3]);

impl CountryCode {
    pub fn new(code: &str) -> Result<Self> {
        let bytes = code.as_bytes();
        if bytes.len() != 3 || !bytes.iter().all(u8::is_ascii_uppercase) {
            return Err(Error::Registry(format!(
                "country code {code:?} is not three uppercase letters"
            )));
        }
        Ok(Self([bytes[0], bytes[1], bytes[2]]))
    }

    pub fn as_str(&self) -> &str {
        // Construction guarantees ASCII.
        core::str::from_utf8(&self.0).unwrap()
    }
}

impl core::fmt::Display for CountryCode {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl core::fmt::Debug for CountryCode {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "CountryCode({})", self.as_str())
    }
}

impl TryFrom<String> for CountryCode {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        Self::new(&s)
    }
}

impl From<CountryCode> for String {
    fn from(c: CountryCode) -> String {
        String::from(c.as_str())
    }
}

/// Ordered, deduplicated set of country codes; positions define one-hot
/// indices, so the ordering (ascending by code) is part of the contract.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CountryRegistry {
    codes: Vec<CountryCode>,
}

impl CountryRegistry {
    pub fn from_codes(codes: impl IntoIterator<Item = CountryCode>) -> Self {
        let mut codes: Vec<CountryCode> = codes.into_iter().collect();
        codes.sort_unstable();
        codes.dedup();
        Self { codes }
    }

    pub fn width(&self) -> usize {
        self.codes.len()
    }

    pub fn index_of(&self, code: CountryCode) -> Option<usize> {
        self.codes.binary_search(&code).ok()
    }

    pub fn get(&self, index: usize) -> Option<CountryCode> {
        self.codes.get(index).copied()
    }

    pub fn codes(&self) -> &[CountryCode] {
        &self.codes
    }
}

/// Ordered, deduplicated set of feature years; positions define one-hot
/// indices.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct YearRegistry {
    years: Vec<i32>,
}

impl YearRegistry {
    pub fn from_years(years: impl IntoIterator<Item = i32>) -> Self {
        let mut years: Vec<i32> = years.into_iter().collect();
        years.sort_unstable();
        years.dedup();
        Self { years }
    }

    pub fn width(&self) -> usize {
        self.years.len()
    }

    pub fn index_of(&self, year: i32) -> Option<usize> {
        self.years.binary_search(&year).ok()
    }

    pub fn years(&self) -> &[i32] {
        &self.years
    }
}

/// One (origin, destination, year, migrant-count) record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowObservation {
    pub origin: CountryCode,
    pub destination: CountryCode,
    pub year: i32,
    pub migrants: u64,
}

impl FlowObservation {
    pub fn new(origin: CountryCode, destination: CountryCode, year: i32, migrants: u64) -> Result<Self> {
        if !(FIRST_YEAR..=LAST_YEAR).contains(&year) {
            return Err(Error::Data(format!(
                "flow year {year} outside [{FIRST_YEAR}, {LAST_YEAR}]"
            )));
        }
        Ok(Self { origin, destination, year, migrants })
    }
}

/// Indicator vector with exactly one 1, stored as (index, width).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OneHot {
    index: usize,
    width: usize,
}

impl OneHot {
    pub fn new(index: usize, width: usize) -> Result<Self> {
        if index >= width {
            return Err(Error::Bounds { index, len: width });
        }
        Ok(Self { index, width })
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.width];
        v[self.index] = 1.0;
        v
    }
}

/// Materializes an indicator vector: zeros except a single 1 at `index`.
pub fn one_hot(index: usize, width: usize) -> Result<Vec<f64>> {
    Ok(OneHot::new(index, width)?.to_vec())
}

/// The full feature vector for one (origin, destination, year) triple.
///
/// The flattened layout, shared by every consumer (scaler, gravity design,
/// neural inputs), is:
///
/// ```text
/// [gdp_origin, gdp_dest, pop_origin, pop_dest,
///  origin one-hot..., dest one-hot..., year one-hot...,
///  gti_bilateral..., gti_interaction..., flow_current]
/// ```
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FeatureRow {
    pub gdp_origin: f64,
    pub gdp_dest: f64,
    pub pop_origin: f64,
    pub pop_dest: f64,
    pub origin_onehot: OneHot,
    pub dest_onehot: OneHot,
    pub year_onehot: OneHot,
    pub gti_bilateral: Vec<f64>,
    pub gti_interaction: Vec<f64>,
    pub flow_current: f64,
}

impl FeatureRow {
    /// Validates finiteness and matching GTI block lengths.
    pub fn validate(&self) -> Result<()> {
        if self.gti_bilateral.len() != self.gti_interaction.len() {
            return Err(Error::Shape(format!(
                "gti blocks of length {} and {}",
                self.gti_bilateral.len(),
                self.gti_interaction.len()
            )));
        }
        let scalars = [self.gdp_origin, self.gdp_dest, self.pop_origin, self.pop_dest, self.flow_current];
        let finite = scalars.iter().all(|v| v.is_finite())
            && self.gti_bilateral.iter().all(|v| v.is_finite())
            && self.gti_interaction.iter().all(|v| v.is_finite());
        if !finite {
            return Err(Error::Numerical("non-finite value in feature row".into()));
        }
        if self.flow_current < 0.0 {
            return Err(Error::Data("negative current flow".into()));
        }
        Ok(())
    }

    /// Number of GTI keyword positions.
    pub fn gti_width(&self) -> usize {
        self.gti_bilateral.len()
    }

    /// Flattened width under the documented layout.
    pub fn width(&self) -> usize {
        4 + self.origin_onehot.width()
            + self.dest_onehot.width()
            + self.year_onehot.width()
            + 2 * self.gti_width()
            + 1
    }

    /// Flattens to the documented layout.
    pub fn to_vector(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.width());
        v.extend_from_slice(&[self.gdp_origin, self.gdp_dest, self.pop_origin, self.pop_dest]);
        v.extend(self.origin_onehot.to_vec());
        v.extend(self.dest_onehot.to_vec());
        v.extend(self.year_onehot.to_vec());
        v.extend_from_slice(&self.gti_bilateral);
        v.extend_from_slice(&self.gti_interaction);
        v.push(self.flow_current);
        v
    }
}

/// Chronological feature rows and next-year targets for one
/// origin-destination pair.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PairSeries {
    pub origin: CountryCode,
    pub destination: CountryCode,
    /// Strictly increasing feature years; `targets[k]` is the observed flow
    /// of `years[k] + 1`.
    pub years: Vec<i32>,
    pub rows: Vec<FeatureRow>,
    pub targets: Vec<f64>,
}

impl PairSeries {
    pub fn new(
        origin: CountryCode,
        destination: CountryCode,
        years: Vec<i32>,
        rows: Vec<FeatureRow>,
        targets: Vec<f64>,
    ) -> Result<Self> {
        if years.len() != rows.len() || years.len() != targets.len() {
            return Err(Error::Shape(format!(
                "series lengths differ: {} years, {} rows, {} targets",
                years.len(),
                rows.len(),
                targets.len()
            )));
        }
        if years.len() < 2 {
            return Err(Error::Param(format!(
                "series {origin}->{destination} has {} usable rows, need at least 2",
                years.len()
            )));
        }
        if !years.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Param("series years not strictly increasing".into()));
        }
        if years[0] < FIRST_YEAR || *years.last().unwrap() > LAST_FEATURE_YEAR {
            return Err(Error::Data(format!(
                "feature years outside [{FIRST_YEAR}, {LAST_FEATURE_YEAR}]"
            )));
        }
        for row in &rows {
            row.validate()?;
        }
        if targets.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(Error::Data("target flows must be finite and nonnegative".into()));
        }
        let width = rows[0].width();
        if rows.iter().any(|r| r.width() != width) {
            return Err(Error::Shape("feature rows of differing widths within a series".into()));
        }
        Ok(Self { origin, destination, years, rows, targets })
    }

    pub fn len(&self) -> usize {
        self.years.len()
    }

    pub fn is_empty(&self) -> bool {
        self.years.is_empty()
    }

    /// Flattened feature width.
    pub fn input_width(&self) -> usize {
        self.rows[0].width()
    }

    /// Indices of rows whose feature year is at most `max_year`.
    pub fn prefix_len(&self, max_year: i32) -> usize {
        self.years.iter().take_while(|&&y| y <= max_year).count()
    }
}
