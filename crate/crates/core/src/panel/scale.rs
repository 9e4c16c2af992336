//! Per-series min-max scaling.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::panel::types::{CountryCode, PairSeries};

/// Per-feature minima and maxima fitted over one pair's series, under the
/// flattened layout of [`FeatureRow::to_vector`](crate::panel::FeatureRow::to_vector).
/// The last column is the current-flow feature; its stats also scale the
/// next-year targets, so forecasts invert back to migrant counts.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScalerStats {
    mins: Vec<f64>,
    maxs: Vec<f64>,
}

impl ScalerStats {
    pub fn width(&self) -> usize {
        self.mins.len()
    }

    /// Stats of the current-flow column (shared with targets).
    pub fn flow_bounds(&self) -> (f64, f64) {
        (*self.mins.last().unwrap(), *self.maxs.last().unwrap())
    }

    pub fn bounds(&self, feature: usize) -> (f64, f64) {
        (self.mins[feature], self.maxs[feature])
    }

    /// `(x - min) / (max - min)` per feature; constant features map to 0.
    pub fn transform_row(&self, row: &[f64]) -> Result<Vec<f64>> {
        if row.len() != self.mins.len() {
            return Err(Error::Shape(format!(
                "row width {} does not match scaler width {}",
                row.len(),
                self.mins.len()
            )));
        }
        Ok(row
            .iter()
            .zip(self.mins.iter().zip(&self.maxs))
            .map(|(&x, (&m, &hi))| scale_one(x, m, hi))
            .collect())
    }

    /// Inverse of [`transform_row`](Self::transform_row); constant features
    /// map back to their constant.
    pub fn inverse_row(&self, scaled: &[f64]) -> Result<Vec<f64>> {
        if scaled.len() != self.mins.len() {
            return Err(Error::Shape(format!(
                "row width {} does not match scaler width {}",
                scaled.len(),
                self.mins.len()
            )));
        }
        Ok(scaled
            .iter()
            .zip(self.mins.iter().zip(&self.maxs))
            .map(|(&v, (&m, &hi))| unscale_one(v, m, hi))
            .collect())
    }

    /// Scales a flow value (or next-year target) with the flow column stats.
    pub fn scale_flow(&self, flow: f64) -> f64 {
        let (m, hi) = self.flow_bounds();
        scale_one(flow, m, hi)
    }

    /// Maps a scaled forecast back to a migrant count.
    pub fn unscale_flow(&self, scaled: f64) -> f64 {
        let (m, hi) = self.flow_bounds();
        unscale_one(scaled, m, hi)
    }
}

fn scale_one(x: f64, min: f64, max: f64) -> f64 {
    if max > min {
        (x - min) / (max - min)
    } else {
        0.0
    }
}

fn unscale_one(v: f64, min: f64, max: f64) -> f64 {
    if max > min {
        min + v * (max - min)
    } else {
        min
    }
}

/// Fits per-feature min/max over this series only; series are never pooled.
pub fn fit_scaler(series: &PairSeries) -> ScalerStats {
    let width = series.input_width();
    let mut mins = alloc::vec![f64::INFINITY; width];
    let mut maxs = alloc::vec![f64::NEG_INFINITY; width];
    for row in &series.rows {
        for (i, v) in row.to_vector().into_iter().enumerate() {
            if v < mins[i] {
                mins[i] = v;
            }
            if v > maxs[i] {
                maxs[i] = v;
            }
        }
    }
    ScalerStats { mins, maxs }
}

/// A pair's series after scaling: model-ready inputs and targets plus the
/// flow bounds needed to invert forecasts.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScaledSeries {
    pub origin: CountryCode,
    pub destination: CountryCode,
    pub years: Vec<i32>,
    pub inputs: Vec<Vec<f64>>,
    pub targets: Vec<f64>,
    pub flow_min: f64,
    pub flow_max: f64,
}

impl ScaledSeries {
    pub fn len(&self) -> usize {
        self.years.len()
    }

    pub fn is_empty(&self) -> bool {
        self.years.is_empty()
    }

    pub fn input_width(&self) -> usize {
        self.inputs.first().map_or(0, Vec::len)
    }

    /// Maps a scaled forecast back to a migrant count.
    pub fn unscale_flow(&self, scaled: f64) -> f64 {
        unscale_one(scaled, self.flow_min, self.flow_max)
    }

    /// The series restricted to feature years at most `max_year`.
    pub fn prefix(&self, max_year: i32) -> ScaledSeries {
        let n = self.years.iter().take_while(|&&y| y <= max_year).count();
        ScaledSeries {
            origin: self.origin,
            destination: self.destination,
            years: self.years[..n].to_vec(),
            inputs: self.inputs[..n].to_vec(),
            targets: self.targets[..n].to_vec(),
            flow_min: self.flow_min,
            flow_max: self.flow_max,
        }
    }
}

/// Applies `stats` to every row and target of `series`.
///
/// Targets share the current-flow column's bounds, so model outputs invert
/// to counts with [`ScaledSeries::unscale_flow`].
pub fn transform(series: &PairSeries, stats: &ScalerStats) -> Result<ScaledSeries> {
    if stats.width() != series.input_width() {
        return Err(Error::Shape(format!(
            "scaler width {} does not match series width {}",
            stats.width(),
            series.input_width()
        )));
    }
    let inputs = series
        .rows
        .iter()
        .map(|r| stats.transform_row(&r.to_vector()))
        .collect::<Result<Vec<_>>>()?;
    let targets = series.targets.iter().map(|&t| stats.scale_flow(t)).collect();
    let (flow_min, flow_max) = stats.flow_bounds();
    Ok(ScaledSeries {
        origin: series.origin,
        destination: series.destination,
        years: series.years.clone(),
        inputs,
        targets,
        flow_min,
        flow_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::panel::types::{FeatureRow, OneHot};
    use alloc::vec;

    fn series_with_flows(flows: &[f64]) -> PairSeries {
        let c = CountryCode::new("FRA").unwrap();
        let d = CountryCode::new("ESP").unwrap();
        let years: Vec<i32> = (0..flows.len() as i32).map(|k| 2004 + k).collect();
        let rows: Vec<FeatureRow> = flows
            .iter()
            .enumerate()
            .map(|(k, &f)| FeatureRow {
                gdp_origin: 10.0 + k as f64 * 10.0,
                gdp_dest: 5.0,
                pop_origin: 100.0,
                pop_dest: 200.0,
                origin_onehot: OneHot::new(0, 2).unwrap(),
                dest_onehot: OneHot::new(1, 2).unwrap(),
                year_onehot: OneHot::new(k, flows.len()).unwrap(),
                gti_bilateral: vec![k as f64],
                gti_interaction: vec![2.0 * k as f64],
                flow_current: f,
            })
            .collect();
        let targets: Vec<f64> = flows.iter().map(|f| f + 1.0).collect();
        PairSeries::new(c, d, years, rows, targets).unwrap()
    }

    #[test]
    fn min_max_direct_formula() {
        // gdp_origin column is [10, 20, 30] -> scaled [0, 0.5, 1].
        let s = series_with_flows(&[1.0, 2.0, 3.0]);
        let stats = fit_scaler(&s);
        assert_eq!(stats.bounds(0), (10.0, 30.0));
        let scaled = transform(&s, &stats).unwrap();
        assert_eq!(scaled.inputs[0][0], 0.0);
        assert_eq!(scaled.inputs[1][0], 0.5);
        assert_eq!(scaled.inputs[2][0], 1.0);
    }

    #[test]
    fn constant_column_maps_to_zero_and_back() {
        let s = series_with_flows(&[5.0, 5.0]);
        let stats = fit_scaler(&s);
        let scaled = transform(&s, &stats).unwrap();
        // gdp_dest is constant 5.0 -> scaled 0, inverse returns 5.0.
        assert_eq!(scaled.inputs[0][1], 0.0);
        let back = stats.inverse_row(&scaled.inputs[0]).unwrap();
        assert_eq!(back[1], 5.0);
        // flow column constant too: targets scale to 0, unscale to the constant.
        assert_eq!(scaled.unscale_flow(0.0), 5.0);
    }

    #[test]
    fn per_series_stats_are_independent() {
        let a = series_with_flows(&[1.0, 2.0]);
        let b = series_with_flows(&[100.0, 300.0]);
        let (fa, fb) = (fit_scaler(&a), fit_scaler(&b));
        assert_eq!(fa.flow_bounds(), (1.0, 2.0));
        assert_eq!(fb.flow_bounds(), (100.0, 300.0));
    }

    #[test]
    fn round_trip_identity() {
        let s = series_with_flows(&[3.0, 9.5, 7.25, 11.0]);
        let stats = fit_scaler(&s);
        let scaled = transform(&s, &stats).unwrap();
        for (row, orig) in scaled.inputs.iter().zip(&s.rows) {
            let back = stats.inverse_row(row).unwrap();
            for (b, o) in back.iter().zip(orig.to_vector()) {
                assert!((b - o).abs() < 1e-12, "round trip {b} vs {o}");
            }
        }
        for (t, orig) in scaled.targets.iter().zip(&s.targets) {
            assert!((scaled.unscale_flow(*t) - orig).abs() < 1e-12);
        }
    }

    #[test]
    fn width_mismatch_rejected() {
        let a = series_with_flows(&[1.0, 2.0]);
        let stats = ScalerStats { mins: vec![0.0; 3], maxs: vec![1.0; 3] };
        assert!(transform(&a, &stats).is_err());
    }
}
