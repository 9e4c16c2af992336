//! The five evaluation metrics over forecast/ground-truth flow matrices.
//!
//! Matrices are unbalanced panels in practice, so unobserved pairs carry an
//! explicit mask and every sum and normalization runs over observed entries
//! only. Metrics operate on original-scale migrant counts.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use alloc::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::panel::{CountryCode, PairSeries};

/// Sorted, deduplicated origin and destination axes for a pair collection;
/// forecast and truth matrices built from the same collection share axes and
/// masks by construction.
pub fn pair_axes(
    pairs: impl Iterator<Item = (CountryCode, CountryCode)>,
) -> (Vec<CountryCode>, Vec<CountryCode>) {
    let mut origins = BTreeSet::new();
    let mut destinations = BTreeSet::new();
    for (o, d) in pairs {
        origins.insert(o);
        destinations.insert(d);
    }
    (origins.into_iter().collect(), destinations.into_iter().collect())
}

/// Ground-truth matrix at a horizon: each pair's observed flow of
/// `horizon_year + 1` (the target of its `horizon_year` row); pairs without
/// that row stay masked.
pub fn truth_matrix(series: &[PairSeries], horizon_year: i32) -> Result<FlowMatrix> {
    let (origins, destinations) = pair_axes(series.iter().map(|s| (s.origin, s.destination)));
    let mut truth = FlowMatrix::new(origins.clone(), destinations.clone());
    for s in series {
        let Some(k) = s.years.iter().position(|&y| y == horizon_year) else {
            continue;
        };
        let oi = origins.binary_search(&s.origin).unwrap();
        let di = destinations.binary_search(&s.destination).unwrap();
        truth.set(oi, di, s.targets[k])?;
    }
    Ok(truth)
}

/// Origin-by-destination flow matrix with an observation mask.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FlowMatrix {
    origins: Vec<CountryCode>,
    destinations: Vec<CountryCode>,
    values: Vec<f64>,
    mask: Vec<bool>,
}

impl FlowMatrix {
    /// Fully masked matrix over the given axes.
    pub fn new(origins: Vec<CountryCode>, destinations: Vec<CountryCode>) -> Self {
        let n = origins.len() * destinations.len();
        Self { origins, destinations, values: vec![0.0; n], mask: vec![false; n] }
    }

    pub fn origins(&self) -> &[CountryCode] {
        &self.origins
    }

    pub fn destinations(&self) -> &[CountryCode] {
        &self.destinations
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.origins.len(), self.destinations.len())
    }

    /// Marks (i, j) observed with the given count.
    pub fn set(&mut self, origin: usize, dest: usize, value: f64) -> Result<()> {
        if origin >= self.origins.len() {
            return Err(Error::Bounds { index: origin, len: self.origins.len() });
        }
        if dest >= self.destinations.len() {
            return Err(Error::Bounds { index: dest, len: self.destinations.len() });
        }
        if !value.is_finite() || value < 0.0 {
            return Err(Error::Data(format!("flow entry must be a finite nonnegative count, got {value}")));
        }
        let k = origin * self.destinations.len() + dest;
        self.values[k] = value;
        self.mask[k] = true;
        Ok(())
    }

    /// Observed value at (i, j), if any.
    pub fn get(&self, origin: usize, dest: usize) -> Option<f64> {
        let k = origin * self.destinations.len() + dest;
        self.mask[k].then(|| self.values[k])
    }

    pub fn observed_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    /// Iterates observed `(origin_idx, dest_idx, value)` triples in row-major
    /// order.
    pub fn iter_observed(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let n = self.destinations.len();
        self.values
            .iter()
            .zip(&self.mask)
            .enumerate()
            .filter(|(_, (_, &m))| m)
            .map(move |(k, (&v, _))| (k / n, k % n, v))
    }

    fn check_compatible(&self, other: &FlowMatrix) -> Result<()> {
        if self.origins != other.origins || self.destinations != other.destinations {
            return Err(Error::Shape("flow matrices have different axes".into()));
        }
        if self.mask != other.mask {
            return Err(Error::Shape("flow matrices have different observation masks".into()));
        }
        if self.observed_count() == 0 {
            return Err(Error::Degenerate("no observed entries".into()));
        }
        Ok(())
    }

    fn observed_pairs<'a>(&'a self, other: &'a FlowMatrix) -> impl Iterator<Item = (f64, f64)> + 'a {
        self.values
            .iter()
            .zip(&other.values)
            .zip(&self.mask)
            .filter(|(_, &m)| m)
            .map(|((&a, &b), _)| (a, b))
    }
}

/// Common part of commuters: `2*sum(min(T, T̂)) / (sum(T) + sum(T̂))`.
/// 1 when identical, 0 when supports are disjoint; both-all-zero counts as
/// identical and returns 1.
pub fn cpc(truth: &FlowMatrix, forecast: &FlowMatrix) -> Result<f64> {
    truth.check_compatible(forecast)?;
    let mut overlap = 0.0;
    let mut total = 0.0;
    for (t, f) in truth.observed_pairs(forecast) {
        if t < 0.0 || f < 0.0 {
            return Err(Error::Data("cpc requires nonnegative entries".into()));
        }
        overlap += t.min(f);
        total += t + f;
    }
    if total == 0.0 {
        return Ok(1.0);
    }
    Ok(2.0 * overlap / total)
}

/// Mean absolute error over observed entries.
pub fn mae(truth: &FlowMatrix, forecast: &FlowMatrix) -> Result<f64> {
    truth.check_compatible(forecast)?;
    let n = truth.observed_count() as f64;
    Ok(truth.observed_pairs(forecast).map(|(t, f)| (t - f).abs()).sum::<f64>() / n)
}

/// Root mean square error over observed entries.
pub fn rmse(truth: &FlowMatrix, forecast: &FlowMatrix) -> Result<f64> {
    truth.check_compatible(forecast)?;
    let n = truth.observed_count() as f64;
    Ok((truth.observed_pairs(forecast).map(|(t, f)| (t - f) * (t - f)).sum::<f64>() / n).sqrt())
}

/// Coefficient of determination `1 - SS_res / SS_tot` with the observed mean
/// of the truth as baseline.
pub fn r_squared(truth: &FlowMatrix, forecast: &FlowMatrix) -> Result<f64> {
    truth.check_compatible(forecast)?;
    let n = truth.observed_count() as f64;
    let mean = truth.observed_pairs(forecast).map(|(t, _)| t).sum::<f64>() / n;
    let ss_tot: f64 = truth.observed_pairs(forecast).map(|(t, _)| (t - mean) * (t - mean)).sum();
    if ss_tot == 0.0 {
        return Err(Error::Degenerate("constant ground truth has no variance to explain".into()));
    }
    let ss_res: f64 = truth.observed_pairs(forecast).map(|(t, f)| (t - f) * (t - f)).sum();
    Ok(1.0 - ss_res / ss_tot)
}

/// Incoming totals per destination over observed entries.
fn incoming_totals(m: &FlowMatrix) -> Vec<Option<f64>> {
    let n = m.destinations.len();
    let mut totals: Vec<Option<f64>> = vec![None; n];
    for (_, j, v) in m.iter_observed() {
        *totals[j].get_or_insert(0.0) += v;
    }
    totals
}

/// MAE on total incoming migrants per destination, averaged over the
/// destinations that have at least one observed corridor.
pub fn mae_in(truth: &FlowMatrix, forecast: &FlowMatrix) -> Result<f64> {
    truth.check_compatible(forecast)?;
    let vt = incoming_totals(truth);
    let vf = incoming_totals(forecast);
    let mut sum = 0.0;
    let mut count = 0usize;
    for (t, f) in vt.iter().zip(&vf) {
        if let (Some(t), Some(f)) = (t, f) {
            sum += (t - f).abs();
            count += 1;
        }
    }
    Ok(sum / count as f64)
}

/// Per-destination incoming totals for the truth and the forecast.
#[derive(Debug, Clone, PartialEq)]
pub struct DestinationError {
    pub destination: CountryCode,
    pub truth_total: f64,
    pub forecast_total: f64,
}

impl DestinationError {
    /// Signed error `v̂_j - v_j` for heat-map output.
    pub fn signed_error(&self) -> f64 {
        self.forecast_total - self.truth_total
    }
}

/// All five metrics plus the per-destination error table, sorted by
/// descending ground-truth incoming totals.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub cpc: f64,
    pub mae: f64,
    pub rmse: f64,
    pub r_squared: f64,
    pub mae_in: f64,
    pub per_destination: Vec<DestinationError>,
}

/// Evaluates every metric at once.
pub fn report(truth: &FlowMatrix, forecast: &FlowMatrix) -> Result<EvaluationReport> {
    let cpc_v = cpc(truth, forecast)?;
    let mae_v = mae(truth, forecast)?;
    let rmse_v = rmse(truth, forecast)?;
    let r2_v = r_squared(truth, forecast)?;
    let mae_in_v = mae_in(truth, forecast)?;

    let vt = incoming_totals(truth);
    let vf = incoming_totals(forecast);
    let mut per_destination: Vec<DestinationError> = truth
        .destinations
        .iter()
        .zip(vt.iter().zip(&vf))
        .filter_map(|(dest, (t, f))| match (t, f) {
            (Some(t), Some(f)) => Some(DestinationError {
                destination: *dest,
                truth_total: *t,
                forecast_total: *f,
            }),
            _ => None,
        })
        .collect();
    per_destination.sort_by(|a, b| {
        b.truth_total
            .partial_cmp(&a.truth_total)
            .unwrap()
            .then_with(|| a.destination.cmp(&b.destination))
    });

    Ok(EvaluationReport {
        cpc: cpc_v,
        mae: mae_v,
        rmse: rmse_v,
        r_squared: r2_v,
        mae_in: mae_in_v,
        per_destination,
    })
}
