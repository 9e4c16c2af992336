//! Dataset summary statistics over raw flow observations.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::panel::types::{CountryCode, FlowObservation};

/// Distributional facts about a flow dataset: how sparse it is and how the
/// mass concentrates on a few large corridors.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowSummary {
    pub count: usize,
    pub mean: f64,
    pub median: f64,
    pub max: f64,
    /// Share of observations strictly below 10 migrants.
    pub share_below_10: f64,
    /// Share of observations with at least 10 000 migrants.
    pub share_ge_10_000: f64,
    /// Mean over (destination, year) of total incoming migrants.
    pub mean_incoming: f64,
    /// Per-destination mean incoming total, descending (ties by code).
    pub per_destination_incoming: Vec<(CountryCode, f64)>,
}

/// Summarizes raw flow observations.
pub fn summarize_flows(flows: &[FlowObservation]) -> Result<FlowSummary> {
    if flows.is_empty() {
        return Err(Error::Param("cannot summarize an empty dataset".into()));
    }
    let n = flows.len();
    let mut values: Vec<u64> = flows.iter().map(|f| f.migrants).collect();
    values.sort_unstable();
    let mean = values.iter().map(|&v| v as f64).sum::<f64>() / n as f64;
    let median = if n % 2 == 1 {
        values[n / 2] as f64
    } else {
        (values[n / 2 - 1] as f64 + values[n / 2] as f64) / 2.0
    };
    let max = *values.last().unwrap() as f64;
    let share_below_10 = values.iter().filter(|&&v| v < 10).count() as f64 / n as f64;
    let share_ge_10_000 = values.iter().filter(|&&v| v >= 10_000).count() as f64 / n as f64;

    // Incoming totals per (destination, year).
    let mut incoming: BTreeMap<(CountryCode, i32), f64> = BTreeMap::new();
    for f in flows {
        *incoming.entry((f.destination, f.year)).or_insert(0.0) += f.migrants as f64;
    }
    let mean_incoming = incoming.values().sum::<f64>() / incoming.len() as f64;

    let mut per_dest: BTreeMap<CountryCode, (f64, usize)> = BTreeMap::new();
    for ((dest, _), total) in &incoming {
        let e = per_dest.entry(*dest).or_insert((0.0, 0));
        e.0 += total;
        e.1 += 1;
    }
    let mut per_destination_incoming: Vec<(CountryCode, f64)> = per_dest
        .into_iter()
        .map(|(dest, (sum, years))| (dest, sum / years as f64))
        .collect();
    per_destination_incoming.sort_by(|a, b| {
        b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(&b.0))
    });

    Ok(FlowSummary {
        count: n,
        mean,
        median,
        max,
        share_below_10,
        share_ge_10_000,
        mean_incoming,
        per_destination_incoming,
    })
}
