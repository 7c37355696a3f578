use std::collections::BTreeMap;

use serde::Serialize;

use super::stats::{Histogram, Summary};
use crate::event::EventRecord;

/// Display cap of the generations histogram; larger totals are counted in
/// the overflow bin. Quartiles are always computed on uncapped values.
pub const GENERATIONS_DISPLAY_CAP: u64 = 400;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenerationsAnalysis {
    /// Client id → generations contributed.
    pub per_client: BTreeMap<String, u64>,
    pub histogram: Histogram,
    pub summary: Option<Summary>,
}

/// Sums the generations each client contributed over all its accepted
/// reports, across experiments.
pub fn generations_per_client(events: &[EventRecord], bin_width: u64) -> GenerationsAnalysis {
    let mut per_client: BTreeMap<String, u64> = BTreeMap::new();
    for e in events {
        *per_client.entry(e.client_id.clone()).or_default() += e.generations_run as u64;
    }
    let values: Vec<u64> = per_client.values().copied().collect();
    GenerationsAnalysis {
        histogram: Histogram::from_values(&values, bin_width, Some(GENERATIONS_DISPLAY_CAP)),
        summary: Summary::of(&values),
        per_client,
    }
}
