use std::collections::BTreeMap;

use serde::Serialize;

use super::stats::{Histogram, Summary};
use crate::event::EventRecord;

/// Gaps outside `0..=MAX_GAP_SECONDS` are dropped as clock artefacts or
/// abandoned sessions.
pub const MAX_GAP_SECONDS: i64 = 100;

/// Time between two consecutive requests of one client.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GapSample {
    pub client_id: String,
    pub gap_seconds: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapAnalysis {
    /// Retained gaps, all within `0..=MAX_GAP_SECONDS`.
    pub samples: Vec<GapSample>,
    pub dropped_negative: usize,
    pub dropped_over_limit: usize,
    /// One-second bins.
    pub histogram: Histogram,
    pub summary: Option<Summary>,
}

/// Per-client request gaps.
///
/// A client's requests are taken in `segment_index` order, so a request
/// logged with an earlier timestamp than its predecessor yields a negative
/// gap, which is then filtered out together with gaps above
/// [`MAX_GAP_SECONDS`].
pub fn gap_distribution(events: &[EventRecord]) -> GapAnalysis {
    let mut by_client: BTreeMap<(u64, &str), Vec<&EventRecord>> = BTreeMap::new();
    for e in events {
        by_client
            .entry((e.experiment_id, e.client_id.as_str()))
            .or_default()
            .push(e);
    }

    let mut samples = Vec::new();
    let (mut dropped_negative, mut dropped_over_limit) = (0, 0);
    for ((_, client), mut requests) in by_client {
        requests.sort_by_key(|e| e.segment_index);
        for pair in requests.windows(2) {
            let gap = pair[1].timestamp as i64 - pair[0].timestamp as i64;
            if gap < 0 {
                dropped_negative += 1;
            } else if gap > MAX_GAP_SECONDS {
                dropped_over_limit += 1;
            } else {
                samples.push(GapSample {
                    client_id: client.to_string(),
                    gap_seconds: gap,
                });
            }
        }
    }

    let values: Vec<u64> = samples.iter().map(|s| s.gap_seconds as u64).collect();
    GapAnalysis {
        histogram: Histogram::from_values(&values, 1, None),
        summary: Summary::of(&values),
        samples,
        dropped_negative,
        dropped_over_limit,
    }
}
