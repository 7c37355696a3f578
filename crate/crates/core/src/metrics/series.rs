use std::collections::BTreeMap;

use serde::Serialize;

use crate::event::EventRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SeriesPoint {
    /// Seconds since the experiment's first accepted report.
    pub elapsed_seconds: u64,
    /// Server-side evaluation total after this report.
    pub evaluations: u64,
}

/// Cumulative evaluations against time, one series per experiment.
pub fn evaluations_series(events: &[EventRecord]) -> BTreeMap<u64, Vec<SeriesPoint>> {
    let mut by_experiment: BTreeMap<u64, Vec<&EventRecord>> = BTreeMap::new();
    for e in events {
        by_experiment.entry(e.experiment_id).or_default().push(e);
    }
    by_experiment
        .into_iter()
        .map(|(id, mut records)| {
            records.sort_by_key(|e| (e.timestamp, e.evaluations_total_after));
            let start = records[0].timestamp;
            let points = records
                .iter()
                .map(|e| SeriesPoint {
                    elapsed_seconds: e.timestamp - start,
                    evaluations: e.evaluations_total_after,
                })
                .collect();
            (id, points)
        })
        .collect()
}

/// Evaluation rate in consecutive full windows of `window` seconds,
/// treating the series as a step function.
pub fn window_rates(points: &[SeriesPoint], window: u64) -> Vec<f64> {
    let Some(last) = points.last() else {
        return Vec::new();
    };
    let window = window.max(1);
    let value_at = |t: u64| {
        points
            .iter()
            .take_while(|p| p.elapsed_seconds <= t)
            .last()
            .map_or(0, |p| p.evaluations)
    };
    let windows = last.elapsed_seconds / window;
    (0..windows)
        .map(|i| {
            let gained = value_at((i + 1) * window) - value_at(i * window);
            gained as f64 / window as f64
        })
        .collect()
}

/// Number of adjacent windows whose rates differ by more than
/// `rel_tolerance` of the larger rate.
pub fn slope_changes(rates: &[f64], rel_tolerance: f64) -> usize {
    rates
        .windows(2)
        .filter(|w| (w[1] - w[0]).abs() > rel_tolerance * w[0].max(w[1]))
        .count()
}
