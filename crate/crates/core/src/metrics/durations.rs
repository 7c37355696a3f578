use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::stats::Summary;
use super::MetricsError;
use crate::event::EventRecord;

/// Parameters of the single-machine time estimate used for speedups.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpeedupInputs {
    /// Mean time one average client needs for one segment.
    pub avg_segment_seconds: f64,
    /// Segments one experiment needs (`budget / evaluations per segment`).
    pub segments_per_experiment: f64,
}

/// Speedup of an observed run over one average machine doing all
/// `segments_per_experiment` segments alone.
pub fn speedup(
    avg_segment_seconds: f64,
    segments_per_experiment: f64,
    observed_duration: f64,
) -> Result<f64, MetricsError> {
    for (name, v) in [
        ("avg_segment_seconds", avg_segment_seconds),
        ("segments_per_experiment", segments_per_experiment),
        ("observed_duration", observed_duration),
    ] {
        if !(v.is_finite() && v > 0.0) {
            return Err(MetricsError::Domain(format!(
                "{name} must be positive and finite, got {v}"
            )));
        }
    }
    Ok(avg_segment_seconds * segments_per_experiment / observed_duration)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSummary {
    pub experiment_id: u64,
    /// First accepted report to the first report answered with a stop.
    pub duration_seconds: u64,
    pub evaluations_total: u64,
    pub distinct_clients: usize,
    pub speedup: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DurationAnalysis {
    pub completed: BTreeMap<u64, ExperimentSummary>,
    /// Experiments whose log never shows a stop reply.
    pub incomplete: Vec<u64>,
    pub summary: Option<Summary>,
}

impl DurationAnalysis {
    /// The shortest completed run, which yields the maximum speedup.
    pub fn fastest(&self) -> Option<&ExperimentSummary> {
        self.completed.values().min_by_key(|s| s.duration_seconds)
    }
}

/// Run time of every completed experiment in the log.
///
/// An experiment is complete once some accepted report was answered with
/// zero generations, i.e. the report that reached the evaluation budget.
pub fn run_durations(events: &[EventRecord], estimate: Option<SpeedupInputs>) -> DurationAnalysis {
    let mut by_experiment: BTreeMap<u64, Vec<&EventRecord>> = BTreeMap::new();
    for e in events {
        by_experiment.entry(e.experiment_id).or_default().push(e);
    }

    let mut completed = BTreeMap::new();
    let mut incomplete = Vec::new();
    for (id, mut records) in by_experiment {
        records.sort_by_key(|e| (e.timestamp, e.evaluations_total_after));
        let start = records[0].timestamp;
        let Some(finish) = records.iter().find(|e| e.generations_granted == 0) else {
            incomplete.push(id);
            continue;
        };
        let duration = finish.timestamp - start;
        let clients: BTreeSet<&str> = records.iter().map(|e| e.client_id.as_str()).collect();
        let speedup = estimate.and_then(|est| {
            speedup(est.avg_segment_seconds, est.segments_per_experiment, duration as f64).ok()
        });
        completed.insert(
            id,
            ExperimentSummary {
                experiment_id: id,
                duration_seconds: duration,
                evaluations_total: records.iter().map(|e| e.evaluations_total_after).max().unwrap_or(0),
                distinct_clients: clients.len(),
                speedup,
            },
        );
    }

    let durations: Vec<u64> = completed.values().map(|s| s.duration_seconds).collect();
    DurationAnalysis {
        summary: Summary::of(&durations),
        completed,
        incomplete,
    }
}
