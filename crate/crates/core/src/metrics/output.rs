//! Plot-ready CSV tables and the headline summary.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::Serialize;

use super::{
    evaluations_series, gap_distribution, generations_per_client, run_durations, DurationAnalysis,
    GapAnalysis, GenerationsAnalysis, SeriesPoint, SpeedupInputs, Summary,
};
use crate::event::EventRecord;

#[derive(Debug, Clone)]
pub struct AnalysisOptions {
    pub generations_bin_width: u64,
    pub speedup: Option<SpeedupInputs>,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            generations_bin_width: 20,
            speedup: None,
        }
    }
}

/// All analyses over one event list.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub events: usize,
    pub gaps: GapAnalysis,
    pub generations: GenerationsAnalysis,
    pub durations: DurationAnalysis,
    pub series: BTreeMap<u64, Vec<SeriesPoint>>,
}

pub fn analyze(events: &[EventRecord], options: &AnalysisOptions) -> Analysis {
    Analysis {
        events: events.len(),
        gaps: gap_distribution(events),
        generations: generations_per_client(events, options.generations_bin_width),
        durations: run_durations(events, options.speedup),
        series: evaluations_series(events),
    }
}

fn field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn opt_f64(v: Option<f64>) -> String {
    v.map(|v| format!("{v:.4}")).unwrap_or_default()
}

impl Analysis {
    /// `gap_seconds,count`
    pub fn gaps_csv(&self) -> String {
        let mut out = String::from("gap_seconds,count\n");
        for (gap, count) in &self.gaps.histogram.bins {
            writeln!(out, "{gap},{count}").unwrap();
        }
        out
    }

    /// `client_id,generations`
    pub fn generations_csv(&self) -> String {
        let mut out = String::from("client_id,generations\n");
        for (client, generations) in &self.generations.per_client {
            writeln!(out, "{},{generations}", field(client)).unwrap();
        }
        out
    }

    /// `bin_start,bin_end,count`; the overflow bin above the display cap
    /// has an empty `bin_end`.
    pub fn generations_histogram_csv(&self) -> String {
        let h = &self.generations.histogram;
        let mut out = String::from("bin_start,bin_end,count\n");
        for (start, count) in &h.bins {
            writeln!(out, "{start},{},{count}", start + h.bin_width).unwrap();
        }
        if h.overflow > 0 {
            let cap = h.cap.unwrap_or_default();
            writeln!(out, "{},,{}", cap + 1, h.overflow).unwrap();
        }
        out
    }

    /// `experiment_id,duration_seconds,evaluations_total,distinct_clients,speedup`
    pub fn durations_csv(&self) -> String {
        let mut out =
            String::from("experiment_id,duration_seconds,evaluations_total,distinct_clients,speedup\n");
        for s in self.durations.completed.values() {
            writeln!(
                out,
                "{},{},{},{},{}",
                s.experiment_id,
                s.duration_seconds,
                s.evaluations_total,
                s.distinct_clients,
                opt_f64(s.speedup)
            )
            .unwrap();
        }
        out
    }

    /// `experiment_id,elapsed_seconds,evaluations`
    pub fn series_csv(&self) -> String {
        let mut out = String::from("experiment_id,elapsed_seconds,evaluations\n");
        for (id, points) in &self.series {
            for p in points {
                writeln!(out, "{id},{},{}", p.elapsed_seconds, p.evaluations).unwrap();
            }
        }
        out
    }

    pub fn headline(&self, skipped_lines: usize) -> Headline {
        let clients = self.generations.per_client.len();
        Headline {
            events: self.events,
            skipped_lines,
            experiments: self.series.len(),
            completed_experiments: self.durations.completed.len(),
            incomplete_experiments: self.durations.incomplete.len(),
            clients,
            gaps: GapHeadline {
                samples: self.gaps.samples.len(),
                dropped_negative: self.gaps.dropped_negative,
                dropped_over_limit: self.gaps.dropped_over_limit,
                stats: self.gaps.summary.clone().unwrap_or_default(),
            },
            generations_per_client: self.generations.summary.clone().unwrap_or_default(),
            durations: self.durations.summary.clone().unwrap_or_default(),
            max_speedup: self.durations.fastest().and_then(|s| s.speedup),
            peak_evaluations: self
                .series
                .values()
                .filter_map(|p| p.last())
                .map(|p| p.evaluations)
                .max()
                .unwrap_or(0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapHeadline {
    pub samples: usize,
    pub dropped_negative: usize,
    pub dropped_over_limit: usize,
    pub stats: Summary,
}

/// One JSON object of headline figures.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Headline {
    pub events: usize,
    pub skipped_lines: usize,
    pub experiments: usize,
    pub completed_experiments: usize,
    pub incomplete_experiments: usize,
    pub clients: usize,
    pub gaps: GapHeadline,
    pub generations_per_client: Summary,
    pub durations: Summary,
    pub max_speedup: Option<f64>,
    pub peak_evaluations: u64,
}
