//! Batch analyses over event logs.
//!
//! Every analysis is a pure function of the event list, so the same log
//! always produces byte-identical CSV output. Quantiles use the
//! nearest-rank convention throughout (see [`stats::quantile`]).

mod apache;
mod durations;
mod events;
mod gaps;
mod generations;
pub mod output;
mod series;
pub mod stats;

pub use output::{analyze, Analysis, AnalysisOptions, GapHeadline, Headline};
pub use apache::{parse_apache_log, ApacheOptions};
pub use durations::{run_durations, speedup, DurationAnalysis, ExperimentSummary, SpeedupInputs};
pub use events::{load_events, load_events_path, LoadedEvents};
pub use gaps::{gap_distribution, GapAnalysis, GapSample, MAX_GAP_SECONDS};
pub use generations::{generations_per_client, GenerationsAnalysis, GENERATIONS_DISPLAY_CAP};
pub use series::{evaluations_series, slope_changes, window_rates, SeriesPoint};
pub use stats::{Histogram, Summary};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("cannot read event source: {0}")]
    Input(#[from] std::io::Error),
    #[error("{0}")]
    Domain(String),
}
