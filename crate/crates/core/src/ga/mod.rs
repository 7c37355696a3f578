//! Steady-state genetic algorithm run by every client between two
//! exchanges with the server.
//!
//! One generation breeds `population_size × replacement_fraction` offspring
//! from linearly rank-selected parents and overwrites the worst members of
//! the population with them. Every `generations_per_segment` generations the
//! client reports its best individual and folds the server's immigrant into
//! its population in place of its current worst member.

mod engine;
mod fitness;
mod genome;
mod operators;
mod params;
mod population;
pub mod rng;

pub use engine::{SegmentResult, SteadyState};
pub use fitness::{royal_road_fitness, Fitness, RoyalRoad};
pub use genome::{Genome, GenomeParseError};
pub use operators::{crossover_at, mutate, one_point_crossover, rank_select};
pub use params::GaParams;
pub use population::{Individual, Population};

use thiserror::Error;

/// Errors raised by the GA layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GaError {
    #[error("invalid GA configuration: {field}: {reason}")]
    Config { field: &'static str, reason: String },
    #[error("genome length mismatch: expected {expected} bits, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("cannot select from an empty population")]
    EmptyPopulation,
}

impl GaError {
    pub(crate) fn config(field: &'static str, reason: impl Into<String>) -> Self {
        GaError::Config {
            field,
            reason: reason.into(),
        }
    }
}
