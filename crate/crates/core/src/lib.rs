//! Core building blocks of the volunteer GA clearinghouse.
//!
//! - [`ga`]: the steady-state genetic algorithm every client runs, with the
//!   Royal Road fitness, linear rank selection and immigrant incorporation.
//! - [`protocol`]: the JSON wire messages exchanged between clients and the
//!   server, plus the experiment configuration payload.
//! - [`event`]: the structured record the server appends for every accepted
//!   migration report.
//! - [`metrics`]: batch analyses over event logs (gap times, generations per
//!   client, run durations, evaluation series, speedup).
//! - [`vectors`]: generator for the frozen cross-implementation fixtures.

pub mod event;
pub mod ga;
pub mod metrics;
pub mod protocol;
pub mod vectors;

pub use event::EventRecord;
pub use ga::{
    Fitness, GaError, GaParams, Genome, Individual, Population, RoyalRoad, SegmentResult,
    SteadyState,
};
pub use protocol::{ExperimentConfig, MigrationReply, MigrationReport, ProtocolError};
