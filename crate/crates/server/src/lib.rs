//! The clearinghouse server.
//!
//! Clients never talk to each other. Each one periodically posts its best
//! individual to `/api/migration` and receives the best individual the
//! server has seen so far, plus the number of generations to run before
//! the next report (zero once the evaluation budget is spent). A watcher
//! task resets the experiment under a new id when the budget is reached.
//!
//! [`Clearinghouse`] holds all experiment state behind one lock; the HTTP
//! layer in [`http`] is a thin shell around it.

mod clearinghouse;
pub mod clock;
pub mod config;
pub mod http;
mod state;
pub mod store;

pub use clearinghouse::{Clearinghouse, MigrationError, ResetNotice};
pub use clock::{Clock, ManualClock, ScaledClock};
pub use config::{ConfigError, ServerConfig, ServerSettings};
pub use state::{ClientRecord, ExperimentState, ExperimentStatus, FinishedExperiment, Stats};
pub use store::{DirStore, MemoryStore, StateStore, StoreError};
