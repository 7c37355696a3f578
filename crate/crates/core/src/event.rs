use serde::{Deserialize, Serialize};

/// One accepted migration report, as appended to the server's event log.
///
/// The log is JSON Lines: one record per line, timestamps non-decreasing
/// within a file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    /// Whole seconds since the Unix epoch.
    pub timestamp: u64,
    pub experiment_id: u64,
    pub client_id: String,
    pub segment_index: u64,
    /// Fitness of the individual the client reported.
    pub best_fitness: f64,
    pub evaluations_total_after: u64,
    /// Generations granted in the reply; zero means the client was stopped.
    pub generations_granted: u32,
    /// Generations the accepted report accounts for.
    #[serde(default)]
    pub generations_run: u32,
}

impl EventRecord {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("event serialization is infallible")
    }
}
