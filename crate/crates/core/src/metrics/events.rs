use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use super::MetricsError;
use crate::event::EventRecord;

/// Records read from a log, in timestamp order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LoadedEvents {
    pub records: Vec<EventRecord>,
    /// Non-blank lines that did not parse as a record.
    pub skipped: usize,
}

/// Reads a JSONL event log. Malformed lines are counted and skipped; the
/// records are stably sorted by timestamp.
pub fn load_events<R: BufRead>(reader: R) -> Result<LoadedEvents, MetricsError> {
    let mut loaded = LoadedEvents::default();
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<EventRecord>(&line) {
            Ok(record) => loaded.records.push(record),
            Err(_) => loaded.skipped += 1,
        }
    }
    loaded.records.sort_by_key(|r| r.timestamp);
    Ok(loaded)
}

pub fn load_events_path(path: &Path) -> Result<LoadedEvents, MetricsError> {
    load_events(BufReader::new(File::open(path)?))
}
