//! Persistence for the clearinghouse.
//!
//! [`DirStore`] keeps everything in one directory: `state.json` is the
//! snapshot of the live experiment (rewritten atomically after every
//! accepted report and every reset), `events.jsonl` is the append-only
//! event journal consumed by the analyses, and `experiments.jsonl` collects
//! the watcher's final figures for each finished experiment.

use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};

use thiserror::Error;
use volga_core::EventRecord;

use crate::state::{ExperimentState, FinishedExperiment};

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("corrupt state store {path}: {detail}")]
    Corrupt { path: PathBuf, detail: String },
    #[error("store unavailable: {0}")]
    Unavailable(String),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> StoreError + '_ {
    move |source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Where the clearinghouse keeps its state.
pub trait StateStore: Send {
    /// The last saved state, or `None` on a cold start.
    fn load(&mut self) -> Result<Option<ExperimentState>, StoreError>;
    fn save(&mut self, state: &ExperimentState) -> Result<(), StoreError>;
    fn append_event(&mut self, event: &EventRecord) -> Result<(), StoreError>;
    fn record_finished(&mut self, finished: &FinishedExperiment) -> Result<(), StoreError>;
}

pub const STATE_FILE: &str = "state.json";
pub const EVENTS_FILE: &str = "events.jsonl";
pub const FINISHED_FILE: &str = "experiments.jsonl";

#[derive(Debug)]
pub struct DirStore {
    dir: PathBuf,
    events_path: PathBuf,
    events: Option<BufWriter<File>>,
}

impl DirStore {
    /// Opens (creating if needed) a store directory. The event log defaults
    /// to `events.jsonl` inside it.
    pub fn open(dir: impl Into<PathBuf>, event_log: Option<PathBuf>) -> Result<Self, StoreError> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        let events_path = event_log.unwrap_or_else(|| dir.join(EVENTS_FILE));
        Ok(DirStore {
            dir,
            events_path,
            events: None,
        })
    }

    pub fn state_path(&self) -> PathBuf {
        self.dir.join(STATE_FILE)
    }

    pub fn events_path(&self) -> &Path {
        &self.events_path
    }

    fn append_line(path: &Path, line: &str) -> Result<(), StoreError> {
        let mut f = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(io_err(path))?;
        writeln!(f, "{line}").map_err(io_err(path))
    }
}

impl StateStore for DirStore {
    fn load(&mut self) -> Result<Option<ExperimentState>, StoreError> {
        let path = self.state_path();
        let text = match fs::read_to_string(&path) {
            Ok(text) => text,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(io_err(&path)(e)),
        };
        let state: ExperimentState =
            serde_json::from_str(&text).map_err(|e| StoreError::Corrupt {
                path: path.clone(),
                detail: e.to_string(),
            })?;
        check_state(&state).map_err(|detail| StoreError::Corrupt { path, detail })?;
        Ok(Some(state))
    }

    fn save(&mut self, state: &ExperimentState) -> Result<(), StoreError> {
        let path = self.state_path();
        let tmp = self.dir.join(format!("{STATE_FILE}.tmp"));
        let text = serde_json::to_string_pretty(state).expect("state serializes");
        fs::write(&tmp, text).map_err(io_err(&tmp))?;
        fs::rename(&tmp, &path).map_err(io_err(&path))
    }

    fn append_event(&mut self, event: &EventRecord) -> Result<(), StoreError> {
        if self.events.is_none() {
            let f = OpenOptions::new()
                .create(true)
                .append(true)
                .open(&self.events_path)
                .map_err(io_err(&self.events_path))?;
            self.events = Some(BufWriter::new(f));
        }
        let w = self.events.as_mut().expect("opened above");
        writeln!(w, "{}", event.to_json_line())
            .and_then(|_| w.flush())
            .map_err(io_err(&self.events_path))
    }

    fn record_finished(&mut self, finished: &FinishedExperiment) -> Result<(), StoreError> {
        let line = serde_json::to_string(finished).expect("summary serializes");
        Self::append_line(&self.dir.join(FINISHED_FILE), &line)
    }
}

/// Consistency checks applied to a loaded snapshot.
fn check_state(state: &ExperimentState) -> Result<(), String> {
    state.config.validate().map_err(|e| e.to_string())?;
    if let Some(best) = &state.global_best {
        if best.genome().len() != state.config.ga.genome_length {
            return Err(format!(
                "global best has {} bits, config says {}",
                best.genome().len(),
                state.config.ga.genome_length
            ));
        }
    }
    Ok(())
}

#[derive(Debug, Default)]
struct MemoryInner {
    state: Option<ExperimentState>,
    events: Vec<EventRecord>,
    finished: Vec<FinishedExperiment>,
}

/// In-memory store. Clones share contents, so a test can keep a handle
/// and inspect what the server wrote, or make saves fail on demand.
#[derive(Debug, Clone, Default)]
pub struct MemoryStore {
    inner: Arc<Mutex<MemoryInner>>,
    fail_writes: Arc<AtomicBool>,
}

impl MemoryStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn events(&self) -> Vec<EventRecord> {
        self.inner.lock().unwrap().events.clone()
    }

    pub fn finished(&self) -> Vec<FinishedExperiment> {
        self.inner.lock().unwrap().finished.clone()
    }

    pub fn saved_state(&self) -> Option<ExperimentState> {
        self.inner.lock().unwrap().state.clone()
    }

    /// While set, every write fails with [`StoreError::Unavailable`].
    pub fn set_failing(&self, failing: bool) {
        self.fail_writes.store(failing, Ordering::SeqCst);
    }

    fn check_writable(&self) -> Result<(), StoreError> {
        if self.fail_writes.load(Ordering::SeqCst) {
            Err(StoreError::Unavailable("injected write failure".into()))
        } else {
            Ok(())
        }
    }
}

impl StateStore for MemoryStore {
    fn load(&mut self) -> Result<Option<ExperimentState>, StoreError> {
        Ok(self.inner.lock().unwrap().state.clone())
    }

    fn save(&mut self, state: &ExperimentState) -> Result<(), StoreError> {
        self.check_writable()?;
        self.inner.lock().unwrap().state = Some(state.clone());
        Ok(())
    }

    fn append_event(&mut self, event: &EventRecord) -> Result<(), StoreError> {
        self.check_writable()?;
        self.inner.lock().unwrap().events.push(event.clone());
        Ok(())
    }

    fn record_finished(&mut self, finished: &FinishedExperiment) -> Result<(), StoreError> {
        self.check_writable()?;
        self.inner.lock().unwrap().finished.push(finished.clone());
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use volga_core::{ExperimentConfig, Genome, Individual};

    #[test]
    fn empty_dir_is_a_cold_start() {
        let dir = tempfile::tempdir().unwrap();
        let mut store = DirStore::open(dir.path(), None).unwrap();
        assert!(store.load().unwrap().is_none());
    }

    #[test]
    fn snapshot_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mut store = DirStore::open(dir.path(), None).unwrap();
        let mut state = ExperimentState::fresh(ExperimentConfig::default());
        state.global_best = Some(Individual::with_fitness(Genome::ones(256), 256.0));
        state.evaluations_total = 3000;
        state.started_at = Some(1.5e9);
        state.clients.insert("abc".into(), Default::default());
        store.save(&state).unwrap();
        let mut reopened = DirStore::open(dir.path(), None).unwrap();
        assert_eq!(reopened.load().unwrap(), Some(state));
    }

    #[test]
    fn garbage_snapshot_is_corrupt() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join(STATE_FILE), "{\"config\": 12").unwrap();
        let mut store = DirStore::open(dir.path(), None).unwrap();
        let err = store.load().unwrap_err();
        assert!(matches!(err, StoreError::Corrupt { .. }), "{err}");
        assert!(err.to_string().contains("state.json"));
    }

    #[test]
    fn inconsistent_snapshot_is_corrupt() {
        let dir = tempfile::tempdir().unwrap();
        let mut store = DirStore::open(dir.path(), None).unwrap();
        let mut state = ExperimentState::fresh(ExperimentConfig::default());
        state.global_best = Some(Individual::with_fitness(Genome::ones(64), 64.0));
        store.save(&state).unwrap();
        assert!(matches!(store.load(), Err(StoreError::Corrupt { .. })));
    }

    #[test]
    fn events_append_as_json_lines() {
        let dir = tempfile::tempdir().unwrap();
        let log = dir.path().join("custom.jsonl");
        let mut store = DirStore::open(dir.path().join("data"), Some(log.clone())).unwrap();
        for i in 0..3 {
            store
                .append_event(&EventRecord {
                    timestamp: 100 + i,
                    experiment_id: 1,
                    client_id: "c".into(),
                    segment_index: i,
                    best_fitness: 8.0,
                    evaluations_total_after: 1000 * (i + 1),
                    generations_granted: 20,
                    generations_run: 20,
                })
                .unwrap();
        }
        let loaded = volga_core::metrics::load_events_path(&log).unwrap();
        assert_eq!(loaded.records.len(), 3);
        assert_eq!(loaded.skipped, 0);
    }
}
