use std::sync::{Arc, Mutex, MutexGuard};

use thiserror::Error;
use volga_core::ga::Fitness;
use volga_core::{
    EventRecord, ExperimentConfig, Individual, MigrationReply, MigrationReport, ProtocolError,
};

use crate::clock::Clock;
use crate::state::{ExperimentState, ExperimentStatus, FinishedExperiment, Stats};
use crate::store::{StateStore, StoreError};

/// Relative tolerance when comparing claimed and recomputed fitness.
const FITNESS_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum MigrationError {
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error("reported fitness {claimed} does not match recomputed fitness {actual}")]
    FitnessMismatch { claimed: f64, actual: f64 },
    #[error("could not persist report: {0}")]
    Store(#[from] StoreError),
}

impl MigrationError {
    pub fn kind(&self) -> &'static str {
        match self {
            MigrationError::Protocol(e) => e.kind(),
            MigrationError::FitnessMismatch { .. } => "fitness_mismatch",
            MigrationError::Store(_) => "store",
        }
    }
}

/// Emitted by the watcher when it starts a new experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ResetNotice {
    pub finished: FinishedExperiment,
    pub new_experiment_id: u64,
}

struct Inner {
    state: ExperimentState,
    /// Config for the next experiment; only the id changes between resets.
    template: ExperimentConfig,
    store: Box<dyn StateStore>,
}

/// The live experiment and its persistence, serialized behind one lock.
///
/// Report handling and the watcher are the only writers. Each accepted
/// report updates the counter and the global best, appends its event and
/// persists the snapshot before the lock is released, so the counter never
/// loses updates and the best never decreases within one experiment.
pub struct Clearinghouse {
    inner: Mutex<Inner>,
    clock: Arc<dyn Clock>,
}

impl Clearinghouse {
    /// Restores the stored experiment, or starts `config` on a cold start.
    ///
    /// A restored experiment keeps the config it was started with; `config`
    /// applies from the next reset on.
    pub fn open(
        config: ExperimentConfig,
        mut store: Box<dyn StateStore>,
        clock: Arc<dyn Clock>,
    ) -> Result<Self, StoreError> {
        config.validate().map_err(|e| StoreError::Unavailable(format!("invalid config: {e}")))?;
        let state = match store.load()? {
            Some(state) => {
                tracing::info!(
                    experiment_id = state.config.experiment_id,
                    evaluations_total = state.evaluations_total,
                    "restored experiment state"
                );
                state
            }
            None => {
                let state = ExperimentState::fresh(config.clone());
                store.save(&state)?;
                state
            }
        };
        Ok(Clearinghouse {
            inner: Mutex::new(Inner {
                state,
                template: config,
                store,
            }),
            clock,
        })
    }

    fn lock(&self) -> MutexGuard<'_, Inner> {
        self.inner.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
    }

    pub fn config(&self) -> ExperimentConfig {
        self.lock().state.config.clone()
    }

    pub fn stats(&self) -> Stats {
        let inner = self.lock();
        inner.state.stats(self.clock.now())
    }

    pub fn state(&self) -> ExperimentState {
        self.lock().state.clone()
    }

    /// Processes one report and builds the reply.
    ///
    /// Reports for another experiment id are answered with a stop and the
    /// current id, without touching state. Otherwise the genome is
    /// re-evaluated and rejected on mismatch; an accepted report adds its
    /// evaluations, may replace the global best (strictly better only),
    /// is journaled, and the reply carries the post-update best.
    pub fn handle_migration(&self, report: &MigrationReport) -> Result<MigrationReply, MigrationError> {
        let mut guard = self.lock();
        let inner = &mut *guard;
        let config = &inner.state.config;

        if report.experiment_id != config.experiment_id {
            let immigrant = inner.state.global_best.clone().unwrap_or_else(|| {
                Individual::with_fitness(report.best_genome.clone(), report.best_fitness)
            });
            return Ok(MigrationReply {
                experiment_id: config.experiment_id,
                immigrant_genome: immigrant.genome().clone(),
                immigrant_fitness: immigrant.fitness(),
                generations_to_run: 0,
            });
        }

        report.check_genome_length(config.ga.genome_length)?;
        let actual = config
            .ga
            .royal_road()
            .map_err(|e| ProtocolError::Validation(e.to_string()))?
            .evaluate(&report.best_genome);
        if (actual - report.best_fitness).abs() > FITNESS_TOLERANCE * actual.abs().max(1.0) {
            tracing::warn!(
                client_id = %report.client_id,
                claimed = report.best_fitness,
                actual,
                "rejected report with wrong fitness"
            );
            return Err(MigrationError::FitnessMismatch {
                claimed: report.best_fitness,
                actual,
            });
        }

        let now = self.clock.now();
        let mut next = inner.state.clone();
        let client = next.clients.entry(report.client_id.clone()).or_default();
        let generations_run = if client.accepted_reports == 0 {
            config.generations_per_segment
        } else {
            client.generations_granted
        };
        let expected = generations_run as u64 * config.ga.offspring_per_generation() as u64;
        if report.evaluations_delta != expected {
            tracing::warn!(
                client_id = %report.client_id,
                reported = report.evaluations_delta,
                expected,
                "evaluation count disagrees with granted generations; using the expected count"
            );
        }
        next.evaluations_total += expected;
        let granted = if next.evaluations_total < config.evaluation_budget {
            config.generations_per_segment
        } else {
            0
        };
        client.accepted_reports += 1;
        client.generations_granted = granted;
        next.accepted_reports += 1;
        next.started_at.get_or_insert(now);
        if next.global_best.as_ref().is_none_or(|b| actual > b.fitness()) {
            next.global_best = Some(Individual::with_fitness(report.best_genome.clone(), actual));
        }

        let event = EventRecord {
            timestamp: now.max(0.0).floor() as u64,
            experiment_id: config.experiment_id,
            client_id: report.client_id.clone(),
            segment_index: report.segment_index,
            best_fitness: actual,
            evaluations_total_after: next.evaluations_total,
            generations_granted: granted,
            generations_run,
        };
        inner.store.append_event(&event)?;
        inner.store.save(&next)?;
        inner.state = next;

        let best = inner.state.global_best.as_ref().expect("set above");
        Ok(MigrationReply {
            experiment_id: inner.state.config.experiment_id,
            immigrant_genome: best.genome().clone(),
            immigrant_fitness: best.fitness(),
            generations_to_run: granted,
        })
    }

    /// One watcher pass: if the budget is spent, record the final figures
    /// and start the next experiment with an empty state. A no-op while the
    /// experiment is running, so repeated ticks reset at most once.
    pub fn watcher_tick(&self) -> Result<Option<ResetNotice>, StoreError> {
        let mut guard = self.lock();
        let inner = &mut *guard;
        if inner.state.status() == ExperimentStatus::Running {
            return Ok(None);
        }
        let finished = FinishedExperiment::of(&inner.state, self.clock.now());
        let next_config = ExperimentConfig {
            experiment_id: inner.state.config.experiment_id + 1,
            ..inner.template.clone()
        };
        let next = ExperimentState::fresh(next_config);
        inner.store.record_finished(&finished)?;
        inner.store.save(&next)?;
        inner.state = next;
        tracing::info!(
            finished = finished.experiment_id,
            evaluations = finished.evaluations_total,
            best = ?finished.best_fitness,
            "experiment finished; reset"
        );
        Ok(Some(ResetNotice {
            new_experiment_id: inner.state.config.experiment_id,
            finished,
        }))
    }

    /// Writes the current snapshot, e.g. on shutdown.
    pub fn checkpoint(&self) -> Result<(), StoreError> {
        let mut guard = self.lock();
        let inner = &mut *guard;
        inner.store.save(&inner.state)
    }
}
