use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use volga_core::{ExperimentConfig, Individual};

/// What the server knows about one client within an experiment.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ClientRecord {
    pub accepted_reports: u64,
    /// Generations granted in the last reply; the next report is expected
    /// to account for exactly this many.
    pub generations_granted: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentStatus {
    Running,
    Finished,
}

/// State of the one live experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentState {
    pub config: ExperimentConfig,
    pub global_best: Option<Individual>,
    pub evaluations_total: u64,
    /// Epoch seconds of the first accepted report.
    pub started_at: Option<f64>,
    pub clients: BTreeMap<String, ClientRecord>,
    pub accepted_reports: u64,
}

impl ExperimentState {
    pub fn fresh(config: ExperimentConfig) -> Self {
        ExperimentState {
            config,
            global_best: None,
            evaluations_total: 0,
            started_at: None,
            clients: BTreeMap::new(),
            accepted_reports: 0,
        }
    }

    pub fn status(&self) -> ExperimentStatus {
        if self.evaluations_total >= self.config.evaluation_budget {
            ExperimentStatus::Finished
        } else {
            ExperimentStatus::Running
        }
    }

    pub fn stats(&self, now: f64) -> Stats {
        Stats {
            experiment_id: self.config.experiment_id,
            status: self.status(),
            evaluations_total: self.evaluations_total,
            evaluation_budget: self.config.evaluation_budget,
            global_best_fitness: self.global_best.as_ref().map(Individual::fitness),
            clients: self.clients.len(),
            accepted_reports: self.accepted_reports,
            elapsed_seconds: self.started_at.map(|t| (now - t).max(0.0)),
        }
    }
}

/// Payload of `GET /api/stats`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub experiment_id: u64,
    pub status: ExperimentStatus,
    pub evaluations_total: u64,
    pub evaluation_budget: u64,
    pub global_best_fitness: Option<f64>,
    pub clients: usize,
    pub accepted_reports: u64,
    /// Seconds since the first accepted report; null before it.
    pub elapsed_seconds: Option<f64>,
}

/// Final figures of an experiment, written by the watcher on reset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinishedExperiment {
    pub experiment_id: u64,
    pub evaluations_total: u64,
    pub evaluation_budget: u64,
    pub best_fitness: Option<f64>,
    pub clients: usize,
    pub accepted_reports: u64,
    pub started_at: Option<f64>,
    pub reset_at: f64,
}

impl FinishedExperiment {
    pub fn of(state: &ExperimentState, reset_at: f64) -> Self {
        FinishedExperiment {
            experiment_id: state.config.experiment_id,
            evaluations_total: state.evaluations_total,
            evaluation_budget: state.config.evaluation_budget,
            best_fitness: state.global_best.as_ref().map(Individual::fitness),
            clients: state.clients.len(),
            accepted_reports: state.accepted_reports,
            started_at: state.started_at,
            reset_at,
        }
    }
}
