use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::client::{client_loop, ClientExit, ClientOptions, ClientRunSummary};
use crate::plan::{PlanError, SwarmPlan};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwarmReport {
    /// In plan order.
    pub clients: Vec<ClientRunSummary>,
    pub total_evaluations: u64,
    pub wall_time: f64,
    /// Seconds from swarm start until the first stop reply, i.e. until the
    /// budget was reached. Excludes segments already in flight by then.
    pub budget_reached_after: Option<f64>,
    pub evaluations_per_second: f64,
    /// Most client loops running at the same moment.
    pub peak_concurrency: usize,
    pub abnormal_exits: usize,
    pub request_errors: u64,
}

impl SwarmReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization is infallible")
    }
}

/// Starts every profile's client loop at its join time and waits for all
/// of them. Abnormal client exits are recorded in the report.
pub async fn run_swarm(plan: &SwarmPlan, options: &ClientOptions) -> Result<SwarmReport, PlanError> {
    plan.validate()?;
    let active = Arc::new(AtomicUsize::new(0));
    let peak = Arc::new(AtomicUsize::new(0));
    let started = Instant::now();
    let tasks: Vec<_> = plan
        .profiles
        .iter()
        .cloned()
        .map(|profile| {
            let (active, peak, options) = (active.clone(), peak.clone(), options.clone());
            let base = plan.base_segment_delay;
            tokio::spawn(async move {
                tokio::time::sleep_until((started + Duration::from_secs_f64(profile.join_time)).into()).await;
                let now = active.fetch_add(1, Ordering::SeqCst) + 1;
                peak.fetch_max(now, Ordering::SeqCst);
                let offset = started.elapsed().as_secs_f64();
                let summary = client_loop(&profile, base, &options).await;
                active.fetch_sub(1, Ordering::SeqCst);
                (offset, summary)
            })
        })
        .collect();
    let mut clients = Vec::with_capacity(tasks.len());
    let mut budget_reached_after: Option<f64> = None;
    for (task, profile) in tasks.into_iter().zip(&plan.profiles) {
        match task.await {
            Ok((offset, summary)) => {
                if let Some(t) = summary.stopped_after {
                    let at = offset + t;
                    budget_reached_after = Some(budget_reached_after.map_or(at, |b| b.min(at)));
                }
                clients.push(summary);
            }
            Err(e) => clients.push(ClientRunSummary {
                client_id: profile.client_id.clone(),
                segments_done: 0,
                evaluations_contributed: 0,
                generations_run: 0,
                best_fitness: None,
                wall_time: 0.0,
                stopped_after: None,
                exit: ClientExit::Abnormal {
                    reason: format!("client task failed: {e}"),
                },
                request_errors: 0,
            }),
        }
    }
    let wall_time = started.elapsed().as_secs_f64();
    let total_evaluations = clients.iter().map(|c| c.evaluations_contributed).sum();
    Ok(SwarmReport {
        total_evaluations,
        wall_time,
        budget_reached_after,
        evaluations_per_second: if wall_time > 0.0 { total_evaluations as f64 / wall_time } else { 0.0 },
        peak_concurrency: peak.load(Ordering::SeqCst),
        abnormal_exits: clients.iter().filter(|c| matches!(c.exit, ClientExit::Abnormal { .. })).count(),
        request_errors: clients.iter().map(|c| c.request_errors).sum(),
        clients,
    })
}
