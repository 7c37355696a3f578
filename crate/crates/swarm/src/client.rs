use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use tokio::task::spawn_blocking;
use volga_core::ga::rng::{seeded, GaRng};
use volga_core::protocol::{decode_config, decode_reply, encode_report};
use volga_core::{ExperimentConfig, Individual, MigrationReply, MigrationReport, Population, SteadyState};

use crate::plan::ClientProfile;

/// How a client talks to the server.
#[derive(Debug, Clone)]
pub struct ClientOptions {
    /// Server root, e.g. `http://127.0.0.1:8080`.
    pub server: String,
    /// Attempts after the first failure of one request.
    pub max_retries: u32,
    /// Delay before the first retry; doubled on each further retry.
    pub retry_backoff: Duration,
    pub http: reqwest::Client,
}

impl ClientOptions {
    pub fn new(server: impl Into<String>) -> Self {
        ClientOptions {
            server: server.into().trim_end_matches('/').to_string(),
            max_retries: 4,
            retry_backoff: Duration::from_millis(100),
            http: reqwest::Client::builder()
                .timeout(Duration::from_secs(30))
                .build()
                .expect("default HTTP client"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClientExit {
    /// The server answered with zero generations.
    Completed,
    /// Left after `leave_after` segments.
    Left,
    /// Gave up on the server.
    Abnormal { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClientRunSummary {
    pub client_id: String,
    /// Reports the server accepted.
    pub segments_done: u64,
    /// Evaluations in accepted reports.
    pub evaluations_contributed: u64,
    /// Generations in accepted reports.
    pub generations_run: u64,
    pub best_fitness: Option<f64>,
    /// Seconds from the first request to the loop's end.
    pub wall_time: f64,
    /// Seconds from the first request to the reply that ended the
    /// experiment for this client, if one came.
    pub stopped_after: Option<f64>,
    pub exit: ClientExit,
    /// Failed request attempts, including ones later retried successfully.
    pub request_errors: u64,
}

enum RequestError {
    /// Worth another attempt: connection trouble or a 5xx.
    Transient(String),
    /// The server refused the request; retrying will not help.
    Rejected(String),
}

async fn fetch_once(options: &ClientOptions, report: Option<&str>) -> Result<String, RequestError> {
    let request = match report {
        Some(body) => options
            .http
            .post(format!("{}/api/migration", options.server))
            .header("content-type", "application/json")
            .body(body.to_string()),
        None => options.http.get(format!("{}/api/config", options.server)),
    };
    let resp = request.send().await.map_err(|e| RequestError::Transient(e.to_string()))?;
    let status = resp.status();
    let text = resp.text().await.map_err(|e| RequestError::Transient(e.to_string()))?;
    if status.is_success() {
        Ok(text)
    } else if status.is_server_error() {
        Err(RequestError::Transient(format!("{status}: {text}")))
    } else {
        Err(RequestError::Rejected(format!("{status}: {text}")))
    }
}

/// Sends one request with bounded retries and exponential backoff.
async fn fetch(options: &ClientOptions, report: Option<&str>, errors: &mut u64) -> Result<String, String> {
    let mut backoff = options.retry_backoff;
    let mut attempt = 0;
    loop {
        match fetch_once(options, report).await {
            Ok(text) => return Ok(text),
            Err(RequestError::Rejected(msg)) => {
                *errors += 1;
                return Err(msg);
            }
            Err(RequestError::Transient(msg)) => {
                *errors += 1;
                if attempt >= options.max_retries {
                    return Err(format!("giving up after {} attempts: {msg}", attempt + 1));
                }
                attempt += 1;
                tokio::time::sleep(backoff).await;
                backoff *= 2;
            }
        }
    }
}

struct Island {
    engine: Arc<SteadyState>,
    population: Population,
    rng: GaRng,
}

/// Runs one volunteer: fetch the config, then alternate segments of
/// evolution with migration exchanges until the server says stop, the
/// profile's `leave_after` is reached, or the server becomes unreachable.
///
/// Each segment takes at least `base_segment_delay × speed_factor ×
/// generations / generations_per_segment` seconds of wall time.
pub async fn client_loop(profile: &ClientProfile, base_segment_delay: f64, options: &ClientOptions) -> ClientRunSummary {
    let started = Instant::now();
    let mut summary = ClientRunSummary {
        client_id: profile.client_id.clone(),
        segments_done: 0,
        evaluations_contributed: 0,
        generations_run: 0,
        best_fitness: None,
        wall_time: 0.0,
        stopped_after: None,
        exit: ClientExit::Completed,
        request_errors: 0,
    };
    summary.exit = match run(profile, base_segment_delay, options, started, &mut summary).await {
        Ok(exit) => exit,
        Err(reason) => {
            tracing::warn!(client_id = %profile.client_id, %reason, "client exited abnormally");
            ClientExit::Abnormal { reason }
        }
    };
    summary.wall_time = started.elapsed().as_secs_f64();
    summary
}

async fn run(
    profile: &ClientProfile,
    base_segment_delay: f64,
    options: &ClientOptions,
    started: Instant,
    summary: &mut ClientRunSummary,
) -> Result<ClientExit, String> {
    let text = fetch(options, None, &mut summary.request_errors).await?;
    let config: ExperimentConfig = decode_config(&text).map_err(|e| format!("bad config: {e}"))?;
    let seed = profile.rng_seed;
    let ga = config.ga.clone();
    let mut island = spawn_blocking(move || -> Result<Island, String> {
        let engine = SteadyState::new(ga).map_err(|e| e.to_string())?;
        let mut rng = seeded(seed);
        let population = engine.random_population(&mut rng);
        Ok(Island {
            engine: Arc::new(engine),
            population,
            rng,
        })
    })
    .await
    .map_err(|e| e.to_string())??;

    let mut generations = config.generations_per_segment;
    let mut segment_index = 0;
    loop {
        let segment_started = Instant::now();
        let (back, result) = spawn_blocking(move || {
            let mut island = island;
            let result = island
                .engine
                .run_segment(&mut island.population, generations, &mut island.rng);
            (island, result)
        })
        .await
        .map_err(|e| e.to_string())?;
        island = back;
        let delay = base_segment_delay * profile.speed_factor * generations as f64
            / config.generations_per_segment as f64;
        let remaining = Duration::from_secs_f64(delay).saturating_sub(segment_started.elapsed());
        if !remaining.is_zero() {
            tokio::time::sleep(remaining).await;
        }

        segment_index += 1;
        let report = MigrationReport {
            experiment_id: config.experiment_id,
            client_id: profile.client_id.clone(),
            segment_index,
            best_genome: result.best.genome().clone(),
            best_fitness: result.best.fitness(),
            evaluations_delta: result.evaluations_delta,
        };
        let text = fetch(options, Some(&encode_report(&report)), &mut summary.request_errors).await?;
        let reply: MigrationReply = decode_reply(&text).map_err(|e| format!("bad reply: {e}"))?;
        if reply.experiment_id != config.experiment_id {
            // the experiment was reset under us; the report did not count
            return Ok(ClientExit::Completed);
        }
        summary.segments_done += 1;
        summary.evaluations_contributed += result.evaluations_delta;
        summary.generations_run += result.generations_run as u64;
        summary.best_fitness = Some(summary.best_fitness.map_or(result.best.fitness(), |b| b.max(result.best.fitness())));
        if reply.is_stop() {
            summary.stopped_after = Some(started.elapsed().as_secs_f64());
            return Ok(ClientExit::Completed);
        }
        let immigrant = Individual::with_fitness(reply.immigrant_genome, reply.immigrant_fitness);
        island
            .engine
            .incorporate_immigrant(&mut island.population, immigrant)
            .map_err(|e| format!("bad immigrant: {e}"))?;
        if profile.leave_after.is_some_and(|n| summary.segments_done >= n) {
            return Ok(ClientExit::Left);
        }
        generations = reply.generations_to_run;
    }
}
