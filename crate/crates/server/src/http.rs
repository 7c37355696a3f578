//! HTTP front end.
//!
//! | route                 | body                                  |
//! |-----------------------|---------------------------------------|
//! | `GET /api/config`     | the running experiment's config       |
//! | `POST /api/migration` | a report in, a reply out              |
//! | `GET /api/stats`      | live counters                         |
//! | `GET /`               | static client assets                  |
//!
//! Errors come back as `{"error": kind, "detail": message}` with 400 for
//! malformed or mis-shaped JSON, 422 for well-formed reports that fail
//! validation, and 500 when the state store fails.

use std::io;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use axum::extract::State;
use axum::http::{header, StatusCode};
use axum::response::{Html, IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use tokio::net::TcpListener;
use tokio::sync::oneshot;
use tokio::task::JoinHandle;
use tower_http::services::ServeDir;
use volga_core::protocol::{decode_report, encode_config, encode_reply};

use crate::clearinghouse::{Clearinghouse, MigrationError};
use crate::clock::ScaledClock;
use crate::config::{ServerConfig, ServerSettings};
use crate::store::{DirStore, StoreError};

const INDEX_HTML: &str = include_str!("index.html");

/// Opens the on-disk store named by `config` and restores or starts the
/// experiment.
pub fn open_clearinghouse(config: &ServerConfig) -> Result<Arc<Clearinghouse>, StoreError> {
    let store = DirStore::open(&config.server.data_dir, Some(config.event_log_path()))?;
    let clock = Arc::new(ScaledClock::new(config.server.clock_scale));
    Ok(Arc::new(Clearinghouse::open(config.experiment.clone(), Box::new(store), clock)?))
}

pub fn router(clearinghouse: Arc<Clearinghouse>, static_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/config", get(config))
        .route("/api/migration", post(migration))
        .route("/api/stats", get(stats))
        .with_state(clearinghouse);
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api.route("/", get(|| async { Html(INDEX_HTML) })),
    }
}

fn json_text(status: StatusCode, body: String) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
}

fn error_response(err: &MigrationError) -> Response {
    let status = match err {
        MigrationError::Protocol(volga_core::ProtocolError::Validation(_))
        | MigrationError::FitnessMismatch { .. } => StatusCode::UNPROCESSABLE_ENTITY,
        MigrationError::Protocol(_) => StatusCode::BAD_REQUEST,
        MigrationError::Store(_) => StatusCode::INTERNAL_SERVER_ERROR,
    };
    let body = serde_json::json!({ "error": err.kind(), "detail": err.to_string() });
    (status, Json(body)).into_response()
}

async fn config(State(ch): State<Arc<Clearinghouse>>) -> Response {
    json_text(StatusCode::OK, encode_config(&ch.config()))
}

async fn stats(State(ch): State<Arc<Clearinghouse>>) -> Response {
    Json(ch.stats()).into_response()
}

async fn migration(State(ch): State<Arc<Clearinghouse>>, body: String) -> Response {
    let report = match decode_report(&body) {
        Ok(report) => report,
        Err(e) => return error_response(&e.into()),
    };
    let outcome = tokio::task::spawn_blocking(move || ch.handle_migration(&report)).await;
    match outcome {
        Ok(Ok(reply)) => json_text(StatusCode::OK, encode_reply(&reply)),
        Ok(Err(e)) => {
            if let MigrationError::Store(store) = &e {
                tracing::error!(error = %store, "report not persisted");
            }
            error_response(&e)
        }
        Err(join) => {
            tracing::error!(error = %join, "migration handler panicked");
            StatusCode::INTERNAL_SERVER_ERROR.into_response()
        }
    }
}

/// Checks the budget every `period` and resets finished experiments. Store
/// failures are logged and retried on the next tick.
pub fn spawn_watcher(clearinghouse: Arc<Clearinghouse>, period: Duration) -> JoinHandle<()> {
    tokio::spawn(async move {
        let mut ticks = tokio::time::interval(period);
        ticks.set_missed_tick_behavior(tokio::time::MissedTickBehavior::Delay);
        loop {
            ticks.tick().await;
            let ch = clearinghouse.clone();
            match tokio::task::spawn_blocking(move || ch.watcher_tick()).await {
                Ok(Ok(Some(notice))) => tracing::info!(
                    next = notice.new_experiment_id,
                    "started experiment {}",
                    notice.new_experiment_id
                ),
                Ok(Ok(None)) => {}
                Ok(Err(e)) => tracing::error!(error = %e, "watcher could not reset; will retry"),
                Err(e) => tracing::error!(error = %e, "watcher tick panicked"),
            }
        }
    })
}

/// A bound, running server.
pub struct Server {
    addr: SocketAddr,
    clearinghouse: Arc<Clearinghouse>,
    shutdown: oneshot::Sender<()>,
    serve: JoinHandle<io::Result<()>>,
    watcher: JoinHandle<()>,
}

impl Server {
    /// Binds `settings.listen` (port 0 picks a free port) and starts
    /// serving and watching.
    pub async fn start(clearinghouse: Arc<Clearinghouse>, settings: &ServerSettings) -> io::Result<Server> {
        let listener = TcpListener::bind(settings.listen).await?;
        let addr = listener.local_addr()?;
        let app = router(clearinghouse.clone(), settings.static_dir.clone());
        let (shutdown, signal) = oneshot::channel::<()>();
        let serve = tokio::spawn(async move {
            axum::serve(listener, app)
                .with_graceful_shutdown(async {
                    let _ = signal.await;
                })
                .await
        });
        let watcher = spawn_watcher(
            clearinghouse.clone(),
            Duration::from_millis(settings.watcher_period_ms),
        );
        Ok(Server {
            addr,
            clearinghouse,
            shutdown,
            serve,
            watcher,
        })
    }

    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn clearinghouse(&self) -> &Arc<Clearinghouse> {
        &self.clearinghouse
    }

    /// Stops accepting connections, lets in-flight requests finish and
    /// writes a final snapshot.
    pub async fn shutdown(self) -> io::Result<()> {
        let _ = self.shutdown.send(());
        let served = self.serve.await.map_err(io::Error::other)?;
        self.watcher.abort();
        let ch = self.clearinghouse.clone();
        tokio::task::spawn_blocking(move || ch.checkpoint())
            .await
            .map_err(io::Error::other)?
            .map_err(io::Error::other)?;
        served
    }
}
