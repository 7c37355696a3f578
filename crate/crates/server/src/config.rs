//! Server configuration file.
//!
//! The file holds the experiment in the same JSON shape that
//! `GET /api/config` serves, plus an optional `server` section:
//!
//! ```json
//! {
//!   "evaluation_budget": 750000,
//!   "generations_per_segment": 20,
//!   "ga": { "genome_length": 256 },
//!   "server": { "listen": "0.0.0.0:8080", "data_dir": "data" }
//! }
//! ```
//!
//! Every field is optional.

use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;
use volga_core::protocol::PROTOCOL_VERSION;
use volga_core::ExperimentConfig;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Syntax {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: {detail}")]
    Invalid { path: PathBuf, detail: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServerSettings {
    pub listen: SocketAddr,
    pub data_dir: PathBuf,
    /// Event log location; defaults to `events.jsonl` inside `data_dir`.
    pub event_log: Option<PathBuf>,
    pub watcher_period_ms: u64,
    /// Directory served at `/`; a built-in page is used when absent.
    pub static_dir: Option<PathBuf>,
    /// Speed of the server clock relative to wall time. Only useful for
    /// compressing experiments in tests.
    pub clock_scale: f64,
}

impl Default for ServerSettings {
    fn default() -> Self {
        ServerSettings {
            listen: SocketAddr::from(([127, 0, 0, 1], 8080)),
            data_dir: PathBuf::from("data"),
            event_log: None,
            watcher_period_ms: 1000,
            static_dir: None,
            clock_scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ServerConfig {
    pub experiment: ExperimentConfig,
    pub server: ServerSettings,
}

#[derive(Deserialize)]
struct FileShape {
    protocol_version: Option<i64>,
    #[serde(default)]
    server: ServerSettings,
    #[serde(flatten)]
    experiment: ExperimentConfig,
}

impl ServerConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text).map_err(|e| match e {
            ParseError::Syntax(source) => ConfigError::Syntax {
                path: path.to_path_buf(),
                source,
            },
            ParseError::Invalid(detail) => ConfigError::Invalid {
                path: path.to_path_buf(),
                detail,
            },
        })
    }

    fn parse(text: &str) -> Result<Self, ParseError> {
        let shape: FileShape = serde_json::from_str(text).map_err(ParseError::Syntax)?;
        if let Some(v) = shape.protocol_version {
            if v != PROTOCOL_VERSION as i64 {
                return Err(ParseError::Invalid(format!(
                    "protocol_version {v} is not supported (expected {PROTOCOL_VERSION})"
                )));
            }
        }
        let config = ServerConfig {
            experiment: shape.experiment,
            server: shape.server,
        };
        config.validate().map_err(ParseError::Invalid)?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), String> {
        self.experiment.validate().map_err(|e| e.to_string())?;
        if self.server.watcher_period_ms == 0 {
            return Err("server.watcher_period_ms must be positive".into());
        }
        if !(self.server.clock_scale.is_finite() && self.server.clock_scale > 0.0) {
            return Err("server.clock_scale must be positive".into());
        }
        Ok(())
    }

    pub fn event_log_path(&self) -> PathBuf {
        self.server
            .event_log
            .clone()
            .unwrap_or_else(|| self.server.data_dir.join("events.jsonl"))
    }
}

enum ParseError {
    Syntax(serde_json::Error),
    Invalid(String),
}
