//! Migration wire messages and the experiment configuration payload.
//!
//! All messages are JSON objects with snake_case keys. The encoders emit a
//! canonical byte form (fixed key order, no whitespace, integral numbers
//! without a fraction) so that independent client implementations can be
//! checked against frozen vectors. Decoders are tolerant of unknown extra
//! keys and classify failures as parse, schema or validation errors; they
//! never return a partially decoded message.
//!
//! Report:
//! `{"protocol_version":1,"experiment_id":..,"client_id":"..","segment_index":..,
//! "best_genome":"<hex>","best_fitness":..,"evaluations_delta":..}`
//!
//! Reply:
//! `{"protocol_version":1,"experiment_id":..,"immigrant_genome":"<hex>",
//! "immigrant_fitness":..,"generations_to_run":..}`
//!
//! Genomes travel as lowercase hex, most significant bit first.

pub mod js_number;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ga::{GaParams, Genome};

/// Version carried by every message.
pub const PROTOCOL_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProtocolError {
    #[error("malformed JSON: {0}")]
    Parse(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("validation error: {0}")]
    Validation(String),
}

impl ProtocolError {
    pub fn kind(&self) -> &'static str {
        match self {
            ProtocolError::Parse(_) => "parse",
            ProtocolError::Schema(_) => "schema",
            ProtocolError::Validation(_) => "validation",
        }
    }
}

fn invalid(msg: impl Into<String>) -> ProtocolError {
    ProtocolError::Validation(msg.into())
}

/// Everything a client needs to take part in the running experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub experiment_id: u64,
    pub evaluation_budget: u64,
    pub generations_per_segment: u32,
    pub ga: GaParams,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            experiment_id: 1,
            evaluation_budget: 750_000,
            generations_per_segment: 20,
            ga: GaParams::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ProtocolError> {
        if self.experiment_id == 0 {
            return Err(invalid("experiment_id must be positive"));
        }
        if self.evaluation_budget == 0 {
            return Err(invalid("evaluation_budget must be positive"));
        }
        if self.generations_per_segment == 0 {
            return Err(invalid("generations_per_segment must be positive"));
        }
        self.ga.validate().map_err(|e| invalid(e.to_string()))
    }

    /// Evaluations one full segment costs a client.
    pub fn evaluations_per_segment(&self) -> u64 {
        self.generations_per_segment as u64 * self.ga.offspring_per_generation() as u64
    }

    /// The same experiment under the next id.
    pub fn next(&self) -> ExperimentConfig {
        ExperimentConfig {
            experiment_id: self.experiment_id + 1,
            ..self.clone()
        }
    }
}

/// A client's best individual after a segment.
#[derive(Debug, Clone, PartialEq)]
pub struct MigrationReport {
    pub experiment_id: u64,
    /// Opaque client token; clients use 128 random bits as 32 hex digits.
    pub client_id: String,
    /// Segments this client had completed when sending the report.
    pub segment_index: u64,
    pub best_genome: Genome,
    pub best_fitness: f64,
    pub evaluations_delta: u64,
}

/// The server's answer to a report.
#[derive(Debug, Clone, PartialEq)]
pub struct MigrationReply {
    pub experiment_id: u64,
    pub immigrant_genome: Genome,
    pub immigrant_fitness: f64,
    /// Generations to run before the next report; zero means stop.
    pub generations_to_run: u32,
}

impl MigrationReply {
    pub fn is_stop(&self) -> bool {
        self.generations_to_run == 0
    }

    pub fn check_genome_length(&self, expected: usize) -> Result<(), ProtocolError> {
        check_length("immigrant_genome", &self.immigrant_genome, expected)
    }
}

impl MigrationReport {
    pub fn check_genome_length(&self, expected: usize) -> Result<(), ProtocolError> {
        check_length("best_genome", &self.best_genome, expected)
    }
}

fn check_length(field: &str, genome: &Genome, expected: usize) -> Result<(), ProtocolError> {
    if genome.len() != expected {
        return Err(invalid(format!(
            "{field} has {} bits, experiment uses {expected}",
            genome.len()
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct WireReport<'a> {
    protocol_version: u32,
    experiment_id: u64,
    client_id: &'a str,
    segment_index: u64,
    best_genome: String,
    #[serde(serialize_with = "js_number::serialize")]
    best_fitness: f64,
    evaluations_delta: u64,
}

#[derive(Deserialize)]
struct RawReport {
    protocol_version: i64,
    experiment_id: i64,
    client_id: String,
    segment_index: i64,
    best_genome: String,
    best_fitness: f64,
    evaluations_delta: i64,
}

#[derive(Serialize)]
struct WireReply {
    protocol_version: u32,
    experiment_id: u64,
    immigrant_genome: String,
    #[serde(serialize_with = "js_number::serialize")]
    immigrant_fitness: f64,
    generations_to_run: u32,
}

#[derive(Deserialize)]
struct RawReply {
    protocol_version: i64,
    experiment_id: i64,
    immigrant_genome: String,
    immigrant_fitness: f64,
    generations_to_run: i64,
}

#[derive(Serialize)]
struct WireConfig<'a> {
    protocol_version: u32,
    #[serde(flatten)]
    config: &'a ExperimentConfig,
}

#[derive(Deserialize)]
struct RawConfig {
    #[serde(default = "current_version")]
    protocol_version: i64,
    #[serde(flatten)]
    config: ExperimentConfig,
}

fn current_version() -> i64 {
    PROTOCOL_VERSION as i64
}

/// Parses JSON text, then maps it onto `T`, separating syntax errors from
/// shape errors.
fn decode_shape<T: DeserializeOwned>(text: &str) -> Result<T, ProtocolError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| ProtocolError::Parse(e.to_string()))?;
    if !value.is_object() {
        return Err(ProtocolError::Schema("expected a JSON object".into()));
    }
    serde_json::from_value(value).map_err(|e| ProtocolError::Schema(e.to_string()))
}

fn check_version(version: i64) -> Result<(), ProtocolError> {
    if version != PROTOCOL_VERSION as i64 {
        return Err(invalid(format!(
            "unsupported protocol_version {version}, expected {PROTOCOL_VERSION}"
        )));
    }
    Ok(())
}

fn non_negative(field: &str, v: i64) -> Result<u64, ProtocolError> {
    u64::try_from(v).map_err(|_| invalid(format!("{field} must be non-negative, got {v}")))
}

fn fitness_value(field: &str, v: f64) -> Result<f64, ProtocolError> {
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(invalid(format!("{field} must be finite and non-negative, got {v}")))
    }
}

fn genome_field(field: &str, hex: &str) -> Result<Genome, ProtocolError> {
    Genome::from_hex(hex).map_err(|e| invalid(format!("{field}: {e}")))
}

pub fn encode_report(report: &MigrationReport) -> String {
    serde_json::to_string(&WireReport {
        protocol_version: PROTOCOL_VERSION,
        experiment_id: report.experiment_id,
        client_id: &report.client_id,
        segment_index: report.segment_index,
        best_genome: report.best_genome.to_hex(),
        best_fitness: report.best_fitness,
        evaluations_delta: report.evaluations_delta,
    })
    .expect("report serialization is infallible")
}

/// Decodes a report. The genome length is checked separately against the
/// running experiment with [`MigrationReport::check_genome_length`].
pub fn decode_report(text: &str) -> Result<MigrationReport, ProtocolError> {
    let raw: RawReport = decode_shape(text)?;
    check_version(raw.protocol_version)?;
    let experiment_id = non_negative("experiment_id", raw.experiment_id)?;
    if raw.client_id.is_empty() {
        return Err(invalid("client_id must not be empty"));
    }
    Ok(MigrationReport {
        experiment_id,
        client_id: raw.client_id,
        segment_index: non_negative("segment_index", raw.segment_index)?,
        best_genome: genome_field("best_genome", &raw.best_genome)?,
        best_fitness: fitness_value("best_fitness", raw.best_fitness)?,
        evaluations_delta: non_negative("evaluations_delta", raw.evaluations_delta)?,
    })
}

pub fn encode_reply(reply: &MigrationReply) -> String {
    serde_json::to_string(&WireReply {
        protocol_version: PROTOCOL_VERSION,
        experiment_id: reply.experiment_id,
        immigrant_genome: reply.immigrant_genome.to_hex(),
        immigrant_fitness: reply.immigrant_fitness,
        generations_to_run: reply.generations_to_run,
    })
    .expect("reply serialization is infallible")
}

pub fn decode_reply(text: &str) -> Result<MigrationReply, ProtocolError> {
    let raw: RawReply = decode_shape(text)?;
    check_version(raw.protocol_version)?;
    let generations = non_negative("generations_to_run", raw.generations_to_run)?;
    Ok(MigrationReply {
        experiment_id: non_negative("experiment_id", raw.experiment_id)?,
        immigrant_genome: genome_field("immigrant_genome", &raw.immigrant_genome)?,
        immigrant_fitness: fitness_value("immigrant_fitness", raw.immigrant_fitness)?,
        generations_to_run: u32::try_from(generations)
            .map_err(|_| invalid(format!("generations_to_run {generations} out of range")))?,
    })
}

pub fn encode_config(config: &ExperimentConfig) -> String {
    serde_json::to_string(&WireConfig {
        protocol_version: PROTOCOL_VERSION,
        config,
    })
    .expect("config serialization is infallible")
}

/// Decodes and validates a config payload. Absent fields take their
/// defaults.
pub fn decode_config(text: &str) -> Result<ExperimentConfig, ProtocolError> {
    let raw: RawConfig = decode_shape(text)?;
    check_version(raw.protocol_version)?;
    raw.config.validate()?;
    Ok(raw.config)
}
