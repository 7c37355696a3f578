//! Best-effort reader for Apache "combined" access logs.
//!
//! Only successful `POST`s to the migration endpoint are turned into
//! records. Access logs carry no experiment or fitness data, so the
//! resulting records are good for gap and per-client analyses only:
//! `experiment_id` is 0 and the evaluation counter is a running estimate.

use std::collections::HashMap;
use std::io::BufRead;
use std::sync::OnceLock;

use chrono::DateTime;
use regex::Regex;

use super::{LoadedEvents, MetricsError};
use crate::event::EventRecord;

#[derive(Debug, Clone)]
pub struct ApacheOptions {
    /// Request path prefix that identifies a migration report.
    pub migration_path: String,
    /// Generations each request is assumed to account for.
    pub generations_per_request: u32,
    /// Evaluations each request is assumed to account for.
    pub evaluations_per_request: u64,
}

impl Default for ApacheOptions {
    fn default() -> Self {
        ApacheOptions {
            migration_path: "/api/migration".into(),
            generations_per_request: 20,
            evaluations_per_request: 1000,
        }
    }
}

fn line_pattern() -> &'static Regex {
    static PATTERN: OnceLock<Regex> = OnceLock::new();
    PATTERN.get_or_init(|| {
        Regex::new(
            r#"^(\S+) \S+ \S+ \[([^\]]+)\] "(\S+) (\S+)[^"]*" (\d{3}) \S+(?: "[^"]*" "([^"]*)")?"#,
        )
        .expect("valid regex")
    })
}

/// Clients are identified by remote host plus user agent when the log has
/// one; several browsers behind one NAT address then stay apart.
pub fn parse_apache_log<R: BufRead>(
    reader: R,
    options: &ApacheOptions,
) -> Result<LoadedEvents, MetricsError> {
    let mut loaded = LoadedEvents::default();
    let mut segments: HashMap<String, u64> = HashMap::new();
    let mut total = 0u64;
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let Some(caps) = line_pattern().captures(&line) else {
            loaded.skipped += 1;
            continue;
        };
        let Ok(time) = DateTime::parse_from_str(&caps[2], "%d/%b/%Y:%H:%M:%S %z") else {
            loaded.skipped += 1;
            continue;
        };
        let status: u16 = caps[5].parse().unwrap_or(0);
        if &caps[3] != "POST"
            || !caps[4].starts_with(&options.migration_path)
            || !(200..300).contains(&status)
        {
            continue;
        }
        let client_id = match caps.get(6) {
            Some(agent) if !agent.as_str().is_empty() && agent.as_str() != "-" => {
                format!("{}|{}", &caps[1], agent.as_str())
            }
            _ => caps[1].to_string(),
        };
        let segment = segments.entry(client_id.clone()).or_default();
        *segment += 1;
        total += options.evaluations_per_request;
        loaded.records.push(EventRecord {
            timestamp: time.timestamp().max(0) as u64,
            experiment_id: 0,
            client_id,
            segment_index: *segment,
            best_fitness: 0.0,
            evaluations_total_after: total,
            generations_granted: options.generations_per_request,
            generations_run: options.generations_per_request,
        });
    }
    loaded.records.sort_by_key(|r| r.timestamp);
    Ok(loaded)
}
