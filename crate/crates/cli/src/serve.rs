use std::io::Write;

use anyhow::Context;
use volga_core::protocol::encode_config;
use volga_server::http::{open_clearinghouse, Server};
use volga_server::ServerConfig;

use crate::args::ServeArgs;
use crate::{CliError, EXIT_OK};

fn effective_config(args: &ServeArgs) -> Result<ServerConfig, CliError> {
    let mut config = match &args.config {
        Some(path) => ServerConfig::load(path).map_err(|e| CliError::Usage(e.to_string()))?,
        None => ServerConfig::default(),
    };
    let s = &mut config.server;
    if let Some(v) = args.listen {
        s.listen = v;
    }
    if let Some(v) = &args.data_dir {
        s.data_dir = v.clone();
    }
    if let Some(v) = &args.event_log {
        s.event_log = Some(v.clone());
    }
    if let Some(v) = &args.static_dir {
        s.static_dir = Some(v.clone());
    }
    if let Some(v) = args.watcher_period_ms {
        s.watcher_period_ms = v;
    }
    if let Some(v) = args.clock_scale {
        s.clock_scale = v;
    }
    if let Some(v) = args.budget {
        config.experiment.evaluation_budget = v;
    }
    config.validate().map_err(CliError::Usage)?;
    Ok(config)
}

/// The config in file form, loadable with `--config`.
fn config_file_json(config: &ServerConfig) -> String {
    let mut value: serde_json::Value =
        serde_json::from_str(&encode_config(&config.experiment)).expect("encoded config is JSON");
    value["server"] = serde_json::to_value(&config.server).expect("settings serialize");
    serde_json::to_string_pretty(&value).expect("JSON value serializes")
}

async fn shutdown_signal() {
    let ctrl_c = tokio::signal::ctrl_c();
    #[cfg(unix)]
    {
        use tokio::signal::unix::{signal, SignalKind};
        match signal(SignalKind::terminate()) {
            Ok(mut term) => {
                tokio::select! {
                    _ = ctrl_c => {}
                    _ = term.recv() => {}
                }
            }
            Err(_) => {
                let _ = ctrl_c.await;
            }
        }
    }
    #[cfg(not(unix))]
    {
        let _ = ctrl_c.await;
    }
}

pub fn run(args: ServeArgs) -> Result<i32, CliError> {
    let config = effective_config(&args)?;
    if args.print_config {
        println!("{}", config_file_json(&config));
        return Ok(EXIT_OK);
    }
    let runtime = tokio::runtime::Runtime::new().context("starting runtime")?;
    runtime.block_on(async {
        let ch = open_clearinghouse(&config)
            .with_context(|| format!("opening state in {}", config.server.data_dir.display()))?;
        let server = Server::start(ch, &config.server)
            .await
            .with_context(|| format!("binding {}", config.server.listen))?;
        let stats = server.clearinghouse().stats();
        println!("listening on http://{}", server.addr());
        let _ = std::io::stdout().flush();
        tracing::info!(
            experiment_id = stats.experiment_id,
            evaluations_total = stats.evaluations_total,
            budget = stats.evaluation_budget,
            "serving"
        );
        shutdown_signal().await;
        tracing::info!("shutting down");
        server.shutdown().await.context("shutting down")?;
        Ok::<_, anyhow::Error>(())
    })?;
    Ok(EXIT_OK)
}
