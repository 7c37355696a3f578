use std::path::Path;

use anyhow::Context;
use volga_swarm::{make_plan, run_swarm, ClientOptions, SwarmPlan};

use crate::args::{GenPlanArgs, PlanSpecArgs, SwarmArgs};
use crate::{CliError, EXIT_FAILURE, EXIT_OK};

fn plan_from_spec(spec: &PlanSpecArgs) -> Result<SwarmPlan, CliError> {
    make_plan(spec.clients, spec.speed.clone(), spec.churn.clone(), spec.base_delay, spec.seed)
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, format!("{text}\n"))
            .with_context(|| format!("writing {}", path.display()))
            .map_err(CliError::Runtime),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

pub fn gen_plan(args: GenPlanArgs) -> Result<i32, CliError> {
    let plan = plan_from_spec(&args.spec)?;
    write_or_print(args.out.as_deref(), &plan.to_json())?;
    Ok(EXIT_OK)
}

pub fn run(args: SwarmArgs) -> Result<i32, CliError> {
    let plan = match &args.plan {
        Some(path) => SwarmPlan::load(path).map_err(|e| CliError::Usage(e.to_string()))?,
        None => plan_from_spec(&args.spec)?,
    };
    let mut options = ClientOptions::new(args.server.clone());
    options.max_retries = args.max_retries;
    let runtime = tokio::runtime::Runtime::new().context("starting runtime")?;
    let report = runtime
        .block_on(run_swarm(&plan, &options))
        .map_err(|e| CliError::Usage(e.to_string()))?;
    write_or_print(args.out.as_deref(), &report.to_json())?;
    eprintln!(
        "{} clients, {} evaluations in {:.2} s ({:.0}/s), peak concurrency {}, {} abnormal exits",
        report.clients.len(),
        report.total_evaluations,
        report.wall_time,
        report.evaluations_per_second,
        report.peak_concurrency,
        report.abnormal_exits
    );
    Ok(if report.abnormal_exits == 0 { EXIT_OK } else { EXIT_FAILURE })
}
