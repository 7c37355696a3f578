//! The analyzer applied to logs the simulator produced, checked against
//! what the plan implies.

use std::path::Path;

use volga_core::metrics::{analyze, load_events_path, slope_changes, window_rates, AnalysisOptions, Analysis};
use volga_core::ExperimentConfig;
use volga_server::http::{open_clearinghouse, Server};
use volga_server::{ServerConfig, ServerSettings};
use volga_swarm::{make_plan, run_swarm, ChurnSpec, ClientOptions, SpeedSpec, SwarmPlan, SwarmReport};

async fn simulate(dir: &Path, plan: &SwarmPlan, budget: u64, clock_scale: f64) -> (SwarmReport, Analysis) {
    let config = ServerConfig {
        experiment: ExperimentConfig {
            evaluation_budget: budget,
            ..ExperimentConfig::default()
        },
        server: ServerSettings {
            listen: "127.0.0.1:0".parse().unwrap(),
            data_dir: dir.to_path_buf(),
            watcher_period_ms: 60_000,
            clock_scale,
            ..ServerSettings::default()
        },
    };
    let server = Server::start(open_clearinghouse(&config).unwrap(), &config.server).await.unwrap();
    let report = run_swarm(plan, &ClientOptions::new(format!("http://{}", server.addr()))).await.unwrap();
    server.shutdown().await.unwrap();
    assert_eq!(report.abnormal_exits, 0);
    let events = load_events_path(&dir.join("events.jsonl")).unwrap();
    assert_eq!(events.skipped, 0);
    let analysis = analyze(&events.records, &AnalysisOptions::default());
    (report, analysis)
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn steady_swarm_has_plan_gap_and_constant_slope() {
    let dir = tempfile::tempdir().unwrap();
    // 0.05 s per segment, read as 2 s by a clock running 40 times fast
    let plan = make_plan(4, SpeedSpec::Constant { factor: 1.0 }, ChurnSpec::None, 0.05, 5).unwrap();
    let (report, analysis) = simulate(dir.path(), &plan, 240_000, 40.0).await;

    let gaps = analysis.gaps.summary.expect("gaps");
    assert!((1..=3).contains(&gaps.median), "median gap {}", gaps.median);

    let rates = window_rates(&analysis.series[&1], 20);
    assert!(rates.len() >= 4, "{rates:?}");
    let mean = rates.iter().sum::<f64>() / rates.len() as f64;
    for r in &rates {
        assert!((r - mean).abs() <= 0.1 * mean, "rates {rates:?}");
    }
    assert_eq!(slope_changes(&rates, 0.1), 0, "{rates:?}");
    assert_eq!(analysis.series[&1].last().unwrap().evaluations, report.total_evaluations);
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn mid_run_join_shows_as_a_slope_change() {
    let dir = tempfile::tempdir().unwrap();
    let mut plan = make_plan(4, SpeedSpec::Constant { factor: 1.0 }, ChurnSpec::None, 0.02, 6).unwrap();
    // two volunteers arrive 40 s (log time) into the run
    for p in &mut plan.profiles[2..] {
        p.join_time = 0.4;
    }
    let (_, analysis) = simulate(dir.path(), &plan, 80_000, 100.0).await;
    let rates = window_rates(&analysis.series[&1], 10);
    assert!(slope_changes(&rates, 0.3) >= 1, "{rates:?}");
    let first = rates[0];
    let last = rates[rates.len() - 1];
    assert!(last > 1.5 * first, "{rates:?}");
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn churning_heavy_tail_plan_gives_long_tailed_contributions() {
    let dir = tempfile::tempdir().unwrap();
    let churn = ChurnSpec::Geometric {
        mean_segments: 3.0,
        rejoin_probability: 0.3,
        join_spread: 0.2,
    };
    let plan = make_plan(40, SpeedSpec::Pareto { scale: 1.0, shape: 1.5 }, churn, 0.005, 77).unwrap();
    // budget out of reach: every visit ends by leaving
    let (report, analysis) = simulate(dir.path(), &plan, 100_000_000, 100.0).await;
    for (profile, summary) in plan.profiles.iter().zip(&report.clients) {
        assert_eq!(Some(summary.segments_done), profile.leave_after);
        assert_eq!(analysis.generations.per_client[&summary.client_id], summary.generations_run);
    }
    let s = analysis.generations.summary.expect("generations");
    assert!(s.median * 4 <= s.max, "median {} max {}", s.median, s.max);
    assert!(s.mean > s.median as f64, "mean {} median {}", s.mean, s.median);
}
