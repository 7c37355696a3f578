//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Run with `cargo test -p volga-cli --test acceptance`.

use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Barrier};
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config as PropConfig, TestRunner};
use rand::Rng;
use volga_core::ga::rng::{seeded, stream};
use volga_core::ga::Fitness;
use volga_core::metrics::{analyze, evaluations_series, load_events_path, speedup, AnalysisOptions};
use volga_core::protocol::{decode_config, decode_reply, decode_report, encode_config, encode_reply, encode_report};
use volga_core::{
    vectors, EventRecord, ExperimentConfig, GaParams, Genome, MigrationReply, MigrationReport, RoyalRoad,
    SteadyState,
};
use volga_server::http::{open_clearinghouse, Server};
use volga_server::{Clearinghouse, ManualClock, MemoryStore, ServerConfig, ServerSettings};
use volga_swarm::{make_plan, run_swarm, ChurnSpec, ClientExit, ClientOptions, SpeedSpec, SwarmPlan};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn runtime() -> tokio::runtime::Runtime {
    tokio::runtime::Builder::new_multi_thread()
        .worker_threads(4)
        .enable_all()
        .build()
        .unwrap()
}

async fn start_server(dir: &Path, experiment: ExperimentConfig, watcher_period_ms: u64, clock_scale: f64) -> Server {
    let config = ServerConfig {
        experiment,
        server: ServerSettings {
            listen: "127.0.0.1:0".parse().unwrap(),
            data_dir: dir.to_path_buf(),
            watcher_period_ms,
            clock_scale,
            ..ServerSettings::default()
        },
    };
    Server::start(open_clearinghouse(&config).unwrap(), &config.server).await.unwrap()
}

fn budget(evaluation_budget: u64) -> ExperimentConfig {
    ExperimentConfig {
        evaluation_budget,
        ..ExperimentConfig::default()
    }
}

/// Exhaustive check of the fitness function on a 12-bit instance with
/// 4-bit blocks against a per-block scan written from the definition.
fn fitness_oracle() -> Outcome {
    let started = Instant::now();
    let rr = RoyalRoad::new(4, 4.0).unwrap();
    let mut mismatches = 0;
    for word in 0u32..4096 {
        let bits: Vec<bool> = (0..12).map(|i| word >> (11 - i) & 1 == 1).collect();
        let mut expected = 0.0;
        for block in 0..3 {
            if (0..4).all(|j| bits[block * 4 + j]) {
                expected += 4.0;
            }
        }
        if rr.evaluate(&Genome::from_bits(bits)) != expected {
            mismatches += 1;
        }
    }
    let elapsed = started.elapsed();
    check(mismatches == 0, || format!("{mismatches} of 4096 genomes disagree"))?;
    check(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("4096/4096 exact in {:.1} ms", elapsed.as_secs_f64() * 1e3))
}

/// Evaluations a lone client spends before its best reaches `target`, or
/// `None` if `limit` is exhausted first. The initial population counts.
fn evaluations_to_reach(params: GaParams, target: f64, limit: u64, seed: u64) -> (Option<u64>, f64) {
    let engine = SteadyState::new(params).unwrap();
    let mut rng = seeded(seed);
    let mut population = engine.random_population(&mut rng);
    let mut evaluations = population.len() as u64;
    let mut best = population.best().unwrap().fitness();
    while evaluations < limit {
        if best >= target {
            return (Some(evaluations), best);
        }
        evaluations += engine.breed_generation(&mut population, &mut rng);
        best = population.best().unwrap().fitness();
    }
    (if best >= target { Some(evaluations) } else { None }, best)
}

fn solver_sanity() -> Outcome {
    let started = Instant::now();
    let params = GaParams {
        genome_length: 64,
        ..GaParams::default()
    };
    let runs: Vec<Option<u64>> = (0..20)
        .map(|seed| evaluations_to_reach(params.clone(), 64.0, 750_000, 1000 + seed).0)
        .collect();
    let solved: Vec<u64> = runs.iter().flatten().copied().collect();
    let elapsed = started.elapsed();
    let mut sorted = solved.clone();
    sorted.sort_unstable();
    let median = sorted.get(sorted.len().saturating_sub(1) / 2).copied().unwrap_or(0);
    check(solved.len() >= 16, || format!("only {}/20 runs reached 64", solved.len()))?;
    check(elapsed < Duration::from_secs(120), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "{}/20 runs reached 64 (median {median} evaluations) in {:.1} s",
        solved.len(),
        elapsed.as_secs_f64()
    ))
}

/// Reported, never failed.
fn full_scale_smoke() -> String {
    let started = Instant::now();
    let (_, best) = evaluations_to_reach(GaParams::default(), 256.0, 750_000, 7);
    let verdict = if best >= 200.0 { "reached" } else { "SHORTFALL: below" };
    format!(
        "256-bit run best {best} within 750000 evaluations ({verdict} 200) in {:.1} s",
        started.elapsed().as_secs_f64()
    )
}

fn random_genome<R: Rng>(rng: &mut R) -> (Genome, f64) {
    let mut bits = Vec::with_capacity(256);
    let mut complete = 0;
    for _ in 0..32 {
        if rng.random_bool(0.3) {
            complete += 1;
            bits.extend([true; 8]);
        } else {
            let mut block: Vec<bool> = (0..8).map(|_| rng.random()).collect();
            block[rng.random_range(0..8)] = false;
            bits.extend(block);
        }
    }
    (Genome::from_bits(bits), 8.0 * complete as f64)
}

/// One round of 64 reporters released together, each posting several
/// reports with random fitness.
fn concurrent_round(round: u64) -> Result<(), String> {
    const REPORTERS: usize = 64;
    const REPORTS_EACH: u64 = 4;
    let ch = Arc::new(
        Clearinghouse::open(
            ExperimentConfig::default(),
            Box::new(MemoryStore::new()),
            Arc::new(ManualClock::at(0.0)),
        )
        .unwrap(),
    );
    // highest best seen in any completed reply, as f64 bits (monotone for
    // non-negative values)
    let observed = Arc::new(AtomicU64::new(0));
    let barrier = Arc::new(Barrier::new(REPORTERS));
    let threads: Vec<_> = (0..REPORTERS)
        .map(|i| {
            let (ch, observed, barrier) = (ch.clone(), observed.clone(), barrier.clone());
            std::thread::spawn(move || -> Result<(), String> {
                let mut rng = stream(round, i as u64);
                let mut own_last = 0.0;
                barrier.wait();
                for segment in 1..=REPORTS_EACH {
                    let (genome, fitness) = random_genome(&mut rng);
                    let floor = f64::from_bits(observed.load(Ordering::SeqCst));
                    let reply = ch
                        .handle_migration(&MigrationReport {
                            experiment_id: 1,
                            client_id: format!("r{i}"),
                            segment_index: segment,
                            best_genome: genome,
                            best_fitness: fitness,
                            evaluations_delta: 1000,
                        })
                        .map_err(|e| e.to_string())?;
                    let best = reply.immigrant_fitness;
                    if best < floor || best < own_last || best < fitness {
                        return Err(format!(
                            "round {round}: reply best {best} below observed {floor} / previous {own_last} / own {fitness}"
                        ));
                    }
                    own_last = best;
                    observed.fetch_max(best.to_bits(), Ordering::SeqCst);
                }
                Ok(())
            })
        })
        .collect();
    for t in threads {
        t.join().map_err(|_| "reporter panicked".to_string())??;
    }
    let stats = ch.stats();
    let expected = REPORTERS as u64 * REPORTS_EACH * 1000;
    check(stats.evaluations_total == expected, || {
        format!("round {round}: evaluations_total {} != {expected}", stats.evaluations_total)
    })?;
    let observed = f64::from_bits(observed.load(Ordering::SeqCst));
    check(stats.global_best_fitness == Some(observed), || {
        format!("round {round}: final best {:?} != max observed {observed}", stats.global_best_fitness)
    })
}

fn monotone_best() -> Outcome {
    let started = Instant::now();
    for round in 0..100 {
        concurrent_round(round)?;
    }
    Ok(format!(
        "100 rounds × 64 reporters × 4 reports, counter exact, best never regressed ({:.1} s)",
        started.elapsed().as_secs_f64()
    ))
}

fn lifecycle() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    runtime().block_on(async {
        let period = Duration::from_millis(200);
        let server = start_server(dir.path(), budget(5000), period.as_millis() as u64, 1.0).await;
        let base = format!("http://{}", server.addr());
        let http = reqwest::Client::new();
        let mut replies = Vec::new();
        for i in 1..=6u64 {
            let client = if i == 6 { "late" } else { "steady" };
            let body = encode_report(&MigrationReport {
                experiment_id: 1,
                client_id: client.into(),
                segment_index: if i == 6 { 1 } else { i },
                best_genome: Genome::zeros(256),
                best_fitness: 0.0,
                evaluations_delta: 1000,
            });
            let text = http.post(format!("{base}/api/migration")).body(body).send().await.unwrap().text().await.unwrap();
            replies.push(decode_reply(&text).map_err(|e| e.to_string())?);
        }
        let budget_hit = Instant::now();
        let grants: Vec<u32> = replies.iter().map(|r| r.generations_to_run).collect();
        check(grants == [20, 20, 20, 20, 0, 0], || format!("grants {grants:?}"))?;
        let reset_after = loop {
            let stats: serde_json::Value =
                http.get(format!("{base}/api/stats")).send().await.unwrap().json().await.unwrap();
            if stats["experiment_id"] == 2 {
                check(stats["evaluations_total"] == 0, || format!("stats after reset {stats}"))?;
                check(stats["global_best_fitness"].is_null(), || format!("stats after reset {stats}"))?;
                check(stats["clients"] == 0, || format!("stats after reset {stats}"))?;
                break budget_hit.elapsed();
            }
            if budget_hit.elapsed() > period * 5 {
                return Err("no reset within five watcher periods".into());
            }
            tokio::time::sleep(Duration::from_millis(5)).await;
        };
        // one period plus scheduling slack
        check(reset_after <= period + Duration::from_millis(100), || {
            format!("reset took {reset_after:?} with a {period:?} watcher")
        })?;
        let config = decode_config(&http.get(format!("{base}/api/config")).send().await.unwrap().text().await.unwrap())
            .map_err(|e| e.to_string())?;
        check(config.experiment_id == 2, || format!("config id {}", config.experiment_id))?;
        server.shutdown().await.unwrap();
        Ok(format!(
            "grants {grants:?}; experiment 2 with zeroed state {:.0} ms after the budget (watcher period {} ms)",
            reset_after.as_secs_f64() * 1e3,
            period.as_millis()
        ))
    })
}

fn speedup_arithmetic() -> Outcome {
    let a = speedup(2.906, 375.0, 292.0).map_err(|e| e.to_string())?;
    let b = speedup(2.906, 375.0, 1089.75).map_err(|e| e.to_string())?;
    check((a - 3.73).abs() <= 0.005, || format!("speedup(2.906, 375, 292) = {a}"))?;
    check((b - 1.0).abs() <= 0.001, || format!("speedup(2.906, 375, 1089.75) = {b}"))?;
    check(speedup(2.906, 375.0, 0.0).is_err(), || "zero duration accepted".into())?;
    Ok(format!("{a:.4} and {b:.4}"))
}

fn metrics_fidelity() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let plan = make_plan(4, SpeedSpec::default(), ChurnSpec::None, 0.03, 2008).map_err(|e| e.to_string())?;
    let report = runtime().block_on(async {
        // 0.03 s of wall time per segment reads as 3 s in the log
        let server = start_server(dir.path(), budget(20_000), 60_000, 100.0).await;
        let report = run_swarm(&plan, &ClientOptions::new(format!("http://{}", server.addr()))).await.unwrap();
        server.shutdown().await.unwrap();
        report
    });
    check(report.abnormal_exits == 0, || format!("{} abnormal exits", report.abnormal_exits))?;
    let log = dir.path().join("events.jsonl");
    let loaded = load_events_path(&log).map_err(|e| e.to_string())?;
    check(loaded.skipped == 0, || format!("{} unreadable lines", loaded.skipped))?;
    let analysis = analyze(&loaded.records, &AnalysisOptions::default());

    for c in &report.clients {
        let logged = analysis.generations.per_client.get(&c.client_id).copied().unwrap_or(0);
        check(logged == c.generations_run, || {
            format!("client {}: analyzer {logged} generations, simulator {}", c.client_id, c.generations_run)
        })?;
    }
    check(analysis.generations.per_client.len() == report.clients.len(), || "client count differs".into())?;

    let series = analysis.series.get(&1).ok_or("no series for experiment 1")?;
    let values: Vec<u64> = series.iter().map(|p| p.evaluations).collect();
    let segments: u64 = report.clients.iter().map(|c| c.segments_done).sum();
    let truth: Vec<u64> = (1..=segments).map(|k| k * 1000).collect();
    check(values == truth, || format!("series {values:?} != {truth:?}"))?;
    check(*values.last().unwrap() == report.total_evaluations, || "series end != simulator total".into())?;
    check(series.windows(2).all(|w| w[0].elapsed_seconds <= w[1].elapsed_seconds), || "time goes backwards".into())?;

    // inject one negative and one oversized gap for an extra client
    let mut events = loaded.records.clone();
    let t0 = events.last().unwrap().timestamp + 10;
    let total = events.last().unwrap().evaluations_total_after;
    for (seg, t) in [(1u64, t0), (2, t0 - 5), (3, t0 + 145)] {
        events.push(EventRecord {
            timestamp: t,
            experiment_id: 1,
            client_id: "injected".into(),
            segment_index: seg,
            best_fitness: 0.0,
            evaluations_total_after: total + 1000 * seg,
            generations_granted: 20,
            generations_run: 20,
        });
    }
    let with_injected = analyze(&events, &AnalysisOptions::default());
    let gaps = &with_injected.gaps;
    check(gaps.dropped_negative == analysis.gaps.dropped_negative + 1, || "negative gap not dropped".into())?;
    check(gaps.dropped_over_limit == analysis.gaps.dropped_over_limit + 1, || "150 s gap not dropped".into())?;
    check(gaps.samples.iter().all(|s| (0..=100).contains(&s.gap_seconds)), || "gap outside [0, 100]".into())?;
    check(!gaps.samples.iter().any(|s| s.client_id == "injected"), || "injected gap kept".into())?;
    check(gaps.samples.len() == analysis.gaps.samples.len(), || "sample count changed".into())?;
    // direct recomputation of the series from the raw log
    check(evaluations_series(&loaded.records)[&1] == *series, || "series not reproducible".into())?;

    Ok(format!(
        "{} clients, {} reports: generation sums and series exact; gaps -5 and 150 excluded; median gap {} s",
        report.clients.len(),
        segments,
        analysis.gaps.summary.map_or(0, |s| s.median)
    ))
}

fn throughput() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let started = Instant::now();
    let report = runtime().block_on(async {
        let server = start_server(dir.path(), budget(500_000), 60_000, 1.0).await;
        let report = run_swarm(&SwarmPlan::uniform(44, 0.0, 44), &ClientOptions::new(format!("http://{}", server.addr())))
            .await
            .unwrap();
        server.shutdown().await.unwrap();
        report
    });
    let elapsed = started.elapsed();
    check(report.request_errors == 0, || format!("{} failed requests", report.request_errors))?;
    check(report.abnormal_exits == 0, || format!("{} abnormal exits", report.abnormal_exits))?;
    check(report.peak_concurrency == 44, || format!("peak concurrency {}", report.peak_concurrency))?;
    check(report.clients.iter().all(|c| c.exit == ClientExit::Completed), || "client did not complete".into())?;
    check(report.evaluations_per_second >= 4000.0, || format!("{:.0} evaluations/s", report.evaluations_per_second))?;
    check(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "44 clients, {} evaluations at {:.0}/s, 0 failed requests, {:.1} s",
        report.total_evaluations,
        report.evaluations_per_second,
        elapsed.as_secs_f64()
    ))
}

fn arb_genome() -> impl Strategy<Value = Genome> {
    (1usize..=96).prop_flat_map(|nibbles| proptest::collection::vec(any::<bool>(), nibbles * 4).prop_map(Genome::from_bits))
}

fn arb_fitness() -> impl Strategy<Value = f64> {
    prop_oneof![
        (0u32..=4096).prop_map(|v| v as f64),
        (0u32..=4096).prop_map(|v| v as f64 * 0.5),
        any::<f64>().prop_filter_map("finite", |v| v.is_finite().then_some(v.abs())),
    ]
}

fn arb_id() -> impl Strategy<Value = u64> {
    0u64..=i64::MAX as u64
}

fn arb_report() -> impl Strategy<Value = MigrationReport> {
    (arb_id(), "\\PC{1,40}", arb_id(), arb_genome(), arb_fitness(), arb_id()).prop_map(
        |(experiment_id, client_id, segment_index, best_genome, best_fitness, evaluations_delta)| MigrationReport {
            experiment_id,
            client_id,
            segment_index,
            best_genome,
            best_fitness,
            evaluations_delta,
        },
    )
}

fn arb_reply() -> impl Strategy<Value = MigrationReply> {
    (arb_id(), arb_genome(), arb_fitness(), any::<u32>()).prop_map(
        |(experiment_id, immigrant_genome, immigrant_fitness, generations_to_run)| MigrationReply {
            experiment_id,
            immigrant_genome,
            immigrant_fitness,
            generations_to_run,
        },
    )
}

fn arb_config() -> impl Strategy<Value = ExperimentConfig> {
    (
        1u64..=i64::MAX as u64,
        1u64..=i64::MAX as u64,
        1u32..=u32::MAX,
        prop::sample::select(vec![1usize, 2, 4, 8, 16]),
        1usize..=16,
        1usize..=250,
        any::<bool>(),
        0.0f64..=1.0,
        0.0f64..=1.0,
        arb_fitness().prop_filter("positive", |v| *v > 0.0),
        any::<bool>(),
    )
        .prop_map(
            |(experiment_id, evaluation_budget, gps, block, blocks, half_pop, all, cross, rate, reward, mac)| {
                let population_size = half_pop * 2;
                ExperimentConfig {
                    experiment_id,
                    evaluation_budget,
                    generations_per_segment: gps,
                    ga: GaParams {
                        genome_length: block.max(4) * blocks,
                        population_size,
                        replacement_fraction: if all { 1.0 } else { 0.5 },
                        crossover_priority: cross,
                        mutation_priority: 1.0 - cross,
                        per_bit_mutation_rate: rate,
                        block_size: block,
                        block_reward: reward,
                        mutate_after_crossover: mac,
                    },
                }
            },
        )
}

fn protocol_round_trip() -> Outcome {
    const CASES: u32 = 10_000;
    let config = PropConfig {
        cases: CASES,
        failure_persistence: None,
        ..PropConfig::default()
    };
    let mut runner = TestRunner::new_with_rng(config.clone(), proptest::test_runner::TestRng::from_seed(
        proptest::test_runner::RngAlgorithm::ChaCha,
        &[7; 32],
    ));
    runner
        .run(&arb_report(), |r| {
            prop_assert_eq!(decode_report(&encode_report(&r)).unwrap(), r);
            Ok(())
        })
        .map_err(|e| format!("report: {e}"))?;
    let mut runner = TestRunner::new(config.clone());
    runner
        .run(&arb_reply(), |r| {
            prop_assert_eq!(decode_reply(&encode_reply(&r)).unwrap(), r);
            Ok(())
        })
        .map_err(|e| format!("reply: {e}"))?;
    let mut runner = TestRunner::new(config);
    runner
        .run(&arb_config(), |c| {
            prop_assert_eq!(decode_config(&encode_config(&c)).unwrap(), c);
            Ok(())
        })
        .map_err(|e| format!("config: {e}"))?;

    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../vectors");
    let files = vectors::all();
    for f in &files {
        let bytes = std::fs::read(dir.join(&f.name)).map_err(|e| format!("{}: {e}", f.name))?;
        check(bytes == f.contents.as_bytes(), || format!("{} does not byte-match", f.name))?;
    }
    Ok(format!(
        "{CASES} reports, {CASES} replies, {CASES} configs round-trip; {} frozen vector files byte-match",
        files.len()
    ))
}

fn main() {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("fitness oracle", fitness_oracle),
        ("solver sanity", solver_sanity),
        ("monotone best under concurrency", monotone_best),
        ("lifecycle", lifecycle),
        ("speedup arithmetic", speedup_arithmetic),
        ("metrics fidelity", metrics_fidelity),
        ("throughput", throughput),
        ("protocol round-trip", protocol_round_trip),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("[PASS] {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {name}: {detail}");
            }
        }
        if name == "solver sanity" {
            println!("[INFO] full-scale smoke: {}", full_scale_smoke());
        }
    }
    println!("acceptance: {} failed", failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
