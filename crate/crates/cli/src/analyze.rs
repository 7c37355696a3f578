use std::fs::File;
use std::io::BufReader;

use anyhow::Context;
use volga_core::metrics::{analyze, load_events_path, parse_apache_log, AnalysisOptions, ApacheOptions, SpeedupInputs};

use crate::args::{AnalyzeArgs, LogFormat, Table};
use crate::{CliError, EXIT_OK};

pub fn run(args: AnalyzeArgs) -> Result<i32, CliError> {
    let speedup = match args.speedup.as_deref() {
        Some([avg, segments]) => {
            if !(*avg > 0.0 && *segments > 0.0 && avg.is_finite() && segments.is_finite()) {
                return Err(CliError::Usage("--speedup values must be positive".into()));
            }
            Some(SpeedupInputs {
                avg_segment_seconds: *avg,
                segments_per_experiment: *segments,
            })
        }
        Some(_) => return Err(CliError::Usage("--speedup takes two values".into())),
        None => None,
    };
    if args.bin_width == 0 {
        return Err(CliError::Usage("--bin-width must be positive".into()));
    }
    let loaded = match args.format {
        LogFormat::Jsonl => load_events_path(&args.log),
        LogFormat::Apache => {
            let file = File::open(&args.log).with_context(|| format!("opening {}", args.log.display()))?;
            let options = ApacheOptions {
                migration_path: args.migration_path.clone(),
                ..ApacheOptions::default()
            };
            parse_apache_log(BufReader::new(file), &options)
        }
    }
    .with_context(|| format!("reading {}", args.log.display()))?;
    if loaded.skipped > 0 {
        eprintln!("warning: skipped {} malformed lines", loaded.skipped);
    }
    let analysis = analyze(
        &loaded.records,
        &AnalysisOptions {
            generations_bin_width: args.bin_width,
            speedup,
        },
    );
    let wanted = |t: Table| args.only.is_empty() || args.only.contains(&t);
    if wanted(Table::Durations) && analysis.durations.completed.is_empty() {
        eprintln!("warning: no completed experiment in the log; durations table is empty");
    }
    if !args.summary {
        std::fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
        let mut tables = Vec::new();
        if wanted(Table::Gaps) {
            tables.push(("gaps.csv", analysis.gaps_csv()));
        }
        if wanted(Table::Generations) {
            tables.push(("generations.csv", analysis.generations_csv()));
            tables.push(("generations_histogram.csv", analysis.generations_histogram_csv()));
        }
        if wanted(Table::Durations) {
            tables.push(("durations.csv", analysis.durations_csv()));
        }
        if wanted(Table::Series) {
            tables.push(("series.csv", analysis.series_csv()));
        }
        for (name, csv) in tables {
            let path = args.out.join(name);
            std::fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))?;
        }
    }
    let headline = analysis.headline(loaded.skipped);
    println!("{}", serde_json::to_string_pretty(&headline).expect("headline serializes"));
    Ok(EXIT_OK)
}
