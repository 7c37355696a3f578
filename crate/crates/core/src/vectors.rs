//! Frozen cross-implementation fixtures.
//!
//! The repository's `vectors/` directory holds the output of [`all`]:
//! canonical protocol messages (exact bytes, no trailing newline) and a
//! 1000-genome Royal Road corpus. Other client implementations must encode
//! the same messages to the same bytes and compute the same fitness values.

use rand::Rng;
use serde::Serialize;

use crate::ga::rng::seeded;
use crate::ga::{GaParams, Genome};
use crate::protocol::{
    encode_config, encode_reply, encode_report, js_number, ExperimentConfig, MigrationReply,
    MigrationReport,
};

/// Seed of the fitness corpus.
pub const CORPUS_SEED: u64 = 20080601;
pub const CORPUS_SIZE: usize = 1000;
pub const CORPUS_FILE: &str = "fitness-corpus.jsonl";

#[derive(Debug, Clone, PartialEq)]
pub struct VectorFile {
    pub name: &'static str,
    pub contents: String,
}

/// `blocks` bytes: the listed block indices are 0xff, every other block is
/// `filler`.
fn block_genome(blocks: usize, full: &[usize], filler: u8) -> Genome {
    let bits = (0..blocks)
        .flat_map(|i| {
            let byte = if full.contains(&i) { 0xff } else { filler };
            (0..8).rev().map(move |s| (byte >> s) & 1 == 1)
        })
        .collect();
    Genome::from_bits(bits)
}

/// Vector #1: a mid-run report on the default 256-bit instance.
pub fn report_1() -> MigrationReport {
    MigrationReport {
        experiment_id: 1,
        client_id: "3f2a9c0b7d4e4f61a8b5c6d7e8f90a1b".into(),
        segment_index: 1,
        best_genome: block_genome(32, &[0, 1, 2], 0xa5),
        best_fitness: 24.0,
        evaluations_delta: 1000,
    }
}

/// Vector #2: a reply carrying a 56-point immigrant and 20 more generations.
pub fn reply_2() -> MigrationReply {
    MigrationReply {
        experiment_id: 1,
        immigrant_genome: block_genome(32, &[0, 1, 2, 3, 4, 5, 6], 0x7e),
        immigrant_fitness: 56.0,
        generations_to_run: 20,
    }
}

/// Vector #3: a stop reply after the experiment moved on to id 2.
pub fn reply_3_stop() -> MigrationReply {
    MigrationReply {
        experiment_id: 2,
        immigrant_genome: Genome::zeros(256),
        immigrant_fitness: 0.0,
        generations_to_run: 0,
    }
}

/// Vector #4: a 64-bit report with a fractional fitness (block reward 2.5).
pub fn report_4() -> MigrationReport {
    MigrationReport {
        experiment_id: 7,
        client_id: "00000000000000000000000000000001".into(),
        segment_index: 12,
        best_genome: block_genome(8, &[1, 4, 7], 0x0f),
        best_fitness: 7.5,
        evaluations_delta: 500,
    }
}

/// Vector #5: the default experiment configuration.
pub fn config_5() -> ExperimentConfig {
    ExperimentConfig::default()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusEntry {
    pub genome_length: usize,
    pub block_size: usize,
    #[serde(serialize_with = "js_number::serialize")]
    pub block_reward: f64,
    pub genome: Genome,
    /// Expected fitness, known by construction.
    #[serde(serialize_with = "js_number::serialize")]
    pub fitness: f64,
}

const CORPUS_INSTANCES: [(usize, usize, f64); 4] =
    [(256, 8, 8.0), (64, 8, 8.0), (64, 4, 2.5), (12, 4, 4.0)];

/// Genomes with a known number of complete blocks: a uniformly drawn set of
/// blocks is filled with ones and every other block is random with at least
/// one zero bit.
pub fn fitness_corpus() -> Vec<CorpusEntry> {
    let mut rng = seeded(CORPUS_SEED);
    (0..CORPUS_SIZE)
        .map(|i| {
            let (len, block, reward) = CORPUS_INSTANCES[i % CORPUS_INSTANCES.len()];
            let blocks = len / block;
            let complete = rng.random_range(0..=blocks);
            let mut order: Vec<usize> = (0..blocks).collect();
            for j in (1..blocks).rev() {
                order.swap(j, rng.random_range(0..=j));
            }
            let full = &order[..complete];
            let mut bits = Vec::with_capacity(len);
            for b in 0..blocks {
                if full.contains(&b) {
                    bits.extend(std::iter::repeat_n(true, block));
                } else {
                    let mut chunk: Vec<bool> = (0..block).map(|_| rng.random()).collect();
                    if chunk.iter().all(|&x| x) {
                        chunk[rng.random_range(0..block)] = false;
                    }
                    bits.extend(chunk);
                }
            }
            CorpusEntry {
                genome_length: len,
                block_size: block,
                block_reward: reward,
                genome: Genome::from_bits(bits),
                fitness: reward * complete as f64,
            }
        })
        .collect()
}

/// The GA parameters a corpus entry implies.
pub fn corpus_params(entry: &CorpusEntry) -> GaParams {
    GaParams {
        genome_length: entry.genome_length,
        block_size: entry.block_size,
        block_reward: entry.block_reward,
        ..GaParams::default()
    }
}

pub fn all() -> Vec<VectorFile> {
    let corpus = fitness_corpus()
        .iter()
        .map(|e| serde_json::to_string(e).expect("corpus entry serializes") + "\n")
        .collect();
    vec![
        VectorFile {
            name: "report-001.json",
            contents: encode_report(&report_1()),
        },
        VectorFile {
            name: "reply-002.json",
            contents: encode_reply(&reply_2()),
        },
        VectorFile {
            name: "reply-003-stop.json",
            contents: encode_reply(&reply_3_stop()),
        },
        VectorFile {
            name: "report-004.json",
            contents: encode_report(&report_4()),
        },
        VectorFile {
            name: "config-005.json",
            contents: encode_config(&config_5()),
        },
        VectorFile {
            name: CORPUS_FILE,
            contents: corpus,
        },
    ]
}
