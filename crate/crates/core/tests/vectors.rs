use std::path::PathBuf;

use serde::Deserialize;
use volga_core::protocol::{decode_config, decode_reply, decode_report, encode_config, encode_reply, encode_report};
use volga_core::vectors::{self, CORPUS_FILE, CORPUS_SIZE};

fn vectors_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../vectors")
}

#[test]
fn checked_in_vectors_match_the_encoder() {
    for f in vectors::all() {
        let on_disk = std::fs::read(vectors_dir().join(&f.name)).unwrap_or_else(|e| panic!("{}: {e}", f.name));
        assert!(on_disk == f.contents.as_bytes(), "{} differs from the encoder output", f.name);
    }
}

#[test]
fn message_vectors_decode_and_reencode_byte_for_byte() {
    let read = |name: &str| std::fs::read_to_string(vectors_dir().join(name)).unwrap();
    for name in ["report-001.json", "report-004.json"] {
        let text = read(name);
        assert_eq!(encode_report(&decode_report(&text).unwrap()), text, "{name}");
    }
    for name in ["reply-002.json", "reply-003-stop.json"] {
        let text = read(name);
        assert_eq!(encode_reply(&decode_reply(&text).unwrap()), text, "{name}");
    }
    let text = read("config-005.json");
    assert_eq!(encode_config(&decode_config(&text).unwrap()), text);
    assert!(decode_reply(&read("reply-003-stop.json")).unwrap().is_stop());
}

#[derive(Deserialize)]
struct Line {
    genome_length: usize,
    block_size: usize,
    block_reward: f64,
    genome: String,
    fitness: f64,
}

/// Independent reading of the hex convention and the fitness definition.
fn expected_fitness(line: &Line) -> f64 {
    let bits: Vec<bool> = line
        .genome
        .chars()
        .flat_map(|c| {
            let d = c.to_digit(16).unwrap();
            (0..4).rev().map(move |k| d >> k & 1 == 1)
        })
        .collect();
    assert_eq!(bits.len(), line.genome_length);
    let complete = bits.chunks(line.block_size).filter(|b| b.len() == line.block_size && b.iter().all(|&x| x)).count();
    line.block_reward * complete as f64
}

#[test]
fn corpus_fitness_is_correct() {
    let text = std::fs::read_to_string(vectors_dir().join(CORPUS_FILE)).unwrap();
    assert!(text.ends_with('\n'));
    let lines: Vec<Line> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), CORPUS_SIZE);
    for (i, line) in lines.iter().enumerate() {
        assert_eq!(line.fitness, expected_fitness(line), "corpus line {}", i + 1);
    }
    // the corpus exercises both extremes of every instance
    for (len, block, reward) in [(256, 8, 8.0), (64, 8, 8.0), (64, 4, 2.5), (12, 4, 4.0)] {
        let of: Vec<&Line> = lines
            .iter()
            .filter(|l| l.genome_length == len && l.block_size == block && l.block_reward == reward)
            .collect();
        assert!(!of.is_empty());
        let max = reward * (len / block) as f64;
        assert!(of.iter().any(|l| l.fitness == 0.0), "{len}/{block}");
        assert!(of.iter().any(|l| l.fitness == max), "{len}/{block}");
    }
}
