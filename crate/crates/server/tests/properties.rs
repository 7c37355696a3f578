use std::sync::Arc;

use proptest::prelude::*;
use volga_core::{ExperimentConfig, Genome, MigrationReport};
use volga_server::{Clearinghouse, ManualClock, MemoryStore};

fn genome(blocks: &[bool]) -> Genome {
    Genome::from_bits(blocks.iter().flat_map(|&b| [b; 8]).collect())
}

#[derive(Debug, Clone)]
struct Step {
    client: u8,
    blocks: Vec<bool>,
    stale: bool,
    delta: u64,
}

fn step() -> impl Strategy<Value = Step> {
    (0u8..6, proptest::collection::vec(any::<bool>(), 32), prop::bool::weighted(0.1), 0u64..5000)
        .prop_map(|(client, blocks, stale, delta)| Step { client, blocks, stale, delta })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// Any sequence of reports keeps the counter equal to the accepted
    /// segments times their cost, and the best equal to the running maximum.
    #[test]
    fn counter_and_best_follow_accepted_reports(steps in proptest::collection::vec(step(), 1..60)) {
        let config = ExperimentConfig { evaluation_budget: 1_000_000_000, ..ExperimentConfig::default() };
        let ch = Clearinghouse::open(config, Box::new(MemoryStore::new()), Arc::new(ManualClock::at(0.0))).unwrap();
        let mut segments = [0u64; 6];
        let mut expected_total = 0;
        let mut running_max: Option<f64> = None;
        for s in &steps {
            let g = genome(&s.blocks);
            let fitness = 8.0 * s.blocks.iter().filter(|&&b| b).count() as f64;
            segments[s.client as usize] += 1;
            let reply = ch.handle_migration(&MigrationReport {
                experiment_id: if s.stale { 9 } else { 1 },
                client_id: format!("client-{}", s.client),
                segment_index: segments[s.client as usize],
                best_genome: g,
                best_fitness: fitness,
                evaluations_delta: s.delta,
            }).unwrap();
            if s.stale {
                prop_assert!(reply.is_stop());
                continue;
            }
            expected_total += 1000;
            running_max = Some(running_max.map_or(fitness, |m| m.max(fitness)));
            prop_assert_eq!(Some(reply.immigrant_fitness), running_max);
            prop_assert_eq!(reply.generations_to_run, 20);
            let stats = ch.stats();
            prop_assert_eq!(stats.evaluations_total, expected_total);
            prop_assert_eq!(stats.global_best_fitness, running_max);
        }
    }
}
