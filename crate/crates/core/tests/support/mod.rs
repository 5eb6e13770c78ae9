#![allow(dead_code)]

pub mod oracle;

use std::path::PathBuf;

use coaodv_sim::model::{
    validate_scenario, MobilityRecord, NodeId, NodeState, Position, Scenario, ScenarioConfig,
};
use coaodv_sim::scenario_file::load_scenario;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn reference_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/ten_node.json")
}

pub fn reference_scenario() -> Scenario {
    load_scenario(reference_path()).expect("reference scenario loads")
}

pub fn reference_with(f: impl FnOnce(&mut ScenarioConfig)) -> Scenario {
    let mut cfg = reference_scenario().into_config();
    f(&mut cfg);
    validate_scenario(cfg).expect("modified reference scenario is valid")
}

fn below(rng: &mut ChaCha8Rng, n: u64) -> u64 {
    rng.next_u64() % n
}

/// Random scenario with integer coordinates in `side x side`, small integer
/// displacements (so mobility ties happen) and energies in `0..=2000`.
pub fn random_scenario(seed: u64, min_nodes: u64, max_nodes: u64, side: u64) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = min_nodes + below(&mut rng, max_nodes - min_nodes + 1);
    let nodes = (0..count)
        .map(|i| {
            let x = below(&mut rng, side + 1) as f64;
            let y = below(&mut rng, side + 1) as f64;
            let dx = below(&mut rng, 7) as f64 - 3.0;
            let dy = below(&mut rng, 7) as f64 - 3.0;
            let clamp = |v: f64| v.clamp(0.0, side as f64);
            NodeState {
                id: NodeId(i as u32),
                mobility_record: MobilityRecord {
                    pos_t1: Position::new(x, y),
                    pos_t2: Position::new(clamp(x + dx), clamp(y + dy)),
                    elapsed: 1.0,
                },
                energy: below(&mut rng, 2001) as f64,
            }
        })
        .collect();
    validate_scenario(ScenarioConfig {
        nodes,
        area: (side as f64, side as f64),
        transmission_range: 20.0,
        energy_threshold: 500.0,
        threshold_strict: rng.next_u64() % 2 == 0,
        rng_seed: seed,
        ..Default::default()
    })
    .expect("random scenario is valid")
}
