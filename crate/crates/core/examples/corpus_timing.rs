use happy_nucleolus::checks;
use happy_nucleolus::generators::{random_instance, RandomInstanceParams};
use happy_nucleolus::oracle::OracleLimits;
use std::time::Instant;

fn main() {
    let limits = OracleLimits::default();
    let start = Instant::now();
    let count = 50usize;
    for seed in 0..count as u64 {
        let params = RandomInstanceParams {
            n_players: 2 + (seed as usize % 6),
            n_sets: 1 + (seed as usize % 12),
            max_cost: 10,
            max_denominator: 4,
        };
        let inst = random_instance(&params, seed).unwrap();
        let oracle = checks::check_oracle(&inst, &limits).unwrap();
        assert!(oracle.passed, "seed {seed}");
        let superset = checks::check_superset(&inst, (seed % 21) as usize, seed).unwrap();
        assert!(superset.passed, "seed {seed}");
    }
    println!("{count} instances (oracle + superset): {:?}", start.elapsed());
}
