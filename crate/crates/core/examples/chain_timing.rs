use happy_nucleolus::generators::chain_instance;
use happy_nucleolus::solver::happy_nucleolus;
use std::time::Instant;

fn main() {
    let start = Instant::now();
    for n in 2..=16 {
        let t = Instant::now();
        let inst = chain_instance(n).unwrap();
        let solution = happy_nucleolus(&inst).unwrap();
        println!("n={n}: {:?} stages={} rows={}", t.elapsed(), solution.state.stage_log.len(), solution.rows.rows.len());
    }
    println!("total: {:?}", start.elapsed());
}
