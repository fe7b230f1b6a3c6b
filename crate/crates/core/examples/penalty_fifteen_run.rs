use happy_nucleolus::generators::vrp::{penalty_fifteen_spec, vrp_to_setcover};
use happy_nucleolus::rational::decimal_string;
use happy_nucleolus::solver::happy_nucleolus;
use std::time::Instant;

fn main() {
    let start = Instant::now();
    let inst = vrp_to_setcover(&penalty_fifteen_spec()).unwrap();
    println!("generated {} sets in {:?}", inst.sets.len(), start.elapsed());
    let t = Instant::now();
    let solution = happy_nucleolus(&inst).unwrap();
    println!("solved in {:?}, {} stages, lp = {}", t.elapsed(), solution.state.stage_log.len(),
             decimal_string(&solution.lp_value, 8));
    let published = [
        ("a", 2.43), ("b", 1.92), ("c", 2.84), ("d", 2.33), ("e", 3.05),
        ("f", 4.09), ("g", 5.62), ("h", 5.24), ("i", 6.00), ("j", 1.00),
        ("k", 3.02), ("l", 6.70), ("m", 3.18), ("n", 5.85), ("o", 5.51),
    ];
    let mut worst: f64 = 0.0;
    for (p, (label, expected)) in published.iter().enumerate() {
        let value = decimal_string(&solution.allocation.values[p], 15);
        let approx: f64 = value.parse().unwrap();
        let diff = (approx - expected).abs();
        if diff > worst { worst = diff; }
        println!("{label}: {value:<22} published {expected:<6} |diff| = {diff:.4}{}",
                 if diff > 0.01 { "  <-- OFF" } else { "" });
    }
    println!("worst deviation: {worst:.5}");
    println!("total: {:?}", start.elapsed());
}
