//! Shared hand-built fixtures for unit tests.
//!
//! The two vehicle routing instances below are written out as explicit set
//! covering instances, with tour costs derived in this module from
//! hand-entered metric-closure distance tables by brute-force permutation.
//! Generator code is deliberately not used here, so generator tests can
//! compare against these as an independent source.

use crate::model::{CoverSet, SetCoverInstance};
use crate::rational::{int, Rational};
use itertools::Itertools;

/// Exact closed-tour cost through the depot (index 0 of `dist`) visiting all
/// of `customers` (indices into `dist`), by enumerating permutations.
pub(crate) fn tour_cost(dist: &[Vec<Rational>], customers: &[usize]) -> Rational {
    customers
        .iter()
        .copied()
        .permutations(customers.len())
        .map(|perm| {
            let mut cost = dist[0][perm[0]].clone();
            for w in perm.windows(2) {
                cost += &dist[w[0]][w[1]];
            }
            cost + &dist[*perm.last().unwrap()][0]
        })
        .min()
        .expect("nonempty subset")
}

/// Builds one cover set per nonempty customer subset of size at most
/// `capacity`, costed by exact subset TSP over `dist`.
pub(crate) fn tours_instance(
    labels: &[&str],
    dist: &[Vec<Rational>],
    capacity: usize,
) -> SetCoverInstance {
    let n = labels.len();
    let mut sets = Vec::new();
    for size in 1..=capacity.min(n) {
        for subset in (0..n).combinations(size) {
            let vertices: Vec<usize> = subset.iter().map(|&p| p + 1).collect();
            sets.push(CoverSet::new(subset, tour_cost(dist, &vertices)));
        }
    }
    SetCoverInstance::new(labels.iter().map(|s| s.to_string()).collect(), sets)
}

/// Five customers on two branches from the depot; uncapacitated tours. The
/// distance table is the metric closure of edges D-a 1, a-b 1, b-D 1,
/// D-c 1, c-d 1, d-e 1. Fractional and integral routing optima are both 9.
pub(crate) fn fig1_instance() -> SetCoverInstance {
    let d: Vec<Vec<Rational>> = [
        [0, 1, 1, 1, 2, 3],
        [1, 0, 1, 2, 3, 4],
        [1, 1, 0, 2, 3, 4],
        [1, 2, 2, 0, 1, 2],
        [2, 3, 3, 1, 0, 1],
        [3, 4, 4, 2, 1, 0],
    ]
    .iter()
    .map(|row| row.iter().map(|&v| int(v)).collect())
    .collect();
    tours_instance(&["a", "b", "c", "d", "e"], &d, 5)
}

/// Four customers, tours limited to two customers each. Metric closure of
/// edges D-b 4, D-d 3, a-b 0, a-c 0, b-c 0, b-d 6. Fractional optimum 18,
/// integral optimum 21.
pub(crate) fn fig2_instance() -> SetCoverInstance {
    let d: Vec<Vec<Rational>> = [
        [0, 4, 4, 4, 3],
        [4, 0, 0, 0, 6],
        [4, 0, 0, 0, 6],
        [4, 0, 0, 0, 6],
        [3, 6, 6, 6, 0],
    ]
    .iter()
    .map(|row| row.iter().map(|&v| int(v)).collect())
    .collect();
    tours_instance(&["a", "b", "c", "d"], &d, 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Coalition;

    #[test]
    fn fig1_spot_checks() {
        let inst = fig1_instance();
        assert_eq!(inst.sets.len(), 31);
        let cost_of = |members: &[usize]| {
            let c = Coalition::new(members.iter().copied());
            inst.sets.iter().find(|s| s.members == c).map(|s| s.cost.clone()).unwrap()
        };
        assert_eq!(cost_of(&[2, 3, 4]), int(6)); // c, d, e
        assert_eq!(cost_of(&[0, 1]), int(3)); // a, b
        assert_eq!(cost_of(&[2]), int(2)); // c
        assert_eq!(cost_of(&[0, 1, 2, 3, 4]), int(9));
    }

    #[test]
    fn fig2_spot_checks() {
        let inst = fig2_instance();
        assert_eq!(inst.sets.len(), 10);
        let cost_of = |members: &[usize]| {
            let c = Coalition::new(members.iter().copied());
            inst.sets.iter().find(|s| s.members == c).map(|s| s.cost.clone()).unwrap()
        };
        assert_eq!(cost_of(&[0, 1]), int(8)); // tour a,b
        assert_eq!(cost_of(&[3]), int(6)); // tour d
        assert_eq!(cost_of(&[0, 3]), int(13)); // tour a,d
        assert_eq!(cost_of(&[2, 3]), int(13)); // tour c,d
        assert_eq!(cost_of(&[0]), int(8));
    }
}
