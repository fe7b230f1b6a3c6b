//! Vehicle routing instances as set covering problems.
//!
//! Every possible tour (a closed walk through the depot serving a customer
//! subset) becomes one cover set, costed by exact TSP over the subset.
//! Geometry comes either from integer customer coordinates (Euclidean
//! distances rounded to a rational grid) or from an edge-weighted graph
//! (metric closure by all-pairs shortest paths, exact). Optional dropping
//! penalties add singleton sets; duplicates collapse to the cheaper cost.

use crate::model::{CoverSet, SetCoverInstance};
use crate::rational::{Rational, RationalJson};
use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Hard limit on customers (tour enumeration is exponential).
pub const MAX_CUSTOMERS: usize = 20;
/// Hard limit on customers per tour (exact TSP by permutations).
pub const MAX_TOUR_SIZE: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VrpError {
    #[error("at most {MAX_CUSTOMERS} customers are supported, got {0}")]
    TooManyCustomers(usize),
    #[error("tours of size {0} exceed the exact-TSP limit of {MAX_TOUR_SIZE}; set a capacity")]
    TourSizeTooLarge(usize),
    #[error("capacity must be at least 1")]
    ZeroCapacity,
    #[error("spec must provide exactly one of `coords` or `graph`")]
    AmbiguousGeometry,
    #[error("depot spec does not match the geometry mode")]
    DepotMismatch,
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown customer `{0}` in penalties")]
    UnknownCustomer(String),
    #[error("graph is disconnected: no path between `{0}` and `{1}`")]
    Disconnected(String, String),
    #[error("edge weights and penalties must be nonnegative")]
    NegativeValue,
    #[error("round_denom must be at least 1")]
    BadRounding,
    #[error("coordinates too large for exact rounding")]
    CoordinateOverflow,
}

/// An undirected edge `[from, to, cost]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphEdge(
    pub String,
    pub String,
    #[serde(with = "crate::rational::rational_serde")] pub Rational,
);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphSpec {
    pub vertices: Vec<String>,
    pub edges: Vec<GraphEdge>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DepotSpec {
    /// Coordinates (coords mode).
    Coords(i64, i64),
    /// Vertex name (graph mode).
    Vertex(String),
}

fn default_round_denom() -> u64 {
    1_000_000
}

/// A vehicle routing instance description.
///
/// JSON shape:
/// `{"coords": [[x,y],...] | "graph": {"vertices": [...], "edges":
/// [[u,v,cost],...]}, "depot": [x,y] | "name", "capacity": k | null,
/// "penalties": {"label": cost, ...} | null, "round_denom": 1000000}`.
///
/// In coords mode customers are labeled `a`, `b`, ... in input order and
/// distances are Euclidean, rounded to the nearest multiple of
/// `1/round_denom`. In graph mode customers are the non-depot vertices and
/// distances come from the metric closure of the listed edges, exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VrpSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<(i64, i64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphSpec>,
    pub depot: DepotSpec,
    /// Customers per tour; `null` means unbounded.
    #[serde(default)]
    pub capacity: Option<usize>,
    /// Cost of not serving a customer, as an extra singleton set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub penalties: Option<BTreeMap<String, RationalJson>>,
    #[serde(default = "default_round_denom")]
    pub round_denom: u64,
}

/// Euclidean distance rounded to the nearest multiple of `1/denom` (exact
/// integer square root; ties cannot occur).
fn euclidean_rounded(a: (i64, i64), b: (i64, i64), denom: u64) -> Result<Rational, VrpError> {
    let dx = (a.0 - b.0) as i128;
    let dy = (a.1 - b.1) as i128;
    let squared = (dx * dx + dy * dy) as u128;
    let scale = denom as u128;
    let t = squared
        .checked_mul(scale)
        .and_then(|v| v.checked_mul(scale))
        .ok_or(VrpError::CoordinateOverflow)?;
    let f = t.sqrt();
    let nearest = if t <= f * f + f { f } else { f + 1 };
    Ok(Rational::new(BigInt::from(nearest), BigInt::from(denom)))
}

/// Exact closed-tour cost through the depot (index 0) visiting all of
/// `vertices`, by permutation enumeration with the reversal symmetry
/// removed.
fn tour_cost(dist: &[Vec<Rational>], vertices: &[usize]) -> Rational {
    vertices
        .iter()
        .copied()
        .permutations(vertices.len())
        .filter(|perm| perm.len() < 2 || perm[0] <= perm[perm.len() - 1])
        .map(|perm| {
            let mut cost = dist[0][perm[0]].clone();
            for w in perm.windows(2) {
                cost += &dist[w[0]][w[1]];
            }
            cost + &dist[*perm.last().unwrap()][0]
        })
        .min()
        .expect("nonempty vertex set")
}

/// Labels and the depot-rooted distance matrix (depot at index 0).
fn geometry(spec: &VrpSpec) -> Result<(Vec<String>, Vec<Vec<Rational>>), VrpError> {
    match (&spec.coords, &spec.graph) {
        (Some(coords), None) => {
            let depot = match &spec.depot {
                DepotSpec::Coords(x, y) => (*x, *y),
                DepotSpec::Vertex(_) => return Err(VrpError::DepotMismatch),
            };
            if spec.round_denom == 0 {
                return Err(VrpError::BadRounding);
            }
            let labels: Vec<String> = (0..coords.len())
                .map(|i| {
                    char::from_u32('a' as u32 + i as u32)
                        .map(String::from)
                        .unwrap_or_else(|| format!("c{}", i + 1))
                })
                .collect();
            let mut points = vec![depot];
            points.extend(coords.iter().copied());
            let k = points.len();
            let mut dist = vec![vec![Rational::zero(); k]; k];
            for i in 0..k {
                for j in (i + 1)..k {
                    let d = euclidean_rounded(points[i], points[j], spec.round_denom)?;
                    dist[i][j] = d.clone();
                    dist[j][i] = d;
                }
            }
            Ok((labels, dist))
        }
        (None, Some(graph)) => {
            let depot_name = match &spec.depot {
                DepotSpec::Vertex(name) => name,
                DepotSpec::Coords(..) => return Err(VrpError::DepotMismatch),
            };
            let index_of = |name: &str| {
                graph
                    .vertices
                    .iter()
                    .position(|v| v == name)
                    .ok_or_else(|| VrpError::UnknownVertex(name.to_string()))
            };
            let depot = index_of(depot_name)?;
            let v = graph.vertices.len();
            // Metric closure by Floyd-Warshall over the listed edges.
            let mut d: Vec<Vec<Option<Rational>>> = vec![vec![None; v]; v];
            for i in 0..v {
                d[i][i] = Some(Rational::zero());
            }
            for GraphEdge(from, to, w) in &graph.edges {
                if w.is_negative() {
                    return Err(VrpError::NegativeValue);
                }
                let (i, j) = (index_of(from)?, index_of(to)?);
                if d[i][j].as_ref().is_none_or(|cur| w < cur) {
                    d[i][j] = Some(w.clone());
                    d[j][i] = Some(w.clone());
                }
            }
            for mid in 0..v {
                for i in 0..v {
                    for j in 0..v {
                        let (Some(a), Some(b)) = (&d[i][mid], &d[mid][j]) else { continue };
                        let through = a + b;
                        if d[i][j].as_ref().is_none_or(|cur| through < *cur) {
                            d[i][j] = Some(through);
                        }
                    }
                }
            }
            // Depot first, customers in listed order.
            let order: Vec<usize> =
                std::iter::once(depot).chain((0..v).filter(|&i| i != depot)).collect();
            let labels: Vec<String> =
                order[1..].iter().map(|&i| graph.vertices[i].clone()).collect();
            let mut dist = vec![vec![Rational::zero(); v]; v];
            for (a, &i) in order.iter().enumerate() {
                for (b, &j) in order.iter().enumerate() {
                    dist[a][b] = d[i][j]
                        .clone()
                        .ok_or_else(|| {
                            VrpError::Disconnected(
                                graph.vertices[i].clone(),
                                graph.vertices[j].clone(),
                            )
                        })?;
                }
            }
            Ok((labels, dist))
        }
        _ => Err(VrpError::AmbiguousGeometry),
    }
}

/// Expands a routing spec into a set covering instance: one set per
/// customer subset of size up to the capacity (cost: exact optimal tour),
/// plus one singleton per dropping penalty, with duplicate member sets
/// collapsed to their minimum cost.
pub fn vrp_to_setcover(spec: &VrpSpec) -> Result<SetCoverInstance, VrpError> {
    let (labels, dist) = geometry(spec)?;
    let n = labels.len();
    if n > MAX_CUSTOMERS {
        return Err(VrpError::TooManyCustomers(n));
    }
    if spec.capacity == Some(0) {
        return Err(VrpError::ZeroCapacity);
    }
    let tour_size = spec.capacity.unwrap_or(n).min(n);
    if tour_size > MAX_TOUR_SIZE {
        return Err(VrpError::TourSizeTooLarge(tour_size));
    }
    let mut sets: Vec<CoverSet> = Vec::new();
    for size in 1..=tour_size {
        for subset in (0..n).combinations(size) {
            let vertices: Vec<usize> = subset.iter().map(|&c| c + 1).collect();
            sets.push(CoverSet::new(subset, tour_cost(&dist, &vertices)));
        }
    }
    if let Some(penalties) = &spec.penalties {
        for (label, RationalJson(cost)) in penalties {
            if cost.is_negative() {
                return Err(VrpError::NegativeValue);
            }
            let customer = labels
                .iter()
                .position(|l| l == label)
                .ok_or_else(|| VrpError::UnknownCustomer(label.clone()))?;
            sets.push(CoverSet::new([customer], cost.clone()));
        }
    }
    Ok(SetCoverInstance::new(labels, sets).normalized().0)
}

/// Five customers on two branches from the depot, uncapacitated.
pub fn two_branch_five_spec() -> VrpSpec {
    let edge = |a: &str, b: &str, w: i64| {
        GraphEdge(a.into(), b.into(), Rational::from_integer(w.into()))
    };
    VrpSpec {
        coords: None,
        graph: Some(GraphSpec {
            vertices: ["D", "a", "b", "c", "d", "e"].map(String::from).to_vec(),
            edges: vec![
                edge("D", "a", 1),
                edge("a", "b", 1),
                edge("b", "D", 1),
                edge("D", "c", 1),
                edge("c", "d", 1),
                edge("d", "e", 1),
            ],
        }),
        depot: DepotSpec::Vertex("D".into()),
        capacity: None,
        penalties: None,
        round_denom: default_round_denom(),
    }
}

/// Four customers, two per tour; the fractional routing optimum is strictly
/// below the integral one.
pub fn capacitated_four_spec() -> VrpSpec {
    let edge = |a: &str, b: &str, w: i64| {
        GraphEdge(a.into(), b.into(), Rational::from_integer(w.into()))
    };
    VrpSpec {
        coords: None,
        graph: Some(GraphSpec {
            vertices: ["D", "a", "b", "c", "d"].map(String::from).to_vec(),
            edges: vec![
                edge("D", "b", 4),
                edge("D", "d", 3),
                edge("a", "b", 0),
                edge("a", "c", 0),
                edge("b", "c", 0),
                edge("b", "d", 6),
            ],
        }),
        depot: DepotSpec::Vertex("D".into()),
        capacity: Some(2),
        penalties: None,
        round_denom: default_round_denom(),
    }
}

/// Fifteen customers on an integer grid, up to five per tour, each customer
/// droppable for a penalty.
pub fn penalty_fifteen_spec() -> VrpSpec {
    let coords: Vec<(i64, i64)> = vec![
        (4, 6),
        (6, 8),
        (4, 4),
        (5, 5),
        (4, 9),
        (6, 1),
        (10, 5),
        (3, 0),
        (10, 10),
        (9, 4),
        (5, 3),
        (1, 0),
        (7, 2),
        (9, 1),
        (1, 4),
    ];
    let penalties: BTreeMap<String, RationalJson> = [
        ("a", 20),
        ("b", 10),
        ("c", 20),
        ("d", 4),
        ("e", 20),
        ("f", 8),
        ("g", 20),
        ("h", 20),
        ("i", 6),
        ("j", 1),
        ("k", 20),
        ("l", 20),
        ("m", 15),
        ("n", 20),
        ("o", 20),
    ]
    .into_iter()
    .map(|(label, d)| (label.to_string(), RationalJson(Rational::from_integer(d.into()))))
    .collect();
    VrpSpec {
        coords: Some(coords),
        graph: None,
        depot: DepotSpec::Coords(6, 9),
        capacity: Some(5),
        penalties: Some(penalties),
        round_denom: default_round_denom(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_instance, Coalition};
    use crate::rational::{int, rat};
    use crate::testkit;

    #[test]
    fn euclidean_rounding_is_exact() {
        assert_eq!(euclidean_rounded((0, 0), (3, 4), 1_000_000).unwrap(), int(5));
        assert_eq!(
            euclidean_rounded((0, 0), (1, 1), 1_000_000).unwrap(),
            rat(1_414_214, 1_000_000)
        );
        assert_eq!(euclidean_rounded((2, 2), (2, 2), 10).unwrap(), int(0));
        // Coarse grid: sqrt(2) to the nearest tenth.
        assert_eq!(euclidean_rounded((0, 0), (1, 1), 10).unwrap(), rat(14, 10));
    }

    #[test]
    fn two_branch_instance_matches_the_fixture() {
        let inst = vrp_to_setcover(&two_branch_five_spec()).unwrap();
        assert_eq!(inst, testkit::fig1_instance());
        assert!(validate_instance(&inst).is_ok());
    }

    #[test]
    fn capacitated_four_matches_the_fixture() {
        let inst = vrp_to_setcover(&capacitated_four_spec()).unwrap();
        assert_eq!(inst, testkit::fig2_instance());
    }

    #[test]
    fn penalties_become_singletons_after_dedupe() {
        let mut spec = capacitated_four_spec();
        let mut penalties = BTreeMap::new();
        penalties.insert("a".to_string(), RationalJson(int(3)));
        penalties.insert("d".to_string(), RationalJson(int(100)));
        spec.penalties = Some(penalties);
        let inst = vrp_to_setcover(&spec).unwrap();
        // Tour {a} costs 8, penalty 3 wins; tour {d} costs 6, penalty loses.
        let cost_of = |members: &[usize]| {
            let c = Coalition::new(members.iter().copied());
            inst.sets.iter().find(|s| s.members == c).map(|s| s.cost.clone()).unwrap()
        };
        assert_eq!(cost_of(&[0]), int(3));
        assert_eq!(cost_of(&[3]), int(6));
        // No extra sets beyond the ten tours.
        assert_eq!(inst.sets.len(), 10);
    }

    #[test]
    fn unknown_penalty_customer_is_an_error() {
        let mut spec = capacitated_four_spec();
        spec.penalties =
            Some([("z".to_string(), RationalJson(int(1)))].into_iter().collect());
        assert!(matches!(vrp_to_setcover(&spec), Err(VrpError::UnknownCustomer(_))));
    }

    #[test]
    fn oversized_tours_are_rejected() {
        let spec = VrpSpec {
            coords: Some((0..7).map(|i| (i, 0)).collect()),
            graph: None,
            depot: DepotSpec::Coords(0, 1),
            capacity: None,
            penalties: None,
            round_denom: 1,
        };
        assert!(matches!(vrp_to_setcover(&spec), Err(VrpError::TourSizeTooLarge(7))));
        let ok = VrpSpec { capacity: Some(2), ..spec };
        assert!(vrp_to_setcover(&ok).is_ok());
    }

    #[test]
    fn disconnected_graphs_are_rejected() {
        let spec = VrpSpec {
            coords: None,
            graph: Some(GraphSpec {
                vertices: ["D", "a", "b"].map(String::from).to_vec(),
                edges: vec![GraphEdge("D".into(), "a".into(), int(1))],
            }),
            depot: DepotSpec::Vertex("D".into()),
            capacity: None,
            penalties: None,
            round_denom: default_round_denom(),
        };
        assert!(matches!(vrp_to_setcover(&spec), Err(VrpError::Disconnected(..))));
    }

    #[test]
    fn spec_json_roundtrip() {
        for spec in [two_branch_five_spec(), capacitated_four_spec(), penalty_fifteen_spec()] {
            let json = serde_json::to_string(&spec).unwrap();
            let back: VrpSpec = serde_json::from_str(&json).unwrap();
            assert_eq!(back, spec);
        }
    }

    #[test]
    fn fifteen_customer_generation_counts() {
        let inst = vrp_to_setcover(&penalty_fifteen_spec()).unwrap();
        assert_eq!(inst.n_players(), 15);
        // Every subset of size <= 5 is a tour (4943 of them); the 15 penalty
        // singletons merge into existing singleton tours.
        assert_eq!(inst.sets.len(), 4943);
        assert!(validate_instance(&inst).is_ok());
        // Customer j's penalty (1) undercuts its tour.
        let j = Coalition::new([9]);
        let set = inst.sets.iter().find(|s| s.members == j).unwrap();
        assert_eq!(set.cost, int(1));
    }
}
