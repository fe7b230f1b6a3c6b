//! Instance generators: nested chains, the three-set triangle, adversarial
//! cost functions that make a single pair of the explicit family
//! indispensable, seeded random instances, and vehicle routing conversion.

pub mod vrp;

use crate::model::{Coalition, CoverSet, SetCoverInstance, SimplePair};
use crate::rational::Rational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use vrp::{vrp_to_setcover, VrpError, VrpSpec};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GeneratorError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("set system does not satisfy the complement condition at set {0}")]
    ComplementCondition(usize),
    #[error("pair (coalition {0}, set {1}) is not of the explicit-family shape")]
    NotAFamilyPair(Coalition, usize),
}

/// Nested sets `{p1,...,pi}` of cost `i` for `i = 1..n`. The allocation for
/// this instance has the closed form `y_i = 1 - 2^-i` for `i < n` and
/// `y_n = 2 - 2^-(n-1)`.
pub fn chain_instance(n: usize) -> Result<SetCoverInstance, GeneratorError> {
    if n == 0 {
        return Err(GeneratorError::InvalidParams("chain needs at least one player".into()));
    }
    Ok(SetCoverInstance::with_default_labels(
        n,
        (1..=n).map(|i| CoverSet::new(0..i, Rational::from_integer((i as i64).into()))).collect(),
    ))
}

/// Three players, the three two-element sets, with sorted costs
/// `c1 <= c2 <= c3`: `T1 = {p1,p2}: c1`, `T2 = {p1,p3}: c2`,
/// `T3 = {p2,p3}: c3`.
pub fn triangle_instance(
    c1: Rational,
    c2: Rational,
    c3: Rational,
) -> Result<SetCoverInstance, GeneratorError> {
    if c1.is_negative() || c1 > c2 || c2 > c3 {
        return Err(GeneratorError::InvalidParams(
            "triangle costs must satisfy 0 <= c1 <= c2 <= c3".into(),
        ));
    }
    Ok(SetCoverInstance::with_default_labels(
        3,
        vec![
            CoverSet::new([0, 1], c1),
            CoverSet::new([0, 2], c2),
            CoverSet::new([1, 2], c3),
        ],
    ))
}

/// The closed-form allocation for [`triangle_instance`]:
/// `y1 = max(0, (c1 + c2 - c3) / 2)`, `y2 = c1 - y1`, `y3 = c2 - y1`.
pub fn triangle_closed_form(c1: &Rational, c2: &Rational, c3: &Rational) -> Vec<Rational> {
    let half = Rational::new(1.into(), 2.into());
    let y1 = ((c1 + c2 - c3) * half).max(Rational::zero());
    vec![y1.clone(), c1 - &y1, c2 - &y1]
}

/// True iff every set's complement is coverable by sets disjoint from it.
/// Holds automatically when all singletons are present, and for tour
/// families in vehicle routing.
pub fn complement_condition_holds(inst: &SetCoverInstance) -> bool {
    complement_condition_violation(inst).is_none()
}

fn complement_condition_violation(inst: &SetCoverInstance) -> Option<usize> {
    let n = inst.n_players();
    for (t, set) in inst.sets.iter().enumerate() {
        let mut covered = vec![false; n];
        for other in &inst.sets {
            if other.members.iter().all(|p| !set.members.contains(p)) {
                for p in other.members.iter() {
                    covered[p] = true;
                }
            }
        }
        if (0..n).any(|p| !set.members.contains(p) && !covered[p]) {
            return Some(t);
        }
    }
    None
}

/// Which shape the targeted pair has within the explicit family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdversarialCase {
    /// `S = T \ {p}` for some member `p`.
    RemovedPlayer(usize),
    /// `S = T` (and `T` is not the full player set).
    FullSet,
}

/// A cost function under which dropping `pair` from the family of all
/// simple pairs changes the lexicographic maximizer.
#[derive(Debug, Clone)]
pub struct AdversarialCosts {
    pub costs: Vec<Rational>,
    pub case: AdversarialCase,
    /// The player outside the target set used by the full-set construction.
    pub distinguished_player: Option<usize>,
}

impl AdversarialCosts {
    /// The instance with these costs in place of the original ones.
    pub fn apply(&self, inst: &SetCoverInstance) -> SetCoverInstance {
        SetCoverInstance::new(
            inst.players.clone(),
            inst.sets
                .iter()
                .zip(&self.costs)
                .map(|(set, cost)| CoverSet { members: set.members.clone(), cost: cost.clone() })
                .collect(),
        )
    }
}

/// Builds the adversarial cost function for one pair `(S*, {T*})` of the
/// explicit family, on a set system satisfying the complement condition.
///
/// * removed-player shape (`S* = T* \ {p*}`, `k = |T*| >= 2`): cost `k` on
///   `T*`, `0` on sets disjoint from `T*`, `k + 2` elsewhere. The optimizer
///   splits `k` equally over `T*`; without the dropped pair, loading
///   `k/(k-1)` on `T* \ {p*}` and nothing on `p*` sorts strictly higher.
/// * full-set shape (`S* = T*`, `T* != P`): pick `p*` outside `T*`; cost `k`
///   on `T*`, `1/n` on disjoint sets containing `p*`, `0` on other disjoint
///   sets, `k + 2` elsewhere. Without the dropped pair the optimizer
///   overcharges `T*` by the complement's cover cost.
pub fn adversarial_costs(
    inst: &SetCoverInstance,
    pair: &SimplePair,
) -> Result<AdversarialCosts, GeneratorError> {
    let n = inst.n_players();
    let target = inst
        .sets
        .get(pair.set_index)
        .ok_or_else(|| GeneratorError::NotAFamilyPair(pair.coalition.clone(), pair.set_index))?;
    let bad_pair = || GeneratorError::NotAFamilyPair(pair.coalition.clone(), pair.set_index);
    if pair.coalition.is_empty() || pair.coalition.len() == n {
        return Err(bad_pair());
    }
    let case = if pair.coalition == target.members {
        AdversarialCase::FullSet
    } else {
        let p = target
            .members
            .iter()
            .find(|&p| target.members.without(p) == pair.coalition)
            .ok_or_else(bad_pair)?;
        AdversarialCase::RemovedPlayer(p)
    };
    if let Some(t) = complement_condition_violation(inst) {
        return Err(GeneratorError::ComplementCondition(t));
    }

    let k = Rational::from_integer((target.members.len() as i64).into());
    let k_plus_2 = &k + Rational::from_integer(2.into());
    let disjoint =
        |members: &Coalition| members.iter().all(|p| !target.members.contains(p));
    let (costs, distinguished) = match case {
        AdversarialCase::RemovedPlayer(_) => {
            let costs = inst
                .sets
                .iter()
                .enumerate()
                .map(|(t, set)| {
                    if t == pair.set_index {
                        k.clone()
                    } else if disjoint(&set.members) {
                        Rational::zero()
                    } else {
                        k_plus_2.clone()
                    }
                })
                .collect();
            (costs, None)
        }
        AdversarialCase::FullSet => {
            let p_star = (0..n)
                .find(|&p| !target.members.contains(p))
                .expect("coalition is not the full player set");
            let one_over_n = Rational::new(1.into(), (n as i64).into());
            let costs = inst
                .sets
                .iter()
                .enumerate()
                .map(|(t, set)| {
                    if t == pair.set_index {
                        k.clone()
                    } else if disjoint(&set.members) {
                        if set.members.contains(p_star) {
                            one_over_n.clone()
                        } else {
                            Rational::zero()
                        }
                    } else {
                        k_plus_2.clone()
                    }
                })
                .collect();
            (costs, Some(p_star))
        }
    };
    Ok(AdversarialCosts { costs, case, distinguished_player: distinguished })
}

/// Parameters for seeded random instances. Costs are uniform rationals
/// `p/q` with `q <= max_denominator` and value at most `max_cost`.
#[derive(Debug, Clone)]
pub struct RandomInstanceParams {
    pub n_players: usize,
    pub n_sets: usize,
    pub max_cost: i64,
    pub max_denominator: i64,
}

impl Default for RandomInstanceParams {
    fn default() -> Self {
        RandomInstanceParams { n_players: 5, n_sets: 8, max_cost: 10, max_denominator: 4 }
    }
}

/// Deterministic random instance: `n_sets` nonempty subsets with random
/// rational costs, plus one extra set mopping up any uncovered players so
/// the result always validates. Duplicate member sets are collapsed to
/// their minimum cost.
pub fn random_instance(params: &RandomInstanceParams, seed: u64) -> Result<SetCoverInstance, GeneratorError> {
    let n = params.n_players;
    if n == 0 || n >= 63 {
        return Err(GeneratorError::InvalidParams("player count must be in 1..=62".into()));
    }
    if params.max_cost < 0 || params.max_denominator < 1 {
        return Err(GeneratorError::InvalidParams("cost range must be nonnegative".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let random_cost = |rng: &mut ChaCha8Rng| {
        let q = rng.gen_range(1..=params.max_denominator);
        let p = rng.gen_range(0..=params.max_cost.saturating_mul(q));
        Rational::new(p.into(), q.into())
    };
    let mut sets: Vec<CoverSet> = Vec::with_capacity(params.n_sets + 1);
    let mut covered = 0u64;
    for _ in 0..params.n_sets {
        let mask = rng.gen_range(1..(1u64 << n));
        covered |= mask;
        sets.push(CoverSet { members: Coalition::from_mask(mask), cost: random_cost(&mut rng) });
    }
    let full = (1u64 << n) - 1;
    if covered != full {
        sets.push(CoverSet {
            members: Coalition::from_mask(full & !covered),
            cost: random_cost(&mut rng),
        });
    }
    let inst = SetCoverInstance::with_default_labels(n, sets);
    Ok(inst.normalized().0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_instance;
    use crate::rational::{int, rat};

    #[test]
    fn chain_shapes() {
        let c3 = chain_instance(3).unwrap();
        assert_eq!(c3.sets.len(), 3);
        assert_eq!(c3.sets[1].members, Coalition::new([0, 1]));
        assert_eq!(c3.sets[2].cost, int(3));
        let c1 = chain_instance(1).unwrap();
        assert_eq!(c1.sets.len(), 1);
        assert_eq!(c1.sets[0].cost, int(1));
        assert!(chain_instance(0).is_err());
        assert!(validate_instance(&c3).is_ok());
    }

    #[test]
    fn triangle_requires_sorted_costs() {
        assert!(triangle_instance(int(3), int(4), int(6)).is_ok());
        assert!(triangle_instance(int(4), int(3), int(6)).is_err());
        assert!(triangle_instance(int(-1), int(0), int(0)).is_err());
    }

    #[test]
    fn triangle_formula_cases() {
        assert_eq!(
            triangle_closed_form(&int(3), &int(4), &int(6)),
            vec![rat(1, 2), rat(5, 2), rat(7, 2)]
        );
        // Degenerate: c3 >= c1 + c2 clamps the shared part at zero.
        assert_eq!(
            triangle_closed_form(&int(1), &int(1), &int(3)),
            vec![int(0), int(1), int(1)]
        );
        assert_eq!(triangle_closed_form(&int(0), &int(0), &int(0)), vec![int(0); 3]);
    }

    #[test]
    fn complement_condition_examples() {
        // The triangle violates it: each pair set intersects every other set.
        let triangle = triangle_instance(int(3), int(4), int(6)).unwrap();
        assert!(!complement_condition_holds(&triangle));

        // All singletons plus anything satisfies it.
        let inst = SetCoverInstance::with_default_labels(
            3,
            vec![
                CoverSet::new([0], int(1)),
                CoverSet::new([1], int(1)),
                CoverSet::new([2], int(1)),
                CoverSet::new([0, 1], int(2)),
            ],
        );
        assert!(complement_condition_holds(&inst));
    }

    #[test]
    fn adversarial_costs_removed_player_shape() {
        let inst = SetCoverInstance::with_default_labels(
            4,
            vec![
                CoverSet::new([0], int(1)),
                CoverSet::new([1], int(1)),
                CoverSet::new([2], int(1)),
                CoverSet::new([3], int(1)),
                CoverSet::new([0, 1, 2], int(1)),
            ],
        );
        // S* = {0,1} = T* \ {2} with T* = {0,1,2}, k = 3.
        let pair = SimplePair::new(Coalition::new([0, 1]), 4);
        let adv = adversarial_costs(&inst, &pair).unwrap();
        assert_eq!(adv.case, AdversarialCase::RemovedPlayer(2));
        assert_eq!(adv.costs, vec![int(5), int(5), int(5), int(0), int(3)]);
        assert!(adv.distinguished_player.is_none());
    }

    #[test]
    fn adversarial_costs_full_set_shape() {
        let inst = SetCoverInstance::with_default_labels(
            4,
            vec![
                CoverSet::new([0], int(1)),
                CoverSet::new([1], int(1)),
                CoverSet::new([2], int(1)),
                CoverSet::new([3], int(1)),
                CoverSet::new([1, 2], int(1)),
            ],
        );
        // S* = T* = {1,2}, k = 2; p* = 0 (smallest player outside T*).
        let pair = SimplePair::new(Coalition::new([1, 2]), 4);
        let adv = adversarial_costs(&inst, &pair).unwrap();
        assert_eq!(adv.case, AdversarialCase::FullSet);
        assert_eq!(adv.distinguished_player, Some(0));
        // Singletons {0} and {3} are disjoint from T*; {0} holds p*.
        assert_eq!(adv.costs, vec![rat(1, 4), int(4), int(4), int(0), int(2)]);
    }

    #[test]
    fn adversarial_costs_reject_bad_inputs() {
        let triangle = triangle_instance(int(3), int(4), int(6)).unwrap();
        let pair = SimplePair::new(Coalition::new([0]), 0);
        assert!(matches!(
            adversarial_costs(&triangle, &pair),
            Err(GeneratorError::ComplementCondition(_))
        ));
        let inst = SetCoverInstance::with_default_labels(
            2,
            vec![CoverSet::new([0], int(1)), CoverSet::new([1], int(1))],
        );
        // Not of the family shape: coalition is the full player set.
        let full = SimplePair::new(Coalition::new([0, 1]), 0);
        assert!(matches!(
            adversarial_costs(&inst, &full),
            Err(GeneratorError::NotAFamilyPair(..))
        ));
    }

    #[test]
    fn random_instances_are_deterministic_and_valid() {
        let params = RandomInstanceParams { n_players: 6, n_sets: 9, ..Default::default() };
        let a = random_instance(&params, 7).unwrap();
        let b = random_instance(&params, 7).unwrap();
        assert_eq!(a, b);
        let c = random_instance(&params, 8).unwrap();
        assert_ne!(a, c);
        for seed in 0..50 {
            let inst = random_instance(&params, seed).unwrap();
            let report = validate_instance(&inst);
            assert!(report.is_ok(), "seed {seed}: {:?}", report.violations);
            assert!(inst.sets.iter().all(|s| s.cost <= int(params.max_cost)));
        }
    }
}
