//! Families of coalition/set pairs that drive the solver.
//!
//! The central construction is [`build_c_star`]: for every set `T`, the pair
//! `(T, {T})` and all pairs `(T \ {p}, {T})`, excluding coalitions that are
//! empty or the full player set. This family is a pure set-system object (it
//! ignores costs), has at most `|T| * |P|` members, and restricting the
//! lexicographic slack maximization to it reproduces the full-excess-vector
//! optimizer. [`build_c_star_star`] further keeps only pairs whose single
//! set is a minimum-cost cover of the coalition; it depends on the cost
//! function and needs an exact cover search, so it is exposed for testing
//! rather than used on the solve path.

use crate::model::{Coalition, SetCoverInstance, SimplePair};
use crate::oracle::{self, OracleError, OracleLimits};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    CStar,
    CStarStar,
    CSimpleSampled,
    CSimple,
    Custom,
}

/// An ordered, duplicate-free list of simple pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairFamily {
    pub pairs: Vec<SimplePair>,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FamilyError {
    #[error("duplicate pair (coalition {0}, set {1})")]
    DuplicatePair(Coalition, usize),
    #[error("pair (coalition {0}, set {1}) is not a valid simple pair")]
    InvalidPair(Coalition, usize),
    #[error("family construction needs {needed} rows, above the limit of {limit}")]
    TooLarge { needed: usize, limit: usize },
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

impl PairFamily {
    pub fn new(pairs: Vec<SimplePair>, provenance: Provenance) -> Result<Self, FamilyError> {
        let mut seen = HashSet::with_capacity(pairs.len());
        for p in &pairs {
            if !seen.insert((p.coalition.clone(), p.set_index)) {
                return Err(FamilyError::DuplicatePair(p.coalition.clone(), p.set_index));
            }
        }
        Ok(PairFamily { pairs, provenance })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, pair: &SimplePair) -> bool {
        self.pairs.contains(pair)
    }

    /// The family without one pair (for minimality experiments).
    pub fn without(&self, pair: &SimplePair) -> PairFamily {
        PairFamily {
            pairs: self.pairs.iter().filter(|p| *p != pair).cloned().collect(),
            provenance: Provenance::Custom,
        }
    }

    /// Union with extra pairs, dropping duplicates, keeping order.
    pub fn extended_with(&self, extra: &[SimplePair]) -> PairFamily {
        let mut seen: HashSet<(Coalition, usize)> =
            self.pairs.iter().map(|p| (p.coalition.clone(), p.set_index)).collect();
        let mut pairs = self.pairs.clone();
        for p in extra {
            if seen.insert((p.coalition.clone(), p.set_index)) {
                pairs.push(p.clone());
            }
        }
        PairFamily { pairs, provenance: Provenance::Custom }
    }

    /// JSON export: a list of `{"coalition": [...], "set_index": k}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(&self.pairs).expect("pairs serialize")
    }

    fn check_is_simple(&self, inst: &SetCoverInstance) -> Result<(), FamilyError> {
        for p in &self.pairs {
            let valid = !p.coalition.is_empty()
                && inst
                    .sets
                    .get(p.set_index)
                    .is_some_and(|set| p.coalition.is_subset_of(&set.members));
            if !valid {
                return Err(FamilyError::InvalidPair(p.coalition.clone(), p.set_index));
            }
        }
        Ok(())
    }
}

/// The explicit family: for each set `T` (in index order) the pair
/// `(T, {T})` first, then `(T \ {p}, {T})` for each `p` in member order,
/// skipping coalitions that are empty or all of `P`. Emission order is
/// canonical so LP row order and dual supports are reproducible. Independent
/// of the cost function by construction.
pub fn build_c_star(inst: &SetCoverInstance) -> Result<PairFamily, FamilyError> {
    let n = inst.n_players();
    let mut pairs = Vec::new();
    for (t, set) in inst.sets.iter().enumerate() {
        if !set.members.is_empty() && set.members.len() < n {
            pairs.push(SimplePair::new(set.members.clone(), t));
        }
        for p in set.members.iter() {
            let coalition = set.members.without(p);
            if !coalition.is_empty() && coalition.len() < n {
                pairs.push(SimplePair::new(coalition, t));
            }
        }
    }
    let family = PairFamily::new(pairs, Provenance::CStar)?;
    family.check_is_simple(inst)?;
    // Each set contributes at most |T| + 1 pairs, and the exclusions bring
    // that down to at most n per set.
    debug_assert!(family.len() <= inst.sets.len() * n.max(1));
    debug_assert!(family.len() <= inst.sets.len() * (n + 1));
    Ok(family)
}

/// The restriction of [`build_c_star`] to pairs whose single set is a
/// minimum-cost cover of the coalition. Requires the exact oracle, so it is
/// capacity-limited; unlike the full family it depends on the costs.
pub fn build_c_star_star(
    inst: &SetCoverInstance,
    limits: &OracleLimits,
) -> Result<PairFamily, FamilyError> {
    let c_star = build_c_star(inst)?;
    let mut pairs = Vec::new();
    for pair in c_star.pairs {
        let (min_cost, _) = oracle::min_cover(inst, &pair.coalition, limits)?;
        if inst.sets[pair.set_index].cost == min_cost {
            pairs.push(pair);
        }
    }
    PairFamily::new(pairs, Provenance::CStarStar)
}

/// Uniformly sampled valid simple pairs: a set drawn uniformly, then a
/// nonempty subset of its members drawn uniformly. `count` draws are made
/// and duplicates dropped, deterministically per seed.
pub fn sample_simple_pairs(inst: &SetCoverInstance, count: usize, seed: u64) -> PairFamily {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen: HashSet<(Coalition, usize)> = HashSet::new();
    let mut pairs = Vec::new();
    if inst.sets.is_empty() {
        return PairFamily { pairs, provenance: Provenance::CSimpleSampled };
    }
    for _ in 0..count {
        let t = rng.gen_range(0..inst.sets.len());
        let members = inst.sets[t].members.members();
        if members.is_empty() {
            continue;
        }
        let coalition = loop {
            let picked: Vec<usize> =
                members.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
            if !picked.is_empty() {
                break Coalition::new(picked);
            }
        };
        if seen.insert((coalition.clone(), t)) {
            pairs.push(SimplePair::new(coalition, t));
        }
    }
    PairFamily { pairs, provenance: Provenance::CSimpleSampled }
}

/// Every simple pair: all nonempty subsets of every set. Exponential in the
/// set sizes, so guarded by a row limit; used by the minimality check.
pub fn build_c_simple(inst: &SetCoverInstance, max_rows: usize) -> Result<PairFamily, FamilyError> {
    let mut needed = 0usize;
    for set in &inst.sets {
        if set.members.len() >= usize::BITS as usize - 1 {
            return Err(FamilyError::TooLarge { needed: usize::MAX, limit: max_rows });
        }
        needed = needed.saturating_add((1usize << set.members.len()) - 1);
        if needed > max_rows {
            return Err(FamilyError::TooLarge { needed, limit: max_rows });
        }
    }
    let mut pairs = Vec::with_capacity(needed);
    for (t, set) in inst.sets.iter().enumerate() {
        let members = set.members.members();
        for subset_bits in 1u64..(1u64 << members.len()) {
            let coalition = Coalition::new(
                members
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| subset_bits & (1 << i) != 0)
                    .map(|(_, &p)| p),
            );
            pairs.push(SimplePair::new(coalition, t));
        }
    }
    PairFamily::new(pairs, Provenance::CSimple)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::CoverSet;
    use crate::rational::{int, rat};

    fn chain(n: usize) -> SetCoverInstance {
        SetCoverInstance::with_default_labels(
            n,
            (1..=n).map(|i| CoverSet::new(0..i, int(i as i64))).collect(),
        )
    }

    fn pair(members: &[usize], t: usize) -> SimplePair {
        SimplePair::new(Coalition::new(members.iter().copied()), t)
    }

    #[test]
    fn two_player_family_excludes_the_full_set() {
        // P = {1,2}, sets {1}: 1 and {1,2}: 1.
        let inst = SetCoverInstance::with_default_labels(
            2,
            vec![CoverSet::new([0], int(1)), CoverSet::new([0, 1], int(1))],
        );
        let family = build_c_star(&inst).unwrap();
        // Removal pairs follow the removed player's index: dropping player 1
        // from {1,2} leaves {2} first.
        assert_eq!(family.pairs, vec![pair(&[0], 0), pair(&[1], 1), pair(&[0], 1)]);
    }

    #[test]
    fn nested_sets_enumeration_is_exact() {
        let inst = chain(3);
        let family = build_c_star(&inst).unwrap();
        let expected = vec![
            pair(&[0], 0),
            pair(&[0, 1], 1),
            pair(&[1], 1),
            pair(&[0], 1),
            pair(&[1, 2], 2),
            pair(&[0, 2], 2),
            pair(&[0, 1], 2),
        ];
        assert_eq!(family.pairs, expected);
        assert!(family.len() <= inst.sets.len() * inst.n_players());
    }

    #[test]
    fn single_full_set_gives_the_removal_pairs() {
        let inst = SetCoverInstance::with_default_labels(3, vec![CoverSet::new(0..3, int(3))]);
        let family = build_c_star(&inst).unwrap();
        assert_eq!(
            family.pairs,
            vec![pair(&[1, 2], 0), pair(&[0, 2], 0), pair(&[0, 1], 0)]
        );
    }

    #[test]
    fn family_is_cost_independent() {
        let a = chain(4);
        let mut b = a.clone();
        for (i, set) in b.sets.iter_mut().enumerate() {
            set.cost = rat(7 * i as i64 + 1, 3);
        }
        assert_eq!(build_c_star(&a).unwrap().pairs, build_c_star(&b).unwrap().pairs);
    }

    #[test]
    fn restriction_keeps_only_efficient_covers() {
        let limits = OracleLimits::default();
        // Tie between c({1}) = 1 and c({1,2}) = 1 keeps all three pairs.
        let tie = SetCoverInstance::with_default_labels(
            2,
            vec![CoverSet::new([0], int(1)), CoverSet::new([0, 1], int(1))],
        );
        let family = build_c_star_star(&tie, &limits).unwrap();
        assert_eq!(family.pairs, vec![pair(&[0], 0), pair(&[1], 1), pair(&[0], 1)]);

        // Nested sets: pairs whose set is more expensive than the best cover
        // of the coalition drop out.
        let inst = chain(3);
        let family = build_c_star_star(&inst, &limits).unwrap();
        assert!(family.contains(&pair(&[0], 0)));
        assert!(!family.contains(&pair(&[0], 1)), "cost 2 set is not optimal for {{p1}}");
        assert!(family.contains(&pair(&[0, 1], 1)));
        assert!(!family.contains(&pair(&[0, 1], 2)), "cost 3 set is not optimal for {{p1,p2}}");
        assert!(family.contains(&pair(&[1, 2], 2)));
        // Contained in the unrestricted family.
        let c_star = build_c_star(&inst).unwrap();
        for p in &family.pairs {
            assert!(c_star.contains(p));
        }
    }

    #[test]
    fn zero_cost_set_displaces_expensive_pairs() {
        // A free set covering {1} makes (T, {T}) inefficient for T = {1,2}'s
        // subset {1}.
        let inst = SetCoverInstance::with_default_labels(
            2,
            vec![CoverSet::new([0], int(0)), CoverSet::new([0, 1], int(5))],
        );
        let family = build_c_star_star(&inst, &OracleLimits::default()).unwrap();
        assert!(family.contains(&pair(&[0], 0)));
        assert!(!family.contains(&pair(&[0], 1)));
        // {2}'s only cover is the big set, so that pair stays.
        assert!(family.contains(&pair(&[1], 1)));
    }

    #[test]
    fn restriction_depends_on_costs() {
        let limits = OracleLimits::default();
        let a = chain(3);
        let mut b = a.clone();
        b.sets[1].cost = int(1); // now {p1,p2} at cost 1 is efficient for {p1}
        let fa = build_c_star_star(&a, &limits).unwrap();
        let fb = build_c_star_star(&b, &limits).unwrap();
        assert_ne!(fa.pairs, fb.pairs);
        assert!(fb.contains(&pair(&[0], 1)));
    }

    #[test]
    fn sampling_is_deterministic_and_valid() {
        let inst = chain(5);
        let a = sample_simple_pairs(&inst, 40, 7);
        let b = sample_simple_pairs(&inst, 40, 7);
        assert_eq!(a.pairs, b.pairs);
        let c = sample_simple_pairs(&inst, 40, 8);
        assert_ne!(a.pairs, c.pairs);
        assert!(sample_simple_pairs(&inst, 0, 7).is_empty());
        for p in &a.pairs {
            assert!(!p.coalition.is_empty());
            assert!(p.coalition.is_subset_of(&inst.sets[p.set_index].members));
        }
        // Deduplicated.
        let mut seen = std::collections::HashSet::new();
        for p in &a.pairs {
            assert!(seen.insert((p.coalition.clone(), p.set_index)));
        }
    }

    #[test]
    fn simple_family_enumerates_all_subsets() {
        let inst = chain(3);
        let family = build_c_simple(&inst, 1 << 16).unwrap();
        assert_eq!(family.len(), 1 + 3 + 7);
        // The explicit family is contained in it after dropping the
        // full-set/empty exclusions (which build_c_simple does not apply).
        let c_star = build_c_star(&inst).unwrap();
        for p in &c_star.pairs {
            assert!(family.contains(p));
        }
        assert!(build_c_simple(&inst, 5).is_err());
    }

    #[test]
    fn duplicate_pairs_are_rejected() {
        let err = PairFamily::new(vec![pair(&[0], 0), pair(&[0], 0)], Provenance::Custom);
        assert!(matches!(err, Err(FamilyError::DuplicatePair(_, 0))));
    }

    #[test]
    fn family_json_shape() {
        let inst = chain(2);
        let family = build_c_star(&inst).unwrap();
        let json = family.to_json();
        let first = &json.as_array().unwrap()[0];
        assert!(first.get("coalition").is_some());
        assert!(first.get("set_index").is_some());
    }
}
