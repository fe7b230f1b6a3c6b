//! Data model for set covering cost-allocation instances.
//!
//! An instance is a player set `P` (dense indices `0..n`, each with a display
//! label), a family of cover sets over `P` with nonnegative rational costs,
//! and nothing else. Allocations assign a rational to every player. Excess
//! values are always of the form `c(U) - y(S)` for a coalition `S` and a
//! cover `U`.
//!
//! All types are immutable after construction and safe to share across
//! threads; every operation here is a pure function.

use crate::rational::{rational_serde, rational_vec_serde, Rational};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::HashMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("player index {0} out of range (instance has {1} players)")]
    PlayerOutOfRange(usize, usize),
    #[error("set index {0} out of range (instance has {1} sets)")]
    SetOutOfRange(usize, usize),
    #[error("coalition is empty")]
    EmptyCoalition,
    #[error("cover does not cover the coalition (player {0} uncovered)")]
    CoverDoesNotCover(usize),
    #[error("allocation has {0} values but instance has {1} players")]
    AllocationSizeMismatch(usize, usize),
}

/// A set of players, stored as a sorted, duplicate-free index list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Coalition(Vec<usize>);

impl Coalition {
    pub fn new(members: impl IntoIterator<Item = usize>) -> Self {
        let mut v: Vec<usize> = members.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Coalition(v)
    }

    pub fn full(n: usize) -> Self {
        Coalition((0..n).collect())
    }

    pub fn members(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, p: usize) -> bool {
        self.0.binary_search(&p).is_ok()
    }

    pub fn is_subset_of(&self, other: &Coalition) -> bool {
        self.0.iter().all(|p| other.contains(*p))
    }

    pub fn union(&self, other: &Coalition) -> Coalition {
        Coalition::new(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn without(&self, p: usize) -> Coalition {
        Coalition(self.0.iter().copied().filter(|&q| q != p).collect())
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    /// Membership bitmask; only valid while indices stay below 64.
    pub fn mask(&self) -> u64 {
        debug_assert!(self.0.last().map_or(true, |&p| p < 64));
        self.0.iter().fold(0u64, |m, &p| m | (1u64 << p))
    }

    pub fn from_mask(mut mask: u64) -> Self {
        let mut v = Vec::with_capacity(mask.count_ones() as usize);
        while mask != 0 {
            let p = mask.trailing_zeros() as usize;
            v.push(p);
            mask &= mask - 1;
        }
        Coalition(v)
    }
}

impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for Coalition {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Coalition {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(Coalition::new(Vec::<usize>::deserialize(d)?))
    }
}

/// One set of the covering family, with its cost.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverSet {
    pub members: Coalition,
    #[serde(with = "rational_serde")]
    pub cost: Rational,
}

impl CoverSet {
    pub fn new(members: impl IntoIterator<Item = usize>, cost: Rational) -> Self {
        CoverSet { members: Coalition::new(members), cost }
    }
}

/// A set covering instance: players with labels, and the cover sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetCoverInstance {
    pub players: Vec<String>,
    pub sets: Vec<CoverSet>,
}

impl SetCoverInstance {
    pub fn new(players: Vec<String>, sets: Vec<CoverSet>) -> Self {
        SetCoverInstance { players, sets }
    }

    /// Builds an instance with default labels `p1..pn`.
    pub fn with_default_labels(n: usize, sets: Vec<CoverSet>) -> Self {
        SetCoverInstance::new((1..=n).map(|i| format!("p{i}")).collect(), sets)
    }

    pub fn n_players(&self) -> usize {
        self.players.len()
    }

    pub fn full_coalition(&self) -> Coalition {
        Coalition::full(self.n_players())
    }

    /// Renders a coalition through the instance's player labels, e.g. `{a,b}`.
    pub fn coalition_label(&self, c: &Coalition) -> String {
        let mut s = String::from("{");
        for (i, p) in c.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            match self.players.get(p) {
                Some(label) => s.push_str(label),
                None => s.push_str(&format!("#{p}")),
            }
        }
        s.push('}');
        s
    }

    pub fn cover_cost(&self, cover: &[usize]) -> Result<Rational, ModelError> {
        let mut total = Rational::zero();
        for &t in cover {
            let set = self.sets.get(t).ok_or(ModelError::SetOutOfRange(t, self.sets.len()))?;
            total += &set.cost;
        }
        Ok(total)
    }

    /// Removes duplicate member-sets, keeping the cheapest copy of each.
    /// Set order follows first occurrence. Returns the kept instance and one
    /// note per surviving set that had duplicates.
    pub fn normalized(&self) -> (SetCoverInstance, Vec<DedupeNote>) {
        let mut kept: Vec<CoverSet> = Vec::new();
        let mut index_of: HashMap<Coalition, usize> = HashMap::new();
        let mut dupes: HashMap<usize, usize> = HashMap::new();
        for set in &self.sets {
            match index_of.get(&set.members) {
                None => {
                    index_of.insert(set.members.clone(), kept.len());
                    kept.push(set.clone());
                }
                Some(&i) => {
                    *dupes.entry(i).or_insert(1) += 1;
                    if set.cost < kept[i].cost {
                        kept[i].cost = set.cost.clone();
                    }
                }
            }
        }
        let mut notes: Vec<DedupeNote> = dupes
            .into_iter()
            .map(|(set_index, copies)| DedupeNote {
                members: kept[set_index].members.clone(),
                copies,
                kept_cost: kept[set_index].cost.clone(),
            })
            .collect();
        notes.sort_by(|a, b| a.members.cmp(&b.members));
        (SetCoverInstance::new(self.players.clone(), kept), notes)
    }
}

/// One duplicate-member-set occurrence collapsed by normalization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DedupeNote {
    pub members: Coalition,
    pub copies: usize,
    pub kept_cost: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NoPlayers,
    UncoveredPlayer(usize),
    EmptySet(usize),
    NegativeCost(usize),
    MemberOutOfRange { set_index: usize, member: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoPlayers => write!(f, "instance has no players"),
            Violation::UncoveredPlayer(p) => write!(f, "player {p} is not covered by any set"),
            Violation::EmptySet(i) => write!(f, "set {i} is empty"),
            Violation::NegativeCost(i) => write!(f, "set {i} has negative cost"),
            Violation::MemberOutOfRange { set_index, member } => {
                write!(f, "set {set_index} contains out-of-range player {member}")
            }
        }
    }
}

/// Result of [`validate_instance`]: hard violations plus dedupe notes.
/// Duplicate member-sets are not violations; they are collapsed to the
/// cheapest copy and reported here.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub dedupes: Vec<DedupeNote>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that the sets cover all players, costs are nonnegative, no set is
/// empty and all member indices are in range. Duplicate member-sets are
/// reported with the surviving minimum cost.
pub fn validate_instance(inst: &SetCoverInstance) -> ValidationReport {
    let n = inst.n_players();
    let mut report = ValidationReport::default();
    if n == 0 {
        report.violations.push(Violation::NoPlayers);
    }
    let mut covered = vec![false; n];
    for (i, set) in inst.sets.iter().enumerate() {
        if set.members.is_empty() {
            report.violations.push(Violation::EmptySet(i));
        }
        if set.cost.is_negative() {
            report.violations.push(Violation::NegativeCost(i));
        }
        for p in set.members.iter() {
            if p >= n {
                report.violations.push(Violation::MemberOutOfRange { set_index: i, member: p });
            } else {
                covered[p] = true;
            }
        }
    }
    for (p, c) in covered.iter().enumerate() {
        if !c {
            report.violations.push(Violation::UncoveredPlayer(p));
        }
    }
    let (_, dedupes) = inst.normalized();
    report.dedupes = dedupes;
    report
}

/// A cost allocation: one rational per player.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Allocation {
    #[serde(with = "rational_vec_serde")]
    pub values: Vec<Rational>,
}

impl Allocation {
    pub fn new(values: Vec<Rational>) -> Self {
        Allocation { values }
    }

    pub fn zero(n: usize) -> Self {
        Allocation { values: vec![Rational::zero(); n] }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `y(S)`: the total allocated to a coalition.
    pub fn on(&self, coalition: &Coalition) -> Rational {
        coalition.iter().map(|p| &self.values[p]).sum()
    }

    pub fn total(&self) -> Rational {
        self.values.iter().sum()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|v| !v.is_negative())
    }
}

/// A coalition together with a single-set cover, `(S, {T})`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SimplePair {
    pub coalition: Coalition,
    pub set_index: usize,
}

impl SimplePair {
    pub fn new(coalition: Coalition, set_index: usize) -> Self {
        SimplePair { coalition, set_index }
    }
}

/// A coalition together with an arbitrary cover, `(S, U)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneralPair {
    pub coalition: Coalition,
    pub cover: Vec<usize>,
}

impl GeneralPair {
    pub fn new(coalition: Coalition, cover: impl IntoIterator<Item = usize>) -> Self {
        let mut cover: Vec<usize> = cover.into_iter().collect();
        cover.sort_unstable();
        cover.dedup();
        GeneralPair { coalition, cover }
    }

    pub fn validate(&self, inst: &SetCoverInstance) -> Result<(), ModelError> {
        if self.coalition.is_empty() {
            return Err(ModelError::EmptyCoalition);
        }
        if let Some(&p) = self.coalition.members().iter().find(|&&p| p >= inst.n_players()) {
            return Err(ModelError::PlayerOutOfRange(p, inst.n_players()));
        }
        let mut union = Coalition::default();
        for &t in &self.cover {
            let set = inst.sets.get(t).ok_or(ModelError::SetOutOfRange(t, inst.sets.len()))?;
            union = union.union(&set.members);
        }
        match self.coalition.iter().find(|&p| !union.contains(p)) {
            Some(p) => Err(ModelError::CoverDoesNotCover(p)),
            None => Ok(()),
        }
    }
}

impl From<&SimplePair> for GeneralPair {
    fn from(p: &SimplePair) -> Self {
        GeneralPair { coalition: p.coalition.clone(), cover: vec![p.set_index] }
    }
}

/// The excess `c(U) - y(S)` of a pair, computed exactly.
pub fn pair_excess(
    inst: &SetCoverInstance,
    y: &Allocation,
    pair: &GeneralPair,
) -> Result<Rational, ModelError> {
    pair.validate(inst)?;
    if y.len() != inst.n_players() {
        return Err(ModelError::AllocationSizeMismatch(y.len(), inst.n_players()));
    }
    Ok(inst.cover_cost(&pair.cover)? - y.on(&pair.coalition))
}

/// True iff `y(T) <= c(T)` for every cover set `T`. For `y >= 0` this is
/// equivalent to full group rationality (every coalition's excess is
/// nonnegative), since any cover's cost bounds the sum of its sets' slacks.
pub fn group_rationality_on_sets(inst: &SetCoverInstance, y: &Allocation) -> bool {
    inst.sets.iter().all(|set| y.on(&set.members) <= set.cost)
}

/// Combines two instances on disjoint player sets. Players of `b` are
/// re-indexed after those of `a`; sets carry over unchanged.
pub fn disjoint_union(a: &SetCoverInstance, b: &SetCoverInstance) -> SetCoverInstance {
    let offset = a.n_players();
    let mut players = a.players.clone();
    players.extend(b.players.iter().cloned());
    let mut sets = a.sets.clone();
    for set in &b.sets {
        sets.push(CoverSet {
            members: Coalition::new(set.members.iter().map(|p| p + offset)),
            cost: set.cost.clone(),
        });
    }
    SetCoverInstance::new(players, sets)
}
