//! Brute-force reference computations for small instances.
//!
//! Everything here enumerates coalitions explicitly, so hard capacity limits
//! apply: exceeding them is an error, never a silent truncation. These
//! routines exist to cross-check the production solver; computing a single
//! coalition's exact cover cost is already a full set covering problem,
//! which is why none of this scales.

use crate::lp::{fractional_cover_value, FractionalCoverError};
use crate::model::{Allocation, Coalition, SetCoverInstance};
use crate::mps::{self, MpsError, Row, RowSystem};
use crate::rational::Rational;
use num_traits::Zero;


/// Capacity limits for the oracle enumerations. `max_table_n` bounds every
/// operation that tabulates all `2^n - 1` coalitions and can be raised by
/// callers who accept the blowup; the others are fixed by construction.
#[derive(Debug, Clone)]
pub struct OracleLimits {
    /// Players for full coalition tables (excess vectors, brute-force
    /// allocations). Default 12.
    pub max_table_n: usize,
    /// Players for the classical-nucleolus computation. Default 10.
    pub max_unhappy_n: usize,
    /// Players for single minimum-cover searches. Default 20.
    pub max_cover_n: usize,
    /// Set count up to which the table is built by subset DP instead of
    /// per-coalition branch and bound. Default 24.
    pub max_dp_sets: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits { max_table_n: 12, max_unhappy_n: 10, max_cover_n: 20, max_dp_sets: 24 }
    }
}

impl OracleLimits {
    pub fn with_table_n(n: usize) -> Self {
        OracleLimits { max_table_n: n, ..Default::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("instance with {n} players exceeds the {what} capacity of {limit}")]
    Capacity { n: usize, limit: usize, what: &'static str },
    #[error("coalition cannot be covered: no set contains player {0}")]
    Uncoverable(usize),
    #[error("coalition is empty")]
    EmptyCoalition,
    #[error(transparent)]
    Fractional(#[from] FractionalCoverError),
    #[error(transparent)]
    Mps(#[from] MpsError),
    #[error("internal invariant violated in oracle: {0}")]
    Internal(String),
}

fn set_masks(inst: &SetCoverInstance) -> Vec<u64> {
    inst.sets.iter().map(|s| s.members.mask()).collect()
}

fn sets_by_player(inst: &SetCoverInstance) -> Vec<Vec<usize>> {
    let mut by_player = vec![Vec::new(); inst.n_players()];
    for (t, set) in inst.sets.iter().enumerate() {
        for p in set.members.iter() {
            by_player[p].push(t);
        }
    }
    by_player
}

/// Exact minimum-cost cover of a coalition by branch and bound on the lowest
/// uncovered player. Ties between equal-cost covers resolve toward smaller
/// set indices (depth-first order with strict improvement), which affects
/// only the witness, never the cost.
pub fn min_cover(
    inst: &SetCoverInstance,
    coalition: &Coalition,
    limits: &OracleLimits,
) -> Result<(Rational, Vec<usize>), OracleError> {
    let n = inst.n_players();
    if n > limits.max_cover_n {
        return Err(OracleError::Capacity { n, limit: limits.max_cover_n, what: "min-cover" });
    }
    if coalition.is_empty() {
        return Err(OracleError::EmptyCoalition);
    }
    let masks = set_masks(inst);
    let by_player = sets_by_player(inst);
    for p in coalition.iter() {
        if by_player.get(p).is_none_or(|sets| sets.is_empty()) {
            return Err(OracleError::Uncoverable(p));
        }
    }
    let mut best: Option<(Rational, Vec<usize>)> = None;
    let mut chosen: Vec<usize> = Vec::new();
    branch(coalition.mask(), Rational::zero(), &mut chosen, &mut best, &masks, inst, &by_player);
    let (cost, mut cover) = best
        .ok_or_else(|| OracleError::Internal("branch and bound finished without a cover".into()))?;
    cover.sort_unstable();
    Ok((cost, cover))
}

fn branch(
    uncovered: u64,
    cost_so_far: Rational,
    chosen: &mut Vec<usize>,
    best: &mut Option<(Rational, Vec<usize>)>,
    masks: &[u64],
    inst: &SetCoverInstance,
    by_player: &[Vec<usize>],
) {
    if let Some((bound, _)) = best {
        if cost_so_far >= *bound {
            return;
        }
    }
    if uncovered == 0 {
        *best = Some((cost_so_far, chosen.clone()));
        return;
    }
    let p = uncovered.trailing_zeros() as usize;
    for &t in &by_player[p] {
        chosen.push(t);
        branch(
            uncovered & !masks[t],
            &cost_so_far + &inst.sets[t].cost,
            chosen,
            best,
            masks,
            inst,
            by_player,
        );
        chosen.pop();
    }
}

/// Minimum cover costs (and one witness cover each) for every nonempty
/// coalition, indexed by membership bitmask.
#[derive(Debug, Clone)]
pub struct CoalitionTable {
    pub n: usize,
    costs: Vec<Rational>,
    chosen: Vec<usize>,
    masks: Vec<u64>,
}

const UNSET: usize = usize::MAX;

impl CoalitionTable {
    /// Tabulates all coalitions. Uses a subset DP when the set count allows
    /// (simplest to audit), per-coalition branch and bound otherwise.
    pub fn build(inst: &SetCoverInstance, limits: &OracleLimits) -> Result<Self, OracleError> {
        let n = inst.n_players();
        if n > limits.max_table_n {
            return Err(OracleError::Capacity {
                n,
                limit: limits.max_table_n,
                what: "coalition table",
            });
        }
        if n > 20 {
            return Err(OracleError::Capacity { n, limit: 20, what: "coalition table" });
        }
        let masks = set_masks(inst);
        let size = 1usize << n;
        let mut costs = vec![Rational::zero(); size];
        let mut chosen = vec![UNSET; size];
        if inst.sets.len() <= limits.max_dp_sets {
            let by_player = sets_by_player(inst);
            for mask in 1..size {
                let p = mask.trailing_zeros() as usize;
                let mut best: Option<(Rational, usize)> = None;
                for &t in &by_player[p] {
                    let rest = mask & !(masks[t] as usize);
                    if rest != 0 && chosen[rest] == UNSET {
                        // Uncoverable remainder; skip this branch.
                        continue;
                    }
                    let cand = &costs[rest] + &inst.sets[t].cost;
                    if best.as_ref().is_none_or(|(c, _)| cand < *c) {
                        best = Some((cand, t));
                    }
                }
                match best {
                    Some((c, t)) => {
                        costs[mask] = c;
                        chosen[mask] = t;
                    }
                    None => return Err(OracleError::Uncoverable(p)),
                }
            }
        } else {
            let cover_limits = OracleLimits { max_cover_n: 20, ..limits.clone() };
            for mask in 1..size {
                let coalition = Coalition::from_mask(mask as u64);
                let (cost, cover) = min_cover(inst, &coalition, &cover_limits)?;
                costs[mask] = cost;
                chosen[mask] = cover[0];
            }
        }
        Ok(CoalitionTable { n, costs, chosen, masks })
    }

    pub fn cost(&self, coalition: &Coalition) -> &Rational {
        &self.costs[coalition.mask() as usize]
    }

    /// One minimum-cost cover witness, as sorted set indices.
    pub fn cover(&self, coalition: &Coalition) -> Vec<usize> {
        let mut mask = coalition.mask() as usize;
        let mut cover = Vec::new();
        while mask != 0 {
            let t = self.chosen[mask];
            debug_assert_ne!(t, UNSET);
            cover.push(t);
            mask &= !(self.masks[t] as usize);
        }
        cover.sort_unstable();
        cover.dedup();
        cover
    }

    /// The excess `min cover cost - y(S)` of a coalition.
    pub fn excess(&self, y: &Allocation, coalition: &Coalition) -> Rational {
        self.cost(coalition) - y.on(coalition)
    }

    /// Rows for the full-coalition slack system: one row per nonempty
    /// coalition at its exact minimum cover cost.
    pub fn rows(&self) -> RowSystem {
        let rows: Vec<Row> = (1..(1u64 << self.n))
            .map(|mask| {
                let coalition = Coalition::from_mask(mask);
                Row {
                    cost: self.cost(&coalition).clone(),
                    cover: self.cover(&coalition),
                    coalition,
                }
            })
            .collect();
        RowSystem { n_players: self.n, rows }
    }

    pub fn coalitions(&self) -> impl Iterator<Item = Coalition> + '_ {
        (1..(1u64 << self.n)).map(Coalition::from_mask)
    }
}

/// The reference happy nucleolus: lexicographic slack maximization over all
/// `2^n - 1` coalition rows with exact minimum cover costs, distributing the
/// fractional cover optimum.
pub fn happy_nucleolus_bruteforce(
    inst: &SetCoverInstance,
    limits: &OracleLimits,
) -> Result<Allocation, OracleError> {
    let total = fractional_cover_value(inst)?;
    let table = CoalitionTable::build(inst, limits)?;
    let rows = table.rows();
    let (y, state) = mps::lexmax(&rows, &total)?;
    if !state.unique {
        return Err(OracleError::Internal("full coalition family did not pin a point".into()));
    }
    Ok(y)
}

/// The classical nucleolus over all coalitions, distributing the minimum
/// *integral* cover cost of the full player set. The `y >= 0` restriction is
/// kept; players pinned at zero are reported so callers can flag the case
/// where it would bind.
#[derive(Debug, Clone)]
pub struct UnhappyNucleolus {
    pub allocation: Allocation,
    pub integral_optimum: Rational,
    pub zero_players: Vec<usize>,
}

pub fn unhappy_nucleolus_bruteforce(
    inst: &SetCoverInstance,
    limits: &OracleLimits,
) -> Result<UnhappyNucleolus, OracleError> {
    let n = inst.n_players();
    if n > limits.max_unhappy_n {
        return Err(OracleError::Capacity {
            n,
            limit: limits.max_unhappy_n,
            what: "classical nucleolus",
        });
    }
    let table = CoalitionTable::build(inst, limits)?;
    let total = table.cost(&inst.full_coalition()).clone();
    let rows = table.rows();
    let (y, state) = mps::lexmax(&rows, &total)?;
    if !state.unique {
        return Err(OracleError::Internal("full coalition family did not pin a point".into()));
    }
    let zero_players =
        y.values.iter().enumerate().filter(|(_, v)| v.is_zero()).map(|(p, _)| p).collect();
    Ok(UnhappyNucleolus { allocation: y, integral_optimum: total, zero_players })
}

/// Exact excesses of all nonempty coalitions under `y`, sorted nondecreasing.
pub fn full_excess_vector(
    inst: &SetCoverInstance,
    y: &Allocation,
    limits: &OracleLimits,
) -> Result<Vec<Rational>, OracleError> {
    let table = CoalitionTable::build(inst, limits)?;
    let mut excesses: Vec<Rational> = table.coalitions().map(|c| table.excess(y, &c)).collect();
    excesses.sort();
    Ok(excesses)
}
