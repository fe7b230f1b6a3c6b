//! Lexicographic slack maximization over `K = {y >= 0, y(P) = total}`.
//!
//! Given a system of rows `y(S_r) <= c_r`, the engine finds the point of `K`
//! that lexicographically maximizes the nondecreasingly sorted vector of
//! slacks `c_r - y(S_r)`. It proceeds in stages: maximize the smallest slack
//! of the unfixed rows with an LP, fix every unfixed row carrying a positive
//! dual value at the optimum (complementary slackness makes those rows tight
//! in every optimum), and repeat until the fixed equalities pin a unique
//! point. Fed the explicit pair family of [`crate::families::build_c_star`]
//! and the fractional cover optimum as `total`, the result is the happy
//! nucleolus; fed one row per coalition with exact minimum cover costs, it
//! is the brute-force reference.
//!
//! Consecutive fixings at the same slack level are merged into one logged
//! stage, so the `epsilon` values in the stage log increase strictly.

use crate::lp::{self, LinearProgram, LpCertificate, LpError, LpOutcome, Relation, Sense};
use crate::model::{Allocation, Coalition, SetCoverInstance};
use crate::rational::Rational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MpsError {
    #[error("row system is empty but the instance has {0} players")]
    EmptyRows(usize),
    #[error("the region {{y >= 0, y(P) = total}} is empty (total is negative)")]
    InfeasibleRegion,
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error(transparent)]
    Lp(#[from] LpError),
}

/// One inequality `y(coalition) <= cost`; `cover` records which sets the
/// bound came from (display only, not used by the engine).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    pub coalition: Coalition,
    pub cost: Rational,
    pub cover: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct RowSystem {
    pub n_players: usize,
    pub rows: Vec<Row>,
}

impl RowSystem {
    pub fn new(n_players: usize, rows: Vec<Row>) -> Result<Self, MpsError> {
        for (i, row) in rows.iter().enumerate() {
            if row.coalition.is_empty() {
                return Err(MpsError::Internal(format!("row {i} has an empty coalition")));
            }
            if row.coalition.members().last().is_some_and(|&p| p >= n_players) {
                return Err(MpsError::Internal(format!("row {i} references an unknown player")));
            }
        }
        Ok(RowSystem { n_players, rows })
    }

    /// Rows for a family of simple pairs: one inequality per pair, with the
    /// referenced set's cost as right-hand side.
    pub fn from_simple_pairs(
        inst: &SetCoverInstance,
        pairs: &[crate::model::SimplePair],
    ) -> Result<Self, MpsError> {
        let rows = pairs
            .iter()
            .map(|p| {
                let set = inst.sets.get(p.set_index).ok_or_else(|| {
                    MpsError::Internal(format!("pair references unknown set {}", p.set_index))
                })?;
                Ok(Row {
                    coalition: p.coalition.clone(),
                    cost: set.cost.clone(),
                    cover: vec![p.set_index],
                })
            })
            .collect::<Result<Vec<_>, MpsError>>()?;
        RowSystem::new(inst.n_players(), rows)
    }

    /// Drops rows whose coalition also appears with a strictly smaller cost
    /// (first occurrence kept on ties). For any family that contains, for
    /// each of its coalitions, a row at that coalition's minimum single-set
    /// cover cost, this does not change the lexicographic maximizer: a
    /// dropped row is the same incidence vector with a never-smaller slack.
    pub fn prune_dominated(&self) -> RowSystem {
        let mut best: BTreeMap<&Coalition, usize> = BTreeMap::new();
        for (i, row) in self.rows.iter().enumerate() {
            match best.get(&row.coalition) {
                Some(&j) if self.rows[j].cost <= row.cost => {}
                _ => {
                    best.insert(&row.coalition, i);
                }
            }
        }
        let mut keep: Vec<usize> = best.into_values().collect();
        keep.sort_unstable();
        RowSystem {
            n_players: self.n_players,
            rows: keep.into_iter().map(|i| self.rows[i].clone()).collect(),
        }
    }
}

/// One logged stage: the maximized slack level and the rows fixed at it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stage {
    pub epsilon: Rational,
    pub fixed_rows: Vec<usize>,
}

/// Progress of one lexmax run: fixed rows with their slack values, the
/// stage history, and the best allocation witness seen so far.
#[derive(Debug, Clone)]
pub struct MpsState {
    pub fixed: BTreeMap<usize, Rational>,
    pub stage_log: Vec<Stage>,
    pub witness: Option<Allocation>,
    /// Whether the fixed equalities pinned a unique point. True on the
    /// production path; false only for families that do not determine the
    /// optimizer, where the canonical (coordinatewise-minimal) point of the
    /// final optimal face is returned instead.
    pub unique: bool,
}

impl MpsState {
    pub fn new() -> Self {
        MpsState { fixed: BTreeMap::new(), stage_log: Vec::new(), witness: None, unique: false }
    }

    /// Stage log as JSON: `[{"epsilon": "1/2", "fixed": [{"coalition": [...],
    /// "cover": [...]}, ...]}, ...]`.
    pub fn stage_log_json(&self, rows: &RowSystem) -> serde_json::Value {
        #[derive(Serialize)]
        struct Handle<'a> {
            coalition: &'a Coalition,
            cover: &'a [usize],
        }
        #[derive(Serialize)]
        struct Entry<'a> {
            epsilon: String,
            fixed: Vec<Handle<'a>>,
        }
        let entries: Vec<Entry> = self
            .stage_log
            .iter()
            .map(|stage| Entry {
                epsilon: stage.epsilon.to_string(),
                fixed: stage
                    .fixed_rows
                    .iter()
                    .map(|&r| Handle {
                        coalition: &rows.rows[r].coalition,
                        cover: &rows.rows[r].cover,
                    })
                    .collect(),
            })
            .collect();
        serde_json::to_value(entries).expect("stage log serializes")
    }
}

impl Default for MpsState {
    fn default() -> Self {
        Self::new()
    }
}

/// The stage LP: maximize `e` subject to `y(P) = total`,
/// `y(S_r) + e <= c_r` for unfixed rows, `y(S_r) = c_r - eps_r` for fixed
/// rows, `y >= 0`, `e` free. Variables are `y_0..y_{n-1}, e`; LP row `r + 1`
/// corresponds to system row `r`.
pub(crate) fn stage_lp(
    rows: &RowSystem,
    fixed: &BTreeMap<usize, Rational>,
    total: &Rational,
) -> LinearProgram {
    let n = rows.n_players;
    let mut objective = vec![Rational::zero(); n + 1];
    objective[n] = Rational::one();
    let mut lp = LinearProgram::new(Sense::Max, objective);
    lp.set_free(n);
    lp.add_row(
        (0..n).map(|_| Rational::one()).chain([Rational::zero()]).collect(),
        Relation::Eq,
        total.clone(),
    );
    for (r, row) in rows.rows.iter().enumerate() {
        let mut coeffs = vec![Rational::zero(); n + 1];
        for p in row.coalition.iter() {
            coeffs[p] = Rational::one();
        }
        match fixed.get(&r) {
            Some(eps) => lp.add_row(coeffs, Relation::Eq, &row.cost - eps),
            None => {
                coeffs[n] = Rational::one();
                lp.add_row(coeffs, Relation::Le, row.cost.clone());
            }
        }
    }
    lp
}

/// Applies one optimal stage certificate: every unfixed row with a positive
/// dual value is fixed at the stage optimum `eps*`. Same-level fixings are
/// merged into the last logged stage; a strictly larger level opens a new
/// one. Returns the newly fixed row indices.
pub fn fix_stage(
    state: &mut MpsState,
    rows: &RowSystem,
    cert: &LpCertificate,
) -> Result<Vec<usize>, MpsError> {
    let n = rows.n_players;
    let epsilon = cert.objective.clone();
    if cert.dual.len() != rows.rows.len() + 1 {
        return Err(MpsError::Internal("stage certificate has wrong row count".into()));
    }
    // The free epsilon column forces the unfixed duals to sum to one.
    let mut dual_sum = Rational::zero();
    let mut newly: Vec<usize> = Vec::new();
    for (r, _) in rows.rows.iter().enumerate() {
        if state.fixed.contains_key(&r) {
            continue;
        }
        let u = &cert.dual[r + 1];
        if u.is_negative() {
            return Err(MpsError::Internal("negative dual on a slack row".into()));
        }
        dual_sum += u;
        if u.is_positive() {
            newly.push(r);
        }
    }
    if !dual_sum.is_one() {
        return Err(MpsError::Internal("unfixed duals do not sum to one".into()));
    }
    if newly.is_empty() {
        return Err(MpsError::Internal("no positive dual on unfixed rows".into()));
    }
    for &r in &newly {
        state.fixed.insert(r, epsilon.clone());
    }
    match state.stage_log.last_mut() {
        Some(last) if last.epsilon == epsilon => last.fixed_rows.extend(newly.iter().copied()),
        Some(last) if last.epsilon > epsilon => {
            return Err(MpsError::Internal("stage level decreased".into()));
        }
        _ => state.stage_log.push(Stage { epsilon, fixed_rows: newly.clone() }),
    }
    state.witness = Some(Allocation::new(cert.primal[..n].to_vec()));
    Ok(newly)
}

/// LP over the stage-feasible region `{y >= 0, y(P) = total, fixed rows}`
/// optimizing a single coordinate.
fn coordinate_lp(
    rows: &RowSystem,
    fixed: &BTreeMap<usize, Rational>,
    total: &Rational,
    extra_pins: &[(usize, Rational)],
    coordinate: usize,
    sense: Sense,
) -> LinearProgram {
    let n = rows.n_players;
    let mut objective = vec![Rational::zero(); n];
    objective[coordinate] = Rational::one();
    let mut lp = LinearProgram::new(sense, objective);
    lp.add_row(vec![Rational::one(); n], Relation::Eq, total.clone());
    for (&r, eps) in fixed {
        let row = &rows.rows[r];
        let mut coeffs = vec![Rational::zero(); n];
        for p in row.coalition.iter() {
            coeffs[p] = Rational::one();
        }
        lp.add_row(coeffs, Relation::Eq, &row.cost - eps);
    }
    for (p, v) in extra_pins {
        let mut coeffs = vec![Rational::zero(); n];
        coeffs[*p] = Rational::one();
        lp.add_row(coeffs, Relation::Eq, v.clone());
    }
    lp
}

fn coordinate_optimum(lp: &LinearProgram) -> Result<Rational, MpsError> {
    match lp::solve(lp)? {
        LpOutcome::Optimal(cert) => Ok(cert.objective),
        LpOutcome::Infeasible { .. } => {
            Err(MpsError::Internal("stage-feasible region is empty".into()))
        }
        LpOutcome::Unbounded { .. } => {
            Err(MpsError::Internal("stage-feasible region is unbounded".into()))
        }
    }
}

/// Decides whether `{y >= 0, y(P) = total}` plus the fixed equalities pins a
/// unique point, by minimizing and maximizing every coordinate (up to `2n`
/// LP solves, stopping at the first undetermined coordinate). Returns the
/// point when unique. This deliberately also captures coordinates pinned
/// through the bounds `y >= 0`, which incidence rank alone would miss.
pub fn uniqueness_check(
    rows: &RowSystem,
    fixed: &BTreeMap<usize, Rational>,
    total: &Rational,
) -> Result<Option<Allocation>, MpsError> {
    let n = rows.n_players;
    let mut point = Vec::with_capacity(n);
    for p in 0..n {
        let low = coordinate_optimum(&coordinate_lp(rows, fixed, total, &[], p, Sense::Min))?;
        let high = coordinate_optimum(&coordinate_lp(rows, fixed, total, &[], p, Sense::Max))?;
        if low != high {
            return Ok(None);
        }
        point.push(low);
    }
    Ok(Some(Allocation::new(point)))
}

/// Canonical point of the stage-feasible region: coordinates are minimized
/// one by one, each minimum pinned before the next. Deterministic and
/// independent of row order.
fn canonical_pin(
    rows: &RowSystem,
    fixed: &BTreeMap<usize, Rational>,
    total: &Rational,
) -> Result<Allocation, MpsError> {
    let n = rows.n_players;
    let mut pins: Vec<(usize, Rational)> = Vec::with_capacity(n);
    for p in 0..n {
        let v = coordinate_optimum(&coordinate_lp(rows, fixed, total, &pins, p, Sense::Min))?;
        pins.push((p, v));
    }
    Ok(Allocation::new(pins.into_iter().map(|(_, v)| v).collect()))
}

/// Runs the full scheme. Returns the lexicographic maximizer together with
/// the stage history. When the row system does not pin a unique point even
/// after every row is fixed (a family that fails to determine the optimizer),
/// the canonical point of the final optimal face is returned and
/// `state.unique` is false; every point of that face, including the returned
/// one, realizes the lexicographically maximal slack vector.
pub fn lexmax(rows: &RowSystem, total: &Rational) -> Result<(Allocation, MpsState), MpsError> {
    let n = rows.n_players;
    if rows.rows.is_empty() && n != 1 {
        return Err(MpsError::EmptyRows(n));
    }
    if total.is_negative() {
        return Err(MpsError::InfeasibleRegion);
    }
    let mut state = MpsState::new();
    // Coordinates verified unique so far, in index order. The stage-feasible
    // region only shrinks as rows get fixed, so a pinned coordinate stays
    // pinned at the same value; the check resumes at the first open one.
    let mut pinned: Vec<Rational> = Vec::new();
    loop {
        while pinned.len() < n {
            let p = pinned.len();
            let low =
                coordinate_optimum(&coordinate_lp(rows, &state.fixed, total, &[], p, Sense::Min))?;
            let high =
                coordinate_optimum(&coordinate_lp(rows, &state.fixed, total, &[], p, Sense::Max))?;
            if low != high {
                break;
            }
            pinned.push(low);
        }
        if pinned.len() == n {
            let point = Allocation::new(pinned);
            state.unique = true;
            state.witness = Some(point.clone());
            finish(rows, total, &state, &point)?;
            return Ok((point, state));
        }
        if state.fixed.len() == rows.rows.len() {
            let point = canonical_pin(rows, &state.fixed, total)?;
            state.unique = false;
            state.witness = Some(point.clone());
            finish(rows, total, &state, &point)?;
            return Ok((point, state));
        }
        let lp = stage_lp(rows, &state.fixed, total);
        let cert = match lp::solve(&lp)? {
            LpOutcome::Optimal(cert) => cert,
            LpOutcome::Infeasible { .. } => {
                return Err(if state.fixed.is_empty() {
                    MpsError::InfeasibleRegion
                } else {
                    MpsError::Internal("stage LP infeasible with consistent fixings".into())
                });
            }
            LpOutcome::Unbounded { .. } => {
                return Err(MpsError::Internal("stage LP unbounded".into()));
            }
        };
        fix_stage(&mut state, rows, &cert)?;
        if state.stage_log.len() > rows.rows.len() {
            return Err(MpsError::Internal("more stages than rows".into()));
        }
    }
}

/// Exit assertions: the allocation lies in `K`, every fixed row's slack
/// equals its recorded level, and logged levels increase strictly.
fn finish(
    rows: &RowSystem,
    total: &Rational,
    state: &MpsState,
    y: &Allocation,
) -> Result<(), MpsError> {
    if !y.is_nonnegative() || &y.total() != total {
        return Err(MpsError::Internal("allocation left the feasible region".into()));
    }
    for (&r, eps) in &state.fixed {
        let row = &rows.rows[r];
        if &row.cost - y.on(&row.coalition) != *eps {
            return Err(MpsError::Internal("fixed row slack drifted from its level".into()));
        }
    }
    for pair in state.stage_log.windows(2) {
        if pair[0].epsilon >= pair[1].epsilon {
            return Err(MpsError::Internal("stage levels are not strictly increasing".into()));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::CoverSet;
    use crate::rational::{int, rat};

    fn row(members: &[usize], cost: Rational, cover: &[usize]) -> Row {
        Row { coalition: Coalition::new(members.iter().copied()), cost, cover: cover.to_vec() }
    }

    /// Rows of the explicit pair family for the nested-set instance
    /// `{p1..pi} : i`, written out by hand.
    fn chain_rows(n: usize) -> RowSystem {
        let mut rows = Vec::new();
        for i in 1..=n {
            let set: Vec<usize> = (0..i).collect();
            if i < n {
                rows.push(row(&set, int(i as i64), &[i - 1]));
            }
            for p in 0..i {
                let coalition: Vec<usize> = set.iter().copied().filter(|&q| q != p).collect();
                if !coalition.is_empty() && coalition.len() < n {
                    rows.push(row(&coalition, int(i as i64), &[i - 1]));
                }
            }
        }
        RowSystem::new(n, rows).unwrap()
    }

    fn chain_closed_form(n: usize) -> Vec<Rational> {
        let mut y: Vec<Rational> = (1..n).map(|i| int(1) - rat(1, 1i64 << i)).collect();
        y.push(int(2) - rat(1, 1i64 << (n - 1)));
        y
    }

    #[test]
    fn single_player_without_rows_is_a_point() {
        let rows = RowSystem::new(1, vec![]).unwrap();
        let (y, state) = lexmax(&rows, &rat(7, 2)).unwrap();
        assert_eq!(y.values, vec![rat(7, 2)]);
        assert!(state.unique);
        assert!(state.stage_log.is_empty());
    }

    #[test]
    fn empty_rows_with_two_players_is_an_error() {
        let rows = RowSystem::new(2, vec![]).unwrap();
        assert!(matches!(lexmax(&rows, &int(1)), Err(MpsError::EmptyRows(2))));
    }

    #[test]
    fn negative_total_is_infeasible() {
        let rows = RowSystem::new(1, vec![row(&[0], int(1), &[0])]).unwrap();
        assert!(matches!(lexmax(&rows, &int(-1)), Err(MpsError::InfeasibleRegion)));
    }

    #[test]
    fn zero_total_pins_zero_without_stages() {
        let rows = chain_rows(3);
        let (y, state) = lexmax(&rows, &int(0)).unwrap();
        assert_eq!(y.values, vec![int(0); 3]);
        assert!(state.unique);
        assert!(state.stage_log.is_empty());
    }

    #[test]
    fn nested_sets_match_the_closed_form() {
        for n in 2..=6 {
            let rows = chain_rows(n);
            let (y, state) = lexmax(&rows, &int(n as i64)).unwrap();
            assert_eq!(y.values, chain_closed_form(n), "n = {n}");
            assert!(state.unique);
            // Stage i fixes the prefix {p1..pi} and the complement of {pi}
            // at level 1 - 2^-i.
            assert_eq!(state.stage_log.len(), n - 1);
            for (k, stage) in state.stage_log.iter().enumerate() {
                let i = k + 1;
                assert_eq!(stage.epsilon, int(1) - rat(1, 1i64 << i));
                let mut coalitions: Vec<Coalition> =
                    stage.fixed_rows.iter().map(|&r| rows.rows[r].coalition.clone()).collect();
                coalitions.sort();
                coalitions.dedup();
                let mut expected = vec![
                    Coalition::new(0..i),
                    Coalition::new((0..n).filter(|&p| p != i - 1)),
                ];
                expected.sort();
                expected.dedup();
                assert_eq!(coalitions, expected, "stage {i} of n = {n}");
            }
        }
    }

    #[test]
    fn row_order_does_not_change_the_result() {
        let rows = chain_rows(4);
        let (y_ref, _) = lexmax(&rows, &int(4)).unwrap();
        let mut perm = rows.rows.clone();
        perm.rotate_left(3);
        perm.swap(0, 5);
        let shuffled = RowSystem::new(4, perm).unwrap();
        let (y, _) = lexmax(&shuffled, &int(4)).unwrap();
        assert_eq!(y, y_ref);
    }

    #[test]
    fn pruning_dominated_rows_keeps_the_result_and_log() {
        for n in 2..=5 {
            let rows = chain_rows(n);
            let pruned = rows.prune_dominated();
            assert!(pruned.rows.len() < rows.rows.len());
            let (y_full, s_full) = lexmax(&rows, &int(n as i64)).unwrap();
            let (y_pruned, s_pruned) = lexmax(&pruned, &int(n as i64)).unwrap();
            assert_eq!(y_full, y_pruned);
            let levels =
                |s: &MpsState| s.stage_log.iter().map(|st| st.epsilon.clone()).collect::<Vec<_>>();
            assert_eq!(levels(&s_full), levels(&s_pruned));
        }
    }

    /// Two players, sets {1}: 1 and {1,2}: 1. The family consisting only of
    /// the rows (T, {T}) does not determine the optimizer the same way the
    /// full explicit family does: it pins y = (0, 1), while the full family
    /// gives (1/2, 1/2).
    #[test]
    fn set_only_family_gives_a_different_point() {
        let inst = SetCoverInstance::with_default_labels(
            2,
            vec![CoverSet::new([0], int(1)), CoverSet::new([0, 1], int(1))],
        );
        let sets_only = RowSystem::new(2, vec![row(&[0], int(1), &[0])]).unwrap();
        let (y, state) = lexmax(&sets_only, &int(1)).unwrap();
        assert_eq!(y.values, vec![int(0), int(1)]);
        assert!(state.unique, "y(P) = 1 and y_1 = 1 pin the point");

        // The explicit family over both sets: ({1},{T1}), ({1},{T2}), ({2},{T2}).
        let c_star = RowSystem::from_simple_pairs(
            &inst,
            &[
                crate::model::SimplePair::new(Coalition::new([0]), 0),
                crate::model::SimplePair::new(Coalition::new([0]), 1),
                crate::model::SimplePair::new(Coalition::new([1]), 1),
            ],
        )
        .unwrap();
        let (y_star, state_star) = lexmax(&c_star, &int(1)).unwrap();
        assert_eq!(y_star.values, vec![rat(1, 2), rat(1, 2)]);
        assert!(state_star.unique);
        assert_ne!(y, y_star);
    }

    /// A family whose final fixed region is a segment: single row over one of
    /// three players. The canonical point and the non-unique flag come back.
    #[test]
    fn non_determining_family_returns_canonical_point() {
        let rows = RowSystem::new(3, vec![row(&[0], int(2), &[0])]).unwrap();
        let (y, state) = lexmax(&rows, &int(3)).unwrap();
        assert!(!state.unique);
        // eps* = 2 at y_0 = 0; remaining freedom minimized coordinatewise.
        assert_eq!(y.values, vec![int(0), int(0), int(3)]);
        assert_eq!(state.stage_log.len(), 1);
        assert_eq!(state.stage_log[0].epsilon, int(2));
    }

    #[test]
    fn uniqueness_check_detects_forced_coordinates() {
        // Nested sets with n = 2: after fixing ({p1}, cost 1) at 1/2,
        // y_1 = 1/2 and y_2 = 3/2 are forced.
        let rows = chain_rows(2);
        let mut fixed = BTreeMap::new();
        assert_eq!(uniqueness_check(&rows, &fixed, &int(2)).unwrap(), None);
        let idx = rows
            .rows
            .iter()
            .position(|r| r.coalition == Coalition::new([0]) && r.cost == int(1))
            .unwrap();
        fixed.insert(idx, rat(1, 2));
        let point = uniqueness_check(&rows, &fixed, &int(2)).unwrap().unwrap();
        assert_eq!(point.values, vec![rat(1, 2), rat(3, 2)]);
    }

    #[test]
    fn fix_stage_fixes_the_tight_rows() {
        let rows = chain_rows(2);
        let mut state = MpsState::new();
        let lp_prob = stage_lp(&rows, &state.fixed, &int(2));
        let cert = lp::solve(&lp_prob).unwrap().into_optimal().unwrap();
        assert_eq!(cert.objective, rat(1, 2));
        let newly = fix_stage(&mut state, &rows, &cert).unwrap();
        assert!(!newly.is_empty());
        for &r in &newly {
            let c = &rows.rows[r].coalition;
            assert!(
                *c == Coalition::new([0]) || *c == Coalition::new([1]),
                "unexpected fixed coalition {c}"
            );
        }
        assert_eq!(state.stage_log.len(), 1);
    }
}
