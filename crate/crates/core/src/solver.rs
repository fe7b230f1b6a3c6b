//! The production solve path.
//!
//! Validates and normalizes the instance, computes the fractional cover
//! optimum, builds the explicit pair family, drops rows dominated by a
//! cheaper row on the same coalition, and runs the slack-maximization
//! scheme. Everything downstream of validation is exact.

use crate::families::{self, FamilyError, PairFamily};
use crate::lp::{fractional_cover_value, FractionalCoverError};
use crate::model::{
    group_rationality_on_sets, validate_instance, Allocation, SetCoverInstance, Violation,
};
use crate::mps::{self, MpsError, MpsState, RowSystem};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolveError {
    #[error("instance is invalid: {}", format_violations(.0))]
    Invalid(Vec<Violation>),
    #[error(transparent)]
    Fractional(#[from] FractionalCoverError),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Mps(#[from] MpsError),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

fn format_violations(violations: &[Violation]) -> String {
    violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

/// A solved instance: the allocation, the distributed total, and the full
/// stage history over the row system that produced it.
#[derive(Debug, Clone)]
pub struct HappySolution {
    /// The normalized instance actually solved (members sorted, duplicate
    /// member sets collapsed to their minimum cost).
    pub instance: SetCoverInstance,
    pub allocation: Allocation,
    /// The fractional cover optimum; equals `allocation.total()`.
    pub lp_value: Rational,
    /// The row system fed to the scheme (explicit family, dominated rows
    /// dropped).
    pub rows: RowSystem,
    pub state: MpsState,
}

impl HappySolution {
    pub fn stage_log_json(&self) -> serde_json::Value {
        self.state.stage_log_json(&self.rows)
    }
}

/// Computes the happy nucleolus of a set covering instance.
pub fn happy_nucleolus(inst: &SetCoverInstance) -> Result<HappySolution, SolveError> {
    let report = validate_instance(inst);
    if !report.is_ok() {
        return Err(SolveError::Invalid(report.violations));
    }
    let (instance, _) = inst.normalized();
    let family = families::build_c_star(&instance)?;
    let solution = lexmax_over_family(&instance, &family, true)?;
    if !solution.state.unique {
        return Err(SolveError::Internal("explicit family did not pin a unique point".into()));
    }
    if !group_rationality_on_sets(&solution.instance, &solution.allocation) {
        return Err(SolveError::Internal("allocation violates a set's cost bound".into()));
    }
    Ok(solution)
}

/// Lexicographic slack maximization over an arbitrary family of simple
/// pairs, distributing the fractional cover optimum. With `prune_dominated`
/// the same-coalition reduction of the production path is applied; that is
/// only sound for families containing a minimum-cost row per coalition
/// (supersets of the explicit family), so callers exercising deliberately
/// crippled families must pass `false`. `state.unique` reports whether the
/// family pinned the point.
pub fn lexmax_over_family(
    inst: &SetCoverInstance,
    family: &PairFamily,
    prune_dominated: bool,
) -> Result<HappySolution, SolveError> {
    let report = validate_instance(inst);
    if !report.is_ok() {
        return Err(SolveError::Invalid(report.violations));
    }
    let (instance, _) = inst.normalized();
    let lp_value = fractional_cover_value(&instance)?;
    let mut rows = RowSystem::from_simple_pairs(&instance, &family.pairs)?;
    if prune_dominated {
        rows = rows.prune_dominated();
    }
    let (allocation, state) = mps::lexmax(&rows, &lp_value)?;
    Ok(HappySolution { instance, allocation, lp_value, rows, state })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{chain_instance, triangle_closed_form, triangle_instance};
    use crate::model::{disjoint_union, Coalition, CoverSet};
    use crate::oracle::{self, OracleLimits};
    use crate::rational::{int, rat};
    use crate::testkit::{fig1_instance, fig2_instance};

    #[test]
    fn capacitated_four_customer_solution() {
        let solution = happy_nucleolus(&fig2_instance()).unwrap();
        assert_eq!(solution.lp_value, int(18));
        assert_eq!(solution.allocation.values, vec![int(4), int(4), int(4), int(6)]);
    }

    #[test]
    fn five_customer_line_solution() {
        let solution = happy_nucleolus(&fig1_instance()).unwrap();
        assert_eq!(solution.lp_value, int(9));
        assert_eq!(
            solution.allocation.values,
            vec![rat(3, 2), rat(3, 2), int(1), rat(3, 2), rat(7, 2)]
        );
    }

    #[test]
    fn chain_solution_matches_closed_form_with_stage_table() {
        let inst = chain_instance(5).unwrap();
        let solution = happy_nucleolus(&inst).unwrap();
        assert_eq!(solution.lp_value, int(5));
        assert_eq!(
            solution.allocation.values,
            vec![rat(1, 2), rat(3, 4), rat(7, 8), rat(15, 16), rat(31, 16)]
        );
        assert_eq!(solution.state.stage_log.len(), 4);
        for (k, stage) in solution.state.stage_log.iter().enumerate() {
            let i = k + 1;
            assert_eq!(stage.epsilon, int(1) - rat(1, 1 << i));
        }
    }

    #[test]
    fn triangle_solutions_follow_the_formula() {
        for (c1, c2, c3) in [
            (int(3), int(4), int(6)),
            (int(1), int(1), int(3)),
            (int(0), int(0), int(0)),
            (rat(1, 3), rat(5, 2), rat(7, 2)),
        ] {
            let inst = triangle_instance(c1.clone(), c2.clone(), c3.clone()).unwrap();
            let solution = happy_nucleolus(&inst).unwrap();
            assert_eq!(
                solution.allocation.values,
                triangle_closed_form(&c1, &c2, &c3),
                "costs {c1}, {c2}, {c3}"
            );
        }
    }

    #[test]
    fn invalid_instances_are_rejected() {
        let inst = SetCoverInstance::with_default_labels(2, vec![CoverSet::new([0], int(1))]);
        assert!(matches!(happy_nucleolus(&inst), Err(SolveError::Invalid(_))));
    }

    #[test]
    fn duplicate_sets_are_collapsed_before_solving() {
        let inst = SetCoverInstance::with_default_labels(
            1,
            vec![CoverSet::new([0], int(5)), CoverSet::new([0], int(2))],
        );
        let solution = happy_nucleolus(&inst).unwrap();
        assert_eq!(solution.instance.sets.len(), 1);
        assert_eq!(solution.allocation.values, vec![int(2)]);
    }

    #[test]
    fn solver_matches_the_oracle_on_small_random_instances() {
        use crate::generators::{random_instance, RandomInstanceParams};
        let limits = OracleLimits::default();
        for seed in 0..25 {
            let params = RandomInstanceParams {
                n_players: 2 + (seed as usize % 5),
                n_sets: 3 + (seed as usize % 7),
                ..Default::default()
            };
            let inst = random_instance(&params, seed).unwrap();
            let solution = happy_nucleolus(&inst).unwrap();
            let reference = oracle::happy_nucleolus_bruteforce(&inst, &limits).unwrap();
            assert_eq!(solution.allocation, reference, "seed {seed}");
        }
    }

    #[test]
    fn disjoint_union_solves_independently() {
        let a = chain_instance(3).unwrap();
        let b = triangle_instance(int(3), int(4), int(6)).unwrap();
        let ya = happy_nucleolus(&a).unwrap().allocation;
        let yb = happy_nucleolus(&b).unwrap().allocation;
        let union = disjoint_union(&a, &b);
        let yu = happy_nucleolus(&union).unwrap().allocation;
        let mut expected = ya.values.clone();
        expected.extend(yb.values.clone());
        assert_eq!(yu.values, expected);
    }

    #[test]
    fn output_excess_vector_is_nonnegative_with_zero_minimum() {
        let inst = fig2_instance();
        let solution = happy_nucleolus(&inst).unwrap();
        let excesses =
            oracle::full_excess_vector(&inst, &solution.allocation, &OracleLimits::default())
                .unwrap();
        assert_eq!(excesses[0], int(0));

        // A set is tight exactly when its pair slack is zero.
        let tight = solution
            .instance
            .sets
            .iter()
            .any(|s| solution.allocation.on(&s.members) == s.cost);
        assert!(tight);
    }

    #[test]
    fn family_runs_respect_the_prune_flag() {
        let inst = fig2_instance();
        let family = crate::families::build_c_star(&inst).unwrap();
        let pruned = lexmax_over_family(&inst, &family, true).unwrap().allocation;
        let full = lexmax_over_family(&inst, &family, false).unwrap().allocation;
        assert_eq!(pruned, full);
        assert_eq!(pruned.values, vec![int(4), int(4), int(4), int(6)]);
    }

    #[test]
    fn stage_log_json_shape() {
        let inst = chain_instance(3).unwrap();
        let solution = happy_nucleolus(&inst).unwrap();
        let log = solution.stage_log_json();
        let entries = log.as_array().unwrap();
        assert_eq!(entries.len(), 2);
        assert_eq!(entries[0]["epsilon"], "1/2");
        assert!(entries[0]["fixed"].as_array().unwrap().len() >= 2);
    }

    #[test]
    fn single_player_instances_work() {
        let inst = SetCoverInstance::with_default_labels(1, vec![CoverSet::new([0], rat(5, 3))]);
        let solution = happy_nucleolus(&inst).unwrap();
        assert_eq!(solution.allocation.values, vec![rat(5, 3)]);
        assert!(solution.state.stage_log.is_empty());
    }

    #[test]
    fn coalition_label_rendering() {
        let inst = fig2_instance();
        let c = Coalition::new([0, 1, 3]);
        assert_eq!(inst.coalition_label(&c), "{a,b,d}");
    }
}
