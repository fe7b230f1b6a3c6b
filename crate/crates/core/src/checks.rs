//! Verification suites over a single instance: solver-versus-oracle
//! equality, symmetry under instance automorphisms, stability under extra
//! sampled pairs, and per-pair minimality of the explicit family under
//! adversarial costs. The command-line `check` subcommand and the
//! integration tests both run these.

use crate::families::{self, FamilyError};
use crate::generators::{self, GeneratorError};
use crate::model::SetCoverInstance;
use crate::oracle::{self, OracleError, OracleLimits};
use crate::solver::{self, SolveError};
use itertools::Itertools;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckMode {
    /// Production solver equals the full-coalition brute force.
    Oracle,
    /// Instance automorphisms leave the allocation invariant.
    Symmetry,
    /// Appending sampled simple pairs to the explicit family does not move
    /// the result.
    Superset,
    /// Dropping any single pair of the explicit family changes the result
    /// under that pair's adversarial cost function.
    Minimality,
}

impl CheckMode {
    pub fn name(&self) -> &'static str {
        match self {
            CheckMode::Oracle => "oracle",
            CheckMode::Symmetry => "symmetry",
            CheckMode::Superset => "superset",
            CheckMode::Minimality => "minimality",
        }
    }
}

#[derive(Debug, Clone)]
pub struct CheckReport {
    pub mode: CheckMode,
    pub passed: bool,
    pub details: Vec<String>,
}

impl CheckReport {
    fn new(mode: CheckMode) -> Self {
        CheckReport { mode, passed: true, details: Vec::new() }
    }

    fn pass(&mut self, msg: impl Into<String>) {
        self.details.push(format!("ok: {}", msg.into()));
    }

    fn fail(&mut self, msg: impl Into<String>) {
        self.passed = false;
        self.details.push(format!("FAIL: {}", msg.into()));
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CheckError {
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Generator(#[from] GeneratorError),
    #[error("instance with {n} players exceeds the {what} capacity of {limit}")]
    Capacity { n: usize, limit: usize, what: &'static str },
}

impl CheckError {
    /// Whether the failure is a capacity limit rather than a property issue.
    pub fn is_capacity(&self) -> bool {
        matches!(
            self,
            CheckError::Capacity { .. }
                | CheckError::Oracle(OracleError::Capacity { .. })
                | CheckError::Family(FamilyError::TooLarge { .. })
                | CheckError::Family(FamilyError::Oracle(OracleError::Capacity { .. }))
        )
    }
}

/// Solver output equals the brute-force reference exactly.
pub fn check_oracle(
    inst: &SetCoverInstance,
    limits: &OracleLimits,
) -> Result<CheckReport, CheckError> {
    let mut report = CheckReport::new(CheckMode::Oracle);
    let solution = solver::happy_nucleolus(inst)?;
    let reference = oracle::happy_nucleolus_bruteforce(inst, limits)?;
    if solution.allocation == reference {
        report.pass(format!(
            "solver and full-coalition brute force agree on all {} players",
            inst.n_players()
        ));
    } else {
        report.fail(format!(
            "solver {:?} differs from brute force {:?}",
            solution.allocation.values, reference.values
        ));
    }
    Ok(report)
}

/// All player permutations preserving the set system and costs. Exponential;
/// guarded at 9 players.
pub fn automorphisms(inst: &SetCoverInstance) -> Result<Vec<Vec<usize>>, CheckError> {
    let n = inst.n_players();
    if n > 9 {
        return Err(CheckError::Capacity { n, limit: 9, what: "automorphism enumeration" });
    }
    fn canonical(
        inst: &SetCoverInstance,
        perm: &[usize],
    ) -> Vec<(Vec<usize>, crate::rational::Rational)> {
        let mut sets: Vec<(Vec<usize>, crate::rational::Rational)> = inst
            .sets
            .iter()
            .map(|s| {
                let mut members: Vec<usize> = s.members.iter().map(|p| perm[p]).collect();
                members.sort_unstable();
                (members, s.cost.clone())
            })
            .collect();
        sets.sort();
        sets
    }
    let identity: Vec<usize> = (0..n).collect();
    let reference = canonical(inst, &identity);
    Ok((0..n)
        .permutations(n)
        .filter(|perm| canonical(inst, perm) == reference)
        .collect())
}

/// The allocation is invariant under every instance automorphism.
pub fn check_symmetry(inst: &SetCoverInstance) -> Result<CheckReport, CheckError> {
    let mut report = CheckReport::new(CheckMode::Symmetry);
    let solution = solver::happy_nucleolus(inst)?;
    let y = &solution.allocation.values;
    let autos = automorphisms(&solution.instance)?;
    let mut nontrivial = 0usize;
    for perm in &autos {
        if perm.iter().enumerate().all(|(p, &q)| p == q) {
            continue;
        }
        nontrivial += 1;
        for (p, &q) in perm.iter().enumerate() {
            if y[p] != y[q] {
                report.fail(format!(
                    "automorphism {:?} maps player {p} to {q} but allocations differ",
                    perm
                ));
                return Ok(report);
            }
        }
    }
    report.pass(format!("{nontrivial} nontrivial automorphisms leave the allocation invariant"));
    Ok(report)
}

/// Appending sampled extra simple pairs to the explicit family leaves the
/// result unchanged.
pub fn check_superset(
    inst: &SetCoverInstance,
    extra_count: usize,
    seed: u64,
) -> Result<CheckReport, CheckError> {
    let mut report = CheckReport::new(CheckMode::Superset);
    let solution = solver::happy_nucleolus(inst)?;
    let family = families::build_c_star(&solution.instance)?;
    let extras = families::sample_simple_pairs(&solution.instance, extra_count, seed);
    let extended = family.extended_with(&extras.pairs);
    let y = solver::lexmax_over_family(&solution.instance, &extended, true)?.allocation;
    if y == solution.allocation {
        report.pass(format!(
            "result stable after appending {} sampled pairs (seed {seed})",
            extended.len() - family.len()
        ));
    } else {
        report.fail(format!(
            "adding {} sampled pairs moved the result from {:?} to {:?}",
            extended.len() - family.len(),
            solution.allocation.values,
            y.values
        ));
    }
    Ok(report)
}

/// Row budget for expanding all simple pairs in the minimality check.
const MAX_SIMPLE_ROWS: usize = 1 << 14;

/// For every pair of the explicit family: under that pair's adversarial
/// cost function, the lexicographic optimum over all simple pairs minus the
/// pair differs from the true allocation. Requires the complement condition
/// and oracle-scale instances.
pub fn check_minimality(
    inst: &SetCoverInstance,
    limits: &OracleLimits,
) -> Result<CheckReport, CheckError> {
    let mut report = CheckReport::new(CheckMode::Minimality);
    let n = inst.n_players();
    if n > limits.max_table_n {
        return Err(CheckError::Capacity {
            n,
            limit: limits.max_table_n,
            what: "minimality check",
        });
    }
    let (instance, _) = inst.normalized();
    let family = families::build_c_star(&instance)?;
    let mut tested = 0usize;
    for pair in &family.pairs {
        let adversarial = generators::adversarial_costs(&instance, pair)?;
        let costed = adversarial.apply(&instance);
        let truth = solver::happy_nucleolus(&costed)?;
        // Cross-check the construction against the brute force.
        let reference = oracle::happy_nucleolus_bruteforce(&costed, limits)?;
        if truth.allocation != reference {
            report.fail(format!(
                "solver/brute-force mismatch under adversarial costs for ({}, set {})",
                instance.coalition_label(&pair.coalition),
                pair.set_index
            ));
            return Ok(report);
        }
        let simple = families::build_c_simple(&costed, MAX_SIMPLE_ROWS)?;
        let crippled = simple.without(pair);
        if crippled.len() + 1 != simple.len() {
            report.fail(format!(
                "pair ({}, set {}) not found among the simple pairs",
                instance.coalition_label(&pair.coalition),
                pair.set_index
            ));
            return Ok(report);
        }
        let y = solver::lexmax_over_family(&costed, &crippled, false)?.allocation;
        if y == truth.allocation {
            report.fail(format!(
                "dropping ({}, set {}) did not change the optimum",
                instance.coalition_label(&pair.coalition),
                pair.set_index
            ));
            return Ok(report);
        }
        tested += 1;
    }
    report.pass(format!(
        "all {tested} pairs of the explicit family are indispensable under adversarial costs"
    ));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::CoverSet;
    use crate::rational::int;
    use crate::testkit::{fig1_instance, fig2_instance};

    fn limits() -> OracleLimits {
        OracleLimits::default()
    }

    #[test]
    fn oracle_check_passes_on_the_fixtures() {
        assert!(check_oracle(&fig1_instance(), &limits()).unwrap().passed);
        assert!(check_oracle(&fig2_instance(), &limits()).unwrap().passed);
    }

    #[test]
    fn symmetry_check_sees_the_branch_swap() {
        // Customers a and b are interchangeable in the two-branch instance.
        let report = check_symmetry(&fig1_instance()).unwrap();
        assert!(report.passed, "{:?}", report.details);
        let autos = automorphisms(&fig1_instance().normalized().0).unwrap();
        assert!(autos.len() >= 2, "expected the a<->b swap, got {}", autos.len());
    }

    #[test]
    fn symmetry_check_passes_on_fully_symmetric_instances() {
        let inst = SetCoverInstance::with_default_labels(
            3,
            vec![
                CoverSet::new([0], int(2)),
                CoverSet::new([1], int(2)),
                CoverSet::new([2], int(2)),
            ],
        );
        let report = check_symmetry(&inst).unwrap();
        assert!(report.passed);
        assert_eq!(automorphisms(&inst).unwrap().len(), 6);
    }

    #[test]
    fn superset_check_is_stable_on_fixtures() {
        for seed in [1, 2, 3] {
            let report = check_superset(&fig2_instance(), 15, seed).unwrap();
            assert!(report.passed, "{:?}", report.details);
        }
    }

    #[test]
    fn minimality_check_on_a_singleton_rich_system() {
        // All singletons plus two overlapping sets; n = 4 keeps the run fast.
        let inst = SetCoverInstance::with_default_labels(
            4,
            vec![
                CoverSet::new([0], int(1)),
                CoverSet::new([1], int(1)),
                CoverSet::new([2], int(1)),
                CoverSet::new([3], int(1)),
                CoverSet::new([0, 1], int(1)),
                CoverSet::new([1, 2, 3], int(1)),
            ],
        );
        let report = check_minimality(&inst, &limits()).unwrap();
        assert!(report.passed, "{:?}", report.details);
    }

    #[test]
    fn minimality_check_requires_the_complement_condition() {
        let triangle =
            crate::generators::triangle_instance(int(3), int(4), int(6)).unwrap();
        assert!(matches!(
            check_minimality(&triangle, &limits()),
            Err(CheckError::Generator(GeneratorError::ComplementCondition(_)))
        ));
    }

    #[test]
    fn capacity_errors_are_recognizable() {
        let err = CheckError::Capacity { n: 15, limit: 12, what: "x" };
        assert!(err.is_capacity());
        let other: CheckError = SolveError::Internal("x".into()).into();
        assert!(!other.is_capacity());
    }
}
