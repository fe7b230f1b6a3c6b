//! Exact-rational linear programming.
//!
//! A two-phase primal simplex on the standard-form tableau with Bland's
//! pivoting rule. Everything is computed in arbitrary-precision rational
//! arithmetic, so optimal bases are exact and strong duality holds with
//! equality (this is asserted on every solve).
//!
//! Dual sign conventions, per original row:
//!
//! * sense `Max`: `<=` rows have dual `>= 0`, `>=` rows have dual `<= 0`,
//!   `=` rows have free duals;
//! * sense `Min`: the signs flip (`<=` gives `<= 0`, `>=` gives `>= 0`).
//!
//! In both cases complementary slackness holds exactly and the dual objective
//! `sum_i dual_i * rhs_i` (plus bound terms for shifted lower bounds) equals
//! the primal optimum.
//!
//! LPs with many more rows than variables are solved through their transpose
//! (the explicit dual program), which keeps the tableau narrow; the returned
//! certificate is re-verified against the original program either way.

use crate::model::SetCoverInstance;
use crate::rational::Rational;
use num_traits::{One, Signed, Zero};
use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Max,
    Min,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone)]
pub struct LpRow {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

/// Variable bounds. `lower: Some(0), upper: None` is the default
/// (nonnegative variable); `lower: None, upper: None` is a free variable.
#[derive(Debug, Clone, PartialEq)]
pub struct VarBound {
    pub lower: Option<Rational>,
    pub upper: Option<Rational>,
}

impl Default for VarBound {
    fn default() -> Self {
        VarBound { lower: Some(Rational::zero()), upper: None }
    }
}

impl VarBound {
    pub fn free() -> Self {
        VarBound { lower: None, upper: None }
    }

    fn is_nonnegative(&self) -> bool {
        self.lower.as_ref().is_some_and(|l| l.is_zero()) && self.upper.is_none()
    }

    fn is_free(&self) -> bool {
        self.lower.is_none() && self.upper.is_none()
    }
}

#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub sense: Sense,
    pub objective: Vec<Rational>,
    pub rows: Vec<LpRow>,
    pub bounds: Vec<VarBound>,
}

impl LinearProgram {
    pub fn new(sense: Sense, objective: Vec<Rational>) -> Self {
        let n = objective.len();
        LinearProgram { sense, objective, rows: Vec::new(), bounds: vec![VarBound::default(); n] }
    }

    pub fn n_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_row(&mut self, coeffs: Vec<Rational>, relation: Relation, rhs: Rational) {
        self.rows.push(LpRow { coeffs, relation, rhs });
    }

    pub fn set_free(&mut self, var: usize) {
        self.bounds[var] = VarBound::free();
    }

    fn check_dimensions(&self) -> Result<(), LpError> {
        if self.bounds.len() != self.n_vars() {
            return Err(LpError::DimensionMismatch {
                expected: self.n_vars(),
                found: self.bounds.len(),
                what: "bounds",
            });
        }
        for row in &self.rows {
            if row.coeffs.len() != self.n_vars() {
                return Err(LpError::DimensionMismatch {
                    expected: self.n_vars(),
                    found: row.coeffs.len(),
                    what: "row",
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LpError {
    #[error("malformed {what}: expected width {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize, what: &'static str },
    #[error("internal invariant violated in LP solver: {0}")]
    Internal(String),
}

/// Exact optimum with matching primal and dual solutions.
#[derive(Debug, Clone)]
pub struct LpCertificate {
    pub primal: Vec<Rational>,
    /// One value per row, in the conventions documented at module level.
    pub dual: Vec<Rational>,
    pub objective: Rational,
}

#[derive(Debug, Clone)]
pub enum LpOutcome {
    Optimal(LpCertificate),
    /// No feasible point; `farkas` is the phase-one dual vector, one entry
    /// per row, combining the rows into a contradiction (verified on the
    /// standardized system before being returned).
    Infeasible { farkas: Vec<Rational> },
    /// Feasible but unbounded; `ray` is an improving feasible direction in
    /// the original variables.
    Unbounded { ray: Vec<Rational> },
}

impl LpOutcome {
    pub fn status(&self) -> &'static str {
        match self {
            LpOutcome::Optimal(_) => "optimal",
            LpOutcome::Infeasible { .. } => "infeasible",
            LpOutcome::Unbounded { .. } => "unbounded",
        }
    }

    pub fn into_optimal(self) -> Result<LpCertificate, LpError> {
        match self {
            LpOutcome::Optimal(cert) => Ok(cert),
            other => Err(LpError::Internal(format!("expected optimal LP, got {}", other.status()))),
        }
    }
}

/// Solves an LP exactly, returning an optimum with a verified strong-duality
/// certificate, or a certified infeasibility/unboundedness witness.
pub fn solve(lp: &LinearProgram) -> Result<LpOutcome, LpError> {
    lp.check_dimensions()?;
    // Internally always maximize.
    let flipped_sense = lp.sense == Sense::Min;
    let max_lp = if flipped_sense {
        let mut neg = lp.clone();
        neg.sense = Sense::Max;
        for c in &mut neg.objective {
            *c = -c.clone();
        }
        neg
    } else {
        lp.clone()
    };

    let mut outcome = solve_max(&max_lp)?;
    if flipped_sense {
        outcome = match outcome {
            LpOutcome::Optimal(mut cert) => {
                cert.objective = -cert.objective;
                for d in &mut cert.dual {
                    *d = -d.clone();
                }
                LpOutcome::Optimal(cert)
            }
            other => other,
        };
    }
    if let LpOutcome::Optimal(cert) = &outcome {
        verify_optimal(lp, cert)?;
    }
    Ok(outcome)
}

/// Row/variable threshold beyond which the transpose is solved instead.
const TRANSPOSE_MIN_ROWS: usize = 48;

fn solve_max(lp: &LinearProgram) -> Result<LpOutcome, LpError> {
    let eligible = lp.bounds.iter().all(|b| b.is_nonnegative() || b.is_free());
    if eligible && lp.rows.len() >= TRANSPOSE_MIN_ROWS && lp.rows.len() >= 3 * lp.n_vars().max(1) {
        if let Some(outcome) = solve_via_transpose(lp)? {
            return Ok(outcome);
        }
    }
    Simplex::build(lp)?.run()
}

/// Solves `max c x : Ax rel b` through its dual `min u b : u A rel' c`,
/// which has one row per variable. Only used when every variable is
/// nonnegative-or-free. Returns `None` when the transpose solve does not
/// yield an optimum (the caller then falls back to the direct path).
fn solve_via_transpose(lp: &LinearProgram) -> Result<Option<LpOutcome>, LpError> {
    let m = lp.rows.len();
    let n = lp.n_vars();
    // Orient every inequality as `<=` so all dual variables are >= 0 or free.
    let mut flip = vec![false; m];
    let mut dual = LinearProgram::new(
        Sense::Min,
        lp.rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                if row.relation == Relation::Ge {
                    flip[i] = true;
                    -row.rhs.clone()
                } else {
                    row.rhs.clone()
                }
            })
            .collect(),
    );
    for (i, row) in lp.rows.iter().enumerate() {
        if row.relation == Relation::Eq {
            dual.set_free(i);
        }
    }
    for j in 0..n {
        let coeffs: Vec<Rational> = lp
            .rows
            .iter()
            .enumerate()
            .map(|(i, row)| if flip[i] { -row.coeffs[j].clone() } else { row.coeffs[j].clone() })
            .collect();
        let relation =
            if lp.bounds[j].is_free() { Relation::Eq } else { Relation::Ge };
        dual.add_row(coeffs, relation, lp.objective[j].clone());
    }

    let outcome = Simplex::build(&dual)?.run()?;
    let dual_cert = match outcome {
        LpOutcome::Optimal(cert) => cert,
        // Dual infeasible/unbounded: fall back for proper primal certificates.
        _ => return Ok(None),
    };
    // min of the dual (negated inside `run` handling? no: dual built as Min).
    let primal: Vec<Rational> = dual_cert.dual.clone();
    let mut duals: Vec<Rational> = dual_cert.primal;
    for (i, f) in flip.iter().enumerate() {
        if *f {
            duals[i] = -duals[i].clone();
        }
    }
    Ok(Some(LpOutcome::Optimal(LpCertificate {
        primal,
        dual: duals,
        objective: dual_cert.objective,
    })))
}

// ---------------------------------------------------------------------------
// Standard-form tableau simplex
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ColKind {
    /// Column for an original variable (possibly shifted by its lower bound);
    /// `sign` is -1 for the negative half of a split free variable.
    Structural { var: usize, negative: bool },
    Slack,
    Artificial,
}

enum VarMap {
    /// x = lower + column value.
    Shifted { col: usize, lower: Rational },
    /// x = pos - neg.
    Split { pos: usize, neg: usize },
}

struct Simplex {
    /// Constraint rows, each `n_cols` coefficients plus the rhs.
    rows: Vec<Vec<Rational>>,
    n_cols: usize,
    col_kind: Vec<ColKind>,
    /// Phase-two objective per column (artificials are zero).
    objective: Vec<Rational>,
    /// Reduced-cost row `c - c_B B^-1 A` for the current phase.
    reduced: Vec<Rational>,
    /// Cost vector of the current phase (used to evaluate the objective).
    phase_cost: Vec<Rational>,
    basis: Vec<usize>,
    in_basis: Vec<bool>,
    artificial_of_row: Vec<usize>,
    row_flip: Vec<bool>,
    /// Number of rows of the caller's program; extra_rows for upper bounds
    /// follow them and are not reported.
    n_original_rows: usize,
    var_map: Vec<VarMap>,
    objective_offset: Rational,
    banned: Vec<bool>,
}

impl Simplex {
    fn build(lp: &LinearProgram) -> Result<Simplex, LpError> {
        let n = lp.n_vars();
        let mut col_kind: Vec<ColKind> = Vec::new();
        let mut var_map: Vec<VarMap> = Vec::with_capacity(n);
        let mut objective_offset = Rational::zero();
        // Upper bounds become extra rows after the lower-bound shift.
        let mut extra_rows: Vec<LpRow> = Vec::new();

        for (j, bound) in lp.bounds.iter().enumerate() {
            match (&bound.lower, &bound.upper) {
                (Some(l), upper) => {
                    let col = col_kind.len();
                    col_kind.push(ColKind::Structural { var: j, negative: false });
                    var_map.push(VarMap::Shifted { col, lower: l.clone() });
                    objective_offset += &lp.objective[j] * l;
                    if let Some(u) = upper {
                        let mut coeffs = vec![Rational::zero(); n];
                        coeffs[j] = Rational::one();
                        extra_rows.push(LpRow { coeffs, relation: Relation::Le, rhs: u.clone() });
                    }
                }
                (None, None) => {
                    let pos = col_kind.len();
                    col_kind.push(ColKind::Structural { var: j, negative: false });
                    col_kind.push(ColKind::Structural { var: j, negative: true });
                    var_map.push(VarMap::Split { pos, neg: pos + 1 });
                }
                (None, Some(u)) => {
                    // x <= u, no lower bound: substitute x = u - w with w >= 0.
                    let col = col_kind.len();
                    col_kind.push(ColKind::Structural { var: j, negative: true });
                    var_map.push(VarMap::Shifted { col, lower: u.clone() });
                    objective_offset += &lp.objective[j] * u;
                }
            }
        }
        let n_structural = col_kind.len();

        let all_rows: Vec<&LpRow> = lp.rows.iter().chain(extra_rows.iter()).collect();
        let m = all_rows.len();
        let mut n_slacks = 0usize;
        for row in &all_rows {
            if row.relation != Relation::Eq {
                n_slacks += 1;
            }
        }
        let n_cols = n_structural + n_slacks + m;
        for _ in 0..n_slacks {
            col_kind.push(ColKind::Slack);
        }
        for _ in 0..m {
            col_kind.push(ColKind::Artificial);
        }

        // Assemble rows in column space; rhs adjusted for shifted variables.
        let mut rows: Vec<Vec<Rational>> = Vec::with_capacity(m);
        let mut row_flip = vec![false; m];
        let mut artificial_of_row = vec![0usize; m];
        let mut slack_idx = 0usize;
        for (i, row) in all_rows.iter().enumerate() {
            let mut r = vec![Rational::zero(); n_cols + 1];
            let mut rhs = row.rhs.clone();
            for (j, map) in var_map.iter().enumerate() {
                let a = &row.coeffs[j];
                if a.is_zero() {
                    continue;
                }
                match map {
                    VarMap::Shifted { col, lower } => {
                        let negative = matches!(col_kind[*col], ColKind::Structural { negative: true, .. });
                        r[*col] = if negative { -a.clone() } else { a.clone() };
                        rhs -= a * lower;
                    }
                    VarMap::Split { pos, neg } => {
                        r[*pos] = a.clone();
                        r[*neg] = -a.clone();
                    }
                }
            }
            match row.relation {
                Relation::Le => {
                    r[n_structural + slack_idx] = Rational::one();
                    slack_idx += 1;
                }
                Relation::Ge => {
                    r[n_structural + slack_idx] = -Rational::one();
                    slack_idx += 1;
                }
                Relation::Eq => {}
            }
            if rhs.is_negative() {
                row_flip[i] = true;
                for c in r.iter_mut() {
                    *c = -c.clone();
                }
                rhs = -rhs;
            }
            let art = n_structural + n_slacks + i;
            r[art] = Rational::one();
            artificial_of_row[i] = art;
            r[n_cols] = rhs;
            rows.push(r);
        }

        let mut objective = vec![Rational::zero(); n_cols];
        for (j, map) in var_map.iter().enumerate() {
            let c = &lp.objective[j];
            match map {
                VarMap::Shifted { col, .. } => {
                    let negative = matches!(col_kind[*col], ColKind::Structural { negative: true, .. });
                    objective[*col] = if negative { -c.clone() } else { c.clone() };
                }
                VarMap::Split { pos, neg } => {
                    objective[*pos] = c.clone();
                    objective[*neg] = -c.clone();
                }
            }
        }

        let basis: Vec<usize> = artificial_of_row.clone();
        let mut in_basis = vec![false; n_cols];
        for &b in &basis {
            in_basis[b] = true;
        }

        Ok(Simplex {
            rows,
            n_cols,
            col_kind,
            objective,
            reduced: Vec::new(),
            phase_cost: Vec::new(),
            basis,
            in_basis,
            artificial_of_row,
            row_flip,
            n_original_rows: lp.rows.len(),
            var_map,
            objective_offset,
            banned: vec![false; n_cols],
        })
    }

    /// Recomputes the reduced-cost row for the given phase objective.
    fn load_objective(&mut self, c: Vec<Rational>) {
        let mut reduced = c.clone();
        for (i, row) in self.rows.iter().enumerate() {
            let cb = &c[self.basis[i]];
            if cb.is_zero() {
                continue;
            }
            for j in 0..self.n_cols {
                if !row[j].is_zero() {
                    reduced[j] -= cb * &row[j];
                }
            }
        }
        self.reduced = reduced;
        self.phase_cost = c;
    }

    /// Objective value `c_B B^-1 b` of the current basis under the current
    /// phase costs.
    fn current_value(&self) -> Rational {
        self.basis
            .iter()
            .zip(&self.rows)
            .map(|(&b, row)| &self.phase_cost[b] * &row[self.n_cols])
            .sum()
    }

    fn pivot(&mut self, pivot_row: usize, pivot_col: usize) {
        let pivot = self.rows[pivot_row][pivot_col].clone();
        debug_assert!(!pivot.is_zero());
        if !pivot.is_one() {
            for c in self.rows[pivot_row].iter_mut() {
                if !c.is_zero() {
                    *c /= &pivot;
                }
            }
        }
        let prow = std::mem::take(&mut self.rows[pivot_row]);
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == pivot_row {
                continue;
            }
            let factor = row[pivot_col].clone();
            if factor.is_zero() {
                continue;
            }
            for (c, p) in row.iter_mut().zip(prow.iter()) {
                if !p.is_zero() {
                    *c -= &factor * p;
                }
            }
            row[pivot_col] = Rational::zero();
        }
        let factor = self.reduced[pivot_col].clone();
        if !factor.is_zero() {
            for (c, p) in self.reduced.iter_mut().zip(prow.iter()) {
                if !p.is_zero() {
                    *c -= &factor * p;
                }
            }
            self.reduced[pivot_col] = Rational::zero();
        }
        self.rows[pivot_row] = prow;
        self.in_basis[self.basis[pivot_row]] = false;
        self.basis[pivot_row] = pivot_col;
        self.in_basis[pivot_col] = true;
    }

    /// Bland's rule: entering column is the lowest-index improving column;
    /// the leaving row breaks ratio ties by the lowest basic column index.
    /// Returns `None` at optimality, `Some(Err(col))` when unbounded in `col`.
    fn bland_step(&mut self) -> Option<Result<(), usize>> {
        let entering = (0..self.n_cols).find(|&j| {
            !self.in_basis[j] && !self.banned[j] && self.reduced[j].is_positive()
        })?;
        let mut leaving: Option<usize> = None;
        for i in 0..self.rows.len() {
            if !self.rows[i][entering].is_positive() {
                continue;
            }
            leaving = Some(match leaving {
                None => i,
                Some(best) => {
                    let cand = &self.rows[i][self.n_cols] / &self.rows[i][entering];
                    let incumbent = &self.rows[best][self.n_cols] / &self.rows[best][entering];
                    match cand.cmp(&incumbent) {
                        std::cmp::Ordering::Less => i,
                        std::cmp::Ordering::Greater => best,
                        std::cmp::Ordering::Equal => {
                            if self.basis[i] < self.basis[best] {
                                i
                            } else {
                                best
                            }
                        }
                    }
                }
            });
        }
        match leaving {
            Some(row) => {
                self.pivot(row, entering);
                Some(Ok(()))
            }
            None => Some(Err(entering)),
        }
    }

    fn run(mut self) -> Result<LpOutcome, LpError> {
        // Phase one: maximize minus the sum of artificials.
        let phase1: Vec<Rational> = self
            .col_kind
            .iter()
            .map(|k| if *k == ColKind::Artificial { -Rational::one() } else { Rational::zero() })
            .collect();
        self.load_objective(phase1);
        loop {
            match self.bland_step() {
                None => break,
                Some(Ok(())) => {}
                Some(Err(_)) => {
                    return Err(LpError::Internal("phase one cannot be unbounded".into()));
                }
            }
        }
        if self.current_value().is_negative() {
            return Ok(LpOutcome::Infeasible { farkas: self.extract_farkas()? });
        }

        // Feasible. Pivot out any artificial still basic at zero, then ban
        // artificials from re-entering.
        for i in 0..self.rows.len() {
            if self.col_kind[self.basis[i]] == ColKind::Artificial {
                debug_assert!(self.rows[i][self.n_cols].is_zero());
                let replacement = (0..self.n_cols).find(|&j| {
                    self.col_kind[j] != ColKind::Artificial
                        && !self.in_basis[j]
                        && !self.rows[i][j].is_zero()
                });
                if let Some(j) = replacement {
                    self.pivot(i, j);
                }
            }
        }
        for j in 0..self.n_cols {
            if self.col_kind[j] == ColKind::Artificial {
                self.banned[j] = true;
            }
        }

        // Phase two.
        let phase2 = self.objective.clone();
        self.load_objective(phase2);
        loop {
            match self.bland_step() {
                None => break,
                Some(Ok(())) => {}
                Some(Err(col)) => {
                    return Ok(LpOutcome::Unbounded { ray: self.extract_ray(col) });
                }
            }
        }
        self.extract_optimal()
    }

    fn column_values(&self) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); self.n_cols];
        for (i, &b) in self.basis.iter().enumerate() {
            x[b] = self.rows[i][self.n_cols].clone();
        }
        x
    }

    fn to_original_vars(&self, cols: &[Rational]) -> Vec<Rational> {
        self.var_map
            .iter()
            .map(|map| match map {
                VarMap::Shifted { col, lower } => match self.col_kind[*col] {
                    ColKind::Structural { negative: true, .. } => lower - &cols[*col],
                    _ => lower + &cols[*col],
                },
                VarMap::Split { pos, neg } => &cols[*pos] - &cols[*neg],
            })
            .collect()
    }

    /// Row duals `c_B B^-1`, read from the reduced-cost row at the artificial
    /// columns (they held the initial identity). Only the original rows are
    /// reported; upper-bound rows are internal.
    fn row_duals(&self, n_original_rows: usize) -> Vec<Rational> {
        (0..n_original_rows)
            .map(|i| {
                let u = -self.reduced[self.artificial_of_row[i]].clone();
                if self.row_flip[i] {
                    -u
                } else {
                    u
                }
            })
            .collect()
    }

    fn extract_optimal(self) -> Result<LpOutcome, LpError> {
        let cols = self.column_values();
        // Sanity checks on the final tableau: nonnegative basics, artificials
        // at zero, no improving columns, column-wise complementary slackness.
        for x in &cols {
            if x.is_negative() {
                return Err(LpError::Internal("negative basic value".into()));
            }
        }
        for j in 0..self.n_cols {
            if self.col_kind[j] == ColKind::Artificial {
                if !cols[j].is_zero() {
                    return Err(LpError::Internal("artificial variable left positive".into()));
                }
                continue;
            }
            if self.reduced[j].is_positive() {
                return Err(LpError::Internal("positive reduced cost at optimum".into()));
            }
            if !cols[j].is_zero() && !self.reduced[j].is_zero() {
                return Err(LpError::Internal("complementary slackness violated".into()));
            }
        }
        let primal = self.to_original_vars(&cols);
        let dual = self.row_duals(self.n_original_rows);
        let objective = self.current_value() + &self.objective_offset;
        Ok(LpOutcome::Optimal(LpCertificate { primal, dual, objective }))
    }

    fn extract_ray(&self, entering: usize) -> Vec<Rational> {
        let mut d = vec![Rational::zero(); self.n_cols];
        d[entering] = Rational::one();
        for (i, &b) in self.basis.iter().enumerate() {
            d[b] = -self.rows[i][entering].clone();
        }
        // Direction only: lower-bound shifts do not apply.
        self.var_map
            .iter()
            .map(|map| match map {
                VarMap::Shifted { col, .. } => match self.col_kind[*col] {
                    ColKind::Structural { negative: true, .. } => -d[*col].clone(),
                    _ => d[*col].clone(),
                },
                VarMap::Split { pos, neg } => &d[*pos] - &d[*neg],
            })
            .collect()
    }

    /// Farkas vector from the phase-one duals. With phase-one costs of 0 on
    /// non-artificial columns, the reduced cost there equals `-u A_j`, so
    /// phase-one optimality (`reduced <= 0`) gives `v A_j <= 0` for
    /// `v = -u`, while `v b = -value > 0`. Both facts are re-checked here.
    fn extract_farkas(&self) -> Result<Vec<Rational>, LpError> {
        let m = self.rows.len();
        // Phase-one artificial cost is -1, so u_i = -1 - reduced[art_i] and
        // v_i = -u_i = 1 + reduced[art_i].
        let v: Vec<Rational> = (0..m)
            .map(|i| Rational::one() + &self.reduced[self.artificial_of_row[i]])
            .collect();
        if !(-self.current_value()).is_positive() {
            return Err(LpError::Internal("farkas certificate failed: v b <= 0".into()));
        }
        for j in 0..self.n_cols {
            if self.col_kind[j] != ColKind::Artificial && self.reduced[j].is_positive() {
                return Err(LpError::Internal("farkas certificate failed: v A_j > 0".into()));
            }
        }
        let out: Vec<Rational> = (0..self.n_original_rows)
            .map(|i| if self.row_flip[i] { -v[i].clone() } else { v[i].clone() })
            .collect();
        Ok(out)
    }
}

/// Independent verification of an optimal certificate against the original
/// program: exact primal feasibility, dual sign conditions, complementary
/// slackness and a zero duality gap.
fn verify_optimal(lp: &LinearProgram, cert: &LpCertificate) -> Result<(), LpError> {
    let n = lp.n_vars();
    if cert.primal.len() != n || cert.dual.len() != lp.rows.len() {
        return Err(LpError::Internal("certificate has wrong dimensions".into()));
    }
    let fail = |msg: &str| Err(LpError::Internal(format!("certificate verification: {msg}")));

    // Primal feasibility.
    for (j, b) in lp.bounds.iter().enumerate() {
        if let Some(l) = &b.lower {
            if &cert.primal[j] < l {
                return fail("primal below lower bound");
            }
        }
        if let Some(u) = &b.upper {
            if &cert.primal[j] > u {
                return fail("primal above upper bound");
            }
        }
    }
    let mut activities: Vec<Rational> = Vec::with_capacity(lp.rows.len());
    for row in &lp.rows {
        let act: Rational = row.coeffs.iter().zip(&cert.primal).map(|(a, x)| a * x).sum();
        let ok = match row.relation {
            Relation::Le => act <= row.rhs,
            Relation::Eq => act == row.rhs,
            Relation::Ge => act >= row.rhs,
        };
        if !ok {
            return fail("primal violates a row");
        }
        activities.push(act);
    }
    let primal_obj: Rational =
        lp.objective.iter().zip(&cert.primal).map(|(c, x)| c * x).sum();
    if primal_obj != cert.objective {
        return fail("stated objective does not match the primal point");
    }

    // Dual signs and complementary slackness on rows.
    for (i, row) in lp.rows.iter().enumerate() {
        let u = &cert.dual[i];
        let sign_ok = match (lp.sense, row.relation) {
            (_, Relation::Eq) => true,
            (Sense::Max, Relation::Le) | (Sense::Min, Relation::Ge) => !u.is_negative(),
            (Sense::Max, Relation::Ge) | (Sense::Min, Relation::Le) => !u.is_positive(),
        };
        if !sign_ok {
            return fail("dual sign condition violated");
        }
        if !u.is_zero() && activities[i] != row.rhs {
            return fail("complementary slackness violated on a row");
        }
    }

    // Dual feasibility on variables (reduced costs against bounds) and the
    // duality gap including bound contributions.
    let mut dual_obj: Rational =
        cert.dual.iter().zip(&lp.rows).map(|(u, r)| u * &r.rhs).sum();
    for (j, bound) in lp.bounds.iter().enumerate() {
        let ua: Rational = cert.dual.iter().zip(&lp.rows).map(|(u, r)| u * &r.coeffs[j]).sum();
        let reduced = &lp.objective[j] - &ua;
        // For Max: at lower bound requires reduced <= 0, at upper requires
        // reduced >= 0, free requires reduced == 0. Min flips the signs.
        let r = match lp.sense {
            Sense::Max => reduced.clone(),
            Sense::Min => -reduced.clone(),
        };
        let at_lower = bound.lower.as_ref().is_some_and(|l| &cert.primal[j] == l);
        let at_upper = bound.upper.as_ref().is_some_and(|u| &cert.primal[j] == u);
        let interior_ok = r.is_zero();
        let ok = interior_ok
            || (at_lower && r.is_negative())
            || (at_upper && r.is_positive());
        if !ok {
            return fail("dual feasibility / variable complementarity violated");
        }
        if !reduced.is_zero() {
            let bound_value = if at_lower {
                bound.lower.clone().unwrap()
            } else {
                bound.upper.clone().unwrap()
            };
            dual_obj += &reduced * &bound_value;
        }
    }
    if dual_obj != cert.objective {
        return fail("strong duality gap is nonzero");
    }
    Ok(())
}

/// CSV dump of an LP (one line per row), for troubleshooting.
#[allow(dead_code)]
pub(crate) fn debug_csv(lp: &LinearProgram) -> String {
    let mut out = String::new();
    for row in &lp.rows {
        for c in &row.coeffs {
            let _ = write!(out, "{c},");
        }
        let rel = match row.relation {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        };
        let _ = writeln!(out, "{rel},{}", row.rhs);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FractionalCoverError {
    #[error("fractional cover LP is infeasible (some player cannot be covered)")]
    Infeasible,
    #[error("fractional cover LP is unbounded (negative set costs?)")]
    Unbounded,
    #[error(transparent)]
    Lp(#[from] LpError),
}

/// The optimum value of the fractional set-cover relaxation: the minimum of
/// `sum_T c(T) x_T` over `x >= 0` covering every player at least once. This
/// is exactly the largest total that can be allocated under group rationality.
pub fn fractional_cover_value(inst: &SetCoverInstance) -> Result<Rational, FractionalCoverError> {
    Ok(fractional_cover_certificate(inst)?.objective)
}

/// Full certificate for the fractional cover LP. The dual values (one per
/// player) form a maximal group-rational allocation.
pub fn fractional_cover_certificate(
    inst: &SetCoverInstance,
) -> Result<LpCertificate, FractionalCoverError> {
    let n = inst.n_players();
    let m = inst.sets.len();
    let mut lp = LinearProgram::new(Sense::Min, inst.sets.iter().map(|s| s.cost.clone()).collect());
    for p in 0..n {
        let coeffs: Vec<Rational> = (0..m)
            .map(|t| {
                if inst.sets[t].members.contains(p) {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            })
            .collect();
        lp.add_row(coeffs, Relation::Ge, Rational::one());
    }
    match solve(&lp)? {
        LpOutcome::Optimal(cert) => Ok(cert),
        LpOutcome::Infeasible { .. } => Err(FractionalCoverError::Infeasible),
        LpOutcome::Unbounded { .. } => Err(FractionalCoverError::Unbounded),
    }
}
