//! Solve reports and excess tables: JSON, human-readable table, CSV.

use happy_nucleolus::model::{Allocation, Coalition, SetCoverInstance};
use happy_nucleolus::oracle::CoalitionTable;
use happy_nucleolus::rational::{decimal_string, Rational};
use happy_nucleolus::solver::HappySolution;
use serde::Serialize;
use std::fmt::Write as _;

const SIG_DIGITS: usize = 15;

#[derive(Serialize)]
pub struct SolveReport {
    pub players: Vec<String>,
    pub allocation: AllocationReport,
    pub lp_value: String,
    pub lp_value_decimal: String,
    pub unique: bool,
    pub stages: serde_json::Value,
    pub sets: Vec<SetReport>,
    pub elapsed_ms: f64,
}

#[derive(Serialize)]
pub struct AllocationReport {
    pub values: Vec<String>,
    pub decimals: Vec<String>,
}

#[derive(Serialize)]
pub struct SetReport {
    pub index: usize,
    pub members: Vec<usize>,
    pub label: String,
    pub cost: String,
    pub allocated: String,
    pub slack: String,
}

impl AllocationReport {
    pub fn new(y: &Allocation) -> Self {
        AllocationReport {
            values: y.values.iter().map(|v| v.to_string()).collect(),
            decimals: y.values.iter().map(|v| decimal_string(v, SIG_DIGITS)).collect(),
        }
    }
}

pub fn solve_report(solution: &HappySolution, elapsed_ms: f64) -> SolveReport {
    let inst = &solution.instance;
    let sets = inst
        .sets
        .iter()
        .enumerate()
        .map(|(index, set)| {
            let allocated = solution.allocation.on(&set.members);
            SetReport {
                index,
                members: set.members.members().to_vec(),
                label: inst.coalition_label(&set.members),
                cost: set.cost.to_string(),
                allocated: allocated.to_string(),
                slack: (&set.cost - &allocated).to_string(),
            }
        })
        .collect();
    SolveReport {
        players: inst.players.clone(),
        allocation: AllocationReport::new(&solution.allocation),
        lp_value: solution.lp_value.to_string(),
        lp_value_decimal: decimal_string(&solution.lp_value, SIG_DIGITS),
        unique: solution.state.unique,
        stages: solution.stage_log_json(),
        sets,
        elapsed_ms,
    }
}

pub fn render_table(report: &SolveReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "allocated total: {} ({})", report.lp_value, report.lp_value_decimal);
    let _ = writeln!(out, "allocation:");
    for (i, player) in report.players.iter().enumerate() {
        let _ = writeln!(
            out,
            "  {:>8}  {:>12}  {}",
            player, report.allocation.values[i], report.allocation.decimals[i]
        );
    }
    let stages = report.stages.as_array().map(|s| s.len()).unwrap_or(0);
    let _ = writeln!(out, "stages: {stages}");
    if let Some(entries) = report.stages.as_array() {
        for (i, entry) in entries.iter().enumerate() {
            let eps = entry["epsilon"].as_str().unwrap_or("?");
            let fixed = entry["fixed"].as_array().map(|f| f.len()).unwrap_or(0);
            let _ = writeln!(out, "  stage {:>2}: slack {:>10}, {} rows fixed", i + 1, eps, fixed);
        }
    }
    let _ = writeln!(out, "tight sets (allocation = cost):");
    let mut any = false;
    for set in &report.sets {
        if set.slack == "0" {
            any = true;
            let _ = writeln!(out, "  {:>3}  {}  cost {}", set.index, set.label, set.cost);
        }
    }
    if !any {
        let _ = writeln!(out, "  (none)");
    }
    let _ = writeln!(out, "elapsed: {:.1} ms", report.elapsed_ms);
    out
}

/// CSV rows `coalition,cover_cost,excess` for every nonempty coalition, in
/// canonical order (size, then members lexicographically).
pub fn full_excess_csv(
    inst: &SetCoverInstance,
    table: &CoalitionTable,
    y: &Allocation,
) -> Result<String, csv::Error> {
    let mut coalitions: Vec<Coalition> = table.coalitions().collect();
    coalitions.sort_by_key(|c| (c.len(), c.members().to_vec()));
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(["coalition", "cover_cost", "excess"])?;
    for c in &coalitions {
        writer.write_record([
            inst.coalition_label(c),
            table.cost(c).to_string(),
            table.excess(y, c).to_string(),
        ])?;
    }
    Ok(String::from_utf8(writer.into_inner().expect("in-memory writer")).expect("utf8"))
}

/// CSV restricted to a family of simple pairs: the cover cost is the pair's
/// set cost, no oracle needed.
pub fn family_excess_csv(
    inst: &SetCoverInstance,
    pairs: &[happy_nucleolus::model::SimplePair],
    y: &Allocation,
) -> Result<String, csv::Error> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(["coalition", "cover_cost", "excess"])?;
    for pair in pairs {
        let cost: &Rational = &inst.sets[pair.set_index].cost;
        writer.write_record([
            inst.coalition_label(&pair.coalition),
            cost.to_string(),
            (cost - y.on(&pair.coalition)).to_string(),
        ])?;
    }
    Ok(String::from_utf8(writer.into_inner().expect("in-memory writer")).expect("utf8"))
}
