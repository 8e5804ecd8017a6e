//! Death milestones, lifetime, and relative improvement between strategies.

use crate::error::{domain_err, Error, Result};
use crate::scalar::Scalar;
use crate::sim::SimulationResult;

/// Percentages of the population used as milestones at 100 nodes.
pub const MILESTONE_PERCENTS: [usize; 12] = [1, 10, 20, 30, 40, 50, 60, 70, 80, 90, 95, 100];

/// `ceil(node_count * pct / 100)` for each milestone percentage, deduplicated.
pub fn default_milestones(node_count: usize) -> Vec<usize> {
    let mut out: Vec<usize> = MILESTONE_PERCENTS
        .iter()
        .map(|&pct| (node_count * pct).div_ceil(100).max(1))
        .collect();
    out.dedup();
    out
}

/// Round index at which the k-th death had occurred, for each milestone k.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MilestoneTable {
    pub milestones: Vec<usize>,
    /// Parallel to `milestones`; `None` when the run ended first.
    pub round_at: Vec<Option<u64>>,
}

impl MilestoneTable {
    /// Builds a table from death rounds in any order.
    pub fn from_death_rounds(
        death_rounds: &[u64],
        node_count: usize,
        milestones: &[usize],
    ) -> Result<Self> {
        validate_milestones(milestones, node_count)?;
        let mut sorted = death_rounds.to_vec();
        sorted.sort_unstable();
        let round_at = milestones
            .iter()
            .map(|&k| sorted.get(k - 1).copied())
            .collect();
        Ok(Self {
            milestones: milestones.to_vec(),
            round_at,
        })
    }

    pub fn get(&self, milestone: usize) -> Option<u64> {
        self.milestones
            .iter()
            .position(|&k| k == milestone)
            .and_then(|i| self.round_at[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, Option<u64>)> + '_ {
        self.milestones
            .iter()
            .copied()
            .zip(self.round_at.iter().copied())
    }

    pub fn is_complete(&self) -> bool {
        self.round_at.iter().all(Option::is_some)
    }
}

fn validate_milestones(milestones: &[usize], node_count: usize) -> Result<()> {
    if milestones.is_empty() {
        return Err(domain_err("death_milestones", "milestone list is empty"));
    }
    if let Some(&k) = milestones.iter().find(|&&k| k == 0 || k > node_count) {
        return Err(domain_err(
            "death_milestones",
            format!("milestone {k} outside [1, {node_count}]"),
        ));
    }
    if milestones.windows(2).any(|w| w[0] >= w[1]) {
        return Err(domain_err(
            "death_milestones",
            "milestones must be strictly ascending",
        ));
    }
    Ok(())
}

pub fn death_milestones<S: Scalar>(
    result: &SimulationResult<S>,
    milestones: &[usize],
) -> Result<MilestoneTable> {
    MilestoneTable::from_death_rounds(&result.sorted_death_rounds(), result.node_count, milestones)
}

/// Round at which the last node died.
pub fn lifetime(table: &MilestoneTable, node_count: usize) -> Result<u64> {
    if !table.milestones.contains(&node_count) {
        return Err(domain_err(
            "lifetime",
            format!("table has no milestone for all {node_count} nodes"),
        ));
    }
    table.get(node_count).ok_or(Error::Truncated {
        milestone: node_count,
    })
}

/// Relative round gain of a candidate strategy over a baseline, in percent.
#[derive(Clone, Debug, PartialEq)]
pub struct Improvement {
    /// `None` where the baseline reached the milestone at round 0.
    pub per_milestone: Vec<Option<f64>>,
    /// Mean over the defined milestones.
    pub average: f64,
    /// Max over the defined milestones.
    pub maximum: f64,
}

pub fn improvement(candidate: &MilestoneTable, baseline: &MilestoneTable) -> Result<Improvement> {
    if candidate.milestones != baseline.milestones {
        return Err(domain_err(
            "improvement",
            "tables use different milestone lists",
        ));
    }
    let mut per_milestone = Vec::with_capacity(candidate.milestones.len());
    for ((&k, c), b) in candidate
        .milestones
        .iter()
        .zip(&candidate.round_at)
        .zip(&baseline.round_at)
    {
        let (c, b) = match (c, b) {
            (Some(c), Some(b)) => (*c as f64, *b as f64),
            _ => return Err(Error::Truncated { milestone: k }),
        };
        per_milestone.push((b > 0.0).then(|| 100.0 * (c - b) / b));
    }
    let defined: Vec<f64> = per_milestone.iter().flatten().copied().collect();
    if defined.is_empty() {
        return Err(Error::UndefinedRatio);
    }
    let average = defined.iter().sum::<f64>() / defined.len() as f64;
    let maximum = defined.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(Improvement {
        per_milestone,
        average,
        maximum,
    })
}

pub fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len().is_multiple_of(2) {
        (v[mid - 1] + v[mid]) / 2.0
    } else {
        v[mid]
    })
}
