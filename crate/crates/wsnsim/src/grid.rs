//! Sweeps the (size, strategy, seed) grid.

use rayon::prelude::*;
use wsn_core::{
    death_milestones, default_milestones, run_simulation, MilestoneTable, StrategyKind,
};

use crate::config::ExperimentPlan;
use crate::error::HarnessError;

/// Milestone data for one run, as written to `milestones.csv`.
#[derive(Clone, Debug, PartialEq)]
pub struct MilestoneRecord {
    pub width: f64,
    pub height: f64,
    pub strategy: StrategyKind,
    pub seed: u64,
    pub table: MilestoneTable,
}

impl MilestoneRecord {
    pub fn size(&self) -> (f64, f64) {
        (self.width, self.height)
    }
}

/// One grid cell with its run diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct GridRow {
    pub record: MilestoneRecord,
    pub truncated: bool,
    pub rounds_completed: u64,
    pub conservation_error: f64,
}

/// Runs every cell on the global rayon pool.
pub fn run_grid(plan: &ExperimentPlan) -> Result<Vec<GridRow>, HarnessError> {
    run_grid_with_jobs(plan, None)
}

/// Runs every cell with at most `jobs` worker threads. Output is ordered by
/// (size as listed in the plan, strategy, seed) regardless of completion order.
pub fn run_grid_with_jobs(
    plan: &ExperimentPlan,
    jobs: Option<usize>,
) -> Result<Vec<GridRow>, HarnessError> {
    plan.validate()?;
    let mut strategies = plan.strategies.clone();
    strategies.sort();
    strategies.dedup();
    let milestones = default_milestones(plan.params.node_count);

    let mut cells = Vec::new();
    for (size_idx, &size) in plan.sizes.iter().enumerate() {
        for &kind in &strategies {
            for seed in plan.seeds() {
                cells.push((size_idx, size, kind, seed));
            }
        }
    }

    let run_cell = |&(size_idx, size, kind, seed): &(usize, (f64, f64), StrategyKind, u64)| {
        let result = run_simulation(plan.run_config(size, kind, seed))?;
        let table = death_milestones(&result, &milestones)?;
        let row = GridRow {
            record: MilestoneRecord {
                width: size.0,
                height: size.1,
                strategy: kind,
                seed,
                table,
            },
            truncated: result.truncated,
            rounds_completed: result.rounds_completed,
            conservation_error: result.conservation_error(),
        };
        Ok::<_, wsn_core::Error>((size_idx, row))
    };

    let outcome: Result<Vec<_>, wsn_core::Error> = match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .expect("thread pool")
            .install(|| cells.par_iter().map(run_cell).collect()),
        None => cells.par_iter().map(run_cell).collect(),
    };
    let mut rows = outcome?;
    rows.sort_by_key(|(size_idx, row)| (*size_idx, row.record.strategy, row.record.seed));
    Ok(rows.into_iter().map(|(_, row)| row).collect())
}
