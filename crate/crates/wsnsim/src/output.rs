//! Result files: `milestones.csv`, `summary.csv`, and `plotdata/`.
//!
//! Numbers are written with Rust's shortest round-trip formatting, so every
//! value reads back bit-identically. Lines end in `\n`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use wsn_core::metrics::{mean, median};
use wsn_core::{improvement, MilestoneTable, StrategyKind};

use crate::error::HarnessError;
use crate::grid::MilestoneRecord;

pub const MILESTONES_FILE: &str = "milestones.csv";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const PLOT_DIR: &str = "plotdata";

const MILESTONES_HEADER: [&str; 6] = ["width", "height", "strategy", "seed", "milestone", "round"];
const SUMMARY_HEADER: [&str; 9] = [
    "width",
    "height",
    "candidate",
    "baseline",
    "seeds",
    "mean_average",
    "median_average",
    "mean_maximum",
    "median_maximum",
];

/// Improvement statistics of one strategy over another on one area size.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub width: f64,
    pub height: f64,
    pub candidate: StrategyKind,
    pub baseline: StrategyKind,
    /// Seeds for which the improvement was defined.
    pub seeds: usize,
    pub mean_average: Option<f64>,
    pub median_average: Option<f64>,
    pub mean_maximum: Option<f64>,
    pub median_maximum: Option<f64>,
}

/// Mean lifetime of one strategy on one area size, over runs that finished.
#[derive(Clone, Debug, PartialEq)]
pub struct LifetimeRow {
    pub width: f64,
    pub height: f64,
    pub strategy: StrategyKind,
    pub runs: usize,
    pub mean_lifetime: Option<f64>,
}

type Groups<'a> = BTreeMap<((u64, u64), StrategyKind), Vec<&'a MilestoneRecord>>;

fn size_key(size: (f64, f64)) -> (u64, u64) {
    (size.0.to_bits(), size.1.to_bits())
}

/// Sizes in first-seen order, and records grouped by (size, strategy) with
/// seeds ascending.
fn group(records: &[MilestoneRecord]) -> (Vec<(f64, f64)>, Groups<'_>) {
    let mut sizes: Vec<(f64, f64)> = Vec::new();
    let mut groups: BTreeMap<_, Vec<&MilestoneRecord>> = BTreeMap::new();
    for r in records {
        if !sizes.iter().any(|&s| size_key(s) == size_key(r.size())) {
            sizes.push(r.size());
        }
        groups
            .entry((size_key(r.size()), r.strategy))
            .or_default()
            .push(r);
    }
    for v in groups.values_mut() {
        v.sort_by_key(|r| r.seed);
    }
    (sizes, groups)
}

fn strategies_present(records: &[MilestoneRecord]) -> Vec<StrategyKind> {
    let mut kinds: Vec<StrategyKind> = records.iter().map(|r| r.strategy).collect();
    kinds.sort();
    kinds.dedup();
    kinds
}

/// Pairwise improvement statistics for every size and every ordered pair of
/// distinct strategies, pairing runs by seed.
pub fn summarize(records: &[MilestoneRecord]) -> Vec<SummaryRow> {
    let (sizes, groups) = group(records);
    let kinds = strategies_present(records);
    let mut rows = Vec::new();
    for size in sizes {
        for &candidate in &kinds {
            for &baseline in &kinds {
                if candidate == baseline {
                    continue;
                }
                let (Some(cand), Some(base)) = (
                    groups.get(&(size_key(size), candidate)),
                    groups.get(&(size_key(size), baseline)),
                ) else {
                    continue;
                };
                let by_seed: BTreeMap<u64, &MilestoneTable> =
                    base.iter().map(|r| (r.seed, &r.table)).collect();
                let mut averages = Vec::new();
                let mut maxima = Vec::new();
                for c in cand {
                    let Some(b) = by_seed.get(&c.seed) else {
                        continue;
                    };
                    if let Ok(imp) = improvement(&c.table, b) {
                        averages.push(imp.average);
                        maxima.push(imp.maximum);
                    }
                }
                rows.push(SummaryRow {
                    width: size.0,
                    height: size.1,
                    candidate,
                    baseline,
                    seeds: averages.len(),
                    mean_average: mean(&averages),
                    median_average: median(&averages),
                    mean_maximum: mean(&maxima),
                    median_maximum: median(&maxima),
                });
            }
        }
    }
    rows
}

pub fn lifetimes(records: &[MilestoneRecord]) -> Vec<LifetimeRow> {
    let (sizes, groups) = group(records);
    let mut rows = Vec::new();
    for size in sizes {
        for kind in strategies_present(records) {
            let Some(runs) = groups.get(&(size_key(size), kind)) else {
                continue;
            };
            let finished: Vec<f64> = runs
                .iter()
                .filter_map(|r| r.table.round_at.last().copied().flatten())
                .map(|r| r as f64)
                .collect();
            rows.push(LifetimeRow {
                width: size.0,
                height: size.1,
                strategy: kind,
                runs: runs.len(),
                mean_lifetime: mean(&finished),
            });
        }
    }
    rows
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> Vec<u8> {
    w.into_inner().expect("in-memory csv writer")
}

fn write_row<I, T>(w: &mut csv::Writer<Vec<u8>>, fields: I)
where
    I: IntoIterator<Item = T>,
    T: AsRef<[u8]>,
{
    w.write_record(fields).expect("in-memory csv writer");
}

pub fn milestones_csv(records: &[MilestoneRecord]) -> Vec<u8> {
    let mut w = writer();
    write_row(&mut w, MILESTONES_HEADER);
    for r in records {
        for (k, round) in r.table.iter() {
            write_row(
                &mut w,
                [
                    r.width.to_string(),
                    r.height.to_string(),
                    r.strategy.to_string(),
                    r.seed.to_string(),
                    k.to_string(),
                    round.map(|x| x.to_string()).unwrap_or_default(),
                ],
            );
        }
    }
    finish(w)
}

pub fn summary_csv(rows: &[SummaryRow]) -> Vec<u8> {
    let mut w = writer();
    write_row(&mut w, SUMMARY_HEADER);
    for r in rows {
        write_row(
            &mut w,
            [
                r.width.to_string(),
                r.height.to_string(),
                r.candidate.to_string(),
                r.baseline.to_string(),
                r.seeds.to_string(),
                opt(r.mean_average),
                opt(r.median_average),
                opt(r.mean_maximum),
                opt(r.median_maximum),
            ],
        );
    }
    finish(w)
}

/// One file per size: milestone against mean round, one column per strategy.
pub fn plot_files(records: &[MilestoneRecord]) -> Vec<(String, Vec<u8>)> {
    let (sizes, groups) = group(records);
    let kinds = strategies_present(records);
    let mut files = Vec::new();
    for size in sizes {
        let mut w = writer();
        let mut header = vec!["milestone".to_string()];
        header.extend(kinds.iter().map(|k| k.to_string()));
        write_row(&mut w, &header);
        let milestones = kinds
            .iter()
            .find_map(|k| groups.get(&(size_key(size), *k)))
            .map(|runs| runs[0].table.milestones.clone())
            .unwrap_or_default();
        for (i, k) in milestones.iter().enumerate() {
            let mut line = vec![k.to_string()];
            for kind in &kinds {
                let rounds: Vec<f64> = groups
                    .get(&(size_key(size), *kind))
                    .into_iter()
                    .flatten()
                    .filter_map(|r| r.table.round_at.get(i).copied().flatten())
                    .map(|r| r as f64)
                    .collect();
                line.push(opt(mean(&rounds)));
            }
            write_row(&mut w, &line);
        }
        files.push((format!("size_{}x{}.csv", size.0, size.1), finish(w)));
    }
    files
}

/// Writes all result files under `dir`.
///
/// The directory tree is created and every file is rendered in memory before
/// anything is written, so an unwritable destination fails before any output.
pub fn emit_results(records: &[MilestoneRecord], dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    let plot_dir = dir.join(PLOT_DIR);
    fs::create_dir_all(&plot_dir).map_err(|e| HarnessError::io(&plot_dir, e))?;

    let mut outputs = vec![
        (dir.join(MILESTONES_FILE), milestones_csv(records)),
        (dir.join(SUMMARY_FILE), summary_csv(&summarize(records))),
    ];
    outputs.extend(
        plot_files(records)
            .into_iter()
            .map(|(name, bytes)| (plot_dir.join(name), bytes)),
    );
    let mut written = Vec::with_capacity(outputs.len());
    for (path, bytes) in outputs {
        fs::write(&path, bytes).map_err(|e| HarnessError::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

/// Reads `milestones.csv` back into records.
pub fn read_milestones(dir: &Path) -> Result<Vec<MilestoneRecord>, HarnessError> {
    let path = dir.join(MILESTONES_FILE);
    let text = fs::read_to_string(&path).map_err(|e| HarnessError::io(&path, e))?;
    let bad = |line: usize, message: String| HarnessError::Input {
        path: path.clone(),
        message: format!("line {line}: {message}"),
    };
    let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| bad(1, e.to_string()))?.clone();
    if header.iter().ne(MILESTONES_HEADER) {
        return Err(bad(1, format!("unexpected header {header:?}")));
    }

    let mut records: Vec<MilestoneRecord> = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| bad(line, e.to_string()))?;
        let field = |j: usize| row.get(j).unwrap_or("");
        let num = |j: usize| -> Result<f64, HarnessError> {
            field(j)
                .parse()
                .map_err(|_| bad(line, format!("bad number `{}`", field(j))))
        };
        let int = |j: usize| -> Result<u64, HarnessError> {
            field(j)
                .parse()
                .map_err(|_| bad(line, format!("bad integer `{}`", field(j))))
        };
        let (width, height) = (num(0)?, num(1)?);
        let strategy: StrategyKind = field(2).parse().map_err(|e| bad(line, e))?;
        let seed = int(3)?;
        let milestone = int(4)? as usize;
        let round = if field(5).is_empty() {
            None
        } else {
            Some(int(5)?)
        };

        let same_run = records.last().is_some_and(|r| {
            size_key(r.size()) == size_key((width, height))
                && r.strategy == strategy
                && r.seed == seed
        });
        if !same_run {
            records.push(MilestoneRecord {
                width,
                height,
                strategy,
                seed,
                table: MilestoneTable {
                    milestones: Vec::new(),
                    round_at: Vec::new(),
                },
            });
        }
        let table = &mut records.last_mut().expect("pushed above").table;
        table.milestones.push(milestone);
        table.round_at.push(round);
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(strategy: StrategyKind, seed: u64, rounds: &[u64]) -> MilestoneRecord {
        MilestoneRecord {
            width: 100.0,
            height: 100.0,
            strategy,
            seed,
            table: MilestoneTable {
                milestones: (1..=rounds.len()).collect(),
                round_at: rounds.iter().map(|&r| Some(r)).collect(),
            },
        }
    }

    #[test]
    fn identical_tables_summarize_to_zero() {
        let records = vec![
            record(StrategyKind::StaticCentral, 1, &[10, 20]),
            record(StrategyKind::MobileLwb, 1, &[10, 20]),
        ];
        let rows = summarize(&records);
        assert_eq!(rows.len(), 2);
        for r in rows {
            assert_eq!(r.seeds, 1);
            assert_eq!(r.mean_average, Some(0.0));
            assert_eq!(r.median_maximum, Some(0.0));
        }
    }

    #[test]
    fn summary_pairs_by_seed() {
        let records = vec![
            record(StrategyKind::StaticCentral, 1, &[100, 100]),
            record(StrategyKind::StaticCentral, 2, &[100, 200]),
            record(StrategyKind::MobileLwb, 1, &[110, 120]),
            record(StrategyKind::MobileLwb, 2, &[130, 200]),
        ];
        let rows = summarize(&records);
        let mobile_vs_central = rows
            .iter()
            .find(|r| {
                r.candidate == StrategyKind::MobileLwb && r.baseline == StrategyKind::StaticCentral
            })
            .unwrap();
        // seed 1: avg 15, max 20; seed 2: avg 15, max 30
        assert_eq!(mobile_vs_central.seeds, 2);
        assert_eq!(mobile_vs_central.mean_average, Some(15.0));
        assert_eq!(mobile_vs_central.mean_maximum, Some(25.0));
        assert_eq!(mobile_vs_central.median_maximum, Some(25.0));
    }

    #[test]
    fn undefined_seeds_are_skipped() {
        let records = vec![
            record(StrategyKind::StaticExternal, 1, &[0]),
            record(StrategyKind::MobileLwb, 1, &[5]),
        ];
        let rows = summarize(&records);
        let r = rows
            .iter()
            .find(|r| r.candidate == StrategyKind::MobileLwb)
            .unwrap();
        assert_eq!(r.seeds, 0);
        assert_eq!(r.mean_average, None);
        let csv = String::from_utf8(summary_csv(&rows)).unwrap();
        assert!(csv.contains("100,100,mobile-lwb,external,0,,,,\n"));
    }

    #[test]
    fn milestone_csv_format() {
        let mut r = record(StrategyKind::MobileLwb, 3, &[1, 2, 3]);
        r.table.round_at[2] = None;
        let text = String::from_utf8(milestones_csv(&[r])).unwrap();
        assert_eq!(
            text,
            "width,height,strategy,seed,milestone,round\n\
             100,100,mobile-lwb,3,1,1\n\
             100,100,mobile-lwb,3,2,2\n\
             100,100,mobile-lwb,3,3,\n"
        );
    }

    #[test]
    fn plot_file_means() {
        let records = vec![
            record(StrategyKind::StaticCentral, 1, &[10, 20]),
            record(StrategyKind::StaticCentral, 2, &[11, 25]),
            record(StrategyKind::MobileLwb, 1, &[12, 30]),
        ];
        let files = plot_files(&records);
        assert_eq!(files.len(), 1);
        assert_eq!(files[0].0, "size_100x100.csv");
        let text = String::from_utf8(files[0].1.clone()).unwrap();
        assert_eq!(text, "milestone,central,mobile-lwb\n1,10.5,12\n2,22.5,30\n");
    }

    #[test]
    fn lifetime_rows() {
        let records = vec![
            record(StrategyKind::StaticCentral, 1, &[10, 20]),
            record(StrategyKind::StaticCentral, 2, &[11, 30]),
        ];
        let rows = lifetimes(&records);
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].mean_lifetime, Some(25.0));
        assert_eq!(rows[0].runs, 2);
    }
}
