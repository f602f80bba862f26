//! Factorial simulation grid over seeding policy, group ratio, seed count,
//! initial transmission probability and retention loss factor.
//!
//! Each replicate gets a fresh preferential-attachment graph. The base graph
//! depends only on the replicate, the planted group on (ratio, replicate),
//! so every policy and cascade setting of one replicate runs on the same
//! network. Per-run randomness comes from `mix(base_seed, cell, replicate)`;
//! rows are sorted by (cell, replicate) before aggregation, which makes the
//! output independent of the number of worker threads.

use std::collections::BTreeMap;
use std::io::{self, Write};

use rayon::prelude::*;
use thiserror::Error;

use crate::cascade::{run_cascade, select_seeds_ranked, CascadeParams, DecayClock, SeedPolicy};
use crate::netgen::{eigenvector_centrality, generate_ba, plant_group, CentralityConfig, GenParams};
use crate::seed::mix;
use crate::stats::{mean, std_dev};

const DOMAIN_GRAPH: u64 = 0x0067_7261_7068;
const DOMAIN_PLANT: u64 = 0x0070_6c61_6e74;
const DOMAIN_RUN: u64 = 0x72_756e;

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("invalid sweep grid: {0}")]
    InvalidGrid(String),
    #[error("graph generation failed: {0}")]
    Generation(#[from] crate::netgen::NetgenError),
    #[error("could not build worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub n: usize,
    pub m_attach: usize,
    pub q_intra: f64,
    pub group_ratios: Vec<f64>,
    pub seed_counts: Vec<usize>,
    pub p0_values: Vec<f64>,
    pub c_values: Vec<f64>,
    pub policies: Vec<SeedPolicy>,
    pub replicates: usize,
    pub base_seed: u64,
    pub p_floor: f64,
    pub max_steps: u32,
    pub clock: DecayClock,
}

impl SweepGrid {
    /// The published design: 3 policies × 3 group ratios × 3 seed counts ×
    /// 3 transmission probabilities × 3 loss factors, 20 runs each, on
    /// 10,000 nodes.
    pub fn published(base_seed: u64) -> Self {
        Self {
            n: 10_000,
            m_attach: 2,
            q_intra: 0.1,
            group_ratios: vec![0.01, 0.03, 0.05],
            seed_counts: vec![15, 25, 35],
            p0_values: vec![0.01, 0.05, 0.1],
            c_values: vec![1.5, 3.0, 4.5],
            policies: SeedPolicy::ALL.to_vec(),
            replicates: 20,
            base_seed,
            p_floor: 1e-6,
            max_steps: 10_000,
            clock: DecayClock::Node,
        }
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        let empty = [
            ("group_ratios", self.group_ratios.is_empty()),
            ("seed_counts", self.seed_counts.is_empty()),
            ("p0_values", self.p0_values.is_empty()),
            ("c_values", self.c_values.is_empty()),
            ("policies", self.policies.is_empty()),
        ];
        if let Some((name, _)) = empty.iter().find(|(_, e)| *e) {
            return Err(SweepError::InvalidGrid(format!("{name} is empty")));
        }
        if self.replicates == 0 {
            return Err(SweepError::InvalidGrid("replicates must be at least 1".into()));
        }
        for &r in &self.group_ratios {
            GenParams {
                n: self.n,
                m_attach: self.m_attach,
                r,
                q_intra: self.q_intra,
                rng_seed: 0,
            }
            .validate()?;
        }
        for &p0 in &self.p0_values {
            for &c in &self.c_values {
                self.cascade_params(p0, c, 0)
                    .validate()
                    .map_err(|e| SweepError::InvalidGrid(e.to_string()))?;
            }
        }
        Ok(())
    }

    /// Cells in canonical order: policy, ratio, seed count, p0, c (last
    /// varies fastest).
    pub fn cells(&self) -> Vec<Cell> {
        let mut cells = Vec::new();
        for &policy in &self.policies {
            for (ratio_index, &r) in self.group_ratios.iter().enumerate() {
                for &seed_count in &self.seed_counts {
                    for &p0 in &self.p0_values {
                        for &c in &self.c_values {
                            cells.push(Cell {
                                index: cells.len(),
                                policy,
                                ratio_index,
                                r,
                                seed_count,
                                p0,
                                c,
                            });
                        }
                    }
                }
            }
        }
        cells
    }

    fn cascade_params(&self, p0: f64, c: f64, rng_seed: u64) -> CascadeParams {
        CascadeParams {
            p0,
            c,
            p_floor: self.p_floor,
            max_steps: self.max_steps,
            clock: self.clock,
            rng_seed,
        }
    }

    pub fn run_seed(&self, cell: usize, replicate: usize) -> u64 {
        mix(self.base_seed, &[DOMAIN_RUN, cell as u64, replicate as u64])
    }

    fn graph_params(&self, ratio_index: usize, replicate: usize) -> (GenParams, u64) {
        let gen = GenParams {
            n: self.n,
            m_attach: self.m_attach,
            r: self.group_ratios[ratio_index],
            q_intra: self.q_intra,
            rng_seed: mix(self.base_seed, &[DOMAIN_GRAPH, replicate as u64]),
        };
        let plant_seed = mix(self.base_seed, &[DOMAIN_PLANT, ratio_index as u64, replicate as u64]);
        (gen, plant_seed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub index: usize,
    pub policy: SeedPolicy,
    pub ratio_index: usize,
    pub r: f64,
    pub seed_count: usize,
    pub p0: f64,
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunOutcome {
    Completed {
        exposed: usize,
        final_step: u32,
        truncated: bool,
    },
    Failed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRow {
    pub cell: Cell,
    pub replicate: usize,
    pub run_seed: u64,
    pub outcome: RunOutcome,
}

impl RunRow {
    pub fn exposed(&self) -> Option<usize> {
        match self.outcome {
            RunOutcome::Completed { exposed, .. } => Some(exposed),
            RunOutcome::Failed(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub cell: Cell,
    /// Completed runs.
    pub runs: usize,
    pub failed: usize,
    pub mean_exposed: f64,
    pub std_exposed: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<RunRow>,
    pub summaries: Vec<CellSummary>,
}

/// Runs every cell × replicate. `jobs = None` uses rayon's default pool size.
pub fn run_sweep(grid: &SweepGrid, jobs: Option<usize>) -> Result<SweepResult, SweepError> {
    grid.validate()?;
    let cells = grid.cells();
    let units: Vec<(usize, usize)> = (0..grid.group_ratios.len())
        .flat_map(|ri| (0..grid.replicates).map(move |rep| (ri, rep)))
        .collect();

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        builder = builder.num_threads(j.max(1));
    }
    let pool = builder.build()?;

    let chunks: Vec<Result<Vec<RunRow>, SweepError>> = pool.install(|| {
        units
            .par_iter()
            .map(|&(ratio_index, replicate)| run_unit(grid, &cells, ratio_index, replicate))
            .collect()
    });

    let mut rows = Vec::with_capacity(cells.len() * grid.replicates);
    for chunk in chunks {
        rows.extend(chunk?);
    }
    rows.sort_by_key(|r| (r.cell.index, r.replicate));
    let summaries = summarize(&cells, &rows);
    Ok(SweepResult { rows, summaries })
}

/// All runs sharing one graph: a single ratio and replicate.
fn run_unit(grid: &SweepGrid, cells: &[Cell], ratio_index: usize, replicate: usize) -> Result<Vec<RunRow>, SweepError> {
    let (gen, plant_seed) = grid.graph_params(ratio_index, replicate);
    let graph = plant_group(generate_ba(&gen)?, gen.r, gen.q_intra, plant_seed);

    let needs_ranking = cells
        .iter()
        .any(|c| c.ratio_index == ratio_index && c.policy == SeedPolicy::TopCentrality);
    let scores = if needs_ranking {
        eigenvector_centrality(&graph, &CentralityConfig::default()).map_err(|e| e.to_string())
    } else {
        Ok(Vec::new())
    };

    let rows = cells
        .iter()
        .filter(|c| c.ratio_index == ratio_index)
        .map(|&cell| {
            let run_seed = grid.run_seed(cell.index, replicate);
            let outcome = match &scores {
                Err(msg) if cell.policy == SeedPolicy::TopCentrality => RunOutcome::Failed(msg.clone()),
                _ => {
                    let ranked = scores.as_deref().unwrap_or(&[]);
                    select_seeds_ranked(&graph, cell.policy, cell.seed_count, mix(run_seed, &[1]), ranked)
                        .and_then(|seeds| {
                            run_cascade(
                                &graph,
                                &seeds,
                                &grid.cascade_params(cell.p0, cell.c, mix(run_seed, &[2])),
                            )
                        })
                        .map_or_else(
                            |e| RunOutcome::Failed(e.to_string()),
                            |t| RunOutcome::Completed {
                                exposed: t.exposed_count(),
                                final_step: t.final_step,
                                truncated: t.truncated,
                            },
                        )
                }
            };
            RunRow {
                cell,
                replicate,
                run_seed,
                outcome,
            }
        })
        .collect();
    Ok(rows)
}

fn summarize(cells: &[Cell], rows: &[RunRow]) -> Vec<CellSummary> {
    cells
        .iter()
        .map(|&cell| {
            let cell_rows = rows.iter().filter(|r| r.cell.index == cell.index);
            let mut values = Vec::new();
            let mut failed = 0;
            for row in cell_rows {
                match row.exposed() {
                    Some(x) => values.push(x as f64),
                    None => failed += 1,
                }
            }
            CellSummary {
                cell,
                runs: values.len(),
                failed,
                mean_exposed: mean(&values),
                std_exposed: std_dev(&values),
            }
        })
        .collect()
}

pub const ROWS_HEADER: &str = "policy,r,seed_count,p0,c,replicate,run_seed,exposed,final_step";
pub const SUMMARY_HEADER: &str = "policy,r,seed_count,p0,c,runs,failed,mean_exposed,std_exposed";

/// One line per run; failed runs leave `exposed` and `final_step` empty.
pub fn write_rows_csv<W: Write>(result: &SweepResult, mut out: W) -> io::Result<()> {
    writeln!(out, "{ROWS_HEADER}")?;
    for row in &result.rows {
        let c = &row.cell;
        let (exposed, final_step) = match row.outcome {
            RunOutcome::Completed {
                exposed, final_step, ..
            } => (exposed.to_string(), final_step.to_string()),
            RunOutcome::Failed(_) => (String::new(), String::new()),
        };
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            c.policy, c.r, c.seed_count, c.p0, c.c, row.replicate, row.run_seed, exposed, final_step
        )?;
    }
    Ok(())
}

pub fn write_summary_csv<W: Write>(result: &SweepResult, mut out: W) -> io::Result<()> {
    writeln!(out, "{SUMMARY_HEADER}")?;
    for s in &result.summaries {
        let c = &s.cell;
        let (m, sd) = if s.runs == 0 {
            (String::new(), String::new())
        } else {
            (s.mean_exposed.to_string(), s.std_exposed.to_string())
        };
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            c.policy, c.r, c.seed_count, c.p0, c.c, s.runs, s.failed, m, sd
        )?;
    }
    Ok(())
}

/// Mean exposure per policy and the ratios to random seeding.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioRow {
    pub seed_count: Option<usize>,
    pub r: Option<f64>,
    pub p0: Option<f64>,
    pub c: Option<f64>,
    pub mean_random: Option<f64>,
    pub mean_group: Option<f64>,
    pub mean_centrality: Option<f64>,
}

impl RatioRow {
    pub fn group_over_random(&self) -> Option<f64> {
        Some(self.mean_group? / self.mean_random?)
    }

    pub fn centrality_over_random(&self) -> Option<f64> {
        Some(self.mean_centrality? / self.mean_random?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolicyRatioTable {
    /// Marginalized over ratio, p0 and c.
    pub by_seed_count: Vec<RatioRow>,
    /// One row per (ratio, seed count, p0, c).
    pub by_cell: Vec<RatioRow>,
    /// Pooled over every compared cell.
    pub overall: RatioRow,
    /// Parameter combinations left out because a policy had no completed run.
    pub excluded: Vec<String>,
}

type ParamKey = (u64, usize, u64, u64);

/// Compares policies over the parameter combinations where every policy
/// present in the sweep has at least one completed run.
pub fn summarize_policy_ratios(result: &SweepResult) -> PolicyRatioTable {
    let mut present: Vec<SeedPolicy> = result.rows.iter().map(|r| r.cell.policy).collect();
    present.sort();
    present.dedup();

    // key -> policy -> exposures
    let mut grouped: BTreeMap<ParamKey, (Cell, BTreeMap<SeedPolicy, Vec<f64>>)> = BTreeMap::new();
    for row in &result.rows {
        let c = row.cell;
        let key = (c.r.to_bits(), c.seed_count, c.p0.to_bits(), c.c.to_bits());
        let entry = grouped.entry(key).or_insert_with(|| (c, BTreeMap::new()));
        let values = entry.1.entry(c.policy).or_default();
        if let Some(x) = row.exposed() {
            values.push(x as f64);
        }
    }

    let mut excluded = Vec::new();
    let mut by_cell = Vec::new();
    let mut per_seed: BTreeMap<usize, BTreeMap<SeedPolicy, Vec<f64>>> = BTreeMap::new();
    let mut pooled: BTreeMap<SeedPolicy, Vec<f64>> = BTreeMap::new();

    for (cell, by_policy) in grouped.values() {
        let missing: Vec<&str> = present
            .iter()
            .filter(|p| by_policy.get(p).is_none_or(|v| v.is_empty()))
            .map(|p| p.as_str())
            .collect();
        if !missing.is_empty() {
            excluded.push(format!(
                "r={} seed_count={} p0={} c={}: no completed runs for {}",
                cell.r,
                cell.seed_count,
                cell.p0,
                cell.c,
                missing.join(", ")
            ));
            continue;
        }
        by_cell.push(ratio_row(
            Some(cell.seed_count),
            Some(cell.r),
            Some(cell.p0),
            Some(cell.c),
            by_policy,
        ));
        for (policy, values) in by_policy {
            per_seed
                .entry(cell.seed_count)
                .or_default()
                .entry(*policy)
                .or_default()
                .extend(values);
            pooled.entry(*policy).or_default().extend(values);
        }
    }

    let by_seed_count = per_seed
        .iter()
        .map(|(&k, by_policy)| ratio_row(Some(k), None, None, None, by_policy))
        .collect();
    PolicyRatioTable {
        by_seed_count,
        by_cell,
        overall: ratio_row(None, None, None, None, &pooled),
        excluded,
    }
}

fn ratio_row(
    seed_count: Option<usize>,
    r: Option<f64>,
    p0: Option<f64>,
    c: Option<f64>,
    by_policy: &BTreeMap<SeedPolicy, Vec<f64>>,
) -> RatioRow {
    let m = |p: SeedPolicy| by_policy.get(&p).filter(|v| !v.is_empty()).map(|v| mean(v));
    RatioRow {
        seed_count,
        r,
        p0,
        c,
        mean_random: m(SeedPolicy::RandomAll),
        mean_group: m(SeedPolicy::RandomGroup),
        mean_centrality: m(SeedPolicy::TopCentrality),
    }
}

pub const RATIOS_HEADER: &str =
    "scope,seed_count,r,p0,c,mean_random,mean_group,mean_centrality,group_over_random,centrality_over_random";

/// Writes the seed-count marginals, the per-cell rows and the pooled row.
/// Exclusions are appended as `#` comment lines.
pub fn write_ratios_csv<W: Write>(table: &PolicyRatioTable, mut out: W) -> io::Result<()> {
    fn opt<T: ToString>(v: Option<T>) -> String {
        v.map(|x| x.to_string()).unwrap_or_default()
    }
    writeln!(out, "{RATIOS_HEADER}")?;
    let scoped = table
        .by_seed_count
        .iter()
        .map(|r| ("seed_count", r))
        .chain(table.by_cell.iter().map(|r| ("cell", r)))
        .chain(std::iter::once(("overall", &table.overall)));
    for (scope, row) in scoped {
        writeln!(
            out,
            "{scope},{},{},{},{},{},{},{},{},{}",
            opt(row.seed_count),
            opt(row.r),
            opt(row.p0),
            opt(row.c),
            opt(row.mean_random),
            opt(row.mean_group),
            opt(row.mean_centrality),
            opt(row.group_over_random()),
            opt(row.centrality_over_random()),
        )?;
    }
    for note in &table.excluded {
        writeln!(out, "# excluded {note}")?;
    }
    Ok(())
}
