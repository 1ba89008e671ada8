//! Weight and penalty sweeps: one solve per manifest cell, run in parallel,
//! collected into a comparison table.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use tourcast::{Objectives, Penalties, Weights};

use crate::commands::{solve, write_solve};
use crate::error::{CliError, CliResult};
use crate::manifest::{CellSpec, Overrides, RunConfig, RunManifest};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellResult {
    pub best_cost: f64,
    pub objectives: Objectives,
    pub violations: [usize; 5],
    pub complete: bool,
    pub runtime_secs: f64,
    /// No other successful row is at least as good on miles, good days and
    /// bad days and strictly better on one of them.
    pub pareto: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub index: usize,
    pub name: String,
    pub weights: Weights,
    pub penalties: Penalties,
    pub seed: u64,
    pub restarts: u64,
    pub output: Option<PathBuf>,
    pub result: Result<CellResult, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

fn cell_name(index: usize, cell: &CellSpec) -> String {
    cell.name.clone().unwrap_or_else(|| format!("cell{index}"))
}

fn slug(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn run_cell(
    index: usize,
    cell: &CellSpec,
    manifest: &RunManifest,
    base: &RunConfig,
    ov: &Overrides,
    out_root: Option<&Path>,
) -> SweepRow {
    let name = cell_name(index, cell);
    let mut row = SweepRow {
        index,
        name: name.clone(),
        weights: cell.weights.unwrap_or(base.model.weights),
        penalties: cell.penalties.unwrap_or(base.model.penalties),
        seed: base.sa.seed,
        restarts: base.sa.budget.restarts,
        output: None,
        result: Err(String::new()),
    };
    let run = match manifest.resolve_cell(base, cell, ov) {
        Ok(run) => run,
        Err(e) => {
            row.result = Err(e.to_string());
            return row;
        }
    };
    row.seed = run.sa.seed;
    row.restarts = run.sa.budget.restarts;
    let started = Instant::now();
    let outcome = match solve(&run) {
        Ok(o) => o,
        Err(e) => {
            row.result = Err(e.to_string());
            return row;
        }
    };
    let runtime_secs = started.elapsed().as_secs_f64();
    if let Some(root) = out_root {
        let dir = root.join(format!("cell-{index:02}-{}", slug(&name)));
        if let Err(e) = write_solve(&outcome, &dir) {
            row.result = Err(e.to_string());
            return row;
        }
        row.output = Some(dir);
    }
    let p = &outcome.best.properties;
    row.result = Ok(CellResult {
        best_cost: outcome.best.cost.unwrap_or(f64::NAN),
        objectives: Objectives {
            total_miles: p.total_miles,
            good_days: p.good_days,
            bad_days: p.bad_days,
        },
        violations: [
            p.avail_type1,
            p.avail_type2,
            p.breaks,
            p.sep_type1,
            p.sep_type2,
        ],
        complete: outcome.best.complete,
        runtime_secs,
        pareto: false,
    });
    row
}

fn dominates(a: &Objectives, b: &Objectives) -> bool {
    let no_worse =
        a.total_miles <= b.total_miles && a.good_days >= b.good_days && a.bad_days <= b.bad_days;
    no_worse && a != b
}

fn mark_pareto(rows: &mut [SweepRow]) {
    let objectives: Vec<Objectives> = rows
        .iter()
        .filter_map(|r| r.result.as_ref().ok().map(|c| c.objectives))
        .collect();
    for row in rows.iter_mut() {
        if let Ok(cell) = &mut row.result {
            cell.pareto = !objectives.iter().any(|o| dominates(o, &cell.objectives));
        }
    }
}

/// Runs every cell on at most `jobs` threads. Cell failures land in their
/// row; only an empty cell list or a thread-pool failure aborts the sweep.
pub fn sweep(
    manifest: &RunManifest,
    base: &RunConfig,
    ov: &Overrides,
    jobs: usize,
    out_root: Option<&Path>,
) -> CliResult<SweepTable> {
    if manifest.cells.is_empty() {
        return Err(CliError::input(
            "the manifest has no [[cell]] entries to sweep",
        ));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::input(format!("cannot start worker threads: {e}")))?;
    let mut rows: Vec<SweepRow> = pool.install(|| {
        manifest
            .cells
            .par_iter()
            .enumerate()
            .map(|(i, cell)| run_cell(i, cell, manifest, base, ov, out_root))
            .collect()
    });
    rows.sort_by_key(|r| r.index);
    mark_pareto(&mut rows);
    Ok(SweepTable { rows })
}

impl SweepTable {
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:>3}  {:<14} {:>22}  {:>38}  {:>14} {:>6} {:>4} {:>4}  {:<13} {:>8}  pareto",
            "#",
            "cell",
            "weights",
            "penalties",
            "best cost",
            "miles",
            "good",
            "bad",
            "y1,y2,y3,y4,y5",
            "secs"
        );
        for r in &self.rows {
            let w = format!("{},{},{}", r.weights.mile, r.weights.good, r.weights.bad);
            let p = r.penalties.as_array().map(|x| x.to_string()).join(",");
            match &r.result {
                Ok(c) => {
                    let y = c.violations.map(|v| v.to_string()).join(",");
                    let _ = writeln!(
                        out,
                        "{:>3}  {:<14} {:>22}  {:>38}  {:>14} {:>6} {:>4} {:>4}  {:<13} {:>8.2}  {}",
                        r.index,
                        r.name,
                        w,
                        p,
                        c.best_cost,
                        c.objectives.total_miles,
                        c.objectives.good_days,
                        c.objectives.bad_days,
                        y,
                        c.runtime_secs,
                        if c.pareto { "yes" } else { "no" }
                    );
                }
                Err(e) => {
                    let _ = writeln!(
                        out,
                        "{:>3}  {:<14} {:>22}  {:>38}  error: {e}",
                        r.index, r.name, w, p
                    );
                }
            }
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "index,name,w_mile,w_good,w_bad,p_avail1,p_avail2,p_break,p_sep1,p_sep2,seed,restarts,best_cost,miles,good_days,bad_days,y1,y2,y3,y4,y5,complete,runtime_secs,pareto,error\n",
        );
        for r in &self.rows {
            let p = r.penalties.as_array().map(|x| x.to_string()).join(",");
            let _ = write!(
                out,
                "{},{},{},{},{},{p},{},{},",
                r.index,
                csv_field(&r.name),
                r.weights.mile,
                r.weights.good,
                r.weights.bad,
                r.seed,
                r.restarts
            );
            match &r.result {
                Ok(c) => {
                    let y = c.violations.map(|v| v.to_string()).join(",");
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{y},{},{:.3},{},",
                        c.best_cost,
                        c.objectives.total_miles,
                        c.objectives.good_days,
                        c.objectives.bad_days,
                        c.complete,
                        c.runtime_secs,
                        c.pareto
                    );
                }
                Err(e) => {
                    let _ = writeln!(out, ",,,,,,,,,,,,{}", csv_field(e));
                }
            }
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
