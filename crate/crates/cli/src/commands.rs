//! The work behind each subcommand, kept free of argument parsing so tests
//! can call it directly.

use std::fs;
use std::path::Path;

use chrono::NaiveDate;
use serde::Serialize;
use tourcast::construct::construct;
use tourcast::ingest::{generate_random_instance, GeneratorParams};
use tourcast::oracle::{brute_force_best, OracleResult, DEFAULT_CAP};
use tourcast::report::{PropertyBlock, TourReport};
use tourcast::{evaluate, simulated_annealing, CostModel, Instance, RunTrace, Tour};

use crate::error::{CliError, CliResult};
use crate::instance_dir::{
    check_start_date, load_instance_dir, write_instance_dir, InstanceOverrides,
};
use crate::manifest::RunConfig;

pub const CAP_ENV: &str = "TOURCAST_CAP";

/// Re-parses the rendered property block and compares it with a fresh
/// evaluation of the report's tour.
pub fn verify_report(report: &TourReport, inst: &Instance, break_limit: usize) -> CliResult<()> {
    let parsed = PropertyBlock::parse(&report.render()).map_err(CliError::Input)?;
    let fresh =
        PropertyBlock::from_evaluation(&report.tour, &evaluate(&report.tour, inst, break_limit));
    if parsed != fresh {
        return Err(CliError::input(format!(
            "report {:?} does not match its tour: {parsed:?} vs {fresh:?}",
            report.title
        )));
    }
    Ok(())
}

/// Writes `<stem>.txt` and its JSON sidecar `<stem>.json`.
pub fn write_report(dir: &Path, stem: &str, report: &TourReport) -> CliResult<()> {
    let txt = dir.join(format!("{stem}.txt"));
    fs::write(&txt, report.render()).map_err(|e| CliError::io(&txt, e))?;
    write_json(&dir.join(format!("{stem}.json")), report)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text =
        serde_json::to_string_pretty(value).map_err(|e| CliError::input(e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub start_city: usize,
    pub initial: TourReport,
    pub best: TourReport,
    pub trace: RunTrace,
}

/// Constructs an initial tour and anneals it. Nothing is written.
pub fn solve(run: &RunConfig) -> CliResult<SolveOutcome> {
    let inst = &run.instance;
    let model = &run.model;
    let built = construct(inst, run.sa.seed, model.break_limit)?;
    let outcome = simulated_annealing(inst, &built.tour, model, &run.sa)?;

    let report = |title: &str, tour: &Tour| {
        TourReport::build(title, tour, inst, model.break_limit, run.start_date)
            .with_cost(model.cost(tour.as_slice(), inst))
    };
    let initial = report("Initial tour", &built.tour);
    let best = report("Best tour", &outcome.best);
    verify_report(&initial, inst, model.break_limit)?;
    verify_report(&best, inst, model.break_limit)?;
    Ok(SolveOutcome {
        start_city: built.start_city,
        initial,
        best,
        trace: outcome.trace,
    })
}

/// `best.txt`, `initial.txt`, their JSON sidecars and `trace.csv`.
pub fn write_solve(outcome: &SolveOutcome, dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    write_report(dir, "best", &outcome.best)?;
    write_report(dir, "initial", &outcome.initial)?;
    let trace = dir.join("trace.csv");
    let file = fs::File::create(&trace).map_err(|e| CliError::io(&trace, e))?;
    outcome
        .trace
        .write_csv(std::io::BufWriter::new(file))
        .map_err(|e| CliError::io(&trace, e))
}

/// Reads a tour file: one line of comma-separated city codes.
pub fn read_tour_file(path: &Path) -> CliResult<Tour> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let line = text.trim();
    if line.is_empty() {
        return Err(CliError::input(format!(
            "{}: empty tour file",
            path.display()
        )));
    }
    line.parse::<Tour>()
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

/// Evaluates an externally supplied tour.
pub fn check(
    inst: &Instance,
    tour: &Tour,
    model: &CostModel,
    start_date: Option<NaiveDate>,
) -> CliResult<TourReport> {
    tour.validate(inst)?;
    let report = TourReport::build("Checked tour", tour, inst, model.break_limit, start_date)
        .with_cost(model.cost(tour.as_slice(), inst));
    verify_report(&report, inst, model.break_limit)?;
    Ok(report)
}

/// Generates an instance, writes it to `dir` and confirms it loads back
/// unchanged.
pub fn generate(
    params: &GeneratorParams,
    seed: u64,
    dir: &Path,
    waitlist_cutoff: u32,
    start_date: Option<NaiveDate>,
) -> CliResult<Instance> {
    let inst = generate_random_instance(params, seed)?;
    if let Some(date) = start_date {
        check_start_date(date, &inst)?;
    }
    write_instance_dir(&inst, dir, waitlist_cutoff, start_date)?;
    let back = load_instance_dir(dir, &InstanceOverrides::default())?.instance;
    if back != inst {
        return Err(CliError::input(format!(
            "{}: written instance does not load back unchanged",
            dir.display()
        )));
    }
    Ok(inst)
}

/// Enumeration cap from the environment, else the default.
pub fn oracle_cap() -> CliResult<u128> {
    match std::env::var(CAP_ENV) {
        Ok(v) => v
            .trim()
            .replace('_', "")
            .parse::<u128>()
            .map_err(|_| CliError::input(format!("{CAP_ENV}={v:?} is not a positive integer"))),
        Err(_) => Ok(DEFAULT_CAP),
    }
}

pub fn oracle(inst: &Instance, model: &CostModel, cap: u128) -> CliResult<OracleResult> {
    Ok(brute_force_best(inst, model, cap)?)
}

pub fn render_oracle(res: &OracleResult) -> String {
    format!(
        "Optimal tour: {}\nCost: {}\nTours enumerated: {}\nTours at the optimum: {}\n",
        res.best_tour, res.best_cost, res.num_enumerated, res.ties
    )
}
