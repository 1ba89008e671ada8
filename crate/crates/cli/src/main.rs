use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tourcast::Weekday;
use tourcast_cli::commands::{self, oracle_cap};
use tourcast_cli::instance_dir::{parse_date, parse_weekday};
use tourcast_cli::manifest::GeneratorSection;
use tourcast_cli::sweep::sweep;
use tourcast_cli::{CliError, CliResult, Overrides, RunManifest};

#[derive(Parser)]
#[command(
    name = "tourcast",
    version,
    about = "Concert tour scheduling by simulated annealing"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Construct and anneal a tour, writing best and initial reports and a trace
    Solve {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Evaluate a tour read from a file
    Check {
        #[command(flatten)]
        run: RunArgs,
        /// One line of comma-separated city codes, one per day
        tour: PathBuf,
        /// Print the JSON sidecar instead of the text report
        #[arg(long)]
        json: bool,
    },
    /// Solve every [[cell]] of a manifest and print a comparison table
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// Cells solved concurrently
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Write a random instance directory
    Gen(GenArgs),
    /// Find the optimal tour of a tiny instance by enumeration
    Oracle {
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Run manifest (TOML)
    #[arg(long, value_name = "FILE")]
    manifest: Option<PathBuf>,
    /// Instance directory; overrides the manifest
    #[arg(long, value_name = "DIR")]
    instance: Option<PathBuf>,
    /// Number of days, when the instance directory does not say
    #[arg(long, value_name = "N")]
    days: Option<usize>,
    /// First weekday of the calendar (mon..sun)
    #[arg(long, value_name = "DAY", value_parser = weekday_arg)]
    start_weekday: Option<Weekday>,
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Annealing budget in seconds at the nominal move rate
    #[arg(long, value_name = "SECONDS")]
    budget: Option<f64>,
    /// Calendar date of day 0, for schedule labels
    #[arg(long, value_name = "YYYY-MM-DD")]
    start_date: Option<String>,
    /// Continue each restart from the current tour instead of the initial one
    #[arg(long)]
    no_restart_reset: bool,
    /// Output directory
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    /// Manifest whose [generator] section supplies defaults
    #[arg(long, value_name = "FILE")]
    manifest: Option<PathBuf>,
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    #[arg(long, value_name = "M")]
    cities: Option<usize>,
    #[arg(long, value_name = "N")]
    days: Option<usize>,
    #[arg(long, value_name = "DAY")]
    start_weekday: Option<String>,
    #[arg(long, value_name = "P")]
    p_available: Option<f64>,
    #[arg(long, value_name = "P")]
    p_relative: Option<f64>,
    #[arg(long, value_name = "MILES")]
    mile_min: Option<u32>,
    #[arg(long, value_name = "MILES")]
    mile_max: Option<u32>,
    #[arg(long, value_name = "MILES")]
    travel_limit: Option<u32>,
    /// Keep the derived Day matrix symmetric
    #[arg(long)]
    symmetric_days: bool,
    #[arg(long, value_name = "K")]
    waitlist_cutoff: Option<u32>,
    /// Record a calendar date for day 0 in instance.toml
    #[arg(long, value_name = "YYYY-MM-DD")]
    start_date: Option<String>,
}

fn weekday_arg(s: &str) -> Result<Weekday, String> {
    parse_weekday(s).map_err(|e| e.to_string())
}

impl RunArgs {
    fn manifest(&self) -> CliResult<RunManifest> {
        match &self.manifest {
            Some(path) => RunManifest::load(path),
            None => Ok(RunManifest::default()),
        }
    }

    fn overrides(&self) -> Overrides {
        Overrides {
            instance: self.instance.clone(),
            days: self.days,
            start_weekday: self.start_weekday,
            seed: self.seed,
            budget_seconds: self.budget,
            start_date: self.start_date.clone(),
            no_restart_reset: self.no_restart_reset,
            out: self.out.clone(),
        }
    }
}

fn cmd_solve(args: &RunArgs) -> CliResult<()> {
    let run = args.manifest()?.resolve(&args.overrides())?;
    for w in run.model.weights.sign_warnings() {
        eprintln!("warning: {w}");
    }
    eprintln!(
        "solving {} cities over {} days: {} restart(s), seed {}",
        run.instance.num_cities(),
        run.instance.num_days(),
        run.sa.budget.restarts,
        run.sa.seed
    );
    let outcome = commands::solve(&run)?;
    commands::write_solve(&outcome, &run.out_dir)?;
    if outcome.trace.stopped_by_wall_clock {
        eprintln!("warning: wall-clock cap reached before the restart budget was spent");
    }
    print!("{}", outcome.best.render());
    eprintln!("reports written to {}", run.out_dir.display());
    Ok(())
}

fn cmd_check(args: &RunArgs, tour_path: &Path, json: bool) -> CliResult<()> {
    let run = args.manifest()?.resolve(&args.overrides())?;
    let tour = commands::read_tour_file(tour_path)?;
    let report = commands::check(&run.instance, &tour, &run.model, run.start_date)?;
    if !report.complete {
        eprintln!("warning: the tour does not visit every city exactly once");
    }
    if json {
        let text =
            serde_json::to_string_pretty(&report).map_err(|e| CliError::input(e.to_string()))?;
        println!("{text}");
    } else {
        print!("{}", report.render());
    }
    Ok(())
}

fn cmd_sweep(args: &RunArgs, jobs: usize) -> CliResult<()> {
    let manifest = args.manifest()?;
    let ov = args.overrides();
    let base = manifest.resolve(&ov)?;
    let table = sweep(&manifest, &base, &ov, jobs, Some(&base.out_dir))?;
    std::fs::create_dir_all(&base.out_dir)
        .map_err(|e| CliError::input(format!("{}: {e}", base.out_dir.display())))?;
    let csv = base.out_dir.join("sweep.csv");
    std::fs::write(&csv, table.to_csv())
        .map_err(|e| CliError::input(format!("{}: {e}", csv.display())))?;
    commands::write_json(&base.out_dir.join("sweep.json"), &table)?;
    print!("{}", table.render());
    eprintln!(
        "table and per-cell reports written to {}",
        base.out_dir.display()
    );
    Ok(())
}

fn cmd_gen(args: &GenArgs) -> CliResult<()> {
    let manifest = match &args.manifest {
        Some(path) => RunManifest::load(path)?,
        None => RunManifest::default(),
    };
    let mut section: GeneratorSection = manifest.generator.clone().unwrap_or_default();
    section.num_cities = args.cities.or(section.num_cities);
    section.num_days = args.days.or(section.num_days);
    section.start_weekday = args.start_weekday.clone().or(section.start_weekday);
    section.p_available = args.p_available.or(section.p_available);
    section.p_relative = args.p_relative.or(section.p_relative);
    section.mile_min = args.mile_min.or(section.mile_min);
    section.mile_max = args.mile_max.or(section.mile_max);
    section.travel_limit = args.travel_limit.or(section.travel_limit);
    if args.symmetric_days {
        section.symmetric_days = Some(true);
    }
    let params = section.params()?;
    let seed = args.seed.or(section.seed).unwrap_or(0);
    let cutoff = args
        .waitlist_cutoff
        .or(manifest.constraints.waitlist_cutoff)
        .unwrap_or(tourcast::ingest::DEFAULT_WAITLIST_CUTOFF);
    let start_date = args.start_date.as_deref().map(parse_date).transpose()?;
    let inst = commands::generate(&params, seed, &args.out, cutoff, start_date)?;
    println!(
        "wrote {} cities over {} days (availability density {:.3}) to {}",
        inst.num_cities(),
        inst.num_days(),
        inst.availability_density(),
        args.out.display()
    );
    Ok(())
}

fn cmd_oracle(args: &RunArgs) -> CliResult<()> {
    let run = args.manifest()?.resolve(&args.overrides())?;
    let res = commands::oracle(&run.instance, &run.model, oracle_cap()?)?;
    print!("{}", commands::render_oracle(&res));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve { run } => cmd_solve(run),
        Command::Check { run, tour, json } => cmd_check(run, tour, *json),
        Command::Sweep { run, jobs } => cmd_sweep(run, *jobs),
        Command::Gen(args) => cmd_gen(args),
        Command::Oracle { run } => cmd_oracle(run),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tourcast: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
