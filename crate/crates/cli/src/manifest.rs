//! Run manifests.
//!
//! A manifest is a TOML file. Every section is optional; flags given on the
//! command line win over the file. Relative paths are resolved against the
//! manifest's own directory. `data/manifests/solve.toml` is a complete
//! commented example.

use std::fs;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use tourcast::anneal::Budget;
use tourcast::ingest::{generate_random_instance, GeneratorParams, DEFAULT_WAITLIST_CUTOFF};
use tourcast::{CostModel, Instance, Penalties, SaParams, Weekday, Weights, DEFAULT_BREAK_LIMIT};

use crate::error::{CliError, CliResult};
use crate::instance_dir::{
    check_start_date, load_instance_dir, parse_date, parse_weekday, InstanceOverrides,
};

pub const DEFAULT_BUDGET_SECONDS: f64 = 30.0;
pub const DEFAULT_OUT_DIR: &str = "tourcast-out";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub instance: Option<InstanceSection>,
    pub generator: Option<GeneratorSection>,
    pub weights: Option<Weights>,
    pub penalties: Option<Penalties>,
    #[serde(default)]
    pub anneal: AnnealSection,
    #[serde(default)]
    pub constraints: ConstraintsSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default, rename = "cell")]
    pub cells: Vec<CellSpec>,
    /// Directory relative paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSection {
    pub dir: PathBuf,
    pub days: Option<usize>,
    pub start_weekday: Option<String>,
    pub travel_limit: Option<u32>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSection {
    pub num_cities: Option<usize>,
    pub num_days: Option<usize>,
    pub start_weekday: Option<String>,
    pub p_available: Option<f64>,
    pub p_relative: Option<f64>,
    pub mile_min: Option<u32>,
    pub mile_max: Option<u32>,
    pub travel_limit: Option<u32>,
    pub symmetric_days: Option<bool>,
    pub seed: Option<u64>,
}

impl GeneratorSection {
    pub fn params(&self) -> CliResult<GeneratorParams> {
        let d = GeneratorParams::default();
        let params = GeneratorParams {
            num_cities: self.num_cities.unwrap_or(d.num_cities),
            num_days: self.num_days.unwrap_or(d.num_days),
            start_weekday: match &self.start_weekday {
                Some(s) => parse_weekday(s)?,
                None => d.start_weekday,
            },
            p_available: self.p_available.unwrap_or(d.p_available),
            p_relative: self.p_relative.unwrap_or(d.p_relative),
            mile_range: (
                self.mile_min.unwrap_or(d.mile_range.0),
                self.mile_max.unwrap_or(d.mile_range.1),
            ),
            travel_limit: self.travel_limit.unwrap_or(d.travel_limit),
            symmetric_days: self.symmetric_days.unwrap_or(d.symmetric_days),
        };
        params.validate()?;
        Ok(params)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnealSection {
    pub t0: Option<f64>,
    pub temp_limit: Option<f64>,
    pub iters_per_temp: Option<usize>,
    pub alpha: Option<f64>,
    /// Seconds at the nominal move rate. Exclusive with `restarts`.
    pub budget_seconds: Option<f64>,
    pub restarts: Option<u64>,
    pub seed: Option<u64>,
    pub reset_on_restart: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintsSection {
    pub break_limit: Option<usize>,
    pub waitlist_cutoff: Option<u32>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
    pub start_date: Option<String>,
}

/// One row of a sweep. Unset fields fall back to the top-level settings.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellSpec {
    pub name: Option<String>,
    pub weights: Option<Weights>,
    pub penalties: Option<Penalties>,
    pub seed: Option<u64>,
    pub budget_seconds: Option<f64>,
    pub restarts: Option<u64>,
    pub break_limit: Option<usize>,
    pub reset_on_restart: Option<bool>,
    pub t0: Option<f64>,
    pub temp_limit: Option<f64>,
    pub iters_per_temp: Option<usize>,
    pub alpha: Option<f64>,
}

/// Command-line settings that override the manifest.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub instance: Option<PathBuf>,
    pub days: Option<usize>,
    pub start_weekday: Option<Weekday>,
    pub seed: Option<u64>,
    pub budget_seconds: Option<f64>,
    pub start_date: Option<String>,
    pub no_restart_reset: bool,
    pub out: Option<PathBuf>,
}

/// A fully resolved run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub instance: Instance,
    pub start_date: Option<NaiveDate>,
    pub waitlist_cutoff: u32,
    pub model: CostModel,
    pub sa: SaParams,
    pub out_dir: PathBuf,
}

impl RunManifest {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, &base).map_err(|e| match e {
            CliError::Input(m) => CliError::Input(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str, base_dir: &Path) -> CliResult<Self> {
        let mut manifest: RunManifest =
            toml::from_str(text).map_err(|e| CliError::input(e.to_string()))?;
        manifest.base_dir = base_dir.to_path_buf();
        if manifest.instance.is_some() && manifest.generator.is_some() {
            return Err(CliError::input(
                "give either [instance] or [generator], not both",
            ));
        }
        if manifest.anneal.budget_seconds.is_some() && manifest.anneal.restarts.is_some() {
            return Err(CliError::input(
                "[anneal] budget_seconds and restarts are mutually exclusive",
            ));
        }
        Ok(manifest)
    }

    fn resolve_path(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    /// Loads the instance and merges manifest, defaults and overrides.
    pub fn resolve(&self, ov: &Overrides) -> CliResult<RunConfig> {
        let waitlist = self.constraints.waitlist_cutoff;
        let (instance, file_date, waitlist_cutoff) =
            match (&ov.instance, &self.instance, &self.generator) {
                (Some(dir), section, _) => {
                    let mut o = section_overrides(section.as_ref())?;
                    o.waitlist_cutoff = waitlist;
                    apply_calendar(&mut o, ov);
                    let loaded = load_instance_dir(dir, &o)?;
                    (loaded.instance, loaded.start_date, loaded.waitlist_cutoff)
                }
                (None, Some(section), _) => {
                    let mut o = section_overrides(Some(section))?;
                    o.waitlist_cutoff = waitlist;
                    apply_calendar(&mut o, ov);
                    let loaded = load_instance_dir(&self.resolve_path(&section.dir), &o)?;
                    (loaded.instance, loaded.start_date, loaded.waitlist_cutoff)
                }
                (None, None, Some(gen)) => {
                    let params = gen.params()?;
                    let inst = generate_random_instance(&params, gen.seed.unwrap_or(0))?;
                    (inst, None, waitlist.unwrap_or(DEFAULT_WAITLIST_CUTOFF))
                }
                (None, None, None) => return Err(CliError::input(
                    "no instance: pass --instance DIR or add an [instance] or [generator] section",
                )),
            };

        let start_date = match ov
            .start_date
            .as_deref()
            .or(self.output.start_date.as_deref())
        {
            Some(s) => Some(parse_date(s)?),
            None => file_date,
        };
        if let Some(date) = start_date {
            check_start_date(date, &instance)?;
        }

        let break_limit = self.constraints.break_limit.unwrap_or(DEFAULT_BREAK_LIMIT);
        let model = cost_model(
            self.weights.unwrap_or_default(),
            self.penalties.unwrap_or_default(),
            break_limit,
        )?;

        let a = &self.anneal;
        let mut sa = SaParams::default();
        sa.t0 = a.t0.unwrap_or(sa.t0);
        sa.temp_limit = a.temp_limit.unwrap_or(sa.temp_limit);
        sa.iters_per_temp = a.iters_per_temp.unwrap_or(sa.iters_per_temp);
        sa.alpha = a.alpha.unwrap_or(sa.alpha);
        sa.seed = ov.seed.or(a.seed).unwrap_or(0);
        sa.reset_on_restart = !ov.no_restart_reset && a.reset_on_restart.unwrap_or(true);
        sa.validate()?;
        sa.budget = budget(ov.budget_seconds, a.restarts, a.budget_seconds, &sa)?;

        let out_dir = match (&ov.out, &self.output.dir) {
            (Some(p), _) => p.clone(),
            (None, Some(p)) => self.resolve_path(p),
            (None, None) => PathBuf::from(DEFAULT_OUT_DIR),
        };

        Ok(RunConfig {
            instance,
            start_date,
            waitlist_cutoff,
            model,
            sa,
            out_dir,
        })
    }

    /// Applies a sweep cell on top of an already resolved base run.
    pub fn resolve_cell(
        &self,
        base: &RunConfig,
        cell: &CellSpec,
        ov: &Overrides,
    ) -> CliResult<RunConfig> {
        if cell.budget_seconds.is_some() && cell.restarts.is_some() {
            return Err(CliError::input(
                "cell budget_seconds and restarts are mutually exclusive",
            ));
        }
        let mut run = base.clone();
        run.model = cost_model(
            cell.weights.unwrap_or(base.model.weights),
            cell.penalties.unwrap_or(base.model.penalties),
            cell.break_limit.unwrap_or(base.model.break_limit),
        )?;
        let sa = &mut run.sa;
        sa.t0 = cell.t0.unwrap_or(sa.t0);
        sa.temp_limit = cell.temp_limit.unwrap_or(sa.temp_limit);
        sa.iters_per_temp = cell.iters_per_temp.unwrap_or(sa.iters_per_temp);
        sa.alpha = cell.alpha.unwrap_or(sa.alpha);
        sa.seed = ov.seed.or(cell.seed).unwrap_or(sa.seed);
        if let Some(reset) = cell.reset_on_restart {
            sa.reset_on_restart = reset && !ov.no_restart_reset;
        }
        sa.validate()?;
        let cell_budget = cell.restarts.is_some() || cell.budget_seconds.is_some();
        if cell_budget || ov.budget_seconds.is_some() {
            sa.budget = budget(ov.budget_seconds, cell.restarts, cell.budget_seconds, sa)?;
        } else {
            // Stage count may have changed; recompute from the top level.
            sa.budget = budget(None, self.anneal.restarts, self.anneal.budget_seconds, sa)?;
        }
        Ok(run)
    }
}

fn section_overrides(section: Option<&InstanceSection>) -> CliResult<InstanceOverrides> {
    let mut o = InstanceOverrides::default();
    if let Some(s) = section {
        o.days = s.days;
        o.start_weekday = s.start_weekday.as_deref().map(parse_weekday).transpose()?;
        o.travel_limit = s.travel_limit;
    }
    Ok(o)
}

fn apply_calendar(o: &mut InstanceOverrides, ov: &Overrides) {
    o.days = ov.days.or(o.days);
    o.start_weekday = ov.start_weekday.or(o.start_weekday);
}

fn cost_model(weights: Weights, penalties: Penalties, break_limit: usize) -> CliResult<CostModel> {
    penalties.validate()?;
    let all_finite = [weights.mile, weights.good, weights.bad]
        .iter()
        .all(|w| w.is_finite());
    if !all_finite {
        return Err(CliError::input(format!(
            "weights must be finite: {weights:?}"
        )));
    }
    if break_limit == 0 {
        return Err(CliError::input("break_limit must be at least 1"));
    }
    Ok(CostModel {
        weights,
        penalties,
        break_limit,
    })
}

fn budget(
    flag_seconds: Option<f64>,
    restarts: Option<u64>,
    seconds: Option<f64>,
    sa: &SaParams,
) -> CliResult<Budget> {
    let check = |s: f64| {
        if s.is_finite() && s >= 0.0 {
            Ok(s)
        } else {
            Err(CliError::input(format!(
                "budget {s} must be a non-negative number of seconds"
            )))
        }
    };
    Ok(match (flag_seconds, restarts, seconds) {
        (Some(s), _, _) => Budget::from_seconds(check(s)?, sa),
        (None, Some(k), _) => Budget::restarts(k),
        (None, None, Some(s)) => Budget::from_seconds(check(s)?, sa),
        (None, None, None) => Budget::from_seconds(DEFAULT_BUDGET_SECONDS, sa),
    })
}
