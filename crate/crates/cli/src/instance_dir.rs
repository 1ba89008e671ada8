//! Instance directories: `availability.csv`, `miles.csv` and an
//! `instance.toml` holding the calendar.
//!
//! ```toml
//! availability = "availability.csv"
//! miles = "miles.csv"
//! days = 42
//! start_weekday = "mon"
//! start_date = "2019-10-14"   # optional, must fall on start_weekday
//! travel_limit = 500
//! waitlist_cutoff = 3
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};
use tourcast::ingest::{
    parse_instance, venue_grid_for, write_mile_matrix, IngestOptions, DEFAULT_WAITLIST_CUTOFF,
};
use tourcast::model::DEFAULT_TRAVEL_LIMIT;
use tourcast::{Calendar, Instance, Weekday};

use crate::error::{CliError, CliResult};

pub const INSTANCE_FILE: &str = "instance.toml";
pub const AVAILABILITY_FILE: &str = "availability.csv";
pub const MILES_FILE: &str = "miles.csv";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub availability: Option<String>,
    pub miles: Option<String>,
    pub days: Option<usize>,
    pub start_weekday: Option<String>,
    pub start_date: Option<String>,
    pub travel_limit: Option<u32>,
    pub waitlist_cutoff: Option<u32>,
}

/// Settings that take precedence over `instance.toml`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct InstanceOverrides {
    pub days: Option<usize>,
    pub start_weekday: Option<Weekday>,
    pub travel_limit: Option<u32>,
    pub waitlist_cutoff: Option<u32>,
}

#[derive(Debug, Clone)]
pub struct LoadedInstance {
    pub instance: Instance,
    pub start_date: Option<NaiveDate>,
    pub waitlist_cutoff: u32,
    pub dir: PathBuf,
}

pub fn parse_weekday(s: &str) -> CliResult<Weekday> {
    s.parse::<Weekday>().map_err(CliError::from)
}

pub fn parse_date(s: &str) -> CliResult<NaiveDate> {
    NaiveDate::parse_from_str(s.trim(), "%Y-%m-%d")
        .map_err(|e| CliError::input(format!("start date {s:?} is not YYYY-MM-DD: {e}")))
}

/// The date must fall on the instance's first weekday.
pub fn check_start_date(date: NaiveDate, inst: &Instance) -> CliResult<()> {
    let actual = date.weekday().num_days_from_monday() as usize;
    let expected = inst.start_weekday();
    if actual != expected.index() {
        return Err(CliError::input(format!(
            "start date {date} is a {} but the instance starts on a {expected}",
            Weekday::ALL[actual]
        )));
    }
    Ok(())
}

pub fn read_instance_file(dir: &Path) -> CliResult<Option<InstanceFile>> {
    let path = dir.join(INSTANCE_FILE);
    if !path.exists() {
        return Ok(None);
    }
    let text = fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
    toml::from_str(&text)
        .map(Some)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

pub fn load_instance_dir(dir: &Path, overrides: &InstanceOverrides) -> CliResult<LoadedInstance> {
    if !dir.is_dir() {
        return Err(CliError::input(format!(
            "instance directory {} does not exist",
            dir.display()
        )));
    }
    let file = read_instance_file(dir)?.unwrap_or_default();
    let days = overrides.days.or(file.days).ok_or_else(|| {
        CliError::input(format!(
            "{}: number of days unknown; add `days` to {INSTANCE_FILE} or pass --days",
            dir.display()
        ))
    })?;
    let start_weekday = match (overrides.start_weekday, &file.start_weekday) {
        (Some(w), _) => w,
        (None, Some(s)) => parse_weekday(s)?,
        (None, None) => {
            return Err(CliError::input(format!(
                "{}: start weekday unknown; add `start_weekday` to {INSTANCE_FILE} or pass --start-weekday",
                dir.display()
            )))
        }
    };
    let options = IngestOptions {
        travel_limit: overrides
            .travel_limit
            .or(file.travel_limit)
            .unwrap_or(DEFAULT_TRAVEL_LIMIT),
        waitlist_cutoff: overrides
            .waitlist_cutoff
            .or(file.waitlist_cutoff)
            .unwrap_or(DEFAULT_WAITLIST_CUTOFF),
    };
    let grid = dir.join(file.availability.as_deref().unwrap_or(AVAILABILITY_FILE));
    let miles = dir.join(file.miles.as_deref().unwrap_or(MILES_FILE));
    let instance = parse_instance(&grid, &miles, Calendar::new(days, start_weekday), options)?;
    let start_date = file.start_date.as_deref().map(parse_date).transpose()?;
    if let Some(date) = start_date {
        check_start_date(date, &instance)?;
    }
    Ok(LoadedInstance {
        instance,
        start_date,
        waitlist_cutoff: options.waitlist_cutoff,
        dir: dir.to_path_buf(),
    })
}

/// Writes `inst` as an instance directory that loads back to an equal
/// instance.
pub fn write_instance_dir(
    inst: &Instance,
    dir: &Path,
    waitlist_cutoff: u32,
    start_date: Option<NaiveDate>,
) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    fn csv_err(path: &Path, e: impl std::fmt::Display) -> CliError {
        CliError::input(format!("{}: {e}", path.display()))
    }

    let grid_path = dir.join(AVAILABILITY_FILE);
    let file = fs::File::create(&grid_path).map_err(|e| CliError::io(&grid_path, e))?;
    venue_grid_for(inst, waitlist_cutoff)
        .to_writer(file)
        .map_err(|e| csv_err(&grid_path, e))?;

    let mile_path = dir.join(MILES_FILE);
    let file = fs::File::create(&mile_path).map_err(|e| CliError::io(&mile_path, e))?;
    write_mile_matrix(file, inst.city_names(), inst.mile_matrix())
        .map_err(|e| csv_err(&mile_path, e))?;

    let meta = InstanceFile {
        availability: Some(AVAILABILITY_FILE.into()),
        miles: Some(MILES_FILE.into()),
        days: Some(inst.num_days()),
        start_weekday: Some(inst.start_weekday().short_name().to_ascii_lowercase()),
        start_date: start_date.map(|d| d.format("%Y-%m-%d").to_string()),
        travel_limit: Some(inst.travel_limit()),
        waitlist_cutoff: Some(waitlist_cutoff),
    };
    let meta_path = dir.join(INSTANCE_FILE);
    let text = toml::to_string(&meta).map_err(|e| CliError::input(e.to_string()))?;
    fs::write(&meta_path, text).map_err(|e| CliError::io(&meta_path, e))
}
