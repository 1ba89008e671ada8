//! Human-readable tour reports.
//!
//! The property block uses fixed key names so that reports can be parsed
//! back and checked against a fresh evaluation:
//!
//! ```text
//! Good days: 5
//! Bad Days: 3
//! Number of cities in the tour: 15
//! Total miles: 7960
//! Availability violation Type 1: 0
//! Availability violation Type 2: 0
//! Break violation: 0
//! Separation violation 1 day: 0
//! Separation violation more than 1 day: 0
//! ```

use std::collections::BTreeSet;
use std::fmt::Write as _;

use chrono::{Days, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::constraints::{evaluate, Evaluation, Violation};
use crate::model::{Availability, Instance, Tour, Weekday};

const KEYS: [&str; 9] = [
    "Good days",
    "Bad Days",
    "Number of cities in the tour",
    "Total miles",
    "Availability violation Type 1",
    "Availability violation Type 2",
    "Break violation",
    "Separation violation 1 day",
    "Separation violation more than 1 day",
];

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyBlock {
    pub good_days: usize,
    pub bad_days: usize,
    pub num_cities: usize,
    pub total_miles: u64,
    pub avail_type1: usize,
    pub avail_type2: usize,
    pub breaks: usize,
    pub sep_type1: usize,
    pub sep_type2: usize,
}

impl PropertyBlock {
    pub fn from_evaluation(tour: &Tour, ev: &Evaluation) -> Self {
        let c = ev.violations.counts;
        PropertyBlock {
            good_days: ev.objectives.good_days,
            bad_days: ev.objectives.bad_days,
            num_cities: tour
                .performances()
                .map(|(_, c)| c)
                .collect::<BTreeSet<_>>()
                .len(),
            total_miles: ev.objectives.total_miles,
            avail_type1: c.avail_type1,
            avail_type2: c.avail_type2,
            breaks: c.breaks,
            sep_type1: c.sep_type1,
            sep_type2: c.sep_type2,
        }
    }

    fn values(&self) -> [u64; 9] {
        [
            self.good_days as u64,
            self.bad_days as u64,
            self.num_cities as u64,
            self.total_miles,
            self.avail_type1 as u64,
            self.avail_type2 as u64,
            self.breaks as u64,
            self.sep_type1 as u64,
            self.sep_type2 as u64,
        ]
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (key, value) in KEYS.iter().zip(self.values()) {
            let _ = writeln!(out, "{key}: {value}");
        }
        out
    }

    /// Reads the nine property lines out of a report. Other lines are
    /// ignored; a missing or malformed key is an error.
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut values: [Option<u64>; 9] = [None; 9];
        for line in text.lines() {
            let Some((key, value)) = line.split_once(':') else {
                continue;
            };
            if let Some(k) = KEYS.iter().position(|&name| name == key.trim()) {
                let v = value
                    .trim()
                    .parse::<u64>()
                    .map_err(|_| format!("{key}: {:?} is not a count", value.trim()))?;
                values[k] = Some(v);
            }
        }
        let get = |k: usize| values[k].ok_or_else(|| format!("missing {:?}", KEYS[k]));
        Ok(PropertyBlock {
            good_days: get(0)? as usize,
            bad_days: get(1)? as usize,
            num_cities: get(2)? as usize,
            total_miles: get(3)?,
            avail_type1: get(4)? as usize,
            avail_type2: get(5)? as usize,
            breaks: get(6)? as usize,
            sep_type1: get(7)? as usize,
            sep_type2: get(8)? as usize,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleLine {
    pub day: usize,
    pub weekday: Weekday,
    pub label: String,
    pub city: usize,
    pub city_name: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TourReport {
    pub title: String,
    pub tour: Tour,
    pub complete: bool,
    pub properties: PropertyBlock,
    pub schedule: Vec<ScheduleLine>,
    pub violation_lines: Vec<String>,
    pub cost: Option<f64>,
}

/// Day labels: `Thu, day 10` by default, `Thu 24-Oct` when a start date is
/// known.
pub fn day_label(inst: &Instance, day: usize, start_date: Option<NaiveDate>) -> String {
    let weekday = inst.start_weekday().advance(day);
    match start_date.and_then(|d| d.checked_add_days(Days::new(day as u64))) {
        Some(date) => format!("{weekday} {}", date.format("%-d-%b")),
        None => format!("{weekday}, day {day}"),
    }
}

fn violation_lines(inst: &Instance, ev: &Evaluation, start_date: Option<NaiveDate>) -> Vec<String> {
    let city = |c: usize| format!("{} (city {c})", inst.city_name(c));
    let mut avail = Vec::new();
    let mut breaks = Vec::new();
    let mut sep = Vec::new();
    for v in &ev.violations.locations {
        match *v {
            Violation::Availability {
                day,
                city: c,
                status,
            } => {
                let what = match status {
                    Availability::RelativelyUnavailable => "relatively unavailable",
                    _ => "absolutely unavailable",
                };
                avail.push(format!(
                    "{} is {what} on {}",
                    city(c),
                    day_label(inst, day, start_date)
                ));
            }
            Violation::Break { start_day, limit } => breaks.push(format!(
                "{} consecutive performances from {} to {}",
                limit + 1,
                day_label(inst, start_day, start_date),
                day_label(inst, start_day + limit, start_date)
            )),
            Violation::Separation {
                day,
                next_day,
                from,
                to,
                required,
            } => {
                sep.push(format!(
                    "It normally takes {required} days to travel from {} to {}",
                    city(from),
                    city(to)
                ));
                sep.push(format!("Now it takes {} days", next_day - day));
            }
        }
    }
    let mut out = Vec::new();
    for (title, lines) in [
        ("Availability Violation:", avail),
        ("Break Violation:", breaks),
        ("Separation Violation:", sep),
    ] {
        if !lines.is_empty() {
            out.push(title.to_string());
            out.extend(lines);
        }
    }
    out
}

impl TourReport {
    /// Builds a report for a validated tour.
    pub fn build(
        title: impl Into<String>,
        tour: &Tour,
        inst: &Instance,
        break_limit: usize,
        start_date: Option<NaiveDate>,
    ) -> Self {
        let ev = evaluate(tour, inst, break_limit);
        let schedule = tour
            .performances()
            .map(|(day, city)| ScheduleLine {
                day,
                weekday: inst.start_weekday().advance(day),
                label: day_label(inst, day, start_date),
                city,
                city_name: inst.city_name(city).to_string(),
            })
            .collect();
        TourReport {
            title: title.into(),
            tour: tour.clone(),
            complete: tour.is_complete(inst).unwrap_or(false),
            properties: PropertyBlock::from_evaluation(tour, &ev),
            schedule,
            violation_lines: violation_lines(inst, &ev, start_date),
            cost: None,
        }
    }

    pub fn with_cost(mut self, cost: f64) -> Self {
        self.cost = Some(cost);
        self
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.title);
        let _ = writeln!(out, "{}", self.tour);
        if !self.complete {
            let _ = writeln!(
                out,
                "Warning: the tour does not visit every city exactly once"
            );
        }
        if let Some(cost) = self.cost {
            let _ = writeln!(out, "Cost: {cost}");
        }
        out.push_str("\nProperties:\n");
        out.push_str(&self.properties.render());
        out.push_str("\nSchedule:\n");
        for line in &self.schedule {
            let _ = writeln!(out, "{}, {}", line.label, line.city_name);
        }
        if !self.violation_lines.is_empty() {
            out.push('\n');
            for line in &self.violation_lines {
                let _ = writeln!(out, "{line}");
            }
        }
        out
    }
}
