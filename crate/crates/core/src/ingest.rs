//! Reading venue availability grids and mileage matrices, and generating
//! random instances in the same shape.
//!
//! A grid CSV has one column per venue: the first row holds venue names, the
//! second row the city each venue belongs to, and every following row is one
//! day of status tokens. Cities are numbered by their first appearance in the
//! second row. The mileage CSV has a header row of city names in that same
//! order followed by `m` rows of `m` integers.

use std::fmt;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Availability, Calendar, Instance, Matrix, Weekday, DEFAULT_TRAVEL_LIMIT};

pub const DEFAULT_WAITLIST_CUTOFF: u32 = 3;

/// Booking status of a single venue on a single day.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VenueStatus {
    Open,
    Confirmed,
    OpenHold,
    Pending,
    /// Position on the waitlist, at least 1.
    Waitlist(u32),
    NoInfo,
}

impl FromStr for VenueStatus {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let token = s.trim().to_ascii_lowercase();
        let status = match token.as_str() {
            "" => VenueStatus::NoInfo,
            "o" => VenueStatus::Open,
            "c" => VenueStatus::Confirmed,
            "o/h" => VenueStatus::OpenHold,
            "p" => VenueStatus::Pending,
            t => {
                let pos = t
                    .strip_suffix('h')
                    .filter(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
                    .and_then(|d| d.parse::<u32>().ok())
                    .filter(|&k| k >= 1)
                    .ok_or_else(|| s.to_string())?;
                VenueStatus::Waitlist(pos)
            }
        };
        Ok(status)
    }
}

impl fmt::Display for VenueStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VenueStatus::Open => f.write_str("o"),
            VenueStatus::Confirmed => f.write_str("c"),
            VenueStatus::OpenHold => f.write_str("o/h"),
            VenueStatus::Pending => f.write_str("p"),
            VenueStatus::Waitlist(k) => write!(f, "{k}h"),
            VenueStatus::NoInfo => Ok(()),
        }
    }
}

/// Maps a venue status onto the three-level availability scale.
///
/// Pending venues are booked by another artist and are treated like
/// confirmed ones.
pub fn classify_status(status: VenueStatus, waitlist_cutoff: u32) -> Availability {
    match status {
        VenueStatus::Open | VenueStatus::OpenHold => Availability::Available,
        VenueStatus::Waitlist(k) if k <= waitlist_cutoff => Availability::Available,
        VenueStatus::Waitlist(_) => Availability::RelativelyUnavailable,
        VenueStatus::Confirmed | VenueStatus::NoInfo | VenueStatus::Pending => {
            Availability::AbsolutelyUnavailable
        }
    }
}

/// City-level availability from its venues: any available venue makes the
/// city available, and it is absolutely unavailable only if every venue is.
pub fn merge_city(codes: &[Availability]) -> Result<Availability> {
    if codes.is_empty() {
        return Err(Error::EmptyMerge);
    }
    if codes.contains(&Availability::Available) {
        Ok(Availability::Available)
    } else if codes
        .iter()
        .all(|&c| c == Availability::AbsolutelyUnavailable)
    {
        Ok(Availability::AbsolutelyUnavailable)
    } else {
        Ok(Availability::RelativelyUnavailable)
    }
}

/// `day[i][j] = floor(mile[i][j] / travel_limit)`.
pub fn derive_day_matrix(mile: &Matrix<u32>, travel_limit: u32) -> Result<Matrix<u32>> {
    if travel_limit == 0 {
        return Err(Error::TravelLimit(travel_limit));
    }
    Ok(mile.map(|&miles| miles / travel_limit))
}

/// Raw venue-level availability before merging.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VenueGrid {
    /// `(venue name, city name)` per column.
    pub venues: Vec<(String, String)>,
    /// One row per day, one entry per venue.
    pub statuses: Vec<Vec<VenueStatus>>,
}

impl VenueGrid {
    pub fn num_days(&self) -> usize {
        self.statuses.len()
    }

    /// City names in order of first appearance.
    pub fn cities(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for (_, city) in &self.venues {
            if !out.contains(city) {
                out.push(city.clone());
            }
        }
        out
    }

    pub fn from_reader<R: Read>(reader: R, source: &Path) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .from_reader(reader);
        let mut records = rdr.records();
        let mut next_row = |what: &str| -> Result<Vec<String>> {
            match records.next() {
                Some(rec) => Ok(rec
                    .map_err(|e| Error::csv(source, e))?
                    .iter()
                    .map(|s| s.trim().to_string())
                    .collect()),
                None => Err(Error::parse(source, format!("missing {what} row"))),
            }
        };
        let names = next_row("venue name")?;
        let cities = next_row("city name")?;
        if names.len() != cities.len() {
            return Err(Error::parse(
                source,
                format!(
                    "{} venue names but {} city names",
                    names.len(),
                    cities.len()
                ),
            ));
        }
        if let Some(col) = cities.iter().position(String::is_empty) {
            return Err(Error::parse(
                source,
                format!("venue {:?} (column {}) has no city", names[col], col + 1),
            ));
        }
        let width = names.len();
        let mut statuses = Vec::new();
        for (offset, rec) in records.enumerate() {
            let rec = rec.map_err(|e| Error::csv(source, e))?;
            // Row numbers are 1-based and count the two header rows.
            let row = offset + 3;
            if rec.len() > width && rec.iter().skip(width).any(|c| !c.trim().is_empty()) {
                return Err(Error::parse(
                    source,
                    format!("row {row} has {} cells, expected {width}", rec.len()),
                ));
            }
            let mut day = Vec::with_capacity(width);
            for column in 0..width {
                let cell = rec.get(column).unwrap_or("");
                let status = cell
                    .parse::<VenueStatus>()
                    .map_err(|token| Error::UnknownStatus {
                        token,
                        row,
                        column: column + 1,
                    })?;
                day.push(status);
            }
            statuses.push(day);
        }
        Ok(VenueGrid {
            venues: names.into_iter().zip(cities).collect(),
            statuses,
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_reader(file, path)
    }

    pub fn to_writer<W: Write>(&self, writer: W) -> csv::Result<()> {
        let mut wtr = csv::WriterBuilder::new()
            .flexible(false)
            .from_writer(writer);
        wtr.write_record(self.venues.iter().map(|(v, _)| v.as_str()))?;
        wtr.write_record(self.venues.iter().map(|(_, c)| c.as_str()))?;
        for day in &self.statuses {
            wtr.write_record(day.iter().map(ToString::to_string))?;
        }
        wtr.flush()?;
        Ok(())
    }

    /// Merged `num_days x num_cities` availability, cities numbered by
    /// first appearance.
    pub fn availability(
        &self,
        waitlist_cutoff: u32,
    ) -> Result<(Vec<String>, Matrix<Availability>)> {
        let cities = self.cities();
        let columns: Vec<Vec<usize>> = cities
            .iter()
            .map(|city| {
                self.venues
                    .iter()
                    .enumerate()
                    .filter(|(_, (_, c))| c == city)
                    .map(|(i, _)| i)
                    .collect()
            })
            .collect();
        let mut rows = Vec::with_capacity(self.num_days());
        for day in &self.statuses {
            let row = columns
                .iter()
                .map(|cols| {
                    let codes: Vec<Availability> = cols
                        .iter()
                        .map(|&v| classify_status(day[v], waitlist_cutoff))
                        .collect();
                    merge_city(&codes)
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        let matrix = if rows.is_empty() {
            Matrix::filled(0, cities.len(), Availability::AbsolutelyUnavailable)
        } else {
            Matrix::from_rows(rows)?
        };
        Ok((cities, matrix))
    }
}

/// Reads a square mileage CSV with a header row of city names.
pub fn read_mile_matrix<R: Read>(reader: R, source: &Path) -> Result<(Vec<String>, Matrix<u32>)> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let names: Vec<String> = rdr
        .headers()
        .map_err(|e| Error::csv(source, e))?
        .iter()
        .map(str::to_string)
        .collect();
    let m = names.len();
    let mut rows = Vec::with_capacity(m);
    for (r, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::csv(source, e))?;
        if rec.len() != m {
            return Err(Error::Dimension(format!(
                "{}: mile row {} has {} entries, expected {m}",
                source.display(),
                r + 1,
                rec.len()
            )));
        }
        let row = rec
            .iter()
            .map(|cell| {
                cell.parse::<u32>().map_err(|_| {
                    Error::parse(
                        source,
                        format!("row {}: {cell:?} is not a non-negative integer", r + 1),
                    )
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    if rows.len() != m {
        return Err(Error::Dimension(format!(
            "{}: mile matrix has {} rows for {m} cities",
            source.display(),
            rows.len()
        )));
    }
    let matrix = if m == 0 {
        Matrix::filled(0, 0, 0)
    } else {
        Matrix::from_rows(rows)?
    };
    Ok((names, matrix))
}

pub fn write_mile_matrix<W: Write>(
    writer: W,
    names: &[String],
    mile: &Matrix<u32>,
) -> csv::Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(names)?;
    for r in 0..mile.rows() {
        wtr.write_record(mile.row(r).iter().map(ToString::to_string))?;
    }
    wtr.flush()?;
    Ok(())
}

/// Knobs that affect how raw data becomes an [`Instance`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestOptions {
    pub travel_limit: u32,
    pub waitlist_cutoff: u32,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions {
            travel_limit: DEFAULT_TRAVEL_LIMIT,
            waitlist_cutoff: DEFAULT_WAITLIST_CUTOFF,
        }
    }
}

/// Assembles an instance from an already-read grid and mileage matrix.
pub fn build_instance(
    grid: &VenueGrid,
    mile_names: &[String],
    mile: Matrix<u32>,
    calendar: Calendar,
    options: IngestOptions,
) -> Result<Instance> {
    if grid.num_days() != calendar.num_days {
        return Err(Error::Dimension(format!(
            "availability grid has {} days but the calendar has {}",
            grid.num_days(),
            calendar.num_days
        )));
    }
    let (cities, availability) = grid.availability(options.waitlist_cutoff)?;
    if let Some(city) = cities.iter().find(|c| !mile_names.contains(c)) {
        return Err(Error::Dimension(format!(
            "venue city {city:?} does not appear in the mile matrix"
        )));
    }
    if mile_names != cities.as_slice() {
        return Err(Error::Dimension(format!(
            "mile matrix cities {mile_names:?} do not match grid city order {cities:?}"
        )));
    }
    Instance::new(calendar, cities, mile, availability, options.travel_limit)
}

/// Reads both CSV files and builds the instance.
pub fn parse_instance(
    grid_path: &Path,
    mile_path: &Path,
    calendar: Calendar,
    options: IngestOptions,
) -> Result<Instance> {
    let grid = VenueGrid::read(grid_path)?;
    let file = File::open(mile_path).map_err(|e| Error::io(mile_path, e))?;
    let (names, mile) = read_mile_matrix(file, mile_path)?;
    build_instance(&grid, &names, mile, calendar, options)
}

/// One venue per city, with a status token that classifies back to the
/// city's availability under `waitlist_cutoff`. Tokens rotate through every
/// status that maps to the same level so a round trip exercises them all.
pub fn venue_grid_for(inst: &Instance, waitlist_cutoff: u32) -> VenueGrid {
    let available: Vec<VenueStatus> = [VenueStatus::Open, VenueStatus::OpenHold]
        .into_iter()
        .chain((1..=waitlist_cutoff.min(9)).map(VenueStatus::Waitlist))
        .collect();
    let relative: Vec<VenueStatus> = (1..=3)
        .map(|k| VenueStatus::Waitlist(waitlist_cutoff + k))
        .collect();
    let absolute = [
        VenueStatus::Confirmed,
        VenueStatus::Pending,
        VenueStatus::NoInfo,
    ];

    let m = inst.num_cities();
    let statuses = (0..inst.num_days())
        .map(|d| {
            (0..m)
                .map(|c| {
                    let k = d * 7 + c * 3;
                    match inst.availability_matrix()[(d, c)] {
                        Availability::Available => available[k % available.len()],
                        Availability::RelativelyUnavailable => relative[k % relative.len()],
                        Availability::AbsolutelyUnavailable => absolute[k % absolute.len()],
                    }
                })
                .collect()
        })
        .collect();
    VenueGrid {
        venues: inst
            .city_names()
            .iter()
            .map(|c| (format!("{c} Hall"), c.clone()))
            .collect(),
        statuses,
    }
}

/// Parameters of the random instance generator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorParams {
    pub num_cities: usize,
    pub num_days: usize,
    pub start_weekday: Weekday,
    pub p_available: f64,
    pub p_relative: f64,
    /// Inclusive bounds for off-diagonal mileages.
    pub mile_range: (u32, u32),
    pub travel_limit: u32,
    /// Draw the return leg within the same travel-limit bucket so the Day
    /// matrix comes out symmetric.
    pub symmetric_days: bool,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams {
            num_cities: 15,
            num_days: 42,
            start_weekday: Weekday::Mon,
            p_available: 0.6,
            p_relative: 0.15,
            mile_range: (80, 1400),
            travel_limit: DEFAULT_TRAVEL_LIMIT,
            symmetric_days: false,
        }
    }
}

impl GeneratorParams {
    pub fn validate(&self) -> Result<()> {
        let prob = |p: f64| (0.0..=1.0).contains(&p);
        if !prob(self.p_available) || !prob(self.p_relative) {
            return Err(Error::Generator(format!(
                "probabilities must lie in [0, 1]: p_available={}, p_relative={}",
                self.p_available, self.p_relative
            )));
        }
        if self.p_available + self.p_relative > 1.0 + 1e-12 {
            return Err(Error::Generator(format!(
                "p_available + p_relative = {} exceeds 1",
                self.p_available + self.p_relative
            )));
        }
        if self.num_cities == 0 || self.num_days == 0 {
            return Err(Error::Generator(
                "need at least one city and one day".into(),
            ));
        }
        if self.mile_range.0 > self.mile_range.1 {
            return Err(Error::Generator(format!(
                "mile range {:?} is empty",
                self.mile_range
            )));
        }
        if self.travel_limit == 0 {
            return Err(Error::TravelLimit(0));
        }
        Ok(())
    }
}

/// Draws a random instance. Availability cells are sampled first (row by
/// row), then the mileage matrix; the same `(params, seed)` always yields the
/// same instance.
pub fn generate_random_instance(params: &GeneratorParams, seed: u64) -> Result<Instance> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (m, n) = (params.num_cities, params.num_days);

    let mut availability = Matrix::filled(n, m, Availability::AbsolutelyUnavailable);
    for d in 0..n {
        for c in 0..m {
            let u: f64 = rng.random();
            availability[(d, c)] = if u < params.p_available {
                Availability::Available
            } else if u < params.p_available + params.p_relative {
                Availability::RelativelyUnavailable
            } else {
                Availability::AbsolutelyUnavailable
            };
        }
    }

    let (lo, hi) = params.mile_range;
    let limit = params.travel_limit;
    let mut mile = Matrix::filled(m, m, 0u32);
    for i in 0..m {
        for j in 0..m {
            if i == j || (params.symmetric_days && j < i) {
                continue;
            }
            let there = rng.random_range(lo..=hi);
            mile[(i, j)] = there;
            if params.symmetric_days {
                let bucket = there / limit * limit;
                let back_lo = bucket.max(lo);
                let back_hi = bucket.saturating_add(limit - 1).min(hi);
                mile[(j, i)] = rng.random_range(back_lo..=back_hi);
            }
        }
    }

    let names = (1..=m).map(|k| format!("City {k}")).collect();
    Instance::new(
        Calendar::new(n, params.start_weekday),
        names,
        mile,
        availability,
        params.travel_limit,
    )
}
