//! Domain types shared by every stage of the solver.
//!
//! Days are indexed from 0. City codes inside a [`Tour`] are 1-based (0 marks
//! a rest or travel day), while matrices are indexed by `code - 1`.

use std::fmt;
use std::ops::{Index, IndexMut};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Miles the band can cover in one day unless an instance says otherwise.
pub const DEFAULT_TRAVEL_LIMIT: u32 = 500;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone> Matrix<T> {
    pub fn filled(rows: usize, cols: usize, value: T) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    /// Builds a matrix from nested rows; every row must have the same length.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(nrows * ncols);
        for (r, row) in rows.into_iter().enumerate() {
            if row.len() != ncols {
                return Err(Error::Dimension(format!(
                    "row {r} has {} entries, expected {ncols}",
                    row.len()
                )));
            }
            data.extend(row);
        }
        Ok(Matrix {
            rows: nrows,
            cols: ncols,
            data,
        })
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows)
            .map(|r| self.data[r * self.cols..(r + 1) * self.cols].to_vec())
            .collect()
    }
}

impl<T> Matrix<T> {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &T {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Weekday {
    Mon,
    Tue,
    Wed,
    Thu,
    Fri,
    Sat,
    Sun,
}

impl Weekday {
    pub const ALL: [Weekday; 7] = [
        Weekday::Mon,
        Weekday::Tue,
        Weekday::Wed,
        Weekday::Thu,
        Weekday::Fri,
        Weekday::Sat,
        Weekday::Sun,
    ];

    /// Monday is 0.
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn advance(self, days: usize) -> Weekday {
        Weekday::ALL[(self.index() + days % 7) % 7]
    }

    pub fn is_good(self) -> bool {
        matches!(self, Weekday::Thu | Weekday::Fri)
    }

    pub fn is_bad(self) -> bool {
        matches!(self, Weekday::Mon | Weekday::Tue)
    }

    pub fn short_name(self) -> &'static str {
        match self {
            Weekday::Mon => "Mon",
            Weekday::Tue => "Tue",
            Weekday::Wed => "Wed",
            Weekday::Thu => "Thu",
            Weekday::Fri => "Fri",
            Weekday::Sat => "Sat",
            Weekday::Sun => "Sun",
        }
    }
}

impl fmt::Display for Weekday {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for Weekday {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        Weekday::ALL
            .into_iter()
            .find(|w| {
                let short = w.short_name().to_ascii_lowercase();
                lower.len() >= 3 && lower.starts_with(&short) && full_name(*w).starts_with(&lower)
            })
            .ok_or_else(|| Error::InvalidInstance(format!("unknown weekday {s:?}")))
    }
}

fn full_name(w: Weekday) -> &'static str {
    match w {
        Weekday::Mon => "monday",
        Weekday::Tue => "tuesday",
        Weekday::Wed => "wednesday",
        Weekday::Thu => "thursday",
        Weekday::Fri => "friday",
        Weekday::Sat => "saturday",
        Weekday::Sun => "sunday",
    }
}

/// Availability of a city on a given day.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Availability {
    Available,
    RelativelyUnavailable,
    AbsolutelyUnavailable,
}

impl Availability {
    /// 1, 0 and -1 respectively.
    pub fn code(self) -> i8 {
        match self {
            Availability::Available => 1,
            Availability::RelativelyUnavailable => 0,
            Availability::AbsolutelyUnavailable => -1,
        }
    }

    pub fn from_code(code: i8) -> Option<Self> {
        match code {
            1 => Some(Availability::Available),
            0 => Some(Availability::RelativelyUnavailable),
            -1 => Some(Availability::AbsolutelyUnavailable),
            _ => None,
        }
    }
}

/// Length of the planning period and the weekday of day 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Calendar {
    pub num_days: usize,
    pub start_weekday: Weekday,
}

impl Calendar {
    pub fn new(num_days: usize, start_weekday: Weekday) -> Self {
        Calendar {
            num_days,
            start_weekday,
        }
    }

    pub fn day_of_week(&self, day: usize) -> Result<Weekday> {
        if day >= self.num_days {
            return Err(Error::DayOutOfRange {
                index: day,
                num_days: self.num_days,
            });
        }
        Ok(self.start_weekday.advance(day))
    }
}

/// A tour scheduling problem: calendar, cities, distances and availability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    calendar: Calendar,
    city_names: Vec<String>,
    travel_limit: u32,
    mile: Matrix<u32>,
    day: Matrix<u32>,
    /// `num_days` rows by `num_cities` columns.
    availability: Matrix<Availability>,
}

impl Instance {
    /// Validates the inputs and derives the Day matrix from `mile`.
    pub fn new(
        calendar: Calendar,
        city_names: Vec<String>,
        mile: Matrix<u32>,
        availability: Matrix<Availability>,
        travel_limit: u32,
    ) -> Result<Self> {
        let m = city_names.len();
        if calendar.num_days == 0 {
            return Err(Error::InvalidInstance("calendar has no days".into()));
        }
        if mile.rows() != m || mile.cols() != m {
            return Err(Error::Dimension(format!(
                "mile matrix is {}x{} but there are {m} cities",
                mile.rows(),
                mile.cols()
            )));
        }
        if availability.rows() != calendar.num_days || availability.cols() != m {
            return Err(Error::Dimension(format!(
                "availability matrix is {}x{}, expected {}x{m}",
                availability.rows(),
                availability.cols(),
                calendar.num_days
            )));
        }
        if let Some(i) = (0..m).find(|&i| mile[(i, i)] != 0) {
            return Err(Error::InvalidInstance(format!(
                "mile matrix diagonal entry for city {} is {}",
                i + 1,
                mile[(i, i)]
            )));
        }
        let day = crate::ingest::derive_day_matrix(&mile, travel_limit)?;
        Ok(Instance {
            calendar,
            city_names,
            travel_limit,
            mile,
            day,
            availability,
        })
    }

    pub fn calendar(&self) -> Calendar {
        self.calendar
    }

    pub fn num_days(&self) -> usize {
        self.calendar.num_days
    }

    pub fn start_weekday(&self) -> Weekday {
        self.calendar.start_weekday
    }

    pub fn num_cities(&self) -> usize {
        self.city_names.len()
    }

    pub fn city_names(&self) -> &[String] {
        &self.city_names
    }

    /// Name for a 1-based city code.
    pub fn city_name(&self, code: usize) -> &str {
        &self.city_names[code - 1]
    }

    pub fn travel_limit(&self) -> u32 {
        self.travel_limit
    }

    pub fn mile_matrix(&self) -> &Matrix<u32> {
        &self.mile
    }

    pub fn day_matrix(&self) -> &Matrix<u32> {
        &self.day
    }

    pub fn availability_matrix(&self) -> &Matrix<Availability> {
        &self.availability
    }

    /// Miles from city code `from` to city code `to`.
    #[inline]
    pub fn miles(&self, from: usize, to: usize) -> u32 {
        self.mile[(from - 1, to - 1)]
    }

    /// Desirable travel days from city code `from` to city code `to`.
    #[inline]
    pub fn days_between(&self, from: usize, to: usize) -> u32 {
        self.day[(from - 1, to - 1)]
    }

    /// Availability of city code `city` on `day`.
    #[inline]
    pub fn availability(&self, day: usize, city: usize) -> Availability {
        self.availability[(day, city - 1)]
    }

    pub fn day_of_week(&self, day: usize) -> Result<Weekday> {
        self.calendar.day_of_week(day)
    }

    pub fn is_good_day(&self, day: usize) -> Result<bool> {
        Ok(self.day_of_week(day)?.is_good())
    }

    pub fn is_bad_day(&self, day: usize) -> Result<bool> {
        Ok(self.day_of_week(day)?.is_bad())
    }

    /// Fraction of (day, city) cells that are available.
    pub fn availability_density(&self) -> f64 {
        let total = self.num_days() * self.num_cities();
        if total == 0 {
            return 0.0;
        }
        let available = (0..self.num_days())
            .flat_map(|d| self.availability.row(d).iter())
            .filter(|&&a| a == Availability::Available)
            .count();
        available as f64 / total as f64
    }
}

/// Day-indexed vector of city codes; 0 marks a day without a performance.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Tour(Vec<usize>);

impl Tour {
    pub fn new(days: Vec<usize>) -> Self {
        Tour(days)
    }

    pub fn empty(num_days: usize) -> Self {
        Tour(vec![0; num_days])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    pub fn get(&self, day: usize) -> usize {
        self.0[day]
    }

    pub fn set(&mut self, day: usize, city: usize) {
        self.0[day] = city;
    }

    pub fn swap(&mut self, a: usize, b: usize) {
        self.0.swap(a, b);
    }

    /// `(day, city)` for every performance, in day order.
    pub fn performances(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.0.iter().copied().enumerate().filter(|&(_, c)| c != 0)
    }

    pub fn num_performances(&self) -> usize {
        self.0.iter().filter(|&&c| c != 0).count()
    }

    pub fn last_performance_day(&self) -> Option<usize> {
        self.0.iter().rposition(|&c| c != 0)
    }

    /// Checks the length and that every code lies in `0..=num_cities`.
    pub fn validate(&self, inst: &Instance) -> Result<()> {
        if self.len() != inst.num_days() {
            return Err(Error::TourLength {
                expected: inst.num_days(),
                actual: self.len(),
            });
        }
        let m = inst.num_cities();
        match self.0.iter().position(|&c| c > m) {
            Some(day) => Err(Error::UnknownCity {
                day,
                code: self.0[day],
                num_cities: m,
            }),
            None => Ok(()),
        }
    }

    /// True iff every city `1..=m` appears exactly once.
    pub fn is_complete(&self, inst: &Instance) -> Result<bool> {
        if self.len() != inst.num_days() {
            return Err(Error::TourLength {
                expected: inst.num_days(),
                actual: self.len(),
            });
        }
        let m = inst.num_cities();
        let mut seen = vec![false; m];
        for &c in &self.0 {
            if c == 0 {
                continue;
            }
            if c > m || seen[c - 1] {
                return Ok(false);
            }
            seen[c - 1] = true;
        }
        Ok(seen.into_iter().all(|s| s))
    }
}

impl fmt::Display for Tour {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("]")
    }
}

impl FromStr for Tour {
    type Err = Error;

    /// Comma-separated integers, optionally wrapped in brackets.
    fn from_str(s: &str) -> Result<Self> {
        let body = s.trim().trim_start_matches('[').trim_end_matches(']');
        if body.trim().is_empty() {
            return Ok(Tour(Vec::new()));
        }
        body.split(',')
            .map(|t| {
                t.trim().parse::<usize>().map_err(|_| {
                    Error::InvalidInstance(format!("bad city code {:?} in tour", t.trim()))
                })
            })
            .collect::<Result<Vec<_>>>()
            .map(Tour)
    }
}

impl From<Vec<usize>> for Tour {
    fn from(v: Vec<usize>) -> Self {
        Tour(v)
    }
}

/// Objective weights of the strict cost.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Weights {
    pub mile: f64,
    pub good: f64,
    pub bad: f64,
}

impl Default for Weights {
    /// Ten miles traded for one good day or one fewer bad day.
    fn default() -> Self {
        Weights {
            mile: 20.0,
            good: -200.0,
            bad: 200.0,
        }
    }
}

impl Weights {
    pub fn new(mile: f64, good: f64, bad: f64) -> Self {
        Weights { mile, good, bad }
    }

    /// Human-readable complaints when the signs do not describe a
    /// minimisation (miles and bad days costly, good days rewarded).
    pub fn sign_warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.mile <= 0.0 {
            out.push(format!("mile weight {} is not positive", self.mile));
        }
        if self.good >= 0.0 {
            out.push(format!("good-day weight {} is not negative", self.good));
        }
        if self.bad <= 0.0 {
            out.push(format!("bad-day weight {} is not positive", self.bad));
        }
        out
    }
}

/// Penalties for each violation type of the relaxed cost.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Penalties {
    pub avail1: f64,
    pub avail2: f64,
    pub breaks: f64,
    pub sep1: f64,
    pub sep2: f64,
}

impl Default for Penalties {
    fn default() -> Self {
        Penalties {
            avail1: 10_000.0,
            avail2: 1_000_000.0,
            breaks: 10_000.0,
            sep1: 10_000.0,
            sep2: 2_000_000.0,
        }
    }
}

impl Penalties {
    pub fn new(avail1: f64, avail2: f64, breaks: f64, sep1: f64, sep2: f64) -> Self {
        Penalties {
            avail1,
            avail2,
            breaks,
            sep1,
            sep2,
        }
    }

    pub fn zero() -> Self {
        Penalties::new(0.0, 0.0, 0.0, 0.0, 0.0)
    }

    pub fn as_array(&self) -> [f64; 5] {
        [self.avail1, self.avail2, self.breaks, self.sep1, self.sep2]
    }

    pub fn validate(&self) -> Result<()> {
        if self.as_array().iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidInstance(format!(
                "penalties must be finite and non-negative: {:?}",
                self.as_array()
            )));
        }
        Ok(())
    }
}

/// Total miles, good-day count and bad-day count of a tour.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Objectives {
    pub total_miles: u64,
    pub good_days: usize,
    pub bad_days: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny(days: usize, start: Weekday) -> Instance {
        Instance::new(
            Calendar::new(days, start),
            vec!["A".into(), "B".into()],
            Matrix::from_rows(vec![vec![0, 600], vec![700, 0]]).unwrap(),
            Matrix::filled(days, 2, Availability::Available),
            DEFAULT_TRAVEL_LIMIT,
        )
        .unwrap()
    }

    #[test]
    fn weekday_arithmetic() {
        let inst = tiny(14, Weekday::Mon);
        assert_eq!(inst.day_of_week(0).unwrap(), Weekday::Mon);
        assert_eq!(inst.day_of_week(7).unwrap(), Weekday::Mon);
        assert_eq!(inst.day_of_week(10).unwrap(), Weekday::Thu);
        assert!(matches!(
            inst.day_of_week(14),
            Err(Error::DayOutOfRange {
                index: 14,
                num_days: 14
            })
        ));
    }

    #[test]
    fn good_and_bad_days() {
        let inst = tiny(14, Weekday::Mon);
        assert!(inst.is_good_day(3).unwrap());
        assert!(inst.is_bad_day(0).unwrap());
        assert!(!inst.is_good_day(5).unwrap() && !inst.is_bad_day(5).unwrap());
        for d in 0..14 {
            assert!(!(inst.is_good_day(d).unwrap() && inst.is_bad_day(d).unwrap()));
            if d + 7 < 14 {
                assert_eq!(
                    inst.day_of_week(d).unwrap(),
                    inst.day_of_week(d + 7).unwrap()
                );
            }
        }
        assert!(inst.is_bad_day(99).is_err());
    }

    #[test]
    fn completeness() {
        let inst = tiny(3, Weekday::Mon);
        assert!(Tour::new(vec![1, 2, 0]).is_complete(&inst).unwrap());
        assert!(!Tour::new(vec![1, 1, 0]).is_complete(&inst).unwrap());
        assert!(!Tour::new(vec![1, 0, 0]).is_complete(&inst).unwrap());
        assert!(Tour::new(vec![1, 2]).is_complete(&inst).is_err());
    }

    #[test]
    fn day_matrix_is_derived() {
        let inst = tiny(3, Weekday::Mon);
        assert_eq!(inst.days_between(1, 2), 1);
        assert_eq!(inst.days_between(2, 1), 1);
        assert_eq!(inst.days_between(1, 1), 0);
    }

    #[test]
    fn rejects_bad_shapes() {
        let err = Instance::new(
            Calendar::new(3, Weekday::Mon),
            vec!["A".into()],
            Matrix::from_rows(vec![vec![5]]).unwrap(),
            Matrix::filled(3, 1, Availability::Available),
            500,
        );
        assert!(matches!(err, Err(Error::InvalidInstance(_))));
        let err = Instance::new(
            Calendar::new(3, Weekday::Mon),
            vec!["A".into()],
            Matrix::from_rows(vec![vec![0]]).unwrap(),
            Matrix::filled(2, 1, Availability::Available),
            500,
        );
        assert!(matches!(err, Err(Error::Dimension(_))));
    }

    #[test]
    fn weekday_parsing() {
        assert_eq!("mon".parse::<Weekday>().unwrap(), Weekday::Mon);
        assert_eq!("Thursday".parse::<Weekday>().unwrap(), Weekday::Thu);
        assert_eq!("SUN".parse::<Weekday>().unwrap(), Weekday::Sun);
        assert!("mo".parse::<Weekday>().is_err());
        assert!("funday".parse::<Weekday>().is_err());
    }

    #[test]
    fn tour_text_roundtrip() {
        let t: Tour = "[0, 3, 1,2]".parse().unwrap();
        assert_eq!(t.as_slice(), &[0, 3, 1, 2]);
        assert_eq!(t.to_string(), "[0, 3, 1, 2]");
        assert!("1,x".parse::<Tour>().is_err());
    }

    #[test]
    fn default_weights_trade_ten_miles_per_day() {
        let w = Weights::default();
        assert_eq!(w.good.abs() / w.mile, 10.0);
        assert!(w.sign_warnings().is_empty());
        assert_eq!(Weights::new(-1.0, 1.0, -1.0).sign_warnings().len(), 3);
    }
}
