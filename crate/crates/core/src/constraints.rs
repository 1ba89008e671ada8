//! Violation counting and objective values for a tour.
//!
//! Five violation types are tracked:
//!
//! | type | meaning |
//! |------|---------|
//! | availability 1 | performance on a relatively unavailable cell |
//! | availability 2 | performance on an absolutely unavailable cell |
//! | break | `limit + 1` consecutive performance days (one per window start) |
//! | separation 1 | gap to the next performance one day short of the Day matrix |
//! | separation 2 | gap two or more days short |
//!
//! Callers must pass a tour that satisfies [`Tour::validate`]; out-of-range
//! codes panic.

use serde::{Deserialize, Serialize};

use crate::model::{Availability, Instance, Objectives, Tour};

/// At most this many consecutive performances before a rest day.
pub const DEFAULT_BREAK_LIMIT: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ViolationKind {
    AvailabilityType1,
    AvailabilityType2,
    Break,
    SeparationType1,
    SeparationType2,
}

/// Where a violation happened and what caused it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    Availability {
        day: usize,
        city: usize,
        status: Availability,
    },
    /// The window `start_day..=start_day + limit` is all performances.
    Break { start_day: usize, limit: usize },
    Separation {
        day: usize,
        next_day: usize,
        from: usize,
        to: usize,
        required: u32,
    },
}

impl Violation {
    pub fn kind(&self) -> ViolationKind {
        match *self {
            Violation::Availability { status, .. } => match status {
                Availability::AbsolutelyUnavailable => ViolationKind::AvailabilityType2,
                _ => ViolationKind::AvailabilityType1,
            },
            Violation::Break { .. } => ViolationKind::Break,
            Violation::Separation {
                day,
                next_day,
                required,
                ..
            } => {
                if required as usize - (next_day - day) == 1 {
                    ViolationKind::SeparationType1
                } else {
                    ViolationKind::SeparationType2
                }
            }
        }
    }

    pub fn day(&self) -> usize {
        match *self {
            Violation::Availability { day, .. } | Violation::Separation { day, .. } => day,
            Violation::Break { start_day, .. } => start_day,
        }
    }
}

/// The five violation counts `y1..y5`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ViolationCounts {
    pub avail_type1: usize,
    pub avail_type2: usize,
    pub breaks: usize,
    pub sep_type1: usize,
    pub sep_type2: usize,
}

impl ViolationCounts {
    pub fn as_array(&self) -> [usize; 5] {
        [
            self.avail_type1,
            self.avail_type2,
            self.breaks,
            self.sep_type1,
            self.sep_type2,
        ]
    }

    pub fn from_array(y: [usize; 5]) -> Self {
        ViolationCounts {
            avail_type1: y[0],
            avail_type2: y[1],
            breaks: y[2],
            sep_type1: y[3],
            sep_type2: y[4],
        }
    }

    pub fn total(&self) -> usize {
        self.as_array().iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.total() == 0
    }

    pub fn availability(&self) -> usize {
        self.avail_type1 + self.avail_type2
    }

    fn bump(&mut self, kind: ViolationKind) {
        match kind {
            ViolationKind::AvailabilityType1 => self.avail_type1 += 1,
            ViolationKind::AvailabilityType2 => self.avail_type2 += 1,
            ViolationKind::Break => self.breaks += 1,
            ViolationKind::SeparationType1 => self.sep_type1 += 1,
            ViolationKind::SeparationType2 => self.sep_type2 += 1,
        }
    }
}

/// Counts together with every violation location, in the order availability,
/// break, separation (each by day).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViolationReport {
    pub counts: ViolationCounts,
    pub locations: Vec<Violation>,
}

impl ViolationReport {
    pub fn of_kind(&self, kind: ViolationKind) -> impl Iterator<Item = &Violation> {
        self.locations.iter().filter(move |v| v.kind() == kind)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evaluation {
    pub objectives: Objectives,
    pub violations: ViolationReport,
}

impl Evaluation {
    pub fn summary(&self) -> Summary {
        Summary {
            objectives: self.objectives,
            counts: self.violations.counts,
        }
    }
}

/// Objectives and counts without locations; what the annealer needs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Summary {
    pub objectives: Objectives,
    pub counts: ViolationCounts,
}

/// Returns `(y1, y2, locations)`.
pub fn count_availability_violations(
    tour: &Tour,
    inst: &Instance,
) -> (usize, usize, Vec<Violation>) {
    let mut locations = Vec::new();
    let (mut y1, mut y2) = (0, 0);
    for (day, city) in tour.performances() {
        let status = inst.availability(day, city);
        match status {
            Availability::Available => continue,
            Availability::RelativelyUnavailable => y1 += 1,
            Availability::AbsolutelyUnavailable => y2 += 1,
        }
        locations.push(Violation::Availability { day, city, status });
    }
    (y1, y2, locations)
}

/// One violation for every start `i` such that days `i..=i + limit` all hold
/// performances.
pub fn count_break_violations(tour: &Tour, limit: usize) -> (usize, Vec<Violation>) {
    let v = tour.as_slice();
    let locations: Vec<Violation> = v
        .windows(limit + 1)
        .enumerate()
        .filter(|(_, w)| w.iter().all(|&c| c != 0))
        .map(|(start_day, _)| Violation::Break { start_day, limit })
        .collect();
    (locations.len(), locations)
}

/// Returns `(y4, y5, locations)`. Each performance is compared with the next
/// one; the last performance has no successor.
pub fn count_separation_violations(tour: &Tour, inst: &Instance) -> (usize, usize, Vec<Violation>) {
    let mut locations = Vec::new();
    let (mut y4, mut y5) = (0, 0);
    let mut prev: Option<(usize, usize)> = None;
    for (next_day, to) in tour.performances() {
        if let Some((day, from)) = prev {
            let required = inst.days_between(from, to);
            let gap = next_day - day;
            if (required as usize) > gap {
                if required as usize - gap == 1 {
                    y4 += 1;
                } else {
                    y5 += 1;
                }
                locations.push(Violation::Separation {
                    day,
                    next_day,
                    from,
                    to,
                    required,
                });
            }
        }
        prev = Some((next_day, to));
    }
    (y4, y5, locations)
}

pub fn objectives(tour: &Tour, inst: &Instance) -> Objectives {
    let mut obj = Objectives::default();
    let mut prev = None;
    for (day, city) in tour.performances() {
        let weekday = inst.start_weekday().advance(day);
        obj.good_days += weekday.is_good() as usize;
        obj.bad_days += weekday.is_bad() as usize;
        if let Some(from) = prev {
            obj.total_miles += inst.miles(from, city) as u64;
        }
        prev = Some(city);
    }
    obj
}

/// Full evaluation with violation locations.
pub fn evaluate(tour: &Tour, inst: &Instance, break_limit: usize) -> Evaluation {
    let (y1, y2, mut locations) = count_availability_violations(tour, inst);
    let (y3, breaks) = count_break_violations(tour, break_limit);
    let (y4, y5, separations) = count_separation_violations(tour, inst);
    locations.extend(breaks);
    locations.extend(separations);
    Evaluation {
        objectives: objectives(tour, inst),
        violations: ViolationReport {
            counts: ViolationCounts::from_array([y1, y2, y3, y4, y5]),
            locations,
        },
    }
}

/// Single pass over the tour producing the same numbers as [`evaluate`]
/// without allocating.
pub fn summarize(tour: &[usize], inst: &Instance, break_limit: usize) -> Summary {
    let mut s = Summary::default();
    let mut weekday = inst.start_weekday().index();
    let mut run = 0usize;
    let mut prev: Option<(usize, usize)> = None;
    for (day, &city) in tour.iter().enumerate() {
        if city == 0 {
            run = 0;
        } else {
            run += 1;
            if run > break_limit {
                s.counts.breaks += 1;
            }
            match inst.availability(day, city) {
                Availability::Available => {}
                Availability::RelativelyUnavailable => s.counts.avail_type1 += 1,
                Availability::AbsolutelyUnavailable => s.counts.avail_type2 += 1,
            }
            // Mon = 0: bad on 0, 1; good on 3, 4.
            match weekday {
                0 | 1 => s.objectives.bad_days += 1,
                3 | 4 => s.objectives.good_days += 1,
                _ => {}
            }
            if let Some((pday, from)) = prev {
                s.objectives.total_miles += inst.miles(from, city) as u64;
                let required = inst.days_between(from, city) as usize;
                let gap = day - pday;
                if required > gap {
                    s.counts.bump(if required - gap == 1 {
                        ViolationKind::SeparationType1
                    } else {
                        ViolationKind::SeparationType2
                    });
                }
            }
            prev = Some((day, city));
        }
        weekday = if weekday == 6 { 0 } else { weekday + 1 };
    }
    s
}

/// Every constraint holds: each performance sits on an available cell and
/// no break or separation requirement is violated.
pub fn is_strictly_feasible(tour: &Tour, inst: &Instance, break_limit: usize) -> bool {
    tour.performances()
        .all(|(day, city)| inst.availability(day, city) == Availability::Available)
        && summarize(tour.as_slice(), inst, break_limit)
            .counts
            .is_zero()
}
