//! Exhaustive search over complete tours, for instances small enough to
//! enumerate.
//!
//! The recount here is deliberately naive and shares no code with
//! [`crate::constraints`] or [`crate::cost`]: it serves as an independent
//! check of both.

use serde::{Deserialize, Serialize};

use crate::anneal::CostModel;
use crate::error::{Error, Result};
use crate::model::{Instance, Objectives, Tour};

pub const DEFAULT_CAP: u128 = 1_000_000;

/// Number of complete tours: `n! / (n - m)!`, zero when `m > n`.
pub fn complete_tour_count(num_days: usize, num_cities: usize) -> u128 {
    if num_cities > num_days {
        return 0;
    }
    (0..num_cities).fold(1u128, |acc, k| acc.saturating_mul((num_days - k) as u128))
}

/// Every assignment of the cities to distinct days, in lexicographic order
/// of the tour vectors.
#[derive(Debug, Clone)]
pub struct CompleteTours {
    m: usize,
    tour: Vec<usize>,
    used: Vec<bool>,
    state: IterState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum IterState {
    Fresh,
    Running,
    Done,
}

impl CompleteTours {
    fn placed_before(&self, day: usize) -> usize {
        self.tour[..day].iter().filter(|&&c| c != 0).count()
    }

    /// Smallest valid value for every day from `from` on.
    fn fill_from(&mut self, from: usize) {
        let n = self.tour.len();
        let mut placed = self.placed_before(from);
        for d in from..n {
            let days_after = n - d - 1;
            if days_after >= self.m - placed {
                self.tour[d] = 0;
            } else {
                let c = (1..=self.m)
                    .find(|&c| !self.used[c - 1])
                    .expect("a city is left");
                self.used[c - 1] = true;
                self.tour[d] = c;
                placed += 1;
            }
        }
    }
}

impl Iterator for CompleteTours {
    type Item = Tour;

    fn next(&mut self) -> Option<Tour> {
        match self.state {
            IterState::Done => return None,
            IterState::Fresh => {
                self.state = IterState::Running;
                self.fill_from(0);
                return Some(Tour::new(self.tour.clone()));
            }
            IterState::Running => {}
        }
        let n = self.tour.len();
        for d in (0..n).rev() {
            let cur = self.tour[d];
            if cur != 0 {
                self.used[cur - 1] = false;
            }
            let next = (cur + 1..=self.m).find(|&c| !self.used[c - 1]);
            if let Some(c) = next {
                self.used[c - 1] = true;
                self.tour[d] = c;
                self.fill_from(d + 1);
                return Some(Tour::new(self.tour.clone()));
            }
            self.tour[d] = 0;
        }
        self.state = IterState::Done;
        None
    }
}

/// Lazily enumerates complete tours, refusing when there are more than `cap`.
pub fn enumerate_complete_tours(inst: &Instance, cap: u128) -> Result<CompleteTours> {
    let (n, m) = (inst.num_days(), inst.num_cities());
    let count = complete_tour_count(n, m);
    if count > cap {
        return Err(Error::EnumerationCap { count, cap });
    }
    Ok(CompleteTours {
        m,
        tour: vec![0; n],
        used: vec![false; m],
        state: if count == 0 {
            IterState::Done
        } else {
            IterState::Fresh
        },
    })
}

/// Objectives and `[y1, y2, y3, y4, y5]` counted straight from the
/// definitions.
pub fn recount(tour: &Tour, inst: &Instance, break_limit: usize) -> (Objectives, [usize; 5]) {
    let v = tour.as_slice();
    let n = v.len();
    let avail = inst.availability_matrix();
    let day = inst.day_matrix();
    let mile = inst.mile_matrix();
    let first_weekday = inst.start_weekday().index();

    let mut y = [0usize; 5];
    let mut miles = 0u64;
    let mut good = 0;
    let mut bad = 0;

    for i in 0..n {
        if v[i] == 0 {
            continue;
        }
        match avail[(i, v[i] - 1)].code() {
            1 => {}
            0 => y[0] += 1,
            _ => y[1] += 1,
        }
        match (first_weekday + i) % 7 {
            3 | 4 => good += 1,
            0 | 1 => bad += 1,
            _ => {}
        }
        let mut j = i + 1;
        while j < n && v[j] == 0 {
            j += 1;
        }
        if j < n {
            miles += mile[(v[i] - 1, v[j] - 1)] as u64;
            let shortfall = day[(v[i] - 1, v[j] - 1)] as i64 - (j - i) as i64;
            if shortfall == 1 {
                y[3] += 1;
            } else if shortfall >= 2 {
                y[4] += 1;
            }
        }
    }

    for i in 0..n {
        if i + break_limit >= n {
            break;
        }
        let product = v[i..=i + break_limit]
            .iter()
            .fold(1u128, |p, &c| p.saturating_mul(c as u128));
        if product != 0 {
            y[2] += 1;
        }
    }

    (
        Objectives {
            total_miles: miles,
            good_days: good,
            bad_days: bad,
        },
        y,
    )
}

/// Relaxed cost from a [`recount`].
pub fn recount_cost(tour: &Tour, inst: &Instance, model: &CostModel) -> f64 {
    let (obj, y) = recount(tour, inst, model.break_limit);
    let w = &model.weights;
    let p = &model.penalties;
    let objective = w.mile * obj.total_miles as f64
        + w.good * obj.good_days as f64
        + w.bad * obj.bad_days as f64;
    let penalty = p.avail1 * y[0] as f64
        + p.avail2 * y[1] as f64
        + p.breaks * y[2] as f64
        + p.sep1 * y[3] as f64
        + p.sep2 * y[4] as f64;
    objective + penalty
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub best_tour: Tour,
    pub best_cost: f64,
    pub num_enumerated: u64,
    /// Tours sharing the optimal cost, the returned one included.
    pub ties: u64,
}

/// Exact minimum of the relaxed cost over all complete tours. Among equal
/// costs the lexicographically smallest tour wins.
pub fn brute_force_best(inst: &Instance, model: &CostModel, cap: u128) -> Result<OracleResult> {
    let mut best: Option<(Tour, f64)> = None;
    let mut enumerated = 0u64;
    let mut ties = 0u64;
    for tour in enumerate_complete_tours(inst, cap)? {
        enumerated += 1;
        let cost = recount_cost(&tour, inst, model);
        match &best {
            Some((_, b)) if cost > *b => {}
            Some((_, b)) if cost == *b => ties += 1,
            _ => {
                best = Some((tour, cost));
                ties = 1;
            }
        }
    }
    let (best_tour, best_cost) =
        best.unwrap_or_else(|| (Tour::empty(inst.num_days()), f64::INFINITY));
    Ok(OracleResult {
        best_tour,
        best_cost,
        num_enumerated: enumerated,
        ties,
    })
}
