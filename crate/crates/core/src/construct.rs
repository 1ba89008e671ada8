//! Initial tour construction.
//!
//! 1. Greedy nearest-neighbour ordering of the cities by Day distance, ties
//!    going to the lower city code.
//! 2. Pairwise position swaps while they shorten the open path.
//! 3. Placement on the calendar so each hop gets its required travel days.
//! 4. Backward swaps that move performances on unavailable cells to free,
//!    available days after the last performance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constraints::count_break_violations;
use crate::error::{Error, Result};
use crate::model::{Availability, Instance, Matrix, Tour};

/// A permutation of the city codes `1..=m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CityOrder(Vec<usize>);

impl CityOrder {
    /// Checks that `codes` is a permutation of `1..=codes.len()`.
    pub fn new(codes: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; codes.len()];
        for &c in &codes {
            if c == 0 || c > codes.len() || seen[c - 1] {
                return Err(Error::InvalidInstance(format!(
                    "{codes:?} is not a permutation of the city codes"
                )));
            }
            seen[c - 1] = true;
        }
        Ok(CityOrder(codes))
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }
}

/// Greedy chain starting at `start_city` over the Day matrix.
pub fn nearest_neighbor_order(inst: &Instance, start_city: usize) -> Result<CityOrder> {
    let m = inst.num_cities();
    if start_city == 0 || start_city > m {
        return Err(Error::UnknownCity {
            day: 0,
            code: start_city,
            num_cities: m,
        });
    }
    let mut visited = vec![false; m];
    let mut order = Vec::with_capacity(m);
    let mut current = start_city;
    visited[current - 1] = true;
    order.push(current);
    while order.len() < m {
        // Scanning codes upward with a strict comparison keeps the lowest
        // code on ties.
        let next = (1..=m)
            .filter(|&c| !visited[c - 1])
            .min_by_key(|&c| inst.days_between(current, c))
            .expect("unvisited city remains");
        visited[next - 1] = true;
        order.push(next);
        current = next;
    }
    Ok(CityOrder(order))
}

/// Length of the open path through `order` (no return leg).
pub fn order_distance(order: &[usize], matrix: &Matrix<u32>) -> u64 {
    order
        .windows(2)
        .map(|w| matrix[(w[0] - 1, w[1] - 1)] as u64)
        .sum()
}

/// Applies improving position swaps in lexicographic `(i, j)` order until a
/// full pass finds none. The result is a local minimum under single swaps.
pub fn improve_order_two_exchange(order: &CityOrder, inst: &Instance) -> CityOrder {
    let matrix = inst.day_matrix();
    let mut cur = order.0.clone();
    let mut best = order_distance(&cur, matrix);
    loop {
        let mut improved = false;
        for i in 0..cur.len() {
            for j in i + 1..cur.len() {
                cur.swap(i, j);
                let d = order_distance(&cur, matrix);
                if d < best {
                    best = d;
                    improved = true;
                } else {
                    cur.swap(i, j);
                }
            }
        }
        if !improved {
            return CityOrder(cur);
        }
    }
}

/// Puts the first city on day 0 and each following city the required number
/// of travel days after its predecessor. Hops with a zero-day requirement
/// still advance one day, since a day holds a single performance, and a hop
/// that would extend a run of consecutive performances past `break_limit`
/// gets one extra rest day.
pub fn place_by_separation(order: &CityOrder, inst: &Instance, break_limit: usize) -> Result<Tour> {
    let n = inst.num_days();
    let mut days = Vec::with_capacity(order.0.len());
    let mut day = 0usize;
    let mut run = 0usize;
    for (k, &city) in order.0.iter().enumerate() {
        if k > 0 {
            let prev = order.0[k - 1];
            let mut step = (inst.days_between(prev, city) as usize).max(1);
            if step == 1 && run >= break_limit {
                step = 2;
            }
            run = if step == 1 { run + 1 } else { 1 };
            day += step;
        } else {
            run = 1;
        }
        days.push(day);
    }
    if let Some(&last) = days.last() {
        if last >= n {
            return Err(Error::PlacementOverflow {
                required: last + 1,
                available: n,
            });
        }
    }
    let mut tour = Tour::empty(n);
    for (&city, &d) in order.0.iter().zip(&days) {
        tour.set(d, city);
    }
    Ok(tour)
}

/// Scans performances left to right; each one on a cell that is not
/// available moves to the latest free day after the current last performance
/// where its city is available. A move that would add a break violation is
/// skipped in favour of the next candidate day.
pub fn backward_swap(tour: &Tour, inst: &Instance, break_limit: usize) -> Tour {
    let mut out = tour.clone();
    let n = out.len();
    for day in 0..n {
        let city = out.get(day);
        if city == 0 || inst.availability(day, city) == Availability::Available {
            continue;
        }
        let Some(last) = out.last_performance_day() else {
            break;
        };
        let breaks_before = count_break_violations(&out, break_limit).0;
        for target in (last + 1..n).rev() {
            if out.get(target) != 0 || inst.availability(target, city) != Availability::Available {
                continue;
            }
            out.set(day, 0);
            out.set(target, city);
            if count_break_violations(&out, break_limit).0 <= breaks_before {
                break;
            }
            out.set(target, 0);
            out.set(day, city);
        }
    }
    out
}

/// Intermediate results of [`construct`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Construction {
    pub start_city: usize,
    pub order: CityOrder,
    pub placed: Tour,
    pub tour: Tour,
}

/// Runs the whole construction pipeline. The start city is drawn from a
/// ChaCha8 stream seeded with `seed`; if the resulting order does not fit the
/// calendar, the remaining start cities are tried in increasing code order
/// (wrapping) before giving up with the first overflow.
pub fn construct(inst: &Instance, seed: u64, break_limit: usize) -> Result<Construction> {
    let m = inst.num_cities();
    if m == 0 {
        return Ok(Construction {
            start_city: 0,
            order: CityOrder(Vec::new()),
            placed: Tour::empty(inst.num_days()),
            tour: Tour::empty(inst.num_days()),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let first = rng.random_range(1..=m);
    let mut first_err = None;
    for offset in 0..m {
        let start_city = (first - 1 + offset) % m + 1;
        let order = improve_order_two_exchange(&nearest_neighbor_order(inst, start_city)?, inst);
        match place_by_separation(&order, inst, break_limit) {
            Ok(placed) => {
                let tour = backward_swap(&placed, inst, break_limit);
                return Ok(Construction {
                    start_city,
                    order,
                    placed,
                    tour,
                });
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    Err(first_err.expect("at least one start city was tried"))
}

/// The initial tour handed to the annealer.
pub fn construct_initial(inst: &Instance, seed: u64, break_limit: usize) -> Result<Tour> {
    construct(inst, seed, break_limit).map(|c| c.tour)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::{
        count_availability_violations, count_separation_violations, evaluate,
    };
    use crate::model::{Calendar, Weekday};
    use Availability::*;

    fn instance(n: usize, mile: Vec<Vec<u32>>, avail: Matrix<Availability>) -> Instance {
        let m = mile.len();
        Instance::new(
            Calendar::new(n, Weekday::Mon),
            (1..=m).map(|k| format!("C{k}")).collect(),
            Matrix::from_rows(mile).unwrap(),
            avail,
            500,
        )
        .unwrap()
    }

    #[test]
    fn single_city() {
        let inst = instance(3, vec![vec![0]], Matrix::filled(3, 1, Available));
        assert_eq!(nearest_neighbor_order(&inst, 1).unwrap().as_slice(), &[1]);
        assert_eq!(order_distance(&[1], inst.day_matrix()), 0);
        assert_eq!(
            construct_initial(&inst, 0, 4).unwrap().as_slice(),
            &[1, 0, 0]
        );
    }

    #[test]
    fn greedy_chain_and_ties() {
        // Day: 1->2 = 1, 1->3 = 2, 2->3 = 2.
        let mile = vec![vec![0, 500, 1000], vec![500, 0, 1000], vec![1000, 1000, 0]];
        let inst = instance(10, mile, Matrix::filled(10, 3, Available));
        let order = nearest_neighbor_order(&inst, 1).unwrap();
        assert_eq!(order.as_slice(), &[1, 2, 3]);
        assert_eq!(order_distance(order.as_slice(), inst.day_matrix()), 3);

        // From 3 both others are 2 days away: the lower code wins.
        let order = nearest_neighbor_order(&inst, 3).unwrap();
        assert_eq!(order.as_slice(), &[3, 1, 2]);
        assert!(nearest_neighbor_order(&inst, 4).is_err());
    }

    #[test]
    fn reversal_under_symmetric_matrix() {
        let mile = vec![vec![0, 700, 1600], vec![700, 0, 1100], vec![1600, 1100, 0]];
        let inst = instance(10, mile, Matrix::filled(10, 3, Available));
        let d = inst.day_matrix();
        assert_eq!(order_distance(&[1, 2, 3], d), order_distance(&[3, 2, 1], d));
    }

    #[test]
    fn placement_steps() {
        let mile = vec![vec![0, 1000], vec![1000, 0]];
        let inst = instance(5, mile, Matrix::filled(5, 2, Available));
        let order = CityOrder::new(vec![1, 2]).unwrap();
        assert_eq!(
            place_by_separation(&order, &inst, 4).unwrap().as_slice(),
            &[1, 0, 2, 0, 0]
        );

        let inst = instance(
            5,
            vec![vec![0, 10], vec![10, 0]],
            Matrix::filled(5, 2, Available),
        );
        assert_eq!(
            place_by_separation(&order, &inst, 4).unwrap().as_slice(),
            &[1, 2, 0, 0, 0]
        );

        let far = instance(
            3,
            vec![vec![0, 2000], vec![2000, 0]],
            Matrix::filled(3, 2, Available),
        );
        assert!(matches!(
            place_by_separation(&order, &far, 4),
            Err(Error::PlacementOverflow {
                required: 5,
                available: 3
            })
        ));
    }

    #[test]
    fn placement_inserts_rest_after_break_limit() {
        let inst = instance(9, vec![vec![0; 6]; 6], Matrix::filled(9, 6, Available));
        let order = CityOrder::new(vec![1, 2, 3, 4, 5, 6]).unwrap();
        let tour = place_by_separation(&order, &inst, 4).unwrap();
        assert_eq!(tour.as_slice(), &[1, 2, 3, 4, 0, 5, 6, 0, 0]);
        assert_eq!(count_break_violations(&tour, 4).0, 0);
        let tour = place_by_separation(&order, &inst, 2).unwrap();
        assert_eq!(tour.as_slice(), &[1, 2, 0, 3, 4, 0, 5, 6, 0]);
    }

    #[test]
    fn backward_swap_relocates_to_latest_free_day() {
        let mut avail = Matrix::filled(6, 2, Available);
        avail[(0, 0)] = AbsolutelyUnavailable;
        let inst = instance(6, vec![vec![0, 0], vec![0, 0]], avail);
        let tour = Tour::new(vec![1, 2, 0, 0, 0, 0]);
        let out = backward_swap(&tour, &inst, 4);
        assert_eq!(out.as_slice(), &[0, 2, 0, 0, 0, 1]);
        let before = count_availability_violations(&tour, &inst);
        let after = count_availability_violations(&out, &inst);
        assert_eq!(after.0 + after.1 + 1, before.0 + before.1);

        let clean = Tour::new(vec![2, 1, 0, 0, 0, 0]);
        assert_eq!(backward_swap(&clean, &inst, 4), clean);
    }

    #[test]
    fn backward_swap_skips_break_creating_moves() {
        // The only free available day for city 1 is day 6, right after a run
        // of four performances: moving there would make five in a row.
        let mut avail = Matrix::filled(7, 5, Available);
        avail[(0, 0)] = RelativelyUnavailable;
        let inst = instance(7, vec![vec![0; 5]; 5], avail);
        let tour = Tour::new(vec![1, 0, 2, 3, 4, 5, 0]);
        assert_eq!(backward_swap(&tour, &inst, 4), tour);
        // With a looser limit the same move goes through.
        assert_eq!(
            backward_swap(&tour, &inst, 5).as_slice(),
            &[0, 0, 2, 3, 4, 5, 1]
        );
    }

    #[test]
    fn two_exchange_fixed_point_and_improvement() {
        // Day matrix along a line: positions 0, 1, 2, 3 with 500 miles per step.
        let pos = [0u32, 3, 1, 2];
        let mile: Vec<Vec<u32>> = (0..4)
            .map(|i| (0..4).map(|j| pos[i].abs_diff(pos[j]) * 500).collect())
            .collect();
        let inst = instance(20, mile, Matrix::filled(20, 4, Available));
        let d = inst.day_matrix();
        let opt = CityOrder::new(vec![1, 3, 4, 2]).unwrap();
        assert_eq!(improve_order_two_exchange(&opt, &inst), opt);

        let start = CityOrder::new(vec![1, 2, 3, 4]).unwrap();
        let out = improve_order_two_exchange(&start, &inst);
        assert!(order_distance(out.as_slice(), d) < order_distance(start.as_slice(), d));
        assert_eq!(order_distance(out.as_slice(), d), 3);
    }

    #[test]
    fn construction_is_deterministic_and_clean() {
        let params = crate::ingest::GeneratorParams::default();
        for seed in 0..10 {
            let inst = crate::ingest::generate_random_instance(&params, seed).unwrap();
            let c = construct(&inst, seed, 4).unwrap();
            assert_eq!(c, construct(&inst, seed, 4).unwrap());
            assert!(c.tour.is_complete(&inst).unwrap());
            assert_eq!(count_separation_violations(&c.placed, &inst).2.len(), 0);
            let ev = evaluate(&c.tour, &inst, 4);
            assert_eq!(ev.violations.counts.breaks, 0);
        }
    }
}
