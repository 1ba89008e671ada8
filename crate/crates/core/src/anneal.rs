//! Simulated annealing with restarts.
//!
//! Every restart begins at the constructed tour (or, optionally, wherever
//! the previous restart ended), runs `iters_per_temp` random swap moves per
//! temperature stage, and cools geometrically until the temperature drops to
//! the limit. The best tour over all restarts is returned.
//!
//! Runs are reproducible: randomness comes from a single ChaCha8 stream
//! seeded with [`SaParams::seed`], and the budget is a number of restarts.
//! A wall-clock cap can be layered on top; if it fires, the run is cut short
//! and [`RunTrace::stopped_by_wall_clock`] is set.

use std::io::Write;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::constraints::{summarize, Summary, DEFAULT_BREAK_LIMIT};
use crate::cost::relaxed_cost_of;
use crate::error::{Error, Result};
use crate::model::{Instance, Penalties, Tour, Weights};

/// Identifier of the generator behind every seeded stream in this crate.
pub const RNG_ALGORITHM: &str = "ChaCha8 (rand_chacha 0.9, seed_from_u64)";

/// Swap moves per second assumed when converting seconds into restarts.
/// Deliberately below what a 15x42 instance achieves on one core, so the
/// logical budget normally finishes before the wall-clock cap.
pub const NOMINAL_MOVES_PER_SECOND: f64 = 2_000_000.0;

/// The wall-clock cap is this multiple of the requested seconds.
pub const WALL_CLOCK_SLACK: f64 = 3.0;

/// Everything needed to score a tour.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostModel {
    pub weights: Weights,
    pub penalties: Penalties,
    pub break_limit: usize,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel {
            weights: Weights::default(),
            penalties: Penalties::default(),
            break_limit: DEFAULT_BREAK_LIMIT,
        }
    }
}

impl CostModel {
    pub fn new(weights: Weights, penalties: Penalties) -> Self {
        CostModel {
            weights,
            penalties,
            break_limit: DEFAULT_BREAK_LIMIT,
        }
    }

    #[inline]
    pub fn summary(&self, tour: &[usize], inst: &Instance) -> Summary {
        summarize(tour, inst, self.break_limit)
    }

    #[inline]
    pub fn cost(&self, tour: &[usize], inst: &Instance) -> f64 {
        relaxed_cost_of(&self.summary(tour, inst), &self.weights, &self.penalties).total
    }
}

/// Relaxed cost of `tour` under the default break limit.
pub fn cost_of(tour: &Tour, inst: &Instance, w: &Weights, p: &Penalties) -> f64 {
    CostModel::new(*w, *p).cost(tour.as_slice(), inst)
}

/// How long to anneal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Budget {
    pub restarts: u64,
    pub wall_clock: Option<Duration>,
}

impl Budget {
    pub fn restarts(restarts: u64) -> Self {
        Budget {
            restarts,
            wall_clock: None,
        }
    }

    /// Converts seconds into a restart count at [`NOMINAL_MOVES_PER_SECOND`]
    /// (at least one restart for any positive budget), with a wall-clock cap
    /// of [`WALL_CLOCK_SLACK`] times the request.
    pub fn from_seconds(seconds: f64, params: &SaParams) -> Self {
        if seconds.is_nan() || seconds <= 0.0 {
            return Budget {
                restarts: 0,
                wall_clock: Some(Duration::ZERO),
            };
        }
        let per_restart = (cooling_stages(params) * params.iters_per_temp).max(1) as f64;
        let restarts = ((seconds * NOMINAL_MOVES_PER_SECOND / per_restart).floor() as u64).max(1);
        Budget {
            restarts,
            wall_clock: Some(Duration::from_secs_f64(seconds * WALL_CLOCK_SLACK)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaParams {
    pub t0: f64,
    pub temp_limit: f64,
    pub iters_per_temp: usize,
    pub alpha: f64,
    pub budget: Budget,
    pub seed: u64,
    /// Restart from the initial tour on every pass (`true`) or continue from
    /// the current tour.
    pub reset_on_restart: bool,
}

impl Default for SaParams {
    fn default() -> Self {
        SaParams {
            t0: 5000.0,
            temp_limit: 500.0,
            iters_per_temp: 5000,
            alpha: 0.95,
            budget: Budget::restarts(1),
            seed: 0,
            reset_on_restart: true,
        }
    }
}

impl SaParams {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::AnnealParams(m));
        if !(self.t0 > 0.0 && self.t0.is_finite()) {
            return fail(format!("initial temperature {} must be positive", self.t0));
        }
        if self.temp_limit.is_nan() || self.temp_limit <= 0.0 {
            return fail(format!(
                "temperature limit {} must be positive",
                self.temp_limit
            ));
        }
        if self.temp_limit >= self.t0 {
            return fail(format!(
                "temperature limit {} must be below the initial temperature {}",
                self.temp_limit, self.t0
            ));
        }
        if self.iters_per_temp == 0 {
            return fail("iterations per temperature must be at least 1".into());
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return fail(format!(
                "alpha {} must lie strictly between 0 and 1",
                self.alpha
            ));
        }
        Ok(())
    }

    pub fn with_seconds(mut self, seconds: f64) -> Self {
        self.budget = Budget::from_seconds(seconds, &self);
        self
    }

    pub fn moves_per_restart(&self) -> u64 {
        (cooling_stages(self) * self.iters_per_temp) as u64
    }
}

/// Number of temperature stages one restart runs: stages execute while the
/// temperature is above the limit, cooling by `alpha` after each.
pub fn cooling_stages(params: &SaParams) -> usize {
    let mut t = params.t0;
    let mut stages = 0;
    while t > params.temp_limit && stages < 1_000_000 {
        stages += 1;
        t *= params.alpha;
    }
    stages
}

/// Swap of two distinct days, at least one of which holds a performance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Move {
    pub i: usize,
    pub j: usize,
}

impl Move {
    pub fn apply(&self, tour: &mut [usize]) {
        tour.swap(self.i, self.j);
    }
}

/// Samples ordered day pairs uniformly until one is a valid move, returned
/// with `i < j`. Every valid unordered pair is equally likely.
pub fn propose_move<R: Rng + ?Sized>(tour: &[usize], rng: &mut R) -> Result<Move> {
    let n = tour.len();
    if n < 2 || tour.iter().all(|&c| c == 0) {
        return Err(Error::NoMove);
    }
    loop {
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        if a != b && (tour[a] != 0 || tour[b] != 0) {
            return Ok(Move {
                i: a.min(b),
                j: a.max(b),
            });
        }
    }
}

/// Metropolis acceptance: improvements always pass, otherwise the move is
/// taken iff `u < exp(-delta / t)`.
pub fn sa_accept(delta: f64, t: f64, u: f64) -> Result<bool> {
    if t.is_nan() || t <= 0.0 {
        return Err(Error::Temperature(t));
    }
    Ok(delta < 0.0 || u < (-delta / t).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TraceEvent {
    Start,
    Improved,
    StageEnd,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub event: TraceEvent,
    pub restart: u64,
    pub iteration: u64,
    pub elapsed_secs: f64,
    pub temperature: f64,
    pub current_cost: f64,
    pub best_cost: f64,
    /// Objectives and counts of the new best tour on `Improved` entries.
    pub snapshot: Option<Summary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub rng_algorithm: String,
    pub seed: u64,
    pub entries: Vec<TraceEntry>,
    /// Temperature stages completed in each restart.
    pub stages_per_restart: Vec<usize>,
    pub iterations: u64,
    pub stopped_by_wall_clock: bool,
}

impl RunTrace {
    pub fn best_costs(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().map(|e| e.best_cost)
    }

    pub fn is_best_monotone(&self) -> bool {
        self.entries
            .windows(2)
            .all(|w| w[1].best_cost <= w[0].best_cost)
    }

    /// CSV with one row per entry. Elapsed time is the only column that
    /// differs between repeated runs.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(
            out,
            "event,restart,iteration,elapsed_secs,temperature,current_cost,best_cost,miles,good_days,bad_days,y1,y2,y3,y4,y5"
        )?;
        for e in &self.entries {
            let event = match e.event {
                TraceEvent::Start => "start",
                TraceEvent::Improved => "improved",
                TraceEvent::StageEnd => "stage",
            };
            write!(
                out,
                "{event},{},{},{:.6},{},{},{}",
                e.restart, e.iteration, e.elapsed_secs, e.temperature, e.current_cost, e.best_cost
            )?;
            match &e.snapshot {
                Some(s) => {
                    let y = s.counts.as_array();
                    writeln!(
                        out,
                        ",{},{},{},{},{},{},{},{}",
                        s.objectives.total_miles,
                        s.objectives.good_days,
                        s.objectives.bad_days,
                        y[0],
                        y[1],
                        y[2],
                        y[3],
                        y[4]
                    )?;
                }
                None => writeln!(out, ",,,,,,,,")?,
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnealOutcome {
    pub best: Tour,
    pub best_cost: f64,
    pub trace: RunTrace,
}

/// Improves `initial` by simulated annealing and returns the best tour seen.
///
/// With a zero-restart budget the initial tour comes straight back.
pub fn simulated_annealing(
    inst: &Instance,
    initial: &Tour,
    model: &CostModel,
    params: &SaParams,
) -> Result<AnnealOutcome> {
    params.validate()?;
    initial.validate(inst)?;
    if !initial.is_complete(inst)? {
        return Err(Error::InvalidInstance(
            "the initial tour must contain every city exactly once".into(),
        ));
    }

    let clock = Instant::now();
    let deadline_passed = || {
        params
            .budget
            .wall_clock
            .is_some_and(|cap| clock.elapsed() >= cap)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let initial_cost = model.cost(initial.as_slice(), inst);
    let mut best = initial.as_slice().to_vec();
    let mut best_cost = initial_cost;
    let mut current = best.clone();
    let mut current_cost = initial_cost;

    let mut trace = RunTrace {
        rng_algorithm: RNG_ALGORITHM.to_string(),
        seed: params.seed,
        entries: vec![TraceEntry {
            event: TraceEvent::Start,
            restart: 0,
            iteration: 0,
            elapsed_secs: 0.0,
            temperature: params.t0,
            current_cost,
            best_cost,
            snapshot: Some(model.summary(&current, inst)),
        }],
        stages_per_restart: Vec::new(),
        iterations: 0,
        stopped_by_wall_clock: false,
    };

    let movable = initial.len() >= 2 && initial.num_performances() > 0;

    'restarts: for restart in 0..params.budget.restarts {
        if !movable {
            break;
        }
        if deadline_passed() {
            trace.stopped_by_wall_clock = true;
            break;
        }
        if params.reset_on_restart {
            current.copy_from_slice(initial.as_slice());
            current_cost = initial_cost;
        }
        let mut t = params.t0;
        let mut stages = 0;
        while t > params.temp_limit {
            for _ in 0..params.iters_per_temp {
                let mv = propose_move(&current, &mut rng)?;
                mv.apply(&mut current);
                let new_cost = model.cost(&current, inst);
                let delta = new_cost - current_cost;
                trace.iterations += 1;
                let accepted = delta < 0.0 || sa_accept(delta, t, rng.random::<f64>())?;
                if !accepted {
                    mv.apply(&mut current);
                    continue;
                }
                current_cost = new_cost;
                if current_cost < best_cost {
                    best_cost = current_cost;
                    best.copy_from_slice(&current);
                    trace.entries.push(TraceEntry {
                        event: TraceEvent::Improved,
                        restart,
                        iteration: trace.iterations,
                        elapsed_secs: clock.elapsed().as_secs_f64(),
                        temperature: t,
                        current_cost,
                        best_cost,
                        snapshot: Some(model.summary(&best, inst)),
                    });
                }
            }
            stages += 1;
            trace.entries.push(TraceEntry {
                event: TraceEvent::StageEnd,
                restart,
                iteration: trace.iterations,
                elapsed_secs: clock.elapsed().as_secs_f64(),
                temperature: t,
                current_cost,
                best_cost,
                snapshot: None,
            });
            t *= params.alpha;
            if deadline_passed() {
                trace.stages_per_restart.push(stages);
                trace.stopped_by_wall_clock = true;
                break 'restarts;
            }
        }
        trace.stages_per_restart.push(stages);
    }

    Ok(AnnealOutcome {
        best: Tour::new(best),
        best_cost,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::construct_initial;
    use crate::ingest::{generate_random_instance, GeneratorParams};

    #[test]
    fn unique_move() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            assert_eq!(
                propose_move(&[1, 0], &mut rng).unwrap(),
                Move { i: 0, j: 1 }
            );
        }
        assert!(matches!(
            propose_move(&[0, 0, 0], &mut rng),
            Err(Error::NoMove)
        ));
        assert!(matches!(propose_move(&[1], &mut rng), Err(Error::NoMove)));
    }

    #[test]
    fn moves_are_uniform_over_valid_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let tour = [1, 2, 0];
        let mut counts = [0usize; 3];
        let samples = 10_000;
        for _ in 0..samples {
            let mv = propose_move(&tour, &mut rng).unwrap();
            assert!(tour[mv.i] != 0 || tour[mv.j] != 0);
            counts[match (mv.i, mv.j) {
                (0, 1) => 0,
                (0, 2) => 1,
                (1, 2) => 2,
                other => panic!("unexpected move {other:?}"),
            }] += 1;
        }
        for c in counts {
            let freq = c as f64 / samples as f64;
            assert!((freq - 1.0 / 3.0).abs() <= 0.05, "frequency {freq}");
        }
    }

    #[test]
    fn acceptance_rule() {
        assert!(sa_accept(-1.0, 1e-9, 0.999).unwrap());
        assert!(sa_accept(-1.0, 1e9, 0.999).unwrap());
        assert!(sa_accept(0.0, 10.0, 0.999_999).unwrap());
        let t = 250.0;
        let p = (-1.0f64).exp();
        assert!((p - 0.3679).abs() < 1e-4);
        assert!(sa_accept(t, t, p - 1e-9).unwrap());
        assert!(!sa_accept(t, t, p + 1e-9).unwrap());
        assert!(matches!(
            sa_accept(1.0, 0.0, 0.5),
            Err(Error::Temperature(_))
        ));
    }

    #[test]
    fn default_schedule_has_45_stages() {
        let params = SaParams::default();
        assert_eq!(cooling_stages(&params), 45);
        assert_eq!(params.moves_per_restart(), 225_000);
    }

    #[test]
    fn parameter_validation() {
        let bad = |f: fn(&mut SaParams)| {
            let mut p = SaParams::default();
            f(&mut p);
            p.validate().is_err()
        };
        assert!(bad(|p| p.t0 = 0.0));
        assert!(bad(|p| p.temp_limit = 6000.0));
        assert!(bad(|p| p.iters_per_temp = 0));
        assert!(bad(|p| p.alpha = 1.0));
        assert!(bad(|p| p.alpha = 0.0));
        assert!(SaParams::default().validate().is_ok());
    }

    fn small_problem(seed: u64) -> (Instance, Tour) {
        let params = GeneratorParams {
            num_cities: 6,
            num_days: 14,
            ..GeneratorParams::default()
        };
        let inst = generate_random_instance(&params, seed).unwrap();
        let tour = construct_initial(&inst, seed, 4).unwrap();
        (inst, tour)
    }

    fn quick(seed: u64) -> SaParams {
        SaParams {
            iters_per_temp: 200,
            budget: Budget::restarts(3),
            seed,
            ..SaParams::default()
        }
    }

    #[test]
    fn zero_budget_returns_initial() {
        let (inst, tour) = small_problem(1);
        let params = SaParams::default().with_seconds(0.0);
        let out = simulated_annealing(&inst, &tour, &CostModel::default(), &params).unwrap();
        assert_eq!(out.best, tour);
        assert_eq!(out.trace.iterations, 0);
    }

    #[test]
    fn best_never_worse_than_initial_and_complete() {
        for seed in 0..5 {
            let (inst, tour) = small_problem(seed);
            let model = CostModel::default();
            let out = simulated_annealing(&inst, &tour, &model, &quick(seed)).unwrap();
            assert!(out.best_cost <= model.cost(tour.as_slice(), &inst));
            assert_eq!(out.best_cost, model.cost(out.best.as_slice(), &inst));
            assert!(out.best.is_complete(&inst).unwrap());
            assert!(out.trace.is_best_monotone());
            assert_eq!(out.trace.stages_per_restart, vec![45; 3]);
            assert_eq!(out.trace.iterations, 3 * 45 * 200);
        }
    }

    #[test]
    fn fixed_seed_is_reproducible() {
        let (inst, tour) = small_problem(4);
        let model = CostModel::default();
        let a = simulated_annealing(&inst, &tour, &model, &quick(11)).unwrap();
        let b = simulated_annealing(&inst, &tour, &model, &quick(11)).unwrap();
        assert_eq!(a.best, b.best);
        assert_eq!(a.best_cost.to_bits(), b.best_cost.to_bits());
        assert_eq!(a.trace.iterations, b.trace.iterations);
    }

    #[test]
    fn frozen_search_is_a_hill_climb() {
        let (inst, tour) = small_problem(2);
        let model = CostModel::new(Weights::default(), Penalties::zero());
        let params = SaParams {
            t0: 1e-12,
            temp_limit: 1e-14,
            alpha: 0.5,
            iters_per_temp: 300,
            budget: Budget::restarts(1),
            seed: 5,
            reset_on_restart: true,
        };
        let out = simulated_annealing(&inst, &tour, &model, &params).unwrap();
        let currents: Vec<f64> = out.trace.entries.iter().map(|e| e.current_cost).collect();
        assert!(currents.windows(2).all(|w| w[1] <= w[0]), "{currents:?}");
    }

    #[test]
    fn rejects_incomplete_initial_tour() {
        let (inst, _) = small_problem(3);
        let empty = Tour::empty(inst.num_days());
        assert!(simulated_annealing(&inst, &empty, &CostModel::default(), &quick(0)).is_err());
    }
}
