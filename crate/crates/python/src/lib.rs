//! Python bindings. Tours cross the boundary as lists of ints, one entry per
//! day, 0 for a rest day.

use std::path::PathBuf;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use tourcast::anneal::Budget;
use tourcast::construct::construct as core_construct;
use tourcast::ingest::{generate_random_instance, GeneratorParams, DEFAULT_WAITLIST_CUTOFF};
use tourcast::oracle::{brute_force_best, DEFAULT_CAP};
use tourcast::report::TourReport;
use tourcast::{
    evaluate as core_evaluate, simulated_annealing, Availability, Calendar, CostModel, Matrix,
    Penalties, SaParams, Tour, Weekday, Weights, DEFAULT_BREAK_LIMIT,
};
use tourcast_cli::instance_dir::{
    load_instance_dir, parse_date, write_instance_dir, InstanceOverrides,
};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn weekday(s: &str) -> PyResult<Weekday> {
    s.parse::<Weekday>().map_err(value_err)
}

fn checked_tour(inst: &tourcast::Instance, tour: Vec<usize>) -> PyResult<Tour> {
    let tour = Tour::new(tour);
    tour.validate(inst).map_err(value_err)?;
    Ok(tour)
}

/// A scheduling instance: cities, calendar, mileages and availability.
#[pyclass(module = "tourcast", frozen)]
struct Instance {
    inner: tourcast::Instance,
}

#[pymethods]
impl Instance {
    /// Builds an instance from a mileage matrix and an availability matrix
    /// of codes (1 available, 0 relatively, -1 absolutely unavailable), one
    /// row per day.
    #[new]
    #[pyo3(signature = (mile, availability, city_names=None, start_weekday="mon", travel_limit=500))]
    fn new(
        mile: Vec<Vec<u32>>,
        availability: Vec<Vec<i8>>,
        city_names: Option<Vec<String>>,
        start_weekday: &str,
        travel_limit: u32,
    ) -> PyResult<Self> {
        let m = mile.len();
        let names = city_names.unwrap_or_else(|| (1..=m).map(|k| format!("City {k}")).collect());
        let codes = availability
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|c| {
                        Availability::from_code(c)
                            .ok_or_else(|| value_err(format!("bad availability code {c}")))
                    })
                    .collect::<PyResult<Vec<_>>>()
            })
            .collect::<PyResult<Vec<_>>>()?;
        let n = codes.len();
        let avail = if n == 0 {
            Matrix::filled(0, m, Availability::Available)
        } else {
            Matrix::from_rows(codes).map_err(value_err)?
        };
        let mile = Matrix::from_rows(mile).map_err(value_err)?;
        let inner = tourcast::Instance::new(
            Calendar::new(n, weekday(start_weekday)?),
            names,
            mile,
            avail,
            travel_limit,
        )
        .map_err(value_err)?;
        Ok(Instance { inner })
    }

    /// Reads an instance directory (availability.csv, miles.csv,
    /// instance.toml).
    #[staticmethod]
    #[pyo3(signature = (dir, days=None, start_weekday=None))]
    fn load(dir: PathBuf, days: Option<usize>, start_weekday: Option<&str>) -> PyResult<Self> {
        let overrides = InstanceOverrides {
            days,
            start_weekday: start_weekday.map(weekday).transpose()?,
            ..InstanceOverrides::default()
        };
        let loaded = load_instance_dir(&dir, &overrides).map_err(value_err)?;
        Ok(Instance {
            inner: loaded.instance,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (
        num_cities=15, num_days=42, seed=0, start_weekday="mon", p_available=0.6,
        p_relative=0.15, mile_min=80, mile_max=1400, travel_limit=500, symmetric_days=false
    ))]
    #[allow(clippy::too_many_arguments)]
    fn generate(
        num_cities: usize,
        num_days: usize,
        seed: u64,
        start_weekday: &str,
        p_available: f64,
        p_relative: f64,
        mile_min: u32,
        mile_max: u32,
        travel_limit: u32,
        symmetric_days: bool,
    ) -> PyResult<Self> {
        let params = GeneratorParams {
            num_cities,
            num_days,
            start_weekday: weekday(start_weekday)?,
            p_available,
            p_relative,
            mile_range: (mile_min, mile_max),
            travel_limit,
            symmetric_days,
        };
        let inner = generate_random_instance(&params, seed).map_err(value_err)?;
        Ok(Instance { inner })
    }

    /// Writes the instance as a directory that `load` reads back unchanged.
    #[pyo3(signature = (dir, waitlist_cutoff=DEFAULT_WAITLIST_CUTOFF))]
    fn save(&self, dir: PathBuf, waitlist_cutoff: u32) -> PyResult<()> {
        write_instance_dir(&self.inner, &dir, waitlist_cutoff, None).map_err(value_err)
    }

    #[getter]
    fn num_days(&self) -> usize {
        self.inner.num_days()
    }

    #[getter]
    fn num_cities(&self) -> usize {
        self.inner.num_cities()
    }

    #[getter]
    fn city_names(&self) -> Vec<String> {
        self.inner.city_names().to_vec()
    }

    #[getter]
    fn start_weekday(&self) -> String {
        self.inner.start_weekday().to_string()
    }

    #[getter]
    fn travel_limit(&self) -> u32 {
        self.inner.travel_limit()
    }

    fn mile_matrix(&self) -> Vec<Vec<u32>> {
        self.inner.mile_matrix().to_rows()
    }

    fn day_matrix(&self) -> Vec<Vec<u32>> {
        self.inner.day_matrix().to_rows()
    }

    fn availability_matrix(&self) -> Vec<Vec<i8>> {
        self.inner.availability_matrix().map(|a| a.code()).to_rows()
    }

    fn availability_density(&self) -> f64 {
        self.inner.availability_density()
    }

    fn __eq__(&self, other: &Instance) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!(
            "Instance(num_cities={}, num_days={}, start_weekday='{}')",
            self.inner.num_cities(),
            self.inner.num_days(),
            self.inner.start_weekday()
        )
    }
}

/// Weights, penalties and break limit of the relaxed cost.
#[pyclass(name = "CostModel", module = "tourcast", frozen)]
struct CostModelPy {
    inner: CostModel,
}

#[pymethods]
impl CostModelPy {
    #[new]
    #[pyo3(signature = (weights=None, penalties=None, break_limit=DEFAULT_BREAK_LIMIT))]
    fn new(
        weights: Option<(f64, f64, f64)>,
        penalties: Option<(f64, f64, f64, f64, f64)>,
        break_limit: usize,
    ) -> PyResult<Self> {
        let weights = weights.map_or_else(Weights::default, |(m, g, b)| Weights::new(m, g, b));
        let penalties = penalties.map_or_else(Penalties::default, |(a, b, c, d, e)| {
            Penalties::new(a, b, c, d, e)
        });
        penalties.validate().map_err(value_err)?;
        if break_limit == 0 {
            return Err(value_err("break_limit must be at least 1"));
        }
        Ok(CostModelPy {
            inner: CostModel {
                weights,
                penalties,
                break_limit,
            },
        })
    }

    #[getter]
    fn weights(&self) -> (f64, f64, f64) {
        let w = self.inner.weights;
        (w.mile, w.good, w.bad)
    }

    #[getter]
    fn penalties(&self) -> (f64, f64, f64, f64, f64) {
        let [a, b, c, d, e] = self.inner.penalties.as_array();
        (a, b, c, d, e)
    }

    #[getter]
    fn break_limit(&self) -> usize {
        self.inner.break_limit
    }

    /// Relaxed cost of a tour.
    fn cost(&self, instance: &Instance, tour: Vec<usize>) -> PyResult<f64> {
        let tour = checked_tour(&instance.inner, tour)?;
        Ok(self.inner.cost(tour.as_slice(), &instance.inner))
    }

    fn __repr__(&self) -> String {
        format!(
            "CostModel(weights={:?}, penalties={:?}, break_limit={})",
            self.weights(),
            self.penalties(),
            self.inner.break_limit
        )
    }
}

fn model_or_default(model: Option<&CostModelPy>) -> CostModel {
    model.map_or_else(CostModel::default, |m| m.inner)
}

/// Objectives and violation counts of a tour, as a dict.
#[pyfunction]
#[pyo3(signature = (instance, tour, break_limit=DEFAULT_BREAK_LIMIT))]
fn evaluate<'py>(
    py: Python<'py>,
    instance: &Instance,
    tour: Vec<usize>,
    break_limit: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let tour = checked_tour(&instance.inner, tour)?;
    let ev = core_evaluate(&tour, &instance.inner, break_limit);
    let c = ev.violations.counts;
    let d = PyDict::new(py);
    d.set_item("total_miles", ev.objectives.total_miles)?;
    d.set_item("good_days", ev.objectives.good_days)?;
    d.set_item("bad_days", ev.objectives.bad_days)?;
    d.set_item("avail_type1", c.avail_type1)?;
    d.set_item("avail_type2", c.avail_type2)?;
    d.set_item("breaks", c.breaks)?;
    d.set_item("sep_type1", c.sep_type1)?;
    d.set_item("sep_type2", c.sep_type2)?;
    d.set_item(
        "complete",
        tour.is_complete(&instance.inner).unwrap_or(false),
    )?;
    Ok(d)
}

/// Greedy initial tour containing every city once.
#[pyfunction]
#[pyo3(signature = (instance, seed=0, break_limit=DEFAULT_BREAK_LIMIT))]
fn construct(instance: &Instance, seed: u64, break_limit: usize) -> PyResult<Vec<usize>> {
    core_construct(&instance.inner, seed, break_limit)
        .map(|c| c.tour.into_vec())
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

#[pyclass(module = "tourcast", frozen, get_all)]
struct AnnealResult {
    best: Vec<usize>,
    best_cost: f64,
    iterations: u64,
    stages_per_restart: Vec<usize>,
    best_costs: Vec<f64>,
    stopped_by_wall_clock: bool,
}

#[pymethods]
impl AnnealResult {
    fn __repr__(&self) -> String {
        format!(
            "AnnealResult(best_cost={}, iterations={})",
            self.best_cost, self.iterations
        )
    }
}

/// Simulated annealing from `initial` (constructed when omitted). Give
/// either `restarts` or `seconds`; the default is one restart.
#[pyfunction]
#[pyo3(signature = (
    instance, initial=None, model=None, seed=0, restarts=None, seconds=None,
    t0=5000.0, temp_limit=500.0, iters_per_temp=5000, alpha=0.95, reset_on_restart=true
))]
#[allow(clippy::too_many_arguments)]
fn anneal(
    py: Python<'_>,
    instance: &Instance,
    initial: Option<Vec<usize>>,
    model: Option<&CostModelPy>,
    seed: u64,
    restarts: Option<u64>,
    seconds: Option<f64>,
    t0: f64,
    temp_limit: f64,
    iters_per_temp: usize,
    alpha: f64,
    reset_on_restart: bool,
) -> PyResult<AnnealResult> {
    let model = model_or_default(model);
    let inst = &instance.inner;
    let initial = match initial {
        Some(t) => checked_tour(inst, t)?,
        None => {
            core_construct(inst, seed, model.break_limit)
                .map_err(|e| PyRuntimeError::new_err(e.to_string()))?
                .tour
        }
    };
    let mut params = SaParams {
        t0,
        temp_limit,
        iters_per_temp,
        alpha,
        seed,
        reset_on_restart,
        ..SaParams::default()
    };
    params.validate().map_err(value_err)?;
    params.budget = match (restarts, seconds) {
        (Some(_), Some(_)) => return Err(value_err("give restarts or seconds, not both")),
        (Some(k), None) => Budget::restarts(k),
        (None, Some(s)) => Budget::from_seconds(s, &params),
        (None, None) => Budget::restarts(1),
    };
    let out = py
        .detach(|| simulated_annealing(inst, &initial, &model, &params))
        .map_err(value_err)?;
    Ok(AnnealResult {
        best_costs: out.trace.best_costs().collect(),
        best: out.best.into_vec(),
        best_cost: out.best_cost,
        iterations: out.trace.iterations,
        stages_per_restart: out.trace.stages_per_restart,
        stopped_by_wall_clock: out.trace.stopped_by_wall_clock,
    })
}

/// Exhaustive optimum over complete tours. Refuses instances with more
/// than `cap` complete tours.
#[pyfunction]
#[pyo3(signature = (instance, model=None, cap=None))]
fn oracle<'py>(
    py: Python<'py>,
    instance: &Instance,
    model: Option<&CostModelPy>,
    cap: Option<u128>,
) -> PyResult<Bound<'py, PyDict>> {
    let model = model_or_default(model);
    let inst = &instance.inner;
    let res = py
        .detach(|| brute_force_best(inst, &model, cap.unwrap_or(DEFAULT_CAP)))
        .map_err(value_err)?;
    let d = PyDict::new(py);
    d.set_item("best_tour", res.best_tour.into_vec())?;
    d.set_item("best_cost", res.best_cost)?;
    d.set_item("num_enumerated", res.num_enumerated)?;
    d.set_item("ties", res.ties)?;
    Ok(d)
}

/// Plain-text report with property block, schedule and violation details.
#[pyfunction]
#[pyo3(signature = (instance, tour, title="Tour", model=None, start_date=None))]
fn report(
    instance: &Instance,
    tour: Vec<usize>,
    title: &str,
    model: Option<&CostModelPy>,
    start_date: Option<&str>,
) -> PyResult<String> {
    let model = model_or_default(model);
    let inst = &instance.inner;
    let tour = checked_tour(inst, tour)?;
    let date = start_date.map(parse_date).transpose().map_err(value_err)?;
    if let Some(d) = date {
        tourcast_cli::instance_dir::check_start_date(d, inst).map_err(value_err)?;
    }
    Ok(
        TourReport::build(title, &tour, inst, model.break_limit, date)
            .with_cost(model.cost(tour.as_slice(), inst))
            .render(),
    )
}

#[pymodule]
#[pyo3(name = "tourcast")]
fn tourcast_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Instance>()?;
    m.add_class::<CostModelPy>()?;
    m.add_class::<AnnealResult>()?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(construct, m)?)?;
    m.add_function(wrap_pyfunction!(anneal, m)?)?;
    m.add_function(wrap_pyfunction!(oracle, m)?)?;
    m.add_function(wrap_pyfunction!(report, m)?)?;
    m.add("DEFAULT_BREAK_LIMIT", DEFAULT_BREAK_LIMIT)?;
    Ok(())
}
