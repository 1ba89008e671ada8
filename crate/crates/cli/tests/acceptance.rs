//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use chrono::{Datelike, Days, NaiveDate, Weekday as ChronoWeekday};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tourcast::anneal::cooling_stages;
use tourcast::constraints::{count_separation_violations, Summary};
use tourcast::construct::construct;
use tourcast::cost::{penalty_cost, relaxed_cost_of};
use tourcast::ingest::{
    classify_status, generate_random_instance, parse_instance, GeneratorParams, IngestOptions,
    VenueStatus,
};
use tourcast::oracle::{brute_force_best, enumerate_complete_tours, recount, DEFAULT_CAP};
use tourcast::report::PropertyBlock;
use tourcast::{
    evaluate, simulated_annealing, strict_cost, Availability, Budget, CostModel, Instance,
    Objectives, Penalties, SaParams, Tour, ViolationCounts, Weekday, Weights,
};
use tourcast_cli::instance_dir::{load_instance_dir, write_instance_dir, InstanceOverrides};

fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn sample_dir() -> PathBuf {
    repo_root().join("data/sample")
}

fn sample() -> (Instance, Option<NaiveDate>) {
    let loaded =
        load_instance_dir(&sample_dir(), &InstanceOverrides::default()).expect("sample loads");
    (loaded.instance, loaded.start_date)
}

fn tourcast() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tourcast"))
}

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn tiny_params(rng: &mut ChaCha8Rng, m: usize, n: usize) -> GeneratorParams {
    GeneratorParams {
        num_cities: m,
        num_days: n,
        start_weekday: Weekday::ALL[rng.random_range(0..7)],
        p_available: 0.55,
        p_relative: 0.25,
        mile_range: (80, 1400),
        ..GeneratorParams::default()
    }
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut tours = 0u64;
    for k in 0..50 {
        let m = rng.random_range(2..=4);
        let n = rng.random_range(4..=7);
        let params = tiny_params(&mut rng, m, n);
        let inst = generate_random_instance(&params, 1000 + k).map_err(|e| e.to_string())?;
        for tour in enumerate_complete_tours(&inst, DEFAULT_CAP).map_err(|e| e.to_string())? {
            tours += 1;
            for limit in [1, 2, 4] {
                let ev = evaluate(&tour, &inst, limit);
                let (obj, y) = recount(&tour, &inst, limit);
                if ev.objectives != obj || ev.violations.counts.as_array() != y {
                    return Err(format!(
                        "instance {k}, tour {tour}, break limit {limit}: evaluate {:?} {:?} vs recount {obj:?} {y:?}",
                        ev.objectives,
                        ev.violations.counts.as_array()
                    ));
                }
            }
        }
    }
    Ok(format!(
        "50 instances, {tours} complete tours, break limits 1, 2, 4"
    ))
}

fn tiny_optimality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let model = CostModel::default();
    let mut hits = 0;
    let mut misses = Vec::new();
    for k in 0..20u64 {
        let m = rng.random_range(2..=4);
        let n = rng.random_range((2 * m).max(4)..=8);
        let mut params = tiny_params(&mut rng, m, n);
        params.mile_range = (80, 900);
        let inst = generate_random_instance(&params, 2000 + k).map_err(|e| e.to_string())?;
        let best = brute_force_best(&inst, &model, DEFAULT_CAP).map_err(|e| e.to_string())?;
        let initial = match construct(&inst, k, model.break_limit) {
            Ok(c) => c.tour,
            Err(e) => {
                misses.push(format!("#{k} construction: {e}"));
                continue;
            }
        };
        let sa = SaParams {
            seed: k,
            ..SaParams::default()
        }
        .with_seconds(5.0);
        let out = simulated_annealing(&inst, &initial, &model, &sa).map_err(|e| e.to_string())?;
        if out.best_cost == best.best_cost {
            hits += 1;
        } else {
            misses.push(format!("#{k} {} vs {}", out.best_cost, best.best_cost));
        }
    }
    check(
        hits >= 18,
        format!(
            "{hits}/20 reached the enumerated optimum (need 18){}",
            if misses.is_empty() {
                String::new()
            } else {
                format!("; misses: {}", misses.join(", "))
            }
        ),
    )
}

fn construction_contracts() -> Outcome {
    let params = GeneratorParams::default();
    for seed in 0..100u64 {
        let inst = generate_random_instance(&params, seed).map_err(|e| e.to_string())?;
        let built = construct(&inst, seed, 4).map_err(|e| format!("seed {seed}: {e}"))?;
        let (s1, s2, _) = count_separation_violations(&built.placed, &inst);
        if s1 + s2 != 0 {
            return Err(format!(
                "seed {seed}: placement has {s1}+{s2} separation violations"
            ));
        }
        let before = evaluate(&built.placed, &inst, 4)
            .violations
            .counts
            .availability();
        let after = evaluate(&built.tour, &inst, 4)
            .violations
            .counts
            .availability();
        if after > before {
            return Err(format!(
                "seed {seed}: backward swap raised y1+y2 from {before} to {after}"
            ));
        }
    }
    Ok(
        "100 instances of 15x42: placement separation-free, backward swap never raised y1+y2"
            .into(),
    )
}

fn zero_violations() -> Outcome {
    let (inst, _) = sample();
    let density = inst.availability_density();
    let model = CostModel::new(
        Weights::new(20.0, -200.0, 200.0),
        Penalties::new(10000.0, 1000000.0, 10000.0, 10000.0, 2000000.0),
    );
    let sa = SaParams::default().with_seconds(30.0);
    let started = Instant::now();
    let initial = construct(&inst, sa.seed, model.break_limit)
        .map_err(|e| e.to_string())?
        .tour;
    let out = simulated_annealing(&inst, &initial, &model, &sa).map_err(|e| e.to_string())?;
    let ev = evaluate(&out.best, &inst, model.break_limit);
    let complete = out.best.is_complete(&inst).unwrap_or(false);
    let y = ev.violations.counts.as_array();
    check(
        density >= 0.5 && complete && ev.violations.counts.is_zero(),
        format!(
            "density {density:.3}, {} restarts in {:.1}s, complete {complete}, y1..y5 {y:?}, cost {}",
            sa.budget.restarts,
            started.elapsed().as_secs_f64(),
            out.best_cost
        ),
    )
}

/// Thu/Fri count straight from calendar dates.
fn good_days_by_date(tour: &Tour, start: NaiveDate) -> usize {
    tour.performances()
        .filter(|&(day, _)| {
            let date = start.checked_add_days(Days::new(day as u64)).unwrap();
            matches!(date.weekday(), ChronoWeekday::Thu | ChronoWeekday::Fri)
        })
        .count()
}

fn run_check(tour_file: &str) -> Result<(PropertyBlock, Tour), String> {
    let path = repo_root().join("data/tours").join(tour_file);
    let out = tourcast()
        .args(["check", "--instance"])
        .arg(sample_dir())
        .arg(&path)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "check {tour_file} failed: {}",
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    let tour: Tour = std::fs::read_to_string(&path)
        .map_err(|e| e.to_string())?
        .trim()
        .parse()
        .map_err(|e: tourcast::Error| e.to_string())?;
    Ok((PropertyBlock::parse(&text)?, tour))
}

fn example_tours() -> Outcome {
    let start = NaiveDate::from_ymd_opt(2019, 10, 14).unwrap();
    let (manual, manual_tour) = run_check("manual.txt")?;
    let (low, low_tour) = run_check("low-miles.txt")?;
    let good1 = good_days_by_date(&manual_tour, start);
    let good2 = good_days_by_date(&low_tour, start);
    let ok = manual.bad_days == 6
        && manual.breaks == 0
        && manual.num_cities == 15
        && manual.good_days == good1
        && good1 == 3
        && low.good_days == good2
        && good2 == 5;
    check(
        ok,
        format!(
            "manual tour: bad {}, breaks {}, cities {}, good {} (date recount {good1}); low-miles tour: good {} (date recount {good2})",
            manual.bad_days, manual.breaks, manual.num_cities, manual.good_days, low.good_days
        ),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let manifest = dir.path().join("run.toml");
    std::fs::write(
        &manifest,
        format!(
            "[instance]\ndir = {:?}\n[anneal]\nrestarts = 3\n",
            sample_dir().canonicalize().unwrap()
        ),
    )
    .map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for run in ["a", "b"] {
        let out_dir = dir.path().join(run);
        let status = tourcast()
            .arg("solve")
            .arg("--manifest")
            .arg(&manifest)
            .args(["--seed", "7", "--out"])
            .arg(&out_dir)
            .output()
            .map_err(|e| e.to_string())?;
        if !status.status.success() {
            return Err(String::from_utf8_lossy(&status.stderr).to_string());
        }
        let best = std::fs::read(out_dir.join("best.txt")).map_err(|e| e.to_string())?;
        let sidecar = std::fs::read(out_dir.join("best.json")).map_err(|e| e.to_string())?;
        outputs.push((best, sidecar));
    }
    check(
        outputs[0] == outputs[1],
        "two seed-7 solves of the sample: best reports and sidecars byte-identical".into(),
    )
}

fn monotone_traces() -> Outcome {
    let (inst, _) = sample();
    let model = CostModel::default();
    let initial = construct(&inst, 3, 4).map_err(|e| e.to_string())?.tour;
    let mut lines = Vec::new();
    for (restarts, reset) in [(1, true), (2, false), (2, true)] {
        let sa = SaParams {
            budget: Budget::restarts(restarts),
            seed: 3,
            reset_on_restart: reset,
            ..SaParams::default()
        };
        let out = simulated_annealing(&inst, &initial, &model, &sa).map_err(|e| e.to_string())?;
        let t = &out.trace;
        if t.iterations < 100_000 || !t.is_best_monotone() {
            return Err(format!(
                "{} iterations, monotone {}",
                t.iterations,
                t.is_best_monotone()
            ));
        }
        lines.push(t.iterations.to_string());
    }
    Ok(format!(
        "best cost non-increasing over runs of {} iterations",
        lines.join(", ")
    ))
}

fn cooling_arithmetic() -> Outcome {
    let sa = SaParams {
        budget: Budget::restarts(2),
        ..SaParams::default()
    };
    let closed_form = ((500f64 / 5000.0).ln() / 0.95f64.ln()).ceil() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let inst =
        generate_random_instance(&tiny_params(&mut rng, 4, 10), 8).map_err(|e| e.to_string())?;
    let initial = construct(&inst, 0, 4).map_err(|e| e.to_string())?.tour;
    let out = simulated_annealing(&inst, &initial, &CostModel::default(), &sa)
        .map_err(|e| e.to_string())?;
    let stages = &out.trace.stages_per_restart;
    check(
        closed_form == 45 && cooling_stages(&sa) == 45 && stages == &vec![45, 45],
        format!(
            "closed form {closed_form}, planned {}, executed {stages:?}",
            cooling_stages(&sa)
        ),
    )
}

fn cost_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut zero_cases = 0;
    for k in 0..10_000u64 {
        let w = Weights::new(
            rng.random_range(0.0..2000.0),
            -rng.random_range(0.0..30000.0),
            rng.random_range(0.0..30000.0),
        );
        let p = Penalties::new(
            rng.random_range(0.0..1e6),
            rng.random_range(0.0..1e7),
            rng.random_range(0.0..1e6),
            rng.random_range(0.0..1e6),
            rng.random_range(0.0..1e7),
        );
        let objectives = Objectives {
            total_miles: rng.random_range(0..40_000),
            good_days: rng.random_range(0..16),
            bad_days: rng.random_range(0..16),
        };
        let counts = if k % 2 == 0 {
            ViolationCounts::default()
        } else {
            ViolationCounts::from_array(std::array::from_fn(|_| rng.random_range(0..5)))
        };
        let relaxed = relaxed_cost_of(&Summary { objectives, counts }, &w, &p).total;
        if counts.is_zero() {
            zero_cases += 1;
            if relaxed != strict_cost(&objectives, &w) {
                return Err(format!("zero violations but relaxed {relaxed} != strict"));
            }
        }
        let base = penalty_cost(&counts, &p);
        for j in 0..5 {
            let mut y = counts.as_array();
            y[j] += 1;
            if penalty_cost(&ViolationCounts::from_array(y), &p) < base {
                return Err(format!("penalty fell when y{} rose: {counts:?}", j + 1));
            }
        }
    }
    // The same identity on real zero-violation tours.
    let (inst, _) = sample();
    let model = CostModel::default();
    for tour_file in ["manual.txt", "low-miles.txt"] {
        let text = std::fs::read_to_string(repo_root().join("data/tours").join(tour_file)).unwrap();
        let tour: Tour = text.trim().parse().unwrap();
        let ev = evaluate(&tour, &inst, 4);
        if !ev.violations.counts.is_zero()
            || model.cost(tour.as_slice(), &inst) != strict_cost(&ev.objectives, &model.weights)
        {
            return Err(format!("{tour_file}: relaxed and strict cost differ"));
        }
    }
    Ok(format!("10000 random evaluations ({zero_cases} violation-free) plus two sample tours; penalty monotone in every y"))
}

fn ingestion_round_trip() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for seed in 0..100u64 {
        let p_available = rng.random_range(0.0..1.0);
        let params = GeneratorParams {
            num_cities: rng.random_range(1..=15),
            num_days: rng.random_range(1..=42),
            start_weekday: Weekday::ALL[rng.random_range(0..7)],
            p_available,
            p_relative: rng.random_range(0.0..=1.0 - p_available),
            symmetric_days: seed % 3 == 0,
            ..GeneratorParams::default()
        };
        let inst = generate_random_instance(&params, seed).map_err(|e| e.to_string())?;
        let sub = dir.path().join(format!("i{seed}"));
        let cutoff = rng.random_range(0..=9);
        write_instance_dir(&inst, &sub, cutoff, None).map_err(|e| e.to_string())?;
        let back = parse_instance(
            &sub.join("availability.csv"),
            &sub.join("miles.csv"),
            inst.calendar(),
            IngestOptions {
                travel_limit: inst.travel_limit(),
                waitlist_cutoff: cutoff,
            },
        )
        .map_err(|e| e.to_string())?;
        if back != inst {
            return Err(format!("seed {seed}: instance changed on the round trip"));
        }
    }

    use Availability::*;
    let mut table: Vec<(&str, Availability)> = vec![
        ("o", Available),
        ("c", AbsolutelyUnavailable),
        ("o/h", Available),
        ("p", AbsolutelyUnavailable),
        ("", AbsolutelyUnavailable),
    ];
    let waitlist: Vec<String> = (1..=9).map(|k| format!("{k}h")).collect();
    for (k, token) in waitlist.iter().enumerate() {
        table.push((
            token,
            if k < 3 {
                Available
            } else {
                RelativelyUnavailable
            },
        ));
    }
    for (token, expected) in &table {
        let status: VenueStatus = token.parse().map_err(|t| format!("token {t:?} rejected"))?;
        if classify_status(status, 3) != *expected {
            return Err(format!(
                "token {token:?} classified as {:?}",
                classify_status(status, 3)
            ));
        }
    }
    Ok(format!(
        "100 generated instances round-tripped; {} status tokens classified",
        table.len()
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("oracle equivalence", oracle_equivalence),
        ("optimality at tiny scale", tiny_optimality),
        ("construction contracts", construction_contracts),
        ("zero-violation solve of the sample", zero_violations),
        ("example tour checks", example_tours),
        ("determinism", determinism),
        ("best-cost monotonicity", monotone_traces),
        ("cooling arithmetic", cooling_arithmetic),
        ("cost identities", cost_identities),
        ("ingestion round-trip", ingestion_round_trip),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} ({secs:.1}s): {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({secs:.1}s): {detail}", k + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
