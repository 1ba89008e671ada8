use proptest::prelude::*;
use tourcast::anneal::cost_of;
use tourcast::constraints::summarize;
use tourcast::ingest::{generate_random_instance, GeneratorParams};
use tourcast::oracle::{
    brute_force_best, enumerate_complete_tours, recount, recount_cost, DEFAULT_CAP,
};
use tourcast::{
    construct_initial, evaluate, simulated_annealing, Budget, CostModel, Penalties, SaParams, Tour,
    Weekday, Weights,
};

fn tiny(m: usize, n: usize, weekday: usize, seed: u64) -> tourcast::Instance {
    let params = GeneratorParams {
        num_cities: m,
        num_days: n,
        start_weekday: Weekday::ALL[weekday],
        p_available: 0.5,
        p_relative: 0.3,
        mile_range: (0, 1600),
        ..GeneratorParams::default()
    };
    generate_random_instance(&params, seed).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn evaluate_matches_recount(m in 1usize..=4, extra in 0usize..=3, wd in 0usize..7, seed: u64, limit in 1usize..=4) {
        let inst = tiny(m, m + extra, wd, seed);
        for tour in enumerate_complete_tours(&inst, DEFAULT_CAP).unwrap() {
            let ev = evaluate(&tour, &inst, limit);
            let (obj, y) = recount(&tour, &inst, limit);
            prop_assert_eq!(ev.objectives, obj);
            prop_assert_eq!(ev.violations.counts.as_array(), y);
            let s = summarize(tour.as_slice(), &inst, limit);
            prop_assert_eq!(s, ev.summary());
        }
    }

    #[test]
    fn cost_paths_agree(m in 1usize..=4, extra in 0usize..=3, seed: u64) {
        let inst = tiny(m, m + extra, 0, seed);
        let model = CostModel::default();
        for tour in enumerate_complete_tours(&inst, DEFAULT_CAP).unwrap() {
            let fast = model.cost(tour.as_slice(), &inst);
            prop_assert_eq!(fast, recount_cost(&tour, &inst, &model));
            prop_assert_eq!(fast, cost_of(&tour, &inst, &model.weights, &model.penalties));
        }
    }

    #[test]
    fn annealing_never_beats_the_oracle(m in 2usize..=4, seed in 0u64..1000) {
        let inst = tiny(m, 2 * m + 1, 2, seed);
        let model = CostModel::default();
        let Ok(initial) = construct_initial(&inst, seed, model.break_limit) else {
            return Ok(());
        };
        let sa = SaParams { iters_per_temp: 200, budget: Budget::restarts(2), seed, ..SaParams::default() };
        let out = simulated_annealing(&inst, &initial, &model, &sa).unwrap();
        let best = brute_force_best(&inst, &model, DEFAULT_CAP).unwrap();
        prop_assert!(out.best_cost >= best.best_cost);
        prop_assert!(out.best_cost <= model.cost(initial.as_slice(), &inst));
        prop_assert!(out.best.is_complete(&inst).unwrap());
    }
}

#[test]
fn zero_weights_and_penalties_make_every_tour_optimal() {
    let inst = tiny(3, 5, 0, 4);
    let model = CostModel::new(Weights::new(0.0, 0.0, 0.0), Penalties::zero());
    let res = brute_force_best(&inst, &model, DEFAULT_CAP).unwrap();
    assert_eq!(res.best_cost, 0.0);
    assert_eq!(res.ties, 60);
    assert_eq!(res.best_tour, Tour::new(vec![0, 0, 1, 2, 3]));
}
