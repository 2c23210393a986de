use fuzzy_compose::experiment::median;
use fuzzy_compose::fuzzy::PreferenceProfile;
use fuzzy_compose::ga::{evolve, mutate, two_point_crossover, CompositionProblem, FitnessMode, GaConfig, Genotype};
use fuzzy_compose::qos::{CandidateService, ProblemInstance, QosVector, Task, WorkflowNode};
use fuzzy_compose::rng::seeded;
use fuzzy_compose::workload::{generate_instance, WorkflowShape, WorkloadSpec};
use proptest::prelude::*;

// Every assignment, scored independently of the GA.
fn brute_force(problem: &CompositionProblem, weight: f64) -> (Vec<usize>, f64) {
    let counts = problem.candidate_counts().to_vec();
    let total: usize = counts.iter().product();
    let mut best = (Vec::new(), f64::NEG_INFINITY);
    for mut code in 0..total {
        let mut genes = vec![0; counts.len()];
        for i in (0..counts.len()).rev() {
            genes[i] = code % counts[i];
            code /= counts[i];
        }
        let f = problem.evaluate(&Genotype::new(genes.clone())).unwrap().penalized(weight);
        if f > best.1 {
            best = (genes, f);
        }
    }
    best
}

fn problem(spec: &WorkloadSpec, mode: FitnessMode) -> CompositionProblem {
    CompositionProblem::new(generate_instance(spec).unwrap(), &PreferenceProfile::default(), mode).unwrap()
}

#[test]
fn unconstrained_three_by_three_finds_the_optimum() {
    for seed in 0..10 {
        let p = problem(&WorkloadSpec::new(3, 3, seed).with_shape(WorkflowShape::default_mixed()), FitnessMode::Fuzzy);
        let (genes, fitness) = brute_force(&p, 0.0);
        let r = evolve(&p, &GaConfig { rng_seed: seed, ..GaConfig::default() }).unwrap();
        assert!((r.best_fitness - fitness).abs() < 1e-12, "seed {seed}");
        assert_eq!(r.best.genes(), genes.as_slice(), "seed {seed}");
    }
}

#[test]
fn weighted_sum_mode_finds_its_optimum() {
    for seed in 0..5 {
        let p = problem(&WorkloadSpec::new(4, 3, seed), FitnessMode::WeightedSum);
        let (_, fitness) = brute_force(&p, 0.0);
        let r = evolve(&p, &GaConfig { rng_seed: seed, ..GaConfig::default() }).unwrap();
        assert!((r.best_raw - fitness).abs() < 1e-12, "seed {seed}");
    }
}

#[test]
fn runs_are_bit_reproducible() {
    let spec = WorkloadSpec::new(12, 8, 3).with_constraints(vec!["cost=cheap".parse().unwrap()]);
    let p = problem(&spec, FitnessMode::Fuzzy);
    let cfg = GaConfig { population_size: 60, max_generations: 80, rng_seed: 11, ..GaConfig::default() };
    let a = evolve(&p, &cfg).unwrap();
    let b = evolve(&p, &cfg).unwrap();
    assert_eq!(a, b);
    let c = evolve(&p, &GaConfig { rng_seed: 12, ..cfg }).unwrap();
    assert_ne!(a.fitness_trace, c.fitness_trace);
}

#[test]
fn best_feasible_raw_fitness_never_drops() {
    for seed in 0..8 {
        let spec = WorkloadSpec::new(6, 5, seed)
            .with_constraints(vec!["cost=cheap".parse().unwrap(), "response_time=fast".parse().unwrap()]);
        let p = problem(&spec, FitnessMode::Fuzzy);
        let r =
            evolve(&p, &GaConfig { population_size: 40, max_generations: 120, rng_seed: seed, ..GaConfig::default() })
                .unwrap();
        let mut incumbent: Option<f64> = None;
        for row in &r.fitness_trace {
            if let Some(prev) = incumbent {
                let now = row.best_feasible.expect("a feasible member survives");
                assert!(now >= prev, "seed {seed} gen {}: {now} < {prev}", row.gen);
            }
            incumbent = row.best_feasible.or(incumbent);
        }
    }
}

#[test]
fn static_penalty_trace_is_monotone() {
    for seed in 0..5 {
        let spec = WorkloadSpec::new(8, 6, seed).with_constraints(vec!["cost=very cheap".parse().unwrap()]);
        let p = problem(&spec, FitnessMode::Fuzzy);
        let cfg = GaConfig {
            population_size: 50,
            max_generations: 100,
            dynamic_penalty: false,
            rng_seed: seed,
            ..GaConfig::default()
        };
        let r = evolve(&p, &cfg).unwrap();
        assert!(r.fitness_trace.windows(2).all(|w| w[1].best >= w[0].best), "seed {seed}");
    }
}

#[test]
fn feasible_assignments_are_never_penalized() {
    let spec = WorkloadSpec::new(5, 4, 21)
        .with_constraints(vec!["cost=cheap".parse().unwrap()])
        .restrict_to_constraints()
        .unwrap();
    let p = problem(&spec, FitnessMode::Fuzzy);
    let cfg = GaConfig::default();
    let g = Genotype::new(vec![1, 0, 3, 2, 1]);
    let raw = p.raw_fitness(&g).unwrap();
    for gen in [0, 1, 57, 398, 399, 400] {
        assert_eq!(p.penalized_fitness(&g, &cfg, gen).unwrap(), raw);
    }
}

#[test]
fn infeasible_instance_reports_violations() {
    let pricey = |i: usize| Task {
        name: format!("t{i}"),
        candidates: (0..3)
            .map(|k| CandidateService {
                id: format!("s{k}"),
                qos: QosVector { cost: 90.0 + k as f64, response_time: 10.0, availability: 0.9, reliability: 0.9 },
            })
            .collect(),
    };
    let inst = ProblemInstance::new(
        (0..3).map(pricey).collect(),
        WorkflowNode::sequence((0..3).map(WorkflowNode::task).collect()),
        vec!["cost=cheap".parse().unwrap()],
    )
    .unwrap();
    let p = CompositionProblem::new(inst, &PreferenceProfile::default(), FitnessMode::Fuzzy).unwrap();
    let cfg = GaConfig { population_size: 20, max_generations: 50, ..GaConfig::default() };
    let r = evolve(&p, &cfg).unwrap();
    assert!(!r.is_feasible());
    assert_eq!(r.generations_run, 50);
    // q_max = 50 per task over three tasks; the cheapest plan costs 270
    assert!((r.constraint_violations[0] - 120.0).abs() < 1e-9);
}

#[test]
fn equal_aggregates_score_equally() {
    let q = QosVector { cost: 20.0, response_time: 5.0, availability: 0.95, reliability: 0.9 };
    let twin = |i: usize| Task {
        name: format!("t{i}"),
        candidates: vec![CandidateService { id: "a".into(), qos: q }, CandidateService { id: "b".into(), qos: q }],
    };
    let inst = ProblemInstance::new(
        vec![twin(0), twin(1)],
        WorkflowNode::sequence(vec![WorkflowNode::task(0), WorkflowNode::task(1)]),
        vec![],
    )
    .unwrap();
    let p = CompositionProblem::new(inst, &PreferenceProfile::default(), FitnessMode::Fuzzy).unwrap();
    let f = |g: Vec<usize>| p.raw_fitness(&Genotype::new(g)).unwrap().to_bits();
    assert_eq!(f(vec![0, 1]), f(vec![1, 0]));
    assert_eq!(f(vec![0, 0]), f(vec![1, 1]));
}

#[test]
fn bigger_budget_is_not_worse_on_thirty_tasks() {
    let spec = WorkloadSpec::new(30, 30, 0).with_constraints(vec!["cost=cheap".parse().unwrap()]);
    let p = problem(&spec, FitnessMode::Fuzzy);
    let run = |pop, gens| {
        median(
            (0..10)
                .map(|seed| {
                    let cfg =
                        GaConfig { population_size: pop, max_generations: gens, rng_seed: seed, ..GaConfig::default() };
                    evolve(&p, &cfg).unwrap().best_fitness
                })
                .collect(),
        )
    };
    let small = run(50, 100);
    let large = run(200, 400);
    assert!(large >= small, "{large} < {small}");
}

fn arb_counts() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1usize..6, 2..12)
}

proptest! {
    #[test]
    fn operators_keep_genotypes_valid(counts in arb_counts(), seed in any::<u64>(), prob in 0.0f64..=1.0) {
        let mut r = seeded(seed);
        let pick = |r: &mut fuzzy_compose::rng::Rng| {
            use rand::Rng;
            Genotype::new(counts.iter().map(|&n| r.gen_range(0..n)).collect())
        };
        let a = pick(&mut r);
        let b = pick(&mut r);
        let (x, y) = two_point_crossover(&a, &b, &mut r).unwrap();
        prop_assert!(x.is_valid_for(&counts) && y.is_valid_for(&counts));
        let m = mutate(&x, &counts, prob, &mut r);
        prop_assert!(m.is_valid_for(&counts));
        // every gene of a child comes from one of the parents at that position
        for i in 0..counts.len() {
            prop_assert!(x.genes()[i] == a.genes()[i] || x.genes()[i] == b.genes()[i]);
        }
    }

    #[test]
    fn evolved_best_is_valid(tasks in 1usize..6, cands in 1usize..5, seed in any::<u64>()) {
        let p = problem(&WorkloadSpec::new(tasks, cands, seed).with_shape(WorkflowShape::default_mixed()), FitnessMode::Fuzzy);
        let cfg = GaConfig { population_size: 12, max_generations: 15, elite_count: 1, rng_seed: seed, ..GaConfig::default() };
        let r = evolve(&p, &cfg).unwrap();
        prop_assert!(r.best.is_valid_for(p.candidate_counts()));
        prop_assert!((0.0..=1.0).contains(&r.best_raw));
        prop_assert_eq!(r.generations_run, r.fitness_trace.len());
    }
}
