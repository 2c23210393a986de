use fuzzy_compose::experiment::run_cf_sweep;
use fuzzy_compose::fuzzy::{
    build_default_variables, generate_rule_base, infer_rank, rank_variable, PreferenceProfile, RuleBase, Universes,
    VariableSet,
};
use fuzzy_compose::qos::{Criterion, Direction, QosVector};
use proptest::prelude::*;

fn engine(profile: &PreferenceProfile) -> (VariableSet, RuleBase) {
    let vars = build_default_variables(&profile.universes).unwrap();
    let rb = generate_rule_base(profile, &vars, &rank_variable()).unwrap();
    (vars, rb)
}

fn arb_profile() -> impl Strategy<Value = PreferenceProfile> {
    prop::array::uniform4(0u32..=100)
        .prop_map(|g| PreferenceProfile::from_pairs(Criterion::ALL.into_iter().zip(g)).unwrap())
}

// Independent centroid of the unclipped top rank term on the 1001-point grid:
// y = 75 + 0.1k for k = 0..=250 with weight k/250.
fn top_term_centroid() -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for k in 0..=250 {
        let y = 75.0 + 0.1 * k as f64;
        let w = k as f64 / 250.0;
        num += y * w;
        den += w;
    }
    num / den
}

#[test]
fn best_point_is_the_top_term_centroid() {
    let oracle = top_term_centroid();
    assert!((oracle - 91.7).abs() < 1e-9);
    let (vars, rb) = engine(&PreferenceProfile::default());
    assert!((infer_rank(&rb, &vars, &vars.best_point()) - oracle).abs() < 1e-9);
}

fn sweep(vars: &VariableSet, rb: &RuleBase, crit: Criterion, mut q: QosVector) -> Vec<f64> {
    vars.get(crit)
        .sweep(100)
        .into_iter()
        .map(|x| {
            q.set(crit, x);
            infer_rank(rb, vars, &q)
        })
        .collect()
}

fn is_monotone(crit: Criterion, ranks: &[f64]) -> bool {
    ranks.windows(2).all(|w| match crit.direction() {
        Direction::LowerIsBetter => w[1] <= w[0] + 1e-9,
        Direction::HigherIsBetter => w[1] >= w[0] - 1e-9,
    })
}

#[test]
fn full_grades_are_monotone_at_middle_peaks() {
    let (vars, rb) = engine(&PreferenceProfile::default());
    for crit in Criterion::ALL {
        let ranks = sweep(&vars, &rb, crit, vars.middle_peaks());
        assert!(is_monotone(crit, &ranks), "{crit}: {ranks:?}");
        assert!((ranks[0] - ranks[99]).abs() > 20.0);
    }
}

#[test]
fn mixed_low_grades_bend_the_response() {
    // max-union of weakly clipped terms moves the centroid against the input
    let p = PreferenceProfile::from_pairs([(Criterion::ResponseTime, 1), (Criterion::Reliability, 1)]).unwrap();
    let (vars, rb) = engine(&p);
    let ranks = sweep(&vars, &rb, Criterion::ResponseTime, vars.middle_peaks());
    assert!(!is_monotone(Criterion::ResponseTime, &ranks));
}

#[test]
fn universes_follow_the_profile() {
    let mut p = PreferenceProfile::default();
    p.universes = Universes { cost: (0.0, 400.0), response_time: (10.0, 20.0) };
    let (vars, rb) = engine(&p);
    let mid = vars.middle_peaks();
    assert_eq!(mid.cost, 200.0);
    assert_eq!(mid.response_time, 15.0);
    assert!((infer_rank(&rb, &vars, &mid) - 50.0).abs() < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn rank_stays_in_range(
        p in arb_profile(),
        c in -50.0f64..200.0, t in -50.0f64..100.0, a in -1.0f64..2.0, r in -1.0f64..2.0,
    ) {
        let (vars, rb) = engine(&p);
        let rank = infer_rank(&rb, &vars, &QosVector { cost: c, response_time: t, availability: a, reliability: r });
        prop_assert!((0.0..=100.0).contains(&rank));
    }

    #[test]
    fn lone_criterion_moves_the_right_way(
        grade in 1u32..=100,
        pick in 0usize..4,
        c in 0.0f64..100.0, t in 0.0f64..50.0, a in 0.0f64..=1.0, r in 0.0f64..=1.0,
    ) {
        let crit = Criterion::ALL[pick];
        let p = PreferenceProfile::from_pairs(Criterion::ALL.into_iter().map(|k| (k, if k == crit { grade } else { 0 }))).unwrap();
        let (vars, rb) = engine(&p);
        let q = QosVector { cost: c, response_time: t, availability: a, reliability: r };
        let ranks = sweep(&vars, &rb, crit, q);
        prop_assert!(is_monotone(crit, &ranks), "{crit}: {ranks:?}");
    }

    #[test]
    fn spread_is_monotone_in_cf(mut cfs in prop::collection::vec(0.0f64..=1.0, 2..8), pick in 0usize..4) {
        cfs.sort_by(f64::total_cmp);
        let report = run_cf_sweep(&PreferenceProfile::default(), &[Criterion::ALL[pick]], &cfs, 100).unwrap();
        for w in report.rows.windows(2) {
            prop_assert!(w[1].spread >= w[0].spread - 1e-9, "{:?}", report.rows);
        }
    }

    #[test]
    fn criterion_order_does_not_matter(
        g in prop::array::uniform4(0u32..=100),
        perm in Just(Criterion::ALL.to_vec()).prop_shuffle(),
        c in 0.0f64..100.0, t in 0.0f64..50.0, a in 0.0f64..=1.0, r in 0.0f64..=1.0,
    ) {
        let straight = PreferenceProfile::from_pairs(Criterion::ALL.into_iter().zip(g)).unwrap();
        let shuffled = PreferenceProfile::from_pairs(perm.iter().map(|&c| (c, g[c.index()]))).unwrap();
        let q = QosVector { cost: c, response_time: t, availability: a, reliability: r };
        let (v1, r1) = engine(&straight);
        let (v2, r2) = engine(&shuffled);
        prop_assert_eq!(infer_rank(&r1, &v1, &q).to_bits(), infer_rank(&r2, &v2, &q).to_bits());
    }

    #[test]
    fn rule_order_does_not_matter(seed in any::<u64>(), c in 0.0f64..100.0, a in 0.0f64..=1.0) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let (vars, rb) = engine(&PreferenceProfile::from_pairs([(Criterion::Cost, 70), (Criterion::Reliability, 30)]).unwrap());
        let mut rules = rb.rules().to_vec();
        rules.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let shuffled = RuleBase::from_rules(rules, rank_variable(), &vars).unwrap();
        let q = QosVector { cost: c, response_time: 20.0, availability: a, reliability: 0.4 };
        prop_assert_eq!(rb.infer_rank(&vars, &q).to_bits(), shuffled.infer_rank(&vars, &q).to_bits());
    }
}
