mod common;

use colorful_kcenter::colorful::{solve_colorful, solve_fixed_radius, FixedRadius, SolveOptions};
use colorful_kcenter::dp::{dp_solve, DpProgram};
use colorful_kcenter::fair::{epsilon_for, solve_fair, FairOptions};
use colorful_kcenter::generators::{gen_random, gen_random_fair, MetricKind, RandomSpec};
use colorful_kcenter::rational::{ratio, Rational};
use common::*;
use proptest::prelude::*;

fn spec() -> impl Strategy<Value = (u64, RandomSpec)> {
    (any::<u64>(), 3usize..=9, 1usize..=3, 1usize..=3, any::<bool>()).prop_map(|(seed, n, k, gamma, grid)| {
        let metric = if grid { MetricKind::GridL1 } else { MetricKind::Line };
        (seed, RandomSpec::new(n, k.min(n), gamma, metric))
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn fixed_radius_is_sound_and_complete((seed, spec) in spec()) {
        let inst = gen_random(seed, &spec).unwrap();
        for r in radii(&inst) {
            let (outcome, _) = solve_fixed_radius(&inst, &r).unwrap();
            let exists = !solutions_at(&inst, &r).is_empty();
            match outcome {
                FixedRadius::Solved(c) => {
                    prop_assert!(c.len() <= inst.k());
                    prop_assert!(c.radius <= &r * Rational::from_integer(4.into()));
                    prop_assert!(serves(&inst, &c.centers, &c.radius));
                }
                FixedRadius::Infeasible(_) => prop_assert!(!exists, "certified infeasible at {r}"),
            }
        }
    }

    #[test]
    fn feasibility_is_monotone_in_the_radius((seed, spec) in spec()) {
        let inst = gen_random(seed, &spec).unwrap();
        let flags: Vec<bool> = radii(&inst).iter().map(|r| !solutions_at(&inst, r).is_empty()).collect();
        prop_assert!(flags.windows(2).all(|w| !w[0] || w[1]));
    }

    #[test]
    fn binary_search_and_linear_scan_agree_on_feasibility((seed, spec) in spec()) {
        let inst = gen_random(seed, &spec).unwrap();
        let fast = solve_colorful(&inst, &SolveOptions { enumeration_cap: 0, ..Default::default() }).unwrap();
        let scan = solve_colorful(&inst, &SolveOptions { enumeration_cap: 0, linear_scan: true }).unwrap();
        prop_assert_eq!(fast.is_some(), scan.is_some());
        if let (Some(a), Some(o)) = (&fast, opt_colorful(&inst)) {
            prop_assert!(a.solution.radius <= o * Rational::from_integer(4.into()));
        }
    }

    #[test]
    fn fair_pipeline_yields_valid_lotteries((seed, spec) in spec()) {
        let finst = gen_random_fair(seed, &spec).unwrap();
        let got = solve_fair(&finst, &FairOptions { enumeration_cap: 0, ..Default::default() }).unwrap();
        let opt = opt_fair(&finst);
        prop_assert_eq!(got.is_some(), opt.is_some());
        if let (Some(s), Some(o)) = (got, opt) {
            let support: Vec<(Vec<usize>, Rational)> =
                s.distribution.support.iter().map(|l| (l.centers.clone(), l.probability.clone())).collect();
            prop_assert!(lottery_ok(&finst, &s.distribution.radius, &support));
            prop_assert!(s.distribution.radius <= o * Rational::from_integer(4.into()));
        }
    }

    #[test]
    fn dp_matches_exhaustive_search(
        q in 1usize..=10,
        rows in 0usize..=3,
        seed in any::<u64>(),
    ) {
        use rand::Rng;
        let mut rng = rng(seed);
        let coeffs: Vec<Vec<u32>> = (0..rows).map(|_| (0..q).map(|_| rng.gen_range(0..=4)).collect()).collect();
        let demands: Vec<u32> = (0..rows).map(|_| rng.gen_range(0..=5)).collect();
        let weights: Vec<Rational> = (0..q).map(|_| ratio(rng.gen_range(0..=7), rng.gen_range(1..=3))).collect();
        let cap = rng.gen_range(0..=q);
        let prog = DpProgram::new(weights.clone(), coeffs.clone(), demands.clone(), cap).unwrap();
        let expected = knapsack_exhaustive(&weights, &coeffs, &demands, cap);
        prop_assert_eq!(dp_solve(&prog).map(|s| s.value), expected);
    }

    #[test]
    fn epsilon_separates_subset_sums(
        alpha in proptest::collection::vec((0i64..40, 1i64..30), 1..7),
        mu in (-10i64..80, 1i64..30),
    ) {
        let alpha: Vec<Rational> = alpha.into_iter().map(|(a, b)| ratio(a, b)).collect();
        let mu = ratio(mu.0, mu.1);
        let eps = epsilon_for(&alpha, &mu).eps;
        prop_assert!(eps > ratio(0, 1));
        for mask in 0u32..1 << alpha.len() {
            let v: Rational = (0..alpha.len()).filter(|&i| mask >> i & 1 == 1).map(|i| alpha[i].clone()).sum();
            prop_assert_eq!(v > mu, v >= &mu + &eps);
        }
    }
}
