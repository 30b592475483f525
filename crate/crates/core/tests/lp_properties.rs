use colorful_kcenter::lp::{self, LinearProgram, LpOutcome, Relation, Sense};
use colorful_kcenter::rational::{int, ratio, Rational};
use proptest::prelude::*;

fn small_rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| ratio(n, d))
}

fn relation() -> impl Strategy<Value = Relation> {
    prop_oneof![Just(Relation::Le), Just(Relation::Ge), Just(Relation::Eq)]
}

#[derive(Debug, Clone)]
struct Shape {
    nvars: usize,
    rows: Vec<(Vec<Rational>, Relation, Rational)>,
    objective: Vec<Rational>,
    maximize: bool,
    boxed: Vec<bool>,
}

fn shape() -> impl Strategy<Value = Shape> {
    (1usize..=5, 0usize..=4).prop_flat_map(|(nvars, nrows)| {
        (
            prop::collection::vec(
                (prop::collection::vec(small_rational(), nvars), relation(), small_rational()),
                nrows,
            ),
            prop::collection::vec(small_rational(), nvars),
            any::<bool>(),
            prop::collection::vec(any::<bool>(), nvars),
        )
            .prop_map(move |(rows, objective, maximize, boxed)| Shape { nvars, rows, objective, maximize, boxed })
    })
}

fn build(s: &Shape, order: &[usize]) -> LinearProgram {
    let sense = if s.maximize { Sense::Maximize } else { Sense::Minimize };
    let mut lp = LinearProgram::new(s.nvars, sense);
    for (pos, &j) in order.iter().enumerate() {
        if s.boxed[j] {
            lp.set_bounds(pos, Some(int(0)), Some(int(2)));
        } else {
            lp.set_bounds(pos, Some(int(-1)), None);
        }
        lp.set_objective_coeff(pos, s.objective[j].clone());
    }
    for (coeffs, rel, rhs) in &s.rows {
        let permuted = order.iter().map(|&j| coeffs[j].clone()).collect();
        lp.add_constraint(permuted, *rel, rhs.clone());
    }
    lp
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn every_outcome_is_certified(s in shape()) {
        let order: Vec<usize> = (0..s.nvars).collect();
        let lp = build(&s, &order);
        match lp::solve(&lp) {
            LpOutcome::Optimal(sol) => prop_assert!(lp::verify_optimal(&lp, &sol), "{lp}\n{sol:?}"),
            LpOutcome::Infeasible(cert) => prop_assert!(lp::verify_infeasible(&lp, &cert), "{lp}\n{cert:?}"),
            LpOutcome::Unbounded => {
                // Some variable has no upper bound, otherwise the box would bound the objective.
                prop_assert!(s.boxed.iter().any(|b| !b));
            }
        }
    }

    #[test]
    fn permuting_variables_keeps_the_optimum(s in shape(), seed in any::<u64>()) {
        let mut order: Vec<usize> = (0..s.nvars).collect();
        let mut state = seed;
        for i in (1..order.len()).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            order.swap(i, (state >> 33) as usize % (i + 1));
        }
        let a = lp::solve(&build(&s, &(0..s.nvars).collect::<Vec<_>>()));
        let b = lp::solve(&build(&s, &order));
        match (a, b) {
            (LpOutcome::Optimal(x), LpOutcome::Optimal(y)) => prop_assert_eq!(x.objective, y.objective),
            (LpOutcome::Infeasible(_), LpOutcome::Infeasible(_)) => {}
            (LpOutcome::Unbounded, LpOutcome::Unbounded) => {}
            (x, y) => prop_assert!(false, "status mismatch {x:?} vs {y:?}"),
        }
    }

    /// Box-constrained programs with `t` extra rows have optimal vertices with
    /// at most `t` fractional coordinates.
    #[test]
    fn vertices_are_sparse(
        (q, rows, cost) in (2usize..=8, 1usize..=3).prop_flat_map(|(q, t)| (
            Just(q),
            prop::collection::vec((prop::collection::vec(0i64..=5, q), 0i64..=12), t),
            prop::collection::vec(0i64..=3, q),
        ))
    ) {
        let t = rows.len();
        let mut lp = LinearProgram::new(q, Sense::Minimize);
        for j in 0..q {
            lp.set_bounds(j, Some(int(0)), Some(int(1)));
            lp.set_objective_coeff(j, int(cost[j] + 1));
        }
        for (a, b) in &rows {
            lp.add_constraint(a.iter().map(|&v| int(v)).collect(), Relation::Ge, ratio(*b, 2));
        }
        if let LpOutcome::Optimal(sol) = lp::solve(&lp) {
            prop_assert!(lp::fractional_count(&sol.values) <= t);
            prop_assert!(lp::verify_optimal(&lp, &sol));
        }
    }
}
