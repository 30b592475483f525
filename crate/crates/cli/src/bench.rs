//! Approximation-ratio tables over seeded random instances.

use std::time::Instant;

use colorful_kcenter::colorful::{solve_colorful, SolveOptions};
use colorful_kcenter::error::{Error, Result};
use colorful_kcenter::fair::{solve_fair, FairOptions};
use colorful_kcenter::generators::{gen_random, gen_random_fair, RandomSpec};
use colorful_kcenter::oracle::{brute_force_colorful, brute_force_fair};
use colorful_kcenter::rational::{self, Rational};
use rayon::prelude::*;
use serde::Serialize;

use crate::{BenchArgs, Failure, Outcome, Suite, EXIT_INVARIANT, THREADS_ENV};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BenchRow {
    pub seed: u64,
    pub n: usize,
    pub k: usize,
    pub gamma: usize,
    /// `None` when the oracle was skipped or the instance is infeasible.
    #[serde(with = "opt_rational")]
    pub oracle_radius: Option<Rational>,
    #[serde(with = "opt_rational")]
    pub solver_radius: Option<Rational>,
    #[serde(with = "opt_rational")]
    pub ratio: Option<Rational>,
    pub oracle_skipped: bool,
    pub cuts: usize,
    pub lp_solves: usize,
    pub wall_ms: u128,
    /// Broken guarantees, empty when all hold.
    pub violations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BenchReport {
    pub suite: String,
    pub rows: Vec<BenchRow>,
}

mod opt_rational {
    use colorful_kcenter::rational::{self, Rational};
    use serde::Serializer;

    pub fn serialize<S: Serializer>(v: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(r) => s.serialize_str(&rational::format(r)),
            None => s.serialize_none(),
        }
    }
}

impl BenchReport {
    pub fn violations(&self) -> usize {
        self.rows.iter().map(|r| r.violations.len()).sum()
    }

    pub fn to_table(&self) -> String {
        let cell = |r: &Option<Rational>, skipped: bool| match r {
            Some(r) => rational::format(r),
            None if skipped => "n/a".into(),
            None => "-".into(),
        };
        let mut out = format!(
            "{:>6} {:>3} {:>3} {:>3} {:>10} {:>10} {:>8} {:>5} {:>6} {:>8}  status\n",
            "seed", "n", "k", "γ", "oracle", "solver", "ratio", "cuts", "lps", "ms"
        );
        for r in &self.rows {
            out.push_str(&format!(
                "{:>6} {:>3} {:>3} {:>3} {:>10} {:>10} {:>8} {:>5} {:>6} {:>8}  {}\n",
                r.seed,
                r.n,
                r.k,
                r.gamma,
                cell(&r.oracle_radius, r.oracle_skipped),
                cell(&r.solver_radius, false),
                cell(&r.ratio, r.oracle_skipped),
                r.cuts,
                r.lp_solves,
                r.wall_ms,
                if r.violations.is_empty() { "ok".to_string() } else { r.violations.join("; ") }
            ));
        }
        let worst = self.rows.iter().filter_map(|r| r.ratio.as_ref()).max();
        out.push_str(&format!(
            "{} instances, worst ratio {}, {} violations\n",
            self.rows.len(),
            worst.map(rational::format).unwrap_or_else(|| "n/a".into()),
            self.violations()
        ));
        out
    }
}

fn oracle<T>(result: Result<Option<T>>) -> Result<(Option<T>, bool)> {
    match result {
        Ok(v) => Ok((v, false)),
        Err(Error::CapExceeded { .. }) => Ok((None, true)),
        Err(e) => Err(e),
    }
}

fn bench_one(suite: Suite, seed: u64, spec: &RandomSpec, cap: u128) -> Result<BenchRow> {
    let start = Instant::now();
    let (solver, oracle_radius, skipped, cuts, lp_solves, mut violations) = match suite {
        Suite::Random => {
            let inst = gen_random(seed, spec)?;
            let sol = solve_colorful(&inst, &SolveOptions::default())?;
            let mut violations = Vec::new();
            if let Some(s) = &sol {
                if s.solution.len() > inst.k() || !inst.check_feasible(&s.solution.centers, &s.solution.radius).feasible {
                    violations.push("returned set is not feasible".to_string());
                }
            }
            let (opt, skipped) = oracle(brute_force_colorful(&inst, cap))?;
            let (cuts, lps) = sol.as_ref().map(|s| (s.trace.cuts(), s.trace.lp_solves())).unwrap_or_default();
            (sol.map(|s| s.solution.radius), opt.map(|o| o.radius), skipped, cuts, lps, violations)
        }
        Suite::Fair => {
            let finst = gen_random_fair(seed, spec)?;
            let sol = solve_fair(&finst, &FairOptions::default())?;
            let mut violations = Vec::new();
            if let Some(Err(e)) = sol.as_ref().map(|s| s.distribution.validate(&finst)) {
                violations.push(e);
            }
            let (opt, skipped) = oracle(brute_force_fair(&finst, cap))?;
            let (cuts, lps) = sol
                .as_ref()
                .map(|s| {
                    let r = &s.trace.radii;
                    (r.iter().map(|t| t.cuts).sum(), r.iter().map(|t| t.lp_solves).sum())
                })
                .unwrap_or_default();
            (sol.map(|s| s.distribution.radius), opt.map(|o| o.radius), skipped, cuts, lps, violations)
        }
    };
    let ratio = match (&solver, &oracle_radius) {
        (Some(s), Some(o)) if o > &rational::zero() => Some(s / o),
        _ => None,
    };
    match (&solver, &oracle_radius) {
        (Some(s), Some(o)) => {
            if s < o {
                violations.push("solver radius below the optimum".into());
            }
            if s > &(o * rational::int(4)) {
                violations.push("ratio exceeds 4".into());
            }
        }
        (None, Some(_)) => violations.push("solver missed a feasible instance".into()),
        (Some(_), None) if !skipped => violations.push("oracle found no solution".into()),
        _ => {}
    }
    Ok(BenchRow {
        seed,
        n: spec.n,
        k: spec.k,
        gamma: spec.gamma,
        oracle_radius,
        solver_radius: solver,
        ratio,
        oracle_skipped: skipped,
        cuts,
        lp_solves,
        wall_ms: start.elapsed().as_millis(),
        violations,
    })
}

fn threads() -> usize {
    std::env::var(THREADS_ENV).ok().and_then(|v| v.parse().ok()).filter(|&n| n > 0).unwrap_or(0)
}

pub(crate) fn run_bench(args: &BenchArgs) -> Outcome {
    let spec = RandomSpec {
        color_density: args.color_density,
        demand_density: args.demand_density,
        p_density: args.p_density,
        ..RandomSpec::new(args.n, args.k, args.gamma, args.metric.into())
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads())
        .build()
        .map_err(|e| Failure::Usage(format!("cannot start workers: {e}")))?;
    let (lo, hi) = args.seeds;
    let rows: Result<Vec<BenchRow>> =
        pool.install(|| (lo..=hi).into_par_iter().map(|seed| bench_one(args.suite, seed, &spec, args.cap)).collect());
    let report = BenchReport {
        suite: match args.suite {
            Suite::Random => "random",
            Suite::Fair => "fair",
        }
        .into(),
        rows: rows?,
    };
    let text = if args.json {
        serde_json::to_string_pretty(&report).map_err(|e| Failure::Usage(e.to_string()))? + "\n"
    } else {
        report.to_table()
    };
    if report.violations() > 0 {
        Err(Failure::Report(text, EXIT_INVARIANT))
    } else {
        Ok(text)
    }
}
