//! Round-or-cut solver for γ-colorful k-center and its radius search.
//!
//! At a fixed radius `r` the loop solves the relaxation plus accumulated
//! cuts, clusters the optimum, and then either rounds (radius `4r`), finds a
//! solution with few centers outside the cluster centers (radius `2r`), or
//! adds the cut `y(B(S, r)) <= bound` and repeats.

use num_traits::Zero;
use serde::Serialize;

use crate::dp::{find_few_outside, next_combination, GuessBudget, WeightRule};
use crate::error::{Error, Result};
use crate::lp::{self, FarkasCertificate, LpOutcome};
use crate::model::{CenterSet, Instance};
use crate::partition::good_partition;
use crate::rational::{self, Rational};
use crate::relaxation::{add_cut, add_weight_row, relaxation, split_point};
use crate::rounding::{build_cluster_system, cluster_weights, sparse_round};

/// The valid inequality `y(B(S, r)) <= bound`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Cut {
    pub centers: Vec<usize>,
    pub bound: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Rounded4r,
    Rounded2r,
    InfeasibleCertified,
    /// Every demand is zero.
    Trivial,
    /// Found by exhaustive enumeration.
    Enumerated,
}

/// Statistics of the sparse rounding step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RoundingRecord {
    pub clusters: usize,
    pub rows: usize,
    pub fractional: usize,
    pub opened: usize,
}

/// One attempted radius.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RadiusTrace {
    #[serde(with = "rational::serde_str")]
    pub radius: Rational,
    pub cuts: Vec<Cut>,
    pub lp_solves: usize,
    pub dp_calls: usize,
    pub outcome: Outcome,
    pub rounding: Option<RoundingRecord>,
    /// Centers returned at this radius, if any.
    pub solution: Option<Vec<usize>>,
}

impl RadiusTrace {
    fn new(radius: Rational, outcome: Outcome) -> Self {
        RadiusTrace { radius, cuts: Vec::new(), lp_solves: 0, dp_calls: 0, outcome, rounding: None, solution: None }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SolveTrace {
    pub radii: Vec<RadiusTrace>,
}

impl SolveTrace {
    pub fn lp_solves(&self) -> usize {
        self.radii.iter().map(|t| t.lp_solves).sum()
    }

    pub fn dp_calls(&self) -> usize {
        self.radii.iter().map(|t| t.dp_calls).sum()
    }

    pub fn cuts(&self) -> usize {
        self.radii.iter().map(|t| t.cuts.len()).sum()
    }
}

/// Why no radius-`r` solution exists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    /// The relaxation plus valid cuts is empty.
    Lp(FarkasCertificate),
    /// The guess search covered every center set of size at most `k`.
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FixedRadius {
    Solved(CenterSet),
    Infeasible(Certificate),
}

/// Parameters distinguishing the colorful loop from the fair separation loop.
pub(crate) struct LoopParams<'a> {
    /// `τ`: round when `y(B(S, r)) <= τ`; also the cut bound. May be negative.
    pub bound: i64,
    /// Guess budget before clamping to `k`.
    pub beta: usize,
    pub weight: Option<WeightRule<'a>>,
}

pub(crate) fn round_or_cut(inst: &Instance, r: &Rational, params: &LoopParams<'_>) -> Result<(FixedRadius, RadiusTrace)> {
    let mut trace = RadiusTrace::new(r.clone(), Outcome::InfeasibleCertified);
    let mut program = relaxation(inst, r);
    if let Some(rule) = &params.weight {
        add_weight_row(&mut program, rule.alpha, &rule.threshold);
    }
    let exhaustive = params.beta >= inst.k();
    let budget = GuessBudget::clamped(params.beta, inst.k());
    let r2 = r * rational::int(2);
    let r4 = r * rational::int(4);
    loop {
        trace.lp_solves += 1;
        let sol = match lp::solve(&program) {
            LpOutcome::Optimal(sol) => sol,
            LpOutcome::Infeasible(cert) => return Ok((FixedRadius::Infeasible(Certificate::Lp(cert)), trace)),
            LpOutcome::Unbounded => return Err(Error::invariant("bounded relaxation reported unbounded")),
        };
        let pt = split_point(&sol.values, inst.n());
        let part = good_partition(inst, r, &pt);
        let mass = pt.y_mass(&part.center_ball(inst, r));
        if mass <= rational::int(params.bound) {
            let mut sys = build_cluster_system(inst, &part);
            if let Some(rule) = &params.weight {
                sys.push_row(cluster_weights(&part, rule.alpha), rule.threshold.clone());
            }
            let out = sparse_round(&part, &sys, inst.k())?;
            trace.rounding = Some(RoundingRecord {
                clusters: part.len(),
                rows: sys.rows(),
                fractional: out.fractional,
                opened: out.centers.len(),
            });
            verify_solution(inst, &out.centers, &r4, params.weight.as_ref())?;
            trace.outcome = Outcome::Rounded4r;
            trace.solution = Some(out.centers.clone());
            return Ok((FixedRadius::Solved(CenterSet::new(out.centers, r4)), trace));
        }
        let search = find_few_outside(inst, &r2, &part.centers, budget, params.weight.as_ref())?;
        trace.dp_calls += search.dp_calls;
        if let Some(found) = search.found {
            verify_solution(inst, &found.centers, &r2, params.weight.as_ref())?;
            trace.outcome = Outcome::Rounded2r;
            trace.solution = Some(found.centers.clone());
            return Ok((FixedRadius::Solved(CenterSet::new(found.centers, r2)), trace));
        }
        if exhaustive {
            return Ok((FixedRadius::Infeasible(Certificate::Exhaustive), trace));
        }
        let mut centers = part.centers.clone();
        centers.sort_unstable();
        let cut = Cut { centers, bound: params.bound as usize };
        if trace.cuts.contains(&cut) {
            return Err(Error::invariant(format!("cut on {:?} generated twice", cut.centers)));
        }
        add_cut(&mut program, inst, r, &cut.centers, params.bound);
        trace.cuts.push(cut);
    }
}

fn verify_solution(inst: &Instance, centers: &[usize], r: &Rational, weight: Option<&WeightRule<'_>>) -> Result<()> {
    if !inst.check_feasible(centers, r).feasible {
        return Err(Error::invariant(format!(
            "centers {centers:?} are not a solution at radius {}",
            rational::format(r)
        )));
    }
    if let Some(rule) = weight {
        let covered = inst.covered(centers, r);
        let total = rational::sum((0..inst.n()).filter(|&u| covered[u]).map(|u| &rule.alpha[u]));
        if total < rule.threshold {
            return Err(Error::invariant(format!("centers {centers:?} miss the weight threshold")));
        }
    }
    Ok(())
}

fn all_demands_zero(inst: &Instance) -> bool {
    inst.colors().iter().all(|c| c.demand() == 0)
}

/// Runs the round-or-cut loop at radius `r`. A returned set works at `4r`
/// (or `2r`); an infeasibility certificate means no radius-`r` solution exists.
pub fn solve_fixed_radius(inst: &Instance, r: &Rational) -> Result<(FixedRadius, RadiusTrace)> {
    if all_demands_zero(inst) {
        return Ok((FixedRadius::Solved(CenterSet::new(Vec::new(), r.clone())), RadiusTrace::new(r.clone(), Outcome::Trivial)));
    }
    let gamma = inst.gamma() as i64;
    let params = LoopParams {
        bound: inst.k() as i64 - gamma + 1,
        beta: inst.gamma().saturating_sub(2),
        weight: None,
    };
    round_or_cut(inst, r, &params)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveOptions {
    /// Probe radii in increasing order instead of binary search.
    pub linear_scan: bool,
    /// Largest number of center sets enumerated when `γ >= k`.
    pub enumeration_cap: u128,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { linear_scan: false, enumeration_cap: 10_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorfulSolution {
    /// Smallest probed radius at which the loop succeeded.
    pub guess: Rational,
    /// Centers with the smallest radius at which they are feasible.
    pub solution: CenterSet,
    pub trace: SolveTrace,
}

/// Number of center sets of size at most `k` over `n` points, saturating.
pub fn subset_count(n: usize, k: usize) -> u128 {
    let mut total: u128 = 0;
    let mut term: u128 = 1;
    for i in 0..=k.min(n) {
        total = total.saturating_add(term);
        term = term.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    total
}

/// Best center set over all subsets of size at most `k`, smaller sets and
/// lexicographically earlier sets first on ties.
pub fn enumerate_best(inst: &Instance, cap: u128) -> Result<Option<CenterSet>> {
    let count = subset_count(inst.n(), inst.k());
    if count > cap {
        return Err(Error::CapExceeded { count, cap });
    }
    let mut best: Option<CenterSet> = None;
    for size in 0..=inst.k().min(inst.n()) {
        let mut combo: Vec<usize> = (0..size).collect();
        loop {
            if let Some(radius) = inst.tightest_radius(&combo) {
                if best.as_ref().is_none_or(|b| radius < b.radius) {
                    best = Some(CenterSet::new(combo.clone(), radius));
                }
            }
            if !next_combination(&mut combo, inst.n()) {
                break;
            }
        }
    }
    Ok(best)
}

/// Finds a solution of radius at most four times the optimum, or `None`
/// when the instance has no solution at any radius.
pub fn solve_colorful(inst: &Instance, opts: &SolveOptions) -> Result<Option<ColorfulSolution>> {
    if all_demands_zero(inst) {
        let zero = rational::zero();
        return Ok(Some(ColorfulSolution {
            guess: zero.clone(),
            solution: CenterSet::new(Vec::new(), zero.clone()),
            trace: SolveTrace { radii: vec![RadiusTrace::new(zero, Outcome::Trivial)] },
        }));
    }
    if inst.gamma() >= inst.k() && subset_count(inst.n(), inst.k()) <= opts.enumeration_cap {
        let best = enumerate_best(inst, opts.enumeration_cap)?;
        return Ok(best.map(|solution| ColorfulSolution {
            guess: solution.radius.clone(),
            trace: SolveTrace { radii: vec![RadiusTrace::new(solution.radius.clone(), Outcome::Enumerated)] },
            solution,
        }));
    }
    let radii = inst.candidate_radii();
    let mut trace = SolveTrace::default();
    let probe = |i: usize, trace: &mut SolveTrace| -> Result<Option<CenterSet>> {
        let (res, t) = solve_fixed_radius(inst, &radii[i])?;
        trace.radii.push(t);
        Ok(match res {
            FixedRadius::Solved(c) => Some(c),
            FixedRadius::Infeasible(_) => None,
        })
    };
    let found = if opts.linear_scan {
        let mut found = None;
        for i in 0..radii.len() {
            if let Some(c) = probe(i, &mut trace)? {
                found = Some((i, c));
                break;
            }
        }
        found
    } else {
        let top = radii.len() - 1;
        match probe(top, &mut trace)? {
            None => None,
            Some(c) => {
                let (mut lo, mut hi, mut best) = (0, top, c);
                while lo < hi {
                    let mid = lo + (hi - lo) / 2;
                    match probe(mid, &mut trace)? {
                        Some(c) => {
                            hi = mid;
                            best = c;
                        }
                        None => lo = mid + 1,
                    }
                }
                Some((hi, best))
            }
        }
    };
    let Some((i, centers)) = found else { return Ok(None) };
    let radius = inst
        .tightest_radius(&centers.centers)
        .ok_or_else(|| Error::invariant("returned center set exceeds k"))?;
    Ok(Some(ColorfulSolution {
        guess: radii[i].clone(),
        solution: CenterSet::new(centers.centers, radius),
        trace,
    }))
}

/// Opens every cluster with positive support in the rounding program at
/// radius `4r`, without the threshold test. Opens at most `k + γ - 1`
/// centers; `None` when the relaxation is empty.
pub fn pseudo_approx_baseline(inst: &Instance, r: &Rational) -> Result<Option<CenterSet>> {
    let program = relaxation(inst, r);
    let sol = match lp::solve(&program) {
        LpOutcome::Optimal(sol) => sol,
        _ => return Ok(None),
    };
    let pt = split_point(&sol.values, inst.n());
    let part = good_partition(inst, r, &pt);
    let sys = build_cluster_system(inst, &part);
    let centers = if part.len() <= inst.k() {
        part.centers.clone()
    } else {
        let mut rounding = lp::LinearProgram::new(part.len(), lp::Sense::Minimize);
        for i in 0..part.len() {
            rounding.set_bounds(i, Some(rational::zero()), Some(rational::one()));
            rounding.set_objective_coeff(i, rational::one());
        }
        for (row, b) in sys.coeffs.iter().zip(&sys.rhs) {
            rounding.add_constraint(row.clone(), lp::Relation::Ge, b.clone());
        }
        let z = match lp::solve(&rounding) {
            LpOutcome::Optimal(z) => z,
            _ => return Err(Error::invariant("baseline rounding program is infeasible")),
        };
        (0..part.len()).filter(|&i| !z.values[i].is_zero()).map(|i| part.centers[i]).collect()
    };
    let limit = inst.k() + inst.gamma() - 1;
    if centers.len() > limit {
        return Err(Error::invariant(format!("baseline opened {} > k + γ - 1 = {limit} centers", centers.len())));
    }
    let r4 = r * rational::int(4);
    let covered = inst.covered(&centers, &r4);
    for c in inst.colors() {
        if c.members().iter().filter(|&&u| covered[u]).count() < c.demand() {
            return Err(Error::invariant("baseline misses a demand"));
        }
    }
    Ok(Some(CenterSet::new(centers, r4)))
}
