//! Fair colorful k-center by column generation.
//!
//! At radius `r`, the restricted program over a family `H` of radius-`4r`
//! solutions either yields a lottery over `H` meeting every coverage
//! probability, or a dual point `(α, μ)` with `Σ p α − μ = 1` and
//! `α(B(C, 4r)) <= μ` on `H`. The dual point is priced by a round-or-cut
//! loop that either finds `C` with `α(B(C, 4r)) > μ`, which joins `H`, or
//! certifies that no radius-`r` lottery exists.

use num_bigint::{BigInt, RandBigInt};
use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::colorful::{round_or_cut, subset_count, Cut, FixedRadius, LoopParams, RadiusTrace};
use crate::dp::{next_combination, WeightRule};
use crate::error::{Error, Result};
use crate::lp::{self, LinearProgram, LpOutcome, Relation, Sense};
use crate::model::{CenterSet, FairInstance, Instance};
use crate::rational::{self, Rational};

/// A dual point normalized by `Σ p(u) α(u) − μ >= 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualPoint {
    alpha: Vec<Rational>,
    mu: Rational,
}

impl DualPoint {
    pub fn new(finst: &FairInstance, alpha: Vec<Rational>, mu: Rational) -> Result<Self> {
        if alpha.len() != finst.base().n() {
            return Err(Error::InvalidInstance("dual point has the wrong length".into()));
        }
        if alpha.iter().any(Signed::is_negative) {
            return Err(Error::InvalidInstance("dual point has a negative α entry".into()));
        }
        let lhs = rational::sum(finst.p().iter().zip(&alpha).map(|(p, a)| p * a).collect::<Vec<_>>().iter());
        if lhs < &mu + rational::one() {
            return Err(Error::InvalidInstance("dual point violates Σ p α >= μ + 1".into()));
        }
        Ok(DualPoint { alpha, mu })
    }

    pub fn alpha(&self) -> &[Rational] {
        &self.alpha
    }

    pub fn mu(&self) -> &Rational {
        &self.mu
    }
}

/// `ε = 1/Π` with `Π` the product of all denominators of `(α, μ)`. Any sum
/// `v` of `α` entries satisfies `v > μ` exactly when `v >= μ + ε`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpsilonGap {
    pub eps: Rational,
    pub pi: BigInt,
}

pub fn epsilon_gap(dp: &DualPoint) -> EpsilonGap {
    epsilon_for(&dp.alpha, &dp.mu)
}

/// The gap for an arbitrary `(α, μ)`, normalized or not.
pub fn epsilon_for(alpha: &[Rational], mu: &Rational) -> EpsilonGap {
    let pi = alpha
        .iter()
        .chain(std::iter::once(mu))
        .fold(BigInt::one(), |acc, v| acc * v.denom());
    EpsilonGap { eps: Rational::new(BigInt::one(), pi.clone()), pi }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Separation {
    /// No radius-`r` solution `C` has `α(B(C, r)) > μ`.
    InQ,
    /// A radius-`4r` solution with `α(B(C, 4r)) >= μ + ε`.
    Violating(CenterSet),
}

/// Prices a dual point at radius `r`.
pub fn separate_or_certify(finst: &FairInstance, r: &Rational, dp: &DualPoint) -> Result<(Separation, RadiusTrace)> {
    let inst = finst.base();
    let gap = epsilon_gap(dp);
    let params = LoopParams {
        bound: inst.k() as i64 - inst.gamma() as i64,
        beta: inst.gamma().saturating_sub(1),
        weight: Some(WeightRule { alpha: &dp.alpha, threshold: &dp.mu + &gap.eps }),
    };
    let (res, trace) = round_or_cut(inst, r, &params)?;
    let sep = match res {
        FixedRadius::Solved(c) => {
            let r4 = r * rational::int(4);
            let c = CenterSet::new(c.centers, r4);
            if coverage_weight(inst, &c.centers, &c.radius, &dp.alpha) <= dp.mu {
                return Err(Error::invariant("priced set does not violate the dual point"));
            }
            Separation::Violating(c)
        }
        FixedRadius::Infeasible(_) => Separation::InQ,
    };
    Ok((sep, trace))
}

fn coverage_weight(inst: &Instance, centers: &[usize], r: &Rational, alpha: &[Rational]) -> Rational {
    let covered = inst.covered(centers, r);
    rational::sum((0..inst.n()).filter(|&u| covered[u]).map(|u| &alpha[u]))
}

/// One support entry of a lottery.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Lottery {
    pub centers: Vec<usize>,
    #[serde(rename = "prob", with = "rational::serde_str")]
    pub probability: Rational,
}

/// A lottery over center sets that works at `radius`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distribution {
    pub radius: Rational,
    pub support: Vec<Lottery>,
}

impl Distribution {
    /// Checks every defining property exactly.
    pub fn validate(&self, finst: &FairInstance) -> std::result::Result<(), String> {
        let inst = finst.base();
        if self.support.iter().any(|l| l.probability.is_negative()) {
            return Err("negative probability".into());
        }
        let total = rational::sum(self.support.iter().map(|l| &l.probability));
        if !total.is_one() {
            return Err(format!("probabilities sum to {}", rational::format(&total)));
        }
        let mut coverage = vec![rational::zero(); inst.n()];
        for l in &self.support {
            if !inst.check_feasible(&l.centers, &self.radius).feasible {
                return Err(format!("{:?} is not a solution at radius {}", l.centers, rational::format(&self.radius)));
            }
            for (u, hit) in inst.covered(&l.centers, &self.radius).into_iter().enumerate() {
                if hit {
                    coverage[u] += &l.probability;
                }
            }
        }
        if let Some(u) = (0..inst.n()).find(|&u| coverage[u] < finst.p()[u]) {
            return Err(format!(
                "point {u} is covered with probability {} < {}",
                rational::format(&coverage[u]),
                rational::format(&finst.p()[u])
            ));
        }
        Ok(())
    }

    /// Draws a support set with its exact probability.
    pub fn sample(&self, seed: u64) -> &[usize] {
        let scale = rational::common_denominator(self.support.iter().map(|l| &l.probability));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ticket = Rational::from_integer(rng.gen_bigint_range(&BigInt::zero(), &scale)) / Rational::from_integer(scale);
        let mut cumulative = rational::zero();
        for l in &self.support {
            cumulative += &l.probability;
            if ticket < cumulative {
                return &l.centers;
            }
        }
        &self.support.last().expect("non-empty support").centers
    }
}

pub fn sample(dist: &Distribution, seed: u64) -> &[usize] {
    dist.sample(seed)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Restricted {
    Distribution(Distribution),
    Dual(DualPoint),
}

/// Solves the restricted program over `H` at radius `r4`.
pub fn solve_restricted(finst: &FairInstance, r4: &Rational, family: &[CenterSet]) -> Result<Restricted> {
    let inst = finst.base();
    let n = inst.n();
    let mu = n;
    let mut dual = LinearProgram::new(n + 1, Sense::Minimize);
    dual.set_bounds(mu, None, None);
    for u in 0..n {
        dual.set_objective_coeff(u, rational::one());
    }
    for c in family {
        let covered = inst.covered(&c.centers, r4);
        let terms = (0..n)
            .filter(|&u| covered[u])
            .map(|u| (u, rational::one()))
            .chain(std::iter::once((mu, -rational::one())));
        dual.add_sparse(terms, Relation::Le, rational::zero());
    }
    let norm = finst
        .p()
        .iter()
        .enumerate()
        .filter(|(_, p)| !p.is_zero())
        .map(|(u, p)| (u, p.clone()))
        .chain(std::iter::once((mu, -rational::one())));
    dual.add_sparse(norm, Relation::Eq, rational::one());
    match lp::solve(&dual) {
        LpOutcome::Optimal(sol) => {
            let alpha = sol.values[..n].to_vec();
            Ok(Restricted::Dual(DualPoint::new(finst, alpha, sol.values[mu].clone())?))
        }
        LpOutcome::Infeasible(_) => {
            let dist = solve_plp(finst, r4, family)?
                .ok_or_else(|| Error::invariant("restricted dual and primal are both infeasible"))?;
            Ok(Restricted::Distribution(dist))
        }
        LpOutcome::Unbounded => Err(Error::invariant("restricted dual is unbounded")),
    }
}

/// Finds a basic lottery over `columns` meeting every `p(u)` at radius `r`.
pub fn solve_plp(finst: &FairInstance, r: &Rational, columns: &[CenterSet]) -> Result<Option<Distribution>> {
    let inst = finst.base();
    let m = columns.len();
    if m == 0 {
        return Ok(None);
    }
    let mut plp = LinearProgram::new(m, Sense::Minimize);
    plp.add_sparse((0..m).map(|i| (i, rational::one())), Relation::Eq, rational::one());
    let cover: Vec<Vec<bool>> = columns.iter().map(|c| inst.covered(&c.centers, r)).collect();
    for u in 0..inst.n() {
        if finst.p()[u].is_zero() {
            continue;
        }
        plp.add_sparse(
            (0..m).filter(|&i| cover[i][u]).map(|i| (i, rational::one())),
            Relation::Ge,
            finst.p()[u].clone(),
        );
    }
    let sol = match lp::solve(&plp) {
        LpOutcome::Optimal(sol) => sol,
        LpOutcome::Infeasible(_) => return Ok(None),
        LpOutcome::Unbounded => return Err(Error::invariant("lottery program is unbounded")),
    };
    let support = (0..m)
        .filter(|&i| sol.values[i].is_positive())
        .map(|i| Lottery { centers: columns[i].centers.clone(), probability: sol.values[i].clone() })
        .collect();
    let dist = Distribution { radius: r.clone(), support };
    dist.validate(finst).map_err(Error::invariant)?;
    Ok(Some(dist))
}

/// Every solution of radius `r`, one per distinct covered set, smaller and
/// lexicographically earlier sets first.
pub fn enumerate_family(inst: &Instance, r: &Rational, cap: u128) -> Result<Vec<CenterSet>> {
    let count = subset_count(inst.n(), inst.k());
    if count > cap {
        return Err(Error::CapExceeded { count, cap });
    }
    let mut seen = std::collections::HashSet::new();
    let mut family = Vec::new();
    for size in 0..=inst.k().min(inst.n()) {
        let mut combo: Vec<usize> = (0..size).collect();
        loop {
            if inst.check_feasible(&combo, r).feasible && seen.insert(inst.covered(&combo, r)) {
                family.push(CenterSet::new(combo.clone(), r.clone()));
            }
            if !next_combination(&mut combo, inst.n()) {
                break;
            }
        }
    }
    Ok(family)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FairOutcome {
    Distribution,
    InQ,
    Enumerated,
    EnumeratedInfeasible,
}

/// Column generation at one radius.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FairRadiusTrace {
    #[serde(with = "rational::serde_str")]
    pub radius: Rational,
    pub columns: usize,
    pub pricing_rounds: usize,
    pub lp_solves: usize,
    pub dp_calls: usize,
    pub cuts: usize,
    pub outcome: FairOutcome,
    /// Every priced dual point with the cuts its separation added.
    #[serde(skip)]
    pub pricing: Vec<PricingRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PricingRecord {
    pub alpha: Vec<Rational>,
    /// `μ + ε`.
    pub threshold: Rational,
    pub cuts: Vec<Cut>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct FairTrace {
    pub radii: Vec<FairRadiusTrace>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FairSolution {
    /// Smallest probed radius `r` at which column generation succeeded.
    pub guess: Rational,
    pub distribution: Distribution,
    pub trace: FairTrace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FairOptions {
    pub linear_scan: bool,
    pub enumeration_cap: u128,
}

impl Default for FairOptions {
    fn default() -> Self {
        FairOptions { linear_scan: false, enumeration_cap: 10_000_000 }
    }
}

/// Column generation at radius `r`; a returned lottery works at `4r`.
pub fn solve_fair_at(finst: &FairInstance, r: &Rational) -> Result<(Option<Distribution>, FairRadiusTrace)> {
    let inst = finst.base();
    let r4 = r * rational::int(4);
    let mut trace = FairRadiusTrace {
        radius: r.clone(),
        columns: 0,
        pricing_rounds: 0,
        lp_solves: 0,
        dp_calls: 0,
        cuts: 0,
        outcome: FairOutcome::InQ,
        pricing: Vec::new(),
    };
    let mut family: Vec<CenterSet> = Vec::new();
    loop {
        match solve_restricted(finst, &r4, &family)? {
            Restricted::Distribution(d) => {
                trace.outcome = FairOutcome::Distribution;
                trace.columns = family.len();
                return Ok((Some(d), trace));
            }
            Restricted::Dual(dp) => {
                trace.pricing_rounds += 1;
                let (sep, inner) = separate_or_certify(finst, r, &dp)?;
                trace.lp_solves += inner.lp_solves;
                trace.dp_calls += inner.dp_calls;
                trace.cuts += inner.cuts.len();
                trace.pricing.push(PricingRecord {
                    alpha: dp.alpha.clone(),
                    threshold: &dp.mu + epsilon_gap(&dp).eps,
                    cuts: inner.cuts,
                });
                match sep {
                    Separation::InQ => {
                        trace.columns = family.len();
                        return Ok((None, trace));
                    }
                    Separation::Violating(c) => {
                        if family.contains(&c) {
                            return Err(Error::invariant(format!("column {:?} priced twice", c.centers)));
                        }
                        if !inst.check_feasible(&c.centers, &r4).feasible {
                            return Err(Error::invariant("priced column is not a solution at 4r"));
                        }
                        family.push(c);
                    }
                }
            }
        }
    }
}

fn enumerated_at(finst: &FairInstance, r: &Rational, cap: u128) -> Result<(Option<Distribution>, FairRadiusTrace)> {
    let family = enumerate_family(finst.base(), r, cap)?;
    let dist = solve_plp(finst, r, &family)?;
    let trace = FairRadiusTrace {
        radius: r.clone(),
        columns: family.len(),
        pricing_rounds: 0,
        lp_solves: 1,
        dp_calls: 0,
        cuts: 0,
        pricing: Vec::new(),
        outcome: if dist.is_some() { FairOutcome::Enumerated } else { FairOutcome::EnumeratedInfeasible },
    };
    Ok((dist, trace))
}

/// Smallest radius, among candidates up to the lottery's own, at which it
/// remains valid.
fn tighten(finst: &FairInstance, mut dist: Distribution) -> Distribution {
    let radii = finst.base().candidate_radii();
    for r in radii.into_iter().filter(|r| r < &dist.radius) {
        let trial = Distribution { radius: r, support: dist.support.clone() };
        if trial.validate(finst).is_ok() {
            dist.radius = trial.radius;
            break;
        }
    }
    dist
}

/// A lottery of radius at most four times the optimum, or `None` when no
/// radius admits one.
pub fn solve_fair(finst: &FairInstance, opts: &FairOptions) -> Result<Option<FairSolution>> {
    let inst = finst.base();
    let enumerate = inst.gamma() >= inst.k() && subset_count(inst.n(), inst.k()) <= opts.enumeration_cap;
    let radii = inst.candidate_radii();
    let mut trace = FairTrace::default();
    let mut probe = |i: usize| -> Result<Option<Distribution>> {
        let (d, t) = if enumerate {
            enumerated_at(finst, &radii[i], opts.enumeration_cap)?
        } else {
            solve_fair_at(finst, &radii[i])?
        };
        trace.radii.push(t);
        Ok(d)
    };
    let found = if opts.linear_scan {
        let mut found = None;
        for i in 0..radii.len() {
            if let Some(d) = probe(i)? {
                found = Some((i, d));
                break;
            }
        }
        found
    } else {
        let top = radii.len() - 1;
        match probe(top)? {
            None => None,
            Some(d) => {
                let (mut lo, mut hi, mut best) = (0, top, d);
                while lo < hi {
                    let mid = lo + (hi - lo) / 2;
                    match probe(mid)? {
                        Some(d) => {
                            hi = mid;
                            best = d;
                        }
                        None => lo = mid + 1,
                    }
                }
                Some((hi, best))
            }
        }
    };
    let Some((i, dist)) = found else { return Ok(None) };
    Ok(Some(FairSolution { guess: radii[i].clone(), distribution: tighten(finst, dist), trace }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ColorClass;
    use crate::rational::{int, ratio};

    fn fair_line(coords: &[i64], k: usize, colors: Vec<ColorClass>, p: Vec<Rational>) -> FairInstance {
        let c: Vec<Rational> = coords.iter().map(|&v| int(v)).collect();
        FairInstance::new(Instance::on_line(&c, k, colors).unwrap(), p).unwrap()
    }

    fn triangle_with_pendant(p: Vec<Rational>) -> FairInstance {
        let n = 4;
        let dist = (0..n).map(|i| (0..n).map(|j| int((i != j) as i64)).collect()).collect();
        let colors = [vec![0, 1], vec![1, 2], vec![0, 2], vec![0, 3]]
            .into_iter()
            .map(|m| ColorClass::new(m, 1))
            .collect();
        FairInstance::new(Instance::new(dist, 2, colors).unwrap(), p).unwrap()
    }

    #[test]
    fn epsilon_examples() {
        let gap = |alpha: Vec<Rational>, mu: Rational| epsilon_gap(&DualPoint { alpha, mu }).eps;
        assert_eq!(gap(vec![ratio(1, 2), ratio(1, 3)], ratio(1, 4)), ratio(1, 24));
        assert_eq!(gap(vec![int(2), int(0)], int(1)), int(1));
        assert_eq!(gap(vec![ratio(1, 2), ratio(1, 2)], int(0)), ratio(1, 4));
    }

    #[test]
    fn dual_point_normalization_is_checked() {
        let f = fair_line(&[0], 1, vec![ColorClass::new(vec![0], 0)], vec![ratio(1, 2)]);
        assert!(DualPoint::new(&f, vec![int(1)], int(0)).is_err());
        assert!(DualPoint::new(&f, vec![int(-1)], int(-3)).is_err());
        assert!(DualPoint::new(&f, vec![int(2)], int(0)).is_ok());
    }

    #[test]
    fn vacuous_threshold_prices_a_solution() {
        let f = triangle_with_pendant(vec![int(0); 4]);
        let dp = DualPoint::new(&f, vec![int(0); 4], int(-1)).unwrap();
        let (sep, _) = separate_or_certify(&f, &int(0), &dp).unwrap();
        let Separation::Violating(c) = sep else { panic!("expected a violating set") };
        assert!(f.base().check_feasible(&c.centers, &int(0)).feasible);
    }

    #[test]
    fn single_point_is_priced() {
        let f = fair_line(&[0], 1, vec![ColorClass::new(vec![0], 1)], vec![int(1)]);
        let dp = DualPoint::new(&f, vec![int(2)], int(1)).unwrap();
        let (sep, _) = separate_or_certify(&f, &int(0), &dp).unwrap();
        assert_eq!(sep, Separation::Violating(CenterSet::new(vec![0], int(0))));
    }

    #[test]
    fn unattainable_demand_is_in_q() {
        let f = fair_line(&[0, 10, 20], 1, vec![ColorClass::new(vec![0, 1, 2], 3)], vec![int(0); 3]);
        let dp = DualPoint::new(&f, vec![int(0); 3], int(-1)).unwrap();
        let (sep, _) = separate_or_certify(&f, &int(1), &dp).unwrap();
        assert_eq!(sep, Separation::InQ);
    }

    #[test]
    fn restricted_examples() {
        let f = fair_line(&[0, 2], 1, vec![ColorClass::new(vec![0, 1], 0)], vec![ratio(1, 2), ratio(1, 2)]);
        assert!(matches!(solve_restricted(&f, &int(0), &[]).unwrap(), Restricted::Dual(_)));
        let all = CenterSet::new(vec![0], int(2));
        let Restricted::Distribution(d) = solve_restricted(&f, &int(2), &[all]).unwrap() else { panic!() };
        assert_eq!(d.support.len(), 1);
        assert_eq!(d.support[0].probability, int(1));
        let h = [CenterSet::new(vec![0], int(0)), CenterSet::new(vec![1], int(0))];
        let Restricted::Distribution(d) = solve_restricted(&f, &int(0), &h).unwrap() else { panic!() };
        assert_eq!(d.support.iter().map(|l| l.probability.clone()).collect::<Vec<_>>(), vec![ratio(1, 2), ratio(1, 2)]);
    }

    #[test]
    fn fair_single_point() {
        let f = fair_line(&[0], 1, vec![ColorClass::new(vec![0], 1)], vec![int(1)]);
        let sol = solve_fair(&f, &FairOptions { enumeration_cap: 0, ..Default::default() }).unwrap().unwrap();
        assert_eq!(sol.distribution.radius, int(0));
        assert_eq!(sol.distribution.support, vec![Lottery { centers: vec![0], probability: int(1) }]);
    }

    #[test]
    fn two_points_need_radius_two() {
        let f = fair_line(&[0, 2], 1, vec![ColorClass::new(vec![0, 1], 0)], vec![ratio(3, 4), ratio(3, 4)]);
        let (d, _) = solve_fair_at(&f, &int(0)).unwrap();
        assert!(d.is_none());
        let sol = solve_fair(&f, &FairOptions { enumeration_cap: 0, ..Default::default() }).unwrap().unwrap();
        assert_eq!(sol.guess, int(2));
        sol.distribution.validate(&f).unwrap();
        let sol = solve_fair(&f, &FairOptions::default()).unwrap().unwrap();
        assert_eq!(sol.distribution.radius, int(2));
    }

    #[test]
    fn zero_probabilities_reduce_to_colorful() {
        let f = triangle_with_pendant(vec![int(0); 4]);
        let sol = solve_fair(&f, &FairOptions { enumeration_cap: 0, ..Default::default() }).unwrap().unwrap();
        assert_eq!(sol.distribution.radius, int(0));
        assert_eq!(sol.distribution.support.len(), 1);
    }

    #[test]
    fn sampling_is_exact_and_seeded() {
        let d = Distribution {
            radius: int(0),
            support: vec![
                Lottery { centers: vec![0], probability: ratio(1, 3) },
                Lottery { centers: vec![1], probability: ratio(2, 3) },
            ],
        };
        assert_eq!(d.sample(7), d.sample(7));
        let ones = (0..3000).filter(|&s| d.sample(s) == [1]).count();
        assert!((1850..2150).contains(&ones), "{ones}");
        let single = Distribution { radius: int(0), support: vec![Lottery { centers: vec![2], probability: int(1) }] };
        assert!((0..50).all(|s| single.sample(s) == [2]));
    }
}
