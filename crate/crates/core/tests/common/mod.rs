//! Reference computations for the integration tests. They use only the
//! distance matrix and the color classes of an instance, plus the LP engine
//! for lottery feasibility.

#![allow(dead_code)]

use colorful_kcenter::lp::{self, LinearProgram, LpOutcome, Relation, Sense};
use colorful_kcenter::model::{ColorClass, FairInstance, Instance};
use colorful_kcenter::rational::{int, Rational};
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// All subsets of `0..n` with at most `k` elements, as sorted vectors.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize <= k)
        .map(|m| (0..n).filter(|&i| m >> i & 1 == 1).collect())
        .collect()
}

pub fn radii(inst: &Instance) -> Vec<Rational> {
    let mut v = vec![Rational::zero()];
    for i in 0..inst.n() {
        for j in 0..inst.n() {
            v.push(inst.dist(i, j).clone());
        }
    }
    v.sort();
    v.dedup();
    v
}

pub fn reached(inst: &Instance, centers: &[usize], r: &Rational) -> Vec<bool> {
    (0..inst.n()).map(|u| centers.iter().any(|&c| inst.dist(c, u) <= r)).collect()
}

pub fn serves(inst: &Instance, centers: &[usize], r: &Rational) -> bool {
    let hit = reached(inst, centers, r);
    centers.len() <= inst.k()
        && inst
            .colors()
            .iter()
            .all(|c| c.members().iter().filter(|&&u| hit[u]).count() >= c.demand())
}

/// Every center set of size at most `k` that works at radius `r`.
pub fn solutions_at(inst: &Instance, r: &Rational) -> Vec<Vec<usize>> {
    subsets(inst.n(), inst.k()).into_iter().filter(|c| serves(inst, c, r)).collect()
}

/// Optimal colorful radius by enumerating subsets and radii.
pub fn opt_colorful(inst: &Instance) -> Option<Rational> {
    let all = subsets(inst.n(), inst.k());
    radii(inst).into_iter().find(|r| all.iter().any(|c| serves(inst, c, r)))
}

/// Whether some lottery over radius-`r` solutions meets every `p(u)`.
pub fn lottery_exists(finst: &FairInstance, r: &Rational) -> bool {
    let inst = finst.base();
    let cols = solutions_at(inst, r);
    if cols.is_empty() {
        return false;
    }
    let mut prog = LinearProgram::new(cols.len(), Sense::Minimize);
    prog.add_constraint(vec![Rational::one(); cols.len()], Relation::Eq, Rational::one());
    for u in 0..inst.n() {
        let row = cols
            .iter()
            .map(|c| if reached(inst, c, r)[u] { Rational::one() } else { Rational::zero() })
            .collect();
        prog.add_constraint(row, Relation::Ge, finst.p()[u].clone());
    }
    matches!(lp::solve(&prog), LpOutcome::Optimal(_))
}

pub fn opt_fair(finst: &FairInstance) -> Option<Rational> {
    radii(finst.base()).into_iter().find(|r| lottery_exists(finst, r))
}

/// Exact check of a lottery: probabilities, per-set feasibility and per-point coverage.
pub fn lottery_ok(finst: &FairInstance, radius: &Rational, support: &[(Vec<usize>, Rational)]) -> bool {
    let inst = finst.base();
    let total: Rational = support.iter().map(|(_, p)| p.clone()).sum();
    if !total.is_one() || support.iter().any(|(_, p)| p < &Rational::zero()) {
        return false;
    }
    if !support.iter().all(|(c, _)| serves(inst, c, radius)) {
        return false;
    }
    (0..inst.n()).all(|u| {
        let got: Rational = support
            .iter()
            .filter(|(c, _)| reached(inst, c, radius)[u])
            .map(|(_, p)| p.clone())
            .sum();
        got >= finst.p()[u]
    })
}

pub fn vertex_cover_exists(n: usize, edges: &[(usize, usize)], t: usize) -> bool {
    subsets(n, t)
        .iter()
        .any(|c| edges.iter().all(|(u, v)| c.contains(u) || c.contains(v)))
}

pub fn set_cover_exists(universe: usize, sets: &[Vec<usize>], t: usize) -> bool {
    subsets(sets.len(), t)
        .iter()
        .any(|pick| (0..universe).all(|e| pick.iter().any(|&i| sets[i].contains(&e))))
}

/// Best weight over all 0/1 selections meeting the covering rows within capacity.
pub fn knapsack_exhaustive(weights: &[Rational], coeffs: &[Vec<u32>], demands: &[u32], cap: usize) -> Option<Rational> {
    let q = weights.len();
    let mut best: Option<Rational> = None;
    for mask in 0u32..1 << q {
        if mask.count_ones() as usize > cap {
            continue;
        }
        let ok = coeffs.iter().zip(demands).all(|(row, &m)| {
            (0..q).filter(|&i| mask >> i & 1 == 1).map(|i| row[i]).sum::<u32>() >= m
        });
        if ok {
            let v: Rational = (0..q).filter(|&i| mask >> i & 1 == 1).map(|i| weights[i].clone()).sum();
            if best.as_ref().is_none_or(|b| &v > b) {
                best = Some(v);
            }
        }
    }
    best
}

/// Sites of two coincident points on a line, `k = sites - 1`, and one color
/// per site holding both of its points plus one point of another site, with
/// demand 2. The relaxation at radius 1 is feasible while no solution is,
/// which makes the round-or-cut loop emit cuts.
pub fn gap_instance(seed: u64) -> Instance {
    let mut rng = rng(seed);
    let sites = rng.gen_range(3..=4usize);
    let mut x = 0i64;
    let mut coords = Vec::new();
    for _ in 0..sites {
        coords.push(int(x));
        coords.push(int(x));
        x += *[3i64, 5, 50].choose(&mut rng).unwrap();
    }
    let n = coords.len();
    let mut colors: Vec<ColorClass> = (0..sites)
        .map(|i| {
            let mut j = rng.gen_range(0..sites - 1);
            if j >= i {
                j += 1;
            }
            ColorClass::new(vec![2 * i, 2 * i + 1, 2 * j + rng.gen_range(0..2)], 2)
        })
        .collect();
    if rng.gen_bool(0.3) {
        let members: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
        let demand = members.len() / 3;
        colors.push(ColorClass::new(members, demand));
    }
    Instance::on_line(&coords, sites - 1, colors).unwrap()
}
