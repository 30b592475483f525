//! Sparse rounding of a good partition.
//!
//! Given clusters `D_1..D_q` with centers `s_1..s_q`, solve
//!
//! ```text
//! min Σ z_i   s.t.   Σ_i a_l(D_i) z_i >= b_l  (l = 1..t),   0 <= z <= 1
//! ```
//!
//! at a basic optimum and open every center with `z_i > 0`. A vertex has at
//! most `t` fractional coordinates, so an optimum of at most `k - t + 1`
//! opens at most `k` centers.

use num_traits::Signed;

use crate::error::{Error, Result};
use crate::lp::{self, LinearProgram, LpOutcome, Relation, Sense};
use crate::model::Instance;
use crate::partition::GoodPartition;
use crate::rational::{self, Rational};

/// Covering rows over the clusters of a partition: `coeffs[l][i] = a_l(D_i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoveringSystem {
    pub coeffs: Vec<Vec<Rational>>,
    pub rhs: Vec<Rational>,
}

impl CoveringSystem {
    pub fn rows(&self) -> usize {
        self.rhs.len()
    }

    /// Appends a row. Negative right-hand sides are clamped to zero.
    pub fn push_row(&mut self, coeffs: Vec<Rational>, rhs: Rational) {
        let rhs = if rhs.is_negative() { rational::zero() } else { rhs };
        self.coeffs.push(coeffs);
        self.rhs.push(rhs);
    }

    /// `Σ_{i ∈ chosen} a_l(D_i) >= b_l` for every row.
    pub fn covered_by(&self, chosen: &[usize]) -> bool {
        self.coeffs
            .iter()
            .zip(&self.rhs)
            .all(|(row, b)| &rational::sum(chosen.iter().map(|&i| &row[i])) >= b)
    }
}

/// One row per color with `a_l(D_i) = |D_i ∩ X_l|` and `b_l = m_l`.
pub fn build_cluster_system(inst: &Instance, part: &GoodPartition) -> CoveringSystem {
    let mut sys = CoveringSystem { coeffs: Vec::new(), rhs: Vec::new() };
    for (l, c) in inst.colors().iter().enumerate() {
        let row = part
            .clusters
            .iter()
            .map(|d| rational::int(d.iter().filter(|&&u| inst.has_color(u, l)).count() as i64))
            .collect();
        sys.push_row(row, rational::int(c.demand() as i64));
    }
    sys
}

/// Aggregates point weights over clusters: `α(D_i)`.
pub fn cluster_weights(part: &GoodPartition, alpha: &[Rational]) -> Vec<Rational> {
    part.clusters
        .iter()
        .map(|d| rational::sum(d.iter().map(|&u| &alpha[u])))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundOutcome {
    /// Opened points, sorted.
    pub centers: Vec<usize>,
    /// Optimum of the rounding program, when it was solved.
    pub lp_value: Option<Rational>,
    pub fractional: usize,
}

/// Rounds a partition to at most `k` of its centers covering `sys`.
///
/// Fails with [`Error::Invariant`] when the rounding program is infeasible
/// or its optimum exceeds `k - t + 1`.
pub fn sparse_round(part: &GoodPartition, sys: &CoveringSystem, k: usize) -> Result<RoundOutcome> {
    let q = part.len();
    if q <= k {
        let mut centers = part.centers.clone();
        centers.sort_unstable();
        return Ok(RoundOutcome { centers, lp_value: None, fractional: 0 });
    }
    if sys.rhs.iter().all(|b| !b.is_positive()) {
        return Ok(RoundOutcome { centers: Vec::new(), lp_value: None, fractional: 0 });
    }
    let t = sys.rows();
    let mut program = LinearProgram::new(q, Sense::Minimize);
    for i in 0..q {
        program.set_bounds(i, Some(rational::zero()), Some(rational::one()));
        program.set_objective_coeff(i, rational::one());
    }
    for (row, b) in sys.coeffs.iter().zip(&sys.rhs) {
        program.add_constraint(row.clone(), Relation::Ge, b.clone());
    }
    let sol = match lp::solve(&program) {
        LpOutcome::Optimal(sol) => sol,
        _ => return Err(Error::invariant("rounding program is infeasible")),
    };
    let limit = rational::int(k as i64 - t as i64 + 1);
    if sol.objective > limit {
        return Err(Error::invariant(format!(
            "rounding optimum {} exceeds k - t + 1 = {}",
            rational::format(&sol.objective),
            rational::format(&limit)
        )));
    }
    let fractional = lp::fractional_count(&sol.values);
    if fractional > t {
        return Err(Error::invariant(format!("rounding vertex has {fractional} fractional entries for {t} rows")));
    }
    let chosen: Vec<usize> = (0..q).filter(|&i| sol.values[i].is_positive()).collect();
    if chosen.len() > k {
        return Err(Error::invariant(format!("rounding opened {} > k = {k} centers", chosen.len())));
    }
    if !sys.covered_by(&chosen) {
        return Err(Error::invariant("rounded centers miss a covering row"));
    }
    let mut centers: Vec<usize> = chosen.iter().map(|&i| part.centers[i]).collect();
    centers.sort_unstable();
    Ok(RoundOutcome { centers, lp_value: Some(sol.objective), fractional })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn part(q: usize) -> GoodPartition {
        GoodPartition { centers: (0..q).map(|i| 10 * i).collect(), clusters: (0..q).map(|i| vec![10 * i]).collect() }
    }

    fn system(rows: &[(&[i64], i64)]) -> CoveringSystem {
        let mut sys = CoveringSystem { coeffs: Vec::new(), rhs: Vec::new() };
        for (a, b) in rows {
            sys.push_row(a.iter().map(|&v| int(v)).collect(), int(*b));
        }
        sys
    }

    #[test]
    fn single_row_opens_the_big_cluster() {
        let out = sparse_round(&part(2), &system(&[(&[3, 2], 3)]), 1).unwrap();
        assert_eq!(out.centers, vec![0]);
        assert_eq!(out.lp_value, Some(int(1)));
    }

    #[test]
    fn zero_demand_opens_nothing() {
        let out = sparse_round(&part(3), &system(&[(&[1, 1, 1], 0), (&[2, 0, 1], 0)]), 1).unwrap();
        assert!(out.centers.is_empty());
    }

    #[test]
    fn few_clusters_open_all() {
        let out = sparse_round(&part(2), &system(&[(&[1, 1], 5)]), 2).unwrap();
        assert_eq!(out.centers, vec![0, 10]);
    }

    #[test]
    fn over_budget_is_an_invariant_failure() {
        let err = sparse_round(&part(3), &system(&[(&[1, 1, 1], 3)]), 2).unwrap_err();
        assert!(err.is_invariant());
        let err = sparse_round(&part(3), &system(&[(&[1, 1, 1], 4)]), 2).unwrap_err();
        assert!(err.is_invariant());
    }

    #[test]
    fn two_rows_stay_within_budget() {
        let sys = system(&[(&[2, 1, 0, 1], 2), (&[0, 1, 2, 1], 2)]);
        let out = sparse_round(&part(4), &sys, 3).unwrap();
        assert!(out.centers.len() <= 3);
        assert!(out.fractional <= 2);
    }

    #[test]
    fn negative_rhs_is_clamped() {
        let sys = system(&[(&[1, 1], -3)]);
        assert_eq!(sys.rhs, vec![int(0)]);
    }
}
