//! The canonical LP relaxation of a fixed-radius colorful instance.
//!
//! Variables are laid out as `x(0..n)` followed by `y(0..n)`, all in `[0, 1]`:
//!
//! ```text
//! Σ_v y(v)            <= k
//! Σ_{v ∈ B(u,r)} y(v) >= x(u)     for every point u
//! Σ_{u ∈ X_l} x(u)    >= m_l      for every color l
//! ```
//!
//! Round-or-cut loops append cuts `y(B(S, r)) <= bound` on top.

use crate::lp::{LinearProgram, Relation, Sense};
use crate::model::Instance;
use crate::partition::FractionalPoint;
use crate::rational::{self, Rational};

pub fn x_var(u: usize) -> usize {
    u
}

pub fn y_var(n: usize, v: usize) -> usize {
    n + v
}

/// Builds the relaxation with objective `max Σ x(u)`.
pub fn relaxation(inst: &Instance, r: &Rational) -> LinearProgram {
    let n = inst.n();
    let mut lp = LinearProgram::new(2 * n, Sense::Maximize);
    for j in 0..2 * n {
        lp.set_bounds(j, Some(rational::zero()), Some(rational::one()));
    }
    for u in 0..n {
        lp.set_objective_coeff(x_var(u), rational::one());
    }
    lp.add_sparse(
        (0..n).map(|v| (y_var(n, v), rational::one())),
        Relation::Le,
        rational::int(inst.k() as i64),
    );
    for u in 0..n {
        let terms = inst
            .ball(u, r)
            .into_iter()
            .map(|v| (y_var(n, v), rational::one()))
            .chain(std::iter::once((x_var(u), -rational::one())));
        lp.add_sparse(terms, Relation::Ge, rational::zero());
    }
    for c in inst.colors() {
        lp.add_sparse(
            c.members().iter().map(|&u| (x_var(u), rational::one())),
            Relation::Ge,
            rational::int(c.demand() as i64),
        );
    }
    lp
}

/// Appends `y(B(S, r)) <= bound`.
pub fn add_cut(lp: &mut LinearProgram, inst: &Instance, r: &Rational, centers: &[usize], bound: i64) {
    let n = inst.n();
    let covered = inst.covered(centers, r);
    lp.add_sparse(
        (0..n).filter(|&v| covered[v]).map(|v| (y_var(n, v), rational::one())),
        Relation::Le,
        rational::int(bound),
    );
}

/// Appends `Σ α(u) x(u) >= threshold`.
pub fn add_weight_row(lp: &mut LinearProgram, alpha: &[Rational], threshold: &Rational) {
    lp.add_sparse(
        alpha.iter().enumerate().map(|(u, a)| (x_var(u), a.clone())),
        Relation::Ge,
        threshold.clone(),
    );
}

pub fn split_point(values: &[Rational], n: usize) -> FractionalPoint {
    FractionalPoint { x: values[..n].to_vec(), y: values[n..2 * n].to_vec() }
}

pub fn join_point(pt: &FractionalPoint) -> Vec<Rational> {
    pt.x.iter().chain(&pt.y).cloned().collect()
}
