//! Exact rational linear programming.
//!
//! A dense two-phase primal simplex over [`Rational`] with Bland's rule
//! (lowest-index entering column, ties in the ratio test broken by the lowest
//! basic column index). Bland's rule rules out cycling and makes every solve
//! deterministic. Optimal outcomes are basic feasible solutions, i.e.
//! vertices of the feasible polyhedron, and carry a dual vector; infeasible
//! outcomes carry a Farkas certificate. Both can be checked independently
//! with [`verify_optimal`] and [`verify_infeasible`].
//!
//! Worst-case pivot counts are exponential. Every program solved in this
//! crate is small enough that this does not matter.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::rational::{self, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl Relation {
    fn flipped(self) -> Relation {
        match self {
            Relation::Le => Relation::Ge,
            Relation::Ge => Relation::Le,
            Relation::Eq => Relation::Eq,
        }
    }

    pub fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Relation::Le => lhs <= rhs,
            Relation::Ge => lhs >= rhs,
            Relation::Eq => lhs == rhs,
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn lhs(&self, z: &[Rational]) -> Rational {
        self.coeffs
            .iter()
            .zip(z)
            .filter(|(a, _)| !a.is_zero())
            .fold(Rational::zero(), |acc, (a, v)| acc + a * v)
    }
}

/// A linear program with per-variable bounds. New variables default to
/// `[0, +inf)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearProgram {
    lower: Vec<Option<Rational>>,
    upper: Vec<Option<Rational>>,
    constraints: Vec<Constraint>,
    objective: Vec<Rational>,
    sense: Sense,
}

impl LinearProgram {
    pub fn new(num_vars: usize, sense: Sense) -> Self {
        LinearProgram {
            lower: vec![Some(Rational::zero()); num_vars],
            upper: vec![None; num_vars],
            constraints: Vec::new(),
            objective: vec![Rational::zero(); num_vars],
            sense,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn set_bounds(&mut self, var: usize, lower: Option<Rational>, upper: Option<Rational>) {
        self.lower[var] = lower;
        self.upper[var] = upper;
    }

    pub fn lower(&self, var: usize) -> Option<&Rational> {
        self.lower[var].as_ref()
    }

    pub fn upper(&self, var: usize) -> Option<&Rational> {
        self.upper[var].as_ref()
    }

    pub fn set_objective(&mut self, coeffs: Vec<Rational>) {
        assert_eq!(coeffs.len(), self.num_vars(), "objective length mismatch");
        self.objective = coeffs;
    }

    pub fn set_objective_coeff(&mut self, var: usize, c: Rational) {
        self.objective[var] = c;
    }

    pub fn objective(&self) -> &[Rational] {
        &self.objective
    }

    /// Adds a dense constraint and returns its index.
    pub fn add_constraint(&mut self, coeffs: Vec<Rational>, relation: Relation, rhs: Rational) -> usize {
        assert_eq!(coeffs.len(), self.num_vars(), "constraint length mismatch");
        self.constraints.push(Constraint { coeffs, relation, rhs });
        self.constraints.len() - 1
    }

    /// Adds a constraint given as `(variable, coefficient)` terms; repeated
    /// variables accumulate.
    pub fn add_sparse<I>(&mut self, terms: I, relation: Relation, rhs: Rational) -> usize
    where
        I: IntoIterator<Item = (usize, Rational)>,
    {
        let mut coeffs = vec![Rational::zero(); self.num_vars()];
        for (j, a) in terms {
            coeffs[j] += a;
        }
        self.add_constraint(coeffs, relation, rhs)
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn objective_value(&self, z: &[Rational]) -> Rational {
        self.objective
            .iter()
            .zip(z)
            .filter(|(c, _)| !c.is_zero())
            .fold(Rational::zero(), |acc, (c, v)| acc + c * v)
    }
}

impl fmt::Display for LinearProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = |coeffs: &[Rational]| {
            let parts: Vec<String> = coeffs
                .iter()
                .enumerate()
                .filter(|(_, a)| !a.is_zero())
                .map(|(j, a)| format!("{} x{j}", rational::format(a)))
                .collect();
            if parts.is_empty() {
                "0".to_string()
            } else {
                parts.join(" + ")
            }
        };
        let sense = match self.sense {
            Sense::Minimize => "min",
            Sense::Maximize => "max",
        };
        writeln!(f, "{sense} {}", terms(&self.objective))?;
        for (i, c) in self.constraints.iter().enumerate() {
            writeln!(f, "  c{i}: {} {} {}", terms(&c.coeffs), c.relation, rational::format(&c.rhs))?;
        }
        for j in 0..self.num_vars() {
            let lo = self.lower[j].as_ref().map_or("-inf".into(), rational::format);
            let hi = self.upper[j].as_ref().map_or("+inf".into(), rational::format);
            writeln!(f, "  {lo} <= x{j} <= {hi}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    /// A basic optimal point.
    pub values: Vec<Rational>,
    pub objective: Rational,
    /// One multiplier per constraint; see [`verify_optimal`] for the sign
    /// convention.
    pub duals: Vec<Rational>,
    pub pivots: usize,
}

/// Multipliers `λ` (one per constraint, `λ ≥ 0` on `>=` rows, `λ ≤ 0` on
/// `<=` rows) such that `Σ λ_i a_i · x < Σ λ_i b_i` for every `x` in the
/// variable box, while every feasible `x` would need `>=`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FarkasCertificate {
    pub multipliers: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible(FarkasCertificate),
    Unbounded,
}

impl LpOutcome {
    pub fn optimal(&self) -> Option<&LpSolution> {
        match self {
            LpOutcome::Optimal(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self, LpOutcome::Infeasible(_))
    }
}

/// Where a point fails a program.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointViolation {
    WrongLength,
    BelowLower(usize),
    AboveUpper(usize),
    /// Constraint `index` does not hold; `relation` is the direction that
    /// was violated.
    Constraint { index: usize, relation: Relation },
}

/// Exact membership test. Bounds are checked before constraints, each in
/// index order, and the first failure is returned.
pub fn check_point(lp: &LinearProgram, z: &[Rational]) -> Result<(), PointViolation> {
    if z.len() != lp.num_vars() {
        return Err(PointViolation::WrongLength);
    }
    for (j, v) in z.iter().enumerate() {
        if lp.lower[j].as_ref().is_some_and(|l| v < l) {
            return Err(PointViolation::BelowLower(j));
        }
        if lp.upper[j].as_ref().is_some_and(|u| v > u) {
            return Err(PointViolation::AboveUpper(j));
        }
    }
    for (index, c) in lp.constraints.iter().enumerate() {
        if !c.relation.holds(&c.lhs(z), &c.rhs) {
            return Err(PointViolation::Constraint { index, relation: c.relation });
        }
    }
    Ok(())
}

/// Sum of `min`/`max` of `g · x` over the variable box; `None` when unbounded.
fn box_extreme(lp: &LinearProgram, g: &[Rational], maximize: bool) -> Option<Rational> {
    let mut total = Rational::zero();
    for (j, gj) in g.iter().enumerate() {
        if gj.is_zero() {
            continue;
        }
        let want_upper = gj.is_positive() == maximize;
        let bound = if want_upper { lp.upper[j].as_ref() } else { lp.lower[j].as_ref() };
        total += gj * bound?;
    }
    Some(total)
}

fn empty_box(lp: &LinearProgram) -> bool {
    lp.lower
        .iter()
        .zip(&lp.upper)
        .any(|(l, u)| matches!((l, u), (Some(l), Some(u)) if l > u))
}

fn dual_sign_ok(rel: Relation, y: &Rational) -> bool {
    match rel {
        Relation::Ge => !y.is_negative(),
        Relation::Le => !y.is_positive(),
        Relation::Eq => true,
    }
}

/// Checks that `sol` is feasible and that its duals certify optimality:
/// with `c` the objective written as a minimization, `y` the duals in the
/// same orientation and `d = c − Aᵀy`, the bound `y·b + Σ_j min_box(d_j x_j)`
/// is finite and equals the primal value.
pub fn verify_optimal(lp: &LinearProgram, sol: &LpSolution) -> bool {
    if check_point(lp, &sol.values).is_err() || lp.objective_value(&sol.values) != sol.objective {
        return false;
    }
    if sol.duals.len() != lp.constraints.len() {
        return false;
    }
    let sign = match lp.sense {
        Sense::Minimize => Rational::one(),
        Sense::Maximize => -Rational::one(),
    };
    let y: Vec<Rational> = sol.duals.iter().map(|v| v * &sign).collect();
    if !lp.constraints.iter().zip(&y).all(|(c, yi)| dual_sign_ok(c.relation, yi)) {
        return false;
    }
    let mut d: Vec<Rational> = lp.objective.iter().map(|c| c * &sign).collect();
    let mut dual_value = Rational::zero();
    for (c, yi) in lp.constraints.iter().zip(&y) {
        if yi.is_zero() {
            continue;
        }
        dual_value += yi * &c.rhs;
        for (dj, a) in d.iter_mut().zip(&c.coeffs) {
            if !a.is_zero() {
                *dj -= yi * a;
            }
        }
    }
    match box_extreme(lp, &d, false) {
        Some(b) => dual_value + b == &sol.objective * &sign,
        None => false,
    }
}

/// Checks a Farkas certificate against the program it claims to refute.
pub fn verify_infeasible(lp: &LinearProgram, cert: &FarkasCertificate) -> bool {
    if empty_box(lp) {
        return true;
    }
    if cert.multipliers.len() != lp.constraints.len() {
        return false;
    }
    if !lp
        .constraints
        .iter()
        .zip(&cert.multipliers)
        .all(|(c, l)| dual_sign_ok(c.relation, l))
    {
        return false;
    }
    let mut g = vec![Rational::zero(); lp.num_vars()];
    let mut rhs = Rational::zero();
    for (c, l) in lp.constraints.iter().zip(&cert.multipliers) {
        if l.is_zero() {
            continue;
        }
        rhs += l * &c.rhs;
        for (gj, a) in g.iter_mut().zip(&c.coeffs) {
            if !a.is_zero() {
                *gj += l * a;
            }
        }
    }
    match box_extreme(lp, &g, true) {
        Some(best) => best < rhs,
        None => false,
    }
}

/// Solves `lp` exactly.
pub fn solve(lp: &LinearProgram) -> LpOutcome {
    if empty_box(lp) {
        return LpOutcome::Infeasible(FarkasCertificate {
            multipliers: vec![Rational::zero(); lp.constraints.len()],
        });
    }
    StandardForm::build(lp).run(lp)
}

/// How an original variable is expressed through nonnegative columns:
/// `x = offset + Σ sign · x'_col`.
struct VarMap {
    offset: Rational,
    cols: Vec<(usize, bool)>,
}

#[derive(Clone, Copy)]
enum RowOrigin {
    Constraint(usize),
    Bound,
}

struct StdRow {
    coeffs: Vec<Rational>,
    relation: Relation,
    rhs: Rational,
    origin: RowOrigin,
    /// Row was multiplied by −1 to make the right-hand side nonnegative.
    flipped: bool,
}

struct StandardForm {
    vars: Vec<VarMap>,
    num_struct: usize,
    rows: Vec<StdRow>,
    /// Minimization costs over the structural columns.
    cost: Vec<Rational>,
}

impl StandardForm {
    fn build(lp: &LinearProgram) -> Self {
        let mut vars = Vec::with_capacity(lp.num_vars());
        let mut num_struct = 0usize;
        let mut bound_rows: Vec<(usize, Rational)> = Vec::new();
        for j in 0..lp.num_vars() {
            let map = match (&lp.lower[j], &lp.upper[j]) {
                (Some(l), u) => {
                    let col = num_struct;
                    num_struct += 1;
                    if let Some(u) = u {
                        bound_rows.push((col, u - l));
                    }
                    VarMap { offset: l.clone(), cols: vec![(col, true)] }
                }
                (None, Some(u)) => {
                    let col = num_struct;
                    num_struct += 1;
                    VarMap { offset: u.clone(), cols: vec![(col, false)] }
                }
                (None, None) => {
                    let col = num_struct;
                    num_struct += 2;
                    VarMap { offset: Rational::zero(), cols: vec![(col, true), (col + 1, false)] }
                }
            };
            vars.push(map);
        }

        let sign = match lp.sense {
            Sense::Minimize => Rational::one(),
            Sense::Maximize => -Rational::one(),
        };
        let mut cost = vec![Rational::zero(); num_struct];
        for (j, c) in lp.objective.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for &(col, pos) in &vars[j].cols {
                let v = c * &sign;
                cost[col] += if pos { v } else { -v };
            }
        }

        let mut rows = Vec::with_capacity(lp.constraints.len() + bound_rows.len());
        for (i, c) in lp.constraints.iter().enumerate() {
            let mut coeffs = vec![Rational::zero(); num_struct];
            let mut rhs = c.rhs.clone();
            for (j, a) in c.coeffs.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                rhs -= a * &vars[j].offset;
                for &(col, pos) in &vars[j].cols {
                    coeffs[col] += if pos { a.clone() } else { -a };
                }
            }
            rows.push(StdRow { coeffs, relation: c.relation, rhs, origin: RowOrigin::Constraint(i), flipped: false });
        }
        for (col, width) in bound_rows {
            let mut coeffs = vec![Rational::zero(); num_struct];
            coeffs[col] = Rational::one();
            rows.push(StdRow { coeffs, relation: Relation::Le, rhs: width, origin: RowOrigin::Bound, flipped: false });
        }
        for row in &mut rows {
            if row.rhs.is_negative() {
                for a in &mut row.coeffs {
                    *a = -std::mem::take(a);
                }
                row.rhs = -std::mem::take(&mut row.rhs);
                row.relation = row.relation.flipped();
                row.flipped = true;
            }
        }
        StandardForm { vars, num_struct, rows, cost }
    }

    fn run(self, lp: &LinearProgram) -> LpOutcome {
        let m = self.rows.len();
        let ns = self.num_struct;
        let num_slack = self.rows.iter().filter(|r| r.relation != Relation::Eq).count();
        let num_art = self.rows.iter().filter(|r| r.relation != Relation::Le).count();
        let art_start = ns + num_slack;
        let width = art_start + num_art;

        let mut t = Tableau {
            rows: Vec::with_capacity(m),
            basis: Vec::with_capacity(m),
            phase1: vec![Rational::zero(); width + 1],
            phase2: vec![Rational::zero(); width + 1],
            pivots: 0,
        };
        let mut init_col = Vec::with_capacity(m);
        let (mut next_slack, mut next_art) = (ns, art_start);
        for row in &self.rows {
            let mut r = vec![Rational::zero(); width + 1];
            r[..ns].clone_from_slice(&row.coeffs);
            r[width] = row.rhs.clone();
            match row.relation {
                Relation::Le => {
                    r[next_slack] = Rational::one();
                    init_col.push(next_slack);
                    next_slack += 1;
                }
                Relation::Ge => {
                    r[next_slack] = -Rational::one();
                    next_slack += 1;
                    r[next_art] = Rational::one();
                    init_col.push(next_art);
                    next_art += 1;
                }
                Relation::Eq => {
                    r[next_art] = Rational::one();
                    init_col.push(next_art);
                    next_art += 1;
                }
            }
            t.basis.push(*init_col.last().unwrap());
            t.rows.push(r);
        }
        t.phase2[..ns].clone_from_slice(&self.cost);
        for j in art_start..width {
            t.phase1[j] = Rational::one();
        }
        // Price out the artificial basis.
        for r in 0..m {
            if t.basis[r] >= art_start {
                for j in 0..=width {
                    if !t.rows[r][j].is_zero() {
                        let v = t.rows[r][j].clone();
                        t.phase1[j] -= v;
                    }
                }
            }
        }

        if num_art > 0 {
            // Phase I is bounded below by zero, so it cannot be unbounded.
            let _ = t.optimize(Phase::One, width);
            let infeasibility = -t.phase1[width].clone();
            if infeasibility.is_positive() {
                let multipliers = self.farkas(&t, &init_col, art_start, lp.constraints.len());
                return LpOutcome::Infeasible(FarkasCertificate { multipliers });
            }
            for r in 0..m {
                if t.basis[r] >= art_start {
                    if let Some(j) = (0..art_start).find(|&j| !t.rows[r][j].is_zero()) {
                        t.pivot(r, j);
                    }
                }
            }
        }

        if t.optimize(Phase::Two(art_start), width).is_err() {
            return LpOutcome::Unbounded;
        }

        let mut xs = vec![Rational::zero(); ns];
        for (r, &b) in t.basis.iter().enumerate() {
            if b < ns {
                xs[b] = t.rows[r][width].clone();
            }
        }
        let values: Vec<Rational> = self
            .vars
            .iter()
            .map(|vm| {
                vm.cols.iter().fold(vm.offset.clone(), |acc, &(col, pos)| {
                    if pos {
                        acc + &xs[col]
                    } else {
                        acc - &xs[col]
                    }
                })
            })
            .collect();
        let sign = match lp.sense {
            Sense::Minimize => Rational::one(),
            Sense::Maximize => -Rational::one(),
        };
        let mut duals = vec![Rational::zero(); lp.constraints.len()];
        for (r, row) in self.rows.iter().enumerate() {
            if let RowOrigin::Constraint(i) = row.origin {
                let y = -t.phase2[init_col[r]].clone();
                let y = if row.flipped { -y } else { y };
                duals[i] = y * &sign;
            }
        }
        let objective = lp.objective_value(&values);
        LpOutcome::Optimal(LpSolution { values, objective, duals, pivots: t.pivots })
    }

    fn farkas(&self, t: &Tableau, init_col: &[usize], art_start: usize, num_constraints: usize) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); num_constraints];
        for (r, row) in self.rows.iter().enumerate() {
            if let RowOrigin::Constraint(i) = row.origin {
                let c = init_col[r];
                let base = if c >= art_start { Rational::one() } else { Rational::zero() };
                let y = base - &t.phase1[c];
                out[i] = if row.flipped { -y } else { y };
            }
        }
        out
    }
}

#[derive(Clone, Copy)]
enum Phase {
    One,
    /// Columns at or beyond this index (artificials) may not enter.
    Two(usize),
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    /// Reduced costs; the last entry is minus the current objective value.
    phase1: Vec<Rational>,
    phase2: Vec<Rational>,
    pivots: usize,
}

struct Unbounded;

impl Tableau {
    fn optimize(&mut self, phase: Phase, width: usize) -> Result<(), Unbounded> {
        loop {
            let (cost, limit) = match phase {
                Phase::One => (&self.phase1, width),
                Phase::Two(limit) => (&self.phase2, limit),
            };
            let Some(enter) = (0..limit).find(|&j| cost[j].is_negative()) else {
                return Ok(());
            };
            let mut leave: Option<(usize, Rational)> = None;
            for (r, row) in self.rows.iter().enumerate() {
                let a = &row[enter];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &row[width] / a;
                let better = match &leave {
                    None => true,
                    Some((lr, best)) => ratio < *best || (ratio == *best && self.basis[r] < self.basis[*lr]),
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
            let Some((r, _)) = leave else {
                return Err(Unbounded);
            };
            self.pivot(r, enter);
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        self.pivots += 1;
        let mut prow = std::mem::take(&mut self.rows[r]);
        let p = prow[c].clone();
        if !p.is_one() {
            for v in prow.iter_mut().filter(|v| !v.is_zero()) {
                *v /= &p;
            }
        }
        let nz: Vec<usize> = (0..prow.len()).filter(|&j| !prow[j].is_zero()).collect();
        let eliminate = |row: &mut Vec<Rational>| {
            if row[c].is_zero() {
                return;
            }
            let f = row[c].clone();
            for &j in &nz {
                let delta = &f * &prow[j];
                row[j] -= delta;
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(&mut self.phase1);
        eliminate(&mut self.phase2);
        self.rows[r] = prow;
        self.basis[r] = c;
    }
}

/// Number of coordinates that are not integers.
pub fn fractional_count(values: &[Rational]) -> usize {
    values.iter().filter(|v| !rational::is_integer(v)).count()
}
