//! Instances, balls, candidate radii and feasibility checks.

use std::fmt;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// First defect found in a distance matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MetricViolation {
    NotSquare { row: usize, len: usize, expected: usize },
    Empty,
    NonzeroDiagonal(usize),
    Negative(usize, usize),
    Asymmetric(usize, usize),
    /// `d(i, k) > d(i, j) + d(j, k)`.
    Triangle(usize, usize, usize),
}

impl fmt::Display for MetricViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricViolation::NotSquare { row, len, expected } => {
                write!(f, "row {row} has {len} entries, expected {expected}")
            }
            MetricViolation::Empty => write!(f, "metric has no points"),
            MetricViolation::NonzeroDiagonal(i) => write!(f, "d({i},{i}) is not zero"),
            MetricViolation::Negative(i, j) => write!(f, "d({i},{j}) is negative"),
            MetricViolation::Asymmetric(i, j) => write!(f, "d({i},{j}) != d({j},{i})"),
            MetricViolation::Triangle(i, j, k) => {
                write!(f, "triangle inequality fails: d({i},{k}) > d({i},{j}) + d({j},{k})")
            }
        }
    }
}

impl std::error::Error for MetricViolation {}

/// Checks that `dist` is a finite metric, exactly.
pub fn validate_metric(dist: &[Vec<Rational>]) -> std::result::Result<(), MetricViolation> {
    let n = dist.len();
    if n == 0 {
        return Err(MetricViolation::Empty);
    }
    for (i, row) in dist.iter().enumerate() {
        if row.len() != n {
            return Err(MetricViolation::NotSquare { row: i, len: row.len(), expected: n });
        }
    }
    for i in 0..n {
        if !dist[i][i].is_zero() {
            return Err(MetricViolation::NonzeroDiagonal(i));
        }
        for j in 0..n {
            if dist[i][j].is_negative() {
                return Err(MetricViolation::Negative(i, j));
            }
            if dist[i][j] != dist[j][i] {
                return Err(MetricViolation::Asymmetric(i.min(j), i.max(j)));
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if dist[i][k] > &dist[i][j] + &dist[j][k] {
                    return Err(MetricViolation::Triangle(i, j, k));
                }
            }
        }
    }
    Ok(())
}

/// One color class `X_l` with its coverage demand `m_l`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorClass {
    members: Vec<usize>,
    demand: usize,
}

impl ColorClass {
    pub fn new(mut members: Vec<usize>, demand: usize) -> Self {
        members.sort_unstable();
        members.dedup();
        ColorClass { members, demand }
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn demand(&self) -> usize {
        self.demand
    }
}

/// A colorful k-center instance over an explicit rational metric.
///
/// Immutable once built; every constructor path validates the metric, the
/// color classes and the budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    dist: Vec<Vec<Rational>>,
    k: usize,
    colors: Vec<ColorClass>,
    /// `membership[l][u]` is true iff `u` carries color `l`.
    membership: Vec<Vec<bool>>,
}

impl Instance {
    pub fn new(dist: Vec<Vec<Rational>>, k: usize, colors: Vec<ColorClass>) -> Result<Self> {
        validate_metric(&dist)?;
        let n = dist.len();
        if k > n {
            return Err(Error::InvalidInstance(format!("k = {k} exceeds the {n} points")));
        }
        if colors.is_empty() {
            return Err(Error::InvalidInstance("at least one color class is required".into()));
        }
        let mut membership = Vec::with_capacity(colors.len());
        for (l, c) in colors.iter().enumerate() {
            let mut row = vec![false; n];
            for &u in c.members() {
                if u >= n {
                    return Err(Error::InvalidInstance(format!(
                        "color {l} references point {u}, but there are only {n} points"
                    )));
                }
                row[u] = true;
            }
            if c.demand() > c.members().len() {
                return Err(Error::InvalidInstance(format!(
                    "color {l} demands {} points but has only {}",
                    c.demand(),
                    c.members().len()
                )));
            }
            membership.push(row);
        }
        Ok(Instance { dist, k, colors, membership })
    }

    /// Points on the real line at the given rational coordinates.
    pub fn on_line(coords: &[Rational], k: usize, colors: Vec<ColorClass>) -> Result<Self> {
        let dist = coords
            .iter()
            .map(|a| coords.iter().map(|b| (a - b).abs()).collect())
            .collect();
        Instance::new(dist, k, colors)
    }

    pub fn n(&self) -> usize {
        self.dist.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn gamma(&self) -> usize {
        self.colors.len()
    }

    pub fn colors(&self) -> &[ColorClass] {
        &self.colors
    }

    pub fn dist(&self, u: usize, v: usize) -> &Rational {
        &self.dist[u][v]
    }

    pub fn distances(&self) -> &[Vec<Rational>] {
        &self.dist
    }

    pub fn has_color(&self, u: usize, color: usize) -> bool {
        self.membership[color][u]
    }

    pub fn demands(&self) -> Vec<usize> {
        self.colors.iter().map(ColorClass::demand).collect()
    }

    /// `B(c, r)`, ascending.
    pub fn ball(&self, c: usize, r: &Rational) -> Vec<usize> {
        (0..self.n()).filter(|&u| &self.dist[c][u] <= r).collect()
    }

    /// Indicator vector of `B(C, r)`.
    pub fn covered(&self, centers: &[usize], r: &Rational) -> Vec<bool> {
        (0..self.n())
            .map(|u| centers.iter().any(|&c| &self.dist[c][u] <= r))
            .collect()
    }

    /// Sorted distinct values of `{0} ∪ {d(u, v)}`.
    pub fn candidate_radii(&self) -> Vec<Rational> {
        let mut radii: Vec<Rational> = std::iter::once(rational::zero())
            .chain(self.dist.iter().flatten().cloned())
            .collect();
        radii.sort();
        radii.dedup();
        radii
    }

    /// Per-color coverage of `B(C, r)` and whether `C` is a solution of radius `r`.
    pub fn check_feasible(&self, centers: &[usize], r: &Rational) -> Coverage {
        let mut distinct = centers.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        let covered = self.covered(&distinct, r);
        let counts: Vec<usize> = self
            .colors
            .iter()
            .map(|c| c.members().iter().filter(|&&u| covered[u]).count())
            .collect();
        let feasible = distinct.len() <= self.k
            && counts.iter().zip(&self.colors).all(|(&got, c)| got >= c.demand());
        Coverage { counts, feasible }
    }

    /// Smallest candidate radius at which `centers` is a solution, if any.
    pub fn tightest_radius(&self, centers: &[usize]) -> Option<Rational> {
        let mut distinct = centers.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() > self.k {
            return None;
        }
        let mut radius = rational::zero();
        for c in &self.colors {
            if c.demand() == 0 {
                continue;
            }
            let mut d: Vec<&Rational> = c
                .members()
                .iter()
                .map(|&u| distinct.iter().map(|&s| &self.dist[s][u]).min())
                .collect::<Option<Vec<_>>>()?;
            d.sort();
            if d[c.demand() - 1] > &radius {
                radius = d[c.demand() - 1].clone();
            }
        }
        Some(radius)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coverage {
    pub counts: Vec<usize>,
    pub feasible: bool,
}

/// A colorful instance with per-point coverage probabilities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FairInstance {
    base: Instance,
    p: Vec<Rational>,
}

impl FairInstance {
    pub fn new(base: Instance, p: Vec<Rational>) -> Result<Self> {
        if p.len() != base.n() {
            return Err(Error::InvalidInstance(format!(
                "probability vector has {} entries for {} points",
                p.len(),
                base.n()
            )));
        }
        if let Some(u) = p.iter().position(|v| v.is_negative() || v > &rational::one()) {
            return Err(Error::InvalidInstance(format!("p({u}) is outside [0, 1]")));
        }
        Ok(FairInstance { base, p })
    }

    pub fn base(&self) -> &Instance {
        &self.base
    }

    pub fn p(&self) -> &[Rational] {
        &self.p
    }
}

/// Centers together with the radius they are claimed to work for.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CenterSet {
    pub centers: Vec<usize>,
    pub radius: Rational,
}

impl CenterSet {
    pub fn new(mut centers: Vec<usize>, radius: Rational) -> Self {
        centers.sort_unstable();
        centers.dedup();
        CenterSet { centers, radius }
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }
}
