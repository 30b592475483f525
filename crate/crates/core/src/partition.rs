//! Greedy clustering of a fractional point into well-separated clusters.
//!
//! Repeatedly pick the uncovered point with the largest `x` value (lowest
//! index on ties), and give it every still-uncovered point within `4r`.
//! Centers end up pairwise more than `4r` apart, and for a point of the
//! relaxation every cluster member `u` satisfies `y(B(s_i, r)) >= x(u)`.

use std::fmt;

use num_traits::Signed;

use crate::error::{Error, Result};
use crate::model::Instance;
use crate::rational::{self, Rational};

/// Per-point coverage values `x` and opening values `y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FractionalPoint {
    pub x: Vec<Rational>,
    pub y: Vec<Rational>,
}

impl FractionalPoint {
    pub fn new(x: Vec<Rational>, y: Vec<Rational>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::InvalidInstance("x and y have different lengths".into()));
        }
        let one = rational::one();
        if x.iter().chain(&y).any(|v| v.is_negative() || v > &one) {
            return Err(Error::InvalidInstance("fractional point leaves [0, 1]".into()));
        }
        Ok(FractionalPoint { x, y })
    }

    /// Integral point of a center set: `y = χ(C)`, `x = χ(B(C, r))`.
    pub fn integral(inst: &Instance, centers: &[usize], r: &Rational) -> Self {
        let covered = inst.covered(centers, r);
        let ind = |b: bool| if b { rational::one() } else { rational::zero() };
        let mut y = vec![rational::zero(); inst.n()];
        for &c in centers {
            y[c] = rational::one();
        }
        FractionalPoint { x: covered.into_iter().map(ind).collect(), y }
    }

    /// `y(A)` for a set of points.
    pub fn y_mass(&self, points: &[usize]) -> Rational {
        rational::sum(points.iter().map(|&u| &self.y[u]))
    }
}

/// Centers `s_1..s_q` in greedy order with their clusters `D_1..D_q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoodPartition {
    pub centers: Vec<usize>,
    pub clusters: Vec<Vec<usize>>,
}

impl GoodPartition {
    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// `B(S, r)` as a sorted point list.
    pub fn center_ball(&self, inst: &Instance, r: &Rational) -> Vec<usize> {
        let covered = inst.covered(&self.centers, r);
        (0..inst.n()).filter(|&u| covered[u]).collect()
    }
}

pub fn good_partition(inst: &Instance, r: &Rational, pt: &FractionalPoint) -> GoodPartition {
    let reach = r * rational::int(4);
    let mut uncovered = vec![true; inst.n()];
    let mut remaining = inst.n();
    let mut centers = Vec::new();
    let mut clusters = Vec::new();
    while remaining > 0 {
        let mut best: Option<usize> = None;
        for u in (0..inst.n()).filter(|&u| uncovered[u]) {
            if best.is_none_or(|b| pt.x[u] > pt.x[b]) {
                best = Some(u);
            }
        }
        let s = best.expect("an uncovered point exists");
        let cluster: Vec<usize> = (0..inst.n())
            .filter(|&u| uncovered[u] && inst.dist(s, u) <= &reach)
            .collect();
        for &u in &cluster {
            uncovered[u] = false;
        }
        remaining -= cluster.len();
        centers.push(s);
        clusters.push(cluster);
    }
    GoodPartition { centers, clusters }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PartitionViolation {
    Malformed(String),
    /// Centers `s_i`, `s_j` lie within `4r` of each other.
    CentersTooClose(usize, usize),
    /// Point lies in cluster `i` but farther than `4r` from `s_i`.
    OutsideBall { cluster: usize, point: usize },
    /// `y(B(s_i, r)) < x(point)` for a member of cluster `i`.
    Underfunded { cluster: usize, point: usize },
}

impl fmt::Display for PartitionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PartitionViolation::Malformed(m) => write!(f, "not a partition: {m}"),
            PartitionViolation::CentersTooClose(i, j) => {
                write!(f, "property 1: centers {i} and {j} are within 4r")
            }
            PartitionViolation::OutsideBall { cluster, point } => {
                write!(f, "property 2: point {point} of cluster {cluster} is beyond 4r")
            }
            PartitionViolation::Underfunded { cluster, point } => {
                write!(f, "property 3: y-mass near center {cluster} is below x({point})")
            }
        }
    }
}

/// Checks every defining property of a good partition exactly.
pub fn verify_partition(
    inst: &Instance,
    r: &Rational,
    pt: &FractionalPoint,
    part: &GoodPartition,
) -> std::result::Result<(), PartitionViolation> {
    let malformed = |m: String| Err(PartitionViolation::Malformed(m));
    if part.centers.len() != part.clusters.len() {
        return malformed("center and cluster counts differ".into());
    }
    let mut owner = vec![None; inst.n()];
    for (i, cluster) in part.clusters.iter().enumerate() {
        for &u in cluster {
            if u >= inst.n() {
                return malformed(format!("point {u} out of range"));
            }
            if owner[u].replace(i).is_some() {
                return malformed(format!("point {u} is in two clusters"));
            }
        }
        if !cluster.contains(&part.centers[i]) {
            return malformed(format!("center {} is not in its cluster", part.centers[i]));
        }
    }
    if let Some(u) = owner.iter().position(Option::is_none) {
        return malformed(format!("point {u} is in no cluster"));
    }
    let reach = r * rational::int(4);
    for i in 0..part.len() {
        for j in i + 1..part.len() {
            if inst.dist(part.centers[i], part.centers[j]) <= &reach {
                return Err(PartitionViolation::CentersTooClose(i, j));
            }
        }
    }
    for (i, cluster) in part.clusters.iter().enumerate() {
        if let Some(&u) = cluster.iter().find(|&&u| inst.dist(part.centers[i], u) > &reach) {
            return Err(PartitionViolation::OutsideBall { cluster: i, point: u });
        }
    }
    for (i, cluster) in part.clusters.iter().enumerate() {
        let mass = pt.y_mass(&inst.ball(part.centers[i], r));
        if let Some(&u) = cluster.iter().find(|&&u| pt.x[u] > mass) {
            return Err(PartitionViolation::Underfunded { cluster: i, point: u });
        }
    }
    Ok(())
}

/// `x(u)` of every center, in greedy order.
pub fn center_values(part: &GoodPartition, pt: &FractionalPoint) -> Vec<Rational> {
    part.centers.iter().map(|&s| pt.x[s].clone()).collect()
}

#[cfg(test)]
pub(crate) fn is_nonincreasing(values: &[Rational]) -> bool {
    values.windows(2).all(|w| w[0] >= w[1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ColorClass;
    use crate::rational::{int, ratio};

    fn line(coords: &[i64]) -> Instance {
        let c: Vec<Rational> = coords.iter().map(|&v| int(v)).collect();
        Instance::on_line(&c, 1, vec![ColorClass::new(vec![], 0)]).unwrap()
    }

    fn halves(n: usize) -> Vec<Rational> {
        vec![ratio(1, 2); n]
    }

    #[test]
    fn two_pairs_on_a_line() {
        let inst = line(&[0, 1, 10, 11]);
        let pt = FractionalPoint::new(halves(4), vec![ratio(1, 2), int(0), ratio(1, 2), int(0)]).unwrap();
        let part = good_partition(&inst, &int(1), &pt);
        assert_eq!(part.centers, vec![0, 2]);
        assert_eq!(part.clusters, vec![vec![0, 1], vec![2, 3]]);
        assert_eq!(verify_partition(&inst, &int(1), &pt, &part), Ok(()));
    }

    #[test]
    fn single_point() {
        let inst = line(&[3]);
        let pt = FractionalPoint::new(vec![int(0)], vec![int(0)]).unwrap();
        let part = good_partition(&inst, &int(7), &pt);
        assert_eq!(part.centers, vec![0]);
        assert_eq!(part.clusters, vec![vec![0]]);
    }

    #[test]
    fn greedy_prefers_large_x() {
        let inst = line(&[0, 1, 2, 30]);
        let pt = FractionalPoint::new(
            vec![ratio(1, 3), ratio(2, 3), ratio(2, 3), int(1)],
            vec![int(0); 4],
        )
        .unwrap();
        let part = good_partition(&inst, &ratio(1, 8), &pt);
        assert_eq!(part.centers, vec![3, 1, 2, 0]);
        assert!(is_nonincreasing(&center_values(&part, &pt)));
    }

    #[test]
    fn detects_each_property() {
        let inst = line(&[0, 4, 5]);
        let pt = FractionalPoint::new(vec![int(1); 3], vec![int(1); 3]).unwrap();
        let r = int(1);
        let close = GoodPartition { centers: vec![0, 1], clusters: vec![vec![0], vec![1, 2]] };
        assert_eq!(verify_partition(&inst, &r, &pt, &close), Err(PartitionViolation::CentersTooClose(0, 1)));
        let inst = line(&[0, 5]);
        let pt = FractionalPoint::new(vec![int(1); 2], vec![int(1); 2]).unwrap();
        let far = GoodPartition { centers: vec![0], clusters: vec![vec![0, 1]] };
        assert_eq!(
            verify_partition(&inst, &r, &pt, &far),
            Err(PartitionViolation::OutsideBall { cluster: 0, point: 1 })
        );
        let thin = FractionalPoint::new(vec![int(1); 2], vec![int(0); 2]).unwrap();
        let ok_shape = GoodPartition { centers: vec![0, 1], clusters: vec![vec![0], vec![1]] };
        assert_eq!(
            verify_partition(&inst, &r, &thin, &ok_shape),
            Err(PartitionViolation::Underfunded { cluster: 0, point: 0 })
        );
        let missing = GoodPartition { centers: vec![0], clusters: vec![vec![0]] };
        assert!(matches!(verify_partition(&inst, &r, &pt, &missing), Err(PartitionViolation::Malformed(_))));
    }

    #[test]
    fn rejects_out_of_range_point() {
        assert!(FractionalPoint::new(vec![ratio(3, 2)], vec![int(0)]).is_err());
        assert!(FractionalPoint::new(vec![int(0)], vec![]).is_err());
    }
}
