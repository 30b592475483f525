//! Instance generators: vertex-cover and set-cover reductions, the
//! limiting-example fixture, and seeded random instances.

use std::collections::BTreeSet;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ColorClass, FairInstance, Instance};
use crate::partition::FractionalPoint;
use crate::rational::{self, Rational};

/// A simple undirected graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for &(u, v) in &edges {
            if u >= n || v >= n {
                return Err(Error::InvalidInstance(format!("edge ({u}, {v}) leaves 0..{n}")));
            }
            if u == v {
                return Err(Error::InvalidInstance(format!("self-loop at {u}")));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::InvalidInstance(format!("repeated edge ({u}, {v})")));
            }
        }
        Ok(Graph { n, edges })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn max_degree(&self) -> usize {
        let mut deg = vec![0; self.n];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg.into_iter().max().unwrap_or(0)
    }

    /// Parses an edge list: one `u v` pair per line (0-indexed), `#`
    /// comments, and an optional `p <n>` header fixing the vertex count.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut n = None;
        let mut edges = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let bad = || Error::Parse(format!("line {}: cannot read {raw:?}", lineno + 1));
            match fields.as_slice() {
                ["p", count] => n = Some(count.parse().map_err(|_| bad())?),
                [u, v] => edges.push((u.parse::<usize>().map_err(|_| bad())?, v.parse::<usize>().map_err(|_| bad())?)),
                _ => return Err(bad()),
            }
        }
        let n = n.unwrap_or_else(|| edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0));
        Graph::new(n, edges)
    }

    pub fn to_edge_list(&self) -> String {
        let mut out = format!("p {}\n", self.n);
        for (u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    /// Whether some vertex set of size at most `t` touches every edge.
    pub fn has_vertex_cover(&self, t: usize) -> bool {
        (0u32..1 << self.n).any(|mask| {
            mask.count_ones() as usize <= t
                && self.edges.iter().all(|&(u, v)| mask >> u & 1 == 1 || mask >> v & 1 == 1)
        })
    }
}

/// A universe `0..universe` and a family of its subsets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetCoverInstance {
    pub universe: usize,
    pub sets: Vec<Vec<usize>>,
}

impl SetCoverInstance {
    pub fn new(universe: usize, sets: Vec<Vec<usize>>) -> Result<Self> {
        let sc = SetCoverInstance { universe, sets };
        sc.validate()?;
        Ok(sc)
    }

    pub fn validate(&self) -> Result<()> {
        match self.sets.iter().flatten().find(|&&e| e >= self.universe) {
            Some(e) => Err(Error::InvalidInstance(format!("element {e} is outside the universe"))),
            None => Ok(()),
        }
    }

    /// Whether at most `t` sets cover the universe.
    pub fn has_cover(&self, t: usize) -> bool {
        let masks: Vec<u64> = self.sets.iter().map(|s| s.iter().fold(0, |m, &e| m | 1 << e)).collect();
        let full = if self.universe == 64 { u64::MAX } else { (1u64 << self.universe) - 1 };
        (0u64..1 << masks.len()).any(|pick| {
            pick.count_ones() as usize <= t
                && (0..masks.len()).filter(|&i| pick >> i & 1 == 1).fold(0, |m, i| m | masks[i]) == full
        })
    }
}

fn line_metric(n: usize) -> Vec<Rational> {
    (0..n).map(|i| rational::int(i as i64)).collect()
}

fn pad_colors(mut colors: Vec<ColorClass>) -> Vec<ColorClass> {
    if colors.is_empty() {
        colors.push(ColorClass::new(Vec::new(), 0));
    }
    colors
}

/// Vertices become points on a line and each edge a color with demand 1
/// over its endpoints. A radius-0 solution exists iff a vertex cover of
/// size at most `t` does.
pub fn gen_from_vc3(g: &Graph, t: usize) -> Result<Instance> {
    if g.max_degree() > 3 {
        tracing::warn!(max_degree = g.max_degree(), "graph exceeds maximum degree 3");
    }
    let colors = g.edges.iter().map(|&(u, v)| ColorClass::new(vec![u, v], 1)).collect();
    Instance::on_line(&line_metric(g.n), t.min(g.n), pad_colors(colors))
}

/// Sets become points on a line and each element a color with demand 1 over
/// the sets containing it.
pub fn gen_from_setcover(sc: &SetCoverInstance, t: usize) -> Result<Instance> {
    sc.validate()?;
    let colors = (0..sc.universe)
        .map(|e| ColorClass::new((0..sc.sets.len()).filter(|&i| sc.sets[i].contains(&e)).collect(), 1))
        .collect();
    Instance::on_line(&line_metric(sc.sets.len()), t.min(sc.sets.len()), pad_colors(colors))
}

/// The limiting example: an integrality gap of the relaxation at radius 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AppendixB {
    pub instance: Instance,
    /// Two optimal radius-1 solutions.
    pub optimal: [Vec<usize>; 2],
    /// Their average: `x ≡ 1/2`, `y = (χ(C1) + χ(C2)) / 2`.
    pub point: FractionalPoint,
    pub optimum: Rational,
}

pub const FIXTURE_RED: usize = 0;
pub const FIXTURE_BLUE: usize = 1;

/// Twelve points at locations 1, 2, 3, 4, 4, 4 and `M+1` (three times),
/// `M+2`, `M+3`, `M+4`, colored red and blue, with `m = (3, 3)` and `k = 2`.
pub fn fixture_appendix_b(m: i64) -> Result<AppendixB> {
    if m < 9 {
        return Err(Error::InvalidInstance(format!("fixture needs M >= 9, got {m}")));
    }
    let layout = [
        (1, FIXTURE_RED),
        (2, FIXTURE_RED),
        (3, FIXTURE_BLUE),
        (4, FIXTURE_BLUE),
        (4, FIXTURE_RED),
        (4, FIXTURE_RED),
        (m + 1, FIXTURE_BLUE),
        (m + 1, FIXTURE_BLUE),
        (m + 1, FIXTURE_BLUE),
        (m + 2, FIXTURE_RED),
        (m + 3, FIXTURE_BLUE),
        (m + 4, FIXTURE_RED),
    ];
    let coords: Vec<Rational> = layout.iter().map(|&(x, _)| rational::int(x)).collect();
    let members = |color| (0..layout.len()).filter(|&i| layout[i].1 == color).collect();
    let colors = vec![ColorClass::new(members(FIXTURE_RED), 3), ColorClass::new(members(FIXTURE_BLUE), 3)];
    let instance = Instance::on_line(&coords, 2, colors)?;
    let optimal = [vec![0, 6], vec![3, 11]];
    let n = instance.n();
    let mut y = vec![rational::zero(); n];
    for c in optimal.iter().flatten() {
        y[*c] = rational::ratio(1, 2);
    }
    let point = FractionalPoint::new(vec![rational::ratio(1, 2); n], y)?;
    Ok(AppendixB { instance, optimal, point, optimum: rational::one() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricKind {
    /// Integer coordinates on a line.
    Line,
    /// Integer grid points under the L1 distance.
    GridL1,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomSpec {
    pub n: usize,
    pub k: usize,
    pub gamma: usize,
    pub metric: MetricKind,
    /// Probability that a point carries a given color.
    pub color_density: f64,
    /// Demands are drawn from `0..=ceil(demand_density · |X_l|)`.
    pub demand_density: f64,
    /// Probability that a point gets a positive coverage requirement.
    pub p_density: f64,
}

impl RandomSpec {
    pub fn new(n: usize, k: usize, gamma: usize, metric: MetricKind) -> Self {
        RandomSpec { n, k, gamma, metric, color_density: 0.5, demand_density: 0.5, p_density: 0.5 }
    }

    fn check(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidInstance(m.into()));
        if self.n == 0 {
            return bad("n must be positive");
        }
        if self.k == 0 || self.k > self.n {
            return bad("k must lie in 1..=n");
        }
        if self.gamma == 0 {
            return bad("γ must be positive");
        }
        for d in [self.color_density, self.demand_density, self.p_density] {
            if !(0.0..=1.0).contains(&d) {
                return bad("densities must lie in [0, 1]");
            }
        }
        Ok(())
    }
}

fn random_metric(rng: &mut ChaCha8Rng, spec: &RandomSpec) -> Vec<Vec<Rational>> {
    let n = spec.n;
    let points: Vec<(i64, i64)> = match spec.metric {
        MetricKind::Line => (0..n).map(|_| (rng.gen_range(0..=3 * n as i64), 0)).collect(),
        MetricKind::GridL1 => {
            let side = (n as f64).sqrt().ceil() as i64 + 2;
            (0..n).map(|_| (rng.gen_range(0..=side), rng.gen_range(0..=side))).collect()
        }
    };
    points
        .iter()
        .map(|a| points.iter().map(|b| rational::int((a.0 - b.0).abs() + (a.1 - b.1).abs())).collect())
        .collect()
}

/// A seeded random colorful instance; every positive demand is attainable.
pub fn gen_random(seed: u64, spec: &RandomSpec) -> Result<Instance> {
    spec.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = random_metric(&mut rng, spec);
    let colors = (0..spec.gamma)
        .map(|_| {
            let mut members: Vec<usize> = (0..spec.n).filter(|_| rng.gen_bool(spec.color_density)).collect();
            if members.is_empty() {
                members.push(rng.gen_range(0..spec.n));
            }
            let top = ((spec.demand_density * members.len() as f64).ceil() as usize).min(members.len());
            let demand = rng.gen_range(0..=top);
            ColorClass::new(members, demand)
        })
        .collect();
    Instance::new(dist, spec.k, colors)
}

/// A seeded random fair instance with probabilities of denominator at most 4.
pub fn gen_random_fair(seed: u64, spec: &RandomSpec) -> Result<FairInstance> {
    let base = gen_random(seed, spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let p = (0..spec.n)
        .map(|_| {
            if rng.gen_bool(spec.p_density) {
                let den = rng.gen_range(1..=4);
                rational::ratio(rng.gen_range(1..=den), den)
            } else {
                rational::zero()
            }
        })
        .collect();
    FairInstance::new(base, p)
}

/// A seeded random connected graph with maximum degree 3.
pub fn gen_connected_subcubic(seed: u64, n: usize) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut deg = vec![0usize; n];
    let mut edges = BTreeSet::new();
    for v in 1..n {
        let open: Vec<usize> = (0..v).filter(|&u| deg[u] < 3).collect();
        let u = open[rng.gen_range(0..open.len())];
        edges.insert((u, v));
        deg[u] += 1;
        deg[v] += 1;
    }
    let extra = rng.gen_range(0..=n);
    for _ in 0..extra {
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let key = (u.min(v), u.max(v));
        if u != v && deg[u] < 3 && deg[v] < 3 && edges.insert(key) {
            deg[u] += 1;
            deg[v] += 1;
        }
    }
    Graph::new(n, edges.into_iter().collect()).expect("generated graph is simple")
}

/// A seeded random set family over `0..universe` in which every element
/// lies in some set (when `sets > 0`).
pub fn gen_random_setcover(seed: u64, universe: usize, sets: usize) -> SetCoverInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sets: Vec<Vec<usize>> = (0..sets)
        .map(|_| (0..universe).filter(|_| rng.gen_bool(0.4)).collect())
        .collect();
    if !sets.is_empty() {
        for e in 0..universe {
            if !sets.iter().any(|s| s.contains(&e)) {
                let i = rng.gen_range(0..sets.len());
                sets[i].push(e);
                sets[i].sort_unstable();
            }
        }
    }
    SetCoverInstance { universe, sets }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::check_point;
    use crate::rational::int;
    use crate::relaxation::{join_point, relaxation};

    #[test]
    fn triangle_with_pendant_graph() {
        let g = Graph::new(4, vec![(0, 1), (1, 2), (0, 2), (0, 3)]).unwrap();
        let inst = gen_from_vc3(&g, 2).unwrap();
        assert_eq!((inst.n(), inst.gamma(), inst.k()), (4, 4, 2));
        assert!(inst.check_feasible(&[0, 2], &int(0)).feasible);
        assert!(g.has_vertex_cover(2));
    }

    #[test]
    fn edgeless_graph_gets_a_dummy_color() {
        let g = Graph::new(3, vec![]).unwrap();
        let inst = gen_from_vc3(&g, 0).unwrap();
        assert_eq!(inst.gamma(), 1);
        assert_eq!(inst.k(), 0);
        assert!(inst.check_feasible(&[], &int(0)).feasible);
    }

    #[test]
    fn edge_list_round_trip() {
        let g = Graph::parse_edge_list("# triangle\np 4\n0 1\n1 2 # c\n\n0 2\n").unwrap();
        assert_eq!(g.n(), 4);
        assert_eq!(Graph::parse_edge_list(&g.to_edge_list()).unwrap(), g);
        assert!(Graph::parse_edge_list("0 0\n").is_err());
        assert!(Graph::parse_edge_list("0 1 2\n").is_err());
        assert!(!g.has_vertex_cover(1));
    }

    #[test]
    fn setcover_examples() {
        let one = SetCoverInstance::new(1, vec![vec![0]]).unwrap();
        assert!(gen_from_setcover(&one, 1).unwrap().check_feasible(&[0], &int(0)).feasible);
        let two = SetCoverInstance::new(2, vec![vec![0], vec![1], vec![0, 1]]).unwrap();
        let inst = gen_from_setcover(&two, 1).unwrap();
        assert!(!inst.check_feasible(&[0], &int(0)).feasible);
        assert!(inst.check_feasible(&[2], &int(0)).feasible);
        assert!(SetCoverInstance::new(1, vec![vec![3]]).is_err());
    }

    #[test]
    fn fixture_shape() {
        let fx = fixture_appendix_b(100).unwrap();
        let inst = &fx.instance;
        assert_eq!(inst.n(), 12);
        assert_eq!(inst.ball(0, &int(1)), vec![0, 1]);
        assert_eq!(inst.check_feasible(&fx.optimal[0], &int(1)).counts, vec![3, 3]);
        assert!(inst.check_feasible(&fx.optimal[1], &int(1)).feasible);
        let lp = relaxation(inst, &int(1));
        assert_eq!(check_point(&lp, &join_point(&fx.point)), Ok(()));
        assert!(fixture_appendix_b(8).is_err());
    }

    #[test]
    fn random_is_seed_stable() {
        let spec = RandomSpec::new(8, 2, 2, MetricKind::GridL1);
        assert_eq!(gen_random(3, &spec).unwrap(), gen_random(3, &spec).unwrap());
        assert_eq!(gen_random_fair(3, &spec).unwrap(), gen_random_fair(3, &spec).unwrap());
        assert!(gen_random(0, &RandomSpec { k: 0, ..spec }).is_err());
    }

    #[test]
    fn subcubic_graphs_are_connected() {
        for seed in 0..50 {
            let g = gen_connected_subcubic(seed, 7);
            assert!(g.max_degree() <= 3);
            let mut seen = [false; 7];
            let mut stack = vec![0];
            while let Some(u) = stack.pop() {
                if !std::mem::replace(&mut seen[u], true) {
                    stack.extend(g.edges().iter().filter_map(|&(a, b)| (a == u).then_some(b).or((b == u).then_some(a))));
                }
            }
            assert!(seen.iter().all(|&s| s));
        }
    }
}
