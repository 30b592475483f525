//! Weighted multidimensional knapsack cover and the guess-`Q` search for
//! solutions with few centers outside a well-separated set.
//!
//! The table is `A[i, M_1..M_γ', j]`: the best weight of at most `j` items
//! among the first `i` whose coverage meets the residual demands `M`, with
//!
//! ```text
//! A[i, M, j] = max( w(i) + A[i-1, max(M - a(i), 0), j-1],  A[i-1, M, j] )
//! ```
//!
//! Only reachable states are materialized.

use std::collections::HashMap;

use num_traits::Signed;

use crate::error::{Error, Result};
use crate::model::Instance;
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DpProgram {
    weights: Vec<Rational>,
    /// `coeffs[l][i] = a_l(i)`.
    coeffs: Vec<Vec<u32>>,
    demands: Vec<u32>,
    capacity: usize,
}

impl DpProgram {
    /// Capacities above the item count are clamped to it.
    pub fn new(weights: Vec<Rational>, coeffs: Vec<Vec<u32>>, demands: Vec<u32>, capacity: usize) -> Result<Self> {
        let q = weights.len();
        if weights.iter().any(Signed::is_negative) {
            return Err(Error::InvalidInstance("negative item weight".into()));
        }
        if coeffs.len() != demands.len() || coeffs.iter().any(|row| row.len() != q) {
            return Err(Error::InvalidInstance("coefficient matrix has the wrong shape".into()));
        }
        Ok(DpProgram { weights, coeffs, demands, capacity: capacity.min(q) })
    }

    /// A program with zero weights, for pure feasibility.
    pub fn unweighted(coeffs: Vec<Vec<u32>>, demands: Vec<u32>, capacity: usize) -> Result<Self> {
        let q = coeffs.first().map_or(0, Vec::len);
        Self::new(vec![rational::zero(); q], coeffs, demands, capacity)
    }

    pub fn items(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn coeffs(&self) -> &[Vec<u32>] {
        &self.coeffs
    }

    pub fn demands(&self) -> &[u32] {
        &self.demands
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Largest entry of `a` and `m`.
    pub fn max_entry(&self) -> u32 {
        self.coeffs.iter().flatten().chain(&self.demands).copied().max().unwrap_or(0)
    }

    /// Whether a selection meets every demand within capacity.
    pub fn admits(&self, selected: &[bool]) -> bool {
        selected.iter().filter(|&&b| b).count() <= self.capacity
            && self.coeffs.iter().zip(&self.demands).all(|(row, &m)| {
                row.iter().zip(selected).filter(|(_, &s)| s).map(|(&a, _)| a as u64).sum::<u64>() >= m as u64
            })
    }

    pub fn value(&self, selected: &[bool]) -> Rational {
        rational::sum(self.weights.iter().zip(selected).filter(|(_, &s)| s).map(|(w, _)| w))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DpSolution {
    pub selected: Vec<bool>,
    pub value: Rational,
}

impl DpSolution {
    pub fn chosen(&self) -> Vec<usize> {
        (0..self.selected.len()).filter(|&i| self.selected[i]).collect()
    }
}

type State = (usize, Vec<u32>, usize);

struct Table<'a> {
    prog: &'a DpProgram,
    memo: HashMap<State, Option<Rational>>,
}

impl Table<'_> {
    fn residual(&self, item: usize, m: &[u32]) -> Vec<u32> {
        m.iter()
            .enumerate()
            .map(|(l, &v)| v.saturating_sub(self.prog.coeffs[l][item]))
            .collect()
    }

    fn get(&mut self, i: usize, m: &[u32], j: usize) -> Option<Rational> {
        if i == 0 {
            return m.iter().all(|&v| v == 0).then(rational::zero);
        }
        let key = (i, m.to_vec(), j);
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let (skip, take) = self.branches(i, m, j);
        let best = match (skip, take) {
            (Some(s), Some(t)) => Some(if t >= s { t } else { s }),
            (s, t) => s.or(t),
        };
        self.memo.insert(key, best.clone());
        best
    }

    fn branches(&mut self, i: usize, m: &[u32], j: usize) -> (Option<Rational>, Option<Rational>) {
        let skip = self.get(i - 1, m, j);
        let take = if j > 0 {
            let rest = self.residual(i - 1, m);
            self.get(i - 1, &rest, j - 1).map(|v| v + &self.prog.weights[i - 1])
        } else {
            None
        };
        (skip, take)
    }
}

/// Maximum-weight selection of at most `κ` items meeting every demand, or
/// `None` when no binary selection is feasible. Ties prefer taking the
/// later item.
pub fn dp_solve(prog: &DpProgram) -> Option<DpSolution> {
    let mut table = Table { prog, memo: HashMap::new() };
    let q = prog.items();
    let value = table.get(q, &prog.demands, prog.capacity)?;
    let mut selected = vec![false; q];
    let mut m = prog.demands.clone();
    let mut j = prog.capacity;
    for i in (1..=q).rev() {
        let (skip, take) = table.branches(i, &m, j);
        let take_it = match (skip, take) {
            (Some(s), Some(t)) => t >= s,
            (None, Some(_)) => true,
            _ => false,
        };
        if take_it {
            selected[i - 1] = true;
            m = table.residual(i - 1, &m);
            j -= 1;
        }
    }
    debug_assert!(prog.admits(&selected));
    Some(DpSolution { selected, value })
}

/// At most `β` centers may be opened outside the separated set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GuessBudget {
    beta: usize,
}

impl GuessBudget {
    pub fn new(beta: usize, k: usize) -> Result<Self> {
        if beta > k {
            return Err(Error::InvalidInstance(format!("guess budget {beta} exceeds k = {k}")));
        }
        Ok(GuessBudget { beta })
    }

    /// `min(β, k)`.
    pub fn clamped(beta: usize, k: usize) -> Self {
        GuessBudget { beta: beta.min(k) }
    }

    pub fn beta(&self) -> usize {
        self.beta
    }
}

/// Lower bound on `α(B(C, r2))` required of a returned set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightRule<'a> {
    pub alpha: &'a [Rational],
    pub threshold: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FewOutside {
    /// `Q ∪ W`, sorted.
    pub centers: Vec<usize>,
    /// The guessed `Q`.
    pub outside: Vec<usize>,
    /// `α(B(C, r2))` in the weighted form.
    pub weight: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FewOutsideSearch {
    pub found: Option<FewOutside>,
    pub dp_calls: usize,
}

/// Searches for `C = Q ∪ W` with `Q ⊆ X \ S`, `|Q| <= β`, `W ⊆ S`, `|C| <= k`
/// meeting every demand at radius `r2` (and the weight rule, if given).
/// Guesses `Q` by size, then lexicographically; the first success wins.
pub fn find_few_outside(
    inst: &Instance,
    r2: &Rational,
    s: &[usize],
    budget: GuessBudget,
    weight: Option<&WeightRule<'_>>,
) -> Result<FewOutsideSearch> {
    let n = inst.n();
    let balls: Vec<Vec<usize>> = s.iter().map(|&w| inst.ball(w, r2)).collect();
    let mut owner = vec![None; n];
    for (i, ball) in balls.iter().enumerate() {
        for &u in ball {
            if let Some(j) = owner[u].replace(i) {
                return Err(Error::invariant(format!(
                    "balls around {} and {} intersect at radius {}",
                    s[j],
                    s[i],
                    rational::format(r2)
                )));
            }
        }
    }
    let mut in_s = vec![false; n];
    for &w in s {
        in_s[w] = true;
    }
    let outside: Vec<usize> = (0..n).filter(|&u| !in_s[u]).collect();
    let max_q = budget.beta().min(inst.k()).min(outside.len());
    let mut dp_calls = 0;
    for size in 0..=max_q {
        let mut combo: Vec<usize> = (0..size).collect();
        loop {
            let q: Vec<usize> = combo.iter().map(|&i| outside[i]).collect();
            dp_calls += 1;
            if let Some(found) = try_guess(inst, r2, s, &balls, &q, weight) {
                return Ok(FewOutsideSearch { found: Some(found), dp_calls });
            }
            if !next_combination(&mut combo, outside.len()) {
                break;
            }
        }
    }
    Ok(FewOutsideSearch { found: None, dp_calls })
}

fn try_guess(
    inst: &Instance,
    r2: &Rational,
    s: &[usize],
    balls: &[Vec<usize>],
    q: &[usize],
    weight: Option<&WeightRule<'_>>,
) -> Option<FewOutside> {
    let covered = inst.covered(q, r2);
    let mut coeffs = Vec::new();
    let mut demands = Vec::new();
    for (l, c) in inst.colors().iter().enumerate() {
        let got = c.members().iter().filter(|&&u| covered[u]).count();
        let residual = c.demand().saturating_sub(got);
        if residual == 0 {
            continue;
        }
        demands.push(residual as u32);
        coeffs.push(
            balls
                .iter()
                .map(|ball| ball.iter().filter(|&&u| !covered[u] && inst.has_color(u, l)).count() as u32)
                .collect(),
        );
    }
    let weights: Vec<Rational> = match weight {
        Some(rule) => balls
            .iter()
            .map(|ball| rational::sum(ball.iter().filter(|&&u| !covered[u]).map(|&u| &rule.alpha[u])))
            .collect(),
        None => vec![rational::zero(); s.len()],
    };
    let prog = DpProgram { weights, coeffs, demands, capacity: (inst.k() - q.len()).min(s.len()) };
    let sol = dp_solve(&prog)?;
    let base = weight.map(|rule| rational::sum((0..inst.n()).filter(|&u| covered[u]).map(|u| &rule.alpha[u])));
    let total = base.map(|b| b + &sol.value);
    if let (Some(rule), Some(total)) = (weight, &total) {
        if total < &rule.threshold {
            return None;
        }
    }
    let mut centers: Vec<usize> = q.iter().copied().chain(sol.chosen().into_iter().map(|i| s[i])).collect();
    centers.sort_unstable();
    Some(FewOutside { centers, outside: q.to_vec(), weight: total })
}

/// Advances `combo` to the next `|combo|`-subset of `0..n` in lexicographic order.
pub(crate) fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let k = combo.len();
    for i in (0..k).rev() {
        if combo[i] < n - k + i {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
